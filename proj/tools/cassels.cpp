// Command line front end: compute Selmer groups, pairing matrices and rank bounds.

#include "cassels/lmfdb.hpp"
#include "cassels/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace cassels;

    CLI::App app{"Selmer groups and Cassels-Tate pairings for curves with full rational 2-torsion"};
    app.set_version_flag("--version", cli::version());
    app.require_subcommand(1);

    auto* compute = app.add_subcommand("compute", "run the full pipeline on one curve");
    std::string roots, coeffs, label, json_path;
    cli::RunConfig config;
    bool no_timings = false;
    auto* o_roots = compute->add_option("--roots", roots, "three rational roots r1,r2,r3");
    auto* o_coeffs = compute->add_option("--coeffs", coeffs, "short Weierstrass coefficients a,b (y^2 = x^3 + a x + b)");
    auto* o_label = compute->add_option("--label", label, "database label, e.g. 32.a3");
    o_roots->excludes(o_coeffs, o_label);
    o_coeffs->excludes(o_label);
    compute->add_option("--height-bound", config.height_bound, "naive height bound for the point search")
        ->capture_default_str();
    compute->add_option("--precision", config.precision, "p-adic precision (0 = per-prime default)")
        ->capture_default_str();
    compute->add_option("--seed", config.seed, "seed for conic and local point choices")->capture_default_str();
    compute->add_flag("--verify", config.verify, "rerun with other choices and check the matrix is unchanged");
    compute->add_option("--places", config.extra_places, "extra primes to include, e.g. 13,17")->delimiter(',');
    compute->add_option("--json", json_path, "write the JSON report to PATH ('-' for stdout)");
    compute->add_flag("--offline", config.offline, "never contact the curve database");
    compute->add_flag("--no-timings", no_timings, "omit timings from the JSON report");
    compute->add_option("--threads", config.threads, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    if (!roots.empty()) {
        config.input = cli::InputKind::Roots;
        config.values = split(roots);
    } else if (!coeffs.empty()) {
        config.input = cli::InputKind::Coefficients;
        config.values = split(coeffs);
    } else if (!label.empty()) {
        config.input = cli::InputKind::Label;
        config.label = label;
    } else {
        std::cerr << "error: give one of --roots, --coeffs, --label\n";
        return 2;
    }
    config.json_path = json_path;
    config.format = json_path == "-" ? cli::OutputFormat::Json : cli::OutputFormat::Text;

    auto db_options = lmfdb::ClientOptions::from_environment();
    db_options.offline = db_options.offline || config.offline;
    lmfdb::Client db(db_options);
    auto flush_warnings = [&db] {
        for (const auto& w : db.take_warnings()) std::cerr << "warning: database: " << w << "\n";
    };

    cli::LabelResolver resolver = [&db, &flush_warnings](const std::string& l) {
        auto record = db.lookup(l);
        flush_warnings();
        if (!record) throw std::invalid_argument("label " + l + " not found in the database or cache");
        const auto [A, B] = record->short_model();
        return curve::SplitCurve::from_coefficients(A, B);
    };

    cli::Report report;
    try {
        report = cli::run(config, resolver);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    const std::string json_text = cli::to_json(report, !no_timings).dump(2) + "\n";
    if (config.format == cli::OutputFormat::Json) {
        std::cout << json_text;
    } else {
        std::cout << cli::to_text(report);
        if (!json_path.empty()) {
            std::ofstream out(json_path);
            out << json_text;
            if (!out) {
                std::cerr << "error: cannot write " << json_path << "\n";
                return 1;
            }
        }
    }

    // Cross-check against the database; advisory only.
    try {
        const auto curve = cli::parse_curve(config, resolver);
        if (auto record = db.lookup(curve)) {
            std::cerr << "database: " << record->label << " rank " << record->rank << "\n"
                      << lmfdb::compare(report, *record).to_string();
        }
    } catch (const std::exception& e) {
        std::cerr << "warning: database: " << e.what() << "\n";
    }
    flush_warnings();

    if (report.verify) {
        const auto& v = *report.verify;
        const bool ok = v.symmetric && v.delta_ok && v.conic_reseed_equal && v.resample_equal &&
                        v.local_factors_stable && v.enlarged_places_equal;
        if (!ok) {
            std::cerr << "error: verification failed\n";
            return 3;
        }
    }
    return 0;
}
