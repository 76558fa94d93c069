#pragma once

// Run configuration, the full pipeline and its report.

#include "cassels/ctp.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cassels::cli {

enum class InputKind { Roots, Coefficients, Label };
enum class OutputFormat { Text, Json };

struct RunConfig {
    InputKind input = InputKind::Roots;
    /// Rational strings: three roots or the pair (A, B).
    std::vector<std::string> values;
    std::string label;
    long height_bound = 1000;
    /// Relative p-adic precision; 0 selects the per-prime default.
    long precision = 0;
    std::uint64_t seed = 0;
    bool verify = false;
    std::vector<long> extra_places;
    OutputFormat format = OutputFormat::Text;
    std::string json_path;
    bool offline = false;
    unsigned threads = 0;

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
};

struct CurveInfo {
    std::string input;
    std::array<Integer, 3> e;
    Integer A, B, disc;
    Integer scale;
    Rational shift;
};

struct PointInfo {
    Rational x, y;
    curve::SquareClassTriple image;
};

struct LogLine {
    std::string place;
    std::size_t row = 0;
    std::size_t col = 0;
    int factor = 1;
};

struct DeltaInfo {
    std::size_t witnesses = 0;
    std::size_t evaluations = 0;
    std::size_t scale_identity_failures = 0;
    std::size_t tangent_identity_failures = 0;
    std::size_t corrected_symbol_failures = 0;
    std::size_t uncorrected_symbol_differences = 0;
    std::size_t escalations = 0;
    bool matrix_agrees = false;
};

struct VerifyInfo {
    bool symmetric = false;
    bool delta_ok = false;
    bool conic_reseed_equal = false;
    bool resample_equal = false;
    bool local_factors_stable = false;
    bool enlarged_places_equal = false;
    std::vector<std::string> added_places;
    std::vector<std::string> messages;
};

struct Timings {
    double selmer_ms = 0;
    double pairing_ms = 0;
    double verify_ms = 0;
    double total_ms = 0;
};

struct Report {
    CurveInfo curve;
    std::size_t selmer_dim = 0;
    std::vector<curve::SquareClassTriple> selmer_basis;
    std::vector<curve::SquareClassTriple> torsion_image;
    std::vector<std::vector<int>> matrix_bits;
    std::size_t matrix_rank = 0;
    std::vector<curve::SquareClassTriple> kernel_basis;
    long naive_bound = 0;
    long refined_bound = 0;
    std::vector<PointInfo> points;
    std::vector<LogLine> local_log;
    std::optional<DeltaInfo> delta;
    std::optional<VerifyInfo> verify;
    nlohmann::json config;
    std::string version;
    Timings timings;

    /// (-1)^bit entries of the pairing matrix.
    std::vector<std::vector<int>> matrix_signs() const;
};

class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Resolves a database label to a curve; supplied by the caller so that the
/// pipeline itself never touches the network.
using LabelResolver = std::function<curve::SplitCurve(const std::string&)>;

curve::SplitCurve parse_curve(const RunConfig& config, const LabelResolver& resolver = {});

/// parse -> Selmer group -> pairing matrix -> bounds -> report. Throws
/// PipelineError (with curve, element and place context where known) when a
/// stage fails or an invariant of the result is violated.
Report run(const RunConfig& config, const LabelResolver& resolver = {});

nlohmann::json config_to_json(const RunConfig& config);
nlohmann::json to_json(const Report& report, bool include_timings = true);
Report report_from_json(const nlohmann::json& j);
std::string to_text(const Report& report);

const char* version();

}  // namespace cassels::cli
