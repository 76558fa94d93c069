#pragma once

// Optional cross-check against a public elliptic curve database. Nothing in
// the pipeline depends on this; every failure here is a warning.

#include "cassels/curve.hpp"
#include "cassels/report.hpp"

#include <json.hpp>

#include <array>
#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cassels::lmfdb {

inline constexpr const char* kDefaultBaseUrl = "https://www.lmfdb.org/api/ec_curvedata/";

struct ExternalCurveRecord {
    std::string label;
    long rank = 0;
    std::optional<Integer> sha_order;
    std::string torsion_structure;   // e.g. "[2,2]"
    std::string source_url;
    std::string fetched_at;          // ISO 8601, UTC
    std::array<Integer, 5> ainvs{};

    /// Short model y^2 = x^3 + A x + B with A = -27 c4, B = -54 c6.
    std::pair<Integer, Integer> short_model() const;

    friend bool operator==(const ExternalCurveRecord&, const ExternalCurveRecord&) = default;
};

nlohmann::json to_json(const ExternalCurveRecord& r);
/// Throws std::runtime_error on a malformed cache entry.
ExternalCurveRecord record_from_json(const nlohmann::json& j);

/// Parses a database reply {"data": [ {...} ]}. Returns nullopt for an empty
/// result; throws std::runtime_error when the body is malformed.
std::optional<ExternalCurveRecord> parse_response(const std::string& body, const std::string& url,
                                                  const std::string& fetched_at);

/// Reduced minimal model [a1,a2,a3,a4,a6] of y^2 = x^3 + A x + B.
std::array<Integer, 5> minimal_ainvs(const Integer& A, const Integer& B);

std::string cache_key(const Integer& A, const Integer& B);
std::string cache_key(const std::string& label);

struct ClientOptions {
    std::string base_url = kDefaultBaseUrl;
    /// Empty disables the cache.
    std::string cache_dir;
    bool offline = false;
    std::chrono::milliseconds min_interval{1000};
    std::chrono::seconds timeout{10};

    /// CASSELS_DB_URL, CASSELS_DB_CACHE (default ~/.cache/cassels/db),
    /// CASSELS_OFFLINE (any value other than "" or "0").
    static ClientOptions from_environment();
};

/// Lookups are serialized and throttled.
class Client {
public:
    explicit Client(ClientOptions options = ClientOptions::from_environment());

    std::optional<ExternalCurveRecord> lookup(const curve::SplitCurve& curve);
    std::optional<ExternalCurveRecord> lookup(const std::string& label);

    /// Requests actually sent over the network so far.
    std::size_t requests() const { return requests_; }
    std::vector<std::string> take_warnings();
    const ClientOptions& options() const { return options_; }

private:
    std::optional<ExternalCurveRecord> lookup_keyed(const std::string& key, const std::string& query);
    std::optional<ExternalCurveRecord> load_cached(const std::string& key);
    void store(const std::string& key, const ExternalCurveRecord& r);
    std::optional<std::string> get(const std::string& query, std::string& url);
    void warn(std::string message);

    ClientOptions options_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point last_request_{};
    std::size_t requests_ = 0;
    std::vector<std::string> warnings_;
};

struct Comparison {
    bool bound_sharp = false;
    bool inconsistent = false;
    long gap = 0;
    std::vector<std::string> flags;
    std::vector<std::string> warnings;

    std::string to_string() const;
};

Comparison compare(const cli::Report& report, const ExternalCurveRecord& record);

}  // namespace cassels::lmfdb
