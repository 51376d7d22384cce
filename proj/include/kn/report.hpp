#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kn/params.hpp"

namespace kn {

inline constexpr const char* TOOL_VERSION = "0.1.0";

struct CheckRecord {
    std::string check;     // stable check name (see explain())
    std::string campaign;
    std::uint64_t seed = 0;
    std::string params_fp;  // ParameterSet fingerprint (hex)
    std::string inputs;     // short human-readable digest of the inputs
    double scale = 1.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double wall_ms = 0.0;
};

struct CampaignConfig {
    std::string campaign = "all";
    int n = 0;    // 0 = per-check defaults
    int M = 0;    // 0 = per-check defaults
    int N = 0;
    int ell = 3;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    TruncationConfig trunc;
    double tol = 0.0;  // 0 = per-check defaults; otherwise overrides all
    std::string out;   // report path; empty = stdout only
    int jobs = 1;
};

struct Report {
    int schema = 1;
    std::string tool_version = TOOL_VERSION;
    CampaignConfig config;
    std::vector<CheckRecord> records;
};

/// Execute the selected campaign ("all" or one of campaign_names()).
Report run_campaign(const CampaignConfig& cfg);

/// Serialize deterministically (sorted structure, shortest-roundtrip
/// doubles).  If include_timing is false, wall-time fields are omitted;
/// two runs with the same config then serialize byte-identically.
std::string report_json(const Report& rep, bool include_timing = true);

bool report_all_passed(const Report& rep);

/// Names of the selectable campaigns (excluding "all").
std::vector<std::string> campaign_names();

/// Mathematical description of a check or campaign: what identity is
/// evaluated, how, and why the tolerance is what it is.
/// Throws DomainError listing valid names if the name is unknown.
std::string explain(const std::string& name);

}  // namespace kn
