#pragma once

#include "levilab/domain.hpp"
#include "levilab/report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace levilab {

struct RunConfig {
  std::string command;  // analyze, correct, verify, dfsearch
  std::string domain;   // catalog id; ignored when expr is set
  std::string expr;
  std::optional<double> eps;
  std::vector<double> etas;
  std::optional<double> collar;  // collar width; domain default when unset
  int samples = 2000;            // boundary samples
  int collar_depths = 4;         // depths per foot, evenly spaced up to the width
  int dirs = 64;
  std::uint64_t seed = 1;
  double tol_scale = 1e-8;       // lambda_tol = tol_scale |d rho|
  std::string out;               // path prefix; empty writes JSON to stdout
  std::string format = "json";   // json, csv, both
  std::string use = "raw";       // raw, corrected, exterior
  bool timings = false;
};

Json to_json(const RunConfig& c);
RunConfig config_from_json(const Json& j);
/// Throws std::invalid_argument on a violated invariant.
void validate_config(const RunConfig& c);

DomainSpec resolve_domain(const RunConfig& c);

/// Exit codes: 0 every check passed, 2 a check failed, 1 execution error.
struct RunResult {
  Json bundle;
  int exit_code = 0;
  std::vector<InequalityReport> tables;  // for CSV output
};

RunResult run_command(const RunConfig& c);

/// Writes <out>.json and/or <out>_<report>.csv atomically; with an empty
/// prefix prints the JSON bundle to stdout.
void emit(const RunConfig& c, const RunResult& r);

/// Minimum log-log slope of the first-order normal Taylor residual over the
/// first `feet` samples; exact fits count as passing.
struct TaylorResidualSummary {
  int probes = 0;
  int exact = 0;
  double min_slope = 0.0;
};
TaylorResidualSummary taylor_residual_summary(const DomainSpec& spec, const std::vector<BoundarySample>& samples,
                                              int feet = 16);

}  // namespace levilab
