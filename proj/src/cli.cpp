#include "levilab/cli.hpp"

#include "levilab/correction.hpp"
#include "levilab/expression.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>

namespace levilab {

namespace {

std::vector<CollarPoint> collar_for(const RunConfig& c, const DomainSpec& spec,
                                    const std::vector<BoundarySample>& feet, Side side) {
  std::vector<double> depths;
  for (int k = 1; k <= c.collar_depths; ++k) depths.push_back(spec.collar_width * k / c.collar_depths);
  return collar_points(feet, depths, side);
}

CorrectionOptions correction_options(const RunConfig& c) {
  CorrectionOptions opt;
  opt.boundary_samples = c.samples;
  opt.seed = c.seed;
  opt.tol_scale = c.tol_scale;
  opt.directions = c.dirs;
  return opt;
}

MainCheckOptions main_options(const RunConfig& c) {
  MainCheckOptions opt;
  opt.directions = c.dirs;
  opt.seed = c.seed;
  opt.tol_scale = c.tol_scale;
  return opt;
}

bool stages_pass(const CorrectionLedger& l) {
  for (const auto& s : l.stages) {
    if (!s.compare.holds) return false;
    for (const auto& r : s.cutoff_reports)
      if (!r.pass) return false;
  }
  return true;
}

Json obstruction_scan(const DomainSpec& spec, const std::vector<BoundarySample>& samples,
                      const Stratification& strat) {
  Json out = Json::object();
  for (int i = 0; i < spec.n - 1; ++i) {
    double best = 0.0;
    int arg = -1;
    CVector dir;
    for (int idx : strat.strata[i]) {
      const BoundarySample& b = samples[idx];
      const LeviSpectrum ls = levi_spectrum(spec, b);
      const RealJet j = spec.rho.jet(b.p, 3);
      for (int a = 0; a < spec.n - 1 - i; ++a) {
        const CVector w = ls.directions.col(a);
        const double v = third_form_from_jet(j, w, w, b.normal).real();
        if (arg < 0 || std::abs(v) > std::abs(best) * (1.0 + 1e-9)) {
          best = v;
          arg = idx;
          dir = w;
        }
      }
    }
    if (arg < 0) continue;
    out[std::to_string(i)] = {{"max_abs", std::abs(best)},
                              {"value", best},
                              {"sample", arg},
                              {"point", point_json(samples[arg].p)},
                              {"direction", point_json(dir)}};
  }
  return out;
}

Json taylor_json(const TaylorResidualSummary& t) {
  return {{"probes", t.probes}, {"exact", t.exact}, {"min_slope", t.min_slope}, {"pass", t.min_slope >= 1.9}};
}

int verdict(bool ok) { return ok ? 0 : 2; }

RunResult cmd_analyze(const RunConfig& c, const DomainSpec& spec) {
  RunResult res;
  const auto samples = boundary_cloud(spec, c.samples, c.seed);
  const Stratification strat = stratify(spec, samples, c.tol_scale);
  InequalityReport psh = check_psh_on_boundary(spec, samples);
  const TaylorResidualSummary taylor = taylor_residual_summary(spec, samples);
  res.bundle["stratification"] = to_json(strat);
  res.bundle["obstruction"] = obstruction_scan(spec, samples, strat);
  res.bundle["taylor_residual"] = taylor_json(taylor);
  res.bundle["reports"]["psh_on_boundary"] = to_json(psh);
  res.exit_code = verdict(psh.pass && taylor.min_slope >= 1.9);
  res.tables.push_back(std::move(psh));
  return res;
}

RunResult cmd_correct(const RunConfig& c, const DomainSpec& spec) {
  if (!c.eps) throw std::invalid_argument("correct requires --eps");
  RunResult res;
  const CorrectionLedger ledger = build_interior(spec, *c.eps, correction_options(c));
  const ScalarField r2 = build_exterior(spec, ledger);
  res.bundle["ledger"] = to_json(ledger);
  res.bundle["r2"] = r2.descriptor();
  res.exit_code = verdict(stages_pass(ledger));
  return res;
}

RunResult cmd_verify(const RunConfig& c, const DomainSpec& spec) {
  RunResult res;
  const double eps = c.eps.value_or(0.05);
  res.bundle["eps"] = eps;
  const auto samples = boundary_cloud(spec, c.samples, c.seed);
  InequalityReport psh = check_psh_on_boundary(spec, samples);
  bool ok = psh.pass;
  res.bundle["reports"]["psh_on_boundary"] = to_json(psh);
  res.tables.push_back(std::move(psh));

  ScalarField r1 = spec.rho, r2 = spec.rho;
  if (c.use != "raw") {
    const CorrectionLedger ledger = build_interior(spec, eps, correction_options(c));
    r1 = ledger.r1;
    r2 = build_exterior(spec, ledger);
    res.bundle["ledger"] = to_json(ledger);
    ok = ok && stages_pass(ledger);
  }
  res.bundle["r1"] = r1.descriptor();
  res.bundle["r2"] = r2.descriptor();
  const MainCheckOptions mo = main_options(c);
  if (c.use != "exterior") {
    InequalityReport m1 = check_main1(spec, r1, eps, collar_for(c, spec, samples, Side::Interior), mo);
    ok = ok && m1.pass;
    res.bundle["reports"]["main1"] = to_json(m1);
    res.tables.push_back(std::move(m1));
  }
  InequalityReport m2 = check_main2(spec, r2, eps, collar_for(c, spec, samples, Side::Exterior), mo);
  ok = ok && m2.pass;
  res.bundle["reports"]["main2"] = to_json(m2);
  res.tables.push_back(std::move(m2));

  res.bundle["factor_probe"] = to_json(taylor_factor_probe(spec, samples, spec.rho, c.tol_scale));
  const TaylorResidualSummary taylor = taylor_residual_summary(spec, samples);
  res.bundle["taylor_residual"] = taylor_json(taylor);
  res.exit_code = verdict(ok && taylor.min_slope >= 1.9);
  return res;
}

RunResult cmd_dfsearch(const RunConfig& c, const DomainSpec& spec) {
  if (c.etas.empty()) throw std::invalid_argument("dfsearch requires a nonempty --etas grid");
  RunResult res;
  std::vector<double> inner, outer;
  for (double e : c.etas) (e < 1.0 ? inner : outer).push_back(e);
  const auto samples = boundary_cloud(spec, c.samples, c.seed);
  const double d_max = max_norm2(samples);
  res.bundle["d_max"] = d_max;
  res.bundle["notes"]["scope"] =
      "strict plurisubharmonicity is checked on the collar only; globalization is not attempted";

  ScalarField r1 = spec.rho, r2 = spec.rho;
  if (c.use != "raw") {
    double eps = c.eps.value_or(0.05);
    if (!inner.empty()) {
      const double eta = *std::max_element(inner.begin(), inner.end());
      eps = std::min((1 - eta) / 4, (1 - eta) / (8 * eta * (1 + eta) * d_max));
    }
    const CorrectionLedger ledger = build_interior(spec, eps, correction_options(c));
    r1 = ledger.r1;
    r2 = build_exterior(spec, ledger);
    res.bundle["eps_used"] = eps;
    res.bundle["ledger"] = to_json(ledger);
  }
  res.bundle["r1"] = r1.descriptor();
  res.bundle["r2"] = r2.descriptor();

  bool ok = true;
  if (!inner.empty()) {
    const DFSearchResult df = df_search(spec, r1, inner, collar_for(c, spec, samples, Side::Interior), d_max);
    for (std::size_t i = 0; i < inner.size(); ++i) ok = ok && df.strict_psh[i] && df.bracket_ok[i];
    res.bundle["df"] = to_json(df);
  }
  if (!outer.empty()) {
    res.bundle["notes"]["exterior_delta"] = "(eta-1)/(2 eta (eta+1) D), mirrored from the interior rule";
    const auto collar = collar_for(c, spec, samples, Side::Exterior);
    for (double eta : outer) {
      InequalityReport rep = exterior_df_check(spec, r2, eta, collar, d_max);
      ok = ok && rep.pass && rep.min_slack > 0.0;
      const std::string key = Json(eta).dump();  // shortest round-trip form
      res.bundle["exterior"][key] = to_json(rep, false);
      rep.name += std::string("_") + key;
      res.tables.push_back(std::move(rep));
    }
  }
  res.exit_code = verdict(ok);
  return res;
}

}  // namespace

Json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"domain", c.domain},
          {"expr", c.expr},
          {"eps", c.eps ? Json(*c.eps) : Json(nullptr)},
          {"etas", c.etas},
          {"collar", c.collar ? Json(*c.collar) : Json(nullptr)},
          {"samples", c.samples},
          {"collar_depths", c.collar_depths},
          {"dirs", c.dirs},
          {"seed", c.seed},
          {"tol_scale", c.tol_scale},
          {"out", c.out},
          {"format", c.format},
          {"use", c.use},
          {"timings", c.timings}};
}

RunConfig config_from_json(const Json& j) {
  RunConfig c;
  c.command = j.value("command", c.command);
  c.domain = j.value("domain", c.domain);
  c.expr = j.value("expr", c.expr);
  if (j.contains("eps") && !j["eps"].is_null()) c.eps = j["eps"].get<double>();
  if (j.contains("etas")) c.etas = j["etas"].get<std::vector<double>>();
  if (j.contains("collar") && !j["collar"].is_null()) c.collar = j["collar"].get<double>();
  c.samples = j.value("samples", c.samples);
  c.collar_depths = j.value("collar_depths", c.collar_depths);
  c.dirs = j.value("dirs", c.dirs);
  c.seed = j.value("seed", c.seed);
  c.tol_scale = j.value("tol_scale", c.tol_scale);
  c.out = j.value("out", c.out);
  c.format = j.value("format", c.format);
  c.use = j.value("use", c.use);
  c.timings = j.value("timings", c.timings);
  return c;
}

void validate_config(const RunConfig& c) {
  static const char* kCommands[] = {"analyze", "correct", "verify", "dfsearch"};
  if (std::find_if(std::begin(kCommands), std::end(kCommands), [&](const char* s) { return c.command == s; }) ==
      std::end(kCommands)) {
    throw std::invalid_argument("unknown command '" + c.command + "'");
  }
  if (c.domain.empty() && c.expr.empty()) throw std::invalid_argument("one of --domain or --expr is required");
  if (c.samples < 1 || c.collar_depths < 1 || c.dirs < 1) throw std::invalid_argument("counts must be >= 1");
  if (c.eps && !(*c.eps > 0.0)) throw std::invalid_argument("--eps must be positive");
  if (c.collar && !(*c.collar > 0.0)) throw std::invalid_argument("--collar must be positive");
  if (!(c.tol_scale > 0.0)) throw std::invalid_argument("tol_scale must be positive");
  for (double e : c.etas) {
    if (!(e > 0.0) || e == 1.0 || !std::isfinite(e)) {
      throw std::invalid_argument("eta values must lie in (0, 1) or exceed 1");
    }
  }
  if (c.format != "json" && c.format != "csv" && c.format != "both") {
    throw std::invalid_argument("--format must be json, csv or both");
  }
  if (c.format != "json" && c.out.empty()) throw std::invalid_argument("CSV output requires --out");
  if (c.use != "raw" && c.use != "corrected" && c.use != "exterior") {
    throw std::invalid_argument("--use must be raw, corrected or exterior");
  }
}

DomainSpec resolve_domain(const RunConfig& c) {
  DomainSpec spec = c.expr.empty() ? catalog_domain(c.domain)
                                   : domain_from_field(parse_field_expression(c.expr), "expr");
  if (c.collar) spec.collar_width = *c.collar;
  validate_domain(spec);
  return spec;
}

RunResult run_command(const RunConfig& c) {
  validate_config(c);
  const auto t0 = std::chrono::steady_clock::now();
  const DomainSpec spec = resolve_domain(c);
  RunResult res;
  if (c.command == "analyze") res = cmd_analyze(c, spec);
  else if (c.command == "correct") res = cmd_correct(c, spec);
  else if (c.command == "verify") res = cmd_verify(c, spec);
  else res = cmd_dfsearch(c, spec);
  res.bundle["command"] = c.command;
  res.bundle["config"] = to_json(c);
  res.bundle["domain"] = {{"id", spec.id},
                          {"n", spec.n},
                          {"rho", spec.rho.descriptor()},
                          {"collar_width", spec.collar_width}};
  res.bundle["status"] = res.exit_code == 0 ? "pass" : "fail";
  if (c.timings) {
    res.bundle["timings"]["total_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return res;
}

void emit(const RunConfig& c, const RunResult& r) {
  const std::string json = dump_json(r.bundle);
  if (c.out.empty()) {
    std::cout << json;
    return;
  }
  std::string prefix = c.out;
  if (prefix.size() > 5 && prefix.ends_with(".json")) prefix.resize(prefix.size() - 5);
  if (c.format != "csv") write_file_atomic(prefix + ".json", json);
  if (c.format != "json") {
    for (const auto& t : r.tables) write_file_atomic(prefix + "_" + t.name + ".csv", report_csv(t));
  }
}

TaylorResidualSummary taylor_residual_summary(const DomainSpec& spec, const std::vector<BoundarySample>& samples,
                                              int feet) {
  TaylorResidualSummary s;
  s.min_slope = std::numeric_limits<double>::infinity();
  if (samples.empty()) return s;
  const std::vector<double> depths = {1e-3, 2e-3, 4e-3, 8e-3};
  const std::size_t stride = std::max<std::size_t>(1, samples.size() / static_cast<std::size_t>(feet));
  for (std::size_t i = 0; i < samples.size() && s.probes < feet; i += stride) {
    const TaylorFit fit = taylor_normal_check(spec, spec.rho, samples[i], depths);
    ++s.probes;
    if (fit.exact) {
      ++s.exact;
      continue;
    }
    s.min_slope = std::min(s.min_slope, fit.slope);
  }
  return s;
}

}  // namespace levilab
