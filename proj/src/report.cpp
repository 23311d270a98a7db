#include "levilab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace levilab {

namespace {

Json vec_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) out.push_back({v[j].real(), v[j].imag()});
  return out;
}

std::string fmt_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string coords(const CVector& v) {
  std::string s;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (j) s += ';';
    s += fmt_double(v[j].real()) + ";" + fmt_double(v[j].imag());
  }
  return s;
}

void dump(const Json& j, int indent, std::string& out) {
  const std::string pad(2 * (indent + 1), ' ');
  const std::string close(2 * indent, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), indent + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], indent + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += fmt_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

Json point_json(const CPoint& z) { return vec_json(z); }

Json to_json(const InequalityReport& r, bool per_sample) {
  Json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["min_slack"] = r.min_slack;
  j["abs_tol"] = r.abs_tol;
  j["samples"] = r.slack.size();
  j["witness"] = {{"sample", r.witness.sample},
                  {"point", point_json(r.witness.point)},
                  {"direction", vec_json(r.witness.direction)}};
  j["metrics"] = Json::object();
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  j["notes"] = Json::object();
  for (const auto& [k, v] : r.notes) j["notes"][k] = v;
  j["min_by_stratum"] = Json::object();
  for (const auto& [k, v] : r.min_by_stratum) j["min_by_stratum"][std::to_string(k)] = v;
  if (per_sample) {
    j["slack"] = r.slack;
    j["stratum"] = r.stratum;
  }
  return j;
}

Json to_json(const CutoffReport& r) {
  return {{"pass", r.pass},
          {"i", to_json(r.prop_i, false)},
          {"ii", to_json(r.prop_ii, false)},
          {"iii", to_json(r.prop_iii, false)},
          {"iv", to_json(r.prop_iv, false)}};
}

Json to_json(const McNealResult& r) {
  return {{"c_hat", r.c_hat}, {"evaluated", r.evaluated}, {"violations", r.violations}, {"min_value", r.min_value}};
}

Json to_json(const DFSearchResult& r) {
  Json j;
  j["etas"] = r.etas;
  j["deltas"] = r.deltas;
  j["min_eigenvalues"] = r.min_eigenvalues;
  j["strict_psh"] = r.strict_psh;
  j["bracket_min"] = r.bracket_min;
  j["bracket_ok"] = r.bracket_ok;
  j["d_max"] = r.d_max;
  j["largest_pass"] = r.largest_pass ? Json(*r.largest_pass) : Json(nullptr);
  j["monotone"] = r.monotone;
  j["worst"] = {{"sample", r.worst.sample},
                {"point", point_json(r.worst.point)},
                {"direction", vec_json(r.worst.direction)}};
  return j;
}

Json to_json(const FactorProbe& r) {
  Json j;
  j["defined"] = r.defined;
  j["point"] = point_json(r.point);
  j["w"] = vec_json(r.w);
  j["nh"] = r.nh;
  j["interior_a"] = r.interior_a;
  j["interior_ci"] = r.interior_ci;
  j["exterior_a"] = r.exterior_a;
  j["exterior_ci"] = r.exterior_ci;
  j["depths"] = r.depths;
  return j;
}

Json to_json(const CompareKReport& r) {
  return {{"k_hat", r.k_hat},
          {"k1", r.k1},
          {"k2", r.k2},
          {"k_assembled", r.k_assembled},
          {"weak_dim", r.weak_dim},
          {"evaluations", r.evaluations},
          {"trivial", r.trivial},
          {"violations", r.violations},
          {"holds", r.holds}};
}

Json to_json(const ChooseCResult& r) {
  return {{"c", r.c},
          {"witness", point_json(r.witness)},
          {"witness_nh", r.witness_nh},
          {"evaluated", r.evaluated},
          {"guarded", r.guarded}};
}

Json to_json(const CutoffParams& p) {
  Json j = {{"m", p.m},   {"log_tau", p.log_tau}, {"delta", p.delta}, {"c1", p.c1}, {"c2", p.c2},
            {"c3", p.c3}, {"nu1", p.nu1},         {"nu2", p.nu2},     {"nu3", p.nu3}};
  Json checks = Json::array();
  for (const auto& c : p.checks()) checks.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"ok", c.ok}});
  j["checks"] = checks;
  return j;
}

Json to_json(const FrameContinuation& f) {
  return {{"min_overlap", f.min_overlap},
          {"max_unitary_defect", f.max_unitary_defect},
          {"min_containment", f.min_containment},
          {"kappa", f.kappa},
          {"k1", f.k1},
          {"ok", f.ok}};
}

Json to_json(const StageRecord& s) {
  Json j;
  j["k"] = s.k;
  j["stratum_size"] = s.stratum_size;
  j["uncovered"] = s.uncovered;
  j["trivial"] = s.trivial;
  j["C"] = s.c;
  j["delta"] = s.delta;
  j["kappa"] = s.kappa;
  j["c1_distance"] = s.c1_distance;
  j["c1_effective"] = s.c1_effective;
  j["K_used"] = s.k_used;
  j["compare"] = to_json(s.compare);
  j["choose"] = to_json(s.choose);
  j["s"] = s.s.empty() ? "" : s.s.descriptor();
  Json patches = Json::array();
  for (std::size_t i = 0; i < s.patches.size(); ++i) {
    const PatchStage& p = s.patches[i];
    Json pj;
    pj["center"] = point_json(p.patch.center);
    pj["radius"] = p.patch.radius;
    pj["inner_radius"] = p.patch.inner_radius;
    Json w = Json::array();
    for (const auto& v : p.patch.w0) w.push_back(vec_json(v));
    pj["w0"] = w;
    pj["frame"] = to_json(p.patch.frame);
    pj["boundary_samples"] = p.boundary_samples;
    pj["stratum_samples"] = p.stratum_samples;
    pj["mcneal_violations"] = p.mcneal_violations;
    if (!s.trivial) pj["params"] = to_json(p.params);
    if (i < s.cutoff_reports.size()) pj["cutoff"] = to_json(s.cutoff_reports[i]);
    patches.push_back(pj);
  }
  j["patches"] = patches;
  return j;
}

Json to_json(const Stratification& s) {
  Json counts = Json::object();
  for (std::size_t i = 0; i < s.strata.size(); ++i) counts[std::to_string(i)] = s.strata[i].size();
  return {{"tol_scale", s.tol_scale}, {"samples", s.labels.size()}, {"counts", counts}};
}

Json to_json(const CorrectionLedger& l) {
  Json j;
  j["domain"] = l.domain;
  j["eps"] = l.eps;
  j["options"] = {{"boundary_samples", l.options.boundary_samples},
                  {"seed", l.options.seed},
                  {"tol_scale", l.options.tol_scale},
                  {"directions", l.options.directions},
                  {"c1_depths", l.options.c1_depths},
                  {"normal_factor", l.options.normal_factor}};
  j["c1_distance"] = l.c1_distance;
  j["stratification"] = to_json(l.strata);
  Json stages = Json::array();
  for (const auto& s : l.stages) stages.push_back(to_json(s));
  j["stages"] = stages;
  j["theta"] = l.theta.empty() ? "" : l.theta.descriptor();
  j["r1"] = l.r1.empty() ? "" : l.r1.descriptor();
  Json covered = Json::array();
  for (const auto& [c, r] : l.covered) covered.push_back({{"center", point_json(c)}, {"radius", r}});
  j["covered"] = covered;
  return j;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

std::string report_csv(const InequalityReport& r) {
  std::ostringstream os;
  os << "point,direction,slack,stratum\n";
  for (std::size_t i = 0; i < r.slack.size(); ++i) {
    os << (i < r.points.size() ? coords(r.points[i]) : "") << ','
       << (i < r.directions.size() ? coords(r.directions[i]) : "") << ',' << fmt_double(r.slack[i]) << ','
       << (i < r.stratum.size() ? r.stratum[i] : -1) << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace levilab
