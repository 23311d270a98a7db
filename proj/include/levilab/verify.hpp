#pragma once

#include "levilab/cutoff.hpp"
#include "levilab/levi.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace levilab {

struct Witness {
  int sample = -1;
  CPoint point;
  CVector direction;
};

/// pass <=> min_slack >= -abs_tol. Ties in the minimum (within 1e-12 relative)
/// resolve to the lowest sample index; min_slack is the witness's own slack.
struct InequalityReport {
  std::string name;
  std::vector<double> slack;
  std::vector<int> stratum;
  std::vector<CVector> directions;  // weakest direction per sample
  std::vector<CPoint> points;
  double min_slack = 0.0;
  Witness witness;
  double abs_tol = 1e-9;
  bool pass = true;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> notes;
  std::map<int, double> min_by_stratum;
};

/// Fills min_slack, witness, pass and min_by_stratum from per-sample slacks.
void finalize_report(InequalityReport& rep, const std::vector<CPoint>& points);

/// 64 (by default) deterministic unit directions in C^n.
std::vector<CVector> probe_directions(int n, int count, std::uint64_t seed);

InequalityReport check_psh_on_boundary(const DomainSpec& spec, const std::vector<BoundarySample>& samples);

/// Slack of the main inequality at one point and direction:
/// H_r(xi,xi) + eps (|r| |xi|^2 + |<dr, xi>|^2 / |r|), divided by |xi|^2.
double main_slack(const ScalarField& r, double eps, const CPoint& q, const CVector& xi);

struct MainCheckOptions {
  int directions = 64;
  std::uint64_t seed = 1;
  double tol_scale = 1e-8;  // for stratum labels of the feet
};
/// Interior inequality on interior collar points.
InequalityReport check_main1(const DomainSpec& spec, const ScalarField& r, double eps,
                             const std::vector<CollarPoint>& collar, const MainCheckOptions& opt = {});
/// Exterior inequality on exterior collar points.
InequalityReport check_main2(const DomainSpec& spec, const ScalarField& r, double eps,
                             const std::vector<CollarPoint>& collar, const MainCheckOptions& opt = {});

/// Optional pieces of s = zeta sigma g(sigma) for property (i).
struct SFieldParts {
  ScalarField zeta;
  ScalarField sigma;
  double log_tau = 0.0;
};
/// (i) s = zeta sigma where 0 <= sigma <= tau; (ii) 0 <= s <= delta;
/// (iii) |<ds, T>| <= delta |T| for tangent T; (iv) H_s(T,T) >= -delta |T|^2
/// for T in span W(z).
struct CutoffReport {
  InequalityReport prop_i, prop_ii, prop_iii, prop_iv;
  bool pass = true;
};
CutoffReport check_cutoff_properties(const DomainSpec& spec, const ScalarField& s, double delta,
                                     const std::vector<CVector>& w0,
                                     const std::vector<BoundarySample>& samples,
                                     const std::optional<SFieldParts>& parts = std::nullopt);

struct McNealResult {
  double c_hat = 0.0;
  int evaluated = 0;
  int violations = 0;  // f < 1e-14 with |grad f| > 1e-6
  double min_value = 0.0;
};
/// c = max |grad f|^2 / max(f, 1e-300) with the full real gradient.
McNealResult mcneal_check(const ScalarField& f, const std::vector<CPoint>& points);
/// Same with the gradient tangential to the boundary at each sample.
McNealResult mcneal_check_tangential(const ScalarField& f, const std::vector<BoundarySample>& samples);

double df_delta(double eta, double d_max);
/// Exterior mirror: (eta - 1) / (2 eta (eta + 1) D) for eta > 1.
double df_delta_exterior(double eta, double d_max);
/// h = -(-r exp(-delta |z|^2))^eta.
ScalarField df_candidate(const ScalarField& r, double eta, double delta);
/// D = max |z|^2 over the given points.
double max_norm2(const std::vector<BoundarySample>& samples);

struct DFSearchResult {
  std::vector<double> etas;
  std::vector<double> deltas;
  std::vector<double> min_eigenvalues;
  std::vector<bool> strict_psh;
  std::vector<double> bracket_min;  // min eig (H_h - bracket form); >= -tol expected
  std::vector<bool> bracket_ok;
  double d_max = 0.0;
  std::optional<double> largest_pass;
  bool monotone = true;  // pass set is a down-set of the grid
  Witness worst;         // for the first failing eta, if any
};
DFSearchResult df_search(const DomainSpec& spec, const ScalarField& r, const std::vector<double>& etas,
                         const std::vector<CollarPoint>& collar, double d_max);

/// Min eigenvalue of the Hessian of (r e^{delta |z|^2})^eta on exterior points.
InequalityReport exterior_df_check(const DomainSpec& spec, const ScalarField& r, double eta,
                                   const std::vector<CollarPoint>& collar, double d_max);

struct FactorProbe {
  bool defined = false;
  CPoint point;
  CVector w;
  double nh = 0.0;  // Re (N H_rho)(W,W)(p)
  double interior_a = 0.0, interior_ci = 0.0;
  double exterior_a = 0.0, exterior_ci = 0.0;
  std::vector<double> depths;
};
/// Least-squares a in H_f(W,W)(q) = a d Re (N H_f)(W,W)(p) at q = p -/+ d nu,
/// probing the sample with the largest |obstruction| among weak points.
FactorProbe taylor_factor_probe(const DomainSpec& spec, const std::vector<BoundarySample>& samples,
                                const ScalarField& f, double tol_scale = 1e-8);

}  // namespace levilab
