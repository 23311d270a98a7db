#pragma once

#include "levilab/cutoff.hpp"
#include "levilab/levi.hpp"
#include "levilab/verify.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace levilab {

class StageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ball V = B(center, radius) with inner ball V' = B(center, radius/2) and a
/// constant weak frame W0 projected tangentially.
struct Patch {
  CPoint center;
  double radius = 0.0;
  double inner_radius = 0.0;
  std::vector<CVector> w0;
  FrameContinuation frame;
};

/// zeta_j = b_j / Phi(sum b) with b_j = B(|z - c_j|^2 / R_j^2); Phi(s) = s on
/// {s >= theta}, theta = B(1/4) the bump value on the inner sphere.
struct BumpCover {
  std::vector<Patch> patches;
  std::vector<ScalarField> zeta;
  double theta = 0.0;
};
BumpCover make_bump_cover(int n, std::vector<Patch> patches);

/// Greedy farthest-point centers until every point lies within `inner` of one.
std::vector<int> farthest_point_centers(const std::vector<CPoint>& pts, double inner);

/// s = zeta * sigma * g_{m,tau}(sigma).
ScalarField s_field(const ScalarField& zeta, const ScalarField& sigma, const CutoffParams& params);

/// Sampled sup over stratum samples and unit weak T of
/// (c1 Re (NH)(T,T) - eps/2) / |(NH)(T,T)|^2 * K, floored at 0.
struct ChooseCResult {
  double c = 0.0;
  CPoint witness;
  double witness_nh = 0.0;
  int evaluated = 0;
  int guarded = 0;  // |(NH)(T,T)| < 1e-10
};
ChooseCResult choose_C(const DomainSpec& spec, double eps, const std::vector<BoundarySample>& stratum,
                       const std::vector<CVector>& w0, double c1, double k, int directions,
                       std::uint64_t seed);

struct PatchStage {
  Patch patch;
  ScalarField zeta, sigma, s;
  CutoffParams params;
  int boundary_samples = 0;   // samples inside the patch
  int stratum_samples = 0;
  int mcneal_violations = 0;
};

struct StageRecord {
  int k = 0;
  int stratum_size = 0;       // samples of rank k
  int uncovered = 0;          // of those, outside U_{k-1}
  bool trivial = true;        // no correction applied (C_k = 0 or empty stratum)
  double c = 0.0;             // C_k
  double delta = 0.0;         // delta_k = eps/(C_k |J_k| kappa_k); +inf when trivial
  double kappa = 1.0;
  double c1_distance = 0.0;   // d <= c1 |rho| on the collar
  double c1_effective = 0.0;  // value used in choose_C
  double k_used = 0.0;        // K used in choose_C
  CompareKReport compare;
  ChooseCResult choose;
  std::vector<PatchStage> patches;
  std::vector<CutoffReport> cutoff_reports;
  ScalarField s;
};

struct CorrectionOptions {
  int boundary_samples = 2000;
  std::uint64_t seed = 1;
  double tol_scale = 1e-8;
  int directions = 64;
  /// Depths for the d <= c1 |rho| estimate; default spans the collar.
  std::vector<double> c1_depths;
  /// Length of the unit real normal relative to the normal in the choose_C
  /// bound: d_nu f = 2 Re <df, N>.
  double normal_factor = 2.0;
};

struct CorrectionLedger {
  std::string domain;
  double eps = 0.0;
  CorrectionOptions options;
  std::vector<StageRecord> stages;
  ScalarField theta;  // accumulated exponent
  ScalarField r1;     // rho exp(-theta)
  std::vector<std::pair<CPoint, double>> covered;  // union of inner balls, U_k
  std::vector<BoundarySample> samples;
  Stratification strata;
  double c1_distance = 0.0;
};

/// One induction step for stratum k; appends to the ledger.
void stage(const DomainSpec& spec, int k, CorrectionLedger& ledger);

CorrectionLedger build_interior(const DomainSpec& spec, double eps, const CorrectionOptions& opt = {});
/// rho exp(+theta).
ScalarField build_exterior(const DomainSpec& spec, const CorrectionLedger& ledger);

}  // namespace levilab
