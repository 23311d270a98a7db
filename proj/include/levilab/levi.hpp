#pragma once

#include "levilab/domain.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace levilab {

class IllConditionedFrameError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class NotWeakError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Orthonormal basis (columns) of {xi : <d rho(p), xi> = 0}.
Eigen::MatrixXcd tangent_basis(const BoundarySample& p);

/// Projection of a constant W0 onto the complex tangent space at p.
CVector project_tangent(const BoundarySample& p, const CVector& w0);

/// Levi form in the basis B = tangent_basis(p): L = B^T H conj(B), so that
/// H(B conj(v), B conj(v)) = v^* L v.
HermitianForm tangential_levi(const DomainSpec& spec, const BoundarySample& p);

/// Ascending Levi eigenvalues; column k of `directions` is the unit tangent
/// vector xi_k with H_rho(xi_k, xi_k) = eigenvalues[k].
struct LeviSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd directions;
};
LeviSpectrum levi_spectrum(const DomainSpec& spec, const BoundarySample& p);

/// lambda_tol = scale * |d rho(p)|.
double rank_tolerance(const BoundarySample& p, double scale = 1e-8);
int levi_rank(const DomainSpec& spec, const BoundarySample& p, double lambda_tol);

struct TangentFrame {
  CPoint p;
  int rank = 0;                 // target stratum index i
  std::vector<CVector> weak;    // n-1-i vectors
  std::vector<CVector> strong;  // i vectors
  double kappa = 1.0;           // |S|^2 + |W|^2 <= kappa |S + W|^2
};
/// Splits the Levi eigenbasis at position n-1-i.
TangentFrame build_frame(const DomainSpec& spec, const BoundarySample& p, int i, double lambda_tol);

/// kappa = 1/(1 - |Q_S^* Q_W|) for orthonormal bases of two spans.
double frame_kappa(const std::vector<CVector>& strong, const std::vector<CVector>& weak);

struct Stratification {
  double tol_scale = 1e-8;
  std::vector<int> labels;                // per sample
  std::vector<std::vector<int>> strata;   // strata[i] = sample indices of rank i
};
Stratification stratify(const DomainSpec& spec, const std::vector<BoundarySample>& samples,
                        double tol_scale = 1e-8);

/// sum_alpha H_rho(W^alpha, W^alpha) with W^alpha(z) = tangential projection
/// of the constant W0^alpha. Empty w0 gives the zero field.
ScalarField sigma_field(const DomainSpec& spec, const std::vector<CVector>& w0);

/// Re (N H_rho)(W, W)(p). Throws NotWeakError when H_rho(W,W)(p) > tol |W|^2.
double obstruction(const DomainSpec& spec, const BoundarySample& p, const CVector& w, double tol);
/// (N H_rho)(W, W)(p) = third_form(rho, p, W, W, N) without the weakness check.
cplx normal_levi_derivative(const DomainSpec& spec, const BoundarySample& p, const CVector& w);

/// Agreement of a projected constant frame with the local Levi eigenspaces.
struct FrameContinuation {
  double min_overlap = 1.0;        // smallest cosine to the local weak space
  double max_unitary_defect = 0.0; // max |P^* P - I| for projected W
  double min_containment = 1.0;    // null spaces at higher strata inside span W
  double kappa = 1.0;
  double k1 = 1.0;                 // sum |b|^2 <= K1 |sum b_a W^a|^2
  bool ok = true;
};
FrameContinuation check_frame_continuation(const DomainSpec& spec, const std::vector<CVector>& w0,
                                           const std::vector<BoundarySample>& stratum,
                                           const std::vector<BoundarySample>& higher, int i,
                                           double tol_scale);

struct CompareKReport {
  double k_hat = 0.0;  // sampled max |(N H)(W,W)|^2 / (|W|^2 H_sigma(W,W))
  double k1 = 0.0, k2 = 0.0, k_assembled = 0.0;  // K = 8 K1 K2 (n-1-i)
  int weak_dim = 0;
  int evaluations = 0;
  int trivial = 0;      // 0/0 cases
  int violations = 0;   // H_sigma(W,W) < -1e-8 at a stratum point
  bool holds = true;    // every ratio <= K
  std::vector<double> max_ratio_per_sample;
};
/// Comparison-constant estimate over stratum samples with `directions` random
/// weak W per sample plus the frame vectors. K2 is sampled over `boundary`.
CompareKReport estimate_compare_K(const DomainSpec& spec, const std::vector<BoundarySample>& stratum,
                                  const std::vector<CVector>& w0, const ScalarField& sigma,
                                  const std::vector<BoundarySample>& boundary, int i,
                                  int directions, std::uint64_t seed);

}  // namespace levilab
