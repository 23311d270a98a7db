#include "levilab/levi.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <random>

namespace levilab {

namespace {

Eigen::MatrixXcd as_matrix(const std::vector<CVector>& vs, int n) {
  Eigen::MatrixXcd m(n, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t a = 0; a < vs.size(); ++a) m.col(static_cast<Eigen::Index>(a)) = vs[a];
  return m;
}

Eigen::MatrixXcd orthonormal_columns(const Eigen::MatrixXcd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(m.rows(), m.cols());
}

double min_singular(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().minCoeff();
}

double max_singular(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().maxCoeff();
}

}  // namespace

Eigen::MatrixXcd tangent_basis(const BoundarySample& p) {
  const Eigen::Index n = p.normal.size();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Eigen::MatrixXcd(p.normal));
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  return q.rightCols(n - 1);
}

CVector project_tangent(const BoundarySample& p, const CVector& w0) {
  return w0 - p.normal * p.normal.dot(w0);
}

HermitianForm tangential_levi(const DomainSpec& spec, const BoundarySample& p) {
  const HermitianForm h = complex_hessian(spec.rho, p.p);
  const Eigen::MatrixXcd b = tangent_basis(p);
  HermitianForm l = b.transpose() * h * b.conjugate();
  return 0.5 * (l + l.adjoint());
}

LeviSpectrum levi_spectrum(const DomainSpec& spec, const BoundarySample& p) {
  const HermitianForm l = tangential_levi(spec, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(l);
  const Eigen::MatrixXcd b = tangent_basis(p);
  return {es.eigenvalues(), b * es.eigenvectors().conjugate()};
}

double rank_tolerance(const BoundarySample& p, double scale) { return scale * p.grad_norm; }

int levi_rank(const DomainSpec& spec, const BoundarySample& p, double lambda_tol) {
  const LeviSpectrum s = levi_spectrum(spec, p);
  return static_cast<int>((s.eigenvalues.array() > lambda_tol).count());
}

double frame_kappa(const std::vector<CVector>& strong, const std::vector<CVector>& weak) {
  if (strong.empty() || weak.empty()) return 1.0;
  const int n = static_cast<int>(strong.front().size());
  const Eigen::MatrixXcd qs = orthonormal_columns(as_matrix(strong, n));
  const Eigen::MatrixXcd qw = orthonormal_columns(as_matrix(weak, n));
  const double c = max_singular(qs.adjoint() * qw);
  if (c >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
  return 1.0 / (1.0 - c);
}

TangentFrame build_frame(const DomainSpec& spec, const BoundarySample& p, int i, double lambda_tol) {
  const int n = spec.n;
  if (i < 0 || i > n - 1) throw std::invalid_argument("build_frame: stratum index out of range");
  const LeviSpectrum s = levi_spectrum(spec, p);
  const int k = n - 1 - i;
  if (k > 0 && k < n - 1) {
    const double gap = s.eigenvalues[k] - s.eigenvalues[k - 1];
    if (gap < 10.0 * lambda_tol) {
      throw IllConditionedFrameError("eigenvalue gap at the weak/strong split is below 10 lambda_tol");
    }
  }
  TangentFrame f;
  f.p = p.p;
  f.rank = i;
  for (int a = 0; a < n - 1; ++a) {
    CVector v = s.directions.col(a);
    (a < k ? f.weak : f.strong).push_back(v);
  }
  f.kappa = frame_kappa(f.strong, f.weak);
  return f;
}

Stratification stratify(const DomainSpec& spec, const std::vector<BoundarySample>& samples,
                        double tol_scale) {
  Stratification s;
  s.tol_scale = tol_scale;
  s.strata.assign(spec.n, {});
  s.labels.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const int r = levi_rank(spec, samples[k], rank_tolerance(samples[k], tol_scale));
    s.labels.push_back(r);
    s.strata[r].push_back(static_cast<int>(k));
  }
  return s;
}

ScalarField sigma_field(const DomainSpec& spec, const std::vector<CVector>& w0) {
  return ScalarField::projected_levi_sum(spec.rho, w0).named("sigma[" + spec.id + "]");
}

cplx normal_levi_derivative(const DomainSpec& spec, const BoundarySample& p, const CVector& w) {
  return third_form(spec.rho, p.p, w, w, p.normal);
}

double obstruction(const DomainSpec& spec, const BoundarySample& p, const CVector& w, double tol) {
  const RealJet j = spec.rho.jet(p.p, 3);
  const double hww = hessian_apply(hessian_from_jet(j), w, w).real();
  if (hww > tol * w.squaredNorm()) throw NotWeakError("obstruction: direction is not weak");
  return third_form_from_jet(j, w, w, p.normal).real();
}

FrameContinuation check_frame_continuation(const DomainSpec& spec, const std::vector<CVector>& w0,
                                           const std::vector<BoundarySample>& stratum,
                                           const std::vector<BoundarySample>& higher, int i,
                                           double tol_scale) {
  FrameContinuation fc;
  const int n = spec.n;
  const int k = n - 1 - i;
  if (k == 0) return fc;
  for (const auto& p : stratum) {
    std::vector<CVector> pw;
    for (const auto& w : w0) pw.push_back(project_tangent(p, w));
    const Eigen::MatrixXcd pm = as_matrix(pw, n);
    const Eigen::MatrixXcd gram = pm.adjoint() * pm;
    fc.max_unitary_defect = std::max(
        fc.max_unitary_defect, max_singular(gram - Eigen::MatrixXcd::Identity(k, k)));
    const double smin = min_singular(pm);
    fc.k1 = std::max(fc.k1, smin > 0 ? 1.0 / (smin * smin) : std::numeric_limits<double>::infinity());
    const LeviSpectrum s = levi_spectrum(spec, p);
    const Eigen::MatrixXcd weak = s.directions.leftCols(k);
    const Eigen::MatrixXcd qw = orthonormal_columns(pm);
    fc.min_overlap = std::min(fc.min_overlap, min_singular(weak.adjoint() * qw));
    if (i > 0) {
      const Eigen::MatrixXcd strong = s.directions.rightCols(i);
      const double c = max_singular(strong.adjoint() * qw);
      fc.kappa = std::max(fc.kappa, c < 1.0 ? 1.0 / (1.0 - c) : std::numeric_limits<double>::infinity());
    }
  }
  for (const auto& p : higher) {
    const LeviSpectrum s = levi_spectrum(spec, p);
    const double tol = rank_tolerance(p, tol_scale);
    const int nulls = static_cast<int>((s.eigenvalues.array() <= tol).count());
    if (nulls == 0) continue;
    std::vector<CVector> pw;
    for (const auto& w : w0) pw.push_back(project_tangent(p, w));
    const Eigen::MatrixXcd qw = orthonormal_columns(as_matrix(pw, n));
    const Eigen::MatrixXcd null = s.directions.leftCols(nulls);
    fc.min_containment = std::min(fc.min_containment, min_singular(qw.adjoint() * null));
  }
  fc.ok = fc.min_overlap >= 0.9 && fc.max_unitary_defect <= 0.1 && fc.min_containment >= 0.9 &&
          std::isfinite(fc.kappa);
  return fc;
}

CompareKReport estimate_compare_K(const DomainSpec& spec, const std::vector<BoundarySample>& stratum,
                                  const std::vector<CVector>& w0, const ScalarField& sigma,
                                  const std::vector<BoundarySample>& boundary, int i,
                                  int directions, std::uint64_t seed) {
  CompareKReport rep;
  const int n = spec.n;
  const int k = static_cast<int>(w0.size());
  rep.weak_dim = k;
  for (const auto& b : boundary) {
    const HermitianForm h = complex_hessian(spec.rho, b.p);
    rep.k2 = std::max(rep.k2, hessian_apply(h, b.normal, b.normal).real());
  }
  if (k == 0) return rep;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  rep.k1 = 1.0;
  for (const auto& p : stratum) {
    std::vector<CVector> pw;
    for (const auto& w : w0) pw.push_back(project_tangent(p, w));
    const Eigen::MatrixXcd pm = as_matrix(pw, n);
    const double smin = min_singular(pm);
    rep.k1 = std::max(rep.k1, smin > 0 ? 1.0 / (smin * smin) : std::numeric_limits<double>::infinity());

    const RealJet rj = spec.rho.jet(p.p, 3);
    const HermitianForm hs = complex_hessian(sigma, p.p);
    double worst = 0.0;
    for (int t = 0; t < directions + k; ++t) {
      Eigen::VectorXcd b = Eigen::VectorXcd::Zero(k);
      if (t < k) {
        b[t] = 1.0;
      } else {
        for (int a = 0; a < k; ++a) b[a] = cplx(gauss(rng), gauss(rng));
      }
      const CVector w = pm * b;
      const double w2 = w.squaredNorm();
      if (w2 < 1e-24) continue;
      const double lhs = std::norm(third_form_from_jet(rj, w, w, p.normal));
      const double hsw = hessian_apply(hs, w, w).real();
      ++rep.evaluations;
      if (hsw < -1e-8 * w2) ++rep.violations;
      if (lhs <= 1e-20 * w2 * w2) {
        ++rep.trivial;
        continue;
      }
      const double ratio = hsw > 0 ? lhs / (w2 * hsw) : std::numeric_limits<double>::infinity();
      worst = std::max(worst, ratio);
    }
    rep.max_ratio_per_sample.push_back(worst);
    rep.k_hat = std::max(rep.k_hat, worst);
  }
  rep.k_assembled = 8.0 * rep.k1 * rep.k2 * (n - 1 - i);
  rep.holds = rep.k_hat <= rep.k_assembled && rep.violations == 0;
  return rep;
}

}  // namespace levilab
