#include "levilab/correction.hpp"

#include "levilab/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace levilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string point_string(const CPoint& z) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (j) os << ", ";
    os << z[j].real() << (z[j].imag() < 0 ? "-" : "+") << std::abs(z[j].imag()) << "i";
  }
  os << ")";
  return os.str();
}

Eigen::MatrixXcd projected_frame(const BoundarySample& p, const std::vector<CVector>& w0) {
  Eigen::MatrixXcd m(p.normal.size(), static_cast<Eigen::Index>(w0.size()));
  for (std::size_t a = 0; a < w0.size(); ++a) {
    m.col(static_cast<Eigen::Index>(a)) = project_tangent(p, w0[a]);
  }
  return m;
}

std::vector<BoundarySample> within(const std::vector<BoundarySample>& pts, const CPoint& c, double r) {
  std::vector<BoundarySample> out;
  for (const auto& p : pts)
    if ((p.p - c).norm() < r) out.push_back(p);
  return out;
}

}  // namespace

BumpCover make_bump_cover(int n, std::vector<Patch> patches) {
  BumpCover cover;
  cover.theta = std::exp(1.0 - 1.0 / (1.0 - 0.25));
  std::vector<ScalarField> bumps;
  ScalarField total;
  for (const auto& p : patches) {
    if (p.center.size() != n) throw std::invalid_argument("make_bump_cover: center dimension");
    ScalarField v = ScalarField::distance2(p.center) * (1.0 / (p.radius * p.radius));
    ScalarField b = compose(bump_profile(), v);
    bumps.push_back(b);
    total = total.empty() ? b : total + b;
  }
  if (!bumps.empty()) {
    ScalarField inv = compose(partition_normalizer(cover.theta), total);
    for (std::size_t j = 0; j < bumps.size(); ++j) {
      cover.zeta.push_back((bumps[j] * inv).named("zeta_" + std::to_string(j)));
    }
  }
  cover.patches = std::move(patches);
  return cover;
}

std::vector<int> farthest_point_centers(const std::vector<CPoint>& pts, double inner) {
  std::vector<int> centers;
  if (pts.empty()) return centers;
  std::vector<double> dist(pts.size(), kInf);
  int next = 0;
  for (;;) {
    centers.push_back(next);
    double worst = -1.0;
    int arg = -1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      dist[i] = std::min(dist[i], (pts[i] - pts[next]).norm());
      if (dist[i] > worst) {
        worst = dist[i];
        arg = static_cast<int>(i);
      }
    }
    if (worst < inner) break;
    next = arg;
  }
  return centers;
}

ScalarField s_field(const ScalarField& zeta, const ScalarField& sigma, const CutoffParams& params) {
  return zeta * sigma * compose(g_m_tau_function(params.m, params.log_tau), sigma);
}

ChooseCResult choose_C(const DomainSpec& spec, double eps, const std::vector<BoundarySample>& stratum,
                       const std::vector<CVector>& w0, double c1, double k, int directions,
                       std::uint64_t seed) {
  ChooseCResult res;
  if (w0.empty()) return res;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const int kdim = static_cast<int>(w0.size());
  double best = 0.0;
  for (const auto& p : stratum) {
    const Eigen::MatrixXcd pm = projected_frame(p, w0);
    const RealJet rj = spec.rho.jet(p.p, 3);
    for (int t = 0; t < kdim + directions; ++t) {
      Eigen::VectorXcd b = Eigen::VectorXcd::Zero(kdim);
      if (t < kdim) {
        b[t] = 1.0;
      } else {
        for (int a = 0; a < kdim; ++a) b[a] = cplx(gauss(rng), gauss(rng));
      }
      CVector tv = pm * b;
      const double nrm = tv.norm();
      if (nrm < 1e-12) continue;
      tv /= nrm;
      const cplx nh = third_form_from_jet(rj, tv, tv, p.normal);
      ++res.evaluated;
      if (std::abs(nh) < 1e-10) {
        ++res.guarded;
        continue;
      }
      const double val = (c1 * nh.real() - eps / 2) / std::norm(nh) * k;
      if (val > best) {
        best = val;
        res.witness = p.p;
        res.witness_nh = nh.real();
      }
    }
  }
  res.c = best;
  return res;
}

void stage(const DomainSpec& spec, int k, CorrectionLedger& ledger) {
  const auto& samples = ledger.samples;
  const auto& labels = ledger.strata.labels;
  const auto& opt = ledger.options;
  const int n = spec.n;
  StageRecord rec;
  rec.k = k;
  rec.c1_distance = ledger.c1_distance;
  rec.c1_effective = opt.normal_factor * ledger.c1_distance;

  std::vector<BoundarySample> stratum_all, uncovered, higher;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (labels[i] == k) {
      stratum_all.push_back(samples[i]);
      bool inside = false;
      for (const auto& [c, r] : ledger.covered) inside = inside || (samples[i].p - c).norm() < r;
      if (!inside) uncovered.push_back(samples[i]);
    } else if (labels[i] > k && labels[i] <= n - 2) {
      higher.push_back(samples[i]);
    }
  }
  rec.stratum_size = static_cast<int>(stratum_all.size());
  rec.uncovered = static_cast<int>(uncovered.size());
  rec.delta = kInf;
  if (uncovered.empty()) {
    rec.s = ScalarField::constant(n, 0.0);
    ledger.stages.push_back(std::move(rec));
    return;
  }

  // Patch cover: one ball first, halved until every frame continues.
  std::vector<CPoint> pts;
  for (const auto& p : uncovered) pts.push_back(p.p);
  double maxd = 0.0;
  for (const auto& z : pts) maxd = std::max(maxd, (z - pts.front()).norm());
  double radius = std::max(2.1 * maxd, 0.2);
  std::vector<Patch> patches;
  std::string failure;
  for (int attempt = 0; attempt < 12; ++attempt, radius /= 2) {
    patches.clear();
    failure.clear();
    for (int ci : farthest_point_centers(pts, radius / 2)) {
      Patch patch;
      patch.center = pts[ci];
      patch.radius = radius;
      patch.inner_radius = radius / 2;
      try {
        const TangentFrame f =
            build_frame(spec, uncovered[ci], k, rank_tolerance(uncovered[ci], opt.tol_scale));
        patch.w0 = f.weak;
      } catch (const IllConditionedFrameError& e) {
        failure = "patch at " + point_string(patch.center) + ": " + e.what();
        break;
      }
      patch.frame = check_frame_continuation(spec, patch.w0, within(stratum_all, patch.center, radius),
                                             within(higher, patch.center, radius), k, opt.tol_scale);
      if (!patch.frame.ok) {
        failure = "patch at " + point_string(patch.center) + ": frame continuation failed";
        break;
      }
      patches.push_back(std::move(patch));
    }
    if (failure.empty()) break;
  }
  if (!failure.empty()) throw StageError("stage " + std::to_string(k) + ": " + failure);

  BumpCover cover = make_bump_cover(n, patches);
  for (const auto& p : cover.patches) rec.kappa = std::max(rec.kappa, p.frame.kappa);

  std::vector<ScalarField> sigmas;
  for (const auto& p : cover.patches) sigmas.push_back(sigma_field(spec, p.w0));

  // Comparison constant K-hat over stratum samples, per patch.
  for (std::size_t j = 0; j < cover.patches.size(); ++j) {
    const Patch& p = cover.patches[j];
    CompareKReport c = estimate_compare_K(spec, within(stratum_all, p.center, p.radius), p.w0,
                                          sigmas[j], j == 0 ? samples : std::vector<BoundarySample>{},
                                          k, opt.directions, opt.seed + 101 * (k + 1) + j);
    if (j == 0) {
      rec.compare = c;
    } else {
      rec.compare.k_hat = std::max(rec.compare.k_hat, c.k_hat);
      rec.compare.k1 = std::max(rec.compare.k1, c.k1);
      rec.compare.evaluations += c.evaluations;
      rec.compare.trivial += c.trivial;
      rec.compare.violations += c.violations;
      rec.compare.max_ratio_per_sample.insert(rec.compare.max_ratio_per_sample.end(),
                                              c.max_ratio_per_sample.begin(),
                                              c.max_ratio_per_sample.end());
    }
  }
  rec.compare.k_assembled = 8.0 * rec.compare.k1 * rec.compare.k2 * (n - 1 - k);
  rec.compare.holds = rec.compare.k_hat <= rec.compare.k_assembled && rec.compare.violations == 0;
  rec.k_used = rec.compare.k_hat;

  const double eps_k = ledger.eps / rec.kappa;
  for (std::size_t j = 0; j < cover.patches.size(); ++j) {
    const Patch& p = cover.patches[j];
    ChooseCResult c = choose_C(spec, eps_k, within(stratum_all, p.center, p.radius), p.w0,
                               rec.c1_effective, rec.k_used, opt.directions,
                               opt.seed + 977 * (k + 1) + j);
    if (j == 0 || c.c > rec.choose.c) rec.choose = c;
  }
  rec.c = rec.choose.c;

  for (const auto& p : cover.patches) ledger.covered.emplace_back(p.center, p.inner_radius);

  if (!(rec.c > 0.0)) {
    rec.s = ScalarField::constant(n, 0.0);
    for (std::size_t j = 0; j < cover.patches.size(); ++j) {
      PatchStage ps;
      ps.patch = cover.patches[j];
      ps.zeta = cover.zeta[j];
      ps.sigma = sigmas[j];
      rec.patches.push_back(std::move(ps));
    }
    ledger.stages.push_back(std::move(rec));
    return;
  }

  rec.trivial = false;
  const double jcount = static_cast<double>(cover.patches.size());
  rec.delta = ledger.eps / (rec.c * jcount * rec.kappa);

  ScalarField s_total;
  for (std::size_t j = 0; j < cover.patches.size(); ++j) {
    const Patch& patch = cover.patches[j];
    const ScalarField& zeta = cover.zeta[j];
    const ScalarField& sigma = sigmas[j];
    const std::vector<BoundarySample> local = within(samples, patch.center, patch.radius);

    struct Local {
      double sigma = 0, tangential2 = 0, dzeta = 0, hzeta = 0, hweak = 0, zeta = 0;
    };
    std::vector<Local> vals(local.size());
    parallel_for(local.size(), [&](std::size_t i) {
      const BoundarySample& b = local[i];
      const ComplexDerivatives ds = differentiate(sigma, b.p, 2);
      const ComplexDerivatives dz = differentiate(zeta, b.p, 2);
      const Eigen::MatrixXcd basis = tangent_basis(b);
      Local& v = vals[i];
      v.sigma = ds.value;
      v.zeta = dz.value;
      v.tangential2 = (basis.transpose() * ds.gradient).squaredNorm();
      v.dzeta = dz.gradient.norm();
      v.hzeta = hermitian_min_eigen(dz.hessian).value;
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(projected_frame(b, patch.w0));
      const Eigen::MatrixXcd q =
          qr.householderQ() * Eigen::MatrixXcd::Identity(n, static_cast<Eigen::Index>(patch.w0.size()));
      const HermitianForm lw = q.transpose() * ds.hessian * q.conjugate();
      v.hweak = hermitian_min_eigen(0.5 * (lw + lw.adjoint())).value;
    });

    double c1 = 0.0, c2 = 0.0, c3 = 0.0, nu1 = -kInf, nu2 = kInf, nu3 = kInf;
    int violations = 0;
    for (const Local& v : vals) {
      if (v.sigma > 1e-14) {
        c1 = std::max(c1, v.tangential2 / v.sigma);
      } else if (std::sqrt(v.tangential2) > 1e-6) {
        ++violations;
      }
      c2 = std::max(c2, v.dzeta);
      c3 = std::max(c3, -v.hzeta);
      if (v.hweak >= -rec.delta / 2) {
        nu1 = std::max(nu1, v.sigma);
      } else {
        nu2 = std::min(nu2, v.sigma);
      }
      if (2 * v.zeta * v.hweak < -rec.delta / 4) nu3 = std::min(nu3, v.sigma);
    }
    if (!(nu1 > 0.0)) nu1 = kInf;
    if (!(nu2 > 0.0) || !(nu3 > 0.0)) {
      throw StageError("stage " + std::to_string(k) + ": patch at " + point_string(patch.center) +
                       ": sigma has a negative weak Hessian at a zero");
    }

    PatchStage ps;
    ps.patch = patch;
    ps.zeta = zeta;
    ps.sigma = sigma;
    ps.boundary_samples = static_cast<int>(local.size());
    ps.stratum_samples = static_cast<int>(within(stratum_all, patch.center, patch.radius).size());
    ps.mcneal_violations = violations;
    try {
      ps.params = choose_m_tau(rec.delta, c1, c2, c3, nu1, nu2, nu3);
    } catch (const std::exception& e) {
      throw StageError("stage " + std::to_string(k) + ": patch at " + point_string(patch.center) +
                       ": " + e.what());
    }
    ps.s = s_field(zeta, sigma, ps.params).named("s_" + std::to_string(k) + "_" + std::to_string(j));
    rec.cutoff_reports.push_back(check_cutoff_properties(
        spec, ps.s, rec.delta, patch.w0, local, SFieldParts{zeta, sigma, ps.params.log_tau}));
    s_total = s_total.empty() ? ps.s : s_total + ps.s;
    rec.patches.push_back(std::move(ps));
  }
  rec.s = s_total.named("s_" + std::to_string(k));
  ledger.theta = (ledger.theta + rec.c * rec.s).named("theta_" + std::to_string(k));
  ledger.stages.push_back(std::move(rec));
}

CorrectionLedger build_interior(const DomainSpec& spec, double eps, const CorrectionOptions& opt) {
  validate_domain(spec);
  if (!(eps > 0.0)) throw std::invalid_argument("build_interior: eps must be positive");
  CorrectionLedger ledger;
  ledger.domain = spec.id;
  ledger.eps = eps;
  ledger.options = opt;
  if (ledger.options.c1_depths.empty()) {
    for (double f : {0.25, 0.5, 0.75, 1.0}) ledger.options.c1_depths.push_back(f * spec.collar_width);
  }
  ledger.samples = boundary_cloud(spec, opt.boundary_samples, opt.seed);
  const InequalityReport psh = check_psh_on_boundary(spec, ledger.samples);
  if (!psh.pass) {
    throw std::invalid_argument("build_interior: defining function is not plurisubharmonic on the boundary (min eigenvalue " +
                                std::to_string(psh.min_slack) + " at " + point_string(psh.witness.point) + ")");
  }
  ledger.strata = stratify(spec, ledger.samples, opt.tol_scale);
  ledger.c1_distance = distance_rho_constant(
      spec, collar_points(ledger.samples, ledger.options.c1_depths, Side::Interior));
  ledger.theta = ScalarField::constant(spec.n, 0.0).named("0");
  for (int k = 0; k <= spec.n - 2; ++k) {
    try {
      stage(spec, k, ledger);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError("stage " + std::to_string(k) + ": " + e.what());
    }
  }
  bool trivial = true;
  for (const auto& s : ledger.stages) trivial = trivial && s.trivial;
  ledger.r1 = trivial ? spec.rho : (spec.rho * exp(-ledger.theta)).named("rho*exp(-theta)");
  return ledger;
}

ScalarField build_exterior(const DomainSpec& spec, const CorrectionLedger& ledger) {
  bool trivial = true;
  for (const auto& s : ledger.stages) trivial = trivial && s.trivial;
  if (trivial) return spec.rho;
  return (spec.rho * exp(ledger.theta)).named("rho*exp(+theta)");
}

}  // namespace levilab
