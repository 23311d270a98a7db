#include "levilab/verify.hpp"

#include "levilab/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace levilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double operator_norm(const HermitianForm& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue(const HermitianForm& h) {
  if (h.size() == 0) return kInf;
  return hermitian_min_eigen(0.5 * (h + h.adjoint())).value;
}

// Orthonormal basis of span{P W0} at a boundary point.
Eigen::MatrixXcd weak_span(const BoundarySample& p, const std::vector<CVector>& w0) {
  const Eigen::Index n = p.normal.size();
  const Eigen::Index k = static_cast<Eigen::Index>(w0.size());
  Eigen::MatrixXcd m(n, k);
  for (Eigen::Index a = 0; a < k; ++a) m.col(a) = project_tangent(p, w0[a]);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, k);
}

// Slack of the main inequality from a second-order jet; |xi| normalized out.
double slack_from_jet(const RealJet& j, double eps, const CVector& xi) {
  const double v = std::abs(j.value());
  const CVector g = gradient_from_jet(j);
  const HermitianForm h = hessian_from_jet(j);
  const double x2 = xi.squaredNorm();
  const cplx dg = (g.array() * xi.array()).sum();
  return (hessian_apply(h, xi, xi).real() + eps * (v * x2 + std::norm(dg) / v)) / x2;
}

InequalityReport check_main(const char* name, const DomainSpec& spec, const ScalarField& r, double eps,
                            const std::vector<CollarPoint>& collar, const MainCheckOptions& opt,
                            Side side) {
  if (!(eps > 0.0)) throw std::invalid_argument(std::string(name) + ": eps must be positive");
  InequalityReport rep;
  rep.name = name;
  const std::size_t count = collar.size();
  rep.slack.assign(count, 0.0);
  rep.stratum.assign(count, 0);
  rep.directions.assign(count, CVector());
  std::vector<double> hnorm(count, 0.0);
  const std::vector<CVector> probes = probe_directions(spec.n, opt.directions, opt.seed);

  parallel_for(count, [&](std::size_t i) {
    const CollarPoint& c = collar[i];
    const RealJet j = r.jet(c.q, 2);
    const double v = j.value();
    if (std::abs(v) < 1e-14) {
      throw EvaluationError(std::string(name) + ": |r(q)| < 1e-14 at a collar point", static_cast<int>(i));
    }
    if ((side == Side::Interior) != (v < 0)) {
      throw EvaluationError(std::string(name) + ": r has the wrong sign at a collar point",
                            static_cast<int>(i));
    }
    const CVector g = gradient_from_jet(j);
    const HermitianForm h = hessian_from_jet(j);
    hnorm[i] = operator_norm(h);
    const double av = std::abs(v);
    HermitianForm a = h + eps * av * HermitianForm::Identity(spec.n, spec.n) + (eps / av) * gradient_outer(g);
    a = 0.5 * (a + a.adjoint());

    std::vector<CVector> cands;
    cands.push_back(hermitian_min_eigen(a).direction);
    cands.push_back(c.foot.normal);
    const Eigen::MatrixXcd b = tangent_basis(c.foot);
    for (Eigen::Index k = 0; k < b.cols(); ++k) cands.push_back(b.col(k));
    const LeviSpectrum ls = levi_spectrum(spec, c.foot);
    for (Eigen::Index k = 0; k < ls.directions.cols(); ++k) cands.push_back(ls.directions.col(k));
    cands.insert(cands.end(), probes.begin(), probes.end());

    double best = kInf;
    for (const auto& xi : cands) {
      if (xi.squaredNorm() < 1e-24) continue;
      const double s = slack_from_jet(j, eps, xi);
      if (s < best) {
        best = s;
        rep.directions[i] = xi;
      }
    }
    rep.slack[i] = best;
    rep.stratum[i] = levi_rank(spec, c.foot, rank_tolerance(c.foot, opt.tol_scale));
  });

  double scale = 1.0;
  for (double x : hnorm) scale = std::max(scale, x);
  rep.abs_tol = 1e-9 * scale;
  std::vector<CPoint> pts;
  pts.reserve(count);
  for (const auto& c : collar) pts.push_back(c.q);
  finalize_report(rep, pts);
  rep.metrics["eps"] = eps;
  rep.metrics["samples"] = static_cast<double>(count);
  rep.metrics["directions"] = opt.directions;
  rep.metrics["seed"] = static_cast<double>(opt.seed);
  double dmax = 0.0;
  for (const auto& c : collar) dmax = std::max(dmax, c.distance);
  rep.metrics["collar_depth_max"] = dmax;
  rep.notes["side"] = side_name(side);
  return rep;
}

struct LsqFit {
  double a = 0.0, ci = 0.0;
};

LsqFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LsqFit f;
  if (sxx == 0.0) return f;
  f.a = sxy / sxx;
  if (x.size() > 1) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) rss += std::pow(y[i] - f.a * x[i], 2);
    f.ci = 1.96 * std::sqrt(rss / static_cast<double>(x.size() - 1) / sxx);
  }
  return f;
}

}  // namespace

void finalize_report(InequalityReport& rep, const std::vector<CPoint>& points) {
  rep.min_by_stratum.clear();
  rep.points = points;
  if (rep.slack.empty()) {
    rep.min_slack = 0.0;
    rep.witness = Witness{};
    rep.pass = true;
    return;
  }
  const double m = *std::min_element(rep.slack.begin(), rep.slack.end());
  const double tie = m + 1e-12 * std::max(1.0, std::abs(m));
  std::size_t arg = 0;
  while (rep.slack[arg] > tie) ++arg;
  rep.min_slack = rep.slack[arg];
  rep.witness.sample = static_cast<int>(arg);
  if (arg < points.size()) rep.witness.point = points[arg];
  if (arg < rep.directions.size()) rep.witness.direction = rep.directions[arg];
  rep.pass = rep.min_slack >= -rep.abs_tol;
  for (std::size_t i = 0; i < rep.slack.size() && i < rep.stratum.size(); ++i) {
    auto it = rep.min_by_stratum.find(rep.stratum[i]);
    if (it == rep.min_by_stratum.end()) {
      rep.min_by_stratum.emplace(rep.stratum[i], rep.slack[i]);
    } else {
      it->second = std::min(it->second, rep.slack[i]);
    }
  }
}

std::vector<CVector> probe_directions(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  while (static_cast<int>(out.size()) < count) {
    CVector v(n);
    for (int j = 0; j < n; ++j) v[j] = cplx(gauss(rng), gauss(rng));
    const double nrm = v.norm();
    if (nrm < 1e-12) continue;
    out.push_back(v / nrm);
  }
  return out;
}

InequalityReport check_psh_on_boundary(const DomainSpec& spec, const std::vector<BoundarySample>& samples) {
  InequalityReport rep;
  rep.name = "psh_on_boundary";
  const std::size_t count = samples.size();
  rep.slack.assign(count, 0.0);
  rep.stratum.assign(count, 0);
  rep.directions.assign(count, CVector());
  std::vector<double> hnorm(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    const HermitianForm h = complex_hessian(spec.rho, samples[i].p);
    const MinEigen me = hermitian_min_eigen(0.5 * (h + h.adjoint()));
    rep.slack[i] = me.value;
    rep.directions[i] = me.direction;
    hnorm[i] = operator_norm(h);
    rep.stratum[i] = levi_rank(spec, samples[i], rank_tolerance(samples[i]));
  });
  double scale = 1.0;
  for (double x : hnorm) scale = std::max(scale, x);
  rep.abs_tol = 1e-9 * scale;
  std::vector<CPoint> pts;
  for (const auto& s : samples) pts.push_back(s.p);
  finalize_report(rep, pts);
  rep.metrics["samples"] = static_cast<double>(count);
  return rep;
}

double main_slack(const ScalarField& r, double eps, const CPoint& q, const CVector& xi) {
  return slack_from_jet(r.jet(q, 2), eps, xi);
}

InequalityReport check_main1(const DomainSpec& spec, const ScalarField& r, double eps,
                             const std::vector<CollarPoint>& collar, const MainCheckOptions& opt) {
  return check_main("main1", spec, r, eps, collar, opt, Side::Interior);
}

InequalityReport check_main2(const DomainSpec& spec, const ScalarField& r, double eps,
                             const std::vector<CollarPoint>& collar, const MainCheckOptions& opt) {
  return check_main("main2", spec, r, eps, collar, opt, Side::Exterior);
}

CutoffReport check_cutoff_properties(const DomainSpec& spec, const ScalarField& s, double delta,
                                     const std::vector<CVector>& w0,
                                     const std::vector<BoundarySample>& samples,
                                     const std::optional<SFieldParts>& parts) {
  CutoffReport rep;
  InequalityReport* props[4] = {&rep.prop_i, &rep.prop_ii, &rep.prop_iii, &rep.prop_iv};
  const char* names[4] = {"cutoff_i", "cutoff_ii", "cutoff_iii", "cutoff_iv"};
  const std::size_t count = samples.size();
  for (int k = 0; k < 4; ++k) {
    props[k]->name = names[k];
    props[k]->slack.assign(count, 0.0);
    props[k]->stratum.assign(count, 0);
    props[k]->directions.assign(count, CVector::Zero(spec.n));
    props[k]->abs_tol = 1e-9 * std::max(1.0, std::isfinite(delta) ? delta : 1.0);
  }
  parallel_for(count, [&](std::size_t i) {
    const BoundarySample& b = samples[i];
    const ComplexDerivatives d = differentiate(s, b.p, 2);
    if (parts) {
      const double sig = parts->sigma.value(b.p);
      if (sig >= 0.0 && (sig == 0.0 || std::log(sig) <= parts->log_tau)) {
        rep.prop_i.slack[i] = -std::abs(d.value - parts->zeta.value(b.p) * sig);
      }
    }
    rep.prop_ii.slack[i] = std::min(d.value, delta - d.value);
    const Eigen::MatrixXcd basis = tangent_basis(b);
    const Eigen::VectorXcd bt = basis.transpose() * d.gradient;
    rep.prop_iii.slack[i] = delta - bt.norm();
    if (bt.norm() > 0) rep.prop_iii.directions[i] = basis * bt.conjugate() / bt.norm();
    if (!w0.empty()) {
      const Eigen::MatrixXcd q = weak_span(b, w0);
      HermitianForm l = q.transpose() * d.hessian * q.conjugate();
      const MinEigen me = hermitian_min_eigen(0.5 * (l + l.adjoint()));
      rep.prop_iv.slack[i] = me.value + delta;
      rep.prop_iv.directions[i] = q * me.direction;
    } else {
      rep.prop_iv.slack[i] = delta;
    }
  });
  std::vector<CPoint> pts;
  for (const auto& b : samples) pts.push_back(b.p);
  for (auto* p : props) {
    finalize_report(*p, pts);
    p->metrics["delta"] = delta;
    p->metrics["samples"] = static_cast<double>(count);
    rep.pass = rep.pass && p->pass;
  }
  return rep;
}

McNealResult mcneal_check(const ScalarField& f, const std::vector<CPoint>& points) {
  McNealResult res;
  res.min_value = kInf;
  for (const auto& z : points) {
    const RealJet j = f.jet(z, 1);
    const double v = j.value();
    const double g2 = real_gradient_from_jet(j).squaredNorm();
    ++res.evaluated;
    res.min_value = std::min(res.min_value, v);
    if (v < 1e-14 && std::sqrt(g2) > 1e-6) {
      ++res.violations;
      continue;
    }
    res.c_hat = std::max(res.c_hat, g2 / std::max(v, 1e-300));
  }
  if (points.empty()) res.min_value = 0.0;
  return res;
}

McNealResult mcneal_check_tangential(const ScalarField& f, const std::vector<BoundarySample>& samples) {
  McNealResult res;
  res.min_value = kInf;
  for (const auto& b : samples) {
    const ComplexDerivatives d = differentiate(f, b.p, 1);
    const double g2 = (tangent_basis(b).transpose() * d.gradient).squaredNorm();
    ++res.evaluated;
    res.min_value = std::min(res.min_value, d.value);
    if (d.value < 1e-14 && std::sqrt(g2) > 1e-6) {
      ++res.violations;
      continue;
    }
    res.c_hat = std::max(res.c_hat, g2 / std::max(d.value, 1e-300));
  }
  if (samples.empty()) res.min_value = 0.0;
  return res;
}

double df_delta(double eta, double d_max) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("df_delta: eta must lie in (0, 1)");
  if (!(d_max > 0.0)) throw std::invalid_argument("df_delta: D must be positive");
  return (1.0 - eta) / (2.0 * eta * (1.0 + eta) * d_max);
}

double df_delta_exterior(double eta, double d_max) {
  if (!(eta > 1.0)) throw std::invalid_argument("df_delta_exterior: eta must exceed 1");
  if (!(d_max > 0.0)) throw std::invalid_argument("df_delta_exterior: D must be positive");
  return (eta - 1.0) / (2.0 * eta * (eta + 1.0) * d_max);
}

ScalarField df_candidate(const ScalarField& r, double eta, double delta) {
  const int n = r.dimension();
  const ScalarField phi = ScalarField::distance2(CPoint::Zero(n)) * delta;
  return -pow(-r * exp(-phi), eta);
}

double max_norm2(const std::vector<BoundarySample>& samples) {
  double d = 0.0;
  for (const auto& s : samples) d = std::max(d, s.p.squaredNorm());
  return d;
}

DFSearchResult df_search(const DomainSpec& spec, const ScalarField& r, const std::vector<double>& etas,
                         const std::vector<CollarPoint>& collar, double d_max) {
  if (etas.empty()) throw std::invalid_argument("df_search: empty eta grid");
  DFSearchResult res;
  res.d_max = d_max;
  res.etas = etas;
  const int n = spec.n;
  const std::size_t count = collar.size();
  bool found_fail = false;
  for (double eta : etas) {
    const double delta = df_delta(eta, d_max);
    const ScalarField h = df_candidate(r, eta, delta);
    std::vector<double> hmin(count), bmin(count), bscale(count);
    std::vector<CVector> hdir(count);
    parallel_for(count, [&](std::size_t i) {
      const CPoint& q = collar[i].q;
      const RealJet rj = r.jet(q, 2);
      const double rv = rj.value();
      if (!(rv < 0.0)) {
        throw EvaluationError("df_search: r >= 0 at an interior collar point", static_cast<int>(i));
      }
      const HermitianForm hh = complex_hessian(h, q);
      const MinEigen me = hermitian_min_eigen(0.5 * (hh + hh.adjoint()));
      hmin[i] = me.value;
      hdir[i] = me.direction;
      const double phi = delta * q.squaredNorm();
      const double pre = eta * std::pow(-rv, eta - 2.0) * std::exp(-phi * eta);
      const HermitianForm bracket =
          pre * ((1.0 - eta) / 2.0 * gradient_outer(gradient_from_jet(rj)) - rv * hessian_from_jet(rj) +
                 delta / 2.0 * rv * rv * HermitianForm::Identity(n, n));
      bmin[i] = min_eigenvalue(hh - bracket);
      bscale[i] = std::max(1.0, operator_norm(hh));
    });
    double mn = kInf, bm = kInf;
    bool bok = true;
    int arg = -1;
    for (std::size_t i = 0; i < count; ++i) {
      if (hmin[i] < mn) {
        mn = hmin[i];
        arg = static_cast<int>(i);
      }
      bm = std::min(bm, bmin[i] / bscale[i]);
      bok = bok && bmin[i] >= -1e-8 * bscale[i];
    }
    const bool strict = mn > 0.0;
    res.deltas.push_back(delta);
    res.min_eigenvalues.push_back(mn);
    res.strict_psh.push_back(strict);
    res.bracket_min.push_back(bm);
    res.bracket_ok.push_back(bok);
    if (strict && (!res.largest_pass || eta > *res.largest_pass)) res.largest_pass = eta;
    if (!strict && !found_fail && arg >= 0) {
      found_fail = true;
      res.worst = Witness{arg, collar[arg].q, hdir[arg]};
    }
  }
  // Passing etas should form a down-set of the grid.
  for (std::size_t a = 0; a < etas.size(); ++a)
    for (std::size_t b = 0; b < etas.size(); ++b)
      if (etas[a] < etas[b] && !res.strict_psh[a] && res.strict_psh[b]) res.monotone = false;
  return res;
}

InequalityReport exterior_df_check(const DomainSpec& spec, const ScalarField& r, double eta,
                                   const std::vector<CollarPoint>& collar, double d_max) {
  const double delta = df_delta_exterior(eta, d_max);
  const ScalarField phi = ScalarField::distance2(CPoint::Zero(spec.n)) * delta;
  const ScalarField f = pow(r * exp(phi), eta);
  InequalityReport rep;
  rep.name = "exterior_df";
  const std::size_t count = collar.size();
  rep.slack.assign(count, 0.0);
  rep.stratum.assign(count, 0);
  rep.directions.assign(count, CVector());
  std::vector<double> hnorm(count, 0.0);
  parallel_for(count, [&](std::size_t i) {
    const CPoint& q = collar[i].q;
    if (!(r.value(q) > 0.0)) {
      throw EvaluationError("exterior_df_check: r <= 0 at an exterior collar point", static_cast<int>(i));
    }
    const HermitianForm h = complex_hessian(f, q);
    const MinEigen me = hermitian_min_eigen(0.5 * (h + h.adjoint()));
    rep.slack[i] = me.value;
    rep.directions[i] = me.direction;
    hnorm[i] = operator_norm(h);
  });
  double scale = 1.0;
  for (double x : hnorm) scale = std::max(scale, x);
  rep.abs_tol = 1e-9 * scale;
  std::vector<CPoint> pts;
  for (const auto& c : collar) pts.push_back(c.q);
  finalize_report(rep, pts);
  rep.metrics["eta"] = eta;
  rep.metrics["delta"] = delta;
  rep.metrics["d_max"] = d_max;
  rep.metrics["samples"] = static_cast<double>(count);
  rep.metrics["strict"] = rep.min_slack > 0.0 ? 1.0 : 0.0;
  rep.notes["delta_rule"] = "(eta-1)/(2 eta (eta+1) D), mirrored from the interior rule";
  return rep;
}

FactorProbe taylor_factor_probe(const DomainSpec& spec, const std::vector<BoundarySample>& samples,
                                const ScalarField& f, double tol_scale) {
  FactorProbe probe;
  probe.depths = {0.001, 0.002, 0.004, 0.008};
  int best = -1;
  double best_abs = 0.0;
  CVector best_w;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const BoundarySample& b = samples[i];
    const LeviSpectrum ls = levi_spectrum(spec, b);
    if (ls.eigenvalues.size() == 0 || ls.eigenvalues[0] > rank_tolerance(b, tol_scale)) continue;
    const CVector w = ls.directions.col(0);
    const double nh = third_form(f, b.p, w, w, b.normal).real();
    if (std::abs(nh) > best_abs * (1.0 + 1e-9)) {
      best_abs = std::abs(nh);
      best = static_cast<int>(i);
      best_w = w;
    }
  }
  if (best < 0 || best_abs < 1e-10) return probe;
  const BoundarySample& p = samples[best];
  probe.defined = true;
  probe.point = p.p;
  probe.w = best_w;
  probe.nh = third_form(f, p.p, best_w, best_w, p.normal).real();
  const double h0 = hessian_apply(complex_hessian(f, p.p), best_w, best_w).real();
  for (Side side : {Side::Interior, Side::Exterior}) {
    std::vector<double> x, y;
    for (double d : probe.depths) {
      const CollarPoint c = offset_point(p, d, side);
      x.push_back(d * probe.nh);
      y.push_back(hessian_apply(complex_hessian(f, c.q), best_w, best_w).real() - h0);
    }
    const LsqFit fit = fit_through_origin(x, y);
    if (side == Side::Interior) {
      probe.interior_a = fit.a;
      probe.interior_ci = fit.ci;
    } else {
      probe.exterior_a = fit.a;
      probe.exterior_ci = fit.ci;
    }
  }
  return probe;
}

}  // namespace levilab
