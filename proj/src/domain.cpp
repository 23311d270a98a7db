#include "levilab/domain.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

namespace levilab {

namespace {

ScalarField egg_rho(int n) {
  ScalarField acc = ScalarField::abs2(n, 0);
  for (int j = 1; j < n; ++j) acc = acc + pow(ScalarField::abs2(n, j), static_cast<double>(j + 1));
  return acc - 1.0;
}

CPoint point(std::initializer_list<cplx> c) {
  CPoint z(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (cplx v : c) z[i++] = v;
  return z;
}

DomainSpec base(std::string id, int n, double half) {
  DomainSpec s;
  s.id = std::move(id);
  s.n = n;
  s.box_lo = Eigen::VectorXd::Constant(2 * n, -half);
  s.box_hi = Eigen::VectorXd::Constant(2 * n, half);
  s.interior_anchor = CPoint::Zero(n);
  return s;
}

std::vector<CPoint> unit_axes(int n) {
  std::vector<CPoint> out;
  for (int j = 0; j < n; ++j) {
    CPoint z = CPoint::Zero(n);
    z[j] = 1.0;
    out.push_back(z);
  }
  return out;
}

// Points e^{i k pi/4} e_1 on the circle {|z1| = 1, z' = 0}.
std::vector<CPoint> z1_circle(int n) {
  std::vector<CPoint> out;
  for (int k = 0; k < 8; ++k) {
    CPoint z = CPoint::Zero(n);
    z[0] = std::polar(1.0, k * std::numbers::pi / 4);
    out.push_back(z);
  }
  return out;
}

Eigen::VectorXd real_grad(const ScalarField& f, const Eigen::VectorXd& x, double& value) {
  RealJet j = f.jet(from_real(x), 1);
  value = j.value();
  return real_gradient_from_jet(j);
}

// Damped Newton along the gradient onto {rho = 0}.
bool newton_to_surface(const ScalarField& rho, Eigen::VectorXd& x, int max_iter, double max_step) {
  for (int it = 0; it < max_iter; ++it) {
    double v = 0.0;
    Eigen::VectorXd g = real_grad(rho, x, v);
    if (!std::isfinite(v)) return false;
    const double g2 = g.squaredNorm();
    if (std::abs(v) <= 1e-14 * std::max(1.0, std::sqrt(g2))) return true;
    if (!(g2 > 1e-24)) return false;
    Eigen::VectorXd step = -(v / g2) * g;
    const double len = step.norm();
    if (len > max_step) step *= max_step / len;
    x += step;
    if (len < 1e-16 * std::max(1.0, x.norm())) break;
  }
  double v = 0.0;
  real_grad(rho, x, v);
  return std::abs(v) <= 1e-10;
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

const char* side_name(Side s) { return s == Side::Interior ? "interior" : "exterior"; }

std::vector<std::string> catalog_ids() {
  return {"ball2", "ball3", "egg2", "egg3", "skewed-egg2", "egg2-broken"};
}

DomainSpec catalog_domain(const std::string& id) {
  if (id == "ball2" || id == "ball3") {
    const int n = id == "ball2" ? 2 : 3;
    DomainSpec s = base(id, n, 1.1);
    ScalarField acc = ScalarField::abs2(n, 0);
    for (int j = 1; j < n; ++j) acc = acc + ScalarField::abs2(n, j);
    s.rho = (acc - 1.0).named("|z|^2 - 1");
    s.landmarks = unit_axes(n);
    return s;
  }
  if (id == "egg2") {
    DomainSpec s = base(id, 2, 1.1);
    s.rho = egg_rho(2).named("|z1|^2 + |z2|^4 - 1");
    s.landmarks = z1_circle(2);
    s.landmarks.push_back(point({0.0, 1.0}));
    return s;
  }
  if (id == "egg3") {
    DomainSpec s = base(id, 3, 1.1);
    s.rho = egg_rho(3).named("|z1|^2 + |z2|^4 + |z3|^6 - 1");
    s.landmarks = z1_circle(3);
    for (double t : {0.5, 0.8}) {
      s.landmarks.push_back(point({std::sqrt(1 - std::pow(t, 4)), t, 0.0}));
      s.landmarks.push_back(point({std::sqrt(1 - std::pow(t, 6)), 0.0, t}));
    }
    s.landmarks.push_back(point({0.0, 1.0, 0.0}));
    s.landmarks.push_back(point({0.0, 0.0, 1.0}));
    return s;
  }
  if (id == "skewed-egg2") {
    DomainSpec s = base(id, 2, 1.1);
    const double c = 0.25;
    s.rho = (egg_rho(2) * (1.0 + c * ScalarField::abs2(2, 1)))
                .named("(|z1|^2 + |z2|^4 - 1)(1 + 0.25|z2|^2)");
    s.landmarks = z1_circle(2);
    s.landmarks.push_back(point({0.0, 1.0}));
    return s;
  }
  if (id == "egg2-broken") {
    DomainSpec s = base(id, 2, 1.25);
    s.rho = (egg_rho(2) - 0.5 * ScalarField::abs2(2, 1)).named("|z1|^2 + |z2|^4 - 0.5|z2|^2 - 1");
    s.landmarks = z1_circle(2);
    return s;
  }
  throw std::invalid_argument("unknown domain id '" + id + "'");
}

DomainSpec domain_from_field(ScalarField rho, std::string id, double box_half) {
  DomainSpec s = base(std::move(id), rho.dimension(), box_half);
  s.rho = std::move(rho);
  return s;
}

void validate_domain(const DomainSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument("domain dimension must be >= 2");
  if (spec.rho.empty() || spec.rho.dimension() != spec.n) {
    throw std::invalid_argument("defining function dimension mismatch");
  }
  if (spec.box_lo.size() != 2 * spec.n || spec.box_hi.size() != 2 * spec.n) {
    throw std::invalid_argument("bounding box dimension mismatch");
  }
  if (!(spec.rho.value(spec.interior_anchor) < 0.0)) {
    throw std::invalid_argument("defining function is not negative at the interior anchor");
  }
  if (!(spec.collar_width > 0.0)) throw std::invalid_argument("collar width must be positive");
}

CVector unit_normal(const DomainSpec& spec, const CPoint& p) {
  const CVector g = wirtinger_gradient(spec.rho, p);
  const double norm = g.norm();
  if (!(norm > 1e-10)) throw DegenerateBoundaryError("vanishing gradient of the defining function");
  return g.conjugate() / norm;
}

BoundarySample make_boundary_sample(const DomainSpec& spec, const CPoint& p) {
  const CVector g = wirtinger_gradient(spec.rho, p);
  const double norm = g.norm();
  if (!(norm > 1e-10)) throw DegenerateBoundaryError("vanishing gradient of the defining function");
  return {p, g.conjugate() / norm, norm};
}

CollarPoint offset_point(const BoundarySample& foot, double d, Side side) {
  const double t = side == Side::Interior ? -d : d;
  return {foot.p + t * foot.normal, foot, d, side};
}

CollarPoint project_to_boundary(const DomainSpec& spec, const CPoint& q) {
  const Eigen::VectorXd xq = to_real(q);
  const double max_step = 0.25 * (spec.box_hi - spec.box_lo).maxCoeff();
  Eigen::VectorXd x = xq;
  if (!newton_to_surface(spec.rho, x, 100, max_step)) {
    throw CollarTooWideError("projection did not reach the boundary in 100 iterations");
  }
  for (int it = 0; it < 100; ++it) {
    double v = 0.0;
    const Eigen::VectorXd g = real_grad(spec.rho, x, v);
    const double gn = g.norm();
    if (!(gn > 1e-10)) throw DegenerateBoundaryError("vanishing gradient at projected foot");
    const Eigen::VectorXd nu = g / gn;
    const Eigen::VectorXd w = xq - x;
    const double t = w.dot(nu);
    const double residual = (w - t * nu).norm();
    if (residual < 1e-8 && std::abs(v) <= 1e-10) {
      // Focal test: q is a strict local minimizer of distance iff
      // I + t * II > 0 on the tangent space, II = Hess(rho)/|grad rho|.
      const RealJet j = spec.rho.jet(from_real(x), 2);
      const Eigen::MatrixXd hr = real_hessian_from_jet(j);
      const Eigen::Index nv = x.size();
      const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(nv, nv) - nu * nu.transpose();
      const Eigen::MatrixXd m = proj * (Eigen::MatrixXd::Identity(nv, nv) + (t / gn) * hr) * proj +
                                nu * nu.transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      if (es.eigenvalues()[0] < 1e-6) {
        throw AmbiguousProjectionError("normal projection is not single-valued at this point");
      }
      BoundarySample foot = make_boundary_sample(spec, from_real(x));
      return {q, foot, std::abs(t), t <= 0.0 ? Side::Interior : Side::Exterior};
    }
    Eigen::VectorXd y = xq - t * nu;
    if (!newton_to_surface(spec.rho, y, 100, max_step)) {
      throw CollarTooWideError("projection did not reach the boundary in 100 iterations");
    }
    x = y;
  }
  throw CollarTooWideError("normal projection did not converge in 100 iterations");
}

std::vector<BoundarySample> sample_boundary(const DomainSpec& spec, int m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample_boundary: target count must be >= 1");
  const int nv = 2 * spec.n;
  if (nv > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("dimension too large");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd shift(nv);
  for (int a = 0; a < nv; ++a) shift[a] = unit(rng);
  const double max_step = 0.25 * (spec.box_hi - spec.box_lo).maxCoeff();

  std::vector<BoundarySample> out;
  out.reserve(m);
  const std::uint64_t budget = 50ull * static_cast<std::uint64_t>(m) + 100;
  for (std::uint64_t i = 1; i <= budget && static_cast<int>(out.size()) < m; ++i) {
    Eigen::VectorXd x(nv);
    for (int a = 0; a < nv; ++a) {
      double u = radical_inverse(i, kPrimes[a]) + shift[a];
      u -= std::floor(u);
      x[a] = spec.box_lo[a] + u * (spec.box_hi[a] - spec.box_lo[a]);
    }
    if (!newton_to_surface(spec.rho, x, 200, max_step)) continue;
    try {
      out.push_back(make_boundary_sample(spec, from_real(x)));
    } catch (const DegenerateBoundaryError&) {
    }
  }
  if (static_cast<int>(out.size()) < m) {
    const int deficit = m - static_cast<int>(out.size());
    throw PartialSampleError("sample_boundary: " + std::to_string(deficit) +
                                 " projections failed to converge",
                             deficit);
  }
  return out;
}

std::vector<BoundarySample> landmark_samples(const DomainSpec& spec) {
  std::vector<BoundarySample> out;
  const double max_step = 0.25 * (spec.box_hi - spec.box_lo).maxCoeff();
  for (const CPoint& z : spec.landmarks) {
    Eigen::VectorXd x = to_real(z);
    if (!newton_to_surface(spec.rho, x, 50, max_step)) {
      throw DegenerateBoundaryError("landmark is not a boundary point");
    }
    out.push_back(make_boundary_sample(spec, from_real(x)));
  }
  return out;
}

std::vector<BoundarySample> boundary_cloud(const DomainSpec& spec, int m, std::uint64_t seed) {
  std::vector<BoundarySample> out = landmark_samples(spec);
  std::vector<BoundarySample> rest = sample_boundary(spec, m, seed);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::vector<CollarPoint> collar_points(const std::vector<BoundarySample>& feet,
                                       const std::vector<double>& depths, Side side) {
  std::vector<CollarPoint> out;
  out.reserve(feet.size() * depths.size());
  for (const auto& f : feet)
    for (double d : depths) out.push_back(offset_point(f, d, side));
  return out;
}

double distance_rho_constant(const DomainSpec& spec, const std::vector<CollarPoint>& pts) {
  double c1 = 0.0;
  for (const auto& c : pts) {
    const double r = std::abs(spec.rho.value(c.q));
    if (r > 0.0) c1 = std::max(c1, c.distance / r);
  }
  return c1;
}

double normal_derivative(const ScalarField& f, const BoundarySample& p) {
  const CVector g = wirtinger_gradient(f, p.p);
  return 2.0 * (g.transpose() * p.normal).value().real();
}

TaylorFit taylor_normal_check(const DomainSpec& spec, const ScalarField& f, const BoundarySample& p,
                              const std::vector<double>& depths) {
  (void)spec;
  TaylorFit fit;
  const double f0 = f.value(p.p);
  const double dn = normal_derivative(f, p);
  std::vector<double> lx, ly;
  for (double d : depths) {
    if (!(d > 0.0)) throw std::invalid_argument("taylor_normal_check: depths must be positive");
    const CPoint q = p.p - d * p.normal;
    const double r = std::abs(f.value(q) - f0 + d * dn);
    fit.residuals.push_back(r);
    if (r > 1e-14) {
      lx.push_back(std::log(d));
      ly.push_back(std::log(r));
    }
  }
  if (lx.size() < 2) {
    fit.exact = true;
    return fit;
  }
  const double k = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return fit;
}

}  // namespace levilab
