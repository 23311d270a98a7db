#pragma once

#include "levilab/cx_calculus.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace levilab {

/// Omega = {rho < 0} with d rho != 0 near {rho = 0}.
struct DomainSpec {
  std::string id;
  int n = 2;
  ScalarField rho;
  Eigen::VectorXd box_lo;  // bounding box in R^{2n}
  Eigen::VectorXd box_hi;
  CPoint interior_anchor;  // rho < 0 here
  double collar_width = 0.05;
  /// Exact boundary points seeding degenerate strata; catalog data.
  std::vector<CPoint> landmarks;
};

std::vector<std::string> catalog_ids();
/// Throws std::invalid_argument for an unknown id.
DomainSpec catalog_domain(const std::string& id);
/// Domain from a user field; box [-box_half, box_half]^{2n}, anchor at the origin.
DomainSpec domain_from_field(ScalarField rho, std::string id, double box_half = 2.0);
/// Checks rho(anchor) < 0 and box shape.
void validate_domain(const DomainSpec& spec);

class DegenerateBoundaryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class CollarTooWideError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class AmbiguousProjectionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class PartialSampleError : public std::runtime_error {
 public:
  PartialSampleError(const std::string& what, int deficit)
      : std::runtime_error(what), deficit_(deficit) {}
  int deficit() const { return deficit_; }

 private:
  int deficit_;
};

/// Boundary point with N = conj(d rho)/|d rho|. As a vector of R^{2n} the
/// same N is the unit outward real normal.
struct BoundarySample {
  CPoint p;
  CVector normal;
  double grad_norm = 0.0;  // |d rho(p)|
};

enum class Side { Interior, Exterior };
const char* side_name(Side s);

/// q = p - d nu (interior) or p + d nu (exterior) with foot p.
struct CollarPoint {
  CPoint q;
  BoundarySample foot;
  double distance = 0.0;
  Side side = Side::Interior;
};

CVector unit_normal(const DomainSpec& spec, const CPoint& p);
BoundarySample make_boundary_sample(const DomainSpec& spec, const CPoint& p);

/// Foot of the normal line through q. Alternates a tangential correction
/// with Newton steps onto {rho = 0}.
CollarPoint project_to_boundary(const DomainSpec& spec, const CPoint& q);

/// Collar point at signed normal offset from a boundary sample.
CollarPoint offset_point(const BoundarySample& foot, double d, Side side);

/// Halton box points (Cranley-Patterson shift from `seed`) projected onto
/// the boundary. Deterministic in (spec, m, seed).
std::vector<BoundarySample> sample_boundary(const DomainSpec& spec, int m, std::uint64_t seed);
std::vector<BoundarySample> landmark_samples(const DomainSpec& spec);
/// Landmarks first, then `m` quasi-random samples.
std::vector<BoundarySample> boundary_cloud(const DomainSpec& spec, int m, std::uint64_t seed);

std::vector<CollarPoint> collar_points(const std::vector<BoundarySample>& feet,
                                       const std::vector<double>& depths, Side side);

/// max d / |rho(q)| over collar points: the constant c1 with d <= c1 |rho|.
double distance_rho_constant(const DomainSpec& spec, const std::vector<CollarPoint>& pts);

struct TaylorFit {
  bool exact = false;  // residual below 1e-14 at every depth
  double slope = 0.0;  // log-residual vs log-depth
  std::vector<double> residuals;
};
/// Residual |f(q) - f(p) + d (d_nu f)(p)| at q = p - d nu, nu the unit real
/// outward normal.
TaylorFit taylor_normal_check(const DomainSpec& spec, const ScalarField& f, const BoundarySample& p,
                              const std::vector<double>& depths);

/// Derivative along the unit real normal: 2 Re <df, N>.
double normal_derivative(const ScalarField& f, const BoundarySample& p);

}  // namespace levilab
