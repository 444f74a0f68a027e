// Tubes about curves: Fermi frames, the normal-exponential Jacobian
// from mixed-initial-condition Jacobi fields, direct tube volume /
// area / total mean curvature / total scalar curvature, the harmonic
// closed forms driven by a radial density profile, and the
// Steiner-type offset expansion check.

#ifndef TUBELAB_TUBE_HPP
#define TUBELAB_TUBE_HPP

#include <functional>

#include "tubelab/density.hpp"
#include "tubelab/metric.hpp"
#include "tubelab/spaces.hpp"
#include "tubelab/sphere_rules.hpp"

namespace tubelab::tube {

using geo::ChartMetric;
using geo::Mat;
using geo::Vec;

struct SelfFocusError : std::runtime_error {
    double t, rho;
    SelfFocusError(double t_, double rho_)
        : std::runtime_error("tube jacobian lost positivity (self-focus)"), t(t_), rho(rho_) {}
};

// Fermi-framed data of the base curve at one parameter value.
struct CurvePoint {
    double t = 0.0;
    Vec position;
    Vec velocity;                // unit
    std::vector<Vec> normals;    // nu_1..nu_{n-1}, g-orthonormal, normal-parallel
    Vec curvature_vector;        // D_t gamma' (zero for geodesics)
};

// A unit-speed curve with enough structure to build Fermi frames:
// either a geodesic (p, u, length) or a parametric curve with
// position/velocity/acceleration closures.
class FramedCurve {
  public:
    static FramedCurve geodesic(const ChartMetric& m, Vec p, Vec unit_dir, double length);
    static FramedCurve parametric(const ChartMetric& m, std::function<Vec(double)> x,
                                  std::function<Vec(double)> xdot,
                                  std::function<Vec(double)> xddot, double t_begin,
                                  double t_end);
    // Circle of the given radius in the x1-x2 plane of flat space,
    // parametrized by arc length starting at angle 0.
    static FramedCurve flat_circle(const ChartMetric& m, double radius, double length);

    // Fermi data at sorted parameters in [t_begin, t_end].
    std::vector<CurvePoint> sample(std::span<const double> ts) const;

    double length() const { return t_end_ - t_begin_; }
    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    bool is_geodesic() const { return geodesic_; }

  private:
    FramedCurve(const ChartMetric& m) : m_(&m) {}

    const ChartMetric* m_;
    bool geodesic_ = false;
    Vec p_, u_;
    std::function<Vec(double)> x_, xdot_, xddot_;
    double t_begin_ = 0.0, t_end_ = 0.0;
};

struct TubeQuadrature {
    int t_order = 8;  // Gauss-Legendre nodes per curve panel
    int t_panels = 1;
    int angular_level = 6;
    rules::RuleKind angular_kind = rules::RuleKind::product;
    int radial_order = 16;
    geo::OdeTolerances tol;
    // When true, integrals also run on a coarser sub-quadrature and
    // the difference is reported as the error estimate.
    bool estimate_error = false;
};

struct TubeInvariants {
    double radius = 0.0;
    double volume = 0.0;
    double area = 0.0;
    double total_mean_curvature = 0.0;    // (1/(n-1)) int mu^P dA
    double total_scalar_curvature = 0.0;  // int tau^P dA
    double normal_ricci_integral = 0.0;   // int Ric(N,N) dA
    double ambient_scalar_integral = 0.0;  // int tau dA
    double volume_error = 0.0;
    double area_error = 0.0;
    double invariants_error = 0.0;
};

// Point sample of the tube Jacobian along the normal ray from
// fc-point `cp` in the unit normal direction with components `w_hat`
// (coefficients in the Fermi frame).
struct TubeJacobianSample {
    double jfactor = 0.0;  // det of the (n-1) x (n-1) normal block
    Mat shape;             // S(rho) = -M'(rho) M(rho)^{-1}
    double mean_curvature_sum = 0.0;  // tr S
    Vec normal;            // outward normal gamma_w'(rho) in coordinates
    Vec position;
};
TubeJacobianSample tube_jacobian(const ChartMetric& m, const CurvePoint& cp, const Vec& w_hat,
                                 double rho, geo::OdeTolerances tol = {});

double tube_volume_direct(const ChartMetric& m, const FramedCurve& fc, double r,
                          const TubeQuadrature& quad = {});

// All radii share one Jacobi solve per ray.
std::vector<double> tube_volumes(const ChartMetric& m, const FramedCurve& fc,
                                 std::span<const double> radii, const TubeQuadrature& quad = {});

// Volume with an error estimate from a coarser embedded quadrature.
rules::Estimated tube_volume_estimated(const ChartMetric& m, const FramedCurve& fc, double r,
                                       const TubeQuadrature& quad = {});

TubeInvariants tube_invariants(const ChartMetric& m, const FramedCurve& fc, double r,
                               const TubeQuadrature& quad = {});

// Closed forms for harmonic spaces: v(r) = omega_(n-1) r^(n-1)
// theta-bar(r), V = v l, A = v' l, H = -v'' l/(n-1),
// C = (v''' - 3(n-1) theta-bar''(0) v') l.
struct HarmonicTubeForms {
    TubeInvariants invariants;
    double ricci_constant = 0.0;  // -3 theta-bar''(0)
    double scalar_curvature = 0.0;
    double v = 0.0, v1 = 0.0, v2 = 0.0, v3 = 0.0;
};
HarmonicTubeForms harmonic_closed_forms(const spaces::RadialProfile& profile, int n, double r,
                                        double l);

// Offset expansion: V(r+d) = V + A d - int mu^P d^2/2
// + int(Ric(N)+tau^P-tau) d^3/6 + O(d^4).
struct SteinerReport {
    double area_coeff = 0.0;       // A(r) from tube_invariants
    double second_coeff = 0.0;     // -int mu^P dA
    double third_coeff = 0.0;      // int (Ric(N) + tau^P - tau) dA
    double fd1 = 0.0, fd2 = 0.0, fd3 = 0.0;  // finite differences of V
    std::vector<double> deltas;
    std::vector<double> residuals;  // |V(r+d) - cubic model|
    double decay_ratio = 0.0;       // residual(d)/residual(d/2)
};
SteinerReport steiner_check(const ChartMetric& m, const FramedCurve& fc, double r,
                            std::span<const double> deltas, const TubeQuadrature& quad = {});

}  // namespace tubelab::tube

#endif
