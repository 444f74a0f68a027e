// Jacobi-field propagation along geodesics and everything built on it:
// the volume density theta, the canonical geodesic involution, the
// shape operator and mean curvature of geodesic spheres, ball / sphere
// / half-ball volumes, and the D'Atri diagnostics.

#ifndef TUBELAB_DENSITY_HPP
#define TUBELAB_DENSITY_HPP

#include <span>

#include "tubelab/geodesics.hpp"
#include "tubelab/metric.hpp"
#include "tubelab/spaces.hpp"
#include "tubelab/sphere_rules.hpp"

namespace tubelab::density {

using geo::ChartMetric;
using geo::Mat;
using geo::TangentVector;
using geo::Vec;

// One radius sample of the transported Jacobi system along a unit-speed
// geodesic. a/ap are the sine-type fundamental solution (A(0)=0,
// A'(0)=Id) of the normal Jacobi equation in a parallel orthonormal
// frame; c/cp the cosine-type one (C(0)=Id, C'(0)=0) when requested.
struct JacobiSample {
    double r = 0.0;
    Mat a, ap;
    Mat c, cp;
    Vec position, velocity;
    Mat frame;  // columns: e1 = velocity, e2..en the parallel normal frame
};

struct JacobiTransport {
    int n = 0;
    Vec base_point, direction;
    std::vector<JacobiSample> samples;

    double det_a(size_t i) const;
    double theta(size_t i) const;  // det A(r) / r^(n-1)
    // Full d(exp) block diag(1, A(r)/r) in the parallel frame.
    Mat full_dexp(size_t i) const;
};

struct JacobiOptions {
    bool cosine_block = false;
    geo::OdeTolerances tol;
    // det A(r) < guard * r^(n-1) aborts with ConjugatePointError.
    double conjugate_guard = 1e-10;
};

JacobiTransport jacobi_transport(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                 std::span<const double> radii, const JacobiOptions& opt = {});

// Same, but with a caller-supplied g-orthonormal frame whose first
// column is unit_dir (tube rays align the frame with the base curve).
JacobiTransport jacobi_transport_framed(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                        const Mat& frame, std::span<const double> radii,
                                        const JacobiOptions& opt = {});

// Volume density of the exponential map at v (v != 0).
double theta(const ChartMetric& m, const TangentVector& v, const JacobiOptions& opt = {});

// iota(v) = -gamma_v'(1) based at exp(v).
TangentVector geodesic_involution(const ChartMetric& m, const TangentVector& v,
                                  geo::OdeTolerances tol = {});

// h(v) = tr L_v with L_v = -A'(r) A(r)^{-1} (flat-space spheres have
// h = -(n-1)/r in this convention).
double sphere_mean_curvature(const ChartMetric& m, const TangentVector& v,
                             const JacobiOptions& opt = {});

// Same quantity from the radial formula -(n-1)/r - (d_r theta)/theta
// with a 5-point stencil for d_r theta.
double sphere_mean_curvature_radial(const ChartMetric& m, const TangentVector& v,
                                    const JacobiOptions& opt = {});

struct BallVolumes {
    double radius = 0.0;
    double sphere_area = 0.0;
    double ball_volume = 0.0;
    double half_ball = 0.0;           // direction u
    double half_ball_opposite = 0.0;  // direction -u
};

// Geodesic sphere/ball/half-ball volumes by sphere rule x radial
// Gauss-Legendre quadrature of det A.
BallVolumes ball_volumes(const ChartMetric& m, const Vec& p, const Vec& u, double r,
                         const rules::SphereRule& rule, int radial_order = 16,
                         const JacobiOptions& opt = {});

struct DatriOptions {
    std::vector<Vec> base_points;
    int directions_per_point = 4;
    std::vector<double> radii = {0.4};        // half-ball radii
    std::vector<double> speeds = {0.4, 0.8};  // s in theta(s * gamma'(t))
    double geodesic_length = 0.4;
    int t_samples = 6;
    int rule_level = 6;
    int radial_order = 16;
    uint64_t seed = 1;
    bool check_half_ball = true;
    bool check_first_integral = true;
    // theta(iota(v)) vs theta(v) over the sampled (p, u, s): holds on
    // every metric, D'Atri or not.
    bool check_involution = false;
};

struct DatriReport {
    // max over base points/directions of |b(r;u) - mean|
    double half_ball_defect = 0.0;
    // max over samples of the variation of t -> theta(s gamma'(t))
    double first_integral_defect = 0.0;
    // max over samples of |theta(iota(v)) - theta(v)| / theta(v)
    double involution_defect = 0.0;
    double half_ball_error_estimate = 0.0;
    double first_integral_error_estimate = 0.0;
    std::vector<double> half_ball_values;
};

DatriReport datri_checks(const ChartMetric& m, const DatriOptions& opt);

}  // namespace tubelab::density

#endif
