// Benchmark geometries: Euclidean space, round spheres and hyperbolic
// spaces in stereographic (conformally flat) charts, Riemannian
// products, Damek-Ricci spaces built from Clifford J-map data in a
// global solvable-group chart, a non-round ellipsoid as the canonical
// non-D'Atri surface, and a small registry of generic chart metrics.

#ifndef TUBELAB_SPACES_HPP
#define TUBELAB_SPACES_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tubelab/jets.hpp"
#include "tubelab/metric.hpp"

namespace tubelab::spaces {

using geo::ChartMetric;
using geo::Mat;
using geo::Vec;

enum class SpaceKind { euclidean, sphere, hyperbolic, product, damek_ricci, ellipsoid, generic };

struct SpaceSpec {
    SpaceKind kind = SpaceKind::euclidean;
    int dim = 3;              // euclidean / sphere / hyperbolic
    double curvature = 1.0;   // sphere: K > 0; hyperbolic: K < 0
    std::vector<SpaceSpec> factors;            // product
    int p = 2, q = 1;                          // damek_ricci
    std::vector<Mat> jmap;                     // optional explicit J-map table
    std::vector<double> semi_axes = {1.0, 1.0, 1.3};  // ellipsoid
    std::string generic_name;                  // registered generic metric

    std::string name() const;

    static SpaceSpec euclidean_space(int n);
    static SpaceSpec sphere_space(int n, double k = 1.0);
    static SpaceSpec hyperbolic_space(int n, double k = -1.0);
    static SpaceSpec product_space(SpaceSpec a, SpaceSpec b);
    static SpaceSpec damek_ricci_space(int p, int q);
    static SpaceSpec ellipsoid_surface(std::vector<double> semi_axes);
    static SpaceSpec generic_space(std::string registered_name);
};

struct AlgebraError : std::runtime_error {
    explicit AlgebraError(const std::string& w) : std::runtime_error(w) {}
};
struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& w) : std::runtime_error(w) {}
};
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& w) : std::runtime_error(w) {}
};

ChartMetric make_space(const SpaceSpec& spec);

// Radial density profile theta-bar with three derivatives.
struct RadialProfile {
    enum class Provenance { closed_form, fitted };

    std::function<Jet3(double)> jet;  // theta-bar as a 3-jet of r
    double d2_at_zero = 0.0;          // exact theta-bar''(0)
    Provenance provenance = Provenance::closed_form;
    std::array<double, 4> error_estimate = {0, 0, 0, 0};  // per derivative order

    double value(double r) const { return jet(r).f; }
    double d1(double r) const { return jet(r).d1; }
    double d2(double r) const { return jet(r).d2; }
    double d3(double r) const { return jet(r).d3; }
};

// Closed-form profiles for the harmonic built-ins:
//   euclidean -> 1
//   sphere(K) -> (sin(sqrt(K) r)/(sqrt(K) r))^(n-1)
//   hyperbolic(K) -> (sinh(kappa r)/(kappa r))^(n-1), kappa = sqrt(-K)
//   damek_ricci -> cosh^q(r/2) (sinh(r/2)/(r/2))^(p+q)
RadialProfile closed_form_profile(const SpaceSpec& spec);

// Standard J-map tables: q = 1 (complex structure, even p) and q = 3
// (quaternionic structure, p = 0 mod 4).
std::vector<Mat> standard_jmap(int p, int q);

// Max residual of J_a J_b + J_b J_a + 2 <Z_a,Z_b> Id over the table.
double clifford_residual(const std::vector<Mat>& jmap);

// Names accepted by SpaceSpec::generic_space.
std::vector<std::string> registered_generic_metrics();

}  // namespace tubelab::spaces

#endif
