// Numerical Taylor structure of the volume density: least-squares
// extraction of the coefficients a_i(u) of theta(r u), parity checks
// between opposite directions, the harmonic-up-to-order procedure, and
// the odd-order coefficient relation along geodesics.

#ifndef TUBELAB_SERIES_HPP
#define TUBELAB_SERIES_HPP

#include "tubelab/density.hpp"
#include "tubelab/metric.hpp"
#include "tubelab/spaces.hpp"

namespace tubelab::series {

using geo::ChartMetric;
using geo::Vec;

struct IllConditionedFit : std::runtime_error {
    double condition;
    explicit IllConditionedFit(double c)
        : std::runtime_error("coefficient fit is ill-conditioned; lower the order or shrink "
                             "the window"),
          condition(c) {}
};

struct CoefficientFit {
    Vec base_point;
    Vec direction;                 // unit
    std::vector<double> coeffs;    // a_0 .. a_K
    std::vector<double> stderrs;   // per coefficient
    double r_min = 0.0, r_max = 0.0;
    double condition_number = 0.0;
    double rms_residual = 0.0;
};

struct FitOptions {
    int order = 6;  // K <= 8
    double r_min = 0.05;
    double r_max = 0.5;
    int samples = 0;  // 0 -> max(2K+6, 24) Chebyshev radii
    // Adds theta((-r)(-u)) samples at negative radii, which pins the
    // parity structure of the fit.
    bool antipodal_samples = true;
    geo::OdeTolerances tol;
};

CoefficientFit fit_coefficients(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                const FitOptions& opt = {});

// |a_i(-u) - (-1)^i a_i(u)| per order.
std::vector<double> parity_check(const CoefficientFit& fit_u, const CoefficientFit& fit_minus_u);

struct HarmonicOrderReport {
    int max_order = 0;
    std::vector<double> mean;
    std::vector<double> variation;  // max_i |a_i - mean| over the sample set
    std::vector<double> error_bar;
    std::vector<bool> order_passes;
    int harmonic_up_to = -1;  // largest k with all orders <= k passing
};

HarmonicOrderReport harmonic_up_to_order(const ChartMetric& m, int max_order,
                                         const std::vector<Vec>& base_points,
                                         int directions_per_point, uint64_t seed,
                                         const FitOptions& opt = {});

struct VanheckeReport {
    double lhs = 0.0;  // 2 a_(2k+1)(u)
    double rhs = 0.0;  // alternating sum of derivative terms
    double lhs_error = 0.0;
    double rhs_error = 0.0;
    bool inconclusive = false;
};

VanheckeReport vanhecke_relation_check(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                       int k, const FitOptions& opt = {});

// Radial profile fitted from theta along one direction (provenance
// `fitted`, residual-driven error estimates per derivative order).
spaces::RadialProfile fit_radial_profile(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                         const FitOptions& opt = {});

}  // namespace tubelab::series

#endif
