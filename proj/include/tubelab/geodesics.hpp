// Geodesic flow and parallel transport on a chart metric.

#ifndef TUBELAB_GEODESICS_HPP
#define TUBELAB_GEODESICS_HPP

#include <functional>

#include "tubelab/metric.hpp"
#include "tubelab/ode.hpp"

namespace tubelab::geo {

struct GeodesicState {
    Vec position;
    Vec velocity;
    double t = 0.0;
};

struct OdeTolerances {
    double rtol = 1e-10;
    double atol = 1e-12;
};

// Solves x'' + Gamma(x)(x', x') = 0 from (p, v) to parameter t.
GeodesicState integrate_geodesic(const ChartMetric& m, const Vec& p, const Vec& v, double t,
                                 OdeTolerances tol = {});

// Same, reporting intermediate states at the given sorted parameters.
GeodesicState integrate_geodesic_sampled(
    const ChartMetric& m, const Vec& p, const Vec& v, double t, std::span<const double> samples,
    const std::function<void(size_t, const GeodesicState&)>& on_sample, OdeTolerances tol = {});

// Transports w along the geodesic from (p, v) to parameter t; returns
// the transported components together with the final geodesic state.
struct TransportResult {
    GeodesicState end;
    std::vector<Vec> vectors;
};
TransportResult transport_along_geodesic(const ChartMetric& m, const Vec& p, const Vec& v,
                                         double t, const std::vector<Vec>& vectors,
                                         OdeTolerances tol = {});

// Parallel transport along an arbitrary parametrized path given by
// closures for position and velocity.
Vec parallel_transport(const ChartMetric& m, const std::function<Vec(double)>& x,
                       const std::function<Vec(double)>& xdot, double t0, double t1, const Vec& w,
                       OdeTolerances tol = {});

}  // namespace tubelab::geo

#endif
