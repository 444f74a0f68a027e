#include "tubelab/geodesics.hpp"

namespace tubelab::geo {

namespace {

// Shared RHS helper: gamma_vw^k = Gamma^k_{ij} a^i b^j.
void gamma_apply(const Ten3& gamma, const double* a, const double* b, double* out, int n) {
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double si = 0.0;
            for (int j = 0; j < n; ++j) si += gamma(k, i, j) * b[j];
            s += a[i] * si;
        }
        out[k] = -s;
    }
}

struct GeodesicRhs {
    const ChartMetric& m;
    mutable Ten3 gamma;
    int extra_vectors;  // parallel-transported vectors appended to the state

    void operator()(double s, const double* y, double* dy) const {
        const int n = m.dim();
        if (!m.domain().contains(y)) throw EscapeError(s);
        m.field().christoffel(y, gamma);
        const double* v = y + n;
        for (int i = 0; i < n; ++i) dy[i] = v[i];
        gamma_apply(gamma, v, v, dy + n, n);
        for (int e = 0; e < extra_vectors; ++e) {
            const double* w = y + 2 * n + e * n;
            gamma_apply(gamma, v, w, dy + 2 * n + e * n, n);
        }
    }
};

}  // namespace

GeodesicState integrate_geodesic(const ChartMetric& m, const Vec& p, const Vec& v, double t,
                                 OdeTolerances tol) {
    return integrate_geodesic_sampled(m, p, v, t, {}, {}, tol);
}

GeodesicState integrate_geodesic_sampled(
    const ChartMetric& m, const Vec& p, const Vec& v, double t, std::span<const double> samples,
    const std::function<void(size_t, const GeodesicState&)>& on_sample, OdeTolerances tol) {
    const int n = m.dim();
    m.require_inside(p.data());
    GeodesicRhs rhs{m, Ten3(n), 0};
    ode::Dopri5 solver(2 * n, [&rhs](double s, const double* y, double* dy) { rhs(s, y, dy); },
                       tol.rtol, tol.atol);
    std::vector<double> y(2 * n);
    for (int i = 0; i < n; ++i) {
        y[i] = p[i];
        y[n + i] = v[i];
    }
    auto unpack = [n](double at, const std::vector<double>& yy) {
        GeodesicState g;
        g.position.assign(yy.begin(), yy.begin() + n);
        g.velocity.assign(yy.begin() + n, yy.begin() + 2 * n);
        g.t = at;
        return g;
    };
    solver.integrate(y, 0.0, t, samples,
                     on_sample ? std::function<void(size_t, const std::vector<double>&)>(
                                     [&](size_t i, const std::vector<double>& yy) {
                                         on_sample(i, unpack(samples[i], yy));
                                     })
                               : std::function<void(size_t, const std::vector<double>&)>{});
    return unpack(t, y);
}

TransportResult transport_along_geodesic(const ChartMetric& m, const Vec& p, const Vec& v,
                                         double t, const std::vector<Vec>& vectors,
                                         OdeTolerances tol) {
    const int n = m.dim();
    m.require_inside(p.data());
    const int ne = static_cast<int>(vectors.size());
    GeodesicRhs rhs{m, Ten3(n), ne};
    ode::Dopri5 solver(2 * n + ne * n,
                       [&rhs](double s, const double* y, double* dy) { rhs(s, y, dy); }, tol.rtol,
                       tol.atol);
    std::vector<double> y(2 * n + ne * n);
    for (int i = 0; i < n; ++i) {
        y[i] = p[i];
        y[n + i] = v[i];
    }
    for (int e = 0; e < ne; ++e)
        for (int i = 0; i < n; ++i) y[2 * n + e * n + i] = vectors[e][i];
    solver.integrate(y, 0.0, t);
    TransportResult out;
    out.end.position.assign(y.begin(), y.begin() + n);
    out.end.velocity.assign(y.begin() + n, y.begin() + 2 * n);
    out.end.t = t;
    out.vectors.resize(ne);
    for (int e = 0; e < ne; ++e)
        out.vectors[e].assign(y.begin() + 2 * n + e * n, y.begin() + 2 * n + (e + 1) * n);
    return out;
}

Vec parallel_transport(const ChartMetric& m, const std::function<Vec(double)>& x,
                       const std::function<Vec(double)>& xdot, double t0, double t1, const Vec& w,
                       OdeTolerances tol) {
    const int n = m.dim();
    Ten3 gamma(n);
    ode::Dopri5 solver(
        n,
        [&](double s, const double* y, double* dy) {
            const Vec pos = x(s);
            if (!m.domain().contains(pos.data())) throw EscapeError(s);
            m.field().christoffel(pos.data(), gamma);
            const Vec vel = xdot(s);
            gamma_apply(gamma, vel.data(), y, dy, n);
        },
        tol.rtol, tol.atol);
    std::vector<double> y(w.begin(), w.end());
    solver.integrate(y, t0, t1);
    return Vec(y.begin(), y.end());
}

}  // namespace tubelab::geo
