#include "tubelab/tube.hpp"

#include <algorithm>
#include <cmath>

#include "tubelab/jets.hpp"
#include "tubelab/ode.hpp"
#include "tubelab/summation.hpp"

namespace tubelab::tube {

namespace {

// Deterministic Gram-Schmidt of the normals against the velocity in
// the metric at x; counters slow orthogonality drift of the
// transported frame.
void orthonormalize_point(const ChartMetric& m, CurvePoint& cp) {
    const int n = m.dim();
    const Mat g = m.metric_at(cp.position);
    auto gdot = [&](const Vec& a, const Vec& b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += g(i, j) * a[i] * b[j];
        return s;
    };
    const double vn = std::sqrt(gdot(cp.velocity, cp.velocity));
    for (double& c : cp.velocity) c /= vn;
    for (size_t a = 0; a < cp.normals.size(); ++a) {
        Vec& nu = cp.normals[a];
        const double pv = gdot(nu, cp.velocity);
        for (int i = 0; i < n; ++i) nu[i] -= pv * cp.velocity[i];
        for (size_t b = 0; b < a; ++b) {
            const double pb = gdot(nu, cp.normals[b]);
            for (int i = 0; i < n; ++i) nu[i] -= pb * cp.normals[b][i];
        }
        const double nn = std::sqrt(gdot(nu, nu));
        for (double& c : nu) c /= nn;
    }
}

// Ambient ray frame [w | T | q_2..q_(n-1)] for a Fermi direction w_hat.
Mat ray_frame(const ChartMetric& m, const CurvePoint& cp, const Vec& w_hat, Vec& w_out) {
    const int n = m.dim();
    const int k = n - 1;
    w_out.assign(n, 0.0);
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i) w_out[i] += w_hat[a] * cp.normals[a][i];
    Mat frame(n, n);
    for (int i = 0; i < n; ++i) {
        frame(i, 0) = w_out[i];
        frame(i, 1) = cp.velocity[i];
    }
    const Mat q = la::householder_frame(w_hat);
    for (int col = 2; col < n; ++col)
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int a = 0; a < k; ++a) s += q(a, col - 1) * cp.normals[a][i];
            frame(i, col) = s;
        }
    return frame;
}

double fermi_curvature_coefficient(const ChartMetric& m, const CurvePoint& cp, const Vec& w) {
    if (cp.curvature_vector.empty()) return 0.0;
    const int n = m.dim();
    const Mat g = m.metric_at(cp.position);
    double wk = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) wk += g(i, j) * w[i] * cp.curvature_vector[j];
    return wk;
}

struct RaySamples {
    std::vector<double> det;
    std::vector<double> trs;
    std::vector<double> ricn;
    std::vector<double> taup;
    std::vector<double> tau;
};

// Integrates the tube Jacobi system along exp(rho w) and evaluates the
// normal-block matrix M(rho) = C(rho) Y0 + D(rho) Y0' with
// Y0 = [T | 0 ...], Y0' = [-<w,kappa> T | angular directions].
RaySamples trace_ray(const ChartMetric& m, const CurvePoint& cp, const Vec& w_hat,
                     std::span<const double> rhos, bool with_shape, geo::OdeTolerances tol,
                     double curve_t) {
    const int n = m.dim();
    const int k = n - 1;
    Vec w;
    const Mat frame = ray_frame(m, cp, w_hat, w);
    const double wk = fermi_curvature_coefficient(m, cp, w);

    density::JacobiOptions jopt;
    jopt.cosine_block = true;
    jopt.tol = tol;
    density::JacobiTransport jt =
        density::jacobi_transport_framed(m, cp.position, w, frame, rhos, jopt);

    RaySamples out;
    out.det.resize(rhos.size());
    if (with_shape) {
        out.trs.resize(rhos.size());
        out.ricn.resize(rhos.size());
        out.taup.resize(rhos.size());
        out.tau.resize(rhos.size());
    }
    Mat mjac(k, k), mjacp(k, k);
    for (size_t s = 0; s < rhos.size(); ++s) {
        const density::JacobiSample& js = jt.samples[s];
        for (int i = 0; i < k; ++i) {
            mjac(i, 0) = js.c(i, 0) - wk * js.a(i, 0);
            for (int j = 1; j < k; ++j) mjac(i, j) = js.a(i, j);
        }
        const la::Lu lu = la::lu_factor(mjac);
        const double det = la::lu_det(lu);
        if (det <= 0.0) throw SelfFocusError(curve_t, rhos[s]);
        out.det[s] = det;
        if (!with_shape) continue;
        for (int i = 0; i < k; ++i) {
            mjacp(i, 0) = js.cp(i, 0) - wk * js.ap(i, 0);
            for (int j = 1; j < k; ++j) mjacp(i, j) = js.ap(i, j);
        }
        const Mat minv = la::lu_solve_mat(lu, Mat::identity(k));
        const Mat shape = -1.0 * (mjacp * minv);
        const double mu = la::trace(shape);
        Mat mdir;
        m.field().directional_curvature(js.position.data(), js.velocity.data(), mdir);
        const double ricn = la::trace(mdir);
        const double tau = m.field().scalar_curvature(js.position.data());
        double tr_s2 = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) tr_s2 += shape(i, j) * shape(j, i);
        out.trs[s] = mu;
        out.ricn[s] = ricn;
        out.tau[s] = tau;
        out.taup[s] = tau - 2.0 * ricn + mu * mu - tr_s2;
    }
    return out;
}

struct CurveQuadrature {
    std::vector<double> ts;
    std::vector<double> weights;
};

CurveQuadrature curve_nodes(const FramedCurve& fc, int panels, int order) {
    Vec gx, gw;
    rules::gauss_legendre(order, gx, gw);
    CurveQuadrature out;
    const double len = fc.length() / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = fc.t_begin() + p * len;
        for (int i = 0; i < order; ++i) {
            out.ts.push_back(lo + 0.5 * len * (gx[i] + 1.0));
            out.weights.push_back(0.5 * len * gw[i]);
        }
    }
    return out;
}

}  // namespace

FramedCurve FramedCurve::geodesic(const ChartMetric& m, Vec p, Vec unit_dir, double length) {
    FramedCurve fc(m);
    fc.geodesic_ = true;
    const double n0 = m.norm(p, unit_dir);
    for (double& c : unit_dir) c /= n0;
    fc.p_ = std::move(p);
    fc.u_ = std::move(unit_dir);
    fc.t_begin_ = 0.0;
    fc.t_end_ = length;
    return fc;
}

FramedCurve FramedCurve::parametric(const ChartMetric& m, std::function<Vec(double)> x,
                                    std::function<Vec(double)> xdot,
                                    std::function<Vec(double)> xddot, double t_begin,
                                    double t_end) {
    FramedCurve fc(m);
    fc.geodesic_ = false;
    fc.x_ = std::move(x);
    fc.xdot_ = std::move(xdot);
    fc.xddot_ = std::move(xddot);
    fc.t_begin_ = t_begin;
    fc.t_end_ = t_end;
    return fc;
}

FramedCurve FramedCurve::flat_circle(const ChartMetric& m, double radius, double length) {
    const int n = m.dim();
    auto pad = [n](double a, double b) {
        Vec out(n, 0.0);
        out[0] = a;
        out[1] = b;
        return out;
    };
    const double r = radius;
    return parametric(
        m, [r, pad](double t) { return pad(r * std::cos(t / r), r * std::sin(t / r)); },
        [r, pad](double t) { return pad(-std::sin(t / r), std::cos(t / r)); },
        [r, pad](double t) { return pad(-std::cos(t / r) / r, -std::sin(t / r) / r); }, 0.0,
        length);
}

std::vector<CurvePoint> FramedCurve::sample(std::span<const double> ts) const {
    const ChartMetric& m = *m_;
    const int n = m.dim();
    const int k = n - 1;
    std::vector<CurvePoint> out(ts.size());

    if (geodesic_) {
        const Mat frame0 = geo::complete_frame(m, p_, u_);
        geo::Ten3 gamma(n);
        ode::Dopri5 solver(2 * n + k * n, [&](double s, const double* y, double* dy) {
            if (!m.domain().contains(y)) throw geo::EscapeError(s);
            m.field().christoffel(y, gamma);
            const double* v = y + n;
            for (int i = 0; i < n; ++i) dy[i] = v[i];
            auto contract = [&](const double* b, double* o) {
                for (int kk = 0; kk < n; ++kk) {
                    double acc = 0.0;
                    for (int i = 0; i < n; ++i) {
                        double si = 0.0;
                        for (int j = 0; j < n; ++j) si += gamma(kk, i, j) * b[j];
                        acc += v[i] * si;
                    }
                    o[kk] = -acc;
                }
            };
            contract(v, dy + n);
            for (int a = 0; a < k; ++a) contract(y + 2 * n + a * n, dy + 2 * n + a * n);
        });
        std::vector<double> y(2 * n + k * n);
        for (int i = 0; i < n; ++i) {
            y[i] = p_[i];
            y[n + i] = u_[i];
        }
        for (int a = 0; a < k; ++a)
            for (int i = 0; i < n; ++i) y[2 * n + a * n + i] = frame0(i, a + 1);
        solver.integrate(y, 0.0, t_end_, ts, [&](size_t idx, const std::vector<double>& yy) {
            CurvePoint& cp = out[idx];
            cp.t = ts[idx];
            cp.position.assign(yy.begin(), yy.begin() + n);
            cp.velocity.assign(yy.begin() + n, yy.begin() + 2 * n);
            cp.normals.resize(k);
            for (int a = 0; a < k; ++a)
                cp.normals[a].assign(yy.begin() + 2 * n + a * n,
                                     yy.begin() + 2 * n + (a + 1) * n);
            cp.curvature_vector.clear();
            orthonormalize_point(m, cp);
        });
        return out;
    }

    // Parametric curve: transport the normals only; position/velocity
    // come from the closures. Normal connection: D_t nu = -<nu,kappa> T.
    const Vec x0 = x_(t_begin_);
    Vec v0 = xdot_(t_begin_);
    const double sp = m.norm(x0, v0);
    for (double& c : v0) c /= sp;
    const Mat frame0 = geo::complete_frame(m, x0, v0);
    geo::Ten3 gamma(n);
    auto kappa_at = [&](double t, Vec& kap) {
        const Vec x = x_(t);
        const Vec v = xdot_(t);
        const Vec acc = xddot_(t);
        m.field().christoffel(x.data(), gamma);
        kap.assign(n, 0.0);
        for (int kk = 0; kk < n; ++kk) {
            double s = acc[kk];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) s += gamma(kk, i, j) * v[i] * v[j];
            kap[kk] = s;
        }
    };
    Vec kap(n);
    ode::Dopri5 solver(k * n, [&](double t, const double* y, double* dy) {
        const Vec x = x_(t);
        if (!m.domain().contains(x.data())) throw geo::EscapeError(t);
        const Vec v = xdot_(t);
        const Mat g = m.metric_at(x);
        kappa_at(t, kap);  // also refreshes gamma at x
        for (int a = 0; a < k; ++a) {
            const double* nu = y + a * n;
            double nk = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) nk += g(i, j) * nu[i] * kap[j];
            for (int kk = 0; kk < n; ++kk) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) {
                    double si = 0.0;
                    for (int j = 0; j < n; ++j) si += gamma(kk, i, j) * nu[j];
                    s += v[i] * si;
                }
                dy[a * n + kk] = -s - nk * v[kk];
            }
        }
    });
    std::vector<double> y(k * n);
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i) y[a * n + i] = frame0(i, a + 1);
    solver.integrate(y, t_begin_, t_end_, ts, [&](size_t idx, const std::vector<double>& yy) {
        CurvePoint& cp = out[idx];
        cp.t = ts[idx];
        cp.position = x_(ts[idx]);
        cp.velocity = xdot_(ts[idx]);
        cp.normals.resize(k);
        for (int a = 0; a < k; ++a)
            cp.normals[a].assign(yy.begin() + a * n, yy.begin() + (a + 1) * n);
        kappa_at(ts[idx], cp.curvature_vector);
        orthonormalize_point(m, cp);
    });
    return out;
}

TubeJacobianSample tube_jacobian(const ChartMetric& m, const CurvePoint& cp, const Vec& w_hat,
                                 double rho, geo::OdeTolerances tol) {
    const int n = m.dim();
    const int k = n - 1;
    Vec w;
    const Mat frame = ray_frame(m, cp, w_hat, w);
    const double wk = fermi_curvature_coefficient(m, cp, w);

    density::JacobiOptions jopt;
    jopt.cosine_block = true;
    jopt.tol = tol;
    const double rhos[1] = {rho};
    density::JacobiTransport jt =
        density::jacobi_transport_framed(m, cp.position, w, frame, rhos, jopt);
    const density::JacobiSample& js = jt.samples[0];
    Mat mjac(k, k), mjacp(k, k);
    for (int i = 0; i < k; ++i) {
        mjac(i, 0) = js.c(i, 0) - wk * js.a(i, 0);
        mjacp(i, 0) = js.cp(i, 0) - wk * js.ap(i, 0);
        for (int j = 1; j < k; ++j) {
            mjac(i, j) = js.a(i, j);
            mjacp(i, j) = js.ap(i, j);
        }
    }
    const la::Lu lu = la::lu_factor(mjac);
    const double det = la::lu_det(lu);
    if (det <= 0.0) throw SelfFocusError(cp.t, rho);
    TubeJacobianSample out;
    out.jfactor = det;
    out.shape = -1.0 * (mjacp * la::lu_solve_mat(lu, Mat::identity(k)));
    out.mean_curvature_sum = la::trace(out.shape);
    out.normal = js.velocity;
    out.position = js.position;
    return out;
}

std::vector<double> tube_volumes(const ChartMetric& m, const FramedCurve& fc,
                                 std::span<const double> radii, const TubeQuadrature& quad) {
    const int n = m.dim();
    Vec gx, gw;
    rules::gauss_legendre(quad.radial_order, gx, gw);
    std::vector<double> samples;
    for (size_t k = 0; k < radii.size(); ++k)
        for (int j = 0; j < quad.radial_order; ++j)
            samples.push_back(0.5 * radii[k] * (gx[j] + 1.0));
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    std::vector<std::vector<size_t>> index_of(radii.size());
    for (size_t k = 0; k < radii.size(); ++k) {
        index_of[k].resize(quad.radial_order);
        for (int j = 0; j < quad.radial_order; ++j) {
            const double target = 0.5 * radii[k] * (gx[j] + 1.0);
            const auto it = std::lower_bound(samples.begin(), samples.end(), target);
            index_of[k][j] = static_cast<size_t>(it - samples.begin());
        }
    }

    const CurveQuadrature cq = curve_nodes(fc, quad.t_panels, quad.t_order);
    const std::vector<CurvePoint> pts = fc.sample(cq.ts);
    const rules::SphereRule angular =
        rules::build_rule(n - 1, quad.angular_level, quad.angular_kind);

    const size_t nrays = pts.size() * angular.size();
    std::vector<std::vector<double>> ray_terms(radii.size(), std::vector<double>(nrays, 0.0));
    parallel_for(nrays, [&](size_t ray) {
        const size_t ti = ray / angular.size();
        const size_t wi = ray % angular.size();
        RaySamples rs =
            trace_ray(m, pts[ti], angular.nodes[wi], samples, false, quad.tol, pts[ti].t);
        const double wfac = cq.weights[ti] * angular.weights[wi];
        for (size_t k = 0; k < radii.size(); ++k) {
            double acc = 0.0;
            for (int j = 0; j < quad.radial_order; ++j) acc += gw[j] * rs.det[index_of[k][j]];
            ray_terms[k][ray] = wfac * 0.5 * radii[k] * acc;
        }
    });
    std::vector<double> out(radii.size());
    for (size_t k = 0; k < radii.size(); ++k) out[k] = pairwise_sum(ray_terms[k]);
    return out;
}

double tube_volume_direct(const ChartMetric& m, const FramedCurve& fc, double r,
                          const TubeQuadrature& quad) {
    const double radii[1] = {r};
    return tube_volumes(m, fc, radii, quad)[0];
}

rules::Estimated tube_volume_estimated(const ChartMetric& m, const FramedCurve& fc, double r,
                                       const TubeQuadrature& quad) {
    rules::Estimated out;
    out.value = tube_volume_direct(m, fc, r, quad);
    TubeQuadrature coarse = quad;
    coarse.angular_level = std::max(2, quad.angular_level - 2);
    coarse.radial_order = std::max(6, quad.radial_order / 2);
    coarse.t_order = std::max(4, quad.t_order - 2);
    const double low = tube_volume_direct(m, fc, r, coarse);
    out.error = std::fabs(out.value - low) + 1e-9 * std::fabs(out.value);
    return out;
}

TubeInvariants tube_invariants(const ChartMetric& m, const FramedCurve& fc, double r,
                               const TubeQuadrature& quad) {
    const int n = m.dim();
    Vec gx, gw;
    rules::gauss_legendre(quad.radial_order, gx, gw);
    std::vector<double> samples(quad.radial_order + 1);
    for (int j = 0; j < quad.radial_order; ++j) samples[j] = 0.5 * r * (gx[j] + 1.0);
    samples[quad.radial_order] = r;

    const CurveQuadrature cq = curve_nodes(fc, quad.t_panels, quad.t_order);
    const std::vector<CurvePoint> pts = fc.sample(cq.ts);
    const rules::SphereRule angular =
        rules::build_rule(n - 1, quad.angular_level, quad.angular_kind);

    const size_t nrays = pts.size() * angular.size();
    std::vector<double> vol_terms(nrays), area_terms(nrays), mu_terms(nrays), ric_terms(nrays),
        taup_terms(nrays), tau_terms(nrays);
    parallel_for(nrays, [&](size_t ray) {
        const size_t ti = ray / angular.size();
        const size_t wi = ray % angular.size();
        RaySamples rs =
            trace_ray(m, pts[ti], angular.nodes[wi], samples, true, quad.tol, pts[ti].t);
        const double wfac = cq.weights[ti] * angular.weights[wi];
        double acc = 0.0;
        for (int j = 0; j < quad.radial_order; ++j) acc += gw[j] * rs.det[j];
        vol_terms[ray] = wfac * 0.5 * r * acc;
        const size_t end = quad.radial_order;
        const double da = rs.det[end];
        area_terms[ray] = wfac * da;
        mu_terms[ray] = wfac * da * rs.trs[end];
        ric_terms[ray] = wfac * da * rs.ricn[end];
        taup_terms[ray] = wfac * da * rs.taup[end];
        tau_terms[ray] = wfac * da * rs.tau[end];
    });

    TubeInvariants out;
    out.radius = r;
    out.volume = pairwise_sum(vol_terms);
    out.area = pairwise_sum(area_terms);
    out.total_mean_curvature = pairwise_sum(mu_terms) / (n - 1);
    out.normal_ricci_integral = pairwise_sum(ric_terms);
    out.total_scalar_curvature = pairwise_sum(taup_terms);
    out.ambient_scalar_integral = pairwise_sum(tau_terms);

    if (quad.estimate_error) {
        TubeQuadrature coarse = quad;
        coarse.estimate_error = false;
        coarse.angular_level = std::max(2, quad.angular_level - 2);
        coarse.radial_order = std::max(6, quad.radial_order / 2);
        TubeInvariants low = tube_invariants(m, fc, r, coarse);
        out.volume_error = std::fabs(out.volume - low.volume) + 1e-9 * std::fabs(out.volume);
        out.area_error = std::fabs(out.area - low.area) + 1e-9 * std::fabs(out.area);
        out.invariants_error =
            std::fabs(out.total_scalar_curvature - low.total_scalar_curvature) +
            1e-9 * std::fabs(out.total_scalar_curvature);
    }
    return out;
}

HarmonicTubeForms harmonic_closed_forms(const spaces::RadialProfile& profile, int n, double r,
                                        double l) {
    const double om = geo::unit_ball_volume(n - 1);
    const Jet3 rj = Jet3::variable(r);
    const Jet3 v = Jet3(om) * pow(rj, n - 1) * profile.jet(r);
    HarmonicTubeForms out;
    out.v = v.f;
    out.v1 = v.d1;
    out.v2 = v.d2;
    out.v3 = v.d3;
    out.invariants.radius = r;
    out.invariants.volume = v.f * l;
    out.invariants.area = v.d1 * l;
    out.invariants.total_mean_curvature = -v.d2 * l / (n - 1);
    out.ricci_constant = -3.0 * profile.d2_at_zero;
    out.scalar_curvature = n * out.ricci_constant;
    out.invariants.total_scalar_curvature =
        (v.d3 - 3.0 * (n - 1) * profile.d2_at_zero * v.d1) * l;
    out.invariants.normal_ricci_integral = out.ricci_constant * v.d1 * l;
    out.invariants.ambient_scalar_integral = out.scalar_curvature * v.d1 * l;
    return out;
}

SteinerReport steiner_check(const ChartMetric& m, const FramedCurve& fc, double r,
                            std::span<const double> deltas, const TubeQuadrature& quad) {
    SteinerReport rep;
    TubeInvariants inv = tube_invariants(m, fc, r, quad);
    rep.area_coeff = inv.area;
    rep.second_coeff = -(m.dim() - 1) * inv.total_mean_curvature;
    rep.third_coeff =
        inv.normal_ricci_integral + inv.total_scalar_curvature - inv.ambient_scalar_integral;

    const double d = deltas.empty() ? 0.02 : deltas[0];
    std::vector<double> radii;
    for (int k = -3; k <= 3; ++k) radii.push_back(r + k * d);
    for (double dd : deltas) {
        radii.push_back(r + dd);
        radii.push_back(r + 0.5 * dd);
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-13; }),
                radii.end());
    std::vector<double> vols = tube_volumes(m, fc, radii, quad);
    auto vol_at = [&](double rr) {
        for (size_t i = 0; i < radii.size(); ++i)
            if (std::fabs(radii[i] - rr) < 1e-12) return vols[i];
        throw std::logic_error("steiner_check: missing radius");
    };
    const double v0 = vol_at(r);
    const double vm3 = vol_at(r - 3 * d), vm2 = vol_at(r - 2 * d), vm1 = vol_at(r - d);
    const double vp1 = vol_at(r + d), vp2 = vol_at(r + 2 * d), vp3 = vol_at(r + 3 * d);
    rep.fd1 =
        (-vm3 / 60 + 3 * vm2 / 20 - 3 * vm1 / 4 + 3 * vp1 / 4 - 3 * vp2 / 20 + vp3 / 60) / d;
    rep.fd2 = (vm3 / 90 - 3 * vm2 / 20 + 3 * vm1 / 2 - 49 * v0 / 18 + 3 * vp1 / 2 -
               3 * vp2 / 20 + vp3 / 90) /
              (d * d);
    rep.fd3 = (vm3 / 8 - vm2 + 13 * vm1 / 8 - 13 * vp1 / 8 + vp2 - vp3 / 8) / (d * d * d);

    for (double dd : deltas) {
        const double model = v0 + rep.area_coeff * dd + 0.5 * rep.second_coeff * dd * dd +
                             rep.third_coeff * dd * dd * dd / 6.0;
        rep.deltas.push_back(dd);
        rep.residuals.push_back(std::fabs(vol_at(r + dd) - model));
    }
    if (deltas.size() >= 2 && rep.residuals[1] > 0)
        rep.decay_ratio = rep.residuals[0] / rep.residuals[1];
    return rep;
}

}  // namespace tubelab::tube
