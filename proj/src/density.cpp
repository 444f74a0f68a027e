#include "tubelab/density.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "tubelab/ode.hpp"
#include "tubelab/rng.hpp"
#include "tubelab/summation.hpp"

namespace tubelab::density {

namespace {

// Combined geodesic + parallel frame + Jacobi fundamental solutions.
// State layout: x(n), v(n), frame rows e2..en (k*n), D(k*k), Dp(k*k)
// and optionally C(k*k), Cp(k*k), with k = n-1.
class JacobiSystem {
  public:
    JacobiSystem(const ChartMetric& m, bool with_c)
        : m_(m), n_(m.dim()), k_(m.dim() - 1), with_c_(with_c), g_(n_, n_), gamma_(n_),
          mdir_(n_, n_), kmat_(k_, k_), me_(n_), kwork_(k_ * k_, 0.0) {}

    int state_size() const { return 2 * n_ + k_ * n_ + (with_c_ ? 4 : 2) * k_ * k_; }

    void initial_state(const Vec& p, const Vec& u, const Mat& frame, std::vector<double>& y) const {
        y.assign(state_size(), 0.0);
        for (int i = 0; i < n_; ++i) {
            y[i] = p[i];
            y[n_ + i] = u[i];
        }
        for (int a = 0; a < k_; ++a)
            for (int i = 0; i < n_; ++i) y[2 * n_ + a * n_ + i] = frame(i, a + 1);
        // D = 0, Dp = Id; C = Id, Cp = 0.
        double* dp = y.data() + dp_off();
        for (int a = 0; a < k_; ++a) dp[a * k_ + a] = 1.0;
        if (with_c_) {
            double* c = y.data() + c_off();
            for (int a = 0; a < k_; ++a) c[a * k_ + a] = 1.0;
        }
    }

    void rhs(double s, const double* y, double* dy) {
        if (!m_.domain().contains(y)) throw geo::EscapeError(s);
        const double* v = y + n_;
        const double* e = y + 2 * n_;
        m_.field().metric(y, g_);
        m_.field().christoffel(y, gamma_);
        m_.field().directional_curvature(y, v, mdir_);
        // K_ab = <R(e_a, v)v, e_b>, symmetrized.
        for (int a = 0; a < k_; ++a) {
            for (int l = 0; l < n_; ++l) {
                double s1 = 0.0;
                for (int i = 0; i < n_; ++i) s1 += mdir_(l, i) * e[a * n_ + i];
                me_[l] = s1;
            }
            for (int b = 0; b < k_; ++b) {
                double s2 = 0.0;
                for (int l = 0; l < n_; ++l) {
                    double gl = 0.0;
                    for (int mcol = 0; mcol < n_; ++mcol) gl += g_(l, mcol) * e[b * n_ + mcol];
                    s2 += me_[l] * gl;
                }
                kwork_[a * k_ + b] = s2;
            }
        }
        for (int a = 0; a < k_; ++a)
            for (int b = 0; b < k_; ++b)
                kmat_(a, b) = 0.5 * (kwork_[a * k_ + b] + kwork_[b * k_ + a]);

        for (int i = 0; i < n_; ++i) dy[i] = v[i];
        gamma_contract(v, v, dy + n_);
        for (int a = 0; a < k_; ++a) gamma_contract(v, e + a * n_, dy + 2 * n_ + a * n_);

        second_order_block(y + d_off(), y + dp_off(), dy + d_off(), dy + dp_off());
        if (with_c_) second_order_block(y + c_off(), y + cp_off(), dy + c_off(), dy + cp_off());
    }

    int d_off() const { return 2 * n_ + k_ * n_; }
    int dp_off() const { return d_off() + k_ * k_; }
    int c_off() const { return dp_off() + k_ * k_; }
    int cp_off() const { return c_off() + k_ * k_; }

    void unpack(double r, const std::vector<double>& y, JacobiSample& out) const {
        out.r = r;
        out.position.assign(y.begin(), y.begin() + n_);
        out.velocity.assign(y.begin() + n_, y.begin() + 2 * n_);
        out.frame = Mat(n_, n_);
        for (int i = 0; i < n_; ++i) out.frame(i, 0) = y[n_ + i];
        for (int a = 0; a < k_; ++a)
            for (int i = 0; i < n_; ++i) out.frame(i, a + 1) = y[2 * n_ + a * n_ + i];
        out.a = Mat(k_, k_);
        out.ap = Mat(k_, k_);
        const double* d = y.data() + d_off();
        const double* dp = y.data() + dp_off();
        for (int a = 0; a < k_; ++a)
            for (int b = 0; b < k_; ++b) {
                out.a(a, b) = d[a * k_ + b];
                out.ap(a, b) = dp[a * k_ + b];
            }
        if (with_c_) {
            out.c = Mat(k_, k_);
            out.cp = Mat(k_, k_);
            const double* c = y.data() + c_off();
            const double* cp = y.data() + cp_off();
            for (int a = 0; a < k_; ++a)
                for (int b = 0; b < k_; ++b) {
                    out.c(a, b) = c[a * k_ + b];
                    out.cp(a, b) = cp[a * k_ + b];
                }
        }
    }

  private:
    void gamma_contract(const double* a, const double* b, double* out) const {
        for (int kk = 0; kk < n_; ++kk) {
            double s = 0.0;
            for (int i = 0; i < n_; ++i) {
                double si = 0.0;
                for (int j = 0; j < n_; ++j) si += gamma_(kk, i, j) * b[j];
                s += a[i] * si;
            }
            out[kk] = -s;
        }
    }

    // (Y, Yp) -> (Yp, -K Y) for a k x k block.
    void second_order_block(const double* yblk, const double* ypblk, double* dyblk,
                            double* dypblk) const {
        const int kk = k_;
        for (int i = 0; i < kk * kk; ++i) dyblk[i] = ypblk[i];
        for (int a = 0; a < kk; ++a)
            for (int b = 0; b < kk; ++b) {
                double s = 0.0;
                for (int c = 0; c < kk; ++c) s += kmat_(a, c) * yblk[c * kk + b];
                dypblk[a * kk + b] = -s;
            }
    }

    const ChartMetric& m_;
    int n_, k_;
    bool with_c_;
    Mat g_;
    geo::Ten3 gamma_;
    Mat mdir_;
    Mat kmat_;
    Vec me_;
    std::vector<double> kwork_;
};

}  // namespace

double JacobiTransport::det_a(size_t i) const { return la::det(samples[i].a); }

double JacobiTransport::theta(size_t i) const {
    const double r = samples[i].r;
    return la::det(samples[i].a) / std::pow(r, n - 1);
}

Mat JacobiTransport::full_dexp(size_t i) const {
    const JacobiSample& s = samples[i];
    Mat out(n, n);
    out(0, 0) = 1.0;
    for (int a = 0; a < n - 1; ++a)
        for (int b = 0; b < n - 1; ++b) out(a + 1, b + 1) = s.a(a, b) / s.r;
    return out;
}

JacobiTransport jacobi_transport(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                 std::span<const double> radii, const JacobiOptions& opt) {
    return jacobi_transport_framed(m, p, unit_dir, geo::complete_frame(m, p, unit_dir), radii,
                                   opt);
}

JacobiTransport jacobi_transport_framed(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                        const Mat& frame, std::span<const double> radii,
                                        const JacobiOptions& opt) {
    const int n = m.dim();
    const double speed = m.norm(p, unit_dir);
    if (std::fabs(speed - 1.0) > 1e-6)
        throw std::invalid_argument("jacobi_transport expects a unit direction");
    JacobiSystem sys(m, opt.cosine_block);
    std::vector<double> y;
    sys.initial_state(p, unit_dir, frame, y);

    JacobiTransport out;
    out.n = n;
    out.base_point = p;
    out.direction = unit_dir;
    out.samples.resize(radii.size());

    ode::Dopri5 solver(sys.state_size(),
                       [&sys](double s, const double* yy, double* dy) { sys.rhs(s, yy, dy); },
                       opt.tol.rtol, opt.tol.atol);
    const double rmax = radii.empty() ? 0.0 : radii.back();
    solver.integrate(y, 0.0, rmax, radii, [&](size_t i, const std::vector<double>& yy) {
        sys.unpack(radii[i], yy, out.samples[i]);
        const double d = la::det(out.samples[i].a);
        if (d < opt.conjugate_guard * std::pow(radii[i], n - 1))
            throw geo::ConjugatePointError(radii[i]);
    });
    return out;
}

double theta(const ChartMetric& m, const TangentVector& v, const JacobiOptions& opt) {
    const double r = v.norm;
    if (r <= 0.0) throw std::invalid_argument("theta needs v != 0");
    Vec u(v.components.size());
    for (size_t i = 0; i < u.size(); ++i) u[i] = v.components[i] / r;
    const double radii[1] = {r};
    JacobiTransport jt = jacobi_transport(m, v.point, u, radii, opt);
    return jt.theta(0);
}

TangentVector geodesic_involution(const ChartMetric& m, const TangentVector& v,
                                  geo::OdeTolerances tol) {
    geo::GeodesicState end = geo::integrate_geodesic(m, v.point, v.components, 1.0, tol);
    Vec back(end.velocity.size());
    for (size_t i = 0; i < back.size(); ++i) back[i] = -end.velocity[i];
    return TangentVector::make(m, end.position, back);
}

double sphere_mean_curvature(const ChartMetric& m, const TangentVector& v,
                             const JacobiOptions& opt) {
    const double r = v.norm;
    Vec u(v.components.size());
    for (size_t i = 0; i < u.size(); ++i) u[i] = v.components[i] / r;
    const double radii[1] = {r};
    JacobiTransport jt = jacobi_transport(m, v.point, u, radii, opt);
    const Mat& a = jt.samples[0].a;
    const Mat& ap = jt.samples[0].ap;
    la::Lu lu = la::lu_factor(a);
    if (lu.singular) throw geo::ConjugatePointError(r);
    const Mat ainv = la::lu_solve_mat(lu, Mat::identity(a.rows()));
    return -la::trace(ap * ainv);
}

double sphere_mean_curvature_radial(const ChartMetric& m, const TangentVector& v,
                                    const JacobiOptions& opt) {
    const int n = m.dim();
    const double r = v.norm;
    Vec u(v.components.size());
    for (size_t i = 0; i < u.size(); ++i) u[i] = v.components[i] / r;
    const double h = 1e-3 * r;
    const double radii[5] = {r - 2 * h, r - h, r, r + h, r + 2 * h};
    JacobiTransport jt = jacobi_transport(m, v.point, u, radii, opt);
    double th[5];
    for (int i = 0; i < 5; ++i) th[i] = jt.theta(i);
    const double dtheta = (-th[4] + 8 * th[3] - 8 * th[1] + th[0]) / (12 * h);
    return -(n - 1) / r - dtheta / th[2];
}

BallVolumes ball_volumes(const ChartMetric& m, const Vec& p, const Vec& u, double r,
                         const rules::SphereRule& rule, int radial_order,
                         const JacobiOptions& opt) {
    const int n = m.dim();
    if (rule.dim != n) throw std::invalid_argument("ball_volumes: rule dimension mismatch");
    const Mat basis = m.orthonormal_basis(p);
    const Mat g = m.metric_at(p);
    // Components of u in the orthonormal basis: uhat = B^T g u.
    Vec gu = la::matvec(g, u);
    Vec uhat = la::matvec(basis.transposed(), gu);
    const double un = la::norm2(uhat);
    for (double& c : uhat) c /= un;

    Vec rho, wr;
    rules::gauss_legendre(radial_order, rho, wr);
    std::vector<double> sample_r(radial_order + 1);
    for (int j = 0; j < radial_order; ++j) sample_r[j] = 0.5 * r * (rho[j] + 1.0);
    sample_r[radial_order] = r;

    const size_t nn = rule.size();
    std::vector<double> area_terms(nn, 0.0), ball_terms(nn, 0.0);
    std::vector<double> half_terms(nn, 0.0), half_op_terms(nn, 0.0);
    std::vector<int> conj_dirs;
    std::mutex conj_mu;

    parallel_for(nn, [&](size_t i) {
        Vec dir = la::matvec(basis, rule.nodes[i]);
        JacobiTransport jt;
        try {
            jt = jacobi_transport(m, p, dir, sample_r, opt);
        } catch (const geo::ConjugatePointError&) {
            std::lock_guard<std::mutex> lk(conj_mu);
            conj_dirs.push_back(static_cast<int>(i));
            return;
        }
        std::vector<double> radial(radial_order);
        for (int j = 0; j < radial_order; ++j) radial[j] = wr[j] * jt.det_a(j);
        const double shell = 0.5 * r * pairwise_sum(radial);  // int_0^r det A
        const double w = rule.weights[i];
        area_terms[i] = w * jt.det_a(radial_order);
        ball_terms[i] = w * shell;
        const double c = la::dot(rule.nodes[i], uhat);
        if (c > 1e-13) {
            half_terms[i] = ball_terms[i];
        } else if (c >= -1e-13) {
            half_terms[i] = 0.5 * ball_terms[i];
            half_op_terms[i] = 0.5 * ball_terms[i];
        } else {
            half_op_terms[i] = ball_terms[i];
        }
    });
    if (!conj_dirs.empty()) {
        std::sort(conj_dirs.begin(), conj_dirs.end());
        std::ostringstream os;
        os << "conjugate point inside radius " << r << " along " << conj_dirs.size()
           << " quadrature direction(s), node indices:";
        for (size_t k = 0; k < conj_dirs.size() && k < 8; ++k) os << " " << conj_dirs[k];
        if (conj_dirs.size() > 8) os << " ...";
        throw geo::ConjugatePointError(r, os.str());
    }

    BallVolumes out;
    out.radius = r;
    out.sphere_area = pairwise_sum(area_terms);
    out.ball_volume = pairwise_sum(ball_terms);
    out.half_ball = pairwise_sum(half_terms);
    out.half_ball_opposite = pairwise_sum(half_op_terms);
    return out;
}

DatriReport datri_checks(const ChartMetric& m, const DatriOptions& opt) {
    const int n = m.dim();
    DatriReport rep;
    Rng rng(opt.seed);
    const rules::SphereRule rule = rules::build_rule(n, opt.rule_level);

    // Half-ball homogeneity.
    std::vector<std::vector<double>> per_radius(opt.radii.size());
    bool first_sample = true;
    if (opt.check_half_ball)
    for (const Vec& p : opt.base_points) {
        const Mat basis = m.orthonormal_basis(p);
        for (int d = 0; d < opt.directions_per_point; ++d) {
            Vec u = la::matvec(basis, rng.unit_vector(n));
            for (size_t k = 0; k < opt.radii.size(); ++k) {
                BallVolumes bv = ball_volumes(m, p, u, opt.radii[k], rule, opt.radial_order);
                per_radius[k].push_back(bv.half_ball);
                rep.half_ball_values.push_back(bv.half_ball);
                if (first_sample) {
                    // Error estimate: same integral on a coarser rule.
                    const rules::SphereRule coarse =
                        rules::build_rule(n, std::max(2, opt.rule_level - 2));
                    BallVolumes bv2 = ball_volumes(m, p, u, opt.radii[k], coarse,
                                                   std::max(6, opt.radial_order / 2));
                    rep.half_ball_error_estimate =
                        std::fabs(bv.half_ball - bv2.half_ball) + 1e-9 * bv.ball_volume;
                    first_sample = false;
                }
            }
        }
    }
    for (const auto& vals : per_radius) {
        if (vals.empty()) continue;
        double mean = pairwise_sum(vals) / vals.size();
        for (double v : vals)
            rep.half_ball_defect = std::max(rep.half_ball_defect, std::fabs(v - mean));
    }

    // First-integral check: theta along the geodesic flow.
    rep.first_integral_error_estimate = 0.0;
    if (opt.check_first_integral)
    for (const Vec& p : opt.base_points) {
        const Mat basis = m.orthonormal_basis(p);
        for (int d = 0; d < opt.directions_per_point; ++d) {
            Vec u = la::matvec(basis, rng.unit_vector(n));
            std::vector<double> ts(opt.t_samples);
            for (int l = 0; l < opt.t_samples; ++l)
                ts[l] = opt.geodesic_length * l / (opt.t_samples - 1);
            std::vector<geo::GeodesicState> states(opt.t_samples);
            geo::integrate_geodesic_sampled(
                m, p, u, opt.geodesic_length, ts,
                [&](size_t i, const geo::GeodesicState& st) { states[i] = st; });
            for (double s : opt.speeds) {
                double lo = 1e300, hi = -1e300;
                for (const auto& st : states) {
                    Vec scaled(st.velocity.size());
                    for (size_t i = 0; i < scaled.size(); ++i) scaled[i] = s * st.velocity[i];
                    const double th =
                        theta(m, TangentVector::make(m, st.position, scaled));
                    lo = std::min(lo, th);
                    hi = std::max(hi, th);
                    rep.first_integral_error_estimate =
                        std::max(rep.first_integral_error_estimate, 2e-8 * th);
                }
                rep.first_integral_defect = std::max(rep.first_integral_defect, hi - lo);
            }
        }
    }

    if (opt.check_involution)
    for (const Vec& p : opt.base_points) {
        const Mat basis = m.orthonormal_basis(p);
        for (int d = 0; d < opt.directions_per_point; ++d) {
            Vec u = la::matvec(basis, rng.unit_vector(n));
            for (double s : opt.speeds) {
                Vec v(n);
                for (int i = 0; i < n; ++i) v[i] = s * u[i];
                TangentVector tv = TangentVector::make(m, p, v);
                const double th = theta(m, tv);
                const double th_inv = theta(m, geodesic_involution(m, tv));
                rep.involution_defect =
                    std::max(rep.involution_defect, std::fabs(th_inv - th) / th);
            }
        }
    }
    return rep;
}

}  // namespace tubelab::density
