#include "tubelab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tubelab::spaces {

using geo::CurvatureData;
using geo::MetricField;
using geo::Ten3;
using geo::Ten4;

namespace {

// ---------------------------------------------------------------- //
// Conformally flat space forms: g = phi(x) delta with
// phi = (1 + K|x|^2/4)^(-2). K = 0 is Euclidean space, K > 0 the round
// sphere without its antipode, K < 0 the Poincare ball.
class ConformalSpaceForm : public geo::MetricField {
  public:
    ConformalSpaceForm(int n, double k) : MetricField(n), k_(k) {}

    double sectional() const { return k_; }

    void metric(const double* x, Mat& g) const override {
        const double phi = factor(x);
        g = Mat(n_, n_);
        for (int i = 0; i < n_; ++i) g(i, i) = phi;
    }

    void dmetric(const double* x, Ten3& dg) const override {
        dg = Ten3(n_);
        const double a = base(x);
        const double a3 = 1.0 / (a * a * a);
        for (int m = 0; m < n_; ++m) {
            const double dphi = -k_ * x[m] * a3;
            for (int i = 0; i < n_; ++i) dg(m, i, i) = dphi;
        }
    }

    void d2metric(const double* x, Ten4& d2g) const override {
        d2g = Ten4(n_);
        const double a = base(x);
        const double a3 = 1.0 / (a * a * a), a4 = a3 / a;
        for (int m = 0; m < n_; ++m)
            for (int l = 0; l < n_; ++l) {
                const double dd =
                    -k_ * (m == l ? 1.0 : 0.0) * a3 + 1.5 * k_ * k_ * x[m] * x[l] * a4;
                for (int i = 0; i < n_; ++i) d2g(m, l, i, i) = dd;
            }
    }

    bool analytic_derivatives() const override { return true; }

    void directional_curvature(const double* x, const double* u, Mat& m) const override {
        m = Mat(n_, n_);
        if (k_ == 0.0) return;
        const double phi = factor(x);
        double uu = 0.0;
        for (int i = 0; i < n_; ++i) uu += u[i] * u[i];
        uu *= phi;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                m(i, j) = k_ * (uu * (i == j ? 1.0 : 0.0) - u[i] * phi * u[j]);
    }

    double scalar_curvature(const double*) const override { return k_ * n_ * (n_ - 1); }

    void curvature(const double* x, CurvatureData& out) const override {
        Mat g;
        metric(x, g);
        out.riemann = Ten4(n_);
        for (int l = 0; l < n_; ++l)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    for (int k = 0; k < n_; ++k)
                        out.riemann(l, i, j, k) =
                            k_ * ((i == l ? 1.0 : 0.0) * g(j, k) - (j == l ? 1.0 : 0.0) * g(i, k));
        out.ricci = (k_ * (n_ - 1)) * g;
        out.scalar = k_ * n_ * (n_ - 1);
        out.noise_estimate = 0.0;
    }

  private:
    double base(const double* x) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += x[i] * x[i];
        return 1.0 + 0.25 * k_ * s;
    }
    double factor(const double* x) const {
        const double a = base(x);
        return 1.0 / (a * a);
    }

    double k_;
};

// ---------------------------------------------------------------- //
// Graph hypersurface metric g = delta + grad f grad f^T for a height
// function with derivatives supplied to third order.
struct HeightFunction {
    std::function<double(const double*)> f;
    std::function<Vec(const double*)> grad;
    std::function<Mat(const double*)> hess;
    std::function<Ten3(const double*)> third;
};

class GraphMetric : public geo::MetricField {
  public:
    GraphMetric(int n, HeightFunction h) : MetricField(n), h_(std::move(h)) {}

    void metric(const double* x, Mat& g) const override {
        const Vec df = h_.grad(x);
        g = Mat(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) g(i, j) = (i == j ? 1.0 : 0.0) + df[i] * df[j];
    }

    void dmetric(const double* x, Ten3& dg) const override {
        const Vec df = h_.grad(x);
        const Mat d2 = h_.hess(x);
        dg = Ten3(n_);
        for (int k = 0; k < n_; ++k)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) dg(k, i, j) = d2(i, k) * df[j] + df[i] * d2(j, k);
    }

    void d2metric(const double* x, Ten4& d2g) const override {
        const Vec df = h_.grad(x);
        const Mat d2 = h_.hess(x);
        const Ten3 d3 = h_.third(x);
        d2g = Ten4(n_);
        for (int m = 0; m < n_; ++m)
            for (int k = 0; k < n_; ++k)
                for (int i = 0; i < n_; ++i)
                    for (int j = 0; j < n_; ++j)
                        d2g(m, k, i, j) = d3(i, k, m) * df[j] + d2(i, k) * d2(j, m) +
                                          d2(i, m) * d2(j, k) + df[i] * d3(j, k, m);
    }

    bool analytic_derivatives() const override { return true; }

  private:
    HeightFunction h_;
};

// Upper half of the ellipsoid sum x_i^2/a_i^2 + z^2/c^2 = 1 as a graph
// z = f(x). With w = 1 - sum x_i^2/a_i^2 (quadratic, so third
// derivatives of w vanish):
//   f = c w^(1/2)
//   f_i = (c/2) w^(-1/2) w_i
//   f_ij = (c/2) [w^(-1/2) w_ij - (1/2) w^(-3/2) w_i w_j]
//   f_ijk = (c/2) [-(1/2) w^(-3/2) (w_ij w_k + w_ik w_j + w_jk w_i)
//                  + (3/4) w^(-5/2) w_i w_j w_k]
HeightFunction ellipsoid_height(std::vector<double> axes) {
    const int n = static_cast<int>(axes.size()) - 1;
    const double c = axes.back();
    std::vector<double> inv2(n);
    for (int i = 0; i < n; ++i) inv2[i] = 1.0 / (axes[i] * axes[i]);
    auto wfun = [n, inv2](const double* x) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) w -= x[i] * x[i] * inv2[i];
        return w;
    };
    HeightFunction h;
    h.f = [c, wfun](const double* x) { return c * std::sqrt(wfun(x)); };
    h.grad = [n, c, inv2, wfun](const double* x) {
        const double w = wfun(x);
        const double s = 0.5 * c / std::sqrt(w);
        Vec g(n);
        for (int i = 0; i < n; ++i) g[i] = s * (-2.0 * x[i] * inv2[i]);
        return g;
    };
    h.hess = [n, c, inv2, wfun](const double* x) {
        const double w = wfun(x);
        const double wm12 = 1.0 / std::sqrt(w), wm32 = wm12 / w;
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double wij = (i == j) ? -2.0 * inv2[i] : 0.0;
                const double wi = -2.0 * x[i] * inv2[i], wj = -2.0 * x[j] * inv2[j];
                m(i, j) = 0.5 * c * (wm12 * wij - 0.5 * wm32 * wi * wj);
            }
        return m;
    };
    h.third = [n, c, inv2, wfun](const double* x) {
        const double w = wfun(x);
        const double wm32 = 1.0 / (w * std::sqrt(w)), wm52 = wm32 / w;
        Ten3 t(n);
        auto wi = [&](int i) { return -2.0 * x[i] * inv2[i]; };
        auto wij = [&](int i, int j) { return (i == j) ? -2.0 * inv2[i] : 0.0; };
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    t(i, j, k) = 0.5 * c *
                                 (-0.5 * wm32 *
                                      (wij(i, j) * wi(k) + wij(i, k) * wi(j) + wij(j, k) * wi(i)) +
                                  0.75 * wm52 * wi(i) * wi(j) * wi(k));
        return t;
    };
    return h;
}

// ---------------------------------------------------------------- //
// Riemannian product of two metric fields (block diagonal).
class ProductMetric : public geo::MetricField {
  public:
    ProductMetric(std::shared_ptr<const MetricField> a, std::shared_ptr<const MetricField> b)
        : MetricField(a->dim() + b->dim()), a_(std::move(a)), b_(std::move(b)), na_(a_->dim()) {}

    void metric(const double* x, Mat& g) const override {
        Mat ga, gb;
        a_->metric(x, ga);
        b_->metric(x + na_, gb);
        g = Mat(n_, n_);
        paste(ga, gb, g);
    }

    void dmetric(const double* x, Ten3& dg) const override {
        Ten3 da, db;
        a_->dmetric(x, da);
        b_->dmetric(x + na_, db);
        dg = Ten3(n_);
        for (int k = 0; k < na_; ++k)
            for (int i = 0; i < na_; ++i)
                for (int j = 0; j < na_; ++j) dg(k, i, j) = da(k, i, j);
        const int nb = n_ - na_;
        for (int k = 0; k < nb; ++k)
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) dg(na_ + k, na_ + i, na_ + j) = db(k, i, j);
    }

    void d2metric(const double* x, Ten4& d2g) const override {
        Ten4 da, db;
        a_->d2metric(x, da);
        b_->d2metric(x + na_, db);
        d2g = Ten4(n_);
        for (int m = 0; m < na_; ++m)
            for (int k = 0; k < na_; ++k)
                for (int i = 0; i < na_; ++i)
                    for (int j = 0; j < na_; ++j) d2g(m, k, i, j) = da(m, k, i, j);
        const int nb = n_ - na_;
        for (int m = 0; m < nb; ++m)
            for (int k = 0; k < nb; ++k)
                for (int i = 0; i < nb; ++i)
                    for (int j = 0; j < nb; ++j)
                        d2g(na_ + m, na_ + k, na_ + i, na_ + j) = db(m, k, i, j);
    }

    bool analytic_derivatives() const override {
        return a_->analytic_derivatives() && b_->analytic_derivatives();
    }

    void christoffel(const double* x, Ten3& gamma) const override {
        Ten3 ga, gb;
        a_->christoffel(x, ga);
        b_->christoffel(x + na_, gb);
        gamma = Ten3(n_);
        for (int k = 0; k < na_; ++k)
            for (int i = 0; i < na_; ++i)
                for (int j = 0; j < na_; ++j) gamma(k, i, j) = ga(k, i, j);
        const int nb = n_ - na_;
        for (int k = 0; k < nb; ++k)
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j) gamma(na_ + k, na_ + i, na_ + j) = gb(k, i, j);
    }

    void directional_curvature(const double* x, const double* u, Mat& m) const override {
        Mat ma, mb;
        a_->directional_curvature(x, u, ma);
        b_->directional_curvature(x + na_, u + na_, mb);
        m = Mat(n_, n_);
        paste(ma, mb, m);
    }

    double scalar_curvature(const double* x) const override {
        return a_->scalar_curvature(x) + b_->scalar_curvature(x + na_);
    }

    void curvature(const double* x, CurvatureData& out) const override {
        CurvatureData ca, cb;
        a_->curvature(x, ca);
        b_->curvature(x + na_, cb);
        const int nb = n_ - na_;
        out.riemann = Ten4(n_);
        for (int l = 0; l < na_; ++l)
            for (int i = 0; i < na_; ++i)
                for (int j = 0; j < na_; ++j)
                    for (int k = 0; k < na_; ++k) out.riemann(l, i, j, k) = ca.riemann(l, i, j, k);
        for (int l = 0; l < nb; ++l)
            for (int i = 0; i < nb; ++i)
                for (int j = 0; j < nb; ++j)
                    for (int k = 0; k < nb; ++k)
                        out.riemann(na_ + l, na_ + i, na_ + j, na_ + k) = cb.riemann(l, i, j, k);
        out.ricci = Mat(n_, n_);
        paste(ca.ricci, cb.ricci, out.ricci);
        out.scalar = ca.scalar + cb.scalar;
        out.noise_estimate = std::max(ca.noise_estimate, cb.noise_estimate);
    }

  private:
    void paste(const Mat& a, const Mat& b, Mat& out) const {
        for (int i = 0; i < na_; ++i)
            for (int j = 0; j < na_; ++j) out(i, j) = a(i, j);
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j) out(na_ + i, na_ + j) = b(i, j);
    }

    std::shared_ptr<const MetricField> a_, b_;
    int na_;
};

// ---------------------------------------------------------------- //
// Damek-Ricci space in global coordinates (v, z, t) on R^(p+q+1).
// The left-invariant orthonormal coframe is
//   theta^i = e^(-t/2) dv_i
//   phi^a   = e^(-t) (dz_a - 1/2 <J_a v, dv>)
//   psi     = dt
// which gives the closed-form metric blocks implemented below. The
// curvature tensor has constant components in the left-invariant
// frame; the table is evaluated once at the origin (where frame and
// coordinate basis agree) and moved around by the frame maps.
class DamekRicciMetric : public geo::MetricField {
  public:
    DamekRicciMetric(int p, int q, std::vector<Mat> jmap)
        : MetricField(p + q + 1), p_(p), q_(q), j_(std::move(jmap)) {
        CurvatureData c;
        MetricField::curvature(origin().data(), c);
        frame_riemann_ = c.riemann;
        frame_ricci_ = c.ricci;
        scalar_ = c.scalar;
    }

    void metric(const double* x, Mat& g) const override {
        const double t = x[p_ + q_];
        const double et = std::exp(-t), e2t = et * et;
        std::vector<Vec> pv = jv(x);
        g = Mat(n_, n_);
        for (int i = 0; i < p_; ++i) {
            g(i, i) = et;
            for (int j = 0; j < p_; ++j) {
                double s = 0.0;
                for (int a = 0; a < q_; ++a) s += pv[a][i] * pv[a][j];
                g(i, j) += 0.25 * e2t * s;
            }
        }
        for (int a = 0; a < q_; ++a) {
            for (int i = 0; i < p_; ++i) {
                g(i, p_ + a) = -0.5 * e2t * pv[a][i];
                g(p_ + a, i) = g(i, p_ + a);
            }
            g(p_ + a, p_ + a) = e2t;
        }
        g(p_ + q_, p_ + q_) = 1.0;
    }

    void dmetric(const double* x, Ten3& dg) const override {
        const double t = x[p_ + q_];
        const double et = std::exp(-t), e2t = et * et;
        std::vector<Vec> pv = jv(x);
        dg = Ten3(n_);
        const int it = p_ + q_;
        // d/dv_k
        for (int k = 0; k < p_; ++k) {
            for (int i = 0; i < p_; ++i)
                for (int j = 0; j < p_; ++j) {
                    double s = 0.0;
                    for (int a = 0; a < q_; ++a)
                        s += j_[a](i, k) * pv[a][j] + pv[a][i] * j_[a](j, k);
                    dg(k, i, j) = 0.25 * e2t * s;
                }
            for (int a = 0; a < q_; ++a)
                for (int i = 0; i < p_; ++i) {
                    dg(k, i, p_ + a) = -0.5 * e2t * j_[a](i, k);
                    dg(k, p_ + a, i) = dg(k, i, p_ + a);
                }
        }
        // d/dt
        for (int i = 0; i < p_; ++i) {
            dg(it, i, i) = -et;
            for (int j = 0; j < p_; ++j) {
                double s = 0.0;
                for (int a = 0; a < q_; ++a) s += pv[a][i] * pv[a][j];
                dg(it, i, j) += -0.5 * e2t * s;
            }
        }
        for (int a = 0; a < q_; ++a) {
            for (int i = 0; i < p_; ++i) {
                dg(it, i, p_ + a) = e2t * pv[a][i];
                dg(it, p_ + a, i) = dg(it, i, p_ + a);
            }
            dg(it, p_ + a, p_ + a) = -2.0 * e2t;
        }
    }

    void d2metric(const double* x, Ten4& d2g) const override {
        const double t = x[p_ + q_];
        const double et = std::exp(-t), e2t = et * et;
        std::vector<Vec> pv = jv(x);
        d2g = Ten4(n_);
        const int it = p_ + q_;
        // v_k v_l
        for (int k = 0; k < p_; ++k)
            for (int l = 0; l < p_; ++l)
                for (int i = 0; i < p_; ++i)
                    for (int j = 0; j < p_; ++j) {
                        double s = 0.0;
                        for (int a = 0; a < q_; ++a)
                            s += j_[a](i, k) * j_[a](j, l) + j_[a](i, l) * j_[a](j, k);
                        d2g(k, l, i, j) = 0.25 * e2t * s;
                    }
        // v_k t
        for (int k = 0; k < p_; ++k) {
            for (int i = 0; i < p_; ++i)
                for (int j = 0; j < p_; ++j) {
                    double s = 0.0;
                    for (int a = 0; a < q_; ++a)
                        s += j_[a](i, k) * pv[a][j] + pv[a][i] * j_[a](j, k);
                    d2g(k, it, i, j) = -0.5 * e2t * s;
                    d2g(it, k, i, j) = d2g(k, it, i, j);
                }
            for (int a = 0; a < q_; ++a)
                for (int i = 0; i < p_; ++i) {
                    const double val = e2t * j_[a](i, k);
                    d2g(k, it, i, p_ + a) = val;
                    d2g(k, it, p_ + a, i) = val;
                    d2g(it, k, i, p_ + a) = val;
                    d2g(it, k, p_ + a, i) = val;
                }
        }
        // t t
        for (int i = 0; i < p_; ++i) {
            d2g(it, it, i, i) = et;
            for (int j = 0; j < p_; ++j) {
                double s = 0.0;
                for (int a = 0; a < q_; ++a) s += pv[a][i] * pv[a][j];
                d2g(it, it, i, j) += e2t * s;
            }
        }
        for (int a = 0; a < q_; ++a) {
            for (int i = 0; i < p_; ++i) {
                d2g(it, it, i, p_ + a) = -2.0 * e2t * pv[a][i];
                d2g(it, it, p_ + a, i) = d2g(it, it, i, p_ + a);
            }
            d2g(it, it, p_ + a, p_ + a) = 4.0 * e2t;
        }
    }

    bool analytic_derivatives() const override { return true; }

    // Frame matrix (columns = left-invariant orthonormal frame) and its
    // inverse at x.
    Mat frame(const double* x) const {
        const double t = x[p_ + q_];
        const double eh = std::exp(0.5 * t), e1 = std::exp(t);
        std::vector<Vec> pv = jv(x);
        Mat e(n_, n_);
        for (int i = 0; i < p_; ++i) {
            e(i, i) = eh;
            for (int a = 0; a < q_; ++a) e(p_ + a, i) = 0.5 * eh * pv[a][i];
        }
        for (int a = 0; a < q_; ++a) e(p_ + a, p_ + a) = e1;
        e(p_ + q_, p_ + q_) = 1.0;
        return e;
    }

    Mat coframe(const double* x) const {
        const double t = x[p_ + q_];
        const double eh = std::exp(-0.5 * t), e1 = std::exp(-t);
        std::vector<Vec> pv = jv(x);
        Mat th(n_, n_);
        for (int i = 0; i < p_; ++i) th(i, i) = eh;
        for (int a = 0; a < q_; ++a) {
            for (int i = 0; i < p_; ++i) th(p_ + a, i) = -0.5 * e1 * pv[a][i];
            th(p_ + a, p_ + a) = e1;
        }
        th(p_ + q_, p_ + q_) = 1.0;
        return th;
    }

    void directional_curvature(const double* x, const double* u, Mat& m) const override {
        const Mat th = coframe(x);
        const Mat e = frame(x);
        Vec uf = la::matvec(th, std::span<const double>(u, u + n_));
        // P^d_a = Rhat^d_{abc} uf^b uf^c
        Mat pmat(n_, n_);
        for (int d = 0; d < n_; ++d)
            for (int a = 0; a < n_; ++a) {
                double s = 0.0;
                for (int b = 0; b < n_; ++b) {
                    if (uf[b] == 0.0) continue;
                    double sb = 0.0;
                    for (int c = 0; c < n_; ++c) sb += frame_riemann_(d, a, b, c) * uf[c];
                    s += uf[b] * sb;
                }
                pmat(d, a) = s;
            }
        m = e * pmat * th;
    }

    double scalar_curvature(const double*) const override { return scalar_; }

    void curvature(const double* x, CurvatureData& out) const override {
        const Mat th = coframe(x);
        const Mat e = frame(x);
        out.riemann = Ten4(n_);
        // R^l_{ijk}(x) = E^l_d Rhat^d_{abc} Th^a_i Th^b_j Th^c_k
        for (int l = 0; l < n_; ++l)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    for (int k = 0; k < n_; ++k) {
                        double s = 0.0;
                        for (int d = 0; d < n_; ++d)
                            for (int a = 0; a < n_; ++a)
                                for (int b = 0; b < n_; ++b)
                                    for (int c = 0; c < n_; ++c)
                                        s += e(l, d) * frame_riemann_(d, a, b, c) * th(a, i) *
                                             th(b, j) * th(c, k);
                        out.riemann(l, i, j, k) = s;
                    }
        out.ricci = th.transposed() * frame_ricci_ * th;
        out.scalar = scalar_;
        out.noise_estimate = 0.0;
    }

  private:
    Vec origin() const { return Vec(n_, 0.0); }

    // P_a = J_a v for each center direction.
    std::vector<Vec> jv(const double* x) const {
        std::vector<Vec> pv(q_, Vec(p_, 0.0));
        for (int a = 0; a < q_; ++a)
            for (int i = 0; i < p_; ++i) {
                double s = 0.0;
                for (int k = 0; k < p_; ++k) s += j_[a](i, k) * x[k];
                pv[a][i] = s;
            }
        return pv;
    }

    int p_, q_;
    std::vector<Mat> j_;
    Ten4 frame_riemann_;
    Mat frame_ricci_;
    double scalar_ = 0.0;
};

// ---------------------------------------------------------------- //
// Generic chart metric from a plain matrix closure (FD derivatives).
class ClosureMetric : public geo::MetricField {
  public:
    ClosureMetric(int n, std::function<Mat(const double*)> g) : MetricField(n), g_(std::move(g)) {}
    void metric(const double* x, Mat& g) const override { g = g_(x); }

  private:
    std::function<Mat(const double*)> g_;
};

geo::ChartDomain box_domain(int n, double half_width,
                            std::function<bool(const double*)> pred = {}) {
    geo::ChartDomain d;
    d.lo.assign(n, -half_width);
    d.hi.assign(n, half_width);
    d.predicate = std::move(pred);
    return d;
}

}  // namespace

std::string SpaceSpec::name() const {
    std::ostringstream os;
    switch (kind) {
        case SpaceKind::euclidean:
            os << "r" << dim;
            break;
        case SpaceKind::sphere:
            os << "s" << dim;
            if (curvature != 1.0) os << "(K=" << curvature << ")";
            break;
        case SpaceKind::hyperbolic:
            os << "h" << dim;
            if (curvature != -1.0) os << "(K=" << curvature << ")";
            break;
        case SpaceKind::product:
            os << factors[0].name() << "x" << factors[1].name();
            break;
        case SpaceKind::damek_ricci:
            os << "dr_p" << p << "_q" << q;
            break;
        case SpaceKind::ellipsoid: {
            os << "ellipsoid(";
            for (size_t i = 0; i < semi_axes.size(); ++i)
                os << (i ? "x" : "") << semi_axes[i];
            os << ")";
            break;
        }
        case SpaceKind::generic:
            os << "generic:" << generic_name;
            break;
    }
    return os.str();
}

SpaceSpec SpaceSpec::euclidean_space(int n) {
    SpaceSpec s;
    s.kind = SpaceKind::euclidean;
    s.dim = n;
    return s;
}
SpaceSpec SpaceSpec::sphere_space(int n, double k) {
    SpaceSpec s;
    s.kind = SpaceKind::sphere;
    s.dim = n;
    s.curvature = k;
    return s;
}
SpaceSpec SpaceSpec::hyperbolic_space(int n, double k) {
    SpaceSpec s;
    s.kind = SpaceKind::hyperbolic;
    s.dim = n;
    s.curvature = k;
    return s;
}
SpaceSpec SpaceSpec::product_space(SpaceSpec a, SpaceSpec b) {
    SpaceSpec s;
    s.kind = SpaceKind::product;
    s.factors = {std::move(a), std::move(b)};
    return s;
}
SpaceSpec SpaceSpec::damek_ricci_space(int p, int q) {
    SpaceSpec s;
    s.kind = SpaceKind::damek_ricci;
    s.p = p;
    s.q = q;
    return s;
}
SpaceSpec SpaceSpec::ellipsoid_surface(std::vector<double> semi_axes) {
    SpaceSpec s;
    s.kind = SpaceKind::ellipsoid;
    s.semi_axes = std::move(semi_axes);
    return s;
}
SpaceSpec SpaceSpec::generic_space(std::string registered_name) {
    SpaceSpec s;
    s.kind = SpaceKind::generic;
    s.generic_name = std::move(registered_name);
    return s;
}

std::vector<Mat> standard_jmap(int p, int q) {
    if (q == 1) {
        if (p < 2 || p % 2 != 0)
            throw AlgebraError("damek_ricci: q=1 requires even p >= 2");
        Mat j(p, p);
        for (int b = 0; b < p; b += 2) {
            j(b, b + 1) = -1.0;
            j(b + 1, b) = 1.0;
        }
        return {j};
    }
    if (q == 3) {
        if (p < 4 || p % 4 != 0)
            throw AlgebraError("damek_ricci: q=3 requires p divisible by 4");
        Mat j1(p, p), j2(p, p), j3(p, p);
        for (int b = 0; b < p; b += 4) {
            // Left multiplication by i, j, k on each quaternion block.
            j1(b + 0, b + 1) = -1; j1(b + 1, b + 0) = 1;
            j1(b + 2, b + 3) = -1; j1(b + 3, b + 2) = 1;
            j2(b + 0, b + 2) = -1; j2(b + 2, b + 0) = 1;
            j2(b + 1, b + 3) = 1;  j2(b + 3, b + 1) = -1;
            j3(b + 0, b + 3) = -1; j3(b + 3, b + 0) = 1;
            j3(b + 1, b + 2) = -1; j3(b + 2, b + 1) = 1;
        }
        return {j1, j2, j3};
    }
    throw AlgebraError("damek_ricci: shipped J-maps cover q=1 and q=3 only");
}

double clifford_residual(const std::vector<Mat>& jmap) {
    const int q = static_cast<int>(jmap.size());
    const int p = jmap[0].rows();
    double worst = 0.0;
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
            const Mat anti = jmap[a] * jmap[b] + jmap[b] * jmap[a];
            const double target = (a == b) ? -2.0 : 0.0;
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) {
                    const double want = (i == j) ? target : 0.0;
                    worst = std::max(worst, std::fabs(anti(i, j) - want));
                }
        }
    return worst;
}

std::vector<std::string> registered_generic_metrics() {
    return {"hyperbolic-half-plane", "sphere-polar"};
}

ChartMetric make_space(const SpaceSpec& spec) {
    switch (spec.kind) {
        case SpaceKind::euclidean: {
            auto f = std::make_shared<ConformalSpaceForm>(spec.dim, 0.0);
            return ChartMetric(f, box_domain(spec.dim, 1e3), spec.name(), 50.0);
        }
        case SpaceKind::sphere: {
            if (spec.curvature <= 0.0) throw ParameterError("sphere requires K > 0");
            const double rk = std::sqrt(spec.curvature);
            auto f = std::make_shared<ConformalSpaceForm>(spec.dim, spec.curvature);
            // Stereographic chart misses only the antipode; keep a box
            // well clear of it.
            const double half = 2.0 / rk * std::tan(0.49 * geo::kPi);
            return ChartMetric(f, box_domain(spec.dim, half), spec.name(),
                               0.95 * geo::kPi / rk);
        }
        case SpaceKind::hyperbolic: {
            if (spec.curvature >= 0.0) throw ParameterError("hyperbolic requires K < 0");
            const double kappa = std::sqrt(-spec.curvature);
            const double ball = 2.0 / kappa;
            auto f = std::make_shared<ConformalSpaceForm>(spec.dim, spec.curvature);
            auto pred = [ball, n = spec.dim](const double* x) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += x[i] * x[i];
                return s < 0.999998 * ball * ball;
            };
            return ChartMetric(f, box_domain(spec.dim, ball, pred), spec.name(), 8.0 / kappa);
        }
        case SpaceKind::product: {
            if (spec.factors.size() != 2) throw ParameterError("product requires two factors");
            ChartMetric a = make_space(spec.factors[0]);
            ChartMetric b = make_space(spec.factors[1]);
            auto f = std::make_shared<ProductMetric>(a.field_ptr(), b.field_ptr());
            geo::ChartDomain d;
            d.lo = a.domain().lo;
            d.hi = a.domain().hi;
            d.lo.insert(d.lo.end(), b.domain().lo.begin(), b.domain().lo.end());
            d.hi.insert(d.hi.end(), b.domain().hi.begin(), b.domain().hi.end());
            d.predicate = [da = a.domain(), db = b.domain(),
                           na = a.dim()](const double* x) {
                return da.contains(x) && db.contains(x + na);
            };
            return ChartMetric(f, d, spec.name(), std::min(a.safe_radius(), b.safe_radius()));
        }
        case SpaceKind::damek_ricci: {
            std::vector<Mat> jmap = spec.jmap.empty() ? standard_jmap(spec.p, spec.q) : spec.jmap;
            if (static_cast<int>(jmap.size()) != spec.q || jmap[0].rows() != spec.p)
                throw AlgebraError("damek_ricci: J-map table shape mismatch");
            const double resid = clifford_residual(jmap);
            if (resid > 1e-12)
                throw AlgebraError("damek_ricci: J-map violates the Clifford relation");
            auto f = std::make_shared<DamekRicciMetric>(spec.p, spec.q, std::move(jmap));
            return ChartMetric(f, box_domain(spec.p + spec.q + 1, 50.0), spec.name(), 6.0);
        }
        case SpaceKind::ellipsoid: {
            if (spec.semi_axes.size() < 3) throw ParameterError("ellipsoid needs >= 3 semi-axes");
            for (double a : spec.semi_axes)
                if (a <= 0.0) throw ParameterError("ellipsoid semi-axes must be positive");
            const int n = static_cast<int>(spec.semi_axes.size()) - 1;
            std::vector<double> axes = spec.semi_axes;
            auto f = std::make_shared<GraphMetric>(n, ellipsoid_height(axes));
            std::vector<double> inv2(n);
            for (int i = 0; i < n; ++i) inv2[i] = 1.0 / (axes[i] * axes[i]);
            auto pred = [inv2, n](const double* x) {
                double w = 1.0;
                for (int i = 0; i < n; ++i) w -= x[i] * x[i] * inv2[i];
                return w > 0.02;
            };
            return ChartMetric(f, box_domain(n, *std::max_element(axes.begin(), axes.end()), pred),
                               spec.name(), 1.2);
        }
        case SpaceKind::generic: {
            if (spec.generic_name == "hyperbolic-half-plane") {
                auto g = [](const double* x) {
                    Mat m(2, 2);
                    const double s = 1.0 / (x[1] * x[1]);
                    m(0, 0) = s;
                    m(1, 1) = s;
                    return m;
                };
                auto f = std::make_shared<ClosureMetric>(2, g);
                geo::ChartDomain d;
                d.lo = {-50.0, 0.05};
                d.hi = {50.0, 50.0};
                return ChartMetric(f, d, spec.name(), 3.0);
            }
            if (spec.generic_name == "sphere-polar") {
                auto g = [](const double* x) {
                    Mat m(2, 2);
                    m(0, 0) = 1.0;
                    m(1, 1) = std::sin(x[0]) * std::sin(x[0]);
                    return m;
                };
                auto f = std::make_shared<ClosureMetric>(2, g);
                geo::ChartDomain d;
                d.lo = {0.05, -8.0};
                d.hi = {geo::kPi - 0.05, 8.0};
                return ChartMetric(f, d, spec.name(), 1.0);
            }
            throw UnsupportedError("unknown generic metric: " + spec.generic_name);
        }
    }
    throw UnsupportedError("unknown space kind");
}

RadialProfile closed_form_profile(const SpaceSpec& spec) {
    RadialProfile prof;
    prof.provenance = RadialProfile::Provenance::closed_form;
    switch (spec.kind) {
        case SpaceKind::euclidean:
            prof.jet = [](double) { return Jet3(1.0); };
            prof.d2_at_zero = 0.0;
            return prof;
        case SpaceKind::sphere: {
            const double rk = std::sqrt(spec.curvature);
            const int nm1 = spec.dim - 1;
            prof.jet = [rk, nm1](double r) {
                Jet3 scaled{rk * r, rk, 0.0, 0.0};
                return pow(sinc(scaled), nm1);
            };
            prof.d2_at_zero = -nm1 * spec.curvature / 3.0;
            return prof;
        }
        case SpaceKind::hyperbolic: {
            const double kappa = std::sqrt(-spec.curvature);
            const int nm1 = spec.dim - 1;
            prof.jet = [kappa, nm1](double r) {
                Jet3 scaled{kappa * r, kappa, 0.0, 0.0};
                return pow(sinhc(scaled), nm1);
            };
            prof.d2_at_zero = -nm1 * spec.curvature / 3.0;
            return prof;
        }
        case SpaceKind::damek_ricci: {
            const int p = spec.p, q = spec.q;
            prof.jet = [p, q](double r) {
                Jet3 half{0.5 * r, 0.5, 0.0, 0.0};
                return pow(cosh(half), q) * pow(sinhc(half), p + q);
            };
            prof.d2_at_zero = q / 4.0 + (p + q) / 12.0;
            return prof;
        }
        default:
            throw UnsupportedError("closed_form_profile: space is not a harmonic built-in");
    }
}

}  // namespace tubelab::spaces
