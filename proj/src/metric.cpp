#include "tubelab/metric.hpp"

#include <cmath>

namespace tubelab::geo {

namespace {

// 4th-order central difference of a matrix-valued field.
template <class F>
void central4(const F& eval, const double* x, int n, int dir, double h, Mat& out) {
    Vec xp(x, x + n);
    Mat m1, m2, m3, m4;
    xp[dir] = x[dir] + 2 * h;
    eval(xp.data(), m1);
    xp[dir] = x[dir] + h;
    eval(xp.data(), m2);
    xp[dir] = x[dir] - h;
    eval(xp.data(), m3);
    xp[dir] = x[dir] - 2 * h;
    eval(xp.data(), m4);
    out = Mat(m1.rows(), m1.cols());
    const double inv = 1.0 / (12.0 * h);
    for (int i = 0; i < m1.rows(); ++i)
        for (int j = 0; j < m1.cols(); ++j)
            out(i, j) = (-m1(i, j) + 8.0 * m2(i, j) - 8.0 * m3(i, j) + m4(i, j)) * inv;
}

}  // namespace

double unit_ball_volume(int m) {
    return std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double unit_sphere_area(int m) { return m * unit_ball_volume(m); }

void MetricField::dmetric(const double* x, Ten3& dg) const {
    dg = Ten3(n_);
    Mat d;
    for (int k = 0; k < n_; ++k) {
        central4([this](const double* xx, Mat& g) { metric(xx, g); }, x, n_, k, fd_step_, d);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) dg(k, i, j) = d(i, j);
    }
}

void MetricField::d2metric(const double* x, Ten4& d2g) const {
    d2g = Ten4(n_);
    // Differences of dmetric with a larger step: second FD derivatives
    // lose about half the digits, the wider stencil recovers margin.
    const double h = std::sqrt(fd_step_) * 0.03;
    Vec xp(x, x + n_);
    Ten3 g1(n_), g2(n_), g3(n_), g4(n_);
    for (int m = 0; m < n_; ++m) {
        xp[m] = x[m] + 2 * h;
        dmetric(xp.data(), g1);
        xp[m] = x[m] + h;
        dmetric(xp.data(), g2);
        xp[m] = x[m] - h;
        dmetric(xp.data(), g3);
        xp[m] = x[m] - 2 * h;
        dmetric(xp.data(), g4);
        xp[m] = x[m];
        const double inv = 1.0 / (12.0 * h);
        for (int k = 0; k < n_; ++k)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    d2g(m, k, i, j) =
                        (-g1(k, i, j) + 8.0 * g2(k, i, j) - 8.0 * g3(k, i, j) + g4(k, i, j)) * inv;
    }
}

void MetricField::christoffel(const double* x, Ten3& gamma) const {
    Mat g;
    metric(x, g);
    Ten3 dg;
    dmetric(x, dg);
    la::Lu lu = la::lu_factor(g);
    if (lu.singular) throw MetricError("metric tensor is singular");
    Mat ginv = la::lu_solve_mat(lu, Mat::identity(n_));
    gamma = Ten3(n_);
    for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                double s = 0.0;
                for (int l = 0; l < n_; ++l)
                    s += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                gamma(k, i, j) = 0.5 * s;
                gamma(k, j, i) = 0.5 * s;
            }
}

void MetricField::dchristoffel(const double* x, Ten4& dgamma) const {
    Mat g;
    metric(x, g);
    Ten3 dg;
    dmetric(x, dg);
    Ten4 d2g;
    d2metric(x, d2g);
    Mat ginv = la::inverse(g);
    // d_m g^{kl} = -g^{ka} (d_m g_{ab}) g^{bl}
    Ten3 dginv(n_);
    for (int m = 0; m < n_; ++m)
        for (int k = 0; k < n_; ++k)
            for (int l = 0; l < n_; ++l) {
                double s = 0.0;
                for (int a = 0; a < n_; ++a)
                    for (int b = 0; b < n_; ++b) s += ginv(k, a) * dg(m, a, b) * ginv(b, l);
                dginv(m, k, l) = -s;
            }
    dgamma = Ten4(n_);
    for (int m = 0; m < n_; ++m)
        for (int k = 0; k < n_; ++k)
            for (int i = 0; i < n_; ++i)
                for (int j = i; j < n_; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n_; ++l) {
                        s += dginv(m, k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
                        s += ginv(k, l) *
                             (d2g(m, i, j, l) + d2g(m, j, i, l) - d2g(m, l, i, j));
                    }
                    dgamma(m, k, i, j) = 0.5 * s;
                    dgamma(m, k, j, i) = 0.5 * s;
                }
}

void MetricField::directional_curvature(const double* x, const double* u, Mat& m) const {
    // R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
    //           + Gamma^l_{ia} Gamma^a_{jk} - Gamma^l_{ja} Gamma^a_{ik}
    // contracted with u^j u^k.
    Ten3 gamma;
    christoffel(x, gamma);
    Ten4 dgamma;
    dchristoffel(x, dgamma);
    m = Mat(n_, n_);
    // t^a = Gamma^a_{jk} u^j u^k,  w^l_i = Gamma^l_{ia} t^a
    Vec t(n_, 0.0);
    for (int a = 0; a < n_; ++a) {
        double s = 0.0;
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) s += gamma(a, j, k) * u[j] * u[k];
        t[a] = s;
    }
    for (int l = 0; l < n_; ++l)
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    s += (dgamma(i, l, j, k) - dgamma(j, l, i, k)) * u[j] * u[k];
            for (int a = 0; a < n_; ++a) s += gamma(l, i, a) * t[a];
            m(l, i) = s;
        }
    // Second quadratic term: - Gamma^l_{ja} Gamma^a_{ik} u^j u^k.
    for (int l = 0; l < n_; ++l)
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j) {
                double inner = 0.0;
                for (int a = 0; a < n_; ++a) {
                    double gik = 0.0;
                    for (int k = 0; k < n_; ++k) gik += gamma(a, i, k) * u[k];
                    inner += gamma(l, j, a) * gik;
                }
                s += inner * u[j];
            }
            m(l, i) -= s;
        }
}

void MetricField::curvature(const double* x, CurvatureData& out) const {
    Ten3 gamma;
    christoffel(x, gamma);
    Ten4 dgamma;
    dchristoffel(x, dgamma);
    out.riemann = Ten4(n_);
    for (int l = 0; l < n_; ++l)
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) {
                    double s = dgamma(i, l, j, k) - dgamma(j, l, i, k);
                    for (int a = 0; a < n_; ++a)
                        s += gamma(l, i, a) * gamma(a, j, k) - gamma(l, j, a) * gamma(a, i, k);
                    out.riemann(l, i, j, k) = s;
                }
    out.ricci = Mat(n_, n_);
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
            double s = 0.0;
            for (int i = 0; i < n_; ++i) s += out.riemann(i, i, j, k);
            out.ricci(j, k) = s;
        }
    Mat g;
    metric(x, g);
    Mat ginv = la::inverse(g);
    double tau = 0.0;
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) tau += ginv(j, k) * out.ricci(j, k);
    out.scalar = tau;
    out.noise_estimate = analytic_derivatives() ? 0.0 : 1e-6;
}

double MetricField::scalar_curvature(const double* x) const {
    CurvatureData c;
    curvature(x, c);
    return c.scalar;
}

Mat ChartMetric::metric_at(const Vec& x) const {
    require_inside(x.data());
    Mat g;
    field_->metric(x.data(), g);
    return g;
}

Ten3 ChartMetric::christoffel_at(const Vec& x) const {
    require_inside(x.data());
    Mat g;
    field_->metric(x.data(), g);
    Mat l;
    if (!la::cholesky(g, l)) throw MetricError("metric not positive definite in " + name_);
    Ten3 gamma;
    field_->christoffel(x.data(), gamma);
    return gamma;
}

CurvatureData ChartMetric::curvature_at(const Vec& x) const {
    require_inside(x.data());
    CurvatureData c;
    field_->curvature(x.data(), c);
    return c;
}

Mat ChartMetric::orthonormal_basis(const Vec& x) const {
    Mat g = metric_at(x);
    Mat l;
    if (!la::cholesky(g, l)) throw MetricError("metric not positive definite in " + name_);
    // B = L^{-T}: columns are g-orthonormal.
    const int n = dim();
    Mat b(n, n);
    // Solve L^T B = I column by column (back substitution).
    for (int c = 0; c < n; ++c) {
        Vec col(n, 0.0);
        col[c] = 1.0;
        for (int i = n - 1; i >= 0; --i) {
            double s = col[i];
            for (int j = i + 1; j < n; ++j) s -= l(j, i) * b(j, c);
            b(i, c) = s / l(i, i);
        }
    }
    return b;
}

double ChartMetric::inner(const Vec& x, const Vec& a, const Vec& b) const {
    Mat g = metric_at(x);
    double s = 0.0;
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) s += g(i, j) * a[i] * b[j];
    return s;
}

double ChartMetric::norm(const Vec& x, const Vec& a) const {
    return std::sqrt(std::max(0.0, inner(x, a, a)));
}

TangentVector TangentVector::make(const ChartMetric& m, Vec point, Vec components) {
    TangentVector v;
    v.norm = m.norm(point, components);
    v.point = std::move(point);
    v.components = std::move(components);
    return v;
}

Mat complete_frame(const ChartMetric& m, const Vec& x, const Vec& first) {
    const int n = m.dim();
    Mat g = m.metric_at(x);
    Mat basis = m.orthonormal_basis(x);
    std::vector<Vec> frame;
    frame.push_back(first);
    auto gdot = [&](const Vec& a, const Vec& b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += g(i, j) * a[i] * b[j];
        return s;
    };
    std::vector<Vec> cand;
    for (int c = 0; c < n; ++c) cand.push_back(basis.col(c));
    std::vector<bool> used(cand.size(), false);
    while (static_cast<int>(frame.size()) < n) {
        // Largest-residual pivot for a deterministic, stable choice.
        int best = -1;
        double best_norm = -1.0;
        std::vector<Vec> residuals(cand.size());
        for (size_t c = 0; c < cand.size(); ++c) {
            if (used[c]) continue;
            Vec r = cand[c];
            for (const Vec& f : frame) {
                const double proj = gdot(r, f);
                for (int i = 0; i < n; ++i) r[i] -= proj * f[i];
            }
            const double nr = std::sqrt(std::max(0.0, gdot(r, r)));
            residuals[c] = std::move(r);
            if (nr > best_norm) { best_norm = nr; best = static_cast<int>(c); }
        }
        if (best < 0 || best_norm < 1e-10)
            throw MetricError("frame completion failed (degenerate input)");
        Vec f = residuals[best];
        for (int i = 0; i < n; ++i) f[i] /= best_norm;
        used[best] = true;
        frame.push_back(std::move(f));
    }
    Mat out(n, n);
    for (int c = 0; c < n; ++c)
        for (int i = 0; i < n; ++i) out(i, c) = frame[c][i];
    return out;
}

}  // namespace tubelab::geo
