#include "tubelab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tubelab::la {

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vec Mat::col(int j) const {
    Vec c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

Mat operator*(const Mat& a, const Mat& b) {
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Mat operator+(const Mat& a, const Mat& b) {
    Mat c = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
    return c;
}

Mat operator-(const Mat& a, const Mat& b) {
    Mat c = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
    return c;
}

Mat operator*(double s, const Mat& a) {
    Mat c = a;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) *= s;
    return c;
}

Vec matvec(const Mat& a, std::span<const double> x) {
    Vec y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Lu lu_factor(Mat a) {
    const int n = a.rows();
    Lu f;
    f.piv.resize(n);
    for (int i = 0; i < n; ++i) f.piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::fabs(a(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > best) { best = std::fabs(a(i, k)); p = i; }
        if (best == 0.0) { f.singular = true; f.lu = std::move(a); return f; }
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(f.piv[k], f.piv[p]);
            f.sign = -f.sign;
        }
        const double inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            a(i, k) *= inv;
            const double lik = a(i, k);
            if (lik == 0.0) continue;
            for (int j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }
    f.lu = std::move(a);
    return f;
}

double lu_det(const Lu& f) {
    if (f.singular) return 0.0;
    double d = f.sign;
    for (int i = 0; i < f.lu.rows(); ++i) d *= f.lu(i, i);
    return d;
}

Vec lu_solve(const Lu& f, Vec b) {
    if (f.singular) throw std::runtime_error("lu_solve: singular matrix");
    const int n = f.lu.rows();
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = b[f.piv[i]];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        x[i] /= f.lu(i, i);
    }
    return x;
}

Mat lu_solve_mat(const Lu& f, const Mat& b) {
    Mat x(b.rows(), b.cols());
    for (int j = 0; j < b.cols(); ++j) {
        Vec c = lu_solve(f, b.col(j));
        for (int i = 0; i < b.rows(); ++i) x(i, j) = c[i];
    }
    return x;
}

double det(const Mat& a) { return lu_det(lu_factor(a)); }

Mat inverse(const Mat& a) { return lu_solve_mat(lu_factor(a), Mat::identity(a.rows())); }

double trace(const Mat& a) {
    double t = 0.0;
    for (int i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

bool cholesky(const Mat& a, Mat& lower) {
    const int n = a.rows();
    lower = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
        if (d <= 0.0 || !std::isfinite(d)) return false;
        lower(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            lower(i, j) = s / lower(j, j);
        }
    }
    return true;
}

Vec jacobi_svd(Mat a, Mat& v, Mat& u) {
    const int m = a.rows(), n = a.cols();
    v = Mat::identity(n);
    bool rotated = true;
    int sweeps = 0;
    while (rotated && sweeps++ < 60) {
        rotated = false;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double app = 0, aqq = 0, apq = 0;
                for (int i = 0; i < m; ++i) {
                    app += a(i, p) * a(i, p);
                    aqq += a(i, q) * a(i, q);
                    apq += a(i, p) * a(i, q);
                }
                if (std::fabs(apq) <= 1e-30 + 1e-16 * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
                for (int i = 0; i < m; ++i) {
                    const double ap = a(i, p), aq = a(i, q);
                    a(i, p) = c * ap - s * aq;
                    a(i, q) = s * ap + c * aq;
                }
                for (int i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
    }
    Vec sig(n);
    std::vector<int> order(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += a(i, j) * a(i, j);
        sig[j] = std::sqrt(s);
        order[j] = j;
    }
    std::sort(order.begin(), order.end(), [&](int x, int y) { return sig[x] > sig[y]; });
    Mat vs(n, n), us(m, n);
    Vec ss(n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        ss[j] = sig[src];
        for (int i = 0; i < n; ++i) vs(i, j) = v(i, src);
        const double inv = sig[src] > 0 ? 1.0 / sig[src] : 0.0;
        for (int i = 0; i < m; ++i) us(i, j) = a(i, src) * inv;
    }
    v = std::move(vs);
    u = std::move(us);
    return ss;
}

Mat householder_frame(std::span<const double> unit) {
    const int n = static_cast<int>(unit.size());
    // Reflect e1 onto the requested vector; the sign choice keeps the
    // Householder vector away from cancellation.
    const double s = unit[0] >= 0.0 ? 1.0 : -1.0;
    Vec h(unit.begin(), unit.end());
    h[0] += s;
    const double hn2 = dot(h, h);
    Mat q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            q(i, j) = (i == j ? 1.0 : 0.0) - 2.0 * h[i] * h[j] / hn2;
    // q maps e1 to -s*unit; flip so the first column is exactly `unit`.
    if (s > 0)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) q(i, j) = -q(i, j);
    return q;
}

}  // namespace tubelab::la
