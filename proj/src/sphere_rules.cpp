#include "tubelab/sphere_rules.hpp"

#include <cmath>
#include <stdexcept>

#include "tubelab/metric.hpp"
#include "tubelab/summation.hpp"

namespace tubelab::rules {

namespace {

constexpr double kPi = tubelab::geo::kPi;

// Chebyshev (second kind) rule on [-1,1] with weight sqrt(1-u^2):
// u_i = cos(i pi/(q+1)), w_i = pi/(q+1) sin^2(i pi/(q+1)).
void chebyshev2(int q, Vec& nodes, Vec& weights) {
    nodes.resize(q);
    weights.resize(q);
    for (int i = 1; i <= q; ++i) {
        const double th = i * kPi / (q + 1);
        nodes[i - 1] = std::cos(th);
        weights[i - 1] = kPi / (q + 1) * std::sin(th) * std::sin(th);
    }
}

// Inverse of the standard normal CDF (Acklam's rational approximation
// plus one Halley refinement through erfc).
double inverse_normal_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= phigh) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        const double q = std::sqrt(-2 * std::log(1 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2 * kPi) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

SphereRule circle_rule(int min_points) {
    int npts = std::max(4, min_points);
    if (npts % 2) ++npts;
    SphereRule rule;
    rule.dim = 2;
    rule.antipodal = true;
    rule.nodes.reserve(npts);
    rule.weights.assign(npts, 2.0 * kPi / npts);
    for (int j = 0; j < npts; ++j) {
        const double th = 2.0 * kPi * (j + 0.5) / npts;
        rule.nodes.push_back({std::cos(th), std::sin(th)});
    }
    return rule;
}

SphereRule product_rule(int m, int degree) {
    if (m == 1) {
        SphereRule rule;
        rule.dim = 1;
        rule.antipodal = true;
        rule.nodes = {{1.0}, {-1.0}};
        rule.weights = {1.0, 1.0};
        return rule;
    }
    if (m == 2) return circle_rule(degree + 2);
    SphereRule sub = product_rule(m - 1, degree);
    const int k2 = m - 3;  // polar weight is (1-c^2)^(k2/2)
    Vec cn, cw;
    if (k2 % 2 == 0) {
        const int q = (degree + k2 + 2) / 2;
        gauss_legendre(q, cn, cw);
        for (size_t i = 0; i < cn.size(); ++i)
            cw[i] *= std::pow(1.0 - cn[i] * cn[i], k2 / 2);
    } else {
        const int q = (degree + k2 + 1) / 2;
        chebyshev2(q, cn, cw);
        if (k2 > 1)
            for (size_t i = 0; i < cn.size(); ++i)
                cw[i] *= std::pow(1.0 - cn[i] * cn[i], (k2 - 1) / 2);
    }
    SphereRule rule;
    rule.dim = m;
    rule.antipodal = sub.antipodal;
    rule.nodes.reserve(cn.size() * sub.size());
    rule.weights.reserve(cn.size() * sub.size());
    for (size_t i = 0; i < cn.size(); ++i) {
        const double c = cn[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (size_t j = 0; j < sub.size(); ++j) {
            Vec node(m);
            node[0] = c;
            for (int d = 0; d < m - 1; ++d) node[d + 1] = s * sub.nodes[j][d];
            rule.nodes.push_back(std::move(node));
            rule.weights.push_back(cw[i] * sub.weights[j]);
        }
    }
    return rule;
}

SphereRule lowdisc_rule(int m, int level) {
    // Kronecker lattice from the generalized golden ratio (the root of
    // x^(m+1) = x + 1), pushed through the inverse normal map and
    // antipodally symmetrized. Halton points degrade noticeably beyond
    // five dimensions; this lattice does not.
    const size_t pairs = static_cast<size_t>(1) << std::min(level, 22);
    double phi = 1.5;
    for (int it = 0; it < 64; ++it)
        phi = std::pow(1.0 + phi, 1.0 / (m + 1));
    std::vector<double> alpha(m);
    double ap = 1.0;
    for (int d = 0; d < m; ++d) {
        ap /= phi;
        alpha[d] = ap;
    }
    SphereRule rule;
    rule.dim = m;
    rule.antipodal = true;
    rule.level = level;
    rule.kind = RuleKind::lowdisc;
    const double area = geo::unit_sphere_area(m);
    rule.weights.assign(2 * pairs, area / (2.0 * pairs));
    rule.nodes.reserve(2 * pairs);
    for (size_t i = 0; i < pairs; ++i) {
        Vec v(m);
        double n2 = 0.0;
        for (int d = 0; d < m; ++d) {
            double u = 0.5 + (i + 1.0) * alpha[d];
            u -= std::floor(u);
            v[d] = inverse_normal_cdf(std::min(std::max(u, 1e-12), 1.0 - 1e-12));
            n2 += v[d] * v[d];
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (double& comp : v) comp *= inv;
        Vec neg(m);
        for (int d = 0; d < m; ++d) neg[d] = -v[d];
        rule.nodes.push_back(std::move(v));
        rule.nodes.push_back(std::move(neg));
    }
    return rule;
}

}  // namespace

double SphereRule::weight_sum() const { return pairwise_sum(weights); }

double pairwise_sum_rule(const std::vector<double>& terms) { return pairwise_sum(terms); }

void gauss_legendre(int q, Vec& nodes, Vec& weights) {
    nodes.resize(q);
    weights.resize(q);
    for (int i = 0; i < (q + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (q + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < q; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = q * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[q - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
}

SphereRule build_rule(int m, int level, RuleKind kind) {
    if (m < 1) throw std::invalid_argument("sphere rule needs m >= 1");
    if (kind == RuleKind::lowdisc) return lowdisc_rule(m, level);
    SphereRule rule = product_rule(m, 2 * level);
    rule.level = level;
    rule.kind = RuleKind::product;
    return rule;
}

SphereRule polar_adapted_rule(int m, int level, const Vec& u) {
    if (static_cast<int>(u.size()) != m) throw std::invalid_argument("axis dimension mismatch");
    const int degree = 2 * level;
    SphereRule rule;
    rule.dim = m;
    rule.antipodal = true;
    rule.level = level;
    if (m == 1) {
        rule.nodes = {{u[0]}, {-u[0]}};
        rule.weights = {1.0, 1.0};
        return rule;
    }
    const Mat q = la::householder_frame(u);
    if (m == 2) {
        Vec gn, gw;
        gauss_legendre(std::max(8, degree + 4), gn, gw);
        auto push = [&](double phi, double w) {
            Vec node(2);
            const double c = std::cos(phi), s = std::sin(phi);
            node[0] = q(0, 0) * c + q(0, 1) * s;
            node[1] = q(1, 0) * c + q(1, 1) * s;
            rule.nodes.push_back(node);
            rule.weights.push_back(w);
            for (double& comp : node) comp = -comp;
            rule.nodes.push_back(std::move(node));
            rule.weights.push_back(w);
        };
        for (size_t i = 0; i < gn.size(); ++i) {
            const double phi = 0.25 * kPi * (gn[i] + 1.0);      // in (0, pi/2)
            push(phi, gw[i] * 0.25 * kPi);
            push(-phi, gw[i] * 0.25 * kPi);
        }
        return rule;
    }
    // Polar angle split at the equator: c = sin(phi), phi in (0, pi/2);
    // the measure (1-c^2)^((m-3)/2) dc becomes cos^(m-2)(phi) dphi,
    // smooth on the panel whatever the parity of m.
    Vec gn, gw;
    gauss_legendre(std::max(8, degree + m + 2), gn, gw);
    SphereRule sub = product_rule(m - 1, degree);
    for (size_t i = 0; i < gn.size(); ++i) {
        const double phi = 0.25 * kPi * (gn[i] + 1.0);
        const double c = std::sin(phi), s = std::cos(phi);
        const double wc = gw[i] * 0.25 * kPi * std::pow(s, m - 2);
        for (size_t j = 0; j < sub.size(); ++j) {
            Vec node(m, 0.0);
            for (int r = 0; r < m; ++r) {
                double val = q(r, 0) * c;
                for (int d = 0; d < m - 1; ++d) val += q(r, 1 + d) * s * sub.nodes[j][d];
                node[r] = val;
            }
            Vec neg(m);
            for (int r = 0; r < m; ++r) neg[r] = -node[r];
            rule.nodes.push_back(std::move(node));
            rule.weights.push_back(wc * sub.weights[j]);
            rule.nodes.push_back(std::move(neg));
            rule.weights.push_back(wc * sub.weights[j]);
        }
    }
    return rule;
}

SphereRule hemisphere_restrict(const SphereRule& rule, const Vec& u, double tol) {
    SphereRule out;
    out.dim = rule.dim;
    out.antipodal = false;
    out.level = rule.level;
    out.kind = rule.kind;
    for (size_t i = 0; i < rule.size(); ++i) {
        const double c = la::dot(rule.nodes[i], u);
        if (c > tol) {
            out.nodes.push_back(rule.nodes[i]);
            out.weights.push_back(rule.weights[i]);
        } else if (c >= -tol) {
            out.nodes.push_back(rule.nodes[i]);
            out.weights.push_back(0.5 * rule.weights[i]);
        }
    }
    return out;
}

SphereRule great_subsphere_rule(int m, int level, const Vec& u, RuleKind kind) {
    if (m < 2) throw std::invalid_argument("great subsphere needs m >= 2");
    SphereRule sub = build_rule(m - 1, level, kind);
    const Mat q = la::householder_frame(u);
    SphereRule out;
    out.dim = m;
    out.antipodal = sub.antipodal;
    out.level = level;
    out.kind = kind;
    out.nodes.reserve(sub.size());
    out.weights = sub.weights;
    for (size_t j = 0; j < sub.size(); ++j) {
        Vec node(m, 0.0);
        for (int r = 0; r < m; ++r) {
            double val = 0.0;
            for (int d = 0; d < m - 1; ++d) val += q(r, 1 + d) * sub.nodes[j][d];
            node[r] = val;
        }
        out.nodes.push_back(std::move(node));
    }
    return out;
}

}  // namespace tubelab::rules
