// Truncated Taylor arithmetic: value plus first three derivatives of a
// univariate function. The closed-form radial density profiles and the
// tube coefficient functions v(r) are differentiated exactly with this
// instead of error-prone hand chain rules.

#ifndef TUBELAB_JETS_HPP
#define TUBELAB_JETS_HPP

#include <cmath>

namespace tubelab {

struct Jet3 {
    double f = 0, d1 = 0, d2 = 0, d3 = 0;

    Jet3() = default;
    Jet3(double c) : f(c) {}
    Jet3(double f_, double d1_, double d2_, double d3_) : f(f_), d1(d1_), d2(d2_), d3(d3_) {}

    static Jet3 variable(double x) { return {x, 1.0, 0.0, 0.0}; }
};

inline Jet3 operator+(const Jet3& a, const Jet3& b) {
    return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3};
}
inline Jet3 operator-(const Jet3& a, const Jet3& b) {
    return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3};
}
inline Jet3 operator-(const Jet3& a) { return {-a.f, -a.d1, -a.d2, -a.d3}; }

inline Jet3 operator*(const Jet3& a, const Jet3& b) {
    return {a.f * b.f,
            a.d1 * b.f + a.f * b.d1,
            a.d2 * b.f + 2.0 * a.d1 * b.d1 + a.f * b.d2,
            a.d3 * b.f + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.f * b.d3};
}

// Composition g(h) for g with derivatives g1..g3 at h.f.
inline Jet3 compose(double g0, double g1, double g2, double g3, const Jet3& h) {
    const double u1 = h.d1, u2 = h.d2, u3 = h.d3;
    return {g0,
            g1 * u1,
            g2 * u1 * u1 + g1 * u2,
            g3 * u1 * u1 * u1 + 3.0 * g2 * u1 * u2 + g1 * u3};
}

inline Jet3 inv(const Jet3& a) {
    const double x = a.f;
    return compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), -6.0 / (x * x * x * x), a);
}
inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * inv(b); }

inline Jet3 sin(const Jet3& a) {
    const double s = std::sin(a.f), c = std::cos(a.f);
    return compose(s, c, -s, -c, a);
}
inline Jet3 cos(const Jet3& a) {
    const double s = std::sin(a.f), c = std::cos(a.f);
    return compose(c, -s, -c, s, a);
}
inline Jet3 sinh(const Jet3& a) {
    const double s = std::sinh(a.f), c = std::cosh(a.f);
    return compose(s, c, s, c, a);
}
inline Jet3 cosh(const Jet3& a) {
    const double s = std::sinh(a.f), c = std::cosh(a.f);
    return compose(c, s, c, s, a);
}
inline Jet3 exp(const Jet3& a) {
    const double e = std::exp(a.f);
    return compose(e, e, e, e, a);
}
inline Jet3 log(const Jet3& a) {
    const double x = a.f;
    return compose(std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), a);
}
inline Jet3 pow(const Jet3& a, double p) {
    const double x = a.f;
    return compose(std::pow(x, p), p * std::pow(x, p - 1), p * (p - 1) * std::pow(x, p - 2),
                   p * (p - 1) * (p - 2) * std::pow(x, p - 3), a);
}

// sin(x)/x and sinh(x)/x with stable small-x series.
inline Jet3 sinc(const Jet3& a) {
    if (std::fabs(a.f) < 1e-3) {
        const double x = a.f, x2 = x * x;
        // truncated series of 1 - x^2/6 + x^4/120 - x^6/5040
        const double f = 1 - x2 / 6 + x2 * x2 / 120;
        const double g1 = -x / 3 + x * x2 / 30 - x2 * x2 * x / 840;
        const double g2 = -1.0 / 3 + x2 / 10 - x2 * x2 / 168;
        const double g3 = x / 5 - x * x2 / 42;
        return compose(f, g1, g2, g3, a);
    }
    return sin(a) / a;
}
inline Jet3 sinhc(const Jet3& a) {
    if (std::fabs(a.f) < 1e-3) {
        const double x = a.f, x2 = x * x;
        const double f = 1 + x2 / 6 + x2 * x2 / 120;
        const double g1 = x / 3 + x * x2 / 30 + x2 * x2 * x / 840;
        const double g2 = 1.0 / 3 + x2 / 10 + x2 * x2 / 168;
        const double g3 = x / 5 + x * x2 / 42;
        return compose(f, g1, g2, g3, a);
    }
    return sinh(a) / a;
}

}  // namespace tubelab

#endif
