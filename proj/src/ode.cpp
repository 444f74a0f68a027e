#include "tubelab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace tubelab::ode {

namespace {
// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace

Dopri5::Dopri5(int dim, Rhs rhs, double rtol, double atol)
    : n_(dim), f_(std::move(rhs)), rtol_(rtol), atol_(atol) {
    k1_.resize(n_);
    k2_.resize(n_);
    k3_.resize(n_);
    k4_.resize(n_);
    k5_.resize(n_);
    k6_.resize(n_);
    k7_.resize(n_);
    tmp_.resize(n_);
}

void Dopri5::step(double s, const std::vector<double>& y, double h, std::vector<double>& out,
                  double& err) {
    if (!have_k1_) {
        f_(s, y.data(), k1_.data());
        have_k1_ = true;
    }
    for (int i = 0; i < n_; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
    f_(s + c2 * h, tmp_.data(), k2_.data());
    for (int i = 0; i < n_; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    f_(s + c3 * h, tmp_.data(), k3_.data());
    for (int i = 0; i < n_; ++i)
        tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    f_(s + c4 * h, tmp_.data(), k4_.data());
    for (int i = 0; i < n_; ++i)
        tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    f_(s + c5 * h, tmp_.data(), k5_.data());
    for (int i = 0; i < n_; ++i)
        tmp_[i] = y[i] +
                  h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    f_(s + h, tmp_.data(), k6_.data());
    for (int i = 0; i < n_; ++i)
        out[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
    f_(s + h, out.data(), k7_.data());

    double e = 0.0;
    for (int i = 0; i < n_; ++i) {
        const double ei = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                               e6 * k6_[i] + e7 * k7_[i]);
        const double sc = atol_ + rtol_ * std::max(std::fabs(y[i]), std::fabs(out[i]));
        const double r = ei / sc;
        e += r * r;
    }
    err = std::sqrt(e / n_);
}

void Dopri5::integrate(std::vector<double>& y, double s0, double s1,
                       std::span<const double> samples,
                       const std::function<void(size_t, const std::vector<double>&)>& on_sample) {
    const double dir = s1 >= s0 ? 1.0 : -1.0;
    const double span = std::fabs(s1 - s0);
    if (span == 0.0) {
        for (size_t i = 0; i < samples.size(); ++i) on_sample(i, y);
        return;
    }
    double s = s0;
    double hopt = std::min(0.1 * span, 0.05);  // controller's preferred magnitude
    const double hmin = std::max(1e-14, 1e-13 * span);
    size_t next_sample = 0;
    have_k1_ = false;
    std::vector<double> ynew(n_);

    // Eat samples that coincide with the start.
    while (next_sample < samples.size() && std::fabs(samples[next_sample] - s) < 1e-15) {
        if (on_sample) on_sample(next_sample, y);
        ++next_sample;
    }

    while (dir * (s1 - s) > 1e-15 * span) {
        double target = s1;
        if (next_sample < samples.size() && dir * (samples[next_sample] - target) < 0)
            target = samples[next_sample];
        const double dist = std::fabs(target - s);
        const bool clipped = hopt >= dist;
        const double h = dir * std::min(hopt, dist);
        double err;
        step(s, y, h, ynew, err);
        if (err <= 1.0) {
            s = clipped ? target : s + h;
            y.swap(ynew);
            k1_.swap(k7_);  // FSAL
            ++naccept_;
            while (next_sample < samples.size() &&
                   dir * (samples[next_sample] - s) <= 1e-14 * std::max(1.0, std::fabs(s))) {
                if (on_sample) on_sample(next_sample, y);
                ++next_sample;
            }
            const double fac =
                std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 6.0);
            const double grown = std::fabs(h) * fac;
            hopt = clipped ? std::max(hopt, grown) : grown;
        } else {
            have_k1_ = true;  // k1 still valid at unchanged (s, y)
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            hopt = std::fabs(h) * fac;
            if (hopt < hmin) throw StiffnessError(s);
        }
        if (hopt < hmin) throw StiffnessError(s);
    }
    while (next_sample < samples.size()) {
        if (on_sample) on_sample(next_sample, y);
        ++next_sample;
    }
}

}  // namespace tubelab::ode
