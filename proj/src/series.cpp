#include "tubelab/series.hpp"

#include <algorithm>
#include <cmath>

#include "tubelab/rng.hpp"
#include "tubelab/summation.hpp"

namespace tubelab::series {

namespace {

constexpr int kMaxOrder = 8;

// theta(r_j u) for all radii in one Jacobi pass.
std::vector<double> theta_samples(const ChartMetric& m, const Vec& p, const Vec& u,
                                  const std::vector<double>& radii, geo::OdeTolerances tol) {
    density::JacobiOptions jopt;
    jopt.tol = tol;
    density::JacobiTransport jt = density::jacobi_transport(m, p, u, radii, jopt);
    std::vector<double> out(radii.size());
    for (size_t i = 0; i < radii.size(); ++i) out[i] = jt.theta(i);
    return out;
}

}  // namespace

CoefficientFit fit_coefficients(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                const FitOptions& opt) {
    if (opt.order > kMaxOrder)
        throw std::invalid_argument("fit order capped at 8 (conditioning)");
    const int k = opt.order;
    const int ns = opt.samples > 0 ? opt.samples : std::max(2 * k + 6, 24);
    if (2 * ns < 2 * k + 4) throw std::invalid_argument("window spans too few sample radii");

    // Chebyshev radii (first kind, no endpoints) in [r_min, r_max].
    std::vector<double> radii(ns);
    const double mid = 0.5 * (opt.r_min + opt.r_max), half = 0.5 * (opt.r_max - opt.r_min);
    for (int j = 0; j < ns; ++j)
        radii[j] = mid + half * std::cos(geo::kPi * (j + 0.5) / ns);
    std::sort(radii.begin(), radii.end());

    std::vector<double> xs, ys;
    const std::vector<double> th = theta_samples(m, p, unit_dir, radii, opt.tol);
    for (int j = 0; j < ns; ++j) {
        xs.push_back(radii[j]);
        ys.push_back(th[j]);
    }
    if (opt.antipodal_samples) {
        Vec nu(unit_dir.size());
        for (size_t i = 0; i < nu.size(); ++i) nu[i] = -unit_dir[i];
        const std::vector<double> thn = theta_samples(m, p, nu, radii, opt.tol);
        for (int j = 0; j < ns; ++j) {
            xs.push_back(-radii[j]);
            ys.push_back(thn[j]);
        }
    }

    // Least squares at a given order on the shared samples; returns
    // scaled coefficients, per-coefficient standard errors, condition
    // number and residuals.
    struct Solved {
        la::Vec coeffs, errs;
        double cond = 0.0, rms = 0.0;
    };
    auto solve_order = [&](int order) {
        const int rows = static_cast<int>(xs.size()), cols = order + 1;
        la::Mat design(rows, cols);
        for (int r = 0; r < rows; ++r) {
            double t = 1.0;
            const double x = xs[r] / opt.r_max;
            for (int c = 0; c < cols; ++c) {
                design(r, c) = t;
                t *= x;
            }
        }
        la::Mat v, u;
        la::Vec sig = la::jacobi_svd(design, v, u);
        Solved sol;
        sol.cond = sig.front() / std::max(sig.back(), 1e-300);
        if (sol.cond > 1e10) throw IllConditionedFit(sol.cond);
        la::Vec uty(cols, 0.0);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) uty[c] += u(r, c) * ys[r];
        la::Vec a_scaled(cols, 0.0);
        for (int i = 0; i < cols; ++i)
            for (int c = 0; c < cols; ++c) a_scaled[i] += v(i, c) * uty[c] / sig[c];
        double rss = 0.0;
        for (int r = 0; r < rows; ++r) {
            double pred = 0.0, t = 1.0;
            const double x = xs[r] / opt.r_max;
            for (int c = 0; c < cols; ++c) {
                pred += a_scaled[c] * t;
                t *= x;
            }
            rss += (ys[r] - pred) * (ys[r] - pred);
        }
        const int dof = std::max(1, rows - cols);
        // Noise floor so near-perfect fits still carry solver noise.
        const double sigma = std::max(std::sqrt(rss / dof), 3e-9);
        sol.rms = std::sqrt(rss / rows);
        sol.coeffs = a_scaled;
        sol.errs.resize(cols);
        for (int i = 0; i < cols; ++i) {
            double var = 0.0;
            for (int c = 0; c < cols; ++c) {
                const double vic = v(i, c) / sig[c];
                var += vic * vic;
            }
            sol.errs[i] = sigma * std::sqrt(var);
        }
        return sol;
    };

    const Solved sol = solve_order(k);
    // Truncation bias of the dropped tail is invisible to residual
    // errors; compare against a two-orders-higher fit on the same
    // samples and fold the shift into the bars. The diagnostic refit
    // may exceed the user-facing order cap.
    const int khi = k + 2;
    Solved hi;
    bool have_hi = static_cast<int>(xs.size()) >= 2 * khi + 4;
    if (have_hi) {
        try {
            hi = solve_order(khi);
        } catch (const IllConditionedFit&) {
            have_hi = false;
        }
    }

    CoefficientFit fit;
    fit.base_point = p;
    fit.direction = unit_dir;
    fit.r_min = opt.r_min;
    fit.r_max = opt.r_max;
    fit.condition_number = sol.cond;
    fit.rms_residual = sol.rms;
    fit.coeffs.resize(k + 1);
    fit.stderrs.resize(k + 1);
    double scale = 1.0;
    for (int i = 0; i <= k; ++i) {
        fit.coeffs[i] = sol.coeffs[i] / scale;
        double err = sol.errs[i];
        if (have_hi) err = std::max(err, std::fabs(sol.coeffs[i] - hi.coeffs[i]));
        fit.stderrs[i] = err / scale;
        scale *= opt.r_max;
    }
    return fit;
}

std::vector<double> parity_check(const CoefficientFit& fit_u,
                                 const CoefficientFit& fit_minus_u) {
    if (fit_u.coeffs.size() != fit_minus_u.coeffs.size())
        throw std::invalid_argument("parity_check: fits must share the order");
    std::vector<double> defects(fit_u.coeffs.size());
    for (size_t i = 0; i < defects.size(); ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        defects[i] = std::fabs(fit_minus_u.coeffs[i] - sign * fit_u.coeffs[i]);
    }
    return defects;
}

HarmonicOrderReport harmonic_up_to_order(const ChartMetric& m, int max_order,
                                         const std::vector<Vec>& base_points,
                                         int directions_per_point, uint64_t seed,
                                         const FitOptions& opt) {
    // Fit well past the tested order: a truncated fit would fold the
    // dropped tail into the tested coefficients and the bars would
    // swallow genuine variation.
    FitOptions fopt = opt;
    fopt.order = std::max(fopt.order, std::min(max_order + 4, kMaxOrder));
    Rng rng(seed);
    std::vector<CoefficientFit> fits;
    for (const Vec& p : base_points) {
        const la::Mat basis = m.orthonormal_basis(p);
        for (int d = 0; d < directions_per_point; ++d) {
            Vec u = la::matvec(basis, rng.unit_vector(m.dim()));
            fits.push_back(fit_coefficients(m, p, u, fopt));
        }
    }
    HarmonicOrderReport rep;
    rep.max_order = max_order;
    rep.mean.resize(max_order + 1);
    rep.variation.resize(max_order + 1);
    rep.error_bar.resize(max_order + 1);
    rep.order_passes.resize(max_order + 1);
    for (int i = 0; i <= max_order; ++i) {
        double mean = 0.0, worst_err = 0.0;
        for (const auto& f : fits) {
            mean += f.coeffs[i];
            worst_err = std::max(worst_err, f.stderrs[i]);
        }
        mean /= fits.size();
        double var = 0.0;
        for (const auto& f : fits) var = std::max(var, std::fabs(f.coeffs[i] - mean));
        rep.mean[i] = mean;
        rep.variation[i] = var;
        rep.error_bar[i] = 4.0 * worst_err + 1e-8 * std::max(1.0, std::fabs(mean));
        rep.order_passes[i] = var <= rep.error_bar[i];
    }
    rep.harmonic_up_to = -1;
    for (int i = 0; i <= max_order; ++i) {
        if (!rep.order_passes[i]) break;
        rep.harmonic_up_to = i;
    }
    return rep;
}

VanheckeReport vanhecke_relation_check(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                       int k, const FitOptions& opt) {
    if (k > 2) throw std::invalid_argument("vanhecke check supports k <= 2");
    const int jmax = 2 * k + 1;
    const double h = 0.12;
    // alpha_i(r) = a_i(gamma'_u(r)) on a 7-point grid.
    std::vector<double> grid;
    for (int g = -3; g <= 3; ++g) grid.push_back(g * h);
    std::vector<CoefficientFit> fits(grid.size());
    for (size_t gi = 0; gi < grid.size(); ++gi) {
        if (grid[gi] == 0.0) {
            fits[gi] = fit_coefficients(m, p, unit_dir, opt);
            continue;
        }
        geo::GeodesicState st = geo::integrate_geodesic(m, p, unit_dir, grid[gi], opt.tol);
        // renormalize against drift
        const double sp = m.norm(st.position, st.velocity);
        for (double& c : st.velocity) c /= sp;
        fits[gi] = fit_coefficients(m, st.position, st.velocity, opt);
    }
    // Central difference weights on the 7-point grid for derivative
    // order j (rows j=1..5).
    static const double w1[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
    static const double w2[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18,
                                 3.0 / 2,  -3.0 / 20, 1.0 / 90};
    static const double w3[7] = {1.0 / 8, -1.0, 13.0 / 8, 0, -13.0 / 8, 1.0, -1.0 / 8};
    static const double w4[7] = {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6};
    static const double w5[7] = {-1.0 / 2, 2.0, -5.0 / 2, 0, 5.0 / 2, -2.0, 1.0 / 2};
    const double* wt[6] = {nullptr, w1, w2, w3, w4, w5};

    VanheckeReport rep;
    const CoefficientFit& center = fits[3];
    rep.lhs = 2.0 * center.coeffs[jmax];
    rep.lhs_error = 2.0 * center.stderrs[jmax];
    double rhs = 0.0, rhs_err = 0.0;
    double factorial = 1.0;
    for (int j = 1; j <= jmax; ++j) {
        factorial *= j;
        const int i = jmax - j;
        double deriv = 0.0, derr = 0.0;
        const double hj = std::pow(h, j);
        for (int g = 0; g < 7; ++g) {
            deriv += wt[j][g] * fits[g].coeffs[i];
            derr += std::fabs(wt[j][g]) * fits[g].stderrs[i];
        }
        deriv /= hj;
        derr /= hj;
        const double sign = ((jmax - j) % 2 == 0) ? 1.0 : -1.0;
        rhs += sign * deriv / factorial;
        rhs_err += derr / factorial;
    }
    rep.rhs = rhs;
    rep.rhs_error = rhs_err;
    rep.inconclusive =
        rep.lhs_error > std::fabs(rep.lhs) + std::fabs(rep.rhs) &&
        rep.rhs_error > std::fabs(rep.lhs) + std::fabs(rep.rhs) &&
        std::fabs(rep.lhs - rep.rhs) > rep.lhs_error + rep.rhs_error;
    return rep;
}

spaces::RadialProfile fit_radial_profile(const ChartMetric& m, const Vec& p, const Vec& unit_dir,
                                         const FitOptions& opt) {
    CoefficientFit fit = fit_coefficients(m, p, unit_dir, opt);
    spaces::RadialProfile prof;
    prof.provenance = spaces::RadialProfile::Provenance::fitted;
    const std::vector<double> coeffs = fit.coeffs;
    prof.jet = [coeffs](double r) {
        Jet3 rj = Jet3::variable(r);
        Jet3 acc(0.0);
        Jet3 power(1.0);
        for (double c : coeffs) {
            acc = acc + Jet3(c) * power;
            power = power * rj;
        }
        return acc;
    };
    prof.d2_at_zero = coeffs.size() > 2 ? 2.0 * coeffs[2] : 0.0;
    for (int order = 0; order <= 3; ++order) {
        double err = 0.0;
        for (size_t i = order; i < fit.stderrs.size(); ++i) {
            double fac = 1.0;
            for (int q = 0; q < order; ++q) fac *= static_cast<double>(i - q);
            err += fac * fit.stderrs[i] * std::pow(fit.r_max, static_cast<double>(i) - order);
        }
        prof.error_estimate[order] = err;
    }
    return prof;
}

}  // namespace tubelab::series
