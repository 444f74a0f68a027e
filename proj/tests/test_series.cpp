#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tubelab/rng.hpp"
#include "tubelab/series.hpp"

using namespace tubelab;
using geo::ChartMetric;
using geo::Vec;
using series::CoefficientFit;
using series::FitOptions;
using spaces::SpaceSpec;

namespace {

Vec unit_at(const ChartMetric& m, const Vec& p, Rng& rng) {
    return la::matvec(m.orthonormal_basis(p), rng.unit_vector(m.dim()));
}

ChartMetric s2xr_space() {
    return spaces::make_space(SpaceSpec::product_space(SpaceSpec::sphere_space(2, 1.0),
                                                       SpaceSpec::euclidean_space(1)));
}

}  // namespace

TEST_CASE("coefficient fits") {
    SUBCASE("euclidean: (1, 0, 0, 0, 0)") {
        ChartMetric m = spaces::make_space(SpaceSpec::euclidean_space(3));
        FitOptions opt;
        opt.order = 4;
        CoefficientFit fit = series::fit_coefficients(m, {0, 0, 0}, {1, 0, 0}, opt);
        CHECK(fit.coeffs[0] == doctest::Approx(1.0).epsilon(1e-8));
        for (int i = 1; i <= 4; ++i) CHECK(std::fabs(fit.coeffs[i]) < 1e-8);
    }
    SUBCASE("S3: a2 = -1/3, a4 = 2/45") {
        ChartMetric m = spaces::make_space(SpaceSpec::sphere_space(3, 1.0));
        Rng rng(301);
        Vec u = unit_at(m, {0.05, 0.0, -0.1}, rng);
        CoefficientFit fit = series::fit_coefficients(m, {0.05, 0.0, -0.1}, u);
        CHECK(fit.coeffs[2] == doctest::Approx(-1.0 / 3.0).epsilon(3e-5));
        CHECK(fit.coeffs[4] == doctest::Approx(2.0 / 45.0).epsilon(2e-3));
        CHECK(std::fabs(fit.coeffs[4] - 2.0 / 45.0) < 1e-4);
        CHECK(std::fabs(fit.coeffs[1]) < fit.stderrs[1] + 1e-9);
        CHECK(std::fabs(fit.coeffs[3]) < fit.stderrs[3] + 1e-9);
    }
    SUBCASE("a2 = -Ric(u,u)/6 on several spaces") {
        Rng rng(303);
        FitOptions opt;
        opt.r_max = 0.4;  // tighter window keeps high-order leakage out of a2
        for (const auto& spec :
             {SpaceSpec::damek_ricci_space(2, 1),
              SpaceSpec::product_space(SpaceSpec::sphere_space(2, 1.0),
                                       SpaceSpec::euclidean_space(1)),
              SpaceSpec::ellipsoid_surface({1.0, 1.0, 1.3})}) {
            ChartMetric m = spaces::make_space(spec);
            const Vec p(m.dim(), 0.1);
            Vec u = unit_at(m, p, rng);
            CoefficientFit fit = series::fit_coefficients(m, p, u, opt);
            geo::CurvatureData c = m.curvature_at(p);
            double ric = 0.0;
            for (int i = 0; i < m.dim(); ++i)
                for (int j = 0; j < m.dim(); ++j) ric += c.ricci(i, j) * u[i] * u[j];
            CHECK(std::fabs(fit.coeffs[2] + ric / 6.0) < 1e-4);
        }
    }
    SUBCASE("fitted coefficients match the closed-form profile on H3") {
        ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
        Rng rng(307);
        Vec u = unit_at(m, {0, 0, 0}, rng);
        CoefficientFit fit = series::fit_coefficients(m, {0, 0, 0}, u);
        // (sinh r / r)^2 = 1 + r^2/3 + 2 r^4/45 + r^6/315 + ...
        CHECK(fit.coeffs[0] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(fit.coeffs[2] == doctest::Approx(1.0 / 3.0).epsilon(3e-5));
        CHECK(std::fabs(fit.coeffs[4] - 2.0 / 45.0) < 1e-4);
        CHECK(std::fabs(fit.coeffs[4] - 2.0 / 45.0) < fit.stderrs[4] + 1e-6);
        CHECK(std::fabs(fit.coeffs[6] - 1.0 / 315.0) < 2e-4);
    }
    SUBCASE("ill-conditioned fits are rejected") {
        ChartMetric m = spaces::make_space(SpaceSpec::euclidean_space(2));
        FitOptions opt;
        opt.order = 8;
        opt.r_min = 0.49;  // sliver window: hopeless conditioning
        opt.r_max = 0.5;
        opt.antipodal_samples = false;
        CHECK_THROWS_AS(series::fit_coefficients(m, {0, 0}, {1, 0}, opt),
                        series::IllConditionedFit);
    }
}

TEST_CASE("parity of the coefficient functions") {
    // One-sided fits so the parity identity is a genuine numerical
    // statement rather than a mirror-image tautology.
    FitOptions opt;
    opt.antipodal_samples = false;
    opt.order = 4;
    SUBCASE("euclidean: all defects tiny") {
        ChartMetric m = spaces::make_space(SpaceSpec::euclidean_space(3));
        CoefficientFit a = series::fit_coefficients(m, {0, 0, 0}, {1, 0, 0}, opt);
        CoefficientFit b = series::fit_coefficients(m, {0, 0, 0}, {-1, 0, 0}, opt);
        for (double d : series::parity_check(a, b)) CHECK(d < 1e-8);
    }
    SUBCASE("ellipsoid: defects within combined fit error") {
        ChartMetric m = spaces::make_space(SpaceSpec::ellipsoid_surface({1.0, 1.0, 1.3}));
        Rng rng(311);
        const Vec p = {0.3, 0.15};
        Vec u = unit_at(m, p, rng);
        Vec nu(2);
        for (int i = 0; i < 2; ++i) nu[i] = -u[i];
        opt.r_max = 0.45;
        CoefficientFit a = series::fit_coefficients(m, p, u, opt);
        CoefficientFit b = series::fit_coefficients(m, p, nu, opt);
        std::vector<double> defects = series::parity_check(a, b);
        for (size_t i = 0; i < defects.size(); ++i)
            CHECK(defects[i] <= 4.0 * (a.stderrs[i] + b.stderrs[i]) + 1e-8);
    }
    SUBCASE("damek-ricci p=2 q=1: defects small up to order 6") {
        // Radial density: the default (+/- sampled) fits force exact
        // parity, so defects sit at solver noise.
        ChartMetric m = spaces::make_space(SpaceSpec::damek_ricci_space(2, 1));
        Rng rng(313);
        const Vec p = {0.1, 0.2, -0.1, 0.05};
        Vec u = unit_at(m, p, rng);
        Vec nu(4);
        for (int i = 0; i < 4; ++i) nu[i] = -u[i];
        FitOptions both;  // antipodal sampling on
        both.order = 6;
        CoefficientFit a = series::fit_coefficients(m, p, u, both);
        CoefficientFit b = series::fit_coefficients(m, p, nu, both);
        std::vector<double> defects = series::parity_check(a, b);
        for (size_t i = 0; i <= 6; ++i) CHECK(defects[i] < 1e-6);
    }
}

TEST_CASE("harmonic up to order") {
    SUBCASE("H3 passes at order 6") {
        ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
        auto rep = series::harmonic_up_to_order(
            m, 6, {{0, 0, 0}, {0.2, 0.1, -0.1}, {-0.15, 0.25, 0.05}}, 3, 401);
        CHECK(rep.harmonic_up_to == 6);
    }
    SUBCASE("S2 x R fails at order 2 with direction-dependent a2") {
        ChartMetric m = s2xr_space();
        auto rep = series::harmonic_up_to_order(
            m, 2, {{0, 0, 0}, {0.2, -0.1, 0.3}, {0.1, 0.15, -0.2}}, 4, 403);
        CHECK(rep.harmonic_up_to < 2);
        CHECK(rep.variation[2] > 1e-3);
        CHECK(rep.order_passes[0]);
    }
    SUBCASE("ellipsoid fails at order 2 across base points") {
        ChartMetric m = spaces::make_space(SpaceSpec::ellipsoid_surface({1.0, 1.0, 1.3}));
        FitOptions opt;
        opt.r_max = 0.4;
        auto rep = series::harmonic_up_to_order(
            m, 2, {{0.0, 0.0}, {0.35, 0.0}, {0.15, 0.3}}, 3, 405, opt);
        CHECK(rep.harmonic_up_to < 2);
        CHECK(rep.variation[2] > 1e-3);
    }
}

TEST_CASE("vanhecke odd-order relation") {
    SUBCASE("constant curvature, k=0: both sides vanish") {
        ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
        Rng rng(501);
        Vec u = unit_at(m, {0, 0, 0}, rng);
        auto rep = series::vanhecke_relation_check(m, {0, 0, 0}, u, 0);
        CHECK(std::fabs(rep.lhs) < rep.lhs_error + 1e-7);
        CHECK(std::fabs(rep.rhs) < rep.rhs_error + 1e-7);
        CHECK(std::fabs(rep.lhs - rep.rhs) < rep.lhs_error + rep.rhs_error + 1e-7);
    }
    SUBCASE("damek-ricci p=2 q=1, k=1: both sides vanish within error") {
        ChartMetric m = spaces::make_space(SpaceSpec::damek_ricci_space(2, 1));
        Rng rng(503);
        const Vec p = {0.05, -0.1, 0.1, 0.0};
        Vec u = unit_at(m, p, rng);
        auto rep = series::vanhecke_relation_check(m, p, u, 1);
        CHECK(std::fabs(rep.lhs - rep.rhs) < rep.lhs_error + rep.rhs_error + 1e-6);
    }
    SUBCASE("ellipsoid, k=0: fitted a1 below its error bar") {
        ChartMetric m = spaces::make_space(SpaceSpec::ellipsoid_surface({1.0, 1.0, 1.3}));
        Rng rng(505);
        const Vec p = {0.25, 0.1};
        Vec u = unit_at(m, p, rng);
        FitOptions opt;
        opt.r_max = 0.4;
        auto rep = series::vanhecke_relation_check(m, p, u, 0, opt);
        // a0 == 1 identically, so the derivative side is pure fit noise
        CHECK(std::fabs(rep.rhs) < rep.rhs_error + 1e-6);
        CHECK(std::fabs(rep.lhs) < rep.lhs_error + 1e-6);
    }
}

TEST_CASE("fitted radial profile tracks the closed form on H3") {
    ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
    Rng rng(507);
    Vec u = unit_at(m, {0, 0, 0}, rng);
    spaces::RadialProfile fitted = series::fit_radial_profile(m, {0, 0, 0}, u);
    spaces::RadialProfile exact = spaces::closed_form_profile(SpaceSpec::hyperbolic_space(3));
    CHECK(fitted.provenance == spaces::RadialProfile::Provenance::fitted);
    for (double r : {0.1, 0.3, 0.45}) {
        CHECK(fitted.value(r) == doctest::Approx(exact.value(r)).epsilon(1e-7));
        CHECK(fitted.d1(r) == doctest::Approx(exact.d1(r)).epsilon(1e-4));
    }
    CHECK(fitted.error_estimate[0] > 0.0);
    CHECK(fitted.error_estimate[3] >= fitted.error_estimate[0]);
}
