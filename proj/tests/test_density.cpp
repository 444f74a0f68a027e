#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tubelab/density.hpp"
#include "tubelab/rng.hpp"
#include "tubelab/transforms.hpp"

using namespace tubelab;
using density::BallVolumes;
using density::JacobiTransport;
using geo::ChartMetric;
using geo::TangentVector;
using geo::Vec;
using spaces::SpaceSpec;

namespace {

ChartMetric s2xr_space() {
    return spaces::make_space(SpaceSpec::product_space(SpaceSpec::sphere_space(2, 1.0),
                                                       SpaceSpec::euclidean_space(1)));
}

TangentVector tv(const ChartMetric& m, Vec p, Vec comp) {
    return TangentVector::make(m, std::move(p), std::move(comp));
}

// Random g-unit direction at p.
Vec random_unit(const ChartMetric& m, const Vec& p, Rng& rng) {
    return la::matvec(m.orthonormal_basis(p), rng.unit_vector(m.dim()));
}

}  // namespace

TEST_CASE("jacobi matrices in constant curvature match sin/sinh oracles") {
    SUBCASE("euclidean: A(r) = r Id") {
        ChartMetric m = spaces::make_space(SpaceSpec::euclidean_space(3));
        const double radii[2] = {0.5, 1.7};
        JacobiTransport jt = density::jacobi_transport(m, {0, 0, 0}, {1, 0, 0}, radii);
        for (int s = 0; s < 2; ++s)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    CHECK(jt.samples[s].a(a, b) ==
                          doctest::Approx(a == b ? radii[s] : 0.0).epsilon(1e-10));
    }
    SUBCASE("S3: det A(1) = sin^2(1)") {
        ChartMetric m = spaces::make_space(SpaceSpec::sphere_space(3, 1.0));
        Rng rng(23);
        Vec u = random_unit(m, {0.1, -0.05, 0.2}, rng);
        const double radii[1] = {1.0};
        JacobiTransport jt = density::jacobi_transport(m, {0.1, -0.05, 0.2}, u, radii);
        CHECK(jt.det_a(0) == doctest::Approx(std::sin(1.0) * std::sin(1.0)).epsilon(1e-9));
        CHECK(jt.det_a(0) == doctest::Approx(0.70807).epsilon(1e-4));
        // full d(exp) block: radial entry 1, normal entries sin(r)/r
        geo::Mat full = jt.full_dexp(0);
        CHECK(full(0, 0) == 1.0);
        CHECK(full(1, 1) == doctest::Approx(std::sin(1.0)).epsilon(1e-9));
        CHECK(full(2, 2) == doctest::Approx(std::sin(1.0)).epsilon(1e-9));
    }
    SUBCASE("H3: A(r) = sinh(r) Id in the parallel frame") {
        ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
        Rng rng(29);
        Vec u = random_unit(m, {0, 0, 0}, rng);
        const double radii[1] = {0.8};
        JacobiTransport jt = density::jacobi_transport(m, {0, 0, 0}, u, radii);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                CHECK(jt.samples[0].a(a, b) ==
                      doctest::Approx(a == b ? std::sinh(0.8) : 0.0).epsilon(1e-9));
        // cosine block solves the same equation with C(0)=Id, C'(0)=0
        density::JacobiOptions opt;
        opt.cosine_block = true;
        JacobiTransport jc = density::jacobi_transport(m, {0, 0, 0}, u, radii, opt);
        CHECK(jc.samples[0].c(0, 0) == doctest::Approx(std::cosh(0.8)).epsilon(1e-9));
        CHECK(std::fabs(jc.samples[0].c(0, 1)) < 1e-9);
    }
}

TEST_CASE("wronskian symmetry of the jacobi system") {
    ChartMetric m = spaces::make_space(SpaceSpec::damek_ricci_space(2, 1));
    Rng rng(31);
    const Vec p = {0.1, -0.2, 0.3, 0.05};
    Vec u = random_unit(m, p, rng);
    const double radii[1] = {0.9};
    JacobiTransport jt = density::jacobi_transport(m, p, u, radii);
    const geo::Mat& a = jt.samples[0].a;
    const geo::Mat& ap = jt.samples[0].ap;
    geo::Mat w = ap.transposed() * a - a.transposed() * ap;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::fabs(w(i, j)) < 1e-9);
}

TEST_CASE("gauss lemma: radial direction stays unit") {
    ChartMetric m = spaces::make_space(SpaceSpec::damek_ricci_space(2, 1));
    Rng rng(37);
    const Vec p = {0.0, 0.0, 0.0, 0.0};
    Vec u = random_unit(m, p, rng);
    const double radii[1] = {1.2};
    JacobiTransport jt = density::jacobi_transport(m, p, u, radii);
    const auto& s = jt.samples[0];
    CHECK(m.norm(s.position, s.velocity) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("theta values") {
    SUBCASE("euclidean: theta = 1") {
        ChartMetric m = spaces::make_space(SpaceSpec::euclidean_space(3));
        CHECK(density::theta(m, tv(m, {0.1, 0.2, 0.3}, {0.3, 0.4, 0.5})) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("H3 at r=0.5 matches (sinh r / r)^2") {
        ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
        Rng rng(41);
        Vec u = random_unit(m, {0.02, -0.05, 0.0}, rng);
        Vec v(3);
        for (int i = 0; i < 3; ++i) v[i] = 0.5 * u[i];
        const double want = std::pow(std::sinh(0.5) / 0.5, 2.0);
        CHECK(density::theta(m, tv(m, {0.02, -0.05, 0.0}, v)) ==
              doctest::Approx(want).epsilon(1e-8));
    }
    SUBCASE("damek-ricci p=2 q=1: radial, matches the closed form in any direction") {
        ChartMetric m = spaces::make_space(SpaceSpec::damek_ricci_space(2, 1));
        spaces::RadialProfile prof =
            spaces::closed_form_profile(SpaceSpec::damek_ricci_space(2, 1));
        Rng rng(43);
        for (const Vec& p : {Vec{0, 0, 0, 0}, Vec{0.3, -0.1, 0.2, 0.4}}) {
            for (int d = 0; d < 4; ++d) {
                Vec u = random_unit(m, p, rng);
                for (double r : {0.05, 0.5, 1.0, 1.5}) {
                    Vec v(4);
                    for (int i = 0; i < 4; ++i) v[i] = r * u[i];
                    CHECK(density::theta(m, tv(m, p, v)) ==
                          doctest::Approx(prof.value(r)).epsilon(1e-6));
                }
            }
        }
    }
    SUBCASE("small r: theta -> 1") {
        ChartMetric m = s2xr_space();
        Rng rng(47);
        Vec u = random_unit(m, {0.1, 0.0, 0.0}, rng);
        Vec v(3);
        for (int i = 0; i < 3; ++i) v[i] = 0.01 * u[i];
        CHECK(std::fabs(density::theta(m, tv(m, {0.1, 0.0, 0.0}, v)) - 1.0) < 1e-3);
    }
    SUBCASE("conjugate point detection on the sphere") {
        // Start away from the chart center with an "eastward" direction
        // so the orbit misses the chart's deleted antipode; the first
        // conjugate point sits at distance pi along the geodesic.
        ChartMetric m = spaces::make_space(SpaceSpec::sphere_space(2, 1.0));
        const Vec p = {0.8, 0.0};
        Vec east = {0.0, 1.0};
        const double n0 = m.norm(p, east);
        Vec v = {0.0, 3.3 / n0};
        CHECK_THROWS_AS(density::theta(m, tv(m, p, v)), geo::ConjugatePointError);
    }
}

TEST_CASE("geodesic involution") {
    SUBCASE("euclidean: iota(v) is -v based at p+v") {
        ChartMetric m = spaces::make_space(SpaceSpec::euclidean_space(3));
        TangentVector w = density::geodesic_involution(m, tv(m, {1, 2, 3}, {0.5, 0, -0.5}));
        CHECK(w.point[0] == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(w.point[2] == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(w.components[0] == doctest::Approx(-0.5).epsilon(1e-12));
    }
    SUBCASE("involution property iota(iota(v)) = v on H3") {
        ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
        Rng rng(59);
        for (int t = 0; t < 5; ++t) {
            const Vec p = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                           rng.uniform(-0.3, 0.3)};
            Vec u = random_unit(m, p, rng);
            const double r = rng.uniform(0.2, 1.0);
            Vec v(3);
            for (int i = 0; i < 3; ++i) v[i] = r * u[i];
            TangentVector back = density::geodesic_involution(
                m, density::geodesic_involution(m, tv(m, p, v)));
            for (int i = 0; i < 3; ++i) {
                CHECK(back.point[i] == doctest::Approx(p[i]).epsilon(1e-9));
                CHECK(back.components[i] == doctest::Approx(v[i]).epsilon(1e-9));
            }
        }
    }
    SUBCASE("theta is involution invariant on the ellipsoid") {
        ChartMetric m = spaces::make_space(SpaceSpec::ellipsoid_surface({1.0, 1.0, 1.3}));
        Rng rng(61);
        for (int t = 0; t < 10; ++t) {
            const Vec p = {rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25)};
            Vec u = random_unit(m, p, rng);
            const double r = rng.uniform(0.1, 0.45);
            Vec v(2);
            for (int i = 0; i < 2; ++i) v[i] = r * u[i];
            TangentVector vv = tv(m, p, v);
            const double th = density::theta(m, vv);
            const double th_inv = density::theta(m, density::geodesic_involution(m, vv));
            CHECK(std::fabs(th_inv - th) <= 1e-7 * th);
        }
    }
    SUBCASE("reflection identity theta(r u) = theta((-r)(-u))") {
        // (-r)(-u) is literally the same tangent vector, so the two
        // evaluations must agree bit for bit (determinism of the
        // evaluation path).
        ChartMetric m = spaces::make_space(SpaceSpec::ellipsoid_surface({1.0, 1.0, 1.3}));
        Rng rng(67);
        const Vec p = {0.2, -0.1};
        Vec u = random_unit(m, p, rng);
        const double r = 0.35;
        Vec v(2), v2(2);
        for (int i = 0; i < 2; ++i) {
            v[i] = r * u[i];
            v2[i] = (-r) * (-u[i]);
        }
        CHECK(density::theta(m, tv(m, p, v)) == density::theta(m, tv(m, p, v2)));
    }
}

TEST_CASE("mean curvature of geodesic spheres") {
    SUBCASE("euclidean R3 at r=0.5: h = -(n-1)/r = -4") {
        ChartMetric m = spaces::make_space(SpaceSpec::euclidean_space(3));
        CHECK(density::sphere_mean_curvature(m, tv(m, {0, 0, 0}, {0.5, 0, 0})) ==
              doctest::Approx(-4.0).epsilon(1e-9));
    }
    SUBCASE("S2 at r=0.5: h = -cot(0.5)") {
        ChartMetric m = spaces::make_space(SpaceSpec::sphere_space(2, 1.0));
        const Vec p = {0.1, 0.0};
        Vec dir = {1.0, 0.0};
        const double n0 = m.norm(p, dir);
        Vec v = {0.5 / n0, 0.0};  // metric norm exactly 0.5
        const double want = -std::cos(0.5) / std::sin(0.5);
        CHECK(density::sphere_mean_curvature(m, tv(m, p, v)) ==
              doctest::Approx(want).epsilon(1e-8));
        CHECK(want == doctest::Approx(-1.83049).epsilon(1e-5));
    }
    SUBCASE("H3 at r=0.5: h = -2 coth(0.5)") {
        ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
        const double want = -2.0 * std::cosh(0.5) / std::sinh(0.5);
        CHECK(density::sphere_mean_curvature(m, tv(m, {0, 0, 0}, {0, 0.5, 0})) ==
              doctest::Approx(want).epsilon(1e-8));
    }
    SUBCASE("trace and radial-derivative formulas agree on all built-ins") {
        std::vector<SpaceSpec> specs = {
            SpaceSpec::euclidean_space(3), SpaceSpec::sphere_space(3, 1.0),
            SpaceSpec::hyperbolic_space(3),
            SpaceSpec::product_space(SpaceSpec::sphere_space(2, 1.0),
                                     SpaceSpec::euclidean_space(1)),
            SpaceSpec::damek_ricci_space(2, 1),
            SpaceSpec::ellipsoid_surface({1.0, 1.0, 1.3})};
        Rng rng(71);
        for (const auto& spec : specs) {
            ChartMetric m = spaces::make_space(spec);
            const Vec p(m.dim(), 0.05);
            Vec u = random_unit(m, p, rng);
            for (double r : {0.2, 0.5}) {
                Vec v(m.dim());
                for (int i = 0; i < m.dim(); ++i) v[i] = r * u[i];
                TangentVector vv = tv(m, p, v);
                const double h1 = density::sphere_mean_curvature(m, vv);
                const double h2 = density::sphere_mean_curvature_radial(m, vv);
                CHECK(std::fabs(h1 - h2) < 1e-5 * std::max(1.0, std::fabs(h1)));
            }
        }
    }
}

TEST_CASE("ball volumes") {
    SUBCASE("euclidean R3 at r=1") {
        ChartMetric m = spaces::make_space(SpaceSpec::euclidean_space(3));
        rules::SphereRule rule = rules::build_rule(3, 6);
        BallVolumes bv = density::ball_volumes(m, {0, 0, 0}, {1, 0, 0}, 1.0, rule);
        CHECK(bv.ball_volume == doctest::Approx(4.0 * oracles::kPi / 3.0).epsilon(1e-10));
        CHECK(bv.sphere_area == doctest::Approx(4.0 * oracles::kPi).epsilon(1e-10));
        CHECK(bv.half_ball == doctest::Approx(2.0 * oracles::kPi / 3.0).epsilon(1e-10));
    }
    SUBCASE("S3 ball at r=pi/4: rotational-volume oracle 2 pi (r - sin r cos r)") {
        ChartMetric m = spaces::make_space(SpaceSpec::sphere_space(3, 1.0));
        rules::SphereRule rule = rules::build_rule(3, 6);
        const double r = oracles::kPi / 4.0;
        BallVolumes bv = density::ball_volumes(m, {0, 0, 0}, {0, 1, 0}, r, rule, 20);
        const double want = 2.0 * oracles::kPi * (r - std::sin(r) * std::cos(r));
        CHECK(bv.ball_volume == doctest::Approx(want).epsilon(1e-8));
        // d(ball)/dr = area (finite differences on the library value)
        BallVolumes hi = density::ball_volumes(m, {0, 0, 0}, {0, 1, 0}, r + 1e-4, rule, 20);
        BallVolumes lo = density::ball_volumes(m, {0, 0, 0}, {0, 1, 0}, r - 1e-4, rule, 20);
        CHECK((hi.ball_volume - lo.ball_volume) / 2e-4 ==
              doctest::Approx(bv.sphere_area).epsilon(1e-6));
    }
    SUBCASE("half-balls partition the ball") {
        ChartMetric m = s2xr_space();
        rules::SphereRule rule = rules::build_rule(3, 6);
        Rng rng(73);
        const Vec p = {0.1, -0.2, 0.4};
        Vec u = random_unit(m, p, rng);
        BallVolumes bv = density::ball_volumes(m, p, u, 0.6, rule);
        CHECK(bv.half_ball + bv.half_ball_opposite ==
              doctest::Approx(bv.ball_volume).epsilon(1e-12));
    }
}

TEST_CASE("hemisphere first moment of theta recovers the tube coefficient") {
    // On H3 the density is radial, so int_{S+(u)} <u,v> theta(r v) dv
    // collapses to omega_2 theta-bar(r); multiplied by r^(n-1) this is
    // exactly v(r) = omega_2 r^2 theta-bar(r).
    ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
    const Vec p = {0.0, 0.0, 0.0};
    const geo::Mat basis = m.orthonormal_basis(p);
    const double r = 0.5;
    rules::SphericalFunction f{3, [&](const Vec& xi) {
        Vec v = la::matvec(basis, xi);
        Vec scaled(3);
        for (int i = 0; i < 3; ++i) scaled[i] = r * v[i];
        return density::theta(m, tv(m, p, scaled));
    }, rules::Parity::even};
    Rng rng(79);
    la::Vec u = rng.unit_vector(3);
    const double hm = rules::hemisphere_moment(f, u, 5);
    spaces::RadialProfile prof = spaces::closed_form_profile(SpaceSpec::hyperbolic_space(3));
    CHECK(hm == doctest::Approx(oracles::kPi * prof.value(r)).epsilon(1e-8));
    // r^(n-1) * moment = v(r) from the harmonic closed form
    const double want_v = oracles::kPi * r * r * prof.value(r);
    CHECK(r * r * hm == doctest::Approx(want_v).epsilon(1e-8));
}

TEST_CASE("datri checks") {
    SUBCASE("H3 is D'Atri: both defects tiny") {
        ChartMetric m = spaces::make_space(SpaceSpec::hyperbolic_space(3));
        density::DatriOptions opt;
        opt.base_points = {{0, 0, 0}, {0.2, -0.1, 0.15}};
        opt.directions_per_point = 3;
        opt.seed = 101;
        density::DatriReport rep = density::datri_checks(m, opt);
        CHECK(rep.half_ball_defect < 1e-7);
        CHECK(rep.first_integral_defect < 1e-7);
    }
    SUBCASE("S2 x R is D'Atri (symmetric): defects tiny") {
        ChartMetric m = s2xr_space();
        density::DatriOptions opt;
        opt.base_points = {{0, 0, 0}, {0.15, 0.1, -0.3}};
        opt.directions_per_point = 3;
        opt.seed = 103;
        density::DatriReport rep = density::datri_checks(m, opt);
        CHECK(rep.half_ball_defect < 1e-6);
        CHECK(rep.first_integral_defect < 1e-6);
    }
    SUBCASE("ellipsoid: theta is not a first integral") {
        ChartMetric m = spaces::make_space(SpaceSpec::ellipsoid_surface({1.0, 1.0, 1.3}));
        density::DatriOptions opt;
        opt.base_points = {{0.45, 0.0}};
        opt.directions_per_point = 4;
        opt.speeds = {0.8};
        opt.geodesic_length = 0.3;
        opt.seed = 107;
        density::DatriReport rep = density::datri_checks(m, opt);
        CHECK(rep.first_integral_defect > 1e-3);
    }
}
