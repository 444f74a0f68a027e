#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tubelab/linalg.hpp"
#include "tubelab/ode.hpp"
#include "tubelab/rng.hpp"
#include "tubelab/sphere_rules.hpp"
#include "tubelab/summation.hpp"

using namespace tubelab;

TEST_CASE("lu determinant and solve") {
    la::Mat a(3, 3);
    a(0, 0) = 4;  a(0, 1) = 1;  a(0, 2) = 2;
    a(1, 0) = 1;  a(1, 1) = 3;  a(1, 2) = 0;
    a(2, 0) = 2;  a(2, 1) = 0;  a(2, 2) = 5;
    CHECK(la::det(a) == doctest::Approx(4 * 15 - 1 * 5 + 2 * (-6)).epsilon(1e-12));
    la::Vec b = {1.0, 2.0, 3.0};
    la::Vec x = la::lu_solve(la::lu_factor(a), b);
    la::Vec back = la::matvec(a, x);
    for (int i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("cholesky detects non-SPD") {
    la::Mat good = la::Mat::identity(2);
    la::Mat l;
    CHECK(la::cholesky(good, l));
    la::Mat bad(2, 2);
    bad(0, 0) = 1;  bad(0, 1) = 2;  bad(1, 0) = 2;  bad(1, 1) = 1;
    CHECK_FALSE(la::cholesky(bad, l));
}

TEST_CASE("householder frame maps e1 to the axis") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const int m = 2 + trial % 6;
        la::Vec u = rng.unit_vector(m);
        la::Mat q = la::householder_frame(u);
        for (int i = 0; i < m; ++i) CHECK(q(i, 0) == doctest::Approx(u[i]).epsilon(1e-13));
        // Columns orthonormal.
        for (int c1 = 0; c1 < m; ++c1)
            for (int c2 = 0; c2 < m; ++c2) {
                const double d = la::dot(q.col(c1), q.col(c2));
                CHECK(d == doctest::Approx(c1 == c2 ? 1.0 : 0.0).epsilon(1e-12));
            }
    }
}

TEST_CASE("jacobi svd recovers singular values") {
    la::Mat a(4, 2);
    a(0, 0) = 3;  a(1, 1) = 2;  a(2, 0) = 0;  a(3, 1) = 0;
    la::Mat v, u;
    la::Vec s = la::jacobi_svd(a, v, u);
    CHECK(s[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("pairwise sum is exact-ish and order independent of threads") {
    std::vector<double> xs(1000);
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = std::sin(0.1 * i) * 1e-3;
    const double s1 = pairwise_sum(xs);
    set_worker_threads(4);
    std::vector<double> slots(xs.size());
    parallel_for(xs.size(), [&](size_t i) { slots[i] = xs[i]; });
    set_worker_threads(1);
    CHECK(pairwise_sum(slots) == s1);
}

TEST_CASE("dopri5 integrates a circle to 1e-10") {
    ode::Dopri5 solver(2, [](double, const double* y, double* dy) {
        dy[0] = -y[1];
        dy[1] = y[0];
    });
    std::vector<double> y = {1.0, 0.0};
    solver.integrate(y, 0.0, 2.0 * oracles::kPi);
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::fabs(y[1]) < 1e-9);
}

TEST_CASE("dopri5 sample points are hit in one pass") {
    ode::Dopri5 solver(1, [](double, const double* y, double* dy) { dy[0] = y[0]; });
    std::vector<double> y = {1.0};
    const std::vector<double> samples = {0.25, 0.5, 1.0, 1.5};
    std::vector<double> seen;
    solver.integrate(y, 0.0, 2.0, samples,
                     [&](size_t, const std::vector<double>& yy) { seen.push_back(yy[0]); });
    REQUIRE(seen.size() == 4);
    for (size_t i = 0; i < samples.size(); ++i)
        CHECK(seen[i] == doctest::Approx(std::exp(samples[i])).epsilon(1e-10));
    CHECK(y[0] == doctest::Approx(std::exp(2.0)).epsilon(1e-10));
}

TEST_CASE("dopri5 integrates backwards") {
    ode::Dopri5 solver(1, [](double, const double* y, double* dy) { dy[0] = y[0]; });
    std::vector<double> y = {1.0};
    solver.integrate(y, 0.0, -1.0);
    CHECK(y[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
    la::Vec x, w;
    rules::gauss_legendre(8, x, w);
    double s0 = 0, s2 = 0, s14 = 0;
    for (int i = 0; i < 8; ++i) {
        s0 += w[i];
        s2 += w[i] * x[i] * x[i];
        s14 += w[i] * std::pow(x[i], 14);
    }
    CHECK(s0 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(s14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("sphere rule weight sums match surface areas") {
    CHECK(rules::build_rule(2, 6).weight_sum() ==
          doctest::Approx(2 * oracles::kPi).epsilon(1e-13));
    CHECK(rules::build_rule(3, 6).weight_sum() ==
          doctest::Approx(4 * oracles::kPi).epsilon(1e-13));
    CHECK(rules::build_rule(4, 6).weight_sum() ==
          doctest::Approx(2 * oracles::kPi * oracles::kPi).epsilon(1e-13));
    CHECK(rules::build_rule(5, 4).weight_sum() ==
          doctest::Approx(8.0 / 3.0 * std::pow(oracles::kPi, 2)).epsilon(1e-13));
    CHECK(rules::build_rule(7, 3).weight_sum() ==
          doctest::Approx(7 * oracles::omega(7)).epsilon(1e-12));
}

TEST_CASE("product rules integrate monomials exactly through degree 2*level") {
    const int level = 4;
    for (int m = 2; m <= 5; ++m) {
        rules::SphereRule rule = rules::build_rule(m, level);
        std::vector<int> expo(m, 0);
        std::function<void(int, int)> rec = [&](int pos, int remaining) {
            if (pos == m - 1) {
                expo[pos] = remaining;
                const double want = oracles::sphere_monomial_integral(expo);
                const double got = rules::integrate(rule, [&](const la::Vec& v) {
                    double t = 1.0;
                    for (int d = 0; d < m; ++d)
                        for (int e = 0; e < expo[d]; ++e) t *= v[d];
                    return t;
                });
                CHECK(std::fabs(got - want) < 1e-12 * std::max(1.0, std::fabs(want)));
                return;
            }
            for (int e = 0; e <= remaining; ++e) {
                expo[pos] = e;
                rec(pos + 1, remaining - e);
            }
        };
        for (int total = 0; total <= 2 * level; ++total) rec(0, total);
    }
}

TEST_CASE("rule antipodal symmetry and hemisphere split") {
    Rng rng(11);
    rules::SphereRule rule = rules::build_rule(3, 5);
    CHECK(rule.antipodal);
    la::Vec u = rng.unit_vector(3);
    rules::SphereRule hemi = rules::hemisphere_restrict(rule, u);
    rules::SphereRule anti = rules::hemisphere_restrict(rule, {-u[0], -u[1], -u[2]});
    CHECK(hemi.weight_sum() + anti.weight_sum() ==
          doctest::Approx(rule.weight_sum()).epsilon(1e-14));
    CHECK(hemi.weight_sum() == doctest::Approx(2 * oracles::kPi).epsilon(1e-12));
}

TEST_CASE("great subsphere rule integrates constants to (m-1)*omega_(m-1)") {
    Rng rng(13);
    for (int m = 3; m <= 5; ++m) {
        la::Vec u = rng.unit_vector(m);
        rules::SphereRule sub = rules::great_subsphere_rule(m, 5, u);
        CHECK(sub.weight_sum() ==
              doctest::Approx((m - 1) * oracles::omega(m - 1)).epsilon(1e-12));
        for (const la::Vec& node : sub.nodes) {
            CHECK(std::fabs(la::dot(node, u)) < 1e-12);
            CHECK(la::norm2(node) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("low-discrepancy rule approximates smooth integrals") {
    const double want = 7 * oracles::omega(7) / 7.0;
    rules::SphereRule coarse = rules::build_rule(7, 11, rules::RuleKind::lowdisc);
    rules::SphereRule fine = rules::build_rule(7, 14, rules::RuleKind::lowdisc);
    CHECK(fine.weight_sum() == doctest::Approx(7 * oracles::omega(7)).epsilon(1e-12));
    auto f = [](const la::Vec& v) { return v[0] * v[0]; };
    const double err_coarse = std::fabs(rules::integrate(coarse, f) - want);
    const double err_fine = std::fabs(rules::integrate(fine, f) - want);
    CHECK(err_fine < 1e-3 * want);
    CHECK(err_fine < err_coarse);
}
