#include "tubelab/transforms.hpp"

#include <cmath>

#include "tubelab/rng.hpp"
#include "tubelab/summation.hpp"

namespace tubelab::rules {

bool parity_holds(const SphericalFunction& f, int samples, double tol, uint64_t seed) {
    if (f.parity == Parity::none) return true;
    Rng rng(seed);
    for (int s = 0; s < samples; ++s) {
        Vec v = rng.unit_vector(f.dim);
        Vec neg(v.size());
        for (size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
        const double a = f.eval(v), b = f.eval(neg);
        const double want = f.parity == Parity::even ? a : -a;
        if (std::fabs(b - want) > tol * (1.0 + std::fabs(a))) return false;
    }
    return true;
}

double cosine_transform(const SphericalFunction& f, const Vec& u, int level) {
    const SphereRule rule = polar_adapted_rule(f.dim, level, u);
    std::vector<double> terms(rule.size());
    for (size_t i = 0; i < rule.size(); ++i)
        terms[i] = rule.weights[i] * std::fabs(la::dot(rule.nodes[i], u)) * f.eval(rule.nodes[i]);
    return pairwise_sum(terms);
}

double hemisphere_moment(const SphericalFunction& f, const Vec& u, int level) {
    const SphereRule full = polar_adapted_rule(f.dim, level, u);
    const SphereRule half = hemisphere_restrict(full, u);
    std::vector<double> terms(half.size());
    for (size_t i = 0; i < half.size(); ++i)
        terms[i] = half.weights[i] * la::dot(half.nodes[i], u) * f.eval(half.nodes[i]);
    return pairwise_sum(terms);
}

FubiniPair stiefel_fubini_check(int m, const std::function<double(const Vec&, const Vec&)>& f,
                                int level) {
    const SphereRule outer = build_rule(m, level);
    FubiniPair out;
    std::vector<double> lhs_terms(outer.size()), rhs_terms(outer.size());
    for (size_t i = 0; i < outer.size(); ++i) {
        const Vec& w = outer.nodes[i];
        const SphereRule inner = great_subsphere_rule(m, level, w);
        std::vector<double> li(inner.size()), ri(inner.size());
        for (size_t j = 0; j < inner.size(); ++j) {
            li[j] = inner.weights[j] * f(w, inner.nodes[j]);
            ri[j] = inner.weights[j] * f(inner.nodes[j], w);
        }
        lhs_terms[i] = outer.weights[i] * pairwise_sum(li);
        rhs_terms[i] = outer.weights[i] * pairwise_sum(ri);
    }
    out.lhs = pairwise_sum(lhs_terms);
    out.rhs = pairwise_sum(rhs_terms);
    return out;
}

}  // namespace tubelab::rules
