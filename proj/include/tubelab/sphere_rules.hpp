// Quadrature on unit spheres of tangent spaces: product rules with
// controlled polynomial degree for any dimension, a deterministic
// low-discrepancy alternative for dimensions where product rules get
// expensive, equator-aware rules adapted to an axis (for the |<u,v>|
// kernel of the cosine transform), hemisphere restrictions, and great
// subsphere rules.

#ifndef TUBELAB_SPHERE_RULES_HPP
#define TUBELAB_SPHERE_RULES_HPP

#include <string>
#include <vector>

#include "tubelab/linalg.hpp"

namespace tubelab::rules {

using la::Mat;
using la::Vec;

enum class RuleKind { product, lowdisc };

struct SphereRule {
    int dim = 0;  // ambient dimension m; nodes live on S^{m-1}
    std::vector<Vec> nodes;
    Vec weights;
    bool antipodal = false;
    int level = 0;
    RuleKind kind = RuleKind::product;

    size_t size() const { return nodes.size(); }
    double weight_sum() const;
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int q, Vec& nodes, Vec& weights);

// Full-sphere rule. Product rules are exact on polynomials of degree
// <= 2*level; the low-discrepancy rule (Halton points pushed through
// the inverse normal map, antipodally symmetrized) carries ~2^level
// node pairs and equal weights.
SphereRule build_rule(int m, int level, RuleKind kind = RuleKind::product);

// Rule whose polar axis is u, with the polar integral split at the
// equator so that kernels with a kink at <u,v> = 0 are integrated
// panel-smooth. Antipodally symmetric by construction.
SphereRule polar_adapted_rule(int m, int level, const Vec& u);

// Keeps nodes with <node,u> > 0; nodes on the equator (within tol)
// enter with half weight, so opposite hemispheres partition the rule.
SphereRule hemisphere_restrict(const SphereRule& rule, const Vec& u, double tol = 1e-13);

// Rule on the great subsphere orthogonal to u: an (m-1)-dimensional
// rule embedded into u^perp by a deterministic Householder basis.
SphereRule great_subsphere_rule(int m, int level, const Vec& u,
                                RuleKind kind = RuleKind::product);

double pairwise_sum_rule(const std::vector<double>& terms);

template <class F>
double integrate(const SphereRule& rule, F&& f) {
    std::vector<double> terms(rule.size());
    for (size_t i = 0; i < rule.size(); ++i) terms[i] = rule.weights[i] * f(rule.nodes[i]);
    return pairwise_sum_rule(terms);
}

// Value and a crude error estimate (difference against the first half
// of the node sequence for low-discrepancy rules, against a coarser
// product rule otherwise).
struct Estimated {
    double value = 0.0;
    double error = 0.0;
};

}  // namespace tubelab::rules

#endif
