// The cosine transform C(f)(u) = int |<u,v>| f(v) dv on the unit
// sphere, the hemispherical first-moment transform, and the Fubini
// identity on the Stiefel manifold of orthonormal 2-frames.

#ifndef TUBELAB_TRANSFORMS_HPP
#define TUBELAB_TRANSFORMS_HPP

#include <functional>
#include <optional>

#include "tubelab/sphere_rules.hpp"

namespace tubelab::rules {

enum class Parity { none, even, odd };

struct SphericalFunction {
    int dim = 0;
    std::function<double(const Vec&)> eval;
    Parity parity = Parity::none;
};

// Verifies a declared parity tag on sampled antipodal pairs.
bool parity_holds(const SphericalFunction& f, int samples = 64, double tol = 1e-10,
                  uint64_t seed = 7);

// Cosine transform at u, evaluated on a u-adapted rule so the |.|
// kink sits on a panel boundary.
double cosine_transform(const SphericalFunction& f, const Vec& u, int level);

// Hemisphere first moment: int_{S+(u)} <u,v> f(v) dv. Equals C(f)(u)/2
// for even f.
double hemisphere_moment(const SphericalFunction& f, const Vec& u, int level);

// Both iterated integrals of int_{S^{m-1}} int_{S^{m-2} orth w} f(u,v):
// lhs integrates u outside and v over the great subsphere of u, rhs
// swaps the roles.
struct FubiniPair {
    double lhs = 0.0;
    double rhs = 0.0;
};
FubiniPair stiefel_fubini_check(int m, const std::function<double(const Vec&, const Vec&)>& f,
                                int level);

}  // namespace tubelab::rules

#endif
