// Self-contained 64-bit RNG (splitmix64). The standard <random>
// distributions are implementation-defined, which would break the
// byte-identical-output requirement across toolchains.

#ifndef TUBELAB_RNG_HPP
#define TUBELAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace tubelab {

class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller on two fresh uniforms.
    double normal() {
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Uniform direction on the Euclidean unit sphere of R^n.
    std::vector<double> unit_vector(int n) {
        std::vector<double> v(n);
        double s2 = 0.0;
        do {
            s2 = 0.0;
            for (int i = 0; i < n; ++i) {
                v[i] = normal();
                s2 += v[i] * v[i];
            }
        } while (s2 < 1e-12);
        const double inv = 1.0 / std::sqrt(s2);
        for (double& c : v) c *= inv;
        return v;
    }

  private:
    uint64_t state_;
};

}  // namespace tubelab

#endif
