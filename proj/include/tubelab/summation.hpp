// Deterministic reductions. Quadrature loops may run on several
// threads; every contribution is written to an indexed slot first and
// reduced with a fixed pairwise tree, so the result does not depend on
// the thread count.

#ifndef TUBELAB_SUMMATION_HPP
#define TUBELAB_SUMMATION_HPP

#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace tubelab {

inline double pairwise_sum(std::span<const double> x) {
    const size_t n = x.size();
    if (n <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(x.subspan(0, half)) + pairwise_sum(x.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& x) {
    return pairwise_sum(std::span<const double>(x));
}

struct KahanAccumulator {
    double sum = 0.0, carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Global worker count, set once from the CLI.
int worker_threads();
void set_worker_threads(int n);

// Runs fn(i) for i in [0, n). Work is split in contiguous chunks; fn
// must only write to state owned by index i.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace tubelab

#endif
