// Embedded Dormand-Prince 5(4) integrator with step control tight
// enough (rtol 1e-10 / atol 1e-12 by default) that integration error
// stays well below the quadrature tolerances stacked on top of it.

#ifndef TUBELAB_ODE_HPP
#define TUBELAB_ODE_HPP

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tubelab::ode {

struct StiffnessError : std::runtime_error {
    double at;
    explicit StiffnessError(double s)
        : std::runtime_error("ode: step size underflow"), at(s) {}
};

// rhs(s, y, dy): fill dy with the derivative at (s, y).
using Rhs = std::function<void(double, const double*, double*)>;

class Dopri5 {
  public:
    Dopri5(int dim, Rhs rhs, double rtol = 1e-10, double atol = 1e-12);

    // Integrates y from s0 to s1 (either direction). on_sample, when
    // given, is invoked with (index, state) at each requested sample
    // parameter; samples must be sorted in integration direction and
    // lie within [s0, s1].
    void integrate(std::vector<double>& y, double s0, double s1,
                   std::span<const double> samples = {},
                   const std::function<void(size_t, const std::vector<double>&)>& on_sample = {});

    long steps_taken() const { return naccept_; }

  private:
    void step(double s, const std::vector<double>& y, double h, std::vector<double>& out,
              double& err);

    int n_;
    Rhs f_;
    double rtol_, atol_;
    long naccept_ = 0;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_;
    bool have_k1_ = false;
};

}  // namespace tubelab::ode

#endif
