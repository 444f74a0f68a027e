// Chart-based Riemannian metrics: metric tensor field with first and
// second derivatives (analytic where a space provides them, 4th-order
// central differences otherwise), Christoffel symbols, curvature
// tensors, and the directional curvature operator X -> R(X,U)U that
// drives every Jacobi system.

#ifndef TUBELAB_METRIC_HPP
#define TUBELAB_METRIC_HPP

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tubelab/linalg.hpp"

namespace tubelab::geo {

using la::Mat;
using la::Vec;

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};
struct MetricError : std::runtime_error {
    explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};
struct EscapeError : std::runtime_error {
    double exit_parameter;
    explicit EscapeError(double s)
        : std::runtime_error("geodesic left the chart domain"), exit_parameter(s) {}
};
struct ConjugatePointError : std::runtime_error {
    double radius;
    explicit ConjugatePointError(double r)
        : std::runtime_error("conjugate point reached"), radius(r) {}
    ConjugatePointError(double r, const std::string& what)
        : std::runtime_error(what), radius(r) {}
};

// Rank-3/4 tensors, flat row-major storage.
class Ten3 {
  public:
    Ten3() : n_(0) {}
    explicit Ten3(int n) : n_(n), a_(static_cast<size_t>(n) * n * n, 0.0) {}
    double& operator()(int i, int j, int k) { return a_[(static_cast<size_t>(i) * n_ + j) * n_ + k]; }
    double operator()(int i, int j, int k) const {
        return a_[(static_cast<size_t>(i) * n_ + j) * n_ + k];
    }
    int dim() const { return n_; }

  private:
    int n_;
    std::vector<double> a_;
};

class Ten4 {
  public:
    Ten4() : n_(0) {}
    explicit Ten4(int n) : n_(n), a_(static_cast<size_t>(n) * n * n * n, 0.0) {}
    double& operator()(int i, int j, int k, int l) {
        return a_[((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return a_[((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    int dim() const { return n_; }

  private:
    int n_;
    std::vector<double> a_;
};

struct CurvatureData {
    Ten4 riemann;  // R^l_{ijk}: R(d_i, d_j) d_k = R^l_{ijk} d_l
    Mat ricci;     // rho_{jk} = R^i_{ijk}
    double scalar = 0.0;
    double noise_estimate = 0.0;  // rough FD noise bound; 0 for analytic paths
};

// A coordinate box with an optional extra validity predicate.
struct ChartDomain {
    Vec lo, hi;
    std::function<bool(const double*)> predicate;  // optional

    bool contains(const double* x) const {
        for (size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return !predicate || predicate(x);
    }
};

// Metric tensor field on a single chart. Derived classes provide g and
// may override the derivative/curvature entry points with closed forms.
class MetricField {
  public:
    explicit MetricField(int dim) : n_(dim) {}
    virtual ~MetricField() = default;

    int dim() const { return n_; }

    virtual void metric(const double* x, Mat& g) const = 0;

    // dg(k, i, j) = d_k g_{ij}. Default: 4th-order central differences.
    virtual void dmetric(const double* x, Ten3& dg) const;
    // d2g(m, k, i, j) = d_m d_k g_{ij}. Default: differences of dmetric.
    virtual void d2metric(const double* x, Ten4& d2g) const;
    virtual bool analytic_derivatives() const { return false; }

    // Gamma(k, i, j) = Gamma^k_{ij}, from the Koszul formula.
    virtual void christoffel(const double* x, Ten3& gamma) const;
    // dGamma(m, k, i, j) = d_m Gamma^k_{ij}.
    virtual void dchristoffel(const double* x, Ten4& dgamma) const;

    // M with M.X = R(X,U)U in coordinates.
    virtual void directional_curvature(const double* x, const double* u, Mat& m) const;

    virtual void curvature(const double* x, CurvatureData& out) const;

    // Scalar curvature; spaces with a constant or cheap closed form
    // override this (the tube integrands query it per endpoint).
    virtual double scalar_curvature(const double* x) const;

    // Finite-difference step used when no analytic derivatives exist.
    double fd_step() const { return fd_step_; }
    void set_fd_step(double h) { fd_step_ = h; }

  protected:
    int n_;
    double fd_step_ = 1e-4;
};

// 17 decimal digits of pi; enough of the project speaks in volumes of
// balls and spheres that it lives here.
inline constexpr double kPi = 3.14159265358979323846;

// Volume of the m-dimensional Euclidean unit ball.
double unit_ball_volume(int m);
// Surface measure of the unit sphere S^{m-1} in R^m, i.e. m*omega_m.
double unit_sphere_area(int m);

// A chart metric: the field, its domain, and bookkeeping shared by the
// numerical experiments.
class ChartMetric {
  public:
    ChartMetric(std::shared_ptr<const MetricField> field, ChartDomain domain, std::string name,
                double safe_radius = 10.0)
        : field_(std::move(field)), domain_(std::move(domain)), name_(std::move(name)),
          safe_radius_(safe_radius) {}

    int dim() const { return field_->dim(); }
    const std::string& name() const { return name_; }
    const ChartDomain& domain() const { return domain_; }
    const MetricField& field() const { return *field_; }
    std::shared_ptr<const MetricField> field_ptr() const { return field_; }
    // Radius guard for experiments (conjugate points / chart reach).
    double safe_radius() const { return safe_radius_; }

    void require_inside(const double* x) const {
        if (!domain_.contains(x)) throw DomainError("point outside chart domain of " + name_);
    }

    Mat metric_at(const Vec& x) const;
    Ten3 christoffel_at(const Vec& x) const;
    CurvatureData curvature_at(const Vec& x) const;

    // g(p)-orthonormal basis (columns); deterministic (inverse
    // transpose of the Cholesky factor).
    Mat orthonormal_basis(const Vec& x) const;

    double inner(const Vec& x, const Vec& a, const Vec& b) const;
    double norm(const Vec& x, const Vec& a) const;

  private:
    std::shared_ptr<const MetricField> field_;
    ChartDomain domain_;
    std::string name_;
    double safe_radius_;
};

// Tangent vector with cached metric norm.
struct TangentVector {
    Vec point;
    Vec components;
    double norm = 0.0;

    static TangentVector make(const ChartMetric& m, Vec point, Vec components);
};

// Completes `first` (g-unit) to a g-orthonormal basis at x; columns of
// the result start with `first`. Pivoting is by largest residual norm,
// so the completion is deterministic.
Mat complete_frame(const ChartMetric& m, const Vec& x, const Vec& first);

}  // namespace tubelab::geo

#endif
