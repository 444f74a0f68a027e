// Small dense linear algebra for dimensions up to ~10.
// Everything is row-major over flat std::vector<double> storage; the
// problem sizes here never justify an external matrix library.

#ifndef TUBELAB_LINALG_HPP
#define TUBELAB_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace tubelab::la {

using Vec = std::vector<double>;

class Mat {
  public:
    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

    static Mat identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    Mat transposed() const;
    Vec col(int j) const;

  private:
    int rows_, cols_;
    std::vector<double> a_;
};

Mat operator*(const Mat& a, const Mat& b);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Vec matvec(const Mat& a, std::span<const double> x);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);

// LU with partial pivoting; `det` and `solve` are the only consumers.
struct Lu {
    Mat lu;
    std::vector<int> piv;
    int sign = 1;
    bool singular = false;
};
Lu lu_factor(Mat a);
double lu_det(const Lu& f);
Vec lu_solve(const Lu& f, Vec b);
Mat lu_solve_mat(const Lu& f, const Mat& b);

double det(const Mat& a);
Mat inverse(const Mat& a);
double trace(const Mat& a);

// Cholesky of an SPD matrix; returns false when the matrix is not
// positive definite (used to validate metric tensors).
bool cholesky(const Mat& a, Mat& lower);

// Thin SVD of a tall matrix via one-sided Jacobi rotations. Returns
// singular values (descending) and fills v (cols x cols). Good enough
// for the small least-squares systems in the series fits.
Vec jacobi_svd(Mat a, Mat& v, Mat& u);

// Householder completion: orthogonal matrix whose first column is the
// given unit vector. Deterministic; used to build adapted sphere rules
// and subsphere embeddings.
Mat householder_frame(std::span<const double> unit);

}  // namespace tubelab::la

#endif
