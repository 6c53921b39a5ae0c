#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbm {

using Exponent = std::array<int, 4>;

// Homogeneous polynomials of degree d in x1..x4. Monomials in graded lexicographic order:
// x1^d, x1^(d-1) x2, ..., x4^d.
class PolySpace {
 public:
  explicit PolySpace(int degree);

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(monomials_.size()); }
  const std::vector<Exponent>& monomials() const { return monomials_; }
  const Exponent& monomial(int i) const { return monomials_.at(i); }
  // -1 when e is not a degree-d exponent.
  int index(const Exponent& e) const;
  std::string name(int i) const;  // e.g. "x1^2*x4"

 private:
  int degree_;
  std::vector<Exponent> monomials_;
  std::map<Exponent, int> lookup_;
};

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;

// Matrix of J -> J o T on the degree-d coefficient vectors. Pullback, so
// induced_action(T S) = induced_action(S) induced_action(T).
template <typename Scalar>
MatX<Scalar> induced_action(const Mat4<Scalar>& T, const PolySpace& space) {
  const int d = space.degree();
  std::vector<PolySpace> spaces;
  for (int k = 0; k <= d; ++k) spaces.emplace_back(k);
  MatX<Scalar> out = MatX<Scalar>::Zero(space.dim(), space.dim());
  for (int j = 0; j < space.dim(); ++j) {
    const Exponent& e = space.monomial(j);
    // Multiply the linear forms (T x)_i one at a time.
    VecX<Scalar> acc = VecX<Scalar>::Ones(1);
    int deg = 0;
    for (int i = 0; i < 4; ++i) {
      for (int r = 0; r < e[i]; ++r) {
        VecX<Scalar> next = VecX<Scalar>::Zero(spaces[deg + 1].dim());
        for (int m = 0; m < spaces[deg].dim(); ++m) {
          if (acc(m) == Scalar(0)) continue;
          for (int v = 0; v < 4; ++v) {
            if (T(i, v) == Scalar(0)) continue;
            Exponent f = spaces[deg].monomial(m);
            ++f[v];
            next(spaces[deg + 1].index(f)) += acc(m) * T(i, v);
          }
        }
        acc = std::move(next);
        ++deg;
      }
    }
    out.col(j) = acc;
  }
  return out;
}

// Matrix of the derivation J -> grad J . (N x) on degree-d coefficient vectors.
template <typename Scalar>
MatX<Scalar> derivation_matrix(const Mat4<Scalar>& N, const PolySpace& space) {
  MatX<Scalar> out = MatX<Scalar>::Zero(space.dim(), space.dim());
  for (int j = 0; j < space.dim(); ++j) {
    const Exponent& e = space.monomial(j);
    for (int i = 0; i < 4; ++i) {
      if (e[i] == 0) continue;
      for (int k = 0; k < 4; ++k) {
        if (N(i, k) == Scalar(0)) continue;
        Exponent f = e;
        --f[i];
        ++f[k];
        out(space.index(f), j) += Scalar(e[i]) * N(i, k);
      }
    }
  }
  return out;
}

using Mat4cd = Eigen::Matrix4cd;
using VecXcd = Eigen::VectorXcd;

bool is_square_zero(const Mat4cd& N, double tol = 1e-10);

// grad J . (N x); throws std::invalid_argument unless N^2 = 0.
VecXcd derivation_apply(const Mat4cd& N, const VecXcd& J, const PolySpace& space);

struct InvarianceCheck {
  bool composition_invariant = false;   // J((I + N) x) == J(x) coefficientwise
  bool derivation_annihilated = false;  // derivation_apply(N, J) == 0
};
InvarianceCheck unipotent_invariance_check(const Mat4cd& N, const VecXcd& J, const PolySpace& space,
                                           double threshold = 1e-10);

struct InvariantSpace {
  int degree = 0;
  int dimension = 0;
  Eigen::MatrixXcd basis;  // orthonormal columns
  Eigen::VectorXd singular_values;
};

// Common fixed space of the pullbacks by all Ts at degree d, by singular-value thresholding
// relative to the largest singular value of the stacked (induced(T) - I).
InvariantSpace invariant_dimension(const std::vector<Mat4cd>& Ts, int d, double rel_tol = 1e-6);

// Same dimension computed in long double with a complete-pivoting LU rank.
int invariant_dimension_extended(const std::vector<Mat4cd>& Ts, int d, double rel_tol = 1e-6);

// Nullity of the stacked derivation matrices of Ns at degree d.
int derivation_kernel_dimension(const std::vector<Mat4cd>& Ns, int d, double rel_tol = 1e-9);

// Dimensions of ker A, ker B and ker A + ker B; equal kernels iff all three agree.
struct SubspaceComparison {
  int dim_a = 0;
  int dim_b = 0;
  int dim_sum = 0;
  bool equal() const { return dim_a == dim_b && dim_sum == dim_a; }
};
SubspaceComparison compare_kernels(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, double rel_tol = 1e-9);

// Gradient of J at x.
Eigen::Vector4cd gradient_at(const VecXcd& J, const PolySpace& space, const Eigen::Vector4cd& x);

// Number of functionally independent polynomials among (degree, coefficients) pairs: the rank of
// their gradients at random points (fixed seed), each gradient normalized to unit length.
int functional_rank(const std::vector<std::pair<int, VecXcd>>& polys, double rel_tol = 1e-8);

std::string render(const VecXcd& J, const PolySpace& space, double drop = 0);

}  // namespace tbm
