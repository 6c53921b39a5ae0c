#include "tbm/polynomial.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace tbm {

PolySpace::PolySpace(int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("PolySpace: negative degree");
  for (int a = degree; a >= 0; --a)
    for (int b = degree - a; b >= 0; --b)
      for (int c = degree - a - b; c >= 0; --c) {
        const Exponent e{a, b, c, degree - a - b - c};
        lookup_[e] = static_cast<int>(monomials_.size());
        monomials_.push_back(e);
      }
}

int PolySpace::index(const Exponent& e) const {
  const auto it = lookup_.find(e);
  return it == lookup_.end() ? -1 : it->second;
}

std::string PolySpace::name(int i) const {
  const Exponent& e = monomial(i);
  std::string s;
  for (int v = 0; v < 4; ++v) {
    if (e[v] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(v + 1);
    if (e[v] > 1) s += "^" + std::to_string(e[v]);
  }
  return s.empty() ? "1" : s;
}

namespace {

template <typename Matrix>
Eigen::MatrixXcd kernel_basis(const Matrix& A, double rel_tol, Eigen::VectorXd* sv = nullptr) {
  const int n = static_cast<int>(A.cols());
  if (A.rows() == 0) return Eigen::MatrixXcd::Identity(n, n);
  // Pad to at least n rows so the full V of the SVD is available.
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(std::max<Eigen::Index>(A.rows(), n), n);
  M.topRows(A.rows()) = A;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (sv) *sv = s;
  const double thr = s(0) > 0 ? rel_tol * s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) rank += s(i) > thr;
  return svd.matrixV().rightCols(n - rank);
}

int column_rank(const Eigen::MatrixXcd& A, double rel_tol) {
  if (A.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i) r += s(i) > rel_tol * s(0);
  return r;
}

}  // namespace

bool is_square_zero(const Mat4cd& N, double tol) {
  return (N * N).norm() <= tol * std::max(1.0, N.squaredNorm());
}

VecXcd derivation_apply(const Mat4cd& N, const VecXcd& J, const PolySpace& space) {
  if (!is_square_zero(N)) throw std::invalid_argument("derivation_apply: N is not nilpotent of order 2");
  if (J.size() != space.dim()) throw std::invalid_argument("derivation_apply: coefficient size mismatch");
  return derivation_matrix<std::complex<double>>(N, space) * J;
}

InvarianceCheck unipotent_invariance_check(const Mat4cd& N, const VecXcd& J, const PolySpace& space,
                                           double threshold) {
  const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
  const Mat4cd U = Mat4cd::Identity() + N;
  const VecXcd moved = induced_action<std::complex<double>>(U, space) * J - J;
  InvarianceCheck r;
  r.composition_invariant = moved.size() == 0 || moved.cwiseAbs().maxCoeff() <= threshold * scale;
  const VecXcd dj = derivation_apply(N, J, space);
  r.derivation_annihilated = dj.size() == 0 || dj.cwiseAbs().maxCoeff() <= threshold * scale;
  return r;
}

InvariantSpace invariant_dimension(const std::vector<Mat4cd>& Ts, int d, double rel_tol) {
  if (d < 1) throw std::invalid_argument("invariant_dimension: degree must be >= 1");
  const PolySpace space(d);
  const int n = space.dim();
  Eigen::MatrixXcd stacked(n * static_cast<int>(Ts.size()), n);
  for (std::size_t i = 0; i < Ts.size(); ++i)
    stacked.middleRows(i * n, n) = induced_action<std::complex<double>>(Ts[i], space) - Eigen::MatrixXcd::Identity(n, n);
  InvariantSpace out;
  out.degree = d;
  out.basis = kernel_basis(stacked, rel_tol, &out.singular_values);
  out.dimension = static_cast<int>(out.basis.cols());
  return out;
}

int invariant_dimension_extended(const std::vector<Mat4cd>& Ts, int d, double rel_tol) {
  using cl = std::complex<long double>;
  const PolySpace space(d);
  const int n = space.dim();
  MatX<cl> stacked(n * static_cast<int>(Ts.size()), n);
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    const Mat4<cl> T = Ts[i].cast<cl>();
    stacked.middleRows(i * n, n) = induced_action<cl>(T, space) - MatX<cl>::Identity(n, n);
  }
  if (stacked.rows() == 0) return n;
  Eigen::FullPivLU<MatX<cl>> lu(stacked);
  if (lu.maxPivot() == 0) return n;
  // Pivots below rel_tol * max pivot count as zero.
  lu.setThreshold(static_cast<long double>(rel_tol));
  return n - static_cast<int>(lu.rank());
}

int derivation_kernel_dimension(const std::vector<Mat4cd>& Ns, int d, double rel_tol) {
  const PolySpace space(d);
  const int n = space.dim();
  Eigen::MatrixXcd stacked(n * static_cast<int>(Ns.size()), n);
  for (std::size_t i = 0; i < Ns.size(); ++i)
    stacked.middleRows(i * n, n) = derivation_matrix<std::complex<double>>(Ns[i], space);
  return static_cast<int>(kernel_basis(stacked, rel_tol).cols());
}

SubspaceComparison compare_kernels(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, double rel_tol) {
  const Eigen::MatrixXcd ka = kernel_basis(A, rel_tol), kb = kernel_basis(B, rel_tol);
  SubspaceComparison c;
  c.dim_a = static_cast<int>(ka.cols());
  c.dim_b = static_cast<int>(kb.cols());
  Eigen::MatrixXcd both(A.cols(), ka.cols() + kb.cols());
  both << ka, kb;
  c.dim_sum = column_rank(both, 1e-8);
  return c;
}

Eigen::Vector4cd gradient_at(const VecXcd& J, const PolySpace& space, const Eigen::Vector4cd& x) {
  Eigen::Vector4cd g = Eigen::Vector4cd::Zero();
  for (int i = 0; i < space.dim(); ++i) {
    if (J(i) == 0.0) continue;
    const Exponent& e = space.monomial(i);
    for (int v = 0; v < 4; ++v) {
      if (e[v] == 0) continue;
      std::complex<double> t = J(i) * static_cast<double>(e[v]);
      for (int u = 0; u < 4; ++u)
        for (int k = 0; k < e[u] - (u == v); ++k) t *= x(u);
      g(v) += t;
    }
  }
  return g;
}

int functional_rank(const std::vector<std::pair<int, VecXcd>>& polys, double rel_tol) {
  if (polys.empty()) return 0;
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> gauss;
  std::vector<PolySpace> spaces;
  for (const auto& pr : polys) spaces.emplace_back(pr.first);
  int best = 0;
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::Vector4cd x;
    for (int v = 0; v < 4; ++v) x(v) = {gauss(rng), gauss(rng)};
    Eigen::MatrixXcd G(polys.size(), 4);
    for (std::size_t k = 0; k < polys.size(); ++k) {
      Eigen::Vector4cd g = gradient_at(polys[k].second, spaces[k], x);
      if (g.norm() > 0) g.normalize();
      G.row(k) = g.transpose();
    }
    best = std::max(best, column_rank(G.transpose(), rel_tol));
  }
  return best;
}

std::string render(const VecXcd& J, const PolySpace& space, double drop) {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (int i = 0; i < J.size(); ++i) {
    if (std::abs(J(i)) <= drop) continue;
    if (!first) os << " + ";
    first = false;
    const auto c = J(i);
    if (c.imag() == 0)
      os << c.real();
    else
      os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    os << "*" << space.name(i);
  }
  return first ? "0" : os.str();
}

}  // namespace tbm
