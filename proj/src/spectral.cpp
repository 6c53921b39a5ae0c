#include "tbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tbm {

namespace {

using cplx = std::complex<double>;

std::vector<std::vector<int>> single_linkage(const Eigen::VectorXcd& ev, double tol) {
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(ev(i) - ev(j)) < tol) parent[find(i)] = find(j);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

std::vector<EigenCluster> analyse_clusters(const Eigen::MatrixXcd& T, const Eigen::VectorXcd& ev, double tol,
                                           double rank_tol) {
  const int n = static_cast<int>(T.rows());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd_t(T);
  std::vector<EigenCluster> out;
  for (const auto& g : single_linkage(ev, tol)) {
    EigenCluster c;
    for (int i : g) c.value += ev(i);
    c.value /= static_cast<double>(g.size());
    c.multiplicity = static_cast<int>(g.size());
    const Eigen::MatrixXcd N = T - c.value * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_n(N);
    const double scale = std::max(svd_t.singularValues()(0), svd_n.singularValues()(0));
    // nullity(N^k) - nullity(N^{k-1}) = number of blocks of size >= k.
    std::vector<int> at_least{0};
    Eigen::MatrixXcd Nk = Eigen::MatrixXcd::Identity(n, n);
    int prev_null = 0;
    for (int k = 1; k <= c.multiplicity; ++k) {
      Nk = Nk * N;
      Eigen::JacobiSVD<Eigen::MatrixXcd> s(Nk);
      const double thr = rank_tol * std::pow(scale, k);
      int rank = 0;
      for (int j = 0; j < n; ++j) rank += s.singularValues()(j) > thr;
      const int null = std::min(n - rank, c.multiplicity);
      at_least.push_back(null - prev_null);
      prev_null = null;
      if (null >= c.multiplicity) break;
    }
    for (std::size_t k = 1; k < at_least.size(); ++k) {
      const int exact = at_least[k] - (k + 1 < at_least.size() ? at_least[k + 1] : 0);
      for (int b = 0; b < exact; ++b) c.blocks.push_back(static_cast<int>(k));
    }
    std::sort(c.blocks.rbegin(), c.blocks.rend());
    out.push_back(c);
  }
  return out;
}

bool same_partition(const std::vector<EigenCluster>& a, const std::vector<EigenCluster>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].multiplicity != b[i].multiplicity || a[i].blocks != b[i].blocks) return false;
  return true;
}

}  // namespace

int numerical_rank(const Eigen::MatrixXcd& M, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i) r += s(i) > rel_tol * s(0);
  return r;
}

SpectralData spectral_analysis(const Eigen::MatrixXcd& T, const SpectralOptions& opt) {
  SpectralData d;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(T, false);
  d.eigenvalues = es.eigenvalues();
  std::vector<int> order(d.eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const cplx x = d.eigenvalues(a), y = d.eigenvalues(b);
    return std::arg(x) != std::arg(y) ? std::arg(x) < std::arg(y) : std::abs(x) < std::abs(y);
  });
  Eigen::VectorXcd sorted(d.eigenvalues.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted(i) = d.eigenvalues(order[i]);
  d.eigenvalues = sorted;
  d.clusters = analyse_clusters(T, d.eigenvalues, opt.cluster_tol, opt.rank_tol);
  d.alternative = analyse_clusters(T, d.eigenvalues, 10 * opt.cluster_tol, opt.rank_tol);
  d.ambiguous = !same_partition(d.clusters, d.alternative);
  d.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.clusters.size(); ++i)
    for (std::size_t j = i + 1; j < d.clusters.size(); ++j)
      d.min_separation = std::min(d.min_separation, std::abs(d.clusters[i].value - d.clusters[j].value));
  if (d.clusters.size() < 2) d.min_separation = 0;
  return d;
}

Eigen::Vector4cd theoretical_spectrum(const MassTriple& m) {
  const cplx i2pi(0, 2 * M_PI);
  const double l1 = m.lambda1(), l2 = m.lambda2();
  return {std::exp(i2pi * l1), std::exp(-i2pi * l1), std::exp(i2pi * l2), std::exp(-i2pi * l2)};
}

double matching_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("matching_distance: size mismatch");
  std::vector<int> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0;
    for (int i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a(i) - b(perm[i])));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return a.size() == 0 ? 0.0 : best;
}

double distance_to_ones(const Eigen::VectorXcd& a) {
  double worst = 0;
  for (int i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a(i) - 1.0));
  return worst;
}

UnipotencyReport unipotency(const Eigen::MatrixXcd& T, double rank_tol) {
  const Eigen::MatrixXcd N = T - Eigen::MatrixXcd::Identity(T.rows(), T.cols());
  UnipotencyReport r;
  r.norm = N.operatorNorm();
  r.square_residual = (N * N).operatorNorm() / std::max(1.0, r.norm * r.norm);
  r.rank = numerical_rank(N, rank_tol);
  return r;
}

}  // namespace tbm
