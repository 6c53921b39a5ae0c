#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "tbm/masses.hpp"

namespace tbm {

struct SpectralOptions {
  double cluster_tol = 1e-4;
  double rank_tol = 1e-6;  // relative singular-value threshold
};

struct EigenCluster {
  std::complex<double> value;  // cluster mean
  int multiplicity = 0;
  std::vector<int> blocks;  // Jordan block sizes, descending
};

struct SpectralData {
  Eigen::VectorXcd eigenvalues;
  std::vector<EigenCluster> clusters;
  // Clustering at 10x cluster_tol; differs from clusters when the grouping is not clear-cut.
  std::vector<EigenCluster> alternative;
  bool ambiguous = false;
  double min_separation = 0;  // smallest distance between distinct cluster centres
};

SpectralData spectral_analysis(const Eigen::MatrixXcd& T, const SpectralOptions& opt = {});

// Numerical rank with singular values below rel_tol * sigma_max treated as zero.
int numerical_rank(const Eigen::MatrixXcd& M, double rel_tol);

// {e^{2 pi i lambda1}, e^{-2 pi i lambda1}, e^{2 pi i lambda2}, e^{-2 pi i lambda2}}.
Eigen::Vector4cd theoretical_spectrum(const MassTriple& m);

// Bottleneck distance between multisets of equal size: min over matchings of the max pair distance.
double matching_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
// Matching distance to {1, ..., 1}.
double distance_to_ones(const Eigen::VectorXcd& a);

struct UnipotencyReport {
  double square_residual = 0;  // ||(T - I)^2|| / max(1, ||T - I||^2)
  int rank = 0;                // numerical rank of T - I
  double norm = 0;             // ||T - I||
};
UnipotencyReport unipotency(const Eigen::MatrixXcd& T, double rank_tol = 1e-6);

}  // namespace tbm
