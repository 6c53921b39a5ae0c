#include <doctest.h>

#include <random>

#include "tbm/spectral.hpp"

using namespace tbm;
using cplx = std::complex<double>;

TEST_CASE("Jordan structure of constructed matrices") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd V(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) V(i, j) = cplx(g(rng), g(rng));

  Eigen::MatrixXcd J = Eigen::MatrixXcd::Identity(4, 4);
  J(0, 1) = 1;
  J(2, 3) = 1;
  auto d = spectral_analysis(V * J * V.inverse());
  REQUIRE(d.clusters.size() == 1);
  CHECK(d.clusters[0].multiplicity == 4);
  CHECK(d.clusters[0].blocks == std::vector<int>{2, 2});
  CHECK(std::abs(d.clusters[0].value - 1.0) < 1e-6);

  // A single 4-block splits by eps^(1/4), above the default cluster tolerance.
  J(1, 2) = 1;
  d = spectral_analysis(V * J * V.inverse(), {1e-2, 1e-6});
  REQUIRE(d.clusters.size() == 1);
  CHECK(d.clusters[0].blocks == std::vector<int>{4});

  J = Eigen::MatrixXcd::Identity(4, 4);
  J(0, 0) = 2;
  J(1, 1) = cplx(0, 1);
  J(2, 3) = 1;
  d = spectral_analysis(V * J * V.inverse());
  CHECK(d.clusters.size() == 3);
  CHECK_FALSE(d.ambiguous);
  for (const auto& c : d.clusters)
    if (c.multiplicity == 2) CHECK(c.blocks == std::vector<int>{2});
}

TEST_CASE("near-coincident eigenvalues are flagged") {
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(3, 3);
  T(0, 0) = 1;
  T(1, 1) = 1.0 + 5e-4;
  T(2, 2) = -1;
  const auto d = spectral_analysis(T);
  CHECK(d.clusters.size() == 3);
  CHECK(d.alternative.size() == 2);
  CHECK(d.ambiguous);
}

TEST_CASE("matching distance") {
  Eigen::VectorXcd a(3), b(3);
  a << 1, 2, 3;
  b << 3.1, 1, 2;
  CHECK(matching_distance(a, b) == doctest::Approx(0.1));
  CHECK(matching_distance(a, a) == 0);
  CHECK(distance_to_ones(Eigen::VectorXcd::Ones(4)) == 0);
  Eigen::VectorXcd c(2);
  c << cplx(0, 1), cplx(0, -1);
  CHECK(distance_to_ones(c) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS(matching_distance(a, c));
}

TEST_CASE("theoretical spectrum lies on the unit circle in conjugate pairs") {
  for (const auto& m : {MassTriple::make(1, 1, 1), MassTriple::make(1, 2, 3), MassTriple::make(0.01, 0.01, 2.98)}) {
    const auto s = theoretical_spectrum(m);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(s(i)) == doctest::Approx(1.0));
    CHECK(std::abs(s(0) * s(1) - 1.0) < 1e-14);
    CHECK(std::abs(s(2) * s(3) - 1.0) < 1e-14);
  }
  // Equal masses: theta = 0, lambda = 3/2 + sqrt(13)/2.
  const auto s = theoretical_spectrum(MassTriple::make(1, 1, 1));
  const double l = 1.5 + std::sqrt(13.0) / 2;
  CHECK(std::abs(s(0) - std::polar(1.0, 2 * M_PI * l)) < 1e-14);
}

TEST_CASE("unipotency report") {
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Identity(4, 4);
  T(0, 1) = 3;
  T(2, 3) = -2;
  const auto u = unipotency(T);
  CHECK(u.rank == 2);
  CHECK(u.square_residual == 0);
  CHECK(u.norm == doctest::Approx(3));
  T(1, 2) = 1;
  CHECK(unipotency(T).square_residual > 0.1);
}
