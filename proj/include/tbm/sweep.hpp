#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "tbm/ziglin.hpp"

namespace tbm {

struct SweepConfig {
  int samples = 100;
  std::uint64_t seed = 1;
  double floor = 1e-3;  // lower bound for each mass
  double total = 3;     // m1 + m2 + m3
  int jobs = 0;         // 0: hardware concurrency
  CertifyConfig certify;
};

struct SweepRow {
  int index = 0;
  MassTriple masses;
  double theta = 0, lambda1 = 0, lambda2 = 0;
  double tinf_distance_to_ones = 0;
  double product_distance_to_ones = 0;
  double lambda1_distance_to_one = 0;
  bool guard = false;  // 13 + sqrt(theta) is not an odd square
  std::string verdict;
  std::string failed_checks;  // ';'-separated names
  std::string error;
};

std::uint64_t splitmix64(std::uint64_t x);

// Sample i of the sweep: uniform on {m_j >= floor, sum m_j = total}, depending only on (seed, i).
MassTriple simplex_sample(std::uint64_t seed, int i, double floor = 1e-3, double total = 3);

SweepRow sweep_row(int index, const MassTriple& m, const CertifyConfig& cfg);

// Rows in index order regardless of the worker count.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct SweepSummary {
  int samples = 0;
  int passed = 0;
  int errors = 0;
  double min_tinf_distance_to_ones = 0;
  double min_lambda1_distance_to_one = 0;
  bool guard_holds = true;
};
SweepSummary summarize(const std::vector<SweepRow>& rows);

}  // namespace tbm
