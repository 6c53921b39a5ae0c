#pragma once

#include <stdexcept>
#include <string>

namespace tbm {

// Some pairwise distance fell below the collision threshold.
class collision_error : public std::domain_error {
 public:
  collision_error(std::string pair, double distance)
      : std::domain_error("collision: |" + pair + "| = " + std::to_string(distance)),
        pair_(std::move(pair)),
        distance_(distance) {}
  const std::string& pair() const noexcept { return pair_; }
  double distance() const noexcept { return distance_; }

 private:
  std::string pair_;
  double distance_;
};

// Evaluation at a pole of the orbit parametrization.
class pole_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The normal frame or tau chart degenerated.
class chart_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The coefficient matrix is not of the expected Fuchsian shape.
class fuchsian_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Path clearance violation or step-size underflow during continuation.
class transport_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wraps any failure with the pipeline stage that raised it.
class pipeline_error : public std::runtime_error {
 public:
  pipeline_error(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace tbm
