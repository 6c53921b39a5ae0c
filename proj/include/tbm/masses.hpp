#pragma once

namespace tbm {

struct MassTriple {
  double m1 = 1, m2 = 1, m3 = 1;

  // Throws std::invalid_argument unless all masses are finite and positive.
  static MassTriple make(double m1, double m2, double m3);
  void validate() const;

  double S1() const { return m1 + m2 + m3; }
  double S2() const { return m1 * m2 + m2 * m3 + m1 * m3; }
  // 144 (1 - 3 S2 / S1^2), written as a sum of squares so it is exactly 0 for equal masses.
  double theta() const;
  double lambda1() const;
  double lambda2() const;
};

bool operator==(const MassTriple& a, const MassTriple& b);

}  // namespace tbm
