#include "tbm/masses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tbm {

MassTriple MassTriple::make(double m1, double m2, double m3) {
  MassTriple m{m1, m2, m3};
  m.validate();
  return m;
}

void MassTriple::validate() const {
  for (double m : {m1, m2, m3})
    if (!std::isfinite(m) || !(m > 0))
      throw std::invalid_argument("masses must be finite and positive, got " + std::to_string(m));
}

double MassTriple::theta() const {
  const double d12 = m1 - m2, d23 = m2 - m3, d13 = m1 - m3;
  const double s = S1();
  return 72.0 * (d12 * d12 + d23 * d23 + d13 * d13) / (s * s);
}

double MassTriple::lambda1() const { return 1.5 + 0.5 * std::sqrt(13.0 + std::sqrt(theta())); }
double MassTriple::lambda2() const { return 1.5 + 0.5 * std::sqrt(13.0 - std::sqrt(theta())); }

bool operator==(const MassTriple& a, const MassTriple& b) {
  return a.m1 == b.m1 && a.m2 == b.m2 && a.m3 == b.m3;
}

}  // namespace tbm
