#include "tbm/fuchsian.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "tbm/errors.hpp"

namespace tbm {

namespace {

double max_entry(const Mat4c& m) { return m.cwiseAbs().maxCoeff(); }

// Neville extrapolation to h = 0 of samples f(h_k).
template <typename T>
T extrapolate_to_zero(const std::vector<double>& h, std::vector<T> f) {
  const std::size_t n = h.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) f[i] = (h[i + m] * f[i] - h[i] * f[i + 1]) / (h[i + m] - h[i]);
  return f[0];
}

double min_distance_to_others(const std::vector<cplx>& pts, std::size_t i) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (j != i) d = std::min(d, std::abs(pts[i] - pts[j]));
  return d;
}

}  // namespace

Mat4c minimal_norm_conjugation(const std::vector<Mat4c>& residues, int max_iter) {
  auto cost = [&](const Mat4c& V, const Mat4c& Vi) {
    double c = 0;
    for (const auto& r : residues) c += (Vi * r * V).squaredNorm();
    return c;
  };
  Mat4c V = Mat4c::Identity(), Vi = V;
  double f = cost(V, Vi);
  double eta = 1.0 / f;
  for (int it = 0; it < max_iter; ++it) {
    Mat4c G = Mat4c::Zero();
    for (const auto& r : residues) {
      const Mat4c b = Vi * r * V;
      G += b * b.adjoint() - b.adjoint() * b;
    }
    // Gradient flow V <- V exp(eta G) on the Hermitian directions.
    Eigen::SelfAdjointEigenSolver<Mat4c> es(0.5 * (G + G.adjoint()));
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      const Eigen::Vector4cd ex = (eta * es.eigenvalues()).array().exp().cast<cplx>();
      const Eigen::Vector4cd exi = ex.cwiseInverse();
      const Mat4c Vn = V * es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().adjoint();
      const Mat4c Vni = es.eigenvectors() * exi.asDiagonal() * es.eigenvectors().adjoint() * Vi;
      const double fn = cost(Vn, Vni);
      if (fn < f) {
        const double gain = (f - fn) / f;
        V = Vn;
        Vi = Vni;
        f = fn;
        eta *= 2;
        accepted = true;
        if (gain < 1e-12) return V;
      } else {
        eta /= 4;
      }
    }
    if (!accepted) break;
  }
  return V;
}

Mat4c FuchsianSystem::coefficient(cplx tau) const {
  Mat4c a = Mat4c::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) a += residues[i] / (tau - points[i]);
  return a;
}

Mat4c residue_by_contour(const LagrangeParam& p, cplx tau, double radius, int points) {
  Mat4c acc = Mat4c::Zero();
  for (int k = 0; k < points; ++k) {
    const cplx d = radius * std::polar(1.0, 2.0 * M_PI * (k + 0.5) / points);
    acc += d * normal_matrix(p, tau + d);
  }
  return acc / static_cast<double>(points);
}

Mat4c residue_by_rays(const LagrangeParam& p, cplx tau, double radius, int levels) {
  Mat4c acc = Mat4c::Zero();
  for (int ray = 0; ray < 4; ++ray) {
    const cplx dir = std::polar(1.0, M_PI / 4 + ray * M_PI / 2);
    std::vector<double> h;
    std::vector<Mat4c> f;
    for (int k = 0; k < levels; ++k) {
      h.push_back(radius * std::ldexp(1.0, -k));
      f.push_back(h.back() * dir * normal_matrix(p, tau + h.back() * dir));
    }
    acc += extrapolate_to_zero(h, f);
  }
  return acc / 4.0;
}

Eigen::Vector4cd predicted_infinity_exponents(const MassTriple& m, int shift, int c) {
  const double l1 = m.lambda1(), l2 = m.lambda2();
  return Eigen::Vector4cd(l1 + shift, l2 + shift, c - l1, c - l2);
}

FuchsianSystem build_fuchsian(const LagrangeParam& p, const FuchsianOptions& opt) {
  FuchsianSystem fs;
  fs.orbit = p;
  const auto [lo, hi] = p.roots();
  fs.points = {cplx(p.w0, 0), lo, hi};
  fs.chart.type = "identity";
  fs.chart.gauge = "k fixed so that P has roots w0 +/- i; normal frame scaled by diag(P, P, (w-w0)/P, (w-w0)/P)";
  fs.chart.w0 = p.w0;
  fs.chart.k = p.k;

  for (std::size_t i = 0; i < 3; ++i) {
    const double d = min_distance_to_others(fs.points, i);
    if (!(d > 0)) throw fuchsian_error("singular points are not distinct");
    const Mat4c rc = residue_by_contour(p, fs.points[i], 0.5 * d, opt.contour_points);
    const Mat4c rr = residue_by_rays(p, fs.points[i], 0.25 * d, opt.richardson_levels);
    fs.residues.push_back(rc);
    fs.residues_ray.push_back(rr);
    fs.residue_agreement =
        std::max(fs.residue_agreement, max_entry(rc - rr) / std::max(1.0, max_entry(rc)));
    if (max_entry(rc) < 1e-10) throw fuchsian_error("expected a pole at tau" + std::to_string(i) + ", found none");

    // A second-order pole would leave (tau - tau_i)^2 M4 -> nonzero.
    std::vector<double> h;
    std::vector<Mat4c> g;
    const cplx dir = std::polar(1.0, M_PI / 4);
    for (int k = 0; k < opt.richardson_levels; ++k) {
      h.push_back(0.25 * d * std::ldexp(1.0, -k));
      const cplx z = h.back() * dir;
      g.push_back(z * z * normal_matrix(p, fs.points[i] + z));
    }
    if (max_entry(extrapolate_to_zero(h, g)) > opt.remainder_tol * std::max(1.0, max_entry(rc)))
      throw fuchsian_error("pole of order >= 2 at tau" + std::to_string(i));
  }
  if (!(fs.residue_agreement < opt.residue_tol))
    throw fuchsian_error("residue methods disagree: " + std::to_string(fs.residue_agreement));

  // Centroid displaced perpendicular to the line of singular points by the mean pairwise distance.
  const cplx centroid = (fs.points[0] + fs.points[1] + fs.points[2]) / 3.0;
  const double mean_dist =
      (std::abs(fs.points[0] - fs.points[1]) + std::abs(fs.points[1] - fs.points[2]) +
       std::abs(fs.points[0] - fs.points[2])) / 3.0;
  const cplx along = (hi - lo) / std::abs(hi - lo);
  fs.basepoint = centroid + mean_dist * (along * cplx(0, -1));

  // Verification grid: rings around each point, rings around the centroid, far points.
  std::vector<cplx> grid{fs.basepoint};
  const double dmin = std::min({min_distance_to_others(fs.points, 0), min_distance_to_others(fs.points, 1),
                                min_distance_to_others(fs.points, 2)});
  for (const cplx c : fs.points)
    for (double r : {0.3 * dmin, 0.6 * dmin})
      for (int k = 0; k < 16; ++k) grid.push_back(c + r * std::polar(1.0, 2 * M_PI * (k + 0.25) / 16));
  for (double r : {2.0 * mean_dist, 4.0 * mean_dist, 50.0 * mean_dist})
    for (int k = 0; k < 16; ++k) grid.push_back(centroid + r * std::polar(1.0, 2 * M_PI * (k + 0.125) / 16));
  for (const cplx tau : grid) {
    double scale = 0;
    for (std::size_t i = 0; i < 3; ++i) scale += fs.residues[i].norm() / std::abs(tau - fs.points[i]);
    const double rem = (normal_matrix(p, tau) - fs.coefficient(tau)).norm() / scale;
    fs.fuchsian_remainder = std::max(fs.fuchsian_remainder, rem);
  }
  if (!(fs.fuchsian_remainder < opt.remainder_tol))
    throw fuchsian_error("analytic remainder " + std::to_string(fs.fuchsian_remainder) +
                         " (extra poles or a pole at infinity beyond Fuchsian)");

  // No hidden poles with nonzero residue inside a large disc.
  const Mat4c big = residue_by_contour(p, centroid, 8.0 * mean_dist, 4 * opt.contour_points);
  const Mat4c sum = fs.residues[0] + fs.residues[1] + fs.residues[2];
  fs.residue_sum_defect = max_entry(big - sum) / std::max(1.0, max_entry(sum));
  if (!(fs.residue_sum_defect < opt.residue_tol)) throw fuchsian_error("more than three finite poles");

  // Constant change of basis minimizing sum ||V^-1 R_i V||_F; conjugacy-invariant downstream.
  fs.chart.conjugation = minimal_norm_conjugation(fs.residues);
  {
    const Mat4c V = fs.chart.conjugation, Vi = V.inverse();
    for (auto* set : {&fs.residues, &fs.residues_ray})
      for (auto& r : *set) r = Vi * r * V;
  }

  Eigen::ComplexEigenSolver<Mat4c> es0(fs.residues[0], false);
  for (int i = 0; i < 4; ++i) {
    const cplx e = es0.eigenvalues()(i);
    fs.tau0_integer_defect = std::max(fs.tau0_integer_defect, std::abs(e - std::round(e.real())));
  }

  Eigen::ComplexEigenSolver<Mat4c> esi(fs.residue_at_infinity(), false);
  fs.infinity_exponents = esi.eigenvalues();
  std::sort(fs.infinity_exponents.begin(), fs.infinity_exponents.end(),
            [](cplx a, cplx b) { return a.real() > b.real(); });
  // The two largest are lambda1 + shift, lambda2 + shift; the others c - lambda.
  const double l1 = p.masses.lambda1(), l2 = p.masses.lambda2();
  const double top_mean = 0.5 * (fs.infinity_exponents(0).real() + fs.infinity_exponents(1).real());
  const double bottom_mean = 0.5 * (fs.infinity_exponents(2).real() + fs.infinity_exponents(3).real());
  fs.infinity_shift = static_cast<int>(std::lround(top_mean - 0.5 * (l1 + l2)));
  fs.infinity_c = static_cast<int>(std::lround(bottom_mean + 0.5 * (l1 + l2)));
  Eigen::Vector4cd pred = predicted_infinity_exponents(p.masses, fs.infinity_shift, fs.infinity_c);
  std::sort(pred.begin(), pred.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
  fs.infinity_exponent_defect = (fs.infinity_exponents - pred).cwiseAbs().maxCoeff();
  return fs;
}

}  // namespace tbm
