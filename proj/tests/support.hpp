#pragma once

#include <random>
#include <vector>

#include "effcond/field_space.hpp"

namespace effcond::testing {

// sigma = P + i S + N with P SPD, S symmetric, N antisymmetric, so the
// Hermitian part is P and the pair is admissible without rotation.
inline Tensor2 random_admissible(std::mt19937_64 &rng, double lo = 0.5,
                                 double hi = 3.0, bool complex_entries = true,
                                 bool nonsymmetric = true) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), e(lo, hi), a(0.0, 3.1415926535897931);
  const double th = a(rng);
  Eigen::Matrix2d Rt;
  Rt << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const Eigen::Matrix2d P = Rt * Eigen::Vector2d(e(rng), e(rng)).asDiagonal() * Rt.transpose();
  Eigen::Matrix2d S = Eigen::Matrix2d::Zero(), N = Eigen::Matrix2d::Zero();
  if (complex_entries) {
    S << u(rng), u(rng), 0.0, u(rng);
    S(1, 0) = S(0, 1);
  }
  if (nonsymmetric) {
    const double w = 0.5 * u(rng);
    N << 0.0, w, -w, 0.0;
  }
  return (P + N).cast<cplx>() + cplx(0.0, 1.0) * S.cast<cplx>();
}

inline cplx random_lambda(std::mt19937_64 &rng, double lo = 0.5, double hi = 4.0,
                          double im = 1.0) {
  std::uniform_real_distribution<double> r(lo, hi), i(-im, im);
  return {r(rng), i(rng)};
}

inline std::vector<GridGeometry> sample_geometries(int n, int randoms,
                                                   std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  std::vector<GridGeometry> out{checkerboard(n)};
  std::vector<int> rows;
  for (int i = 0; i < n / 2; ++i)
    rows.push_back(i);
  out.push_back(stripes(n, rows));
  for (int k = 0; k < randoms; ++k)
    out.push_back(random_symmetric(n, rng, 0.35 + 0.1 * k));
  return out;
}

inline double rel_diff(const VectorField &a, const VectorField &b) {
  return (a.data - b.data).norm() / std::max(1.0, b.data.norm());
}

} // namespace effcond::testing
