#include "doctest.h"

#include "effcond/effective_approx.hpp"
#include "effcond/reference_solver.hpp"
#include "support.hpp"

using namespace effcond;
using effcond::testing::random_admissible;
using effcond::testing::random_lambda;

namespace {

const CanonicalRep &random8_rep() {
  static const CanonicalRep rep = [] {
    std::mt19937_64 rng(31);
    return extract_rep(build_eigenbasis(random_symmetric(8, rng)));
  }();
  return rep;
}

GridGeometry random8_geom() {
  std::mt19937_64 rng(31);
  return random_symmetric(8, rng);
}

} // namespace

TEST_CASE("diagonal formula trivial cases") {
  const CanonicalRep &rep = random8_rep();
  CHECK(std::abs(sigma11_theorem1(rep, {1.0, 1.0, 1.0}) - 1.0) < 1e-12);
  const cplx l(2.5, 0.7);
  CHECK(std::abs(sigma11_theorem1(rep, {l, l, l}) - l) < 1e-12);
  const cplx lam = 3.0;
  cplx s = 0.0;
  for (int i = 0; i < rep.half_m; ++i)
    s += rep.beta[i] * rep.beta[i] / (lam * rep.rho[i] + 1.0 - rep.rho[i]);
  CHECK(std::abs(sigma11_theorem1(rep, {1.0, 1.0, lam}) - 1.0 / s) < 1e-12);
}

TEST_CASE("diagonal formula on stripes gives the laminate means") {
  const CanonicalRep rep = extract_rep(build_eigenbasis(stripes(8, {0, 1, 2, 3})));
  const Tensor2 s = sigma_diag_theorem1(rep, rep, {2.0, 2.0, 1.0});
  CHECK(std::abs(s(0, 0) - 1.0 / (0.5 / 2.0 + 0.5)) < 1e-10);
  CHECK(std::abs(s(1, 1) - 1.5) < 1e-10);
}

TEST_CASE("diagonal formula with the Mendelson relation matches the oracle") {
  const CanonicalRep &rep = random8_rep();
  const GridGeometry g = random8_geom();
  std::mt19937_64 rng(32);
  for (int t = 0; t < 3; ++t) {
    const DiagonalTriple tr{random_lambda(rng), random_lambda(rng), random_lambda(rng)};
    const Tensor2 s1 = Eigen::Vector2cd(tr.lambda1, tr.lambda2).asDiagonal();
    const Tensor2 ref =
        solve_effective(g, admissible_pair(s1, tr.lambda3 * Tensor2::Identity()), 1e-12)
            .sigma_star;
    const Tensor2 d = sigma_diag_theorem1(rep, rep, tr);
    CHECK(std::abs(d(0, 0) - ref(0, 0)) < 1e-8);
    CHECK(std::abs(d(1, 1) - ref(1, 1)) < 1e-8);
  }
}

TEST_CASE("tensor formula reproduces uniform media and reduces to the diagonal one") {
  const CanonicalRep &rep = random8_rep();
  std::mt19937_64 rng(33);
  const Tensor2 s = random_admissible(rng);
  CHECK((sigma_star_theorem2(rep, s, s) - s).norm() < 1e-10);
  const DiagonalTriple tr{2.0, cplx(3.0, 0.5), 1.5};
  const Tensor2 s1 = Eigen::Vector2cd(tr.lambda1, tr.lambda2).asDiagonal();
  const Tensor2 t2 = sigma_star_theorem2(rep, s1, tr.lambda3 * Tensor2::Identity());
  CHECK(std::abs(t2(0, 0) - sigma11_theorem1(rep, tr)) < 1e-10);
}

TEST_CASE("tensor formula matches the oracle for non-symmetric complex phases") {
  const CanonicalRep &rep = random8_rep();
  const GridGeometry g = random8_geom();
  std::mt19937_64 rng(34);
  const TheoremTwoEvaluator ev(rep);
  for (int t = 0; t < 3; ++t) {
    const Tensor2 s1 = random_admissible(rng), s2 = random_admissible(rng);
    const Tensor2 ref = solve_effective(g, admissible_pair(s1, s2), 1e-12).sigma_star;
    CHECK((ev.sigma_star(s1, s2) - ref).norm() < 1e-7);
    CHECK(ev.last_rcond() > 1e-14);
  }
}

TEST_CASE("homogeneity") {
  const CanonicalRep &rep = random8_rep();
  std::mt19937_64 rng(35);
  const Tensor2 s1 = random_admissible(rng), s2 = random_admissible(rng);
  const cplx lam = std::polar(1.7, 0.4);
  CHECK((sigma_star_theorem2(rep, lam * s1, lam * s2) - lam * sigma_star_theorem2(rep, s1, s2))
            .norm() < 1e-12);
  const DiagonalTriple tr{2.0, 3.0, 1.0};
  CHECK(std::abs(sigma11_theorem1(rep, {lam * 2.0, lam * 3.0, lam}) -
                 lam * sigma11_theorem1(rep, tr)) < 1e-12);
}

TEST_CASE("coupled tensor") {
  const CanonicalRep &rep = random8_rep();
  std::mt19937_64 rng(36);
  const Tensor2 a1 = random_admissible(rng), a2 = random_admissible(rng);
  const Tensor2 b1 = random_admissible(rng), b2 = random_admissible(rng);
  const Tensor2 Z = Tensor2::Zero();

  const CoupledTensor L = coupled_from_blocks(a1, Z, Z, b1);
  CHECK((l_star_coupled(rep, L, L) - L).norm() < 1e-10);

  const CoupledTensor L1 = coupled_from_blocks(a1, Z, Z, b1);
  const CoupledTensor L2 = coupled_from_blocks(a2, Z, Z, b2);
  const CoupledTensor Ls = l_star_coupled(rep, L1, L2);
  CHECK((coupled_block(Ls, 0, 0) - sigma_star_theorem2(rep, a1, a2)).norm() < 1e-10);
  CHECK((coupled_block(Ls, 1, 1) - sigma_star_theorem2(rep, b1, b2)).norm() < 1e-10);
  CHECK(coupled_block(Ls, 0, 1).norm() < 1e-10);
  CHECK(coupled_block(Ls, 1, 0).norm() < 1e-10);

  // Small coupling: derivative against central differences.
  const Tensor2 c = 0.1 * random_admissible(rng);
  auto Lof = [&](double e, const Tensor2 &d1, const Tensor2 &d2) {
    return coupled_from_blocks(d1, e * c, e * c.transpose(), d2);
  };
  const double h = 1e-4;
  const CoupledTensor fd = (l_star_coupled(rep, Lof(h, a1, b1), Lof(h, a2, b2)) -
                            l_star_coupled(rep, Lof(-h, a1, b1), Lof(-h, a2, b2))) /
                           (2 * h);
  const double h2 = 1e-6;
  const CoupledTensor fd2 = (l_star_coupled(rep, Lof(h2, a1, b1), Lof(h2, a2, b2)) -
                             l_star_coupled(rep, Lof(-h2, a1, b1), Lof(-h2, a2, b2))) /
                            (2 * h2);
  CHECK((fd - fd2).norm() < 1e-6);
}
