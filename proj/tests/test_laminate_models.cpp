#include "doctest.h"

#include "effcond/laminate_models.hpp"
#include "effcond/reference_solver.hpp"
#include "support.hpp"

using namespace effcond;

TEST_CASE("diagonal rational form") {
  CHECK(std::abs(eval_rational_diag({{1.0, 0.5, 0.0}, {0.2, 0.5, 0.3}}, 2.0, 2.0) - 2.0) <
        1e-14);
  CHECK(std::abs(eval_rational_diag({{1.0, 0.0}, {0.3, 0.7}}, 5.0, 2.0) - (1.5 + 1.4)) < 1e-14);
  CHECK(std::abs(eval_rational_diag({{1.0, 0.5, 0.0}, {0.0, 1.0, 0.0}}, 2.0, 1.0) - 4.0 / 3.0) <
        1e-14);
  CHECK_THROWS_AS(eval_rational_diag({{1.0, 0.5, 0.0}, {0.5, 0.6, 0.0}}, 1.0, 1.0),
                  ConstraintViolated);
  CHECK_THROWS_AS(eval_rational_diag({{1.0, 0.7, 0.8, 0.0}, {0.25, 0.25, 0.25, 0.25}}, 1.0, 1.0),
                  ConstraintViolated);
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const cplx s1 = effcond::testing::random_lambda(rng, 0.1, 3.0, 5.0);
    const cplx s2 = effcond::testing::random_lambda(rng, 0.1, 3.0, 5.0);
    CHECK(eval_rational_diag({{1.0, 0.6, 0.2, 0.0}, {0.1, 0.4, 0.3, 0.2}}, s1, s2).real() > 0.0);
  }
}

TEST_CASE("matrix rational form and sum rules") {
  const double f = 0.3;
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  const MatrixRationalRep trivial{{1.0, 0.0}, {f * I, (1.0 - f) * I}};
  const SumRuleResiduals r = check_sum_rules(trivial, f);
  CHECK(r.first < 1e-15);
  CHECK(r.second == doctest::Approx(f * (1.0 - f)));
  CHECK((eval_matrix_rational(trivial, 1.0, 1.0) - Tensor2::Identity()).norm() < 1e-14);
  CHECK_THROWS_AS(eval_matrix_rational({{1.0, 0.0}, {I, I}}, 1.0, 1.0), ConstraintViolated);

  // Three-term form fitted to f and f(1-f)/2 per direction.
  const double q = 0.5;
  const double a1 = f * (1.0 - f) / (2.0 * q * (1.0 - q));
  const double a0 = f - q * a1;
  const MatrixRationalRep fitted{{1.0, q, 0.0}, {a0 * I, a1 * I, (1.0 - a0 - a1) * I}};
  const SumRuleResiduals rf = check_sum_rules(fitted, f);
  CHECK(rf.first < 1e-14);
  CHECK(rf.second < 1e-14);
}

TEST_CASE("S* representation") {
  const SStarRep empty{};
  CHECK((eval_sstar(empty, cplx(2.0, 1.0)) - cplx(2.0, 1.0) * Tensor2::Identity()).norm() <
        1e-15);
  CHECK(phase_interchange_residual(empty) < 1e-14);

  Eigen::Matrix2d R;
  R << 0.0, -1.0, 1.0, 0.0;
  SStarRep one;
  one.s = {0.5};
  one.S = {0.5 * Eigen::Vector2d(0.01, 0.0).asDiagonal().toDenseMatrix()};
  one.A = one.S[0] / 0.5 + R.transpose() * one.S[0] * R / 0.5;
  CHECK(phase_interchange_residual(one) < 1e-12);
  CHECK(sstar_herglotz_holds(one));

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.05, 0.95), w(-1.0, 1.0);
  SStarRep rnd;
  Eigen::Matrix2d bound = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 3; ++i) {
    Eigen::Matrix2d B;
    B << w(rng), w(rng), w(rng), w(rng);
    rnd.s.push_back(u(rng));
    rnd.S.push_back(0.2 * B * B.transpose());
    bound += rnd.S.back() / rnd.s.back() + R.transpose() * rnd.S.back() * R / (1.0 - rnd.s.back());
  }
  rnd.A = bound + 0.1 * Eigen::Matrix2d::Identity();
  CHECK(phase_interchange_residual(rnd) < 1e-12);
  CHECK(sstar_herglotz_holds(rnd));

  SStarRep bad = rnd;
  bad.A = Eigen::Matrix2d::Zero();
  CHECK_THROWS_AS(eval_sstar(bad, 2.0), ConstraintViolated);
  bad = rnd;
  bad.s[0] = 1.2;
  CHECK_THROWS_AS(eval_sstar(bad, 2.0), ConstraintViolated);
  CHECK_THROWS_AS(eval_sstar(rnd, 0.5), ConstraintViolated);
}

TEST_CASE("polycrystal laminate limits") {
  LaminateProgram p;
  p.sigma0 = Eigen::Vector2cd(3.0, 1.0).asDiagonal();
  p.rotation0_deg = 20.0;
  p.steps = {{65.0, 1.0}};
  const Tensor2 R1 = rotation(65.0).cast<cplx>();
  CHECK((polycrystal_laminate(p) - R1.transpose() * p.sigma0 * R1).norm() < 1e-10);

  p.steps = {{65.0, 1e-12}};
  const Tensor2 R0 = rotation(20.0).cast<cplx>();
  CHECK((polycrystal_laminate(p) - R0.transpose() * p.sigma0 * R0).norm() < 1e-10);

  p.rotation0_deg = 0.0;
  p.steps = {{0.0, 0.5}};
  CHECK((polycrystal_laminate(p) - p.sigma0).norm() < 1e-12);
}

TEST_CASE("reference value independence and homogeneity") {
  LaminateProgram p;
  p.sigma0 << cplx(2.0, 0.3), 0.4, -0.1, cplx(1.0, 0.1);
  p.n0 = Eigen::Vector2d(std::cos(0.3), std::sin(0.3));
  p.rotation0_deg = 10.0;
  p.steps = {{45.0, 0.3}, {100.0, 0.6}, {-30.0, 0.5}};
  const Tensor2 a = polycrystal_laminate(p);
  p.sigma_ref = 11.0;
  const Tensor2 b = polycrystal_laminate(p);
  CHECK((a - b).norm() < 1e-9);
  p.sigma0 *= 2.0;
  p.sigma_ref = 22.0;
  CHECK((polycrystal_laminate(p) - 2.0 * b).norm() < 1e-9);
}

TEST_CASE("rank-one laminate matches the stripe oracle") {
  // Crystal diag(2,1); the 90 degree copy is diag(1,2). Layers normal to x1.
  LaminateProgram p;
  p.sigma0 = Eigen::Vector2cd(2.0, 1.0).asDiagonal();
  const Eigen::Matrix2d R1 = rotation(90.0);
  p.n0 = R1 * Eigen::Vector2d::UnitX();
  p.steps = {{90.0, 0.5}};
  const Tensor2 lam = polycrystal_laminate(p);

  const GridGeometry g = stripes(8, {0, 1, 4, 7});
  const Tensor2 s1 = Eigen::Vector2cd(1.0, 2.0).asDiagonal();
  const Tensor2 s2 = Eigen::Vector2cd(2.0, 1.0).asDiagonal();
  const Tensor2 ref = solve_effective(g, admissible_pair(s1, s2), 1e-12).sigma_star;
  CHECK((lam - ref).norm() < 1e-8);
  CHECK(std::abs(lam(0, 0) - 1.0 / (0.5 / 1.0 + 0.5 / 2.0)) < 1e-12);
}

TEST_CASE("singular brackets are reported") {
  LaminateProgram p;
  p.sigma0 = Tensor2::Identity();
  p.sigma_ref = 1.0;
  p.steps = {{0.0, 0.5}};
  CHECK_THROWS_AS(polycrystal_laminate(p), SingularStep);
  p.sigma_ref.reset();
  p.n0 = Eigen::Vector2d(2.0, 0.0);
  CHECK_THROWS_AS(polycrystal_laminate(p), ConstraintViolated);
}
