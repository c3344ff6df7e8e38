#include "doctest.h"

#include "effcond/field_space.hpp"
#include "support.hpp"

using namespace effcond;
using effcond::testing::rel_diff;

namespace {

VectorField add(const VectorField &a, const VectorField &b) {
  VectorField c = a;
  c.data += b.data;
  return c;
}

} // namespace

TEST_CASE("phase projections partition the field") {
  std::mt19937_64 rng(1);
  for (int n : {8, 16}) {
    const GridGeometry g = random_symmetric(n, rng);
    for (int t = 0; t < 5; ++t) {
      const VectorField h = random_field(n, rng);
      VectorField sum = VectorField::zeros(n);
      for (int i = 1; i <= 4; ++i)
        sum = add(sum, project_phase(i, h, g));
      CHECK(rel_diff(sum, h) < 1e-12);
      const VectorField k = random_field(n, rng);
      for (int i = 1; i <= 4; ++i) {
        const VectorField pi = project_phase(i, h, g);
        CHECK(rel_diff(project_phase(i, pi, g), pi) < 1e-12);
        for (int j = 1; j <= 4; ++j)
          if (j != i)
            CHECK(project_phase(j, pi, g).norm() < 1e-12);
        CHECK(std::abs(inner(k, pi) - inner(project_phase(i, k, g), h)) < 1e-12);
      }
    }
  }
}

TEST_CASE("Lambda projections are complementary and self-adjoint") {
  std::mt19937_64 rng(2);
  for (int n : {8, 16, 12}) {
    const VectorField h = random_field(n, rng), k = random_field(n, rng);
    const VectorField l1 = project_lambda(1, h), l2 = project_lambda(2, h);
    CHECK(rel_diff(add(l1, l2), h) < 1e-12);
    CHECK(rel_diff(project_lambda(1, l1), l1) < 1e-12);
    CHECK(project_lambda(1, l2).norm() < 1e-12);
    CHECK(std::abs(inner(k, l1) - inner(project_lambda(1, k), h)) < 1e-12);
    // Divergence-free zero-mean fields are annihilated.
    CHECK(project_lambda(1, project_divfree(h)).norm() < 1e-12);
    CHECK(std::abs(mean(project_gradient(h))[0]) < 1e-14);
  }
}

TEST_CASE("rotation intertwines the projections") {
  std::mt19937_64 rng(3);
  for (int n : {8, 16}) {
    const GridGeometry g = random_symmetric(n, rng);
    const VectorField h = random_field(n, rng);
    const VectorField r = rotate_perp(h);
    CHECK(rel_diff(rotate_perp(project_phase(1, h, g)), project_phase(2, r, g)) < 1e-12);
    CHECK(rel_diff(rotate_perp(project_phase(3, h, g)), project_phase(4, r, g)) < 1e-12);
    CHECK(rel_diff(rotate_perp(project_lambda(1, h)), project_lambda(2, r)) < 1e-12);
  }
}

TEST_CASE("reflection is an involution commuting with P and Lambda") {
  std::mt19937_64 rng(4);
  for (int n : {8, 16}) {
    const GridGeometry g = random_symmetric(n, rng);
    const VectorField h = random_field(n, rng);
    CHECK(rel_diff(reflect(reflect(h, g), g), h) < 1e-14);
    CHECK(add(reflect(rotate_perp(h), g), rotate_perp(reflect(h, g))).norm() < 1e-12);
    for (int i = 1; i <= 4; ++i)
      CHECK(rel_diff(reflect(project_phase(i, h, g), g), project_phase(i, reflect(h, g), g)) <
            1e-12);
    for (int i = 1; i <= 2; ++i)
      CHECK(rel_diff(reflect(project_lambda(i, h), g), project_lambda(i, reflect(h, g))) <
            1e-12);
  }
}

TEST_CASE("checkerboard needs a shifted mirror") {
  const GridGeometry cb = checkerboard(8);
  CHECK(cb.f == doctest::Approx(0.5));
  std::vector<std::vector<int>> raw(8, std::vector<int>(8));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      raw[i][j] = cb.at(i, j);
  CHECK_THROWS_AS(load_geometry(raw), ReflectionSymmetryViolated);
  CHECK(load_geometry(raw, {true, 0}).mirror == cb.mirror);
}

TEST_CASE("geometry validation") {
  using Raw = std::vector<std::vector<int>>;
  CHECK_THROWS_AS(load_geometry(Raw(4, std::vector<int>(4, 0))), DegeneratePhase);
  CHECK_THROWS_AS(load_geometry(Raw(4, std::vector<int>(4, 1))), DegeneratePhase);
  CHECK_THROWS_AS(load_geometry({{1, 0, 0, 0}, {0}, {0, 0, 0, 0}, {0, 0, 0, 0}}), ParseError);
  CHECK_THROWS_AS(load_geometry(Raw(3, std::vector<int>(3, 0))), ParseError);
  CHECK_THROWS_AS(load_geometry({{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}),
                  ReflectionSymmetryViolated);
  const GridGeometry g = load_geometry({{1, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  CHECK(g.f == doctest::Approx(0.125));

  Raw rows013(4, std::vector<int>(4, 0));
  for (int i : {0, 1, 3})
    rows013[i].assign(4, 1);
  CHECK(load_geometry(rows013).f == doctest::Approx(0.75));
  Raw row1(4, std::vector<int>(4, 0));
  row1[1].assign(4, 1);
  CHECK_THROWS_AS(load_geometry(row1), ReflectionSymmetryViolated);
}

TEST_CASE("inner product conventions") {
  const VectorField a = VectorField::constant(8, 1.0, 0.0);
  CHECK(std::abs(inner(a, a) - 1.0) < 1e-15);
  CHECK(std::abs(inner(a, VectorField::constant(8, 0.0, 1.0))) < 1e-15);
  CHECK(std::abs(inner(VectorField::constant(8, cplx(0.0, 1.0), 0.0), a) - cplx(0.0, -1.0)) <
        1e-15);
  CHECK_THROWS_AS(inner(a, VectorField::constant(4, 1.0, 0.0)), DimensionMismatch);
}

TEST_CASE("admissibility") {
  const Tensor2 I = Tensor2::Identity();
  const AdmissiblePair p = admissible_pair(2.0 * I, I);
  CHECK(p.c1 == doctest::Approx(1.0));
  CHECK(p.c2 == doctest::Approx(2.0));
  CHECK_THROWS_AS(admissible_pair(-1.0 * I, I), InadmissiblePair);
  // -1 and 1 cannot be rotated into the same half-plane; i and 1 can.
  CHECK_FALSE(find_phase_rotation(-1.0 * I, I).has_value());
  CHECK(find_phase_rotation(cplx(0.0, 1.0) * I, I).has_value());
  CHECK_NOTHROW(make_rotatable_pair(cplx(-0.2, 1.0) * I, I));
}
