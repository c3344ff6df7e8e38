#pragma once

#include <map>
#include <string>
#include <vector>

#include "effcond/field_space.hpp"

namespace effcond {

struct MultiIndex {
  std::vector<int> a; // each in {1,2,3,4}
  int order() const { return static_cast<int>(a.size()); }
};

struct RawField {
  MultiIndex alpha;
  int j = 1;          // 1: U1, 2: U2 = R U1
  bool current = false; // false: E family (gradient projection), true: J family
  VectorField field;
  bool zero = false;
};

struct TruncationOptions {
  double rank_tol = 1e-10;
  double closure_tol = 1e-9;
  long budget = 40000;
};

struct TruncatedSpace {
  GridGeometry geom;
  int M = 0;
  // Orthonormal columns in R^{2n^2}; the field of a column is n times it.
  Eigen::MatrixXd U, E, J; // E spans E~ + R, J spans J~ + R_perp
  int dim_e_tilde = 0, dim_j_tilde = 0, dim_r = 0;
  std::map<std::string, double> closure_residuals;

  int dim() const { return static_cast<int>(U.cols() + E.cols() + J.cols()); }
  Eigen::MatrixXd basis() const;
};

struct ExpansionComparison {
  std::vector<double> by_order; // max entrywise discrepancy per order 0..M
  double max_discrepancy = 0.0;
};

long raw_field_count(int M);
std::vector<RawField> generate_fields(const GridGeometry &geom, int M,
                                      long budget = 40000);

TruncatedSpace build_truncated_space(const GridGeometry &geom, int M,
                                     const TruncationOptions &opts = {});

// Series coefficients of sigma*(I + t dir1, I + t dir2) computed inside the space.
std::vector<Tensor2> truncated_series(const TruncatedSpace &space,
                                      const Tensor2 &dir1, const Tensor2 &dir2);

ExpansionComparison compare_expansions(const GridGeometry &geom, int M,
                                       const Tensor2 &dir1, const Tensor2 &dir2,
                                       const TruncationOptions &opts = {});
ExpansionComparison compare_expansions(const TruncatedSpace &space,
                                       const Tensor2 &dir1, const Tensor2 &dir2);

// Effective tensor of the truncated problem (Galerkin on U + E).
Tensor2 truncated_sigma_star(const TruncatedSpace &space, const Tensor2 &sigma1,
                             const Tensor2 &sigma2);

} // namespace effcond
