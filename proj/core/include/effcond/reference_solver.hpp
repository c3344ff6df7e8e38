#pragma once

#include <vector>

#include "effcond/field_space.hpp"

namespace effcond {

struct SolveReport {
  Tensor2 sigma_star;
  int iterations = 0;
  double residual = 0.0; // max relative residual over the two solves
};

struct SeriesCoefficients {
  int order = 0;
  std::vector<Tensor2> coeffs; // coeffs[p] multiplies t^p
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iterations = 0; // 0 selects 10 n^2
  int restart = 80;
};

// Effective tensor of the pixel composite from the periodic cell problem.
SolveReport solve_effective(const GridGeometry &geom, const AdmissiblePair &pair,
                            double tol = 1e-10);
SolveReport solve_effective(const GridGeometry &geom, const AdmissiblePair &pair,
                            const SolverOptions &opts);

// U1 . (Lambda_1 sigma Lambda_1)^{-1} U1 on U1 + E; equals 1/sigma*_11.
cplx sigma11_inverse_direct(const GridGeometry &geom, const AdmissiblePair &pair,
                            double tol = 1e-10);

// Taylor coefficients of sigma*(I + t dir1, I + t dir2) about t = 0.
SeriesCoefficients series_coefficients(const GridGeometry &geom,
                                       const Tensor2 &dir1, const Tensor2 &dir2,
                                       int M);

// Keller-Dykhne residual for isotropic phases s1 I, s2 I.
double duality_check(const GridGeometry &geom, cplx s1, cplx s2,
                     double tol = 1e-10);

} // namespace effcond
