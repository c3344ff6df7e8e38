#pragma once

#include <vector>

#include "effcond/field_space.hpp"

namespace effcond {

struct SpectralSample {
  cplx lambda;
  cplx value; // sigma*_11(1, 1, lambda)
};

struct RecoveredSpectrum {
  std::vector<double> rho;     // descending
  std::vector<double> beta_sq;
  double misfit = 0.0;         // max relative residual of 1/sigma*_11
  double sum_deviation = 0.0;  // |sum beta^2 - 1|
};

struct RecoveryOptions {
  double cond_limit = 1e12;
  double residue_floor = 1e-10;
  int polish_iterations = 20;
  double rho_floor = 1e-14; // recovered rho is kept in [floor, 1 - floor]
};

// 2k + 3 sample points: log-spaced reals in [c1, c2] plus a complex ray.
std::vector<cplx> default_sampling(int k, double c1 = 0.1, double c2 = 10.0);

// Samples of sigma*_11 for the given spectral data.
std::vector<SpectralSample> synthesize(const std::vector<double> &rho,
                                       const std::vector<double> &beta_sq,
                                       const std::vector<cplx> &lambdas);

RecoveredSpectrum recover_spectrum(const std::vector<SpectralSample> &samples,
                                   int k, const RecoveryOptions &opts = {});

} // namespace effcond
