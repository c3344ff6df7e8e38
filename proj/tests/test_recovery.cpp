#include "doctest.h"

#include <algorithm>

#include "effcond/effective_approx.hpp"
#include "effcond/recovery.hpp"
#include "support.hpp"

using namespace effcond;

TEST_CASE("single mode from three samples") {
  const double r = 0.37;
  std::vector<SpectralSample> s;
  for (double lam : {0.5, 2.0, 7.0})
    s.push_back({lam, lam * r + 1.0 - r});
  const RecoveredSpectrum out = recover_spectrum(s, 1);
  REQUIRE(out.rho.size() == 1);
  CHECK(out.rho[0] == doctest::Approx(r).epsilon(1e-12));
  CHECK(out.beta_sq[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two modes on a real grid") {
  std::vector<cplx> lam;
  for (int i = 0; i < 9; ++i)
    lam.push_back(0.5 * std::pow(16.0, i / 8.0));
  const auto s = synthesize({0.25, 0.75}, {0.5, 0.5}, lam);
  const RecoveredSpectrum out = recover_spectrum(s, 2);
  CHECK(std::abs(out.rho[0] - 0.75) < 1e-6);
  CHECK(std::abs(out.rho[1] - 0.25) < 1e-6);
  CHECK(std::abs(out.beta_sq[0] - 0.5) < 1e-6);
  CHECK(std::abs(out.beta_sq[1] - 0.5) < 1e-6);
  CHECK(out.sum_deviation < 1e-6);
}

TEST_CASE("default sampling layout") {
  const auto lam = default_sampling(3);
  CHECK(lam.size() == 9);
  CHECK(std::count_if(lam.begin(), lam.end(), [](cplx l) { return l.imag() == 0.0; }) == 5);
}

TEST_CASE("round trip through a stripe rep") {
  const CanonicalRep rep = extract_rep(build_eigenbasis(stripes(8, {0, 1, 2, 3})));
  std::vector<double> rho, bsq;
  for (int i = 0; i < rep.half_m; ++i)
    if (rep.beta[i] * rep.beta[i] > 1e-12) {
      rho.push_back(rep.rho[i]);
      bsq.push_back(rep.beta[i] * rep.beta[i]);
    }
  const int k = static_cast<int>(rho.size());
  std::vector<SpectralSample> s;
  for (cplx l : default_sampling(k))
    s.push_back({l, sigma11_theorem1(rep, {1.0, 1.0, l})});
  const RecoveredSpectrum out = recover_spectrum(s, k);
  for (cplx l : default_sampling(k, 0.2, 5.0)) {
    cplx inv = 0.0;
    for (int i = 0; i < k; ++i)
      inv += out.beta_sq[i] / (l * out.rho[i] + 1.0 - out.rho[i]);
    CHECK(std::abs(1.0 / inv - sigma11_theorem1(rep, {1.0, 1.0, l})) < 1e-6);
  }
}

TEST_CASE("too many modes requested") {
  const auto s = synthesize({0.4}, {1.0}, default_sampling(2));
  CHECK_THROWS_AS(recover_spectrum(s, 2), Error);
  CHECK_THROWS_AS(recover_spectrum(synthesize({0.4}, {1.0}, {1.0, 2.0}), 1), DimensionMismatch);
}
