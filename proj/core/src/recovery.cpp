#include "effcond/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace effcond {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

// g(lambda) = sum b_i / (lambda rho_i + 1 - rho_i)
cplx model(cplx lam, const VectorXd &rho, const VectorXd &b) {
  cplx g = 0.0;
  for (Index i = 0; i < rho.size(); ++i)
    g += b[i] / (lam * rho[i] + 1.0 - rho[i]);
  return g;
}

double max_rel_residual(const std::vector<cplx> &lam, const VectorXcd &g,
                        const VectorXd &rho, const VectorXd &b) {
  double worst = 0.0;
  for (std::size_t m = 0; m < lam.size(); ++m)
    worst = std::max(worst, std::abs(model(lam[m], rho, b) - g[m]) /
                                std::max(std::abs(g[m]), 1e-300));
  return worst;
}

// Greedy barycentric (AAA) fit with k + 1 support points; returns the k poles.
VectorXcd barycentric_poles(const std::vector<cplx> &lam, const VectorXcd &g,
                            int k) {
  const int m = static_cast<int>(lam.size());
  std::vector<int> supp;
  std::vector<bool> used(m, false);
  VectorXcd err = VectorXcd::Zero(m);
  VectorXcd wt;
  const cplx gmean = g.mean();
  for (int it = 0; it <= k; ++it) {
    int pick = -1;
    double best = -1.0;
    for (int i = 0; i < m; ++i) {
      if (used[i])
        continue;
      const double v = supp.empty() ? std::abs(g[i] - gmean) : std::abs(err[i]);
      if (v > best) {
        best = v;
        pick = i;
      }
    }
    supp.push_back(pick);
    used[pick] = true;

    std::vector<int> rest;
    for (int i = 0; i < m; ++i)
      if (!used[i])
        rest.push_back(i);
    const Index ns = static_cast<Index>(supp.size());
    MatrixXcd C(rest.size(), ns), L(rest.size(), ns);
    for (std::size_t r = 0; r < rest.size(); ++r)
      for (Index s = 0; s < ns; ++s) {
        C(r, s) = 1.0 / (lam[rest[r]] - lam[supp[s]]);
        L(r, s) = (g[rest[r]] - g[supp[s]]) * C(r, s);
      }
    Eigen::BDCSVD<MatrixXcd> svd(L, Eigen::ComputeFullV);
    wt = svd.matrixV().col(ns - 1);
    err.setZero();
    VectorXcd gs(ns);
    for (Index s = 0; s < ns; ++s)
      gs[s] = g[supp[s]];
    const VectorXcd num = C * wt.cwiseProduct(gs);
    const VectorXcd den = C * wt;
    for (std::size_t r = 0; r < rest.size(); ++r)
      err[rest[r]] = g[rest[r]] - num[r] / den[r];
  }

  // Zeros of sum_j w_j / (z - z_j): restrict the arrowhead pencil to the
  // complement of conj(w) and solve the resulting k x k eigenproblem.
  const Index ns = k + 1;
  VectorXcd z(ns);
  for (Index s = 0; s < ns; ++s)
    z[s] = lam[supp[s]];
  const VectorXcd nvec = wt.conjugate().normalized();
  Eigen::HouseholderQR<MatrixXcd> qr(nvec);
  const MatrixXcd Qfull = qr.householderQ() * MatrixXcd::Identity(ns, ns);
  const cplx lead = Qfull.col(0).adjoint() * nvec;
  const VectorXcd n0 = Qfull.col(0) * (lead / std::abs(lead));
  const MatrixXcd Q = Qfull.rightCols(k);
  const VectorXcd ones = VectorXcd::Ones(ns);
  const cplx n1 = n0.dot(ones);
  const MatrixXcd ZQ = z.asDiagonal() * Q;
  const MatrixXcd Mk = Q.adjoint() * ZQ - (Q.adjoint() * ones) * (n0.adjoint() * ZQ) / n1;
  Eigen::ComplexEigenSolver<MatrixXcd> es(Mk);
  if (es.info() != Eigen::Success)
    throw IllConditionedFit("pole eigenproblem failed");
  return es.eigenvalues();
}

} // namespace

std::vector<cplx> default_sampling(int k, double c1, double c2) {
  const int ns = 2 * k + 3;
  const int nreal = ns - ns / 2;
  const int nray = ns - nreal;
  std::vector<cplx> out;
  auto logspace = [&](int count, int i) {
    if (count == 1)
      return std::sqrt(c1 * c2);
    return c1 * std::pow(c2 / c1, static_cast<double>(i) / (count - 1));
  };
  for (int i = 0; i < nreal; ++i)
    out.emplace_back(logspace(nreal, i), 0.0);
  const cplx dir = std::polar(1.0, 0.75 * std::numbers::pi);
  for (int i = 0; i < nray; ++i)
    out.push_back(logspace(nray, i) * dir);
  return out;
}

std::vector<SpectralSample> synthesize(const std::vector<double> &rho,
                                       const std::vector<double> &beta_sq,
                                       const std::vector<cplx> &lambdas) {
  if (rho.size() != beta_sq.size())
    throw DimensionMismatch("rho and beta_sq lengths differ");
  const VectorXd r = Eigen::Map<const VectorXd>(rho.data(), rho.size());
  const VectorXd b = Eigen::Map<const VectorXd>(beta_sq.data(), beta_sq.size());
  std::vector<SpectralSample> out;
  for (cplx lam : lambdas)
    out.push_back({lam, 1.0 / model(lam, r, b)});
  return out;
}

namespace {

struct Fit {
  VectorXd rho, b;
  double misfit = 0.0;
};

// Residues for fixed rho, then a Gauss-Newton polish over (rho, b).
Fit fit_residues(const std::vector<cplx> &lam, const VectorXcd &g, VectorXd rho,
                 const RecoveryOptions &opts) {
  const int m = static_cast<int>(lam.size());
  const int k = static_cast<int>(rho.size());
  MatrixXd A(2 * m, k);
  VectorXd rhs(2 * m);
  for (int s = 0; s < m; ++s) {
    for (int i = 0; i < k; ++i) {
      const cplx v = 1.0 / (lam[s] * rho[i] + 1.0 - rho[i]);
      A(2 * s, i) = v.real();
      A(2 * s + 1, i) = v.imag();
    }
    rhs[2 * s] = g[s].real();
    rhs[2 * s + 1] = g[s].imag();
  }
  Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd &sv = svd.singularValues();
  if (!(sv[k - 1] > 0.0) || sv[0] / sv[k - 1] > opts.cond_limit)
    throw IllConditionedFit("residue system condition exceeds limit");
  VectorXd b = svd.solve(rhs);

  auto residual = [&](const VectorXd &r, const VectorXd &bb) {
    VectorXd res(2 * m);
    for (int s = 0; s < m; ++s) {
      const cplx d = model(lam[s], r, bb) - g[s];
      res[2 * s] = d.real();
      res[2 * s + 1] = d.imag();
    }
    return res;
  };
  double cur = residual(rho, b).norm();
  for (int it = 0; it < opts.polish_iterations && cur > 0.0; ++it) {
    MatrixXd J(2 * m, 2 * k);
    for (int s = 0; s < m; ++s)
      for (int i = 0; i < k; ++i) {
        const cplx den = lam[s] * rho[i] + 1.0 - rho[i];
        const cplx dr = -b[i] * (lam[s] - 1.0) / (den * den);
        const cplx db = 1.0 / den;
        J(2 * s, i) = dr.real();
        J(2 * s + 1, i) = dr.imag();
        J(2 * s, k + i) = db.real();
        J(2 * s + 1, k + i) = db.imag();
      }
    const VectorXd step = J.colPivHouseholderQr().solve(-residual(rho, b));
    const VectorXd r2 =
        (rho + step.head(k)).cwiseMax(opts.rho_floor).cwiseMin(1.0 - opts.rho_floor);
    const VectorXd b2 = b + step.tail(k);
    const double nxt = residual(r2, b2).norm();
    if (!(nxt < cur))
      break;
    rho = r2;
    b = b2;
    cur = nxt;
  }
  for (int i = 0; i < k; ++i)
    if (b[i] < opts.residue_floor)
      throw ModeCountMismatch("residue below floor; fewer visible modes than requested");
  return {rho, b, max_rel_residual(lam, g, rho, b)};
}

// Poles sit at lambda = -(1 - rho)/rho; a pole near zero is projected onto
// rho = 1 - floor.
VectorXd poles_to_rho(const VectorXcd &poles, double lam_scale,
                      const RecoveryOptions &opts) {
  VectorXd rho(poles.size());
  for (Index i = 0; i < poles.size(); ++i) {
    const cplx p = poles[i];
    if (!std::isfinite(std::abs(p)) || std::abs(p.imag()) > 1e-6 * (1.0 + std::abs(p)))
      throw ModeCountMismatch("fitted pole off the real axis");
    if (p.real() > 1e-8 * lam_scale)
      throw ModeCountMismatch("fitted pole on the positive real axis");
    rho[i] = std::clamp(1.0 / (1.0 - p.real()), opts.rho_floor, 1.0 - opts.rho_floor);
  }
  return rho;
}

} // namespace

RecoveredSpectrum recover_spectrum(const std::vector<SpectralSample> &samples,
                                   int k, const RecoveryOptions &opts) {
  if (k < 1)
    throw DimensionMismatch("mode count must be >= 1");
  const int m = static_cast<int>(samples.size());
  if (m < 2 * k + 1)
    throw DimensionMismatch("need at least 2k+1 samples");
  std::vector<cplx> lam(m);
  VectorXcd g(m);
  double lam_scale = 0.0;
  for (int i = 0; i < m; ++i) {
    if (!std::isfinite(std::abs(samples[i].value)) || samples[i].value == 0.0)
      throw ParseError("sample value must be finite and nonzero");
    lam[i] = samples[i].lambda;
    g[i] = 1.0 / samples[i].value;
    lam_scale = std::max(lam_scale, std::abs(lam[i]));
    for (int j = 0; j < i; ++j)
      if (lam[j] == lam[i])
        throw DimensionMismatch("sample points must be distinct");
  }

  // A mode with rho at the lower edge is a constant, not a pole, so the
  // fit is retried with k - 1 poles plus that constant.
  Fit fit;
  try {
    fit = fit_residues(lam, g, poles_to_rho(barycentric_poles(lam, g, k), lam_scale, opts),
                       opts);
  } catch (const ModeCountMismatch &) {
    VectorXd rho(k);
    if (k > 1)
      rho.head(k - 1) =
          poles_to_rho(barycentric_poles(lam, g, k - 1), lam_scale, opts);
    rho[k - 1] = opts.rho_floor;
    fit = fit_residues(lam, g, rho, opts);
  }

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int c) { return fit.rho[a] > fit.rho[c]; });
  RecoveredSpectrum out;
  for (int i : order) {
    out.rho.push_back(fit.rho[i]);
    out.beta_sq.push_back(fit.b[i]);
  }
  out.misfit = fit.misfit;
  out.sum_deviation = std::abs(fit.b.sum() - 1.0);
  return out;
}

} // namespace effcond
