#include "effcond/reference_solver.hpp"

#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "matrix_free.hpp"

namespace effcond {

namespace {

struct Rotated {
  AdmissiblePair pair;
  cplx undo = 1.0; // multiply results by this
};

Rotated rotate_if_needed(const AdmissiblePair &pair) {
  auto theta = find_phase_rotation(pair.sigma1, pair.sigma2);
  if (!theta)
    throw InadmissiblePair("no phase rotation makes both phases coercive");
  Rotated r;
  const cplx rot = std::polar(1.0, *theta);
  r.pair = admissible_pair(rot * pair.sigma1, rot * pair.sigma2);
  r.undo = 1.0 / rot;
  return r;
}

VectorField wrap(int n, const Eigen::VectorXcd &v) {
  VectorField f;
  f.n = n;
  f.data = v;
  return f;
}

struct GmresOutcome {
  Eigen::VectorXcd x;
  int iterations = 0;
  double residual = 0.0;
};

GmresOutcome run_gmres(const detail::MatrixFreeOp &op, const Eigen::VectorXcd &b,
                       const Eigen::VectorXcd &guess, const SolverOptions &opts,
                       int n) {
  Eigen::GMRES<detail::MatrixFreeOp, Eigen::IdentityPreconditioner> gmres;
  gmres.compute(op);
  gmres.set_restart(opts.restart);
  gmres.setTolerance(opts.tol);
  const long maxit = opts.max_iterations > 0 ? opts.max_iterations
                                             : 10L * n * n;
  gmres.setMaxIterations(static_cast<Eigen::Index>(maxit));
  GmresOutcome out;
  out.x = gmres.solveWithGuess(b, guess);
  out.iterations = static_cast<int>(gmres.iterations());
  // Recompute the true residual rather than trusting the recurrence.
  out.residual = (b - op.apply(out.x)).norm() / b.norm();
  if (!(out.residual <= opts.tol * 10.0)) {
    std::ostringstream os;
    os << "relative residual " << out.residual << " after " << out.iterations
       << " iterations";
    throw NonConvergence(os.str());
  }
  return out;
}

} // namespace

SolveReport solve_effective(const GridGeometry &geom, const AdmissiblePair &pair,
                            double tol) {
  SolverOptions opts;
  opts.tol = tol;
  return solve_effective(geom, pair, opts);
}

SolveReport solve_effective(const GridGeometry &geom, const AdmissiblePair &pair,
                            const SolverOptions &opts) {
  const Rotated rot = rotate_if_needed(pair);
  const Tensor2 &s1 = rot.pair.sigma1;
  const Tensor2 &s2 = rot.pair.sigma2;
  const int n = geom.n;
  const Eigen::Index size = 2 * static_cast<Eigen::Index>(n) * n;

  // Reference medium; the Krylov iterates stay in E0 + E, where the
  // operator reduces to Gamma_E sigma / sigma0.
  const double sigma0 = 0.5 * (rot.pair.c1 + rot.pair.c2);
  const Tensor2 ref = sigma0 * Tensor2::Identity();
  const Tensor2 d1 = s1 - ref, d2 = s2 - ref;

  detail::MatrixFreeOp op(size, [&](const Eigen::VectorXcd &x) {
    VectorField e = wrap(n, x);
    VectorField g = project_gradient(apply_tensor(e, geom, d1, d2));
    return Eigen::VectorXcd(x + g.data / sigma0);
  });

  SolveReport rep;
  for (int q = 0; q < 2; ++q) {
    VectorField e0 = VectorField::constant(n, q == 0 ? 1.0 : 0.0,
                                           q == 0 ? 0.0 : 1.0);
    GmresOutcome g = run_gmres(op, e0.data, e0.data, opts, n);
    VectorField e = wrap(n, g.x);
    rep.sigma_star.col(q) = mean(apply_tensor(e, geom, s1, s2));
    rep.iterations += g.iterations;
    rep.residual = std::max(rep.residual, g.residual);
  }
  rep.sigma_star *= rot.undo;
  return rep;
}

cplx sigma11_inverse_direct(const GridGeometry &geom, const AdmissiblePair &pair,
                            double tol) {
  const Rotated rot = rotate_if_needed(pair);
  const Tensor2 &s1 = rot.pair.sigma1;
  const Tensor2 &s2 = rot.pair.sigma2;
  const int n = geom.n;
  const Eigen::Index size = 2 * static_cast<Eigen::Index>(n) * n;
  const double scale = 0.5 * (rot.pair.c1 + rot.pair.c2);

  // Lambda_1 sigma Lambda_1 on U1 + E, identity on the complement so the
  // operator is nonsingular on the whole grid space.
  detail::MatrixFreeOp op(size, [&](const Eigen::VectorXcd &x) {
    VectorField v = wrap(n, x);
    VectorField l1 = project_lambda(1, v);
    VectorField s = project_lambda(1, apply_tensor(l1, geom, s1, s2));
    return Eigen::VectorXcd(s.data / scale + (v.data - l1.data));
  });

  SolverOptions opts;
  opts.tol = tol;
  VectorField u1 = VectorField::constant(n, 1.0, 0.0);
  GmresOutcome g = run_gmres(op, u1.data, u1.data, opts, n);
  const cplx val = inner(u1, wrap(n, g.x)) / scale;
  return val / rot.undo;
}

SeriesCoefficients series_coefficients(const GridGeometry &geom,
                                       const Tensor2 &dir1, const Tensor2 &dir2,
                                       int M) {
  if (M < 1)
    throw DimensionMismatch("series order must be >= 1");
  SeriesCoefficients sc;
  sc.order = M;
  sc.coeffs.assign(M + 1, Tensor2::Zero());
  sc.coeffs[0] = Tensor2::Identity();
  for (int q = 0; q < 2; ++q) {
    VectorField x = VectorField::constant(geom.n, q == 0 ? 1.0 : 0.0,
                                          q == 0 ? 0.0 : 1.0);
    for (int p = 1; p <= M; ++p) {
      VectorField y = apply_tensor(x, geom, dir1, dir2);
      sc.coeffs[p].col(q) = mean(y);
      x = project_gradient(y);
      x.data = -x.data;
    }
  }
  return sc;
}

double duality_check(const GridGeometry &geom, cplx s1, cplx s2, double tol) {
  const Tensor2 I = Tensor2::Identity();
  const Tensor2 a = solve_effective(geom, make_rotatable_pair(s1 * I, s2 * I), tol).sigma_star;
  const Tensor2 b = solve_effective(geom, make_rotatable_pair(s2 * I, s1 * I), tol).sigma_star;
  Tensor2 R;
  R << 0.0, -1.0, 1.0, 0.0;
  const Tensor2 dual = s1 * s2 * R * a.inverse() * R.transpose();
  return (b - dual).norm() / a.norm();
}

} // namespace effcond
