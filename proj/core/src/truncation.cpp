#include "effcond/truncation.hpp"

#include <cmath>

#include "effcond/reference_solver.hpp"

namespace effcond {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd to_column(const VectorField &f) {
  return f.data.real() / static_cast<double>(f.n);
}

VectorField to_field(int n, const VectorXd &col) {
  VectorField f = VectorField::zeros(n);
  f.data = (col * static_cast<double>(n)).cast<cplx>();
  return f;
}

// Local operators on real columns.
MatrixXd phase_op(const GridGeometry &g, int idx, const MatrixXd &X) {
  const int n = g.n;
  const Index nn = static_cast<Index>(n) * n;
  const int comp = (idx - 1) % 2;
  const int phase = idx <= 2 ? 1 : 0;
  MatrixXd Y = MatrixXd::Zero(X.rows(), X.cols());
  for (Index p = 0; p < nn; ++p)
    if (g.chi[p] == phase)
      Y.row(comp * nn + p) = X.row(comp * nn + p);
  return Y;
}

MatrixXd rperp_op(int n, const MatrixXd &X) {
  const Index nn = static_cast<Index>(n) * n;
  MatrixXd Y(X.rows(), X.cols());
  Y.topRows(nn) = -X.bottomRows(nn);
  Y.bottomRows(nn) = X.topRows(nn);
  return Y;
}

MatrixXd reflect_op(const GridGeometry &g, const MatrixXd &X) {
  const int n = g.n;
  const Index nn = static_cast<Index>(n) * n;
  MatrixXd Y(X.rows(), X.cols());
  for (int i = 0; i < n; ++i) {
    const int src = ((g.mirror - i) % n + n) % n;
    for (int j = 0; j < n; ++j) {
      Y.row(i * n + j) = X.row(src * n + j);
      Y.row(nn + i * n + j) = -X.row(nn + src * n + j);
    }
  }
  return Y;
}

// Orthonormal basis for the range of X after removing the span of Q.
MatrixXd orthonormal_complement(const MatrixXd &X, const MatrixXd &Q,
                                double rank_tol) {
  if (X.cols() == 0)
    return MatrixXd(X.rows(), 0);
  MatrixXd Y = X;
  if (Q.cols() > 0) {
    Y -= Q * (Q.transpose() * Y);
    Y -= Q * (Q.transpose() * Y);
  }
  const double ref = std::max(X.norm(), 1e-300);
  Eigen::BDCSVD<MatrixXd> svd(Y, Eigen::ComputeThinU);
  const VectorXd &s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s[r] > rank_tol * ref)
    ++r;
  return svd.matrixU().leftCols(r);
}

MatrixXd hcat(std::initializer_list<const MatrixXd *> parts) {
  Index rows = 0, cols = 0;
  for (const MatrixXd *p : parts) {
    rows = p->rows();
    cols += p->cols();
  }
  MatrixXd out(rows, cols);
  Index c = 0;
  for (const MatrixXd *p : parts) {
    out.middleCols(c, p->cols()) = *p;
    c += p->cols();
  }
  return out;
}

MatrixXcd tensor_op(const TruncatedSpace &s, const Tensor2 &s1,
                    const Tensor2 &s2, const MatrixXd &X) {
  MatrixXcd Y(X.rows(), X.cols());
  for (Index c = 0; c < X.cols(); ++c) {
    VectorField f = to_field(s.geom.n, X.col(c));
    Y.col(c) = apply_tensor(f, s.geom, s1, s2).data / static_cast<double>(s.geom.n);
  }
  return Y;
}

} // namespace

Eigen::MatrixXd TruncatedSpace::basis() const { return hcat({&U, &E, &J}); }

long raw_field_count(int M) {
  long total = 0, p = 1;
  for (int m = 1; m <= M; ++m) {
    p *= 4;
    total += p;
  }
  return 4 * total;
}

std::vector<RawField> generate_fields(const GridGeometry &geom, int M,
                                      long budget) {
  if (M < 1)
    throw DimensionMismatch("M must be >= 1");
  if (raw_field_count(M) > budget)
    throw BudgetExceeded("raw field count " + std::to_string(raw_field_count(M)) +
                         " exceeds cap " + std::to_string(budget));
  const int n = geom.n;
  std::vector<RawField> out;
  for (int fam = 0; fam < 2; ++fam) {
    const bool current = fam == 1;
    for (int j = 1; j <= 2; ++j) {
      std::vector<RawField> prev;
      RawField base;
      base.j = j;
      base.current = current;
      base.field = j == 1 ? VectorField::constant(n, 1.0, 0.0)
                          : VectorField::constant(n, 0.0, 1.0);
      prev.push_back(base);
      for (int m = 1; m <= M; ++m) {
        std::vector<RawField> next;
        for (int a = 1; a <= 4; ++a)
          for (const RawField &p : prev) {
            RawField r;
            r.j = j;
            r.current = current;
            r.alpha.a.push_back(a);
            r.alpha.a.insert(r.alpha.a.end(), p.alpha.a.begin(), p.alpha.a.end());
            const VectorField pf = project_phase(a, p.field, geom);
            r.field = current ? project_divfree(pf) : project_gradient(pf);
            r.zero = r.field.norm() < 1e-13;
            next.push_back(std::move(r));
          }
        out.insert(out.end(), next.begin(), next.end());
        prev = std::move(next);
      }
    }
  }
  return out;
}

TruncatedSpace build_truncated_space(const GridGeometry &geom, int M,
                                     const TruncationOptions &opts) {
  const std::vector<RawField> raw = generate_fields(geom, M, opts.budget);
  const int n = geom.n;
  const Index N = 2 * static_cast<Index>(n) * n;

  TruncatedSpace sp;
  sp.geom = geom;
  sp.M = M;
  sp.U = MatrixXd::Zero(N, 2);
  sp.U.col(0).head(N / 2).setConstant(1.0 / n);
  sp.U.col(1).tail(N / 2).setConstant(1.0 / n);

  std::vector<VectorXd> ecols, jcols, top;
  for (const RawField &r : raw) {
    if (r.zero)
      continue;
    (r.current ? jcols : ecols).push_back(to_column(r.field));
    if (!r.current && r.j == 1 && r.alpha.order() == M)
      top.push_back(to_column(r.field));
  }
  auto stack = [N](const std::vector<VectorXd> &cols) {
    MatrixXd X(N, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
      X.col(c) = cols[c];
    return X;
  };
  const MatrixXd Et = orthonormal_complement(stack(ecols), sp.U, opts.rank_tol);
  const MatrixXd Qe = hcat({&sp.U, &Et});
  const MatrixXd Jt = orthonormal_complement(stack(jcols), Qe, opts.rank_tol);
  sp.dim_e_tilde = static_cast<int>(Et.cols());
  sp.dim_j_tilde = static_cast<int>(Jt.cols());

  const MatrixXd Psi = hcat({&Qe, &Jt});
  const MatrixXd Top = stack(top);
  MatrixXd Rraw(N, 4 * Top.cols());
  for (int i = 1; i <= 4; ++i)
    Rraw.middleCols((i - 1) * Top.cols(), Top.cols()) = phase_op(geom, i, Top);
  const MatrixXd R = orthonormal_complement(Rraw, Psi, opts.rank_tol);
  sp.dim_r = static_cast<int>(R.cols());

  sp.E = hcat({&Et, &R});
  const MatrixXd Rp = rperp_op(n, R);
  const MatrixXd withE = hcat({&Psi, &R});
  // R_perp images are orthogonal to everything else by construction; the
  // complement step only guards against roundoff.
  const MatrixXd Rp_orth = orthonormal_complement(Rp, withE, opts.rank_tol);
  sp.J = hcat({&Jt, &Rp_orth});

  const MatrixXd B = sp.basis();
  auto leak = [&](const MatrixXd &TB) {
    const MatrixXd res = TB - B * (B.transpose() * TB);
    return res.colwise().norm().maxCoeff();
  };
  for (int i = 1; i <= 4; ++i)
    sp.closure_residuals["P" + std::to_string(i)] = leak(phase_op(geom, i, B));
  sp.closure_residuals["Rperp"] = leak(rperp_op(n, B));
  sp.closure_residuals["Pi"] = leak(reflect_op(geom, B));
  sp.closure_residuals["orthogonality"] =
      (B.transpose() * B - MatrixXd::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff();

  for (const auto &[op, res] : sp.closure_residuals)
    if (res > opts.closure_tol)
      throw ClosureFailure(op + " residual " + std::to_string(res));
  return sp;
}

std::vector<Tensor2> truncated_series(const TruncatedSpace &space,
                                      const Tensor2 &dir1, const Tensor2 &dir2) {
  const int M = space.M;
  std::vector<Tensor2> coeffs(M + 1, Tensor2::Zero());
  coeffs[0] = Tensor2::Identity();
  const MatrixXcd Ec = space.E.cast<cplx>();
  const MatrixXcd Uc = space.U.cast<cplx>();
  for (int q = 0; q < 2; ++q) {
    Eigen::VectorXcd x = Uc.col(q);
    for (int p = 1; p <= M; ++p) {
      VectorField f = VectorField::zeros(space.geom.n);
      f.data = x * static_cast<double>(space.geom.n);
      const VectorField y = apply_tensor(f, space.geom, dir1, dir2);
      const Eigen::VectorXcd ycol = y.data / static_cast<double>(space.geom.n);
      coeffs[p].col(q) = mean(y);
      x = -(Ec * (Ec.adjoint() * ycol));
    }
  }
  return coeffs;
}

ExpansionComparison compare_expansions(const TruncatedSpace &space,
                                       const Tensor2 &dir1, const Tensor2 &dir2) {
  const SeriesCoefficients full =
      series_coefficients(space.geom, dir1, dir2, space.M);
  const std::vector<Tensor2> trunc = truncated_series(space, dir1, dir2);
  ExpansionComparison out;
  for (int p = 0; p <= space.M; ++p) {
    const double d = (full.coeffs[p] - trunc[p]).cwiseAbs().maxCoeff();
    out.by_order.push_back(d);
    out.max_discrepancy = std::max(out.max_discrepancy, d);
  }
  return out;
}

ExpansionComparison compare_expansions(const GridGeometry &geom, int M,
                                       const Tensor2 &dir1, const Tensor2 &dir2,
                                       const TruncationOptions &opts) {
  return compare_expansions(build_truncated_space(geom, M, opts), dir1, dir2);
}

Tensor2 truncated_sigma_star(const TruncatedSpace &space, const Tensor2 &sigma1,
                             const Tensor2 &sigma2) {
  const MatrixXcd Ec = space.E.cast<cplx>();
  const MatrixXcd SE = tensor_op(space, sigma1, sigma2, space.E);
  const MatrixXcd SU = tensor_op(space, sigma1, sigma2, space.U);
  const MatrixXcd A = Ec.adjoint() * SE;
  Eigen::PartialPivLU<MatrixXcd> lu(A);
  if (A.cols() > 0 && lu.rcond() < 1e-14)
    throw SingularA("truncated Galerkin matrix is singular");
  const MatrixXcd X = A.cols() > 0 ? MatrixXcd(lu.solve(-(Ec.adjoint() * SU)))
                                   : MatrixXcd(0, 2);
  const MatrixXcd J = SU + SE * X;
  // Cell averages are the coefficients along the U columns.
  return space.U.cast<cplx>().adjoint() * J;
}

} // namespace effcond
