#include "effcond/effective_approx.hpp"

#include <cmath>
#include <sstream>

namespace effcond {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

namespace {

constexpr double kMinRcond = 1e-14;

} // namespace

Tensor2 coupled_block(const CoupledTensor &L, int i, int j) {
  return L.block<2, 2>(2 * i, 2 * j);
}

CoupledTensor coupled_from_blocks(const Tensor2 &s11, const Tensor2 &s12,
                                  const Tensor2 &s21, const Tensor2 &s22) {
  CoupledTensor L;
  L.block<2, 2>(0, 0) = s11;
  L.block<2, 2>(0, 2) = s12;
  L.block<2, 2>(2, 0) = s21;
  L.block<2, 2>(2, 2) = s22;
  return L;
}

cplx sigma11_theorem1(const CanonicalRep &rep, const DiagonalTriple &t) {
  const RepMatrices m = derive(rep);
  const MatrixXcd M = m.Z2.cast<cplx>() * t.lambda2 + m.Z1.cast<cplx>() * t.lambda3 +
                      m.Y1.cast<cplx>() * (t.lambda1 - t.lambda2);
  Eigen::PartialPivLU<MatrixXcd> lu(M);
  if (!(lu.rcond() > kMinRcond))
    throw SingularResolvent("resolvent matrix is singular");
  const VectorXcd b = rep.beta.cast<cplx>();
  const cplx s = b.transpose() * lu.solve(b);
  if (s == cplx(0.0))
    throw SingularResolvent("vanishing quadratic form");
  return 1.0 / s;
}

Tensor2 sigma_diag_theorem1(const CanonicalRep &rep_primal,
                            const CanonicalRep &rep_dual,
                            const DiagonalTriple &t) {
  (void)rep_dual; // reserved for cross-validation by callers
  Tensor2 out = Tensor2::Zero();
  out(0, 0) = sigma11_theorem1(rep_primal, t);
  DiagonalTriple inv{1.0 / t.lambda2, 1.0 / t.lambda1, 1.0 / t.lambda3};
  out(1, 1) = 1.0 / sigma11_theorem1(rep_primal, inv);
  return out;
}

TheoremTwoEvaluator::TheoremTwoEvaluator(const CanonicalRep &rep) {
  const RepMatrices m = derive(rep);
  h_ = rep.half_m;
  beta_ = rep.beta;
  const int h = h_;
  // Embedding of U1 + E + U2 into the four-block basis: U2 = R U1 has
  // coefficients beta in the third block.
  MatrixXd E = MatrixXd::Zero(4 * h, 2 * h + 1);
  E.topLeftCorner(2 * h, 2 * h).setIdentity();
  E.block(2 * h, 2 * h, h, 1) = rep.beta;
  const MatrixXd R = block_rotation(h);
  for (int k = 0; k < 4; ++k) {
    const MatrixXd P = block_projection(m, k + 1);
    P_[k] = E.transpose() * P * E;
    PR_[k] = E.transpose() * P * R * E;
  }
}

MatrixXcd TheoremTwoEvaluator::assemble(const Tensor2 &s1, const Tensor2 &s2) const {
  // sigma = s11 P1 + s22 P2 - s12 P1 R + s21 P2 R, and likewise in phase 2.
  MatrixXcd A = s1(0, 0) * P_[0].cast<cplx>();
  A += s1(1, 1) * P_[1].cast<cplx>();
  A -= s1(0, 1) * PR_[0].cast<cplx>();
  A += s1(1, 0) * PR_[1].cast<cplx>();
  A += s2(0, 0) * P_[2].cast<cplx>();
  A += s2(1, 1) * P_[3].cast<cplx>();
  A -= s2(0, 1) * PR_[2].cast<cplx>();
  A += s2(1, 0) * PR_[3].cast<cplx>();
  return A;
}

Tensor2 TheoremTwoEvaluator::sigma_star(const Tensor2 &sigma1,
                                        const Tensor2 &sigma2) const {
  const int h = h_;
  const MatrixXcd A = assemble(sigma1, sigma2);
  Eigen::PartialPivLU<MatrixXcd> lu(A);
  rcond_ = lu.rcond();
  if (!(rcond_ > kMinRcond)) {
    std::ostringstream os;
    os << "reciprocal condition " << rcond_;
    throw SingularA(os.str());
  }
  // Gamma_0 factors: U1 = sum beta_i u_i, U2 is the last coordinate.
  MatrixXcd G = MatrixXcd::Zero(2 * h + 1, 2);
  G.block(0, 0, h, 1) = beta_.cast<cplx>();
  G(2 * h, 1) = 1.0;
  const Tensor2 inv = G.transpose() * lu.solve(G);
  return inv.inverse();
}

CoupledTensor TheoremTwoEvaluator::l_star(const CoupledTensor &L1,
                                          const CoupledTensor &L2) const {
  const int h = h_;
  const int d = 2 * h + 1;
  MatrixXcd A(2 * d, 2 * d);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      A.block(i * d, j * d, d, d) =
          assemble(coupled_block(L1, i, j), coupled_block(L2, i, j));
  Eigen::PartialPivLU<MatrixXcd> lu(A);
  rcond_ = lu.rcond();
  if (!(rcond_ > kMinRcond)) {
    std::ostringstream os;
    os << "reciprocal condition " << rcond_;
    throw SingularA(os.str());
  }
  MatrixXcd G = MatrixXcd::Zero(2 * d, 4);
  for (int i = 0; i < 2; ++i) {
    G.block(i * d, 2 * i, h, 1) = beta_.cast<cplx>();
    G(i * d + 2 * h, 2 * i + 1) = 1.0;
  }
  const CoupledTensor inv = G.transpose() * lu.solve(G);
  return inv.inverse();
}

Tensor2 sigma_star_theorem2(const CanonicalRep &rep, const Tensor2 &sigma1,
                            const Tensor2 &sigma2) {
  return TheoremTwoEvaluator(rep).sigma_star(sigma1, sigma2);
}

CoupledTensor l_star_coupled(const CanonicalRep &rep, const CoupledTensor &L1,
                             const CoupledTensor &L2) {
  return TheoremTwoEvaluator(rep).l_star(L1, L2);
}

} // namespace effcond
