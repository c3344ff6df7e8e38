#pragma once

#include <Eigen/Dense>

#include "effcond/canonical_rep.hpp"

namespace effcond {

struct DiagonalTriple {
  cplx lambda1 = 1.0, lambda2 = 1.0, lambda3 = 1.0;
};

// 4x4 tensor indexed (p,i),(q,j) -> row 2 i + p, column 2 j + q, so block
// (i,j) is sigma^(ij) with {sigma^(ij)}_pq = L_{piqj}.
using CoupledTensor = Eigen::Matrix4cd;

Tensor2 coupled_block(const CoupledTensor &L, int i, int j);
CoupledTensor coupled_from_blocks(const Tensor2 &s11, const Tensor2 &s12,
                                  const Tensor2 &s21, const Tensor2 &s22);

cplx sigma11_theorem1(const CanonicalRep &rep, const DiagonalTriple &t);

Tensor2 sigma_diag_theorem1(const CanonicalRep &rep_primal,
                            const CanonicalRep &rep_dual,
                            const DiagonalTriple &t);

Tensor2 sigma_star_theorem2(const CanonicalRep &rep, const Tensor2 &sigma1,
                            const Tensor2 &sigma2);

CoupledTensor l_star_coupled(const CanonicalRep &rep, const CoupledTensor &L1,
                             const CoupledTensor &L2);

// Precomputed block operators of a rep, reusable across many queries.
class TheoremTwoEvaluator {
public:
  explicit TheoremTwoEvaluator(const CanonicalRep &rep);

  Tensor2 sigma_star(const Tensor2 &sigma1, const Tensor2 &sigma2) const;
  CoupledTensor l_star(const CoupledTensor &L1, const CoupledTensor &L2) const;
  // Reciprocal condition estimate of A from the last factorization.
  double last_rcond() const { return rcond_; }
  int half_m() const { return h_; }

private:
  // (2h+1) x (2h+1) compression of sigma acting on U1 + E + U2.
  Eigen::MatrixXcd assemble(const Tensor2 &s1, const Tensor2 &s2) const;

  int h_ = 0;
  Eigen::VectorXd beta_;
  Eigen::MatrixXd P_[4];  // compressed P_k
  Eigen::MatrixXd PR_[4]; // compressed P_k R
  mutable double rcond_ = 0.0;
};

} // namespace effcond
