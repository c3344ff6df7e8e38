#pragma once

#include <map>
#include <string>
#include <vector>

#include "effcond/field_space.hpp"

namespace effcond {

// How a retained mode was obtained. Paired modes are interior eigenfields
// with their rotated partner; One/Zero modes complete eigenvalues that sit
// exactly at 1 or 0 and carry rho = 1 - eps or eps.
enum class ModeKind { Paired, One, Zero };

struct SymmetricEigenbasis {
  GridGeometry geom;
  int half_m = 0;
  int full_size = 0; // number of modes in the completed spectrum
  double eps = 1e-14;
  // Columns are unit vectors in R^{2n^2}; the field of column k is n times it.
  Eigen::MatrixXd sym;  // 2n^2 x half_m, zero column for fictitious modes
  Eigen::MatrixXd anti; // 2n^2 x half_m, zero column for fictitious partners
  Eigen::VectorXd rho;
  Eigen::VectorXd beta; // (u_i, U1), non-negative
  std::vector<ModeKind> kind;
  std::vector<bool> has_sym, has_anti;

  bool truncated() const { return half_m < full_size; }
  // u_fields: 0..half_m-1 symmetric, half_m..2 half_m-1 partners.
  VectorField field(int k) const;
  std::vector<VectorField> u_fields() const;
};

struct CanonicalRep {
  int half_m = 0;
  int n1 = 0, n2 = 0;
  Eigen::VectorXd rho;
  Eigen::VectorXd beta;
  Eigen::MatrixXd H1; // n1 x (half_m - n1)
  Eigen::MatrixXd H2; // n2 x (half_m - n2)
  // Mode order used for K = [I H]; identity when empty.
  std::vector<int> perm1, perm2;
  // Truncated reps keep the measured Y1/Y3 blocks instead of the H form.
  bool compressed = false;
  Eigen::MatrixXd Y1c, Y3c;
};

struct RepMatrices {
  Eigen::MatrixXd Z1, Z2, Q, Qinv, Y1, Y2, Y3, Y4;
};

struct ValidationReport {
  std::map<std::string, double> residuals;
  double max_residual() const;
  bool ok(double tol) const { return max_residual() < tol; }
};

struct ExtractOptions {
  double rank_tol = 1e-8;
  double recon_tol = 1e-8;
};

SymmetricEigenbasis build_eigenbasis(const GridGeometry &geom, int half_m = 0,
                                     double eps = 1e-14);

// Full spectrum of Lambda_1 (P3 + P4) Lambda_1 on U1 + E, ascending.
Eigen::VectorXd operator_spectrum(const GridGeometry &geom);

CanonicalRep extract_rep(const SymmetricEigenbasis &basis,
                         const ExtractOptions &opts = {});
CanonicalRep extract_rep(const SymmetricEigenbasis &basis, double rank_tol);

// Measured Y1 = [(u_i, P1 u_j)] and Y3 = [(u_i, P3 u_j)] on the basis modes.
void measured_blocks(const SymmetricEigenbasis &basis, Eigen::MatrixXd &Y1,
                     Eigen::MatrixXd &Y3);

// Parametric rep from (rho, beta, H1, H2); n1, n2 taken from H shapes.
CanonicalRep make_rep(const Eigen::VectorXd &rho, const Eigen::VectorXd &beta,
                      const Eigen::MatrixXd &H1, const Eigen::MatrixXd &H2);

// Y = K^T (K diag(1/z) K^T)^{-1} K in the permuted order, then un-permuted.
Eigen::MatrixXd reconstruct_block(const Eigen::MatrixXd &H,
                                  const Eigen::VectorXd &z,
                                  const std::vector<int> &perm);

RepMatrices derive(const CanonicalRep &rep);
ValidationReport validate_rep(const CanonicalRep &rep);

// Rank of a block counted on its weighted form W^{-1/2} Y W^{-1/2}.
int weighted_rank(const Eigen::MatrixXd &Y, const Eigen::VectorXd &w);

// Matrix elements sampled directly from the fields in the basis
// [u_i, u'_i, R u_i, R u'_i] for P_idx, used to check block structure.
Eigen::MatrixXd sampled_projection(const SymmetricEigenbasis &basis, int idx);
// Same operator assembled from a rep.
Eigen::MatrixXd block_projection(const RepMatrices &m, int idx);
Eigen::MatrixXd block_rotation(int half_m);

} // namespace effcond
