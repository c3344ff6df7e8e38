#pragma once

#include <optional>
#include <vector>

#include "effcond/field_space.hpp"

namespace effcond {

struct RationalDiagRep {
  std::vector<double> q; // 1 = q_0 > ... > q_{m+1} = 0
  std::vector<double> a; // non-negative, sum 1
};

struct MatrixRationalRep {
  std::vector<double> q;
  std::vector<Eigen::Matrix2d> A; // symmetric PSD, sum I
};

struct SStarRep {
  std::vector<double> s;               // poles in (0,1)
  std::vector<Eigen::Matrix2d> S;      // symmetric PSD residues
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
};

struct LaminateStep {
  double rotation_deg = 0.0;
  double fraction = 0.5;
};

struct LaminateProgram {
  Tensor2 sigma0 = Tensor2::Identity();
  std::optional<double> sigma_ref; // defaults to twice the largest singular value
  Eigen::Vector2d n0 = Eigen::Vector2d::UnitX();
  double rotation0_deg = 0.0;
  std::vector<LaminateStep> steps;
};

struct SumRuleResiduals {
  double first = 0.0;  // || sum q A - f I ||
  double second = 0.0; // | sum q (1 - q) Tr A - f (1 - f) |
};

void validate(const RationalDiagRep &rep);
void validate(const MatrixRationalRep &rep);
void validate(const SStarRep &rep);
void validate(const LaminateProgram &prog);

cplx eval_rational_diag(const RationalDiagRep &rep, cplx s1, cplx s2);
Tensor2 eval_matrix_rational(const MatrixRationalRep &rep, cplx s1, cplx s2);

Tensor2 eval_sstar(const SStarRep &rep, cplx s);
// Max over sampled s of || S*(s) + R S*(1-s) R^T - I ||.
double phase_interchange_residual(const SStarRep &rep);
// True when Im S*(s) is PSD at every sampled s with Im s > 0.
bool sstar_herglotz_holds(const SStarRep &rep);

Eigen::Matrix2d rotation(double deg);
Tensor2 polycrystal_laminate(const LaminateProgram &prog);

SumRuleResiduals check_sum_rules(const MatrixRationalRep &rep, double f);

} // namespace effcond
