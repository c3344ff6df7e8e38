#include "effcond/laminate_models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace effcond {

using Eigen::Matrix2d;

namespace {

constexpr double kTol = 1e-10;

Matrix2d rperp() {
  Matrix2d R;
  R << 0.0, -1.0, 1.0, 0.0;
  return R;
}

bool psd(const Matrix2d &M, double tol = 1e-12) {
  if (std::abs(M(0, 1) - M(1, 0)) > tol * (1.0 + M.norm()))
    return false;
  Eigen::SelfAdjointEigenSolver<Matrix2d> es(M);
  return es.eigenvalues()(0) >= -tol * (1.0 + M.norm());
}

void check_q(const std::vector<double> &q) {
  if (q.size() < 2 || q.front() != 1.0 || q.back() != 0.0)
    throw ConstraintViolated("q must start at 1 and end at 0");
  for (std::size_t k = 1; k < q.size(); ++k)
    if (!(q[k] < q[k - 1]))
      throw ConstraintViolated("q must be strictly decreasing");
}

// Samples off the slit [0,1], in conjugate pairs.
std::vector<cplx> slit_samples() {
  std::vector<cplx> out;
  for (double r : {0.6, 1.1, 2.5, 7.0})
    for (int k = 0; k < 16; ++k) {
      const double th = 2.0 * std::numbers::pi * (k + 0.5) / 16.0;
      out.push_back(0.5 + r * std::polar(1.0, th));
    }
  return out;
}

Tensor2 checked_inverse(const Tensor2 &M, int step, const char *what) {
  const double scale = M.norm();
  if (!(scale > 0.0) || std::abs(M.determinant()) < 1e-14 * scale * scale)
    throw SingularStep(step, std::string(what) + " is singular");
  return M.inverse();
}

} // namespace

void validate(const RationalDiagRep &rep) {
  check_q(rep.q);
  if (rep.a.size() != rep.q.size())
    throw ConstraintViolated("a and q lengths differ");
  double sum = 0.0;
  for (double a : rep.a) {
    if (a < 0.0)
      throw ConstraintViolated("negative weight");
    sum += a;
  }
  if (std::abs(sum - 1.0) > kTol)
    throw ConstraintViolated("weights do not sum to 1");
}

void validate(const MatrixRationalRep &rep) {
  check_q(rep.q);
  if (rep.A.size() != rep.q.size())
    throw ConstraintViolated("A and q lengths differ");
  Matrix2d sum = Matrix2d::Zero();
  for (const Matrix2d &A : rep.A) {
    if (!psd(A))
      throw ConstraintViolated("residue matrix not symmetric PSD");
    sum += A;
  }
  if ((sum - Matrix2d::Identity()).norm() > kTol)
    throw ConstraintViolated("residue matrices do not sum to I");
}

void validate(const SStarRep &rep) {
  if (rep.s.size() != rep.S.size())
    throw ConstraintViolated("pole and residue counts differ");
  if (!psd(rep.A, 1e-12) && std::abs(rep.A(0, 1) - rep.A(1, 0)) > 1e-12)
    throw ConstraintViolated("A must be symmetric");
  const Matrix2d R = rperp();
  Matrix2d bound = Matrix2d::Zero();
  for (std::size_t i = 0; i < rep.s.size(); ++i) {
    if (!(rep.s[i] > 0.0 && rep.s[i] < 1.0))
      throw ConstraintViolated("pole outside (0,1)");
    if (!psd(rep.S[i]))
      throw ConstraintViolated("residue not symmetric PSD");
    bound += rep.S[i] / rep.s[i] + R.transpose() * rep.S[i] * R / (1.0 - rep.s[i]);
  }
  if (!psd(rep.A - bound))
    throw ConstraintViolated("A is below the pole-residue bound");
}

void validate(const LaminateProgram &prog) {
  if (std::abs(prog.n0.norm() - 1.0) > 1e-12)
    throw ConstraintViolated("n0 must be a unit vector");
  for (const LaminateStep &st : prog.steps)
    if (!(st.fraction >= 0.0 && st.fraction <= 1.0))
      throw ConstraintViolated("fraction outside [0,1]");
  if (prog.sigma_ref && !(*prog.sigma_ref != 0.0))
    throw ConstraintViolated("reference value must be nonzero");
}

cplx eval_rational_diag(const RationalDiagRep &rep, cplx s1, cplx s2) {
  validate(rep);
  cplx out = 0.0;
  for (std::size_t k = 0; k < rep.q.size(); ++k)
    out += rep.a[k] / (rep.q[k] / s1 + (1.0 - rep.q[k]) / s2);
  return out;
}

Tensor2 eval_matrix_rational(const MatrixRationalRep &rep, cplx s1, cplx s2) {
  validate(rep);
  Tensor2 out = Tensor2::Zero();
  for (std::size_t k = 0; k < rep.q.size(); ++k)
    out += rep.A[k].cast<cplx>() / (rep.q[k] / s1 + (1.0 - rep.q[k]) / s2);
  return out;
}

Tensor2 eval_sstar(const SStarRep &rep, cplx s) {
  validate(rep);
  if (s.imag() == 0.0 && s.real() >= 0.0 && s.real() <= 1.0)
    throw ConstraintViolated("s lies on the slit [0,1]");
  const Matrix2d R = rperp();
  Tensor2 out = (s * (1.0 + rep.A.trace())) * Tensor2::Identity() - rep.A.cast<cplx>();
  for (std::size_t i = 0; i < rep.s.size(); ++i) {
    out += rep.S[i].cast<cplx>() / (rep.s[i] - s);
    out += (R.transpose() * rep.S[i] * R).cast<cplx>() / ((1.0 - rep.s[i]) - s);
  }
  return out;
}

double phase_interchange_residual(const SStarRep &rep) {
  const Tensor2 R = rperp().cast<cplx>();
  double worst = 0.0;
  for (cplx s : slit_samples()) {
    const Tensor2 lhs = eval_sstar(rep, s) + R * eval_sstar(rep, 1.0 - s) * R.transpose();
    worst = std::max(worst, (lhs - Tensor2::Identity()).norm());
  }
  return worst;
}

bool sstar_herglotz_holds(const SStarRep &rep) {
  for (cplx s : slit_samples()) {
    if (s.imag() <= 0.0)
      continue;
    const Tensor2 S = eval_sstar(rep, s);
    const Eigen::Matrix2cd im = (S - S.adjoint()) / cplx(0.0, 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(im);
    if (es.eigenvalues()(0) < -1e-12)
      return false;
  }
  return true;
}

Matrix2d rotation(double deg) {
  const double t = deg * std::numbers::pi / 180.0;
  Matrix2d R;
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return R;
}

Tensor2 polycrystal_laminate(const LaminateProgram &prog) {
  validate(prog);
  const double ref = prog.sigma_ref ? *prog.sigma_ref : 2.0 * norm_bound(prog.sigma0);
  const Tensor2 I = Tensor2::Identity();
  const Tensor2 S = ref * checked_inverse(ref * I - prog.sigma0, 0, "reference shift");

  const Tensor2 R0 = rotation(prog.rotation0_deg).cast<cplx>();
  Tensor2 Sj = R0.transpose() * S * R0;
  for (std::size_t j = 0; j < prog.steps.size(); ++j) {
    const int step = static_cast<int>(j) + 1;
    const Matrix2d Rj = rotation(prog.steps[j].rotation_deg);
    const Eigen::Vector2d nj = Rj.transpose() * prog.n0;
    const Tensor2 N = (nj * nj.transpose()).cast<cplx>();
    const Tensor2 Rc = Rj.cast<cplx>();
    const double p = prog.steps[j].fraction;
    Tensor2 X = Tensor2::Zero();
    if (p > 0.0)
      X += p * checked_inverse(Rc.transpose() * S * Rc - N, step, "rotated bracket");
    if (p < 1.0)
      X += (1.0 - p) * checked_inverse(Sj - N, step, "previous bracket");
    Sj = checked_inverse(X, step, "averaged bracket") + N;
  }
  return ref * I - ref * checked_inverse(Sj, static_cast<int>(prog.steps.size()), "final tensor");
}

SumRuleResiduals check_sum_rules(const MatrixRationalRep &rep, double f) {
  Matrix2d first = Matrix2d::Zero();
  double second = 0.0;
  for (std::size_t k = 0; k < rep.q.size(); ++k) {
    first += rep.q[k] * rep.A[k];
    second += rep.q[k] * (1.0 - rep.q[k]) * rep.A[k].trace();
  }
  SumRuleResiduals r;
  r.first = (first - f * Matrix2d::Identity()).norm();
  r.second = std::abs(second - f * (1.0 - f));
  return r;
}

} // namespace effcond
