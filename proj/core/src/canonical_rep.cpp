#include "effcond/canonical_rep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fft.hpp"

namespace effcond {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kCluster = 1e-9; // eigenvalue gap treated as degenerate

// Near 0 or 1 the degeneracy gap shrinks with the distance to the edge, so
// distinct near-edge eigenvalues are not merged.
double cluster_gap(double r) {
  return std::max(1e-13, std::min(kCluster, 1e-4 * std::min(r, 1.0 - r)));
}
constexpr double kEdge = 1e-9;    // distance from 0/1 treated as exact

Eigen::Index grid_size(int n) { return static_cast<Eigen::Index>(n) * n; }

// Orthonormal real basis of U1 + E built from cos/sin of each Fourier pair.
MatrixXd gradient_basis(int n) {
  const Eigen::Index nn = grid_size(n);
  MatrixXd B = MatrixXd::Zero(2 * nn, nn);
  std::vector<char> seen(nn, 0);
  Eigen::Index col = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (seen[a * n + b])
        continue;
      const int ca = (n - a) % n, cb = (n - b) % n;
      seen[a * n + b] = 1;
      seen[ca * n + cb] = 1;
      double d1, d2;
      detail::mode_direction(a, b, n, d1, d2);
      const bool self = (ca == a && cb == b);
      const double scale = (self ? 1.0 : std::sqrt(2.0)) / n;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double th = 2.0 * std::numbers::pi * (double(a) * i + double(b) * j) / n;
          const Eigen::Index k = static_cast<Eigen::Index>(i) * n + j;
          B(k, col) = scale * d1 * std::cos(th);
          B(nn + k, col) = scale * d2 * std::cos(th);
          if (!self) {
            B(k, col + 1) = scale * d1 * std::sin(th);
            B(nn + k, col + 1) = scale * d2 * std::sin(th);
          }
        }
      }
      col += self ? 1 : 2;
    }
  }
  return B;
}

MatrixXd reflect_rows(const MatrixXd &X, int n, int shift) {
  const Eigen::Index nn = grid_size(n);
  MatrixXd Y(X.rows(), X.cols());
  for (int i = 0; i < n; ++i) {
    const int mi = ((shift - i) % n + n) % n;
    for (int j = 0; j < n; ++j) {
      const Eigen::Index dst = static_cast<Eigen::Index>(i) * n + j;
      const Eigen::Index src = static_cast<Eigen::Index>(mi) * n + j;
      Y.row(dst) = X.row(src);
      Y.row(nn + dst) = -X.row(nn + src);
    }
  }
  return Y;
}

MatrixXd rotate_rows(const MatrixXd &X) {
  const Eigen::Index nn = X.rows() / 2;
  MatrixXd Y(X.rows(), X.cols());
  Y.topRows(nn) = -X.bottomRows(nn);
  Y.bottomRows(nn) = X.topRows(nn);
  return Y;
}

// Diagonal mask of P_idx as a vector over the 2n^2 grid entries.
VectorXd phase_mask(const GridGeometry &g, int idx) {
  const Eigen::Index nn = grid_size(g.n);
  VectorXd m = VectorXd::Zero(2 * nn);
  const Eigen::Index off = (idx == 1 || idx == 3) ? 0 : nn;
  const std::uint8_t keep = idx <= 2 ? 1 : 0;
  for (Eigen::Index k = 0; k < nn; ++k)
    if (g.chi[k] == keep)
      m[off + k] = 1.0;
  return m;
}

VectorXd other_phase_mask(const GridGeometry &g) {
  return phase_mask(g, 3) + phase_mask(g, 4);
}

VectorXd lambda1_real(const VectorXd &c, int n) {
  VectorField f;
  f.n = n;
  f.data = c.cast<cplx>();
  return project_lambda(1, f).data.real();
}

MatrixXd gram(const MatrixXd &A, const VectorXd &mask, const MatrixXd &B) {
  return A.transpose() * (mask.asDiagonal() * B);
}

struct Mode {
  ModeKind kind;
  VectorXd u; // empty for fictitious
  VectorXd a; // partner, empty for fictitious
  double rho;
  double beta;
  int index;
};

// Rotate a degenerate cluster so a single column carries all coupling to
// U1; returns that column first when it exists.
std::vector<VectorXd> concentrate(const MatrixXd &C, const VectorXd &u1,
                                  bool &has_carrier) {
  std::vector<VectorXd> out;
  has_carrier = false;
  if (C.cols() == 0)
    return out;
  const VectorXd bb = C.transpose() * u1;
  MatrixXd Cr = C;
  if (bb.norm() > 1e-12 && C.cols() > 1) {
    Eigen::HouseholderQR<MatrixXd> qr(bb);
    MatrixXd Qm = qr.householderQ();
    Cr = C * Qm;
  }
  if (bb.norm() > 1e-12)
    has_carrier = true;
  for (Eigen::Index k = 0; k < Cr.cols(); ++k)
    out.push_back(Cr.col(k));
  return out;
}

struct Spectrum {
  MatrixXd T, A;  // eigenvectors, symmetric / antisymmetric
  VectorXd rs, ra; // ascending eigenvalues
};

Spectrum symmetric_split(const GridGeometry &geom) {
  const int n = geom.n;
  const MatrixXd B = gradient_basis(n);
  const MatrixXd PiB = reflect_rows(B, n, geom.mirror);
  MatrixXd M = B.transpose() * PiB;
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  if (es.info() != Eigen::Success)
    throw EigSolverFailure("reflection eigenproblem did not converge");
  std::vector<Eigen::Index> ps, pa;
  for (Eigen::Index k = 0; k < M.rows(); ++k)
    (es.eigenvalues()[k] > 0 ? ps : pa).push_back(k);
  MatrixXd Bs(B.rows(), ps.size()), Ba(B.rows(), pa.size());
  for (std::size_t k = 0; k < ps.size(); ++k)
    Bs.col(k) = B * es.eigenvectors().col(ps[k]);
  for (std::size_t k = 0; k < pa.size(); ++k)
    Ba.col(k) = B * es.eigenvectors().col(pa[k]);

  const VectorXd s = other_phase_mask(geom);
  Spectrum sp;
  auto diag = [&](const MatrixXd &X, MatrixXd &V, VectorXd &r) {
    MatrixXd G = gram(X, s, X);
    G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> e(G);
    if (e.info() != Eigen::Success)
      throw EigSolverFailure("phase eigenproblem did not converge");
    r = e.eigenvalues();
    V = X * e.eigenvectors();
  };
  diag(Bs, sp.T, sp.rs);
  diag(Ba, sp.A, sp.ra);
  return sp;
}

} // namespace

VectorField SymmetricEigenbasis::field(int k) const {
  const int n = geom.n;
  VectorField f;
  f.n = n;
  const VectorXd &c = k < half_m ? VectorXd(sym.col(k)) : VectorXd(anti.col(k - half_m));
  f.data = (c * static_cast<double>(n)).cast<cplx>();
  return f;
}

std::vector<VectorField> SymmetricEigenbasis::u_fields() const {
  std::vector<VectorField> out;
  out.reserve(2 * half_m);
  for (int k = 0; k < 2 * half_m; ++k)
    out.push_back(field(k));
  return out;
}

Eigen::VectorXd operator_spectrum(const GridGeometry &geom) {
  const MatrixXd B = gradient_basis(geom.n);
  MatrixXd G = gram(B, other_phase_mask(geom), B);
  G = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw EigSolverFailure("spectrum eigenproblem did not converge");
  return es.eigenvalues();
}

SymmetricEigenbasis build_eigenbasis(const GridGeometry &geom, int half_m,
                                     double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw DimensionMismatch("eps must lie in (0, 0.5)");
  const int n = geom.n;
  const Eigen::Index nn = grid_size(n);
  const Spectrum sp = symmetric_split(geom);
  VectorXd u1 = VectorXd::Zero(2 * nn);
  u1.head(nn).setConstant(1.0 / n);
  const VectorXd smask = other_phase_mask(geom);

  std::vector<Mode> modes;
  auto push = [&](ModeKind kind, VectorXd u, VectorXd a, double rho) {
    Mode m{kind, std::move(u), std::move(a), rho, 0.0,
           static_cast<int>(modes.size())};
    modes.push_back(std::move(m));
  };

  // Interior eigenvalues, grouped into clusters of equal rho.
  std::vector<Eigen::Index> t0, t1, tp, a0, a1;
  for (Eigen::Index k = 0; k < sp.rs.size(); ++k) {
    const double r = sp.rs[k];
    (r < kEdge ? t0 : r > 1.0 - kEdge ? t1 : tp).push_back(k);
  }
  for (Eigen::Index k = 0; k < sp.ra.size(); ++k) {
    const double r = sp.ra[k];
    if (r < kEdge)
      a0.push_back(k);
    else if (r > 1.0 - kEdge)
      a1.push_back(k);
  }

  for (std::size_t s = 0; s < tp.size();) {
    std::size_t e = s + 1;
    while (e < tp.size() && sp.rs[tp[e]] - sp.rs[tp[e - 1]] < cluster_gap(sp.rs[tp[e]]))
      ++e;
    MatrixXd C(sp.T.rows(), static_cast<Eigen::Index>(e - s));
    double rho = 0.0;
    for (std::size_t k = s; k < e; ++k) {
      C.col(k - s) = sp.T.col(tp[k]);
      rho += sp.rs[tp[k]];
    }
    rho /= static_cast<double>(e - s);
    bool carrier;
    for (VectorXd &u : concentrate(C, u1, carrier)) {
      if (u.dot(u1) < 0)
        u = -u;
      const VectorXd rs = (smask.array() * u.array()).matrix();
      VectorXd rot(rs.size());
      rot.head(nn) = -rs.tail(nn);
      rot.tail(nn) = rs.head(nn);
      VectorXd a = lambda1_real(rot, n) / std::sqrt(rho * (1.0 - rho));
      a /= a.norm(); // explicit renormalization
      push(ModeKind::Paired, u, a, std::clamp(rho, eps, 1.0 - eps));
    }
    s = e;
  }

  // Eigenvalues at exactly 1 (resp. 0): pair the symmetric cluster with
  // antisymmetric eigenvalue-0 (resp. 1) fields; the coupling carrier and
  // any unmatched fields receive fictitious partners.
  auto complete = [&](ModeKind kind, const std::vector<Eigen::Index> &ts,
                      const std::vector<Eigen::Index> &as, double rho) {
    MatrixXd C(sp.T.rows(), static_cast<Eigen::Index>(ts.size()));
    for (std::size_t k = 0; k < ts.size(); ++k)
      C.col(k) = sp.T.col(ts[k]);
    bool carrier;
    std::vector<VectorXd> cols = concentrate(C, u1, carrier);
    std::size_t first = 0;
    if (carrier) {
      VectorXd u = cols[0];
      if (u.dot(u1) < 0)
        u = -u;
      push(kind, u, VectorXd(), rho);
      first = 1;
    }
    const std::size_t rest = cols.size() - first;
    for (std::size_t q = 0; q < std::max(rest, as.size()); ++q) {
      VectorXd u = q < rest ? cols[first + q] : VectorXd();
      VectorXd a = q < as.size() ? VectorXd(sp.A.col(as[q])) : VectorXd();
      push(kind, u, a, rho);
    }
  };
  complete(ModeKind::One, t1, a0, 1.0 - eps);
  complete(ModeKind::Zero, t0, a1, eps);

  for (Mode &m : modes)
    m.beta = m.u.size() ? m.u.dot(u1) : 0.0;

  const int full = static_cast<int>(modes.size());
  if (half_m <= 0)
    half_m = full;
  if (half_m > full)
    throw SubspaceTooSmall("requested " + std::to_string(half_m) +
                           " modes, completed spectrum has " +
                           std::to_string(full));

  auto weight = [](double b) { return b * b < 1e-24 ? 0.0 : b * b; };
  std::stable_sort(modes.begin(), modes.end(), [&](const Mode &x, const Mode &y) {
    const double wx = weight(x.beta), wy = weight(y.beta);
    if (wx != wy)
      return wx > wy;
    if (x.rho != y.rho)
      return x.rho > y.rho;
    return x.index < y.index;
  });

  SymmetricEigenbasis basis;
  basis.geom = geom;
  basis.half_m = half_m;
  basis.full_size = full;
  basis.eps = eps;
  basis.sym = MatrixXd::Zero(2 * nn, half_m);
  basis.anti = MatrixXd::Zero(2 * nn, half_m);
  basis.rho.resize(half_m);
  basis.beta.resize(half_m);
  for (int k = 0; k < half_m; ++k) {
    const Mode &m = modes[k];
    if (m.u.size())
      basis.sym.col(k) = m.u;
    if (m.a.size())
      basis.anti.col(k) = m.a;
    basis.rho[k] = m.rho;
    basis.beta[k] = std::max(0.0, m.beta);
    basis.kind.push_back(m.kind);
    basis.has_sym.push_back(m.u.size() > 0);
    basis.has_anti.push_back(m.a.size() > 0);
  }
  return basis;
}

void measured_blocks(const SymmetricEigenbasis &basis, MatrixXd &Y1,
                     MatrixXd &Y3) {
  const int h = basis.half_m;
  const VectorXd &rho = basis.rho;
  const VectorXd Q = (rho.array() / (1.0 - rho.array())).sqrt();
  const VectorXd m1 = phase_mask(basis.geom, 1);
  const VectorXd m3 = phase_mask(basis.geom, 3);
  const MatrixXd RA = rotate_rows(basis.anti);

  const MatrixXd G1 = gram(basis.sym, m1, basis.sym);
  const MatrixXd G3 = gram(basis.sym, m3, basis.sym);
  const MatrixXd X1 = gram(basis.sym, m1, RA);
  const MatrixXd X3 = gram(basis.sym, m3, RA);
  const MatrixXd AP1 = gram(basis.anti, m1, basis.anti);
  const MatrixXd AP3 = gram(basis.anti, m3, basis.anti);

  auto is = [&](int i, ModeKind k) { return basis.kind[i] == k; };
  Y1 = G1;
  Y3 = G3;
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < h; ++j) {
      const bool both_a = basis.has_anti[i] && basis.has_anti[j];
      const double d = i == j ? 1.0 : 0.0;
      // Entries touching rho = 1 - eps modes.
      if (is(j, ModeKind::One) && !is(i, ModeKind::One))
        Y1(i, j) = X1(i, j) / Q[j];
      else if (is(i, ModeKind::One) && !is(j, ModeKind::One))
        Y1(i, j) = X1(j, i) / Q[i];
      else if (is(i, ModeKind::One) && is(j, ModeKind::One)) {
        const double ap = both_a ? AP1(i, j) : d * rho[j];
        Y1(i, j) = (d * rho[j] - ap) / (Q[i] * Q[j]);
      }
      // Entries touching rho = eps modes.
      if (is(j, ModeKind::Zero) && !is(i, ModeKind::Zero))
        Y3(i, j) = -X3(i, j) * Q[j];
      else if (is(i, ModeKind::Zero) && !is(j, ModeKind::Zero))
        Y3(i, j) = -X3(j, i) * Q[i];
      else if (is(i, ModeKind::Zero) && is(j, ModeKind::Zero)) {
        const double ap = both_a ? AP3(i, j) : d * (1.0 - rho[j]);
        Y3(i, j) = Q[i] * Q[j] * (d * (1.0 - rho[j]) - ap);
      }
    }
  }
  Y1 = 0.5 * (Y1 + Y1.transpose());
  Y3 = 0.5 * (Y3 + Y3.transpose());
}

int weighted_rank(const MatrixXd &Y, const VectorXd &w) {
  const VectorXd s = w.array().sqrt().inverse();
  MatrixXd Yh = s.asDiagonal() * Y * s.asDiagonal();
  Yh = 0.5 * (Yh + Yh.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Yh, Eigen::EigenvaluesOnly);
  return static_cast<int>((es.eigenvalues().array() > 0.5).count());
}

MatrixXd reconstruct_block(const MatrixXd &H, const VectorXd &z,
                           const std::vector<int> &perm) {
  const Eigen::Index h = z.size();
  const Eigen::Index r = H.rows();
  std::vector<int> p = perm;
  if (p.empty()) {
    p.resize(h);
    std::iota(p.begin(), p.end(), 0);
  }
  MatrixXd K(r, h);
  K.leftCols(r).setIdentity();
  K.rightCols(h - r) = H;
  VectorXd zinv(h);
  for (Eigen::Index k = 0; k < h; ++k)
    zinv[k] = 1.0 / z[p[k]];
  const MatrixXd M = K * zinv.asDiagonal() * K.transpose();
  const MatrixXd Yp = K.transpose() * M.ldlt().solve(K);
  MatrixXd Y(h, h);
  for (Eigen::Index a = 0; a < h; ++a)
    for (Eigen::Index b = 0; b < h; ++b)
      Y(p[a], p[b]) = Yp(a, b);
  return Y;
}

namespace {

struct Extracted {
  int rank = 0;
  std::vector<int> perm;
  MatrixXd H;
};

// K = [I H] spanning the range of the weighted projection of Y, with the
// pivot row fixed by the coupling constraint H^T v_head = v_tail.
Extracted extract_block(const MatrixXd &Y, const VectorXd &z, const VectorXd &v,
                        double rank_tol, bool enforce) {
  const Eigen::Index h = z.size();
  const VectorXd sz = z.array().sqrt();
  MatrixXd Yh = sz.cwiseInverse().asDiagonal() * Y * sz.cwiseInverse().asDiagonal();
  Yh = 0.5 * (Yh + Yh.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Yh);
  if (es.info() != Eigen::Success)
    throw EigSolverFailure("weighted projection eigenproblem failed");
  int r = static_cast<int>((es.eigenvalues().array() > 0.5).count());
  r = std::max(r, 1);

  Extracted ex;
  ex.rank = r;
  ex.perm.resize(h);
  std::iota(ex.perm.begin(), ex.perm.end(), 0);
  if (r == h) {
    ex.H = MatrixXd::Zero(r, 0);
    return ex;
  }
  const MatrixXd W = es.eigenvectors().rightCols(r);
  const MatrixXd Vt = (sz.asDiagonal() * W).transpose(); // r x h

  Eigen::ColPivHouseholderQR<MatrixXd> qr(Vt);
  const auto &cp = qr.colsPermutation().indices();
  std::vector<int> lead(cp.data(), cp.data() + r);
  std::vector<int> rest(cp.data() + r, cp.data() + h);
  const auto last = std::max_element(lead.begin(), lead.end(), [&](int a, int b) {
    return std::abs(v[a]) < std::abs(v[b]);
  });
  const int pivot = *last;
  lead.erase(last);
  std::sort(lead.begin(), lead.end());
  lead.push_back(pivot);
  std::sort(rest.begin(), rest.end());
  ex.perm = lead;
  ex.perm.insert(ex.perm.end(), rest.begin(), rest.end());

  MatrixXd Vp(r, h);
  VectorXd vp(h);
  for (Eigen::Index k = 0; k < h; ++k) {
    Vp.col(k) = Vt.col(ex.perm[k]);
    vp[k] = v[ex.perm[k]];
  }
  Eigen::FullPivLU<MatrixXd> lu(Vp.leftCols(r));
  const Eigen::JacobiSVD<MatrixXd> svd(Vp.leftCols(r));
  const VectorXd sv = svd.singularValues();
  if (sv[r - 1] < rank_tol * sv[0])
    throw AssumptionViolated(2, "leading block is singular at rank_tol");
  const MatrixXd K = lu.solve(Vp);
  ex.H = K.rightCols(h - r);

  if (enforce) {
    const double vmax = v.cwiseAbs().maxCoeff();
    if (!(std::abs(vp[r - 1]) > rank_tol * vmax))
      throw AssumptionViolated(3, "constraint pivot vanishes");
    VectorXd row = vp.tail(h - r);
    if (r > 1)
      row -= ex.H.topRows(r - 1).transpose() * vp.head(r - 1);
    ex.H.row(r - 1) = row.transpose() / vp[r - 1];
  }
  return ex;
}

} // namespace

CanonicalRep make_rep(const VectorXd &rho, const VectorXd &beta,
                      const MatrixXd &H1, const MatrixXd &H2) {
  const Eigen::Index h = rho.size();
  if (beta.size() != h || H1.rows() + H1.cols() != h ||
      H2.rows() + H2.cols() != h || H1.rows() < 1 || H2.rows() < 1)
    throw RepInvalid("inconsistent shapes for half_m = " + std::to_string(h));
  CanonicalRep rep;
  rep.half_m = static_cast<int>(h);
  rep.n1 = static_cast<int>(H1.rows());
  rep.n2 = static_cast<int>(H2.rows());
  rep.rho = rho;
  rep.beta = beta;
  rep.H1 = H1;
  rep.H2 = H2;
  return rep;
}

CanonicalRep extract_rep(const SymmetricEigenbasis &basis, double rank_tol) {
  ExtractOptions o;
  o.rank_tol = rank_tol;
  return extract_rep(basis, o);
}

CanonicalRep extract_rep(const SymmetricEigenbasis &basis,
                         const ExtractOptions &opts) {
  MatrixXd Y1, Y3;
  measured_blocks(basis, Y1, Y3);
  const VectorXd &rho = basis.rho;
  const VectorXd z2 = (1.0 - rho.array()).matrix();
  const VectorXd &beta = basis.beta;

  CanonicalRep rep;
  rep.half_m = basis.half_m;
  rep.rho = rho;
  rep.beta = beta;
  rep.compressed = basis.truncated();

  if (rep.compressed) {
    rep.Y1c = Y1;
    rep.Y3c = Y3;
    auto best_effort = [&](const MatrixXd &Y, const VectorXd &z, int &r,
                           MatrixXd &H, std::vector<int> &perm) {
      try {
        Extracted ex = extract_block(Y, z, (z.array() * beta.array()).matrix(),
                                     opts.rank_tol, false);
        r = ex.rank;
        H = ex.H;
        perm = ex.perm;
      } catch (const AssumptionViolated &) {
        r = std::max(1, weighted_rank(Y, z));
        H = MatrixXd::Zero(r, rep.half_m - r);
        perm.clear();
      }
    };
    best_effort(Y1, z2, rep.n1, rep.H1, rep.perm1);
    best_effort(Y3, rho, rep.n2, rep.H2, rep.perm2);
    return rep;
  }

  Extracted e1 = extract_block(Y1, z2, (z2.array() * beta.array()).matrix(),
                               opts.rank_tol, true);
  Extracted e2 = extract_block(Y3, rho, (rho.array() * beta.array()).matrix(),
                               opts.rank_tol, true);
  rep.n1 = e1.rank;
  rep.H1 = e1.H;
  rep.perm1 = e1.perm;
  rep.n2 = e2.rank;
  rep.H2 = e2.H;
  rep.perm2 = e2.perm;

  const double d1 = (reconstruct_block(rep.H1, z2, rep.perm1) - Y1).cwiseAbs().maxCoeff();
  const double d3 = (reconstruct_block(rep.H2, rho, rep.perm2) - Y3).cwiseAbs().maxCoeff();
  if (!(std::max(d1, d3) < opts.recon_tol)) {
    std::ostringstream os;
    os << "reconstruction from H deviates by " << std::max(d1, d3);
    throw AssumptionViolated(2, os.str());
  }
  return rep;
}

RepMatrices derive(const CanonicalRep &rep) {
  const Eigen::Index h = rep.half_m;
  if (rep.rho.size() != h || rep.beta.size() != h)
    throw RepInvalid("rho/beta length differs from half_m");
  for (Eigen::Index k = 0; k < h; ++k)
    if (!(rep.rho[k] > 0.0 && rep.rho[k] < 1.0))
      throw RepInvalid("rho outside (0,1)");
  RepMatrices m;
  const VectorXd z1 = rep.rho;
  const VectorXd z2 = (1.0 - rep.rho.array()).matrix();
  const VectorXd q = (z1.array() / z2.array()).sqrt();
  m.Z1 = z1.asDiagonal();
  m.Z2 = z2.asDiagonal();
  m.Q = q.asDiagonal();
  m.Qinv = q.cwiseInverse().asDiagonal();
  if (rep.compressed) {
    m.Y1 = rep.Y1c;
    m.Y3 = rep.Y3c;
  } else {
    if (rep.H1.rows() != rep.n1 || rep.H1.cols() != h - rep.n1 ||
        rep.H2.rows() != rep.n2 || rep.H2.cols() != h - rep.n2)
      throw RepInvalid("H shapes do not match n1/n2");
    m.Y1 = reconstruct_block(rep.H1, z2, rep.perm1);
    m.Y3 = reconstruct_block(rep.H2, z1, rep.perm2);
  }
  // Q Y Q and Q^-1 Y Q^-1 with diagonal Q, computed entrywise.
  m.Y2 = m.Z1 - q.asDiagonal() * m.Y1 * q.asDiagonal();
  m.Y4 = m.Z2 - q.cwiseInverse().asDiagonal() * m.Y3 * q.cwiseInverse().asDiagonal();
  return m;
}

double ValidationReport::max_residual() const {
  double r = 0.0;
  for (const auto &[k, v] : residuals)
    r = std::max(r, v);
  return r;
}

ValidationReport validate_rep(const CanonicalRep &rep) {
  ValidationReport vr;
  auto &r = vr.residuals;
  const Eigen::Index h = rep.half_m;
  bool rho_ok = rep.rho.size() == h;
  for (Eigen::Index k = 0; rho_ok && k < h; ++k)
    rho_ok = rep.rho[k] > 0.0 && rep.rho[k] < 1.0;
  r["rho_range"] = rho_ok ? 0.0 : 1.0;
  if (!rho_ok)
    return vr;
  const RepMatrices m = derive(rep);
  const MatrixXd I = MatrixXd::Identity(h, h);
  const MatrixXd Q2 = m.Q * m.Q, Qi2 = m.Qinv * m.Qinv;
  auto mx = [](const MatrixXd &A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; };
  auto vmx = [](const VectorXd &A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; };

  r["y1_projection"] = mx(m.Y1 - m.Y1 * (I + Q2) * m.Y1);
  r["y2_projection"] = mx(m.Y2 - m.Y2 * (I + Qi2) * m.Y2);
  r["y3_projection"] = mx(m.Y3 - m.Y3 * (I + Qi2) * m.Y3);
  r["y4_projection"] = mx(m.Y4 - m.Y4 * (I + Q2) * m.Y4);
  r["y_symmetry"] = std::max(mx(m.Y1 - m.Y1.transpose()), mx(m.Y3 - m.Y3.transpose()));
  r["y1_y2_orthogonality"] = mx(m.Y1 * (m.Q + m.Qinv) * m.Y2);
  r["y3_y4_orthogonality"] = mx(m.Y3 * (m.Q + m.Qinv) * m.Y4);
  r["y1_y2_complement"] = mx(m.Y1 + m.Qinv * m.Y2 * m.Qinv - m.Z2);
  r["y3_y4_complement"] = mx(m.Y3 + m.Q * m.Y4 * m.Q - m.Z1);
  r["rank_y2"] = std::abs(weighted_rank(m.Y2, rep.rho) - (h - rep.n1));
  r["rank_y4"] = std::abs(weighted_rank(m.Y4, (1.0 - rep.rho.array()).matrix()) -
                          (h - rep.n2));
  r["y1_beta"] = vmx(m.Y1 * rep.beta - m.Z2 * rep.beta);
  r["y3_beta"] = vmx(m.Y3 * rep.beta - m.Z1 * rep.beta);

  auto constraint = [&](const MatrixXd &H, const std::vector<int> &perm,
                        const VectorXd &z) {
    const Eigen::Index n = H.rows();
    VectorXd v(h);
    for (Eigen::Index k = 0; k < h; ++k) {
      const int p = perm.empty() ? static_cast<int>(k) : perm[k];
      v[k] = z[p] * rep.beta[p];
    }
    return vmx(H.transpose() * v.head(n) - v.tail(h - n));
  };
  r["h1_constraint"] = constraint(rep.H1, rep.perm1, (1.0 - rep.rho.array()).matrix());
  r["h2_constraint"] = constraint(rep.H2, rep.perm2, rep.rho);
  r["beta_normalization"] = std::abs(rep.beta.squaredNorm() - 1.0);
  r["beta_sign"] = std::max(0.0, -rep.beta.minCoeff());
  return vr;
}

MatrixXd block_rotation(int h) {
  const MatrixXd I = MatrixXd::Identity(h, h);
  MatrixXd R = MatrixXd::Zero(4 * h, 4 * h);
  R.block(0, 2 * h, h, h) = -I;
  R.block(h, 3 * h, h, h) = -I;
  R.block(2 * h, 0, h, h) = I;
  R.block(3 * h, h, h, h) = I;
  return R;
}

MatrixXd block_projection(const RepMatrices &m, int idx) {
  const Eigen::Index h = m.Z1.rows();
  const MatrixXd &Q = m.Q, &Qi = m.Qinv;
  MatrixXd P = MatrixXd::Zero(4 * h, 4 * h);
  auto put = [&](int a, int b, const MatrixXd &X) { P.block(a * h, b * h, h, h) = X; };
  switch (idx) {
  case 1:
    put(0, 0, m.Y1);
    put(0, 3, m.Y1 * Q);
    put(3, 0, Q * m.Y1);
    put(3, 3, Q * m.Y1 * Q);
    put(1, 1, m.Y2);
    put(1, 2, -m.Y2 * Qi);
    put(2, 1, -Qi * m.Y2);
    put(2, 2, Qi * m.Y2 * Qi);
    break;
  case 2:
    put(0, 0, Qi * m.Y2 * Qi);
    put(0, 3, Qi * m.Y2);
    put(3, 0, m.Y2 * Qi);
    put(3, 3, m.Y2);
    put(1, 1, Q * m.Y1 * Q);
    put(1, 2, -Q * m.Y1);
    put(2, 1, -m.Y1 * Q);
    put(2, 2, m.Y1);
    break;
  case 3:
    put(0, 0, m.Y3);
    put(0, 3, -m.Y3 * Qi);
    put(3, 0, -Qi * m.Y3);
    put(3, 3, Qi * m.Y3 * Qi);
    put(1, 1, m.Y4);
    put(1, 2, m.Y4 * Q);
    put(2, 1, Q * m.Y4);
    put(2, 2, Q * m.Y4 * Q);
    break;
  case 4:
    put(0, 0, Q * m.Y4 * Q);
    put(0, 3, -Q * m.Y4);
    put(3, 0, -m.Y4 * Q);
    put(3, 3, m.Y4);
    put(1, 1, Qi * m.Y3 * Qi);
    put(1, 2, Qi * m.Y3);
    put(2, 1, m.Y3 * Qi);
    put(2, 2, m.Y3);
    break;
  default:
    throw DimensionMismatch("projection index must be 1..4");
  }
  return P;
}

MatrixXd sampled_projection(const SymmetricEigenbasis &basis, int idx) {
  const Eigen::Index h = basis.half_m;
  MatrixXd F(basis.sym.rows(), 4 * h);
  F.leftCols(h) = basis.sym;
  F.middleCols(h, h) = basis.anti;
  F.middleCols(2 * h, h) = rotate_rows(basis.sym);
  F.rightCols(h) = rotate_rows(basis.anti);
  return gram(F, phase_mask(basis.geom, idx), F);
}

} // namespace effcond
