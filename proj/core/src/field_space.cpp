#include "effcond/field_space.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "fft.hpp"

namespace effcond {

namespace detail {
namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto &[key, plan] : plans)
      fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find({n, sign});
    if (it != plans.end())
      return it->second;
    std::vector<fftw_complex> a(static_cast<std::size_t>(n) * n),
        b(static_cast<std::size_t>(n) * n);
    fftw_plan p = fftw_plan_dft_2d(n, n, a.data(), b.data(), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans[{n, sign}] = p;
    return p;
  }
};

PlanCache &cache() {
  static PlanCache c;
  return c;
}

void run(const std::complex<double> *in, std::complex<double> *out, int n,
         int sign) {
  fftw_plan p = cache().get(n, sign);
  // fftw_execute_dft does not modify its input for out-of-place plans.
  fftw_execute_dft(p,
                   reinterpret_cast<fftw_complex *>(
                       const_cast<std::complex<double> *>(in)),
                   reinterpret_cast<fftw_complex *>(out));
}

} // namespace

void fft2(const std::complex<double> *in, std::complex<double> *out, int n) {
  if (in == out) {
    std::vector<std::complex<double>> tmp(in, in + static_cast<std::size_t>(n) * n);
    run(tmp.data(), out, n, FFTW_FORWARD);
  } else {
    run(in, out, n, FFTW_FORWARD);
  }
}

void ifft2(const std::complex<double> *in, std::complex<double> *out, int n) {
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  if (in == out) {
    std::vector<std::complex<double>> tmp(in, in + nn);
    run(tmp.data(), out, n, FFTW_BACKWARD);
  } else {
    run(in, out, n, FFTW_BACKWARD);
  }
  const double s = 1.0 / static_cast<double>(nn);
  for (std::size_t k = 0; k < nn; ++k)
    out[k] *= s;
}

} // namespace detail

VectorField VectorField::zeros(int n) {
  VectorField v;
  v.n = n;
  v.data = Eigen::VectorXcd::Zero(2 * static_cast<Eigen::Index>(n) * n);
  return v;
}

VectorField VectorField::constant(int n, cplx h1, cplx h2) {
  VectorField v = zeros(n);
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  v.data.head(nn).setConstant(h1);
  v.data.tail(nn).setConstant(h2);
  return v;
}

double VectorField::norm() const {
  return data.norm() / static_cast<double>(n);
}

namespace {

void require_same(const VectorField &a, const VectorField &b) {
  if (a.n != b.n || a.data.size() != b.data.size())
    throw DimensionMismatch("fields of resolution " + std::to_string(a.n) +
                            " and " + std::to_string(b.n));
}

void require_geom(const VectorField &a, const GridGeometry &g) {
  if (a.n != g.n)
    throw DimensionMismatch("field resolution " + std::to_string(a.n) +
                            " vs geometry " + std::to_string(g.n));
}

bool symmetric_under(const std::vector<std::vector<int>> &raw, int n, int s,
                     int *bad_i, int *bad_j) {
  for (int i = 0; i < n; ++i) {
    const int mi = ((s - i) % n + n) % n;
    for (int j = 0; j < n; ++j) {
      if (raw[i][j] != raw[mi][j]) {
        if (bad_i) {
          *bad_i = i;
          *bad_j = j;
        }
        return false;
      }
    }
  }
  return true;
}

} // namespace

GridGeometry load_geometry(const std::vector<std::vector<int>> &raw,
                           MirrorSpec mirror) {
  const int n = static_cast<int>(raw.size());
  if (n < 4 || n % 2 != 0)
    throw ParseError("grid size must be even and >= 4, got " +
                     std::to_string(n));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(raw[i].size()) != n)
      throw ParseError("row " + std::to_string(i) + " has length " +
                       std::to_string(raw[i].size()) + ", expected " +
                       std::to_string(n));
    for (int j = 0; j < n; ++j)
      if (raw[i][j] != 0 && raw[i][j] != 1)
        throw ParseError("entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") is not 0 or 1");
  }

  int shift = ((mirror.shift % n) + n) % n;
  int bi = 0, bj = 0;
  if (mirror.automatic) {
    bool found = false;
    for (int s = 0; s < n && !found; ++s) {
      if (symmetric_under(raw, n, s, nullptr, nullptr)) {
        shift = s;
        found = true;
      }
    }
    if (!found) {
      symmetric_under(raw, n, 0, &bi, &bj);
      std::ostringstream os;
      os << "no mirror line found; with shift 0 cell (" << bi << "," << bj
         << ") has no mirror image at (" << ((n - bi) % n) << "," << bj << ")";
      throw ReflectionSymmetryViolated(os.str());
    }
  } else if (!symmetric_under(raw, n, shift, &bi, &bj)) {
    std::ostringstream os;
    os << "cell (" << bi << "," << bj << ") differs from its mirror cell ("
       << (((shift - bi) % n + n) % n) << "," << bj << ")";
    throw ReflectionSymmetryViolated(os.str());
  }

  GridGeometry g;
  g.n = n;
  g.mirror = shift;
  g.chi.resize(static_cast<std::size_t>(n) * n);
  long ones = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      g.chi[static_cast<std::size_t>(i) * n + j] =
          static_cast<std::uint8_t>(raw[i][j]);
      ones += raw[i][j];
    }
  g.f = static_cast<double>(ones) / (static_cast<double>(n) * n);
  if (ones == 0 || ones == static_cast<long>(n) * n)
    throw DegeneratePhase("volume fraction is " + std::to_string(g.f));
  return g;
}

double coercivity(const Tensor2 &s) {
  Eigen::Matrix2cd h = 0.5 * (s + s.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double norm_bound(const Tensor2 &s) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(s);
  return svd.singularValues()(0);
}

AdmissiblePair admissible_pair(const Tensor2 &sigma1, const Tensor2 &sigma2) {
  if (!sigma1.allFinite() || !sigma2.allFinite())
    throw InadmissiblePair("non-finite tensor entries");
  AdmissiblePair p;
  p.sigma1 = sigma1;
  p.sigma2 = sigma2;
  p.c1 = std::min(coercivity(sigma1), coercivity(sigma2));
  p.c2 = std::max(norm_bound(sigma1), norm_bound(sigma2));
  if (!(p.c1 > 0.0)) {
    std::ostringstream os;
    os << "Hermitian part not positive definite (c1 = " << p.c1 << ")";
    throw InadmissiblePair(os.str());
  }
  return p;
}

AdmissiblePair make_rotatable_pair(const Tensor2 &sigma1,
                                   const Tensor2 &sigma2) {
  auto theta = find_phase_rotation(sigma1, sigma2);
  if (!theta)
    throw InadmissiblePair("no phase rotation makes both phases coercive");
  const cplx r = std::polar(1.0, *theta);
  AdmissiblePair p = admissible_pair(r * sigma1, r * sigma2);
  p.sigma1 = sigma1;
  p.sigma2 = sigma2;
  return p;
}

std::optional<double> find_phase_rotation(const Tensor2 &sigma1,
                                          const Tensor2 &sigma2) {
  if (coercivity(sigma1) > 0.0 && coercivity(sigma2) > 0.0)
    return 0.0;
  constexpr int steps = 1440;
  double best = -1.0, best_theta = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double th = 2.0 * std::numbers::pi * k / steps;
    const cplx r = std::polar(1.0, th);
    const double c = std::min(coercivity(r * sigma1), coercivity(r * sigma2));
    if (c > best) {
      best = c;
      best_theta = th;
    }
  }
  if (best > 0.0)
    return best_theta;
  return std::nullopt;
}

cplx inner(const VectorField &a, const VectorField &b) {
  require_same(a, b);
  return a.data.dot(b.data) / (static_cast<double>(a.n) * a.n);
}

VectorField project_phase(int idx, const VectorField &field,
                          const GridGeometry &geom) {
  require_geom(field, geom);
  if (idx < 1 || idx > 4)
    throw DimensionMismatch("phase projection index must be 1..4");
  const int n = field.n;
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  const int comp = (idx == 1 || idx == 3) ? 0 : 1;
  const std::uint8_t keep = (idx <= 2) ? 1 : 0;
  VectorField out = VectorField::zeros(n);
  for (Eigen::Index k = 0; k < nn; ++k)
    if (geom.chi[k] == keep)
      out.data[comp * nn + k] = field.data[comp * nn + k];
  return out;
}

int effective_wavenumber(int idx, int n) {
  if (idx == n / 2)
    return 0;
  return idx < n / 2 ? idx : idx - n;
}

// Direction d(k) of the one-dimensional gradient subspace at each Fourier
// mode. Nyquist components are dropped; when nothing is left the axis of
// the Nyquist component is used (e1 at k = 0 and at the corner).
void detail::mode_direction(int a, int b, int n, double &d1, double &d2) {
  const int k1 = effective_wavenumber(a, n);
  const int k2 = effective_wavenumber(b, n);
  if (k1 == 0 && k2 == 0) {
    if (a == 0 && b == n / 2) {
      d1 = 0.0;
      d2 = 1.0;
    } else {
      d1 = 1.0;
      d2 = 0.0;
    }
    return;
  }
  const double r = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
  d1 = k1 / r;
  d2 = k2 / r;
}

namespace {

enum class LambdaPart { Full1, Gradient, Full2, DivFree };

VectorField apply_lambda(const VectorField &field, LambdaPart part) {
  const int n = field.n;
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  Eigen::VectorXcd spec(2 * nn);
  detail::fft2(field.data.data(), spec.data(), n);
  detail::fft2(field.data.data() + nn, spec.data() + nn, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Eigen::Index k = static_cast<Eigen::Index>(a) * n + b;
      double d1, d2;
      detail::mode_direction(a, b, n, d1, d2);
      const cplx h1 = spec[k], h2 = spec[nn + k];
      const cplx dot = d1 * h1 + d2 * h2;
      cplx g1 = d1 * dot, g2 = d2 * dot;
      if (part == LambdaPart::Full2 || part == LambdaPart::DivFree) {
        g1 = h1 - g1;
        g2 = h2 - g2;
      }
      if (k == 0 &&
          (part == LambdaPart::Gradient || part == LambdaPart::DivFree)) {
        g1 = 0.0;
        g2 = 0.0;
      }
      spec[k] = g1;
      spec[nn + k] = g2;
    }
  }
  VectorField out = VectorField::zeros(n);
  detail::ifft2(spec.data(), out.data.data(), n);
  detail::ifft2(spec.data() + nn, out.data.data() + nn, n);
  return out;
}

} // namespace

VectorField project_lambda(int idx, const VectorField &field) {
  if (idx != 1 && idx != 2)
    throw DimensionMismatch("Lambda projection index must be 1 or 2");
  return apply_lambda(field, idx == 1 ? LambdaPart::Full1 : LambdaPart::Full2);
}

VectorField project_gradient(const VectorField &field) {
  return apply_lambda(field, LambdaPart::Gradient);
}

VectorField project_divfree(const VectorField &field) {
  return apply_lambda(field, LambdaPart::DivFree);
}

VectorField rotate_perp(const VectorField &field) {
  const Eigen::Index nn = static_cast<Eigen::Index>(field.n) * field.n;
  VectorField out = VectorField::zeros(field.n);
  out.data.head(nn) = -field.data.tail(nn);
  out.data.tail(nn) = field.data.head(nn);
  return out;
}

VectorField reflect(const VectorField &field, int shift) {
  const int n = field.n;
  VectorField out = VectorField::zeros(n);
  for (int i = 0; i < n; ++i) {
    const int mi = ((shift - i) % n + n) % n;
    for (int j = 0; j < n; ++j) {
      out(0, i, j) = field(0, mi, j);
      out(1, i, j) = -field(1, mi, j);
    }
  }
  return out;
}

VectorField reflect(const VectorField &field, const GridGeometry &geom) {
  require_geom(field, geom);
  return reflect(field, geom.mirror);
}

Eigen::Vector2cd mean(const VectorField &field) {
  const Eigen::Index nn = static_cast<Eigen::Index>(field.n) * field.n;
  return {field.data.head(nn).mean(), field.data.tail(nn).mean()};
}

VectorField apply_tensor(const VectorField &field, const GridGeometry &geom,
                         const Tensor2 &s1, const Tensor2 &s2) {
  require_geom(field, geom);
  const Eigen::Index nn = static_cast<Eigen::Index>(field.n) * field.n;
  VectorField out = VectorField::zeros(field.n);
  for (Eigen::Index k = 0; k < nn; ++k) {
    const Tensor2 &s = geom.chi[k] ? s1 : s2;
    const cplx h1 = field.data[k], h2 = field.data[nn + k];
    out.data[k] = s(0, 0) * h1 + s(0, 1) * h2;
    out.data[nn + k] = s(1, 0) * h1 + s(1, 1) * h2;
  }
  return out;
}

GridGeometry checkerboard(int n) {
  std::vector<std::vector<int>> raw(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      raw[i][j] = ((2 * i) / n + (2 * j) / n) % 2;
  return load_geometry(raw, {true, 0});
}

GridGeometry stripes(int n, const std::vector<int> &rows) {
  std::vector<std::vector<int>> raw(n, std::vector<int>(n, 0));
  for (int r : rows)
    std::fill(raw.at(r).begin(), raw.at(r).end(), 1);
  return load_geometry(raw, {true, 0});
}

GridGeometry random_symmetric(int n, std::mt19937_64 &rng, double fill) {
  std::bernoulli_distribution coin(fill);
  for (;;) {
    std::vector<std::vector<int>> raw(n, std::vector<int>(n, 0));
    for (int i = 0; i <= n / 2; ++i)
      for (int j = 0; j < n; ++j)
        raw[i][j] = coin(rng) ? 1 : 0;
    for (int i = n / 2 + 1; i < n; ++i)
      raw[i] = raw[n - i];
    long ones = 0;
    for (auto &row : raw)
      for (int v : row)
        ones += v;
    if (ones > 0 && ones < static_cast<long>(n) * n)
      return load_geometry(raw);
  }
}

GridGeometry swap_phases(const GridGeometry &geom) {
  GridGeometry g = geom;
  for (auto &c : g.chi)
    c = static_cast<std::uint8_t>(1 - c);
  g.f = 1.0 - geom.f;
  return g;
}

VectorField random_field(int n, std::mt19937_64 &rng) {
  std::normal_distribution<double> nd;
  VectorField v = VectorField::zeros(n);
  for (Eigen::Index k = 0; k < v.data.size(); ++k)
    v.data[k] = cplx(nd(rng), nd(rng));
  return v;
}

} // namespace effcond
