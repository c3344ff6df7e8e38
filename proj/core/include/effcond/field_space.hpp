#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "effcond/errors.hpp"

namespace effcond {

using cplx = std::complex<double>;
using Tensor2 = Eigen::Matrix2cd;

// n x n indicator of phase 1; row index i is the x1 sample index.
struct GridGeometry {
  int n = 0;
  std::vector<std::uint8_t> chi; // row-major, chi[i * n + j]
  double f = 0.0;
  int mirror = 0; // reflection is i -> (mirror - i) mod n

  int at(int i, int j) const { return chi[static_cast<std::size_t>(i) * n + j]; }
};

// Two complex components stored component-major: data[c * n * n + i * n + j].
struct VectorField {
  int n = 0;
  Eigen::VectorXcd data;

  static VectorField zeros(int n);
  static VectorField constant(int n, cplx h1, cplx h2);

  cplx &operator()(int c, int i, int j) {
    return data[static_cast<Eigen::Index>(c) * n * n + i * n + j];
  }
  cplx operator()(int c, int i, int j) const {
    return data[static_cast<Eigen::Index>(c) * n * n + i * n + j];
  }
  double norm() const; // sqrt(inner(this, this))
};

struct AdmissiblePair {
  Tensor2 sigma1;
  Tensor2 sigma2;
  double c1 = 0.0; // min eigenvalue of the Hermitian parts
  double c2 = 0.0; // max singular value
};

// Mirror shift used by load_geometry: either a fixed shift or the smallest
// shift under which chi is symmetric.
struct MirrorSpec {
  bool automatic = false;
  int shift = 0;
};

GridGeometry load_geometry(const std::vector<std::vector<int>> &raw,
                           MirrorSpec mirror = {});

// Coercivity constant and norm bound of a single tensor.
double coercivity(const Tensor2 &s);
double norm_bound(const Tensor2 &s);

// Throws InadmissiblePair if either Hermitian part is not positive definite.
AdmissiblePair admissible_pair(const Tensor2 &sigma1, const Tensor2 &sigma2);

// Like admissible_pair, but accepts pairs that become coercive after a common
// phase rotation exp(i theta); c1 and c2 refer to the rotated tensors.
AdmissiblePair make_rotatable_pair(const Tensor2 &sigma1, const Tensor2 &sigma2);

// Angle theta with exp(i theta) sigma_k coercive for both k, if one exists.
std::optional<double> find_phase_rotation(const Tensor2 &sigma1,
                                          const Tensor2 &sigma2);

cplx inner(const VectorField &a, const VectorField &b);
VectorField project_phase(int idx, const VectorField &field,
                          const GridGeometry &geom);
VectorField project_lambda(int idx, const VectorField &field);
VectorField rotate_perp(const VectorField &field);
VectorField reflect(const VectorField &field, int shift = 0);
VectorField reflect(const VectorField &field, const GridGeometry &geom);

// Projection onto the zero-mean gradient space (Lambda_1 without the k=0 part).
VectorField project_gradient(const VectorField &field);
// Projection onto the zero-mean divergence-free space.
VectorField project_divfree(const VectorField &field);
// Cell average of each component.
Eigen::Vector2cd mean(const VectorField &field);
// Pointwise multiplication by sigma(x) = chi s1 + (1 - chi) s2.
VectorField apply_tensor(const VectorField &field, const GridGeometry &geom,
                         const Tensor2 &s1, const Tensor2 &s2);

// Effective wavenumber along one axis (Nyquist index mapped to zero).
int effective_wavenumber(int idx, int n);

// Common test and demo geometries.
GridGeometry checkerboard(int n);
GridGeometry stripes(int n, const std::vector<int> &rows);
GridGeometry random_symmetric(int n, std::mt19937_64 &rng, double fill = 0.5);
GridGeometry swap_phases(const GridGeometry &geom);

VectorField random_field(int n, std::mt19937_64 &rng);

} // namespace effcond
