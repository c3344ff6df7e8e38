#pragma once

// Adapter that lets Eigen's iterative solvers call a std::function operator.

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <functional>

namespace effcond::detail {
class MatrixFreeOp;
}

namespace Eigen::internal {
template <>
struct traits<effcond::detail::MatrixFreeOp>
    : public Eigen::internal::traits<
          Eigen::SparseMatrix<std::complex<double>>> {};
} // namespace Eigen::internal

namespace effcond::detail {

class MatrixFreeOp : public Eigen::EigenBase<MatrixFreeOp> {
public:
  using Scalar = std::complex<double>;
  using RealScalar = double;
  using StorageIndex = int;
  enum {
    ColsAtCompileTime = Eigen::Dynamic,
    MaxColsAtCompileTime = Eigen::Dynamic,
    IsRowMajor = false
  };
  using Apply = std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)>;

  MatrixFreeOp(Eigen::Index size, Apply apply)
      : size_(size), apply_(std::move(apply)) {}

  Eigen::Index rows() const { return size_; }
  Eigen::Index cols() const { return size_; }

  template <typename Rhs>
  Eigen::Product<MatrixFreeOp, Rhs, Eigen::AliasFreeProduct>
  operator*(const Eigen::MatrixBase<Rhs> &x) const {
    return Eigen::Product<MatrixFreeOp, Rhs, Eigen::AliasFreeProduct>(
        *this, x.derived());
  }

  Eigen::VectorXcd apply(const Eigen::VectorXcd &x) const { return apply_(x); }

private:
  Eigen::Index size_;
  Apply apply_;
};

} // namespace effcond::detail

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<effcond::detail::MatrixFreeOp, Rhs, SparseShape,
                            DenseShape, GemvProduct>
    : generic_product_impl_base<
          effcond::detail::MatrixFreeOp, Rhs,
          generic_product_impl<effcond::detail::MatrixFreeOp, Rhs>> {
  using Scalar =
      typename Product<effcond::detail::MatrixFreeOp, Rhs>::Scalar;

  template <typename Dest>
  static void scaleAndAddTo(Dest &dst, const effcond::detail::MatrixFreeOp &lhs,
                            const Rhs &rhs, const Scalar &alpha) {
    dst.noalias() += alpha * lhs.apply(rhs);
  }
};
} // namespace Eigen::internal
