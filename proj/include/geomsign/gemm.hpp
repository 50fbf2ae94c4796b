#pragma once

#include <Eigen/Core>
#include <cstddef>

namespace geomsign {

// Dense kernels behind the tape operators. Eigen runs with internal
// threading disabled so the per-element summation order is fixed; callers
// that want parallelism shard output rows, which keeps results bitwise
// reproducible at any thread count.

template <typename Real>
using EigenRowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Real>
using MapMat = Eigen::Map<EigenRowMat<Real>>;
template <typename Real>
using CMapMat = Eigen::Map<const EigenRowMat<Real>>;

// C (MxN) += A (MxK) * B (KxN), row-major raw pointers
template <typename Real>
inline void gemm_accum(size_t m, size_t k, size_t n, const Real* a, const Real* b, Real* c) {
  MapMat<Real> C(c, m, n);
  C.noalias() += CMapMat<Real>(a, m, k) * CMapMat<Real>(b, k, n);
}

// C (MxN) = A (MxK) * B (KxN)
template <typename Real>
inline void gemm(size_t m, size_t k, size_t n, const Real* a, const Real* b, Real* c) {
  MapMat<Real> C(c, m, n);
  C.noalias() = CMapMat<Real>(a, m, k) * CMapMat<Real>(b, k, n);
}

// C (MxN) += A^T (A is KxM) * B (KxN)
template <typename Real>
inline void gemm_at_accum(size_t m, size_t k, size_t n, const Real* a, const Real* b, Real* c) {
  MapMat<Real> C(c, m, n);
  C.noalias() += CMapMat<Real>(a, k, m).transpose() * CMapMat<Real>(b, k, n);
}

// C (MxN) += A (MxK) * B^T (B is NxK)
template <typename Real>
inline void gemm_bt_accum(size_t m, size_t k, size_t n, const Real* a, const Real* b, Real* c) {
  MapMat<Real> C(c, m, n);
  C.noalias() += CMapMat<Real>(a, m, k) * CMapMat<Real>(b, n, k).transpose();
}

}  // namespace geomsign
