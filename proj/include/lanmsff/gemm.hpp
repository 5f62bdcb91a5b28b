#pragma once

#include <algorithm>
#include <cstddef>

#include "lanmsff/core.hpp"

// Row-major accumulate-into GEMM kernels used by convolution and dense
// layers. Summation order is fixed, so results are bit-reproducible.

namespace lanmsff::gemm {

inline constexpr std::size_t kColumnTile = 256;

/// C[M,N] += A[M,K] * B[K,N]
inline void nn(std::size_t M, std::size_t N, std::size_t K, const real* A, std::size_t lda, const real* B,
               std::size_t ldb, real* C, std::size_t ldc) {
  for (std::size_t j0 = 0; j0 < N; j0 += kColumnTile) {
    const std::size_t jn = std::min(kColumnTile, N - j0);
    std::size_t i = 0;
    for (; i + 4 <= M; i += 4) {
      real* c0 = C + i * ldc + j0;
      real* c1 = c0 + ldc;
      real* c2 = c1 + ldc;
      real* c3 = c2 + ldc;
      for (std::size_t k = 0; k < K; ++k) {
        const real a0 = A[i * lda + k];
        const real a1 = A[(i + 1) * lda + k];
        const real a2 = A[(i + 2) * lda + k];
        const real a3 = A[(i + 3) * lda + k];
        const real* b = B + k * ldb + j0;
        for (std::size_t j = 0; j < jn; ++j) {
          const real bv = b[j];
          c0[j] += a0 * bv;
          c1[j] += a1 * bv;
          c2[j] += a2 * bv;
          c3[j] += a3 * bv;
        }
      }
    }
    for (; i < M; ++i) {
      real* c = C + i * ldc + j0;
      for (std::size_t k = 0; k < K; ++k) {
        const real a = A[i * lda + k];
        const real* b = B + k * ldb + j0;
        for (std::size_t j = 0; j < jn; ++j) c[j] += a * b[j];
      }
    }
  }
}

/// C[M,N] += A^T * B with A stored [K,M], B stored [K,N].
inline void tn(std::size_t M, std::size_t N, std::size_t K, const real* A, std::size_t lda, const real* B,
               std::size_t ldb, real* C, std::size_t ldc) {
  for (std::size_t j0 = 0; j0 < N; j0 += kColumnTile) {
    const std::size_t jn = std::min(kColumnTile, N - j0);
    std::size_t i = 0;
    for (; i + 4 <= M; i += 4) {
      real* c0 = C + i * ldc + j0;
      real* c1 = c0 + ldc;
      real* c2 = c1 + ldc;
      real* c3 = c2 + ldc;
      for (std::size_t k = 0; k < K; ++k) {
        const real* a = A + k * lda + i;
        const real a0 = a[0], a1 = a[1], a2 = a[2], a3 = a[3];
        const real* b = B + k * ldb + j0;
        for (std::size_t j = 0; j < jn; ++j) {
          const real bv = b[j];
          c0[j] += a0 * bv;
          c1[j] += a1 * bv;
          c2[j] += a2 * bv;
          c3[j] += a3 * bv;
        }
      }
    }
    for (; i < M; ++i) {
      real* c = C + i * ldc + j0;
      for (std::size_t k = 0; k < K; ++k) {
        const real a = A[k * lda + i];
        const real* b = B + k * ldb + j0;
        for (std::size_t j = 0; j < jn; ++j) c[j] += a * b[j];
      }
    }
  }
}

/// Dot product with eight interleaved partial sums (vectorizable without
/// reassociation flags; order is still fixed).
inline real dot(const real* a, const real* b, std::size_t n) {
  real acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (std::size_t l = 0; l < 8; ++l) acc[l] += a[i + l] * b[i + l];
  real tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail;
}

/// C[M,N] += A[M,K] * B^T with B stored [N,K].
inline void nt(std::size_t M, std::size_t N, std::size_t K, const real* A, std::size_t lda, const real* B,
               std::size_t ldb, real* C, std::size_t ldc) {
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < N; ++j) C[i * ldc + j] += dot(A + i * lda, B + j * ldb, K);
}

}  // namespace lanmsff::gemm
