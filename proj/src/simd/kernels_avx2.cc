// AVX2 + FMA variants. This translation unit is built with -mavx2 -mfma and
// must only be entered after isa_supported(Isa::kAvx2) has returned true.

#include <cstddef>

#include "pflow/simd.h"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace pflow::simd {

namespace {

void fma_rows_avx2(std::span<double> out, std::span<const double> w, std::span<const double> x) {
  const std::size_t n = out.size();
  double* o = out.data();
  const double* wp = w.data();
  const double* xp = x.data();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d a0 = _mm256_loadu_pd(o + i);
    __m256d a1 = _mm256_loadu_pd(o + i + 4);
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(wp + i), _mm256_loadu_pd(xp + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(wp + i + 4), _mm256_loadu_pd(xp + i + 4), a1);
    _mm256_storeu_pd(o + i, a0);
    _mm256_storeu_pd(o + i + 4, a1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(o + i);
    a = _mm256_fmadd_pd(_mm256_loadu_pd(wp + i), _mm256_loadu_pd(xp + i), a);
    _mm256_storeu_pd(o + i, a);
  }
  for (; i < n; ++i) o[i] += wp[i] * xp[i];
}

void axpy_avx2(std::span<double> out, double alpha, std::span<const double> x) {
  const std::size_t n = out.size();
  double* o = out.data();
  const double* xp = x.data();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_loadu_pd(o + i);
    a = _mm256_fmadd_pd(va, _mm256_loadu_pd(xp + i), a);
    _mm256_storeu_pd(o + i, a);
  }
  for (; i < n; ++i) o[i] += alpha * xp[i];
}

void mul_avx2(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out.data() + i,
                     _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

double sum_avx2(std::span<const double> x) {
  const std::size_t n = x.size();
  const double* p = x.data();
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_add_pd(s0, _mm256_loadu_pd(p + i));
    s1 = _mm256_add_pd(s1, _mm256_loadu_pd(p + i + 4));
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_add_pd(s0, _mm256_loadu_pd(p + i));
  s0 = _mm256_add_pd(s0, s1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, s0);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += p[i];
  return total;
}

void scale_avx2(std::span<double> x, double s) {
  const std::size_t n = x.size();
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(_mm256_loadu_pd(x.data() + i), vs));
  }
  for (; i < n; ++i) x[i] *= s;
}

constexpr KernelTable kAvx2Table = {
    fma_rows_avx2, axpy_avx2, mul_avx2, sum_avx2, scale_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2Table; }

}  // namespace pflow::simd

#else

namespace pflow::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace pflow::simd

#endif
