#include <cstddef>

#include "pflow/simd.h"

namespace pflow::simd {

namespace {

void fma_rows_scalar(std::span<double> out, std::span<const double> w, std::span<const double> x) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] += w[i] * x[i];
}

void axpy_scalar(std::span<double> out, double alpha, std::span<const double> x) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] += alpha * x[i];
}

void mul_scalar(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double sum_scalar(std::span<const double> x) {
  double total = 0.0;
  for (double v : x) total += v;
  return total;
}

void scale_scalar(std::span<double> x, double s) {
  for (double& v : x) v *= s;
}

constexpr KernelTable kScalarTable = {
    fma_rows_scalar, axpy_scalar, mul_scalar, sum_scalar, scale_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

}  // namespace pflow::simd
