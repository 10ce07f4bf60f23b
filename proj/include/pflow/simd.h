#ifndef PFLOW_SIMD_H_
#define PFLOW_SIMD_H_

#include <span>
#include <string_view>

namespace pflow::simd {

// Instruction sets with a kernel implementation. kScalar is the reference.
enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// Inner loops of the flow recursions. All spans passed to one call have the
// same length; out may not alias the inputs.
struct KernelTable {
  // out[i] += w[i] * x[i]
  void (*fma_rows)(std::span<double> out, std::span<const double> w, std::span<const double> x);
  // out[i] += alpha * x[i]
  void (*axpy)(std::span<double> out, double alpha, std::span<const double> x);
  // out[i] = a[i] * b[i]
  void (*mul)(std::span<double> out, std::span<const double> a, std::span<const double> b);
  double (*sum)(std::span<const double> x);
  // x[i] *= s
  void (*scale)(std::span<double> x, double s);
};

const KernelTable& scalar_kernels();
// Only defined on x86-64 builds; returns nullptr elsewhere.
const KernelTable* avx2_kernels();

bool isa_supported(Isa isa);

// Best supported ISA, unless PFLOW_ISA=scalar is set in the environment.
Isa active_isa();
const KernelTable& kernels(Isa isa);
inline const KernelTable& active_kernels() { return kernels(active_isa()); }

}  // namespace pflow::simd

#endif  // PFLOW_SIMD_H_
