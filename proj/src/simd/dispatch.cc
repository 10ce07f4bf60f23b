#include <cstdlib>
#include <string_view>

#include "pflow/simd.h"

namespace pflow::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa selected = [] {
    const char* forced = std::getenv("PFLOW_ISA");
    if (forced != nullptr && std::string_view(forced) == "scalar") return Isa::kScalar;
    return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
  }();
  return selected;
}

const KernelTable& kernels(Isa isa) {
  if (isa == Isa::kAvx2 && isa_supported(Isa::kAvx2)) return *avx2_kernels();
  return scalar_kernels();
}

}  // namespace pflow::simd
