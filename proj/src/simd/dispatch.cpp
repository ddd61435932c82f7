#include <cstdlib>
#include <string_view>

#include "cwnet/simd.hpp"

namespace cwnet::simd {
namespace {

struct Selection {
  const KernelTable* table;
  Isa isa;
};

Selection select() noexcept {
  const char* forced = std::getenv("CWNET_SIMD");
  if (forced != nullptr && std::string_view(forced) == "scalar") return {&scalar_kernels(), Isa::Scalar};
  if (const KernelTable* t = avx2_kernels()) return {t, Isa::Avx2};
  if (const KernelTable* t = neon_kernels()) return {t, Isa::Neon};
  return {&scalar_kernels(), Isa::Scalar};
}

const Selection& selection() noexcept {
  static const Selection s = select();
  return s;
}

}  // namespace

const KernelTable& kernels() noexcept { return *selection().table; }

Isa active_isa() noexcept { return selection().isa; }

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

}  // namespace cwnet::simd
