#include "battlemix/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "battlemix/error.hpp"

namespace battlemix::simd {

const Kernels* avx2_kernels();

namespace {

bool cpu_has_avx2() {
#if defined(BATTLEMIX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels* initial() {
  if (const char* env = std::getenv("BATTLEMIX_KERNELS"); env && std::string(env) == "scalar") {
    return &scalar_kernels();
  }
  return isa_available(Isa::Avx2) ? avx2_kernels() : &scalar_kernels();
}

std::atomic<const Kernels*>& active() {
  static std::atomic<const Kernels*> a{initial()};
  return a;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Scalar ? "scalar" : "avx2"; }

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
  static const bool avx2 = avx2_kernels() != nullptr && cpu_has_avx2();
  return avx2;
}

const Kernels& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw Error(ErrorCode::InvalidArgument,
                "kernel variant " + std::string(to_string(isa)) + " is not available");
  }
  return isa == Isa::Scalar ? scalar_kernels() : *avx2_kernels();
}

const Kernels& kernels() { return *active().load(std::memory_order_acquire); }

void force_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace battlemix::simd
