#include <cstdlib>
#include <string>

#include "sentinel/simd.hpp"

namespace sentinel::simd {
namespace {

bool cpu_has_avx2() {
#if defined(SENTINEL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels& select() {
  auto tables = available_kernels();
  const Kernels* chosen = tables.back();
  if (const char* env = std::getenv("REPLY_SENTINEL_SIMD")) {
    std::string want(env);
    for (const Kernels* k : tables)
      if (want == k->name) chosen = k;
  }
  return *chosen;
}

}  // namespace

std::vector<const Kernels*> available_kernels() {
  std::vector<const Kernels*> out{&scalar_kernels()};
#if defined(SENTINEL_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back(&avx2_kernels());
#endif
#if defined(SENTINEL_HAVE_NEON)
  out.push_back(&neon_kernels());
#endif
  return out;
}

const Kernels& active() {
  static const Kernels& k = select();
  return k;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "scalar";
}

}  // namespace sentinel::simd
