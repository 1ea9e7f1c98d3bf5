#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Data-parallel inner loops. Every kernel has a scalar reference version;
// vector variants are selected once at startup from CPU capabilities and
// tested for equivalence against the scalar table.
namespace sentinel::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct Kernels {
  Isa isa;
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot_f32)(const float* a, const float* b, std::size_t n);
  // sum_i x[i]
  double (*sum_f64)(const double* x, std::size_t n);
  // out = {sum d^2, sum d^3, sum d^4} with d = x[i] - mean
  void (*central_moments_f64)(const double* x, std::size_t n, double mean, double* out);
};

const Kernels& scalar_kernels();
#if defined(SENTINEL_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif
#if defined(SENTINEL_HAVE_NEON)
const Kernels& neon_kernels();
#endif

// Kernel tables usable on this CPU, scalar first.
std::vector<const Kernels*> available_kernels();

// The table used by the library. Chosen on first use: the widest supported
// ISA, unless REPLY_SENTINEL_SIMD names another available one ("scalar",
// "avx2", "neon").
const Kernels& active();

std::string_view isa_name(Isa isa);

}  // namespace sentinel::simd
