#include <arm_neon.h>

#include "sentinel/simd.hpp"

namespace sentinel::simd {
namespace {

double dot_f32(const float* a, const float* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t va = vld1q_f32(a + i);
    float32x4_t vb = vld1q_f32(b + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

double sum_f64(const double* x, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

void central_moments_f64(const double* x, std::size_t n, double mean, double* out) {
  const float64x2_t vmean = vdupq_n_f64(mean);
  float64x2_t s2 = vdupq_n_f64(0.0), s3 = vdupq_n_f64(0.0), s4 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d = vsubq_f64(vld1q_f64(x + i), vmean);
    float64x2_t d2 = vmulq_f64(d, d);
    s2 = vaddq_f64(s2, d2);
    s3 = vaddq_f64(s3, vmulq_f64(d2, d));
    s4 = vaddq_f64(s4, vmulq_f64(d2, d2));
  }
  double m2 = vaddvq_f64(s2), m3 = vaddvq_f64(s3), m4 = vaddvq_f64(s4);
  for (; i < n; ++i) {
    double d = x[i] - mean;
    double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  out[0] = m2;
  out[1] = m3;
  out[2] = m4;
}

}  // namespace

const Kernels& neon_kernels() {
  static const Kernels k{Isa::kNeon, "neon", dot_f32, sum_f64, central_moments_f64};
  return k;
}

}  // namespace sentinel::simd
