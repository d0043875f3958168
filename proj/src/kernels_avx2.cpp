// AVX2+FMA variants of the complex inner-loop kernels. Two complex doubles
// per 256-bit lane; complex multiply via the movedup/permute/addsub idiom.
// Compiled with -mavx2 -mfma; callers must gate on avx2_kernels() != nullptr.

#include "thzbeam/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace thzbeam::simd {
namespace {

// acc_rr += [ar*br, ar*bi, ...], acc_ii += [ai*bi, ai*br, ...]
inline void cmul_accumulate(__m256d va, __m256d vb, __m256d& acc_rr,
                            __m256d& acc_ii) {
  __m256d a_re = _mm256_movedup_pd(va);
  __m256d a_im = _mm256_permute_pd(va, 0xF);
  __m256d b_sw = _mm256_permute_pd(vb, 0x5);
  acc_rr = _mm256_fmadd_pd(a_re, vb, acc_rr);
  acc_ii = _mm256_fmadd_pd(a_im, b_sw, acc_ii);
}

inline cxd reduce_cmul(__m256d acc_rr, __m256d acc_ii, bool conjugated) {
  // plain product: (re, im) = (rr - ii, ri + ir); conjugated flips the signs
  // on the ii terms, so re lanes come from rr + ii and im lanes from rr - ii.
  __m256d c;
  if (conjugated) {
    __m256d sum = _mm256_add_pd(acc_rr, acc_ii);
    __m256d dif = _mm256_sub_pd(acc_rr, acc_ii);
    c = _mm256_blend_pd(sum, dif, 0xA);
  } else {
    c = _mm256_addsub_pd(acc_rr, acc_ii);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, c);
  return {lanes[0] + lanes[2], lanes[1] + lanes[3]};
}

cxd dot_avx2(const cxd* a, const cxd* b, std::size_t n) {
  __m256d acc_rr = _mm256_setzero_pd();
  __m256d acc_ii = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  for (; i + 2 <= n; i += 2)
    cmul_accumulate(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i),
                    acc_rr, acc_ii);
  cxd acc = reduce_cmul(acc_rr, acc_ii, false);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

cxd cdot_avx2(const cxd* a, const cxd* b, std::size_t n) {
  __m256d acc_rr = _mm256_setzero_pd();
  __m256d acc_ii = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  for (; i + 2 <= n; i += 2)
    cmul_accumulate(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i),
                    acc_rr, acc_ii);
  cxd acc = reduce_cmul(acc_rr, acc_ii, true);
  for (; i < n; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

void matvec_avx2(const cxd* a, std::size_t rows, std::size_t cols,
                 const cxd* x, cxd* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(a + r * cols, x, cols);
}

double norm_sq_avx2(const cxd* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const double* p = reinterpret_cast<const double*>(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(p + 2 * i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i)
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

void axpy_avx2(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
  __m256d a_re = _mm256_set1_pd(alpha.real());
  __m256d a_im = _mm256_setr_pd(-alpha.imag(), alpha.imag(), -alpha.imag(),
                                alpha.imag());
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(px + 2 * i);
    __m256d vy = _mm256_loadu_pd(py + 2 * i);
    __m256d x_sw = _mm256_permute_pd(vx, 0x5);
    vy = _mm256_fmadd_pd(a_re, vx, vy);
    vy = _mm256_fmadd_pd(a_im, x_sw, vy);
    _mm256_storeu_pd(py + 2 * i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2", dot_avx2, cdot_avx2, matvec_avx2,
                                 norm_sq_avx2, axpy_avx2};
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return &table;
  return nullptr;
}

}  // namespace thzbeam::simd

#else

namespace thzbeam::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace thzbeam::simd

#endif
