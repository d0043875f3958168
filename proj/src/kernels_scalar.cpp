#include "thzbeam/kernels.hpp"

namespace thzbeam::simd {
namespace {

cxd dot_scalar(const cxd* a, const cxd* b, std::size_t n) {
  cxd acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

cxd cdot_scalar(const cxd* a, const cxd* b, std::size_t n) {
  cxd acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

void matvec_scalar(const cxd* a, std::size_t rows, std::size_t cols,
                   const cxd* x, cxd* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

double norm_sq_scalar(const cxd* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return acc;
}

void axpy_scalar(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot_scalar, cdot_scalar,
                                 matvec_scalar, norm_sq_scalar, axpy_scalar};
  return table;
}

}  // namespace thzbeam::simd
