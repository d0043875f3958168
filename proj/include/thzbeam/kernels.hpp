#pragma once

#include <complex>
#include <cstddef>

namespace thzbeam::simd {

using cxd = std::complex<double>;

// Function table for the complex arithmetic inner loops. Every entry has a
// scalar reference implementation; wider variants must agree with it to
// floating-point reassociation tolerance (see tests/test_kernels.cpp).
struct KernelTable {
  const char* name;
  // sum_i a[i] * b[i]
  cxd (*dot)(const cxd* a, const cxd* b, std::size_t n);
  // sum_i conj(a[i]) * b[i]
  cxd (*cdot)(const cxd* a, const cxd* b, std::size_t n);
  // y = A * x, A row-major rows x cols
  void (*matvec)(const cxd* a, std::size_t rows, std::size_t cols, const cxd* x,
                 cxd* y);
  // sum_i |a[i]|^2
  double (*norm_sq)(const cxd* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(cxd alpha, const cxd* x, cxd* y, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the CPU lacks AVX2+FMA (or the build targets another arch).
const KernelTable* avx2_kernels();

// Best table for this machine. THZBEAM_KERNELS=scalar|avx2 overrides.
const KernelTable& active_kernels();

// Test hook; pass nullptr to restore auto-detection.
void select_kernels(const KernelTable* table);

}  // namespace thzbeam::simd
