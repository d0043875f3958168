#include <atomic>
#include <cstdlib>
#include <cstring>

#include "thzbeam/kernels.hpp"

namespace thzbeam::simd {
namespace {

std::atomic<const KernelTable*> g_override{nullptr};

const KernelTable* detect() {
  if (const char* env = std::getenv("THZBEAM_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_kernels();
    if (std::strcmp(env, "avx2") == 0 && avx2_kernels()) return avx2_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
  if (const KernelTable* t = g_override.load(std::memory_order_acquire))
    return *t;
  static const KernelTable* detected = detect();
  return *detected;
}

void select_kernels(const KernelTable* table) {
  g_override.store(table, std::memory_order_release);
}

}  // namespace thzbeam::simd
