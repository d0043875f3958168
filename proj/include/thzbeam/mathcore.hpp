#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "thzbeam/kernels.hpp"

namespace thzbeam {

using cxd = std::complex<double>;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RankDeficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense row-major complex matrix. Products route through the runtime-selected
/// SIMD kernel table.
class ComplexMatrix {
 public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  cxd& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cxd& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  cxd* data() { return data_.data(); }
  const cxd* data() const { return data_.data(); }
  cxd* row(std::size_t r) { return data_.data() + r * cols_; }
  const cxd* row(std::size_t r) const { return data_.data() + r * cols_; }

  ComplexMatrix operator*(const ComplexMatrix& rhs) const;
  ComplexMatrix operator+(const ComplexMatrix& rhs) const;
  ComplexMatrix operator-(const ComplexMatrix& rhs) const;
  ComplexMatrix operator*(cxd scalar) const;

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  double frobenius_norm() const;
  bool all_finite() const;

  std::vector<cxd> column(std::size_t c) const;
  void set_column(std::size_t c, const std::vector<cxd>& v);

  bool operator==(const ComplexMatrix& rhs) const = default;

 private:
  std::size_t rows_, cols_;
  std::vector<cxd> data_;
};

double frobenius_norm(const ComplexMatrix& m);

/// Immutable stream descriptor; (seed, stream_id) fully determines the draw
/// sequence on every platform and thread count.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

RngStream derive_stream(std::uint64_t seed, std::uint64_t stream_id);

/// Draw state built locally from a stream descriptor. Distribution transforms
/// are hand-rolled (std:: distributions are not bit-stable across platforms).
class RandomDraws {
 public:
  explicit RandomDraws(RngStream stream);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // Box-Muller, unit variance

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Two-component zero-mean Gaussian mixture for ray angle offsets. Weights
/// are normalized internally so the density integrates to one.
struct GmmParams {
  double a1 = 0.5;
  double a2 = 0.5;
  double sigma1 = 0.1;  // radians
  double sigma2 = 0.3;  // radians

  void validate() const;
  double variance() const;
};

double sample_gmm(const GmmParams& params, RandomDraws& rng);

// M^H (M M^H)^{-1} for U x N with U <= N; M * result = I_U. Throws
// RankDeficientError when the Gram condition estimate exceeds 1e12.
ComplexMatrix right_pseudo_inverse(const ComplexMatrix& m);

}  // namespace thzbeam
