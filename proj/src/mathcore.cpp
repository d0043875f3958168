#include "thzbeam/mathcore.hpp"

#include <cmath>
#include <numbers>

namespace thzbeam {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw DimensionError("matrix product dimension mismatch");
  const auto& k = simd::active_kernels();
  ComplexMatrix out(rows_, rhs.cols_);
  // C row i accumulates A(i,k) * B row k; axpy keeps the inner loop contiguous
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      k.axpy((*this)(i, j), rhs.row(j), out.row(i), rhs.cols_);
  return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DimensionError("matrix sum dimension mismatch");
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.data_[i] = data_[i] + rhs.data_[i];
  return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DimensionError("matrix difference dimension mismatch");
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.data_[i] = data_[i] - rhs.data_[i];
  return out;
}

ComplexMatrix ComplexMatrix::operator*(cxd scalar) const {
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i)
    out.data_[i] = data_[i] * scalar;
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  return std::sqrt(simd::active_kernels().norm_sq(data_.data(), data_.size()));
}

bool ComplexMatrix::all_finite() const {
  for (const cxd& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

std::vector<cxd> ComplexMatrix::column(std::size_t c) const {
  std::vector<cxd> v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

void ComplexMatrix::set_column(std::size_t c, const std::vector<cxd>& v) {
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

double frobenius_norm(const ComplexMatrix& m) { return m.frobenius_norm(); }

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return RngStream{seed, stream_id};
}

RandomDraws::RandomDraws(RngStream stream)
    : engine_(splitmix64(splitmix64(stream.seed) ^
                         splitmix64(stream.stream_id + 0x6A09E667F3BCC909ULL))) {}

double RandomDraws::uniform() {
  // top 53 bits -> [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomDraws::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RandomDraws::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void GmmParams::validate() const {
  if (!(a1 > 0.0) || !(a2 >= 0.0) || a1 + a2 <= 0.0)
    throw std::invalid_argument("gmm weights must be positive");
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
    throw std::invalid_argument("gmm sigmas must be positive");
}

double GmmParams::variance() const {
  const double w1 = a1 / (a1 + a2);
  const double w2 = a2 / (a1 + a2);
  return w1 * sigma1 * sigma1 + w2 * sigma2 * sigma2;
}

double sample_gmm(const GmmParams& params, RandomDraws& rng) {
  params.validate();
  const double w1 = params.a1 / (params.a1 + params.a2);
  const double sigma = rng.uniform() < w1 ? params.sigma1 : params.sigma2;
  return sigma * rng.normal();
}

namespace {

// in-place inverse of a Hermitian positive definite matrix via Cholesky;
// returns false when a pivot degenerates.
bool hpd_inverse(ComplexMatrix& g) {
  const std::size_t n = g.rows();
  ComplexMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = g(j, j).real();
    for (std::size_t p = 0; p < j; ++p) diag -= std::norm(l(j, p));
    if (!(diag > 0.0)) return false;
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      cxd v = g(i, j);
      for (std::size_t p = 0; p < j; ++p) v -= l(i, p) * std::conj(l(j, p));
      l(i, j) = v / l(j, j).real();
    }
  }
  // invert by solving L L^H X = I column by column
  ComplexMatrix inv(n, n);
  std::vector<cxd> y(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      cxd v = (i == c) ? cxd{1.0, 0.0} : cxd{0.0, 0.0};
      for (std::size_t p = 0; p < i; ++p) v -= l(i, p) * y[p];
      y[i] = v / l(i, i).real();
    }
    for (std::size_t ii = n; ii-- > 0;) {
      cxd v = y[ii];
      for (std::size_t p = ii + 1; p < n; ++p)
        v -= std::conj(l(p, ii)) * inv(p, c);
      inv(ii, c) = v / l(ii, ii).real();
    }
  }
  g = inv;
  return true;
}

double norm1(const ComplexMatrix& m) {
  double best = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) s += std::abs(m(r, c));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

ComplexMatrix right_pseudo_inverse(const ComplexMatrix& m) {
  if (m.rows() > m.cols())
    throw DimensionError("right pseudo-inverse requires rows <= cols");
  const ComplexMatrix gram = m * m.adjoint();
  ComplexMatrix gram_inv = gram;
  if (!hpd_inverse(gram_inv))
    throw RankDeficientError("rank-deficient matrix in right pseudo-inverse");
  // 1-norm condition estimate on the Gram system
  if (norm1(gram) * norm1(gram_inv) > 1e12)
    throw RankDeficientError("ill-conditioned matrix in right pseudo-inverse");
  return m.adjoint() * gram_inv;
}

}  // namespace thzbeam
