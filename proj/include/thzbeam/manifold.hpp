#pragma once

#include <functional>
#include <string>
#include <vector>

#include "thzbeam/mathcore.hpp"

namespace thzbeam {

struct DegenerateStepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Point on the product-of-circles manifold: every entry has modulus
/// 1/sqrt(N_t) (vectorized analog precoder).
struct ManifoldPoint {
  std::vector<cxd> x;
  std::size_t tx_antennas = 0;

  double radius() const;
  bool on_manifold(double tol = 1e-12) const;
};

struct CgSettings {
  double step_scale = 0.1;
  double tolerance = 1e-4;  // relative objective improvement
  int max_iter = 200;
  // Armijo backtracking (factor 0.5, sufficient decrease 1e-4); the fixed
  // normalized step of the source algorithm is available by turning it off
  bool backtracking = true;
};

struct IterRecord {
  int iter;
  double objective;
  double step;
  double grad_norm;
  double millis;
};

struct OptTrace {
  std::vector<IterRecord> records;
  std::string termination;

  void write_csv(const std::string& path) const;
};

/// Objective (maximized) plus its Euclidean conjugate gradient, both taken at
/// a manifold point.
struct CgProblem {
  std::function<double(const ManifoldPoint&)> value;
  std::function<std::vector<cxd>(const ManifoldPoint&)> euclidean_grad;
};

// column-major vectorization of a constant-modulus matrix
ManifoldPoint vec_precoder(const ComplexMatrix& w);
ComplexMatrix unvec_precoder(const ManifoldPoint& p, std::size_t rows,
                             std::size_t cols);

// d - N_t * Re[d o x*] o x; exact tangency on the 1/sqrt(N_t) manifold
std::vector<cxd> project_tangent(const ManifoldPoint& at,
                                 const std::vector<cxd>& direction);

// per-entry phase normalization back to modulus 1/sqrt(N_t)
ManifoldPoint retract(const std::vector<cxd>& raw, std::size_t tx_antennas);

// Polak-Ribiere conjugate gradient on the constant-modulus manifold,
// maximizing problem.value
std::pair<ManifoldPoint, OptTrace> riemannian_cg(const CgProblem& problem,
                                                 ManifoldPoint x0,
                                                 const CgSettings& settings);

}  // namespace thzbeam
