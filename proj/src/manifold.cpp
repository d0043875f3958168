#include "thzbeam/manifold.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

namespace thzbeam {

double ManifoldPoint::radius() const {
  return 1.0 / std::sqrt(double(tx_antennas));
}

bool ManifoldPoint::on_manifold(double tol) const {
  const double r = radius();
  for (const cxd& v : x)
    if (std::abs(std::abs(v) - r) >= tol) return false;
  return true;
}

void OptTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace path: " + path);
  out << "iter,objective,step,grad_norm,millis\n";
  out.precision(17);
  for (const IterRecord& r : records)
    out << r.iter << ',' << r.objective << ',' << r.step << ',' << r.grad_norm
        << ',' << r.millis << '\n';
}

ManifoldPoint vec_precoder(const ComplexMatrix& w) {
  ManifoldPoint p;
  p.tx_antennas = w.rows();
  p.x.reserve(w.size());
  for (std::size_t c = 0; c < w.cols(); ++c)
    for (std::size_t r = 0; r < w.rows(); ++r) p.x.push_back(w(r, c));
  if (!p.on_manifold())
    throw std::invalid_argument("precoder violates the constant-modulus constraint");
  return p;
}

ComplexMatrix unvec_precoder(const ManifoldPoint& p, std::size_t rows,
                             std::size_t cols) {
  if (p.x.size() != rows * cols)
    throw DimensionError("unvec size mismatch");
  ComplexMatrix w(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) w(r, c) = p.x[c * rows + r];
  return w;
}

std::vector<cxd> project_tangent(const ManifoldPoint& at,
                                 const std::vector<cxd>& direction) {
  if (direction.size() != at.x.size())
    throw DimensionError("tangent projection length mismatch");
  // the N_t factor (= 1/r^2) makes Re[z_i x_i*] vanish exactly at radius r
  const double inv_r_sq = double(at.tx_antennas);
  std::vector<cxd> z(direction.size());
  for (std::size_t i = 0; i < direction.size(); ++i) {
    const double radial =
        direction[i].real() * at.x[i].real() + direction[i].imag() * at.x[i].imag();
    z[i] = direction[i] - inv_r_sq * radial * at.x[i];
  }
  return z;
}

ManifoldPoint retract(const std::vector<cxd>& raw, std::size_t tx_antennas) {
  ManifoldPoint p;
  p.tx_antennas = tx_antennas;
  p.x.resize(raw.size());
  const double r = 1.0 / std::sqrt(double(tx_antennas));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double mag = std::abs(raw[i]);
    if (mag <= 1e-300)
      throw DegenerateStepError("retraction hit a zero entry");
    p.x[i] = r * raw[i] / mag;
  }
  return p;
}

namespace {

double real_inner(const std::vector<cxd>& a, const std::vector<cxd>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return acc;
}

double vec_norm(const std::vector<cxd>& a) {
  return std::sqrt(simd::active_kernels().norm_sq(a.data(), a.size()));
}

std::vector<cxd> stepped(const std::vector<cxd>& x, double alpha,
                         const std::vector<cxd>& d) {
  std::vector<cxd> out(x);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * d[i];
  return out;
}

}  // namespace

std::pair<ManifoldPoint, OptTrace> riemannian_cg(const CgProblem& problem,
                                                 ManifoldPoint x0,
                                                 const CgSettings& settings) {
  if (!x0.on_manifold())
    throw std::invalid_argument("cg start point off the manifold");
  if (!(settings.step_scale > 0.0) || !(settings.tolerance > 0.0) ||
      settings.max_iter < 1)
    throw std::invalid_argument("invalid cg settings");

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t_start)
        .count();
  };

  OptTrace trace;
  ManifoldPoint x = std::move(x0);
  double f = problem.value(x);
  std::vector<cxd> g = project_tangent(x, problem.euclidean_grad(x));
  std::vector<cxd> d = g;
  trace.records.push_back({0, f, 0.0, vec_norm(g), elapsed_ms()});

  for (int t = 0; t < settings.max_iter; ++t) {
    const double d_norm = vec_norm(d);
    const double slope = real_inner(g, d);
    if (d_norm < 1e-300 || vec_norm(g) < 1e-300) {
      trace.termination = "zero gradient";
      return {x, trace};
    }

    double alpha = settings.step_scale / d_norm;
    ManifoldPoint x_next;
    double f_next = 0.0;
    int halvings = 0;
    for (;; ++halvings) {
      if (halvings > 20) {
        if (settings.backtracking) {
          // no acceptable step along d; treat as converged at x
          trace.termination = "line search exhausted";
          return {x, trace};
        }
        throw DegenerateStepError("retraction failed after 20 step halvings");
      }
      try {
        x_next = retract(stepped(x.x, alpha, d), x.tx_antennas);
      } catch (const DegenerateStepError&) {
        alpha *= 0.5;
        continue;
      }
      f_next = problem.value(x_next);
      if (!settings.backtracking) break;
      if (f_next >= f + 1e-4 * alpha * slope && f_next >= f - 1e-12) break;
      alpha *= 0.5;
    }

    std::vector<cxd> g_next = project_tangent(x_next, problem.euclidean_grad(x_next));
    const std::vector<cxd> g_transported = project_tangent(x_next, g);
    const double transported_norm_sq =
        simd::active_kernels().norm_sq(g_transported.data(), g_transported.size());

    double beta = 0.0;
    if (transported_norm_sq >= 1e-28) {
      double num = 0.0;
      for (std::size_t i = 0; i < g_next.size(); ++i)
        num += g_next[i].real() * (g_next[i].real() - g_transported[i].real()) +
               g_next[i].imag() * (g_next[i].imag() - g_transported[i].imag());
      beta = num / transported_norm_sq;
    }
    if (!std::isfinite(beta)) beta = 0.0;

    std::vector<cxd> d_transported = project_tangent(x_next, d);
    std::vector<cxd> d_next(g_next.size());
    for (std::size_t i = 0; i < d_next.size(); ++i)
      d_next[i] = g_next[i] + beta * d_transported[i];
    // fall back to steepest ascent when the conjugate direction degrades
    if (real_inner(g_next, d_next) <= 0.0) d_next = g_next;

    const double improvement = f_next - f;
    x = std::move(x_next);
    g = std::move(g_next);
    d = std::move(d_next);
    f = f_next;
    trace.records.push_back({t + 1, f, alpha, vec_norm(g), elapsed_ms()});

    // relative test: absolute objective scales vary by orders of magnitude
    // with the path gain, so a fixed threshold would stop immediately
    if (std::abs(improvement) <=
        settings.tolerance * std::max(std::abs(f), 1e-300)) {
      trace.termination = "converged";
      return {x, trace};
    }
  }
  trace.termination = "max iterations";
  return {x, trace};
}

}  // namespace thzbeam
