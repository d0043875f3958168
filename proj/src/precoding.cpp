#include "thzbeam/precoding.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace thzbeam {

void HybridPrecoder::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open precoder dump path: " + path);
  out << "matrix,subcarrier,row,col,re,im\n";
  out.precision(17);
  for (std::size_t r = 0; r < analog.rows(); ++r)
    for (std::size_t c = 0; c < analog.cols(); ++c)
      out << "W,-1," << r << ',' << c << ',' << analog(r, c).real() << ','
          << analog(r, c).imag() << '\n';
  for (std::size_t k = 0; k < digital.size(); ++k)
    for (std::size_t r = 0; r < digital[k].rows(); ++r)
      for (std::size_t c = 0; c < digital[k].cols(); ++c)
        out << "F," << k << ',' << r << ',' << c << ','
            << digital[k](r, c).real() << ',' << digital[k](r, c).imag()
            << '\n';
}

const char* method_name(Method m) {
  switch (m) {
    case Method::ConventionalRate: return "conventional";
    case Method::ReducedInterference: return "reduced";
    case Method::NoIciBaseline: return "no-ici";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "conventional") return Method::ConventionalRate;
  if (name == "reduced") return Method::ReducedInterference;
  if (name == "no-ici") return Method::NoIciBaseline;
  throw std::invalid_argument("unknown method: " + name);
}

ComplexMatrix init_analog(int tx_antennas, int rf_chains, RandomDraws& rng) {
  const double r = 1.0 / std::sqrt(double(tx_antennas));
  ComplexMatrix w(tx_antennas, rf_chains);
  for (int n = 0; n < tx_antennas; ++n)
    for (int m = 0; m < rf_chains; ++m)
      w(n, m) = std::polar(r, rng.uniform(0.0, 2.0 * std::numbers::pi));
  return w;
}

ComplexMatrix effective_channel(const ComplexMatrix& h_k,
                                const ComplexMatrix& analog) {
  return h_k * analog;
}

ComplexMatrix zf_digital(const ComplexMatrix& effective) {
  return right_pseudo_inverse(effective);
}

ComplexMatrix normalize_digital(const ComplexMatrix& analog,
                                const ComplexMatrix& digital_k) {
  const ComplexMatrix hybrid = analog * digital_k;
  ComplexMatrix out = digital_k;
  for (std::size_t u = 0; u < digital_k.cols(); ++u) {
    double norm_sq = 0.0;
    for (std::size_t n = 0; n < hybrid.rows(); ++n)
      norm_sq += std::norm(hybrid(n, u));
    if (!(norm_sq > 0.0))
      throw RankDeficientError("zero hybrid column in digital normalization");
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t r = 0; r < out.rows(); ++r) out(r, u) *= inv;
  }
  return out;
}

double zf_inverse_gain(const ChannelRealization& h, const ComplexMatrix& analog) {
  double acc = 0.0;
  for (int k = 0; k < h.num_subcarriers(); ++k) {
    const ComplexMatrix hybrid =
        analog * zf_digital(effective_channel(h.at(k), analog));
    for (std::size_t i = 0; i < hybrid.size(); ++i)
      acc += std::norm(hybrid.data()[i]);
  }
  return acc;
}

ComplexMatrix grad_zf_inverse_gain(const ChannelRealization& h,
                                   const ComplexMatrix& analog) {
  const std::size_t nrf = analog.cols();
  ComplexMatrix grad(analog.rows(), nrf);
  for (int k = 0; k < h.num_subcarriers(); ++k) {
    const ComplexMatrix& ch = h.at(k);
    const ComplexMatrix he = effective_channel(ch, analog);
    const ComplexMatrix b = zf_digital(he);          // right pinv, He b = I
    const ComplexMatrix p = analog * b;              // hybrid W B
    const ComplexMatrix b_adj = b.adjoint();
    const ComplexMatrix proj = b * he;               // row-space projector
    ComplexMatrix residual = ComplexMatrix::identity(nrf) - proj;
    // d||W B(W)||^2: direct term P B^H plus the pinv sensitivity through He
    const ComplexMatrix m =
        (b_adj * b) * (b_adj * (analog.adjoint() * analog)) * residual;
    grad = grad + p * b_adj + ch.adjoint() * (m - (p.adjoint() * p) * b_adj);
  }
  return grad;
}

namespace {

std::vector<cxd> vectorize_colmajor(const ComplexMatrix& m) {
  std::vector<cxd> v;
  v.reserve(m.size());
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (std::size_t r = 0; r < m.rows(); ++r) v.push_back(m(r, c));
  return v;
}

void check_preconditions(const ChannelRealization& h,
                         const PipelineSettings& settings) {
  if (h.num_users() > settings.rf_chains)
    throw std::invalid_argument("pipeline requires U <= N_RF");
  if (settings.rf_chains > h.config.tx_antennas)
    throw std::invalid_argument("pipeline requires N_RF <= N_t");
}

DigitalStack zf_stack(const ChannelRealization& h, const ComplexMatrix& w) {
  DigitalStack f;
  f.reserve(h.num_subcarriers());
  for (int k = 0; k < h.num_subcarriers(); ++k)
    f.push_back(
        normalize_digital(w, zf_digital(effective_channel(h.at(k), w))));
  return f;
}

// unnormalized zero-forcing solutions He F = I; the reduced objective needs
// these so the implicit signal gain stays pinned at one
DigitalStack raw_zf_stack(const ChannelRealization& h, const ComplexMatrix& w) {
  DigitalStack f;
  f.reserve(h.num_subcarriers());
  for (int k = 0; k < h.num_subcarriers(); ++k)
    f.push_back(zf_digital(effective_channel(h.at(k), w)));
  return f;
}

// central-difference Wirtinger gradient of an arbitrary scalar function of
// the analog precoder (used where the power constraint couples F to W)
ComplexMatrix grad_value_fd(const std::function<double(const ComplexMatrix&)>& value,
                            const ComplexMatrix& at, double h_step) {
  ComplexMatrix w = at;
  ComplexMatrix grad(at.rows(), at.cols());
  for (std::size_t n = 0; n < at.rows(); ++n)
    for (std::size_t m = 0; m < at.cols(); ++m) {
      const cxd center = w(n, m);
      const double mag = std::abs(center);
      const double step = h_step * (mag > 0.0 ? mag : 1.0);
      auto eval_at = [&](cxd v) {
        w(n, m) = v;
        const double f = value(w);
        w(n, m) = center;
        return f;
      };
      const double d_re = (eval_at(center + cxd{step, 0.0}) -
                           eval_at(center - cxd{step, 0.0})) /
                          (2.0 * step);
      const double d_im = (eval_at(center + cxd{0.0, step}) -
                           eval_at(center - cxd{0.0, step})) /
                          (2.0 * step);
      grad(n, m) = cxd{d_re, d_im} * 0.5;
    }
  return grad;
}

void append_trace(OptTrace& into, const OptTrace& piece) {
  into.records.insert(into.records.end(), piece.records.begin(),
                      piece.records.end());
  into.termination = piece.termination;
}

std::pair<HybridPrecoder, OptTrace> alternating_pipeline(
    const ChannelRealization& h, const IciProfile& ici, double psi,
    const PipelineSettings& settings, RngStream stream, ObjectiveKind kind) {
  check_preconditions(h, settings);
  const std::size_t nt = h.config.tx_antennas;
  const std::size_t nrf = settings.rf_chains;

  RandomDraws rng(stream);
  ComplexMatrix w = init_analog(int(nt), int(nrf), rng);
  OptTrace trace;
  DigitalStack f;
  double prev_rate = 0.0;

  const bool single_pass = (kind == ObjectiveKind::NegativeInterference) &&
                           !settings.reduced_alternating;
  const int outer_limit = single_pass ? 1 : settings.max_outer_iters;

  for (int outer = 0; outer < outer_limit; ++outer) {
    f = zf_stack(h, w);
    const double rate = sum_rate(h, w, f, ici, psi);
    if (outer > 0 &&
        rate - prev_rate <= settings.outer_tolerance * std::abs(prev_rate))
      break;
    prev_rate = rate;

    CgProblem problem;
    if (kind == ObjectiveKind::NegativeInterference) {
      // SINR-denominator surrogate with zero-forcing re-solved per candidate:
      // the leaked power is then constant in W and the minimization reduces
      // to the inverse-signal-gain term, whose gradient is analytic
      problem.value = [&h, &ici, psi, nt, nrf](const ManifoldPoint& p) {
        const ComplexMatrix w_cand = unvec_precoder(p, nt, nrf);
        return -interference_noise_power(h, w_cand, raw_zf_stack(h, w_cand),
                                         ici, psi);
      };
      problem.euclidean_grad = [&h, psi, nt, nrf](const ManifoldPoint& p) {
        ComplexMatrix g =
            grad_zf_inverse_gain(h, unvec_precoder(p, nt, nrf));
        return vectorize_colmajor(g * cxd{-psi, 0.0});
      };
    } else {
      // composite rate objective: zero-forcing re-solved for each analog
      // candidate so the finite differences see the full dependence
      auto value = [&](const ComplexMatrix& w_cand) {
        return evaluate_objective(kind, h, w_cand, zf_stack(h, w_cand), ici,
                                  psi);
      };
      problem.value = [&, value](const ManifoldPoint& p) {
        return value(unvec_precoder(p, nt, nrf));
      };
      problem.euclidean_grad = [&, value](const ManifoldPoint& p) {
        return vectorize_colmajor(
            grad_value_fd(value, unvec_precoder(p, nt, nrf), settings.fd_step));
      };
    }

    auto [point, piece] = riemannian_cg(problem, vec_precoder(w), settings.cg);
    w = unvec_precoder(point, nt, nrf);
    append_trace(trace, piece);
  }

  // digital stage always follows the final analog precoder
  f = zf_stack(h, w);
  return {HybridPrecoder{std::move(w), std::move(f)}, std::move(trace)};
}

}  // namespace

std::pair<HybridPrecoder, OptTrace> run_conventional(
    const ChannelRealization& h, const IciProfile& ici, double psi,
    const PipelineSettings& settings, RngStream stream) {
  return alternating_pipeline(h, ici, psi, settings, stream,
                              ObjectiveKind::SumRateWithIci);
}

std::pair<HybridPrecoder, OptTrace> run_reduced(const ChannelRealization& h,
                                                const IciProfile& ici,
                                                double psi,
                                                const PipelineSettings& settings,
                                                RngStream stream) {
  return alternating_pipeline(h, ici, psi, settings, stream,
                              ObjectiveKind::NegativeInterference);
}

std::pair<HybridPrecoder, OptTrace> run_no_ici_baseline(
    const ChannelRealization& h, double psi, const PipelineSettings& settings,
    RngStream stream) {
  const IciProfile impulse = IciProfile::none(h.num_subcarriers());
  return alternating_pipeline(h, impulse, psi, settings, stream,
                              ObjectiveKind::SumRateWithIci);
}

std::pair<HybridPrecoder, OptTrace> run_pipeline(const ChannelRealization& h,
                                                 const IciProfile& ici,
                                                 double psi,
                                                 const PipelineSettings& settings,
                                                 RngStream stream) {
  switch (settings.method) {
    case Method::ConventionalRate:
      return run_conventional(h, ici, psi, settings, stream);
    case Method::ReducedInterference:
      return run_reduced(h, ici, psi, settings, stream);
    case Method::NoIciBaseline:
      return run_no_ici_baseline(h, psi, settings, stream);
  }
  throw std::logic_error("unknown pipeline method");
}

}  // namespace thzbeam
