#pragma once

#include "thzbeam/manifold.hpp"
#include "thzbeam/objectives.hpp"

namespace thzbeam {

/// Analog matrix (constant modulus) plus per-subcarrier digital matrices,
/// normalized so every hybrid column W f_u[k] has unit power.
struct HybridPrecoder {
  ComplexMatrix analog;   // N_t x N_RF
  DigitalStack digital;   // K matrices, N_RF x U

  void write_csv(const std::string& path) const;
};

enum class Method { ConventionalRate, ReducedInterference, NoIciBaseline };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct PipelineSettings {
  int rf_chains = 4;
  double outer_tolerance = 1e-3;  // relative sum-rate improvement
  int max_outer_iters = 20;
  CgSettings cg;
  Method method = Method::ReducedInterference;
  double fd_step = 1e-5;
  // the reduced pipeline is single-pass by construction; alternation is an
  // experimentation knob only
  bool reduced_alternating = false;
};

// W entries (1/sqrt(N_t)) e^{j theta}, theta uniform on [0, 2 pi)
ComplexMatrix init_analog(int tx_antennas, int rf_chains, RandomDraws& rng);

// He[k] = H[k] * W, rows are users
ComplexMatrix effective_channel(const ComplexMatrix& h_k,
                                const ComplexMatrix& analog);

// right pseudo-inverse so He[k] * F[k] = I_U
ComplexMatrix zf_digital(const ComplexMatrix& effective);

// per column: f_u[k] /= ||W f_u[k]||_2
ComplexMatrix normalize_digital(const ComplexMatrix& analog,
                                const ComplexMatrix& digital_k);

// sum_k ||W (H[k] W)^+||_F^2: the squared inverse post-normalization signal
// gains of the zero-forcing solution. With zero-forcing re-solved per analog
// candidate the leakage terms are constant, so the SINR-denominator
// minimization of the reduced pipeline collapses to this quantity.
double zf_inverse_gain(const ChannelRealization& h, const ComplexMatrix& analog);

// analytic (Wirtinger) gradient of zf_inverse_gain w.r.t. the analog precoder
ComplexMatrix grad_zf_inverse_gain(const ChannelRealization& h,
                                   const ComplexMatrix& analog);

// alternating ZF / rate-maximizing manifold CG (finite-difference gradient)
std::pair<HybridPrecoder, OptTrace> run_conventional(
    const ChannelRealization& h, const IciProfile& ici, double psi,
    const PipelineSettings& settings, RngStream stream);

// stage 1 minimizes leaked interference over W (analytic gradient), stage 2
// is a single ZF pass with the optimized W
std::pair<HybridPrecoder, OptTrace> run_reduced(const ChannelRealization& h,
                                                const IciProfile& ici,
                                                double psi,
                                                const PipelineSettings& settings,
                                                RngStream stream);

// conventional pipeline with the impulse profile; callers may evaluate the
// result under a leaky profile for the mismatched-design studies
std::pair<HybridPrecoder, OptTrace> run_no_ici_baseline(
    const ChannelRealization& h, double psi, const PipelineSettings& settings,
    RngStream stream);

std::pair<HybridPrecoder, OptTrace> run_pipeline(const ChannelRealization& h,
                                                 const IciProfile& ici,
                                                 double psi,
                                                 const PipelineSettings& settings,
                                                 RngStream stream);

}  // namespace thzbeam
