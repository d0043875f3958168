#pragma once

#include <vector>

#include "thzbeam/channel.hpp"
#include "thzbeam/ici.hpp"

namespace thzbeam {

/// psi = sigma_n^2 / P (noise-to-power ratio)
struct NoiseModel {
  double psi = 1.0;

  static NoiseModel from_snr_db(double snr_db);
  double snr_db() const;
};

enum class ObjectiveKind { SumRateWithIci, SumRateNoIci, NegativeInterference };

/// Per-subcarrier digital precoders, one N_RF x U matrix per subcarrier.
using DigitalStack = std::vector<ComplexMatrix>;

// |h_q[k] W f_u[k]| amplitudes for all (q, u, k), cached once per (H, W, F)
// evaluation; entry k is the U x U matrix He[k] * F[k].
std::vector<ComplexMatrix> link_matrix(const ChannelRealization& h,
                                       const ComplexMatrix& analog,
                                       const DigitalStack& digital);

// inner SINR fraction of the rate formula, exposed for diagnostics
double sinr(const ChannelRealization& h, const ComplexMatrix& analog,
            const DigitalStack& digital, const IciProfile& ici, double psi,
            int user, int subcarrier);

// log2(1 + SINR_{q,k}); interference index set: same user over all other
// subcarriers plus every other user over all subcarriers.
double per_user_rate(const ChannelRealization& h, const ComplexMatrix& analog,
                     const DigitalStack& digital, const IciProfile& ici,
                     double psi, int user, int subcarrier);

// (1/U) sum over users and subcarriers of per_user_rate
double sum_rate(const ChannelRealization& h, const ComplexMatrix& analog,
                const DigitalStack& digital, const IciProfile& ici, double psi);

// total leaked power over all (q, k) cells
double interference_power(const ChannelRealization& h,
                          const ComplexMatrix& analog,
                          const DigitalStack& digital, const IciProfile& ici);

// conjugate (Wirtinger) gradient of interference_power w.r.t. the analog
// precoder, N_t x N_RF
ComplexMatrix grad_interference(const ChannelRealization& h,
                                const ComplexMatrix& analog,
                                const DigitalStack& digital,
                                const IciProfile& ici);

// aggregated SINR denominator: interference_power plus the effective noise
// psi * sum_{k,u} ||W f_u[k]||^2. With an unnormalized zero-forcing digital
// stack (He F = I) the noise term is the inverse post-normalization signal
// gain, so minimizing this trades leakage against beamforming gain.
double interference_noise_power(const ChannelRealization& h,
                                const ComplexMatrix& analog,
                                const DigitalStack& digital,
                                const IciProfile& ici, double psi);

ComplexMatrix grad_interference_noise(const ChannelRealization& h,
                                      const ComplexMatrix& analog,
                                      const DigitalStack& digital,
                                      const IciProfile& ici, double psi);

// central-difference Wirtinger gradient (dRe + j dIm)/2 of the chosen
// objective; supplies the rate gradient where no analytic form exists
ComplexMatrix grad_objective_fd(ObjectiveKind kind, const ChannelRealization& h,
                                const ComplexMatrix& analog,
                                const DigitalStack& digital,
                                const IciProfile& ici, double psi,
                                double h_step = 1e-5);

double evaluate_objective(ObjectiveKind kind, const ChannelRealization& h,
                          const ComplexMatrix& analog,
                          const DigitalStack& digital, const IciProfile& ici,
                          double psi);

}  // namespace thzbeam
