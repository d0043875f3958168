#include "thzbeam/objectives.hpp"

#include <cmath>

namespace thzbeam {

NoiseModel NoiseModel::from_snr_db(double snr_db) {
  return NoiseModel{std::pow(10.0, -snr_db / 10.0)};
}

double NoiseModel::snr_db() const { return -10.0 * std::log10(psi); }

namespace {

void check_dimensions(const ChannelRealization& h, const ComplexMatrix& analog,
                      const DigitalStack& digital) {
  const std::size_t users = h.num_users();
  const std::size_t k_count = h.num_subcarriers();
  if (digital.size() != k_count)
    throw DimensionError("digital stack size != subcarrier count");
  if (analog.rows() != h.at(0).cols())
    throw DimensionError("analog precoder rows != tx antenna count");
  for (const ComplexMatrix& f : digital)
    if (f.rows() != analog.cols() || f.cols() != users)
      throw DimensionError("digital precoder dimensions inconsistent");
}

// leaked power into cell (q, k): same user over i != k, other users over all i
double interference_cell(const std::vector<ComplexMatrix>& links,
                         const IciProfile& ici, int q, int k) {
  const int k_count = static_cast<int>(links.size());
  const int users = static_cast<int>(links[0].rows());
  double acc = 0.0;
  for (int i = 0; i < k_count; ++i) {
    const double w = ici.weight(i - k);
    if (w == 0.0) continue;
    for (int u = 0; u < users; ++u) {
      if (u == q && i == k) continue;
      acc += w * std::norm(links[i](q, u));
    }
  }
  return acc;
}

double rate_from_links(const std::vector<ComplexMatrix>& links,
                       const IciProfile& ici, double psi, int q, int k) {
  const double signal = ici.weight(0) * std::norm(links[k](q, q));
  const double denom = interference_cell(links, ici, q, k) + psi;
  return std::log2(1.0 + signal / denom);
}

}  // namespace

std::vector<ComplexMatrix> link_matrix(const ChannelRealization& h,
                                       const ComplexMatrix& analog,
                                       const DigitalStack& digital) {
  check_dimensions(h, analog, digital);
  std::vector<ComplexMatrix> links;
  links.reserve(h.num_subcarriers());
  for (int k = 0; k < h.num_subcarriers(); ++k)
    links.push_back(h.at(k) * analog * digital[k]);
  return links;
}

double sinr(const ChannelRealization& h, const ComplexMatrix& analog,
            const DigitalStack& digital, const IciProfile& ici, double psi,
            int user, int subcarrier) {
  const auto links = link_matrix(h, analog, digital);
  const double signal = ici.weight(0) * std::norm(links[subcarrier](user, user));
  return signal / (interference_cell(links, ici, user, subcarrier) + psi);
}

double per_user_rate(const ChannelRealization& h, const ComplexMatrix& analog,
                     const DigitalStack& digital, const IciProfile& ici,
                     double psi, int user, int subcarrier) {
  const auto links = link_matrix(h, analog, digital);
  return rate_from_links(links, ici, psi, user, subcarrier);
}

double sum_rate(const ChannelRealization& h, const ComplexMatrix& analog,
                const DigitalStack& digital, const IciProfile& ici,
                double psi) {
  const auto links = link_matrix(h, analog, digital);
  double acc = 0.0;
  for (int q = 0; q < h.num_users(); ++q)
    for (int k = 0; k < h.num_subcarriers(); ++k)
      acc += rate_from_links(links, ici, psi, q, k);
  return acc / h.num_users();
}

double interference_power(const ChannelRealization& h,
                          const ComplexMatrix& analog,
                          const DigitalStack& digital, const IciProfile& ici) {
  const auto links = link_matrix(h, analog, digital);
  double acc = 0.0;
  for (int q = 0; q < h.num_users(); ++q)
    for (int k = 0; k < h.num_subcarriers(); ++k)
      acc += interference_cell(links, ici, q, k);
  return acc;
}

ComplexMatrix grad_interference(const ChannelRealization& h,
                                const ComplexMatrix& analog,
                                const DigitalStack& digital,
                                const IciProfile& ici) {
  const auto links = link_matrix(h, analog, digital);
  const int users = h.num_users();
  const int k_count = h.num_subcarriers();
  const std::size_t nt = analog.rows();
  const std::size_t nrf = analog.cols();
  const auto& kern = simd::active_kernels();

  // sum over outer cells (q, k) collapses to a per-(q, u, i) coefficient:
  // all offsets i-k, minus the k == i term when u == q
  std::vector<double> offset_weight(k_count);
  for (int i = 0; i < k_count; ++i) {
    double s = 0.0;
    for (int k = 0; k < k_count; ++k) s += ici.weight(i - k);
    offset_weight[i] = s;
  }

  ComplexMatrix grad(nt, nrf);
  std::vector<cxd> f_conj(nrf);
  for (int i = 0; i < k_count; ++i) {
    for (int u = 0; u < users; ++u) {
      for (std::size_t m = 0; m < nrf; ++m)
        f_conj[m] = std::conj(digital[i](m, u));
      for (int q = 0; q < users; ++q) {
        const double coeff =
            offset_weight[i] - (u == q ? ici.weight(0) : 0.0);
        if (coeff == 0.0) continue;
        const cxd amp = coeff * links[i](q, u);
        // rank-one update: amp * h_q[i]^H f_u[i]^H
        for (std::size_t n = 0; n < nt; ++n)
          kern.axpy(amp * std::conj(h.at(i)(q, n)), f_conj.data(),
                    grad.row(n), nrf);
      }
    }
  }
  return grad;
}

double interference_noise_power(const ChannelRealization& h,
                                const ComplexMatrix& analog,
                                const DigitalStack& digital,
                                const IciProfile& ici, double psi) {
  double noise = 0.0;
  for (const ComplexMatrix& f : digital) {
    const ComplexMatrix hybrid = analog * f;
    for (std::size_t i = 0; i < hybrid.size(); ++i)
      noise += std::norm(hybrid.data()[i]);
  }
  return interference_power(h, analog, digital, ici) + psi * noise;
}

ComplexMatrix grad_interference_noise(const ChannelRealization& h,
                                      const ComplexMatrix& analog,
                                      const DigitalStack& digital,
                                      const IciProfile& ici, double psi) {
  ComplexMatrix grad = grad_interference(h, analog, digital, ici);
  // d/dW* of psi ||W f||^2 summed over columns and subcarriers:
  // psi * W * sum_k F[k] F[k]^H
  ComplexMatrix gram(analog.cols(), analog.cols());
  for (const ComplexMatrix& f : digital) gram = gram + f * f.adjoint();
  return grad + analog * gram * cxd{psi, 0.0};
}

double evaluate_objective(ObjectiveKind kind, const ChannelRealization& h,
                          const ComplexMatrix& analog,
                          const DigitalStack& digital, const IciProfile& ici,
                          double psi) {
  switch (kind) {
    case ObjectiveKind::SumRateWithIci:
      return sum_rate(h, analog, digital, ici, psi);
    case ObjectiveKind::SumRateNoIci:
      return sum_rate(h, analog, digital,
                      IciProfile::none(h.num_subcarriers()), psi);
    case ObjectiveKind::NegativeInterference:
      return -interference_power(h, analog, digital, ici);
  }
  throw std::logic_error("unknown objective kind");
}

ComplexMatrix grad_objective_fd(ObjectiveKind kind, const ChannelRealization& h,
                                const ComplexMatrix& analog,
                                const DigitalStack& digital,
                                const IciProfile& ici, double psi,
                                double h_step) {
  if (!(h_step > 0.0)) throw std::invalid_argument("fd step must be positive");
  ComplexMatrix w = analog;
  ComplexMatrix grad(analog.rows(), analog.cols());
  for (std::size_t n = 0; n < analog.rows(); ++n)
    for (std::size_t m = 0; m < analog.cols(); ++m) {
      const cxd center = w(n, m);
      const double mag = std::abs(center);
      const double step = h_step * (mag > 0.0 ? mag : 1.0);
      auto eval_at = [&](cxd v) {
        w(n, m) = v;
        const double f = evaluate_objective(kind, h, w, digital, ici, psi);
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

}  // namespace thzbeam
