#include "thzbeam/channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace thzbeam {

namespace {
constexpr double kPi = std::numbers::pi;

bool is_perfect_square(int n) {
  if (n < 1) return false;
  const int r = static_cast<int>(std::lround(std::sqrt(double(n))));
  return r * r == n;
}
}  // namespace

void ChannelConfig::validate() const {
  if (!(carrier_frequency_hz > 0.0))
    throw std::invalid_argument("carrier frequency must be positive");
  if (!(link_distance_m > 0.0))
    throw std::invalid_argument("link distance must be positive");
  if (absorption_coeff_per_m < 0.0)
    throw std::invalid_argument("absorption coefficient must be nonnegative");
  if (num_clusters < 1 || rays_per_cluster < 1)
    throw std::invalid_argument("cluster/ray counts must be >= 1");
  if (num_users < 1 || num_subcarriers < 1)
    throw std::invalid_argument("user/subcarrier counts must be >= 1");
  if (!is_perfect_square(tx_antennas))
    throw std::invalid_argument("tx_antennas must be a perfect square");
  if (per_subcarrier_frequency && !(subcarrier_spacing_hz > 0.0))
    throw std::invalid_argument(
        "per-subcarrier mode requires positive subcarrier spacing");
  gmm.validate();
}

double path_gain(double frequency_hz, double distance_m,
                 double absorption_per_m) {
  if (!(frequency_hz > 0.0) || !(distance_m > 0.0))
    throw std::domain_error("path_gain requires positive frequency and distance");
  if (absorption_per_m < 0.0)
    throw std::domain_error("path_gain requires nonnegative absorption");
  const double spreading =
      kSpeedOfLight / (4.0 * kPi * frequency_hz * distance_m);
  return spreading * spreading * std::exp(-absorption_per_m * distance_m);
}

std::vector<cxd> array_response(double azimuth, double elevation,
                                int tx_antennas,
                                double spacing_over_wavelength) {
  if (!is_perfect_square(tx_antennas))
    throw std::invalid_argument("array_response requires a square antenna count");
  const int side = static_cast<int>(std::lround(std::sqrt(double(tx_antennas))));
  const double amp = 1.0 / std::sqrt(double(tx_antennas));
  const double base = 2.0 * kPi * spacing_over_wavelength;
  const double az_term = std::sin(azimuth) * std::sin(elevation);
  const double el_term = std::cos(elevation);
  std::vector<cxd> a(tx_antennas);
  for (int p = 0; p < side; ++p)
    for (int q = 0; q < side; ++q) {
      const double phase = base * (p * az_term + q * el_term);
      a[p * side + q] = std::polar(amp, phase);
    }
  return a;
}

ClusterAngles sample_angles(const ChannelConfig& cfg, RandomDraws& rng) {
  ClusterAngles out;
  const int nc = cfg.num_clusters;
  const int nray = cfg.rays_per_cluster;
  out.cluster_azimuth.resize(nc);
  out.cluster_elevation.resize(nc);
  out.ray_azimuth.resize(static_cast<std::size_t>(nc) * nray);
  out.ray_elevation.resize(static_cast<std::size_t>(nc) * nray);
  for (int i = 0; i < nc; ++i) {
    // uniform on (-pi, pi]; half-open [lo, hi) mirrored to (lo, hi]
    out.cluster_azimuth[i] = kPi - rng.uniform(0.0, 2.0 * kPi);
    out.cluster_elevation[i] = rng.uniform(-kPi / 2.0, kPi / 2.0);
    for (int j = 0; j < nray; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * nray + j;
      out.ray_azimuth[idx] = out.cluster_azimuth[i] + sample_gmm(cfg.gmm, rng);
      out.ray_elevation[idx] =
          out.cluster_elevation[i] + sample_gmm(cfg.gmm, rng);
    }
  }
  return out;
}

ChannelRealization generate_channel(const ChannelConfig& cfg,
                                    RngStream stream) {
  cfg.validate();
  RandomDraws rng(stream);
  const int users = cfg.num_users;
  const int k_count = cfg.num_subcarriers;
  const int nc = cfg.num_clusters;
  const int nray = cfg.rays_per_cluster;
  const int nt = cfg.tx_antennas;
  // dBi gains enter the amplitude-domain sum as sqrt(linear) each
  const double gain_amp = std::pow(10.0, cfg.tx_gain_dbi / 20.0) *
                          std::pow(10.0, cfg.rx_gain_dbi / 20.0);
  const double scale = std::sqrt(double(nt) / (double(nc) * double(nray)));

  ChannelRealization h;
  h.config = cfg;
  h.stream = stream;
  h.slices.assign(k_count, ComplexMatrix(users, nt));

  std::vector<double> subcarrier_freq(k_count, cfg.carrier_frequency_hz);
  if (cfg.per_subcarrier_frequency) {
    const double mid = (k_count + 1) / 2.0;
    for (int k = 0; k < k_count; ++k)
      subcarrier_freq[k] =
          cfg.carrier_frequency_hz + ((k + 1) - mid) * cfg.subcarrier_spacing_hz;
  }

  std::vector<cxd> accum(nt);
  for (int q = 0; q < users; ++q) {
    const ClusterAngles angles = sample_angles(cfg, rng);
    const std::size_t paths = angles.ray_azimuth.size();
    std::vector<double> phases(paths);
    for (std::size_t p = 0; p < paths; ++p)
      phases[p] = rng.uniform(0.0, 2.0 * kPi);
    std::vector<std::vector<cxd>> steering(paths);
    for (std::size_t p = 0; p < paths; ++p)
      steering[p] = array_response(angles.ray_azimuth[p],
                                   angles.ray_elevation[p], nt,
                                   cfg.spacing_over_wavelength);
    for (int k = 0; k < k_count; ++k) {
      if (k > 0 && !cfg.per_subcarrier_frequency) {
        for (int n = 0; n < nt; ++n) h.slices[k](q, n) = h.slices[0](q, n);
        continue;
      }
      const double alpha_mag = std::sqrt(path_gain(
          subcarrier_freq[k], cfg.link_distance_m, cfg.absorption_coeff_per_m));
      std::fill(accum.begin(), accum.end(), cxd{0.0, 0.0});
      for (std::size_t p = 0; p < paths; ++p) {
        const cxd alpha = std::polar(alpha_mag, phases[p]);
        simd::active_kernels().axpy(alpha, steering[p].data(), accum.data(), nt);
      }
      for (int n = 0; n < nt; ++n)
        h.slices[k](q, n) = scale * gain_amp * accum[n];
    }
  }
  return h;
}

void write_channel_csv(const ChannelRealization& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open channel dump path: " + path);
  out << "# thzbeam channel dump v1\n";
  out << "user,subcarrier,antenna,re,im\n";
  out.precision(17);
  for (int q = 0; q < h.num_users(); ++q)
    for (int k = 0; k < h.num_subcarriers(); ++k)
      for (std::size_t n = 0; n < h.at(k).cols(); ++n) {
        const cxd v = h.at(k)(q, n);
        out << q << ',' << k << ',' << n << ',' << v.real() << ',' << v.imag()
            << '\n';
      }
  if (!out) throw std::runtime_error("failed writing channel dump: " + path);
}

}  // namespace thzbeam
