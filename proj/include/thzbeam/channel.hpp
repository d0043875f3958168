#pragma once

#include <string>
#include <vector>

#include "thzbeam/mathcore.hpp"

namespace thzbeam {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct ChannelConfig {
  double carrier_frequency_hz = 0.35e12;
  double link_distance_m = 5.0;
  double absorption_coeff_per_m = 0.0033;
  int num_clusters = 5;       // not given by the source scenario tables
  int rays_per_cluster = 10;
  int tx_antennas = 64;       // perfect square (square planar array)
  double spacing_over_wavelength = 0.5;
  double tx_gain_dbi = 20.0;
  double rx_gain_dbi = 20.0;
  int num_users = 1;
  int num_subcarriers = 64;
  GmmParams gmm;
  // off: one angle/gain draw per user shared by every subcarrier (flat);
  // on: path gain re-evaluated at f + (k - (K+1)/2) * delta_f
  bool per_subcarrier_frequency = false;
  double subcarrier_spacing_hz = 0.0;

  void validate() const;
};

struct ClusterAngles {
  std::vector<double> cluster_azimuth;     // size N_c, uniform (-pi, pi]
  std::vector<double> cluster_elevation;   // size N_c, uniform [-pi/2, pi/2]
  // flattened (cluster, ray) totals, ray-major within cluster
  std::vector<double> ray_azimuth;
  std::vector<double> ray_elevation;
};

struct ChannelRealization {
  // slice k is the U x N_t matrix H[k]
  std::vector<ComplexMatrix> slices;
  ChannelConfig config;
  RngStream stream;

  int num_users() const { return config.num_users; }
  int num_subcarriers() const { return static_cast<int>(slices.size()); }
  const ComplexMatrix& at(int k) const { return slices[k]; }
  ComplexMatrix& at(int k) { return slices[k]; }
};

// (c / (4 pi f d))^2 * exp(-k_abs d), linear power gain
double path_gain(double frequency_hz, double distance_m,
                 double absorption_per_m);

// Square planar array steering vector; row-major over grid indices (p, q)
// with p the horizontal index. Unit Euclidean norm.
std::vector<cxd> array_response(double azimuth, double elevation,
                                int tx_antennas, double spacing_over_wavelength);

ClusterAngles sample_angles(const ChannelConfig& cfg, RandomDraws& rng);

ChannelRealization generate_channel(const ChannelConfig& cfg, RngStream stream);

// versioned CSV dump: user,subcarrier,antenna,re,im
void write_channel_csv(const ChannelRealization& h, const std::string& path);

}  // namespace thzbeam
