#include "thzbeam/ici.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace thzbeam {

namespace {
constexpr double kPi = std::numbers::pi;

cxd cfo_coefficient(int offset, int k, double epsilon) {
  const double u = offset + epsilon;
  const double denom_arg = kPi * u / k;
  double magnitude;
  if (std::abs(std::sin(denom_arg)) < 1e-12) {
    // removable singularity at u = m*K; the ratio limits to +/-1
    const long m = std::lround(u / k);
    magnitude = ((k - 1) * m) % 2 == 0 ? 1.0 : -1.0;
  } else {
    magnitude = std::sin(kPi * u) / (k * std::sin(denom_arg));
  }
  return magnitude * std::polar(1.0, kPi * (1.0 - 1.0 / k) * u);
}

}  // namespace

IciProfile::IciProfile(IciMode mode, int k, double parameter)
    : mode_(mode), k_(k), parameter_(parameter) {
  if (k < 1) throw std::invalid_argument("ici profile requires K >= 1");
  coeff_.assign(2 * k - 1, cxd{0.0, 0.0});
  weights_.assign(2 * k - 1, 0.0);
}

IciProfile IciProfile::none(int num_subcarriers) {
  IciProfile p(IciMode::None, num_subcarriers, 0.0);
  p.coeff_[num_subcarriers - 1] = 1.0;
  p.weights_[num_subcarriers - 1] = 1.0;
  return p;
}

IciProfile IciProfile::cfo(int num_subcarriers, double epsilon) {
  IciProfile p(IciMode::Cfo, num_subcarriers, epsilon);
  for (int i = 1 - num_subcarriers; i <= num_subcarriers - 1; ++i) {
    const cxd s = cfo_coefficient(i, num_subcarriers, epsilon);
    p.coeff_[i + num_subcarriers - 1] = s;
    p.weights_[i + num_subcarriers - 1] = std::norm(s);
  }
  return p;
}

IciProfile IciProfile::scalar(int num_subcarriers, double leakage) {
  IciProfile p(IciMode::Scalar, num_subcarriers, leakage);
  for (int i = 1 - num_subcarriers; i <= num_subcarriers - 1; ++i) {
    const double mag = (i == 0) ? 1.0 : leakage;
    p.coeff_[i + num_subcarriers - 1] = mag;
    p.weights_[i + num_subcarriers - 1] = mag * mag;
  }
  return p;
}

void IciProfile::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open ici dump path: " + path);
  out << "i,re,im,abs\n";
  out.precision(17);
  for (int i = 1 - k_; i <= k_ - 1; ++i) {
    const cxd s = at(i);
    out << i << ',' << s.real() << ',' << s.imag() << ',' << std::abs(s)
        << '\n';
  }
  if (!out) throw std::runtime_error("failed writing ici dump: " + path);
}

}  // namespace thzbeam
