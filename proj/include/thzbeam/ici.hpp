#pragma once

#include <string>
#include <vector>

#include "thzbeam/mathcore.hpp"

namespace thzbeam {

enum class IciMode { None, Cfo, Scalar };

/// Intercarrier leakage coefficients S_i over subcarrier offsets
/// i in {1-K, ..., 0, ..., K-1}.
///
/// Cfo mode evaluates the physical CFO leakage sequence; Scalar mode is the
/// experiment knob: |S_0| = 1 and a uniform leakage magnitude at every
/// nonzero offset (all offsets, not just adjacent ones). The two modes are
/// never mixed within one run.
class IciProfile {
 public:
  static IciProfile none(int num_subcarriers);
  static IciProfile cfo(int num_subcarriers, double epsilon);
  static IciProfile scalar(int num_subcarriers, double leakage);

  IciMode mode() const { return mode_; }
  int num_subcarriers() const { return k_; }
  double parameter() const { return parameter_; }

  // offset in [1-K, K-1]
  cxd at(int offset) const { return coeff_[offset + k_ - 1]; }
  // |S_offset|^2
  double weight(int offset) const { return weights_[offset + k_ - 1]; }

  void write_csv(const std::string& path) const;

 private:
  IciProfile(IciMode mode, int k, double parameter);

  IciMode mode_;
  int k_;
  double parameter_;
  std::vector<cxd> coeff_;     // size 2K-1
  std::vector<double> weights_;
};

}  // namespace thzbeam
