#pragma once

// Channel momenta K+- on a chosen sheet of the Riemann surface and the
// open/closed classification of channels at real lambda.

#include <vector>

#include "jostline/medium.hpp"
#include "jostline/types.hpp"

namespace jostline {

// A point of the spectral surface: lambda plus a per-channel, per-side sheet
// selector (+1 principal branch, -1 the other sheet).
struct SpectralPoint {
  Complex lambda{0, 0};
  std::vector<int> sheet_left;
  std::vector<int> sheet_right;

  // Real lambda, every channel on the principal sheet.
  static SpectralPoint physical(Real lambda_value, int channels);

  bool principal() const;
};

// Diagonal channel momenta (K+-)_s = sheet_s * sqrt(Lambda_s - lambda),
// principal branch of the square root.
struct ChannelMomenta {
  CVector K_left;
  CVector K_right;
};

ChannelMomenta channel_momenta(const EndBases& bases,
                               const SpectralPoint& point);

// Throws AtThreshold when a near-real lambda sits within threshold_tol of a
// channel threshold on either side (the channel momentum vanishes there).
void require_off_thresholds(const EndBases& bases, const SpectralPoint& point,
                            const Tolerances& tol = {});

// Open/closed split at real lambda on the principal sheet. A channel is open
// when lambda < Lambda_s (momentum real positive) and closed when
// lambda > Lambda_s (momentum i*kappa, kappa > 0). Index lists keep the
// ascending-threshold order; perm_* lists open indices first, then closed.
struct ChannelClassification {
  Real lambda = 0;
  std::vector<int> open_left, closed_left;
  std::vector<int> open_right, closed_right;
  int l_o = 0, l_c = 0, r_o = 0, r_c = 0;
  Vector kappa_open_left, kappa_closed_left;
  Vector kappa_open_right, kappa_closed_right;
  std::vector<int> perm_left, perm_right;

  bool all_open() const { return l_c == 0 && r_c == 0; }
  bool all_closed() const { return l_o == 0 && r_o == 0; }
};

// Throws AtThreshold when |lambda - Lambda_s| <= threshold_tol for any
// channel on either side.
ChannelClassification classify_channels(const EndBases& bases, Real lambda,
                                        const Tolerances& tol = {});

}  // namespace jostline
