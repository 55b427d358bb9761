#pragma once

// Bound states as real zeros of det Phi+: determinant scan over a lambda
// window, root refinement, null-vector extraction, the bound wavefunction,
// and the structural checks on all of it.

#include <string>
#include <vector>

#include "jostline/jost.hpp"
#include "jostline/medium.hpp"
#include "jostline/spectral.hpp"
#include "jostline/types.hpp"

namespace jostline {

// D(lambda) = det w[F left,-, F right,+] = det(2i K- Phi+). Using the
// Wronskian instead of det Phi+ itself drops the K- row factors, making D
// real whenever every channel is closed (real Jost data), which is what the
// sign-change bracketing relies on. Only the two families entering the
// Wronskian are propagated, each over half the domain.
Complex bound_determinant(const MediumProfile& profile, const EndBases& bases,
                          Real lambda, Real h);

struct ScanPoint {
  Real lambda = 0;
  Complex d;
};

// One bound state. v is the right null vector of Phi+ (right-channel
// space), w the left one (left-channel space); both unit with the first
// nonzero entry made real positive. pairing_scale is the constant c in
// K- Psi+ v = c w that the normalization leaves free.
struct BoundState {
  Real lambda_b = 0;
  CVector v, w;
  CVector v2, w2;  // filled only when `multiple`
  Real det_residual = 0;       // |det Phi+|
  Real null_residual_v = 0;    // ||Phi+ v||
  Real null_residual_w = 0;    // ||w^T Phi+||
  Real open_norm_v = 0;        // ||v restricted to open right channels||
  Real open_norm_w = 0;        // ||w restricted to open left channels||
  Complex pairing_scale;       // c above
  Real pairing_residual = 0;   // ||K- Psi+ v - c w||
  Real expansion_residual = 0; // F right,+ v vs F left,- K-^-1 c w, on grid
  std::vector<Real> z;
  std::vector<CVector> wave_u, wave_p;  // samples of F right,+ v
  Real decay_left = 0, decay_right = 0;         // fitted tail exponents
  Real kappa_left = 0, kappa_right = 0;         // predicted decay rates
  bool near_threshold = false;
  bool multiple = false;  // rank of Phi+ dropped by more than one
};

struct BoundScan {
  std::vector<ScanPoint> trace;
  std::vector<BoundState> states;
  std::vector<std::string> notices;
};

// Scan [lambda_lo, lambda_hi]: the window is partitioned at the channel
// thresholds; all-open pieces are skipped outright (no bound states there),
// all-closed pieces are bracketed by sign changes of the real-valued D and
// bisected, mixed pieces are searched for minima of |D| by golden section
// and accepted only when the refined |D| falls below det_accept_tol and the
// null residuals pass. n_per_unit <= 0 selects the default scan density
// (Tolerances::n_scan nodes per unit lambda). Suspected double roots inside
// one scan cell are reported in `notices`, never fatal.
BoundScan bound_state_scan(const MediumProfile& profile, const EndBases& bases,
                           Real lambda_lo, Real lambda_hi, int n_per_unit = 0,
                           const GridSpec& grid = {},
                           const Tolerances& tol = {});

// Assemble the BoundState record at an already-located root.
BoundState make_bound_state(const MediumProfile& profile,
                            const EndBases& bases, Real lambda_b,
                            const GridSpec& grid = {},
                            const Tolerances& tol = {});

// Recompute every BoundState invariant from scratch plus the pointwise ODE
// residual of the wavefunction by five-point finite differences (windows
// touching a layer boundary or sample node are skipped). Names:
//   det, null_v, null_w, open_v, open_w, pairing, expansion,
//   ode_u, ode_p, decay_left_gap, decay_right_gap
// where the decay gaps are relative deviations of the fitted exponents from
// the predicted minimal closed-channel rates.
std::vector<ResidualRecord> verify_bound_state(const BoundState& bs,
                                               const MediumProfile& profile,
                                               const EndBases& bases,
                                               const GridSpec& grid = {},
                                               const Tolerances& tol = {});

}  // namespace jostline
