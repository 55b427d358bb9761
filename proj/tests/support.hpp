#pragma once

// Shared fixtures for the test suites: deterministic profile builders, a
// seeded random-profile generator with controlled threshold layout, spectral
// point pickers for the three channel regimes, and an independent
// transcendental root finder for the square well.

#include <jostline/bound.hpp>
#include <jostline/jost.hpp>
#include <jostline/medium.hpp>
#include <jostline/smatrix.hpp>
#include <jostline/spectral.hpp>
#include <jostline/transition.hpp>
#include <jostline/types.hpp>

#include <random>
#include <vector>

namespace jostline::testing {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Deterministic single-channel media on [-half, half].

// Constant medium everywhere: tails and one interior layer all share v.
MediumProfile uniform_profile(Real v = 1.0, Real half = 1.0);

// Tails at v_tail, one interior layer at v_layer.
MediumProfile scalar_layer(Real v_tail, Real v_layer, Real half = 1.0);

inline MediumProfile scalar_barrier(Real half = 1.0) {
  return scalar_layer(1.0, 0.0, half);
}

// Potential step: v_left for z < 0, v_right for z > 0.
MediumProfile scalar_step(Real v_left, Real v_right, Real half = 1.0);

// Binding square well: tails at v_tail, interior at v_tail + v0.  In this
// sign convention channels close (tails decay) above their threshold, so a
// layer raised by v0 binds states at lambda in (v_tail, v_tail + v0).
MediumProfile square_well(Real v0, Real v_tail, Real half = 1.0);

// ---------------------------------------------------------------------------
// Two-channel media.

// Two uncoupled square wells with distinct tail thresholds:
// channel 0 has threshold t0 and depth v0a, channel 1 threshold t1, depth v0b.
MediumProfile decoupled_two_channel_wells(Real v0a, Real v0b, Real t0 = 0.0,
                                          Real t1 = 0.5, Real half = 1.0);

// Constant-coefficient two-channel medium with coupled tails, two interior
// layers, and a nontrivial metric.  Exercises every identity in one point.
MediumProfile mixed_two_channel(Real half = 1.0);

// Smooth sampled two-channel profile whose channel frame rotates with z.
// The tails are diag(0.3, 1.1), the eigenvalue sheets depend on z, and the
// mixing angle vanishes to second order at the edges.  Used for the
// short-wave determinant checks.
MediumProfile smooth_rotating_profile(int nodes = 401, Real half = 1.0);

// Smooth sampled two-channel profile with the same eigenvalue curves but a
// constant eigenframe (one fixed rotation, so V(z) is coupled in the lab
// basis at every z).  Contrast fixture for the semiclassical field checks:
// with the frame pinned the channels decouple in the eigenbasis and the
// pointwise deviation falls off at the broad-profile rate |lambda|^{-3/2},
// faster than the inverse-root rate of the dressed transition matrices,
// whereas a rotating frame saturates the pointwise deviation once the
// momentum splitting (Lambda_1 - Lambda_2)/(2 sqrt|lambda|) drops below the
// rotation rate.
MediumProfile smooth_graded_profile(int nodes = 401, Real half = 1.0);

// ---------------------------------------------------------------------------
// Random piecewise-constant profiles with a designed threshold ladder.
//
// Both tails share a base ladder of n ascending thresholds with gaps drawn
// from [0.6, 1.4]; each side then jitters every rung by at most 0.12 so the
// two sides differ but the k-th interior gap (max of the two k-th rungs,
// min of the two (k+1)-th) stays at least 0.36 wide.  Metrics are random SPD
// matrices with eigenvalues in a moderate band, so the generalized
// eigenproblem is always well conditioned.

struct RandomProfileOptions {
  int channels = 2;
  int max_layers = 6;
  Real half = 1.0;
};

MediumProfile random_profile(Rng& rng, const RandomProfileOptions& opt);

// Convenience: channels drawn uniformly from [lo, hi].
MediumProfile random_profile(Rng& rng, int ch_lo, int ch_hi);

// ---------------------------------------------------------------------------
// Spectral point pickers.  All of them stay away from thresholds by a
// fixed margin so classification never throws.

// Below every threshold of both tails: all channels open.
Real pick_all_open(Rng& rng, const MediumProfile& profile);

// Above every threshold: all channels closed.
Real pick_all_closed(Rng& rng, const MediumProfile& profile);

// Inside the interior gap between rung `gap` and rung `gap + 1` of the
// combined ladder (0-based).  Requires the profile to come from
// random_profile, whose design keeps these gaps open.  With n channels,
// gap g yields n - 1 - g open channels per side.
Real pick_in_gap(Rng& rng, const MediumProfile& profile, int gap);

// Any interior gap, chosen uniformly.
Real pick_mixed(Rng& rng, const MediumProfile& profile);

// Number of interior gaps that are wide enough to place a point in; 0 for
// single-channel profiles or degenerate ladders.
int usable_gaps(const MediumProfile& profile);

// ---------------------------------------------------------------------------
// Independent square-well spectrum.
//
// For the scalar well of half-width `half` with tails at v_tail and interior
// at v_tail + v0, the offsets e = lambda - v_tail of the bound levels satisfy
// the textbook transcendental conditions
//   even:  q sin(q h) - k cos(q h) = 0
//   odd:   q cos(q h) + k sin(q h) = 0
// with q = sqrt(v0 - e) the interior wavenumber and k = sqrt(e) the tail
// decay rate.  Returned as absolute spectral positions, ascending.
std::vector<Real> square_well_levels(Real v0, Real v_tail, Real half = 1.0);

// ---------------------------------------------------------------------------
// Misc.

// The full solve chain at one real spectral point.
struct Pipeline {
  EndBases bases;
  ChannelClassification cls;
  JostField field;
  TransitionSet ts;
  ScatteringSet ss;
};

Pipeline run_pipeline(const MediumProfile& profile, Real lambda,
                      const GridSpec& grid = {}, const Tolerances& tol = {});

// Max over grid nodes of the normalized defect of the same-side Wronskian
// values: w[F+, F+] = w[F-, F-] = 0 and w[F+, F-] = -2iK per side.
Real same_side_wronskian_residual(const JostField& field);

Real max_record(const std::vector<ResidualRecord>& records);
Real record_named(const std::vector<ResidualRecord>& records,
                  const std::string& name);

}  // namespace jostline::testing
