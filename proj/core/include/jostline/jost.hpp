#pragma once

// The four Jost solution families of the matrix equation
//   (d/dz g(z) d/dz + V(z) - lambda g(z)) u = 0,
// integrated across [-Lz, Lz] from exact plane-wave data in the constant
// tails, plus Wronskians and the drift diagnostic.

#include <array>
#include <cstddef>
#include <vector>

#include "jostline/medium.hpp"
#include "jostline/spectral.hpp"
#include "jostline/types.hpp"

namespace jostline {

// F(right|left)(Plus|Minus): the family defined by its tail behavior
//   F right,+- -> f+ exp(+-i K+ z) as z -> +inf   (seeded at z = +Lz)
//   F left,+-  -> f- exp(+-i K- z) as z -> -inf   (seeded at z = -Lz)
enum class JostFamily {
  RightPlus = 0,
  RightMinus = 1,
  LeftPlus = 2,
  LeftMinus = 3
};

const char* family_name(JostFamily f);

// Grid controls. h_max <= 0 selects the automatic step
// min(1e-3 * 2Lz, 0.05 / maxK); pad < 0 selects Lz / 2. An explicit h_max is
// used verbatim.
struct GridSpec {
  Real h_max = 0;
  Real pad = -1;
};

// Sampled Jost solutions: one (u, p) pair per family per grid node, with
// p = g(z) du/dz. The grid spans [-Lz - pad, Lz + pad]; tail samples are
// analytic plane waves, interior samples come from RK4.
struct JostField {
  SpectralPoint point;
  ChannelMomenta momenta;
  EndBases bases;
  std::vector<Real> z;
  std::size_t i_left = 0;   // node at -Lz
  std::size_t i_right = 0;  // node at +Lz
  std::size_t i_zero = 0;   // node at z = 0
  std::array<std::vector<CMatrix>, 4> u;
  std::array<std::vector<CMatrix>, 4> p;

  int channels() const { return static_cast<int>(momenta.K_left.size()); }
  const CMatrix& u_at(JostFamily f, std::size_t i) const {
    return u[static_cast<std::size_t>(f)][i];
  }
  const CMatrix& p_at(JostFamily f, std::size_t i) const {
    return p[static_cast<std::size_t>(f)][i];
  }
};

// Integrate all four families. Throws AtThreshold for (near-)real lambda at
// a channel threshold and IntegratorStep when the step plan degenerates.
JostField integrate_jost(const MediumProfile& profile, const EndBases& bases,
                         const SpectralPoint& point, const GridSpec& grid = {},
                         const Tolerances& tol = {});

// w[phi, psi] = u1^T p2 - p1^T u2 (bilinear, w[phi,psi] = -w[psi,phi]^T).
CMatrix wronskian(const CMatrix& u1, const CMatrix& p1, const CMatrix& u2,
                  const CMatrix& p2);

CMatrix wronskian_at(const JostField& field, JostFamily a, JostFamily b,
                     std::size_t node);

// Max over grid nodes and the four cross pairings (left-,right+),
// (left+,right+), (left+,right-), (left-,right-) of
// ||w(z) - w(0)||_max / (1 + ||w(0)||_max).
Real wronskian_drift(const JostField& field);

// Step actually used for the given profile/lambda/grid combination.
Real resolve_step(const MediumProfile& profile, Complex lambda,
                  const GridSpec& grid = {}, const Tolerances& tol = {});

// Interior node set (ascending, [-Lz, Lz], aligned to layer boundaries,
// sampled-layer nodes, and z = 0) for the given step.
std::vector<Real> integration_nodes(const MediumProfile& profile, Real h);

// One family's state at a single z.
struct FamilyState {
  CMatrix u;
  CMatrix p;
};

// Exact tail data for a family at its seeding end (+Lz for right families,
// -Lz for left families).
FamilyState seed_family(const MediumProfile& profile, const EndBases& bases,
                        const ChannelMomenta& momenta, JostFamily family);

// Advance a state from z_from to z_to (either direction) with RK4 steps of
// size at most h aligned to layer boundaries; both endpoints must lie in
// [-Lz, Lz]. The integration is columnwise linear in the state.
FamilyState propagate_state(const MediumProfile& profile, Complex lambda,
                            FamilyState state, Real z_from, Real z_to, Real h);

}  // namespace jostline
