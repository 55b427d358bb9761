#pragma once

// Shortwave (WKB) approximations to the Jost solutions and the large-|lambda|
// behaviour of the scattering matrix.
//
// For |lambda| far from every channel curve Lambda_s(z) the rescaled families
// admit the semiclassical form
//
//   (F~+-)_s(z) = f_s(z) / K_s(z)^{1/2} * exp(+-i S(z)),
//
// with local momenta K_s(z) = sqrt(Lambda_s(z) - lambda) from the node-wise
// eigenproblem V f = g f Lambda, f^T g f = 1, and phases
//
//   S+_s(z) = (K+)_s L - int_z^L K_s,   S-_s(z) = int_{-L}^z K_s - (K-)_s L.
//
// The dressed transition matrices approach their diagonal phase prediction
// like |lambda|^{-1/2}.  The pointwise field comparison is stricter: it
// decays faster on a fixed eigenframe (the residual is next eikonal order)
// but saturates near the mixing angle once the frame rotation outruns the
// momentum splitting (Lambda_1 - Lambda_2)/(2 sqrt|lambda|).  Turning points
// (a sign change of Lambda_s(z) - lambda) are rejected rather than connected.

#include <array>
#include <vector>

#include "jostline/jost.hpp"
#include "jostline/medium.hpp"
#include "jostline/spectral.hpp"
#include "jostline/types.hpp"

namespace jostline {

// Semiclassical field on the interior node grid. The u/p samples approximate
// the rescaled families F~+- = F+- K^{-1/2} (same family indexing as
// JostField), not the bare ones.
struct WkbField {
  SpectralPoint point;
  ChannelMomenta momenta;

  std::vector<Real> z;
  std::vector<Matrix> frame;      // g-orthonormal columns, sign-matched in z
  std::vector<Vector> lambdas;    // local eigenvalues, ascending
  std::vector<CVector> k;         // local momenta sqrt(Lambda_s(z) - lambda)
  std::vector<CVector> s_plus;    // phases toward the right end
  std::vector<CVector> s_minus;   // phases from the left end

  std::array<std::vector<CMatrix>, 4> u;
  std::array<std::vector<CMatrix>, 4> p;

  int channels() const { return static_cast<int>(frame.empty() ? 0 : frame.front().rows()); }
  const CMatrix& u_at(JostFamily f, std::size_t i) const {
    return u[static_cast<int>(f)][i];
  }
  const CMatrix& p_at(JostFamily f, std::size_t i) const {
    return p[static_cast<int>(f)][i];
  }
};

// Build the semiclassical field at real lambda. Requires lambda to stay
// strictly on one side of each channel curve Lambda_s(z) over the whole line
// (tails included); otherwise TurningPoint.
WkbField wkb_jost(const MediumProfile& profile, const EndBases& bases,
                  Real lambda, const GridSpec& grid = {},
                  const Tolerances& tol = {});

// Compare the semiclassical field against the integrated one on the shared
// interior grid. Records: one relative deviation per family plus the
// transport-equation conservation defect |K_s a_s^T g a_s - 1| with
// a_s = f_s / K_s^{1/2}.
std::vector<ResidualRecord> wkb_deviation(const MediumProfile& profile,
                                          const EndBases& bases, Real lambda,
                                          const GridSpec& grid = {},
                                          const Tolerances& tol = {});

// One rung of the large-|lambda| ladder: how far det S~ is from 1 and how far
// the dressed transition block K-^{1/2} Phi+ K+^{-1/2} is from its predicted
// diagonal phase diag(exp(i(S+ - S-))).
struct AsymptoteRecord {
  Real lambda = 0;
  Real det_gap = 0;   // |det S~ - 1|
  Real phi_dev = 0;   // max-norm deviation from the WKB diagonal
};

// Evaluate the ladder at the given real spectral points, each below every
// threshold (all channels open, no turning points).
std::vector<AsymptoteRecord> dets_asymptote(const MediumProfile& profile,
                                            const EndBases& bases,
                                            const std::vector<Real>& lambdas,
                                            const GridSpec& grid = {},
                                            const Tolerances& tol = {});

}  // namespace jostline
