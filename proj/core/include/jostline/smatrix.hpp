#pragma once

// Transmission/reflection matrices, the 2N x 2N scattering matrix, its
// flux-normalized (tilde) dressing, the open-open projector L, and the full
// set of symmetry, unitarity, and closed<->open identity checks.

#include <vector>

#include "jostline/spectral.hpp"
#include "jostline/transition.hpp"
#include "jostline/types.hpp"

namespace jostline {

// Scattering data at one real lambda. Conventions:
//   t1 (right x left)  transmission of a wave incident from the left
//   r1 (left x left)   reflection of the same wave
//   t2 (left x right)  transmission of a wave incident from the right
//   r2 (right x right) reflection of the same wave
//   S = [[t1, r2], [r1, t2]],   S~ built from the flux-dressed blocks.
struct ScatteringSet {
  SpectralPoint point;
  ChannelClassification cls;
  ChannelMomenta momenta;

  CMatrix t1, r1, t2, r2;
  CMatrix t1_tilde, r1_tilde, t2_tilde, r2_tilde;

  // Projector onto the subspace of open left (or, when sides_swapped, open
  // right) channels actually reached by transmission: Hermitian, idempotent,
  // of rank min(l_o, r_o); the identity whenever the open counts match.
  CMatrix proj;
  int proj_rank = 0;
  // True when l_o < r_o; the open-subspace unitarity relations are then
  // checked on the space-reflected problem (t1 <-> t2, r1 <-> r2, K- <-> K+)
  // whose open left count dominates.
  bool sides_swapped = false;

  CMatrix S() const;
  CMatrix S_tilde() const;
  int channels() const { return static_cast<int>(t1.rows()); }
};

// Assemble the scattering set from the transition matrices:
//   t1 = Phi+^-1              r1 = Psi+ Phi+^-1
//   t2 = Phi- - Psi+ Phi+^-1 Psi-    r2 = -Phi+^-1 Psi-
// with the dressed blocks K^{1/2}-conjugated per side. Throws
// SingularPhiPlus when the smallest singular value of Phi+ is below
// sing_scale times the largest (lambda at or near a bound state).
ScatteringSet scattering_matrices(const TransitionSet& ts,
                                  const ChannelClassification& cls,
                                  const Tolerances& tol = {});

// Momentum-weighted transpose symmetries:
//   K- t2 = t1^T K+,  K- r1 = r1^T K-,  K+ r2 = r2^T K+,
// their 2N x 2N combination
//   [[0, K-], [K+, 0]] S = S^T [[0, K+], [K- , 0]],
// and the twelve open/closed block forms (closed-channel momenta enter as
// i kappa, producing the mixed-block i factors).
std::vector<ResidualRecord> symmetry_residuals(const ScatteringSet& ss);

// Unitarity family:
//   unitarity_full_raw       ||S~^dag S~ - I||_max, unnormalized (this is
//                            O(1) whenever a channel is closed)
//   unitarity_flux           S^dag diag(K+,K-) S = diag(K-,K+), emitted only
//                            at all-open lambda where it is a theorem
//   open unitarity relations on the open-open blocks with the projector,
//   plus the left-incidence flux identity and the conjugate-pair identity.
// Open-block records are omitted when either side has no open channel.
std::vector<ResidualRecord> unitarity_residuals(const ScatteringSet& ss);

// The twelve relations expressing closed-channel blocks of t1, r1 (and the
// 1<->2 partners) through complex conjugates of open-row/column blocks.
// Throws DegenerateSplit when lambda is not mixed (no closed channel pair to
// relate, or no open ones).
std::vector<ResidualRecord> closed_open_residuals(const ScatteringSet& ss);

// The barred-transpose flux identity S_bar^T diag(K+,K-) S = diag(K-,K+),
// where S_bar is assembled from the swapped transition matrices
// (Phi_bar(+-) = Phi(-+), Psi_bar(+-) = Psi(-+)). Unlike the adjoint form it
// holds at every regular lambda, closed channels included.
Real barred_flux_residual(const ScatteringSet& ss, const TransitionSet& ts);

// det S = det Phi- / det Phi+ = det S~: max normalized deviation among the
// three pairwise comparisons.
Real det_consistency(const ScatteringSet& ss, const TransitionSet& ts);

}  // namespace jostline
