#pragma once

// Transition matrices Phi+-, Psi+- connecting the right Jost families to the
// left ones,
//   F right,+ = F left,+ Phi+ + F left,- Psi+
//   F right,- = F left,+ Psi- + F left,- Phi-,
// extracted from Wronskians, plus the bilinear, conjugation, and monodromy
// identity checks on them.

#include <vector>

#include "jostline/jost.hpp"
#include "jostline/medium.hpp"
#include "jostline/spectral.hpp"
#include "jostline/types.hpp"

namespace jostline {

// The four N x N connection coefficients at a spectral point. Rows index
// left channels, columns index right channels.
struct TransitionSet {
  SpectralPoint point;
  ChannelMomenta momenta;
  CMatrix phi_plus;
  CMatrix phi_minus;
  CMatrix psi_plus;
  CMatrix psi_minus;
  // Max-norm defect of the two expansions above over the whole grid,
  // normalized by (1 + max |F right|).
  Real expansion_residual = 0;

  int channels() const { return static_cast<int>(phi_plus.rows()); }
};

// Read the transition matrices off the Wronskians at z = 0:
//   2iK- Phi+ = w[F left,-, F right,+]   -2iK- Psi+ = w[F left,+, F right,+]
//  -2iK- Phi- = w[F left,+, F right,-]    2iK- Psi- = w[F left,-, F right,-]
TransitionSet transition_matrices(const JostField& field);

// The six bilinear identities tying Phi/Psi to the channel momenta:
//   Phi+^T K- Psi+ - Psi+^T K- Phi+ = 0
//   Phi+^T K- Phi- - Psi+^T K- Psi- = K+
//   Phi-^T K- Psi- - Psi-^T K- Phi- = 0
//   Phi+ K+^-1 Psi-^T - Psi- K+^-1 Phi+^T = 0
//   Phi+ K+^-1 Phi-^T - Psi- K+^-1 Psi+^T = K-^-1
//   Phi- K+^-1 Psi+^T - Psi+ K+^-1 Phi-^T = 0
// Residuals are max-norm, normalized by (1 + the largest term magnitude).
std::vector<ResidualRecord> bilinear_residuals(const TransitionSet& ts);

// Reality check at real lambda on the principal sheet: complex conjugation
// maps each entry of each transition matrix to an entry of another one, with
// the +- label flipping on a side exactly when that side's channel is open.
// Returns the max normalized mismatch over all entries of all four matrices.
Real conjugation_residual(const TransitionSet& ts,
                          const ChannelClassification& cls);

// Sheet-flip check: recompute the transition matrices with the sheet of one
// channel negated and compare against the predicted swap (row s of Phi+- and
// Psi+- trade places for a left flip, column s for a right flip; all other
// entries are unchanged). Returns the max normalized mismatch.
Real monodromy_residual(const MediumProfile& profile, const EndBases& bases,
                        const SpectralPoint& point, AsymptoticBasis::Side side,
                        int channel, const GridSpec& grid = {},
                        const Tolerances& tol = {});

}  // namespace jostline
