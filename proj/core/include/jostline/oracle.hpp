#pragma once

// Closed-form solver for piecewise-constant media. Within each constant
// layer the solution is a sum of plane waves in the layer eigenbasis; the
// coefficient pair is carried across layer boundaries by exact junction
// matching of u and g du/dz. No ODE stepping, so the result is accurate to
// round-off and serves as the ground truth for the RK4 pipeline.

#include <vector>

#include "jostline/medium.hpp"
#include "jostline/smatrix.hpp"
#include "jostline/spectral.hpp"
#include "jostline/transition.hpp"
#include "jostline/types.hpp"

namespace jostline {

// Eigendata of one constant layer at the chosen lambda:
// V f = g f diag(lambdas), f^T g f = 1, k_s = principal sqrt(lambdas_s -
// lambda).
struct LayerEigenData {
  Matrix frame;
  Vector lambdas;
  CVector k;
};

std::vector<LayerEigenData> layer_eigendata(const MediumProfile& profile,
                                            Complex lambda);

// Transition matrices by junction propagation. Throws NotPiecewiseConstant
// for sampled layers, AtThreshold near a tail threshold, LayerResonance when
// lambda hits a layer eigenvalue (a layer plane-wave basis degenerates).
TransitionSet transfer_transition(const MediumProfile& profile,
                                  const EndBases& bases,
                                  const SpectralPoint& point,
                                  const Tolerances& tol = {});

struct OracleResult {
  TransitionSet transition;
  ScatteringSet scattering;
};

// Full scattering data at real lambda on the principal sheet.
OracleResult transfer_matrix_solve(const MediumProfile& profile,
                                   const EndBases& bases, Real lambda,
                                   const Tolerances& tol = {});

}  // namespace jostline
