#pragma once

// Shared scalar/matrix aliases, the error hierarchy, and the tolerance knobs
// used across the library.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jostline {

using Real    = double;
using Complex = std::complex<Real>;
using Matrix  = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline constexpr Complex I_UNIT{0.0, 1.0};

// Base class for every domain error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Profile data violates a structural requirement (symmetry, definiteness,
// coverage, schema).
struct InvalidProfile : Error {
  using Error::Error;
};

// Two asymptotic thresholds on the same side coincide within gap_tol.
struct DegenerateThresholds : Error {
  using Error::Error;
};

// lambda sits within threshold_tol of a channel threshold; the channel
// momentum vanishes and the transition matrices are ill-posed there.
struct AtThreshold : Error {
  using Error::Error;
};

// The requested integration step underflowed or the node budget exploded.
struct IntegratorStep : Error {
  using Error::Error;
};

// det Phi+ is below the singularity cutoff; lambda is at or near a bound
// state and the scattering matrices cannot be formed.
struct SingularPhiPlus : Error {
  using Error::Error;
};

// An open/closed split required by a block identity is empty.
struct DegenerateSplit : Error {
  using Error::Error;
};

// A transfer-matrix request on a profile with non-constant layers.
struct NotPiecewiseConstant : Error {
  using Error::Error;
};

// A layer-local momentum vanishes (lambda equals a layer eigenvalue), so the
// plane-wave layer basis degenerates.
struct LayerResonance : Error {
  using Error::Error;
};

// A local threshold Lambda_s(z) - lambda changes sign on the grid; the
// semiclassical phase is undefined across a turning point.
struct TurningPoint : Error {
  using Error::Error;
};

// Tunable tolerances. Entries named *_scale are relative and are multiplied
// by a problem-size factor where they are used:
//   gap_tol         = gap_scale * max(1, max_s |Lambda_s|)
//   threshold_tol   = threshold_scale * (1 + |lambda|)
//   rank_tol        = rank_scale * sigma_max
//   singularity_tol = sing_scale * ||Phi+||_F^N
//   det_accept_tol  = det_accept_scale * median |D| over the scan
// h_max and pad are absolute lengths; non-positive values select the
// defaults (h_max = min(1e-3 * 2Lz, 0.05 / maxK), pad = Lz / 2).
struct Tolerances {
  Real sym_tol          = 1e-10;
  Real eig_tol          = 1e-10;
  Real gap_scale        = 1e-9;
  Real threshold_scale  = 1e-8;
  Real rank_scale       = 1e-10;
  Real sing_scale       = 1e-12;
  Real null_tol         = 1e-7;
  Real det_accept_scale = 1e-8;
  Real refine_tol       = 1e-12;
  Real h_max            = 0.0;
  Real pad              = -1.0;
  Real n_scan           = 2000.0;

  Real gap_tol(Real lambda_max_abs) const {
    return gap_scale * std::max(Real(1), lambda_max_abs);
  }
  Real threshold_tol(Real lambda_abs) const {
    return threshold_scale * (Real(1) + lambda_abs);
  }
};

// One named residual of an identity check, normalized unless stated
// otherwise at the producing operation.
struct ResidualRecord {
  std::string name;
  Real value = 0;
};

// Assign a tolerance by its external name (the CLI's --tol NAME=VALUE).
// Returns false for an unknown name. Scale-based names (gap_tol,
// threshold_tol, rank_tol, singularity_tol, det_accept_tol) set the
// corresponding relative scale.
bool set_tolerance(Tolerances& tol, const std::string& name, Real value);

// External names accepted by set_tolerance.
const std::vector<std::string>& tolerance_names();

}  // namespace jostline
