#pragma once

// The matrix medium (g(z), V(z)): piecewise representation over [-Lz, Lz]
// with constant tails, validation, pointwise sampling, and the generalized
// eigendecomposition of the two asymptotic ends.

#include <string>
#include <vector>

#include "jostline/types.hpp"

namespace jostline {

enum class LayerKind { Constant, Sampled };

struct LayerNode {
  Real z;
  Matrix g;
  Matrix v;
};

// One layer of the medium. Constant layers carry a single (g, v) pair;
// sampled layers interpolate entrywise piecewise-linearly between nodes
// whose z values are strictly increasing and span [z_lo, z_hi].
struct Layer {
  LayerKind kind = LayerKind::Constant;
  Real z_lo = 0;
  Real z_hi = 0;
  Matrix g;
  Matrix v;
  std::vector<LayerNode> nodes;
};

// Full medium: contiguous layers covering [-half_width, half_width] exactly,
// plus the constant tail matrices on each side.
struct MediumProfile {
  int channels = 0;
  Real half_width = 0;
  Matrix g_left, v_left;
  Matrix g_right, v_right;
  std::vector<Layer> layers;

  bool piecewise_constant() const;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  Real margin = 0;      // asymmetry / smallest eigenvalue, check-dependent
  int layer_index = -1; // -1 when the check is not tied to a layer
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool ok() const;
  std::string summary() const;
};

// Structural checks: square shapes, symmetry of every stored matrix within
// sym_tol, positive-definiteness of every g, strict layer ordering, exact
// coverage of [-Lz, Lz]. Failures are reported, never thrown.
ValidationReport validate_profile(const MediumProfile& profile,
                                  const Tolerances& tol = {});

// validate_profile that throws InvalidProfile with the report summary.
void require_valid(const MediumProfile& profile, const Tolerances& tol = {});

// Eigendata of one constant tail: V f = g f diag(Lambda), f^T g f = 1,
// thresholds ascending, column signs fixed (largest-magnitude entry
// positive, ties resolved by the first such entry).
struct AsymptoticBasis {
  enum class Side { Left, Right };
  Side side = Side::Left;
  Vector thresholds;
  Matrix frame;
};

struct EndBases {
  AsymptoticBasis left;
  AsymptoticBasis right;
};

// Diagonalize both tails. Throws DegenerateThresholds when two thresholds on
// one side are closer than gap_tol.
EndBases diagonalize_ends(const MediumProfile& profile,
                          const Tolerances& tol = {});

// Evaluate (g, V) at z: tail matrices beyond +-Lz, layer data inside; at an
// interior layer boundary the layer with the larger index wins.
void sample_medium(const MediumProfile& profile, Real z, Matrix& g, Matrix& v);

// Profile ingestion from the JSON schema
//   { "channels": N, "half_width": Lz,
//     "left_tail": {"g": [[..]], "v": [[..]]}, "right_tail": {...},
//     "layers": [ {"kind": "constant", "z": [lo, hi], "g": .., "v": ..}
//               | {"kind": "sampled", "nodes": [{"z":.., "g":.., "v":..}]} ] }
// Schema violations throw InvalidProfile; the result is not yet validated
// numerically (run validate_profile / require_valid).
MediumProfile parse_profile(const std::string& json_text);
MediumProfile load_profile(const std::string& path);

// Serialize back to the same schema (used by tooling and tests).
std::string profile_to_json(const MediumProfile& profile);

}  // namespace jostline
