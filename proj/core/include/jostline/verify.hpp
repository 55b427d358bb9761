#pragma once

// One-call invariant battery: picks spectral points in each regime the
// threshold layout admits (all open, mixed, all closed), runs every identity
// suite at each, and reports a pass/fail table. For piecewise-constant
// profiles the ODE pipeline is additionally compared against the exact
// transfer-matrix solver.

#include <string>
#include <vector>

#include "jostline/jost.hpp"
#include "jostline/medium.hpp"
#include "jostline/types.hpp"

namespace jostline {

struct VerifyCheck {
  std::string name;
  Real value = 0;
  Real limit = 0;
  // Most checks pass when value <= limit; witness checks (which certify
  // that something genuinely fails, like full unitarity with closed
  // channels) pass when value > limit.
  bool invert = false;
  bool pass = false;
};

struct VerifyOptions {
  // Explicit spectral points; when empty, per_class points are selected
  // automatically in each admissible regime.
  std::vector<Real> lambdas;
  int per_class = 5;
  // Test hook: a bias added to the computed scattering blocks so the battery
  // must notice and fail. Zero in normal operation.
  Real corrupt = 0;
  GridSpec grid;
  Tolerances tol;
};

struct VerifyReport {
  std::vector<Real> points;
  std::vector<VerifyCheck> checks;
  std::vector<std::string> notices;

  bool pass() const {
    if (checks.empty()) return false;
    for (const VerifyCheck& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Spectral points below every threshold, between consecutive distinct ones,
// and above all of them; regimes the layout does not admit (e.g. no interior
// threshold gap) contribute nothing.
std::vector<Real> select_verify_points(const EndBases& bases, int per_class,
                                       const Tolerances& tol = {});

VerifyReport verify_profile(const MediumProfile& profile,
                            const VerifyOptions& opts = {});

// Plain-text pass/fail table of the report, one check per line.
std::string format_table(const VerifyReport& report);

}  // namespace jostline
