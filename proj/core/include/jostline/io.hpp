#pragma once

// Serialization of the library's value types to CSV and JSON.
//
// Every number is written as the shortest decimal string that round-trips
// binary64, so repeated runs with the same inputs produce byte-identical
// files. Column orders are fixed; consumers may rely on them.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "jostline/asymptotics.hpp"
#include "jostline/bound.hpp"
#include "jostline/jost.hpp"
#include "jostline/smatrix.hpp"
#include "jostline/spectral.hpp"
#include "jostline/transition.hpp"
#include "jostline/types.hpp"

namespace jostline {

// Shortest round-trip decimal form of a binary64 value.
std::string format_real(Real x);

// Columns: z, family, column, component, re_u, im_u, re_p, im_p.
// Rows run family-major, then node, then column, then component.
void write_field_csv(std::ostream& os, const JostField& field);

// Columns: matrix, row, col, re, im with matrix one of phi_plus, psi_plus,
// phi_minus, psi_minus.
void write_transition_csv(std::ostream& os, const TransitionSet& ts);
std::string transition_to_json(const TransitionSet& ts);

// Columns: lambda, block, row, col, re, im over the blocks t1, r1, t2, r2,
// their tilde-dressed versions, and proj when present.
void write_smatrix_csv(std::ostream& os,
                       const std::vector<std::pair<Real, ScatteringSet>>& rows);
std::string smatrix_to_json(
    const std::vector<std::pair<Real, ScatteringSet>>& rows);

// Columns: side, channel, state, kappa.
void write_classification_csv(std::ostream& os,
                              const ChannelClassification& cls);
std::string classification_to_json(const ChannelClassification& cls);

// Columns: lambda, check_name, residual.
void write_residuals_csv(
    std::ostream& os,
    const std::vector<std::pair<Real, std::vector<ResidualRecord>>>& rows);
std::string residuals_to_json(
    const std::vector<std::pair<Real, std::vector<ResidualRecord>>>& rows);

// One sweep row per spectral point: squared Frobenius magnitudes of the
// dressed transmission and reflection plus the worst open-channel unitarity
// residual at that point.
struct SweepRow {
  Real lambda = 0;
  Real t1_tilde_sq = 0;
  Real r1_tilde_sq = 0;
  Real unitarity = 0;
};

// Columns: lambda, t1_tilde_sq, r1_tilde_sq, unitarity.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

// Columns: lambda, re_D, im_D, abs_D.
void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& trace);

// Bound states as a JSON list; wavefunction samples are emitted per channel
// component as parallel re/im arrays over the stored grid.
std::string bound_states_to_json(const std::vector<BoundState>& states);

// Columns: lambda, abs_det_S_tilde_minus_1, phi_dev.
void write_asymptote_csv(std::ostream& os,
                         const std::vector<AsymptoteRecord>& rows);
std::string asymptote_to_json(const std::vector<AsymptoteRecord>& rows);

}  // namespace jostline
