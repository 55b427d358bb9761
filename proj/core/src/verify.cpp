#include "jostline/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "jostline/io.hpp"
#include "jostline/oracle.hpp"
#include "jostline/smatrix.hpp"
#include "jostline/spectral.hpp"
#include "jostline/transition.hpp"

namespace jostline {
namespace {

constexpr Real kIdentityLimit = 1e-8;
constexpr Real kWitnessFloor = 1e-2;

std::vector<Real> distinct_thresholds(const EndBases& bases,
                                      const Tolerances& tol) {
  std::vector<Real> th;
  for (const Vector* side : {&bases.left.thresholds, &bases.right.thresholds})
    for (Eigen::Index s = 0; s < side->size(); ++s)
      th.push_back((*side)[s]);
  std::sort(th.begin(), th.end());
  const Real merge = tol.gap_tol(std::max(std::abs(th.front()),
                                          std::abs(th.back())));
  std::vector<Real> out;
  for (Real t : th)
    if (out.empty() || t - out.back() > merge) out.push_back(t);
  return out;
}

// Relative so that the exponentially large transition entries of deep
// closed-channel points are compared at the accuracy the integrator can
// actually deliver.
Real max_block_dev(const CMatrix& a, const CMatrix& b) {
  const Real scale =
      1 + std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

struct CheckSink {
  VerifyReport* report;
  std::string prefix;

  void add(const std::string& name, Real value, Real limit) {
    report->checks.push_back(
        {prefix + name, value, limit, false, value <= limit});
  }
  void add_witness(const std::string& name, Real value, Real floor) {
    report->checks.push_back({prefix + name, value, floor, true,
                              value > floor});
  }
};

}  // namespace

std::vector<Real> select_verify_points(const EndBases& bases, int per_class,
                                       const Tolerances& tol) {
  const std::vector<Real> th = distinct_thresholds(bases, tol);
  const Real t_min = th.front();
  const Real t_max = th.back();
  const Real span = std::max(Real(1), t_max - t_min);

  std::vector<Real> out;
  for (int j = 0; j < per_class; ++j)
    out.push_back(t_min - span * (0.31 + 0.46 * j));

  std::vector<std::pair<Real, Real>> gaps;
  for (std::size_t i = 0; i + 1 < th.size(); ++i) {
    const Real width = th[i + 1] - th[i];
    if (width >
        100 * tol.threshold_tol(std::max(std::abs(th[i]), std::abs(th[i + 1]))))
      gaps.push_back({th[i], th[i + 1]});
  }
  if (!gaps.empty()) {
    static constexpr Real fracs[] = {0.5, 0.29, 0.71, 0.37, 0.63,
                                     0.44, 0.56, 0.33, 0.67};
    for (int j = 0; j < per_class; ++j) {
      const auto& [a, b] = gaps[static_cast<std::size_t>(j) % gaps.size()];
      const Real frac =
          fracs[(static_cast<std::size_t>(j) / gaps.size()) % std::size(fracs)];
      out.push_back(a + (b - a) * frac);
    }
  }

  for (int j = 0; j < per_class; ++j)
    out.push_back(t_max + span * (0.33 + 0.46 * j));
  return out;
}

VerifyReport verify_profile(const MediumProfile& profile,
                            const VerifyOptions& opts) {
  require_valid(profile, opts.tol);
  const EndBases bases = diagonalize_ends(profile, opts.tol);

  VerifyReport report;
  const std::vector<Real> pts =
      opts.lambdas.empty()
          ? select_verify_points(bases, opts.per_class, opts.tol)
          : opts.lambdas;
  const bool piecewise = profile.piecewise_constant();
  if (!piecewise)
    report.notices.push_back(
        "profile has sampled layers: transfer-matrix comparison skipped");

  // First successfully handled point of each regime, kept for the (more
  // expensive) sheet-flip checks at the end.
  std::vector<std::pair<std::string, Real>> class_reps;

  for (Real lambda : pts) {
    ChannelClassification cls;
    try {
      cls = classify_channels(bases, lambda, opts.tol);
    } catch (const AtThreshold& e) {
      report.notices.push_back(std::string("skipped point: ") + e.what());
      continue;
    }
    const std::string cname =
        cls.all_open() ? "open" : (cls.all_closed() ? "closed" : "mixed");
    CheckSink sink{&report,
                   cname + " lambda=" + format_real(lambda) + " "};

    const SpectralPoint point =
        SpectralPoint::physical(lambda, profile.channels);
    TransitionSet ts;
    ScatteringSet ss;
    try {
      const JostField field =
          integrate_jost(profile, bases, point, opts.grid, opts.tol);
      ts = transition_matrices(field);
      ss = scattering_matrices(ts, cls, opts.tol);
      sink.add("wronskian_drift", wronskian_drift(field), kIdentityLimit);
    } catch (const SingularPhiPlus& e) {
      report.notices.push_back(sink.prefix + "skipped: " + e.what());
      continue;
    }
    if (opts.corrupt != 0) {
      ss.t1(0, 0) += opts.corrupt;
      ss.t1_tilde(0, 0) += opts.corrupt;
      ss.r1(0, 0) += opts.corrupt;
      ss.r1_tilde(0, 0) += opts.corrupt;
    }

    sink.add("expansion", ts.expansion_residual, kIdentityLimit);
    for (const ResidualRecord& r : bilinear_residuals(ts))
      sink.add(r.name, r.value, kIdentityLimit);
    sink.add("conjugation", conjugation_residual(ts, cls), kIdentityLimit);
    for (const ResidualRecord& r : symmetry_residuals(ss))
      sink.add(r.name, r.value, kIdentityLimit);
    for (const ResidualRecord& r : unitarity_residuals(ss)) {
      if (r.name == "unitarity_full_raw") {
        if (cls.all_open())
          sink.add("unitarity_full", r.value, kIdentityLimit);
        else
          sink.add_witness("nonunitary_witness", r.value, kWitnessFloor);
      } else {
        sink.add(r.name, r.value, kIdentityLimit);
      }
    }
    sink.add("barred_flux", barred_flux_residual(ss, ts), kIdentityLimit);
    sink.add("det_consistency", det_consistency(ss, ts), kIdentityLimit);

    if (cls.l_o > 0 && cls.r_o > 0 && cls.l_c > 0 && cls.r_c > 0)
      for (const ResidualRecord& r : closed_open_residuals(ss))
        sink.add(r.name, r.value, kIdentityLimit);

    if (piecewise) {
      try {
        const TransitionSet ots =
            transfer_transition(profile, bases, point, opts.tol);
        const ScatteringSet oss = scattering_matrices(ots, cls, opts.tol);
        const Real dev = std::max(
            {max_block_dev(ts.phi_plus, ots.phi_plus),
             max_block_dev(ts.psi_plus, ots.psi_plus),
             max_block_dev(ts.phi_minus, ots.phi_minus),
             max_block_dev(ts.psi_minus, ots.psi_minus),
             max_block_dev(ss.t1, oss.t1), max_block_dev(ss.r1, oss.r1),
             max_block_dev(ss.t2, oss.t2), max_block_dev(ss.r2, oss.r2)});
        sink.add("transfer_match", dev, kIdentityLimit);
      } catch (const LayerResonance& e) {
        report.notices.push_back(sink.prefix +
                                 "transfer comparison skipped: " + e.what());
      }
    }

    bool seen = false;
    for (const auto& [name, l] : class_reps) seen = seen || name == cname;
    if (!seen) class_reps.push_back({cname, lambda});
    report.points.push_back(lambda);
  }

  for (const auto& [cname, lambda] : class_reps) {
    const SpectralPoint point =
        SpectralPoint::physical(lambda, profile.channels);
    CheckSink sink{&report, cname + " lambda=" + format_real(lambda) + " "};
    sink.add("monodromy_left0",
             monodromy_residual(profile, bases, point,
                                AsymptoticBasis::Side::Left, 0, opts.grid,
                                opts.tol),
             kIdentityLimit);
    sink.add("monodromy_right0",
             monodromy_residual(profile, bases, point,
                                AsymptoticBasis::Side::Right, 0, opts.grid,
                                opts.tol),
             kIdentityLimit);
  }
  return report;
}

std::string format_table(const VerifyReport& report) {
  std::size_t width = 0;
  for (const VerifyCheck& c : report.checks)
    width = std::max(width, c.name.size());

  std::ostringstream os;
  for (const VerifyCheck& c : report.checks)
    os << std::left << std::setw(static_cast<int>(width) + 2) << c.name
       << (c.pass ? "PASS" : "FAIL") << "  value " << format_real(c.value)
       << (c.invert ? " > " : " <= ") << format_real(c.limit) << '\n';
  for (const std::string& n : report.notices) os << "note: " << n << '\n';
  os << (report.pass() ? "ALL CHECKS PASSED" : "CHECKS FAILED") << " ("
     << report.checks.size() << " checks)\n";
  return os.str();
}

}  // namespace jostline
