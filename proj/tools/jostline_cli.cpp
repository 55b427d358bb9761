// Command-line front end.
//
//   jostline scatter --profile p.json --lambda 0.5  [--out DIR] [--format F]
//   jostline sweep   --profile p.json --lambda-range LO:HI:N[:log]
//   jostline bound   --profile p.json --lambda-range LO:HI:N
//   jostline verify  --profile p.json [--lambda X ...]
//
// Exit codes: 0 success, 1 failed verify check, 2 invalid input (flags,
// profile, degenerate thresholds), 3 spectral point rejected (threshold hit
// or singular transition matrix).

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "jostline/asymptotics.hpp"
#include "jostline/bound.hpp"
#include "jostline/io.hpp"
#include "jostline/jost.hpp"
#include "jostline/medium.hpp"
#include "jostline/oracle.hpp"
#include "jostline/smatrix.hpp"
#include "jostline/spectral.hpp"
#include "jostline/transition.hpp"
#include "jostline/types.hpp"
#include "jostline/verify.hpp"

namespace {

using namespace jostline;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitBadPoint = 3;

struct LambdaRange {
  Real lo = 0;
  Real hi = 0;
  int count = 0;
  bool log_spaced = false;
};

// LO:HI:N with an optional trailing :log selector.
LambdaRange parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t colon = text.find(':', pos);
    if (colon == std::string::npos) colon = text.size();
    parts.push_back(text.substr(pos, colon - pos));
    pos = colon + 1;
  }
  if (parts.size() < 3 || parts.size() > 4)
    throw CLI::ValidationError("--lambda-range", "expected LO:HI:N[:log]");
  LambdaRange r;
  try {
    r.lo = std::stod(parts[0]);
    r.hi = std::stod(parts[1]);
    r.count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw CLI::ValidationError("--lambda-range", "non-numeric field");
  }
  if (parts.size() == 4) {
    if (parts[3] != "log")
      throw CLI::ValidationError("--lambda-range",
                                 "unknown spacing '" + parts[3] + "'");
    r.log_spaced = true;
  }
  if (r.count < 1)
    throw CLI::ValidationError("--lambda-range", "count must be >= 1");
  if (r.lo > r.hi)
    throw CLI::ValidationError("--lambda-range", "LO must be <= HI");
  if (r.log_spaced && (r.lo * r.hi <= 0))
    throw CLI::ValidationError(
        "--lambda-range", "log spacing needs LO, HI nonzero with equal sign");
  return r;
}

std::vector<Real> range_nodes(const LambdaRange& r) {
  std::vector<Real> out(static_cast<std::size_t>(r.count));
  if (r.count == 1) {
    out[0] = r.lo;
    return out;
  }
  if (r.log_spaced) {
    const Real sign = r.lo > 0 ? 1.0 : -1.0;
    const Real la = std::log(std::abs(r.lo));
    const Real lb = std::log(std::abs(r.hi));
    for (int i = 0; i < r.count; ++i)
      out[static_cast<std::size_t>(i)] =
          sign * std::exp(la + (lb - la) * i / (r.count - 1));
    // Descending magnitudes for negative ranges still sweep lo -> hi.
    if (sign < 0) std::reverse(out.begin(), out.end());
  } else {
    for (int i = 0; i < r.count; ++i)
      out[static_cast<std::size_t>(i)] = r.lo + (r.hi - r.lo) * i / (r.count - 1);
  }
  return out;
}

struct CommonArgs {
  std::string profile_path;
  std::string out_dir = ".";
  std::string format = "csv";
  int threads = 0;
  std::vector<std::string> tol_overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--profile", args.profile_path, "Profile JSON path")
      ->required();
  cmd->add_option("--out", args.out_dir, "Output directory (default .)");
  cmd->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", args.threads,
                  "Worker threads (default: logical cores)");
  cmd->add_option("--tol", args.tol_overrides,
                  "Tolerance override NAME=VALUE (repeatable)");
}

Tolerances resolve_tolerances(const std::vector<std::string>& overrides) {
  Tolerances tol;
  for (const std::string& item : overrides) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--tol", "expected NAME=VALUE, got '" + item +
                                              "'");
    const std::string name = item.substr(0, eq);
    Real value = 0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--tol", "non-numeric value in '" + item +
                                              "'");
    }
    if (!set_tolerance(tol, name, value)) {
      std::string known;
      for (const std::string& n : tolerance_names())
        known += (known.empty() ? "" : ", ") + n;
      throw CLI::ValidationError("--tol", "unknown tolerance '" + name +
                                              "' (known: " + known + ")");
    }
  }
  return tol;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

MediumProfile load_and_validate(const std::string& path,
                                const Tolerances& tol) {
  MediumProfile profile = load_profile(path);
  require_valid(profile, tol);
  return profile;
}

std::filesystem::path output_file(const std::string& dir,
                                  const std::string& stem,
                                  const std::string& ext) {
  std::filesystem::create_directories(dir);
  return std::filesystem::path(dir) / (stem + "." + ext);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open output file " + path.string());
  os << text;
}

// The per-lambda identity battery shared by scatter and sweep rows.
std::vector<ResidualRecord> point_residuals(const JostField& field,
                                            const TransitionSet& ts,
                                            const ScatteringSet& ss) {
  std::vector<ResidualRecord> recs;
  recs.push_back({"wronskian_drift", wronskian_drift(field)});
  recs.push_back({"expansion", ts.expansion_residual});
  for (auto& r : bilinear_residuals(ts)) recs.push_back(std::move(r));
  recs.push_back({"conjugation", conjugation_residual(ts, ss.cls)});
  for (auto& r : symmetry_residuals(ss)) recs.push_back(std::move(r));
  for (auto& r : unitarity_residuals(ss)) recs.push_back(std::move(r));
  recs.push_back({"barred_flux", barred_flux_residual(ss, ts)});
  recs.push_back({"det_consistency", det_consistency(ss, ts)});
  try {
    for (auto& r : closed_open_residuals(ss)) recs.push_back(std::move(r));
  } catch (const DegenerateSplit&) {
    // Not a mixed point; the closed<->open block relations do not apply.
  }
  return recs;
}

int cmd_scatter(const CommonArgs& args, Real lambda) {
  const Tolerances tol = resolve_tolerances(args.tol_overrides);
  const MediumProfile profile = load_and_validate(args.profile_path, tol);
  const EndBases bases = diagonalize_ends(profile, tol);

  const SpectralPoint point = SpectralPoint::physical(lambda, profile.channels);
  const ChannelClassification cls = classify_channels(bases, lambda, tol);
  const JostField field = integrate_jost(profile, bases, point, {}, tol);
  const TransitionSet ts = transition_matrices(field);
  const ScatteringSet ss = scattering_matrices(ts, cls, tol);
  const std::vector<ResidualRecord> recs = point_residuals(field, ts, ss);

  const bool json = args.format == "json";
  const std::string ext = json ? "json" : "csv";
  std::vector<std::pair<Real, ScatteringSet>> srows{{lambda, ss}};
  std::vector<std::pair<Real, std::vector<ResidualRecord>>> rrows{
      {lambda, recs}};

  if (json) {
    write_text(output_file(args.out_dir, "transition", ext),
               transition_to_json(ts));
    write_text(output_file(args.out_dir, "smatrix", ext),
               smatrix_to_json(srows));
    write_text(output_file(args.out_dir, "classification", ext),
               classification_to_json(cls));
    write_text(output_file(args.out_dir, "residuals", ext),
               residuals_to_json(rrows));
  } else {
    std::ofstream ts_os(output_file(args.out_dir, "transition", ext),
                        std::ios::binary);
    write_transition_csv(ts_os, ts);
    std::ofstream ss_os(output_file(args.out_dir, "smatrix", ext),
                        std::ios::binary);
    write_smatrix_csv(ss_os, srows);
    std::ofstream cl_os(output_file(args.out_dir, "classification", ext),
                        std::ios::binary);
    write_classification_csv(cl_os, cls);
    std::ofstream rs_os(output_file(args.out_dir, "residuals", ext),
                        std::ios::binary);
    write_residuals_csv(rs_os, rrows);
  }
  return kExitOk;
}

struct SweepSlot {
  bool ok = false;
  std::string notice;
  SweepRow row;
};

int cmd_sweep(const CommonArgs& args, const LambdaRange& range) {
  const Tolerances tol = resolve_tolerances(args.tol_overrides);
  const MediumProfile profile = load_and_validate(args.profile_path, tol);
  const EndBases bases = diagonalize_ends(profile, tol);
  const std::vector<Real> lambdas = range_nodes(range);

  std::vector<SweepSlot> slots(lambdas.size());
  auto work = [&](std::size_t i) {
    SweepSlot& slot = slots[i];
    const Real lambda = lambdas[i];
    try {
      const ChannelClassification cls = classify_channels(bases, lambda, tol);
      const SpectralPoint point =
          SpectralPoint::physical(lambda, profile.channels);
      const JostField field = integrate_jost(profile, bases, point, {}, tol);
      const TransitionSet ts = transition_matrices(field);
      const ScatteringSet ss = scattering_matrices(ts, cls, tol);
      slot.row.lambda = lambda;
      slot.row.t1_tilde_sq = ss.t1_tilde.squaredNorm();
      slot.row.r1_tilde_sq = ss.r1_tilde.squaredNorm();
      slot.row.unitarity = 0;
      for (const ResidualRecord& r : unitarity_residuals(ss))
        if (r.name.rfind("unitarity_open", 0) == 0)
          slot.row.unitarity = std::max(slot.row.unitarity, r.value);
      slot.ok = true;
    } catch (const AtThreshold& e) {
      slot.notice = "skipped lambda = " + format_real(lambda) + ": " + e.what();
    } catch (const SingularPhiPlus& e) {
      slot.notice = "skipped lambda = " + format_real(lambda) + ": " + e.what();
    }
  };

  const int n_threads =
      std::min<int>(resolve_threads(args.threads),
                    static_cast<int>(lambdas.size()) > 0
                        ? static_cast<int>(lambdas.size())
                        : 1);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = static_cast<std::size_t>(t); i < lambdas.size();
             i += static_cast<std::size_t>(n_threads))
          work(i);
      });
    for (std::thread& th : pool) th.join();
  }

  std::vector<SweepRow> rows;
  rows.reserve(slots.size());
  for (const SweepSlot& slot : slots) {
    if (slot.ok)
      rows.push_back(slot.row);
    else
      std::fprintf(stderr, "%s\n", slot.notice.c_str());
  }

  if (args.format == "json") {
    write_text(output_file(args.out_dir, "sweep", "json"),
               sweep_to_json(rows));
  } else {
    std::ofstream os(output_file(args.out_dir, "sweep", "csv"),
                     std::ios::binary);
    write_sweep_csv(os, rows);
  }
  return rows.empty() ? kExitBadPoint : kExitOk;
}

int cmd_bound(const CommonArgs& args, const LambdaRange& range) {
  const Tolerances tol = resolve_tolerances(args.tol_overrides);
  const MediumProfile profile = load_and_validate(args.profile_path, tol);
  const EndBases bases = diagonalize_ends(profile, tol);

  const Real width = range.hi - range.lo;
  const int n_per_unit =
      width > 0 ? static_cast<int>(std::ceil(range.count / width)) : 0;
  const BoundScan scan = bound_state_scan(profile, bases, range.lo, range.hi,
                                          n_per_unit, {}, tol);

  for (const std::string& n : scan.notices)
    std::fprintf(stderr, "%s\n", n.c_str());

  write_text(output_file(args.out_dir, "bound_states", "json"),
             bound_states_to_json(scan.states));
  std::ofstream os(output_file(args.out_dir, "scan", "csv"), std::ios::binary);
  write_scan_csv(os, scan.trace);

  std::printf("%zu bound state(s) in [%s, %s]\n", scan.states.size(),
              format_real(range.lo).c_str(), format_real(range.hi).c_str());
  return kExitOk;
}

int cmd_verify(const CommonArgs& args, const std::vector<Real>& lambdas,
               Real corrupt) {
  VerifyOptions opts;
  opts.tol = resolve_tolerances(args.tol_overrides);
  opts.lambdas = lambdas;
  opts.corrupt = corrupt;
  const MediumProfile profile =
      load_and_validate(args.profile_path, opts.tol);

  const VerifyReport report = verify_profile(profile, opts);
  std::fputs(format_table(report).c_str(), stdout);
  return report.pass() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jostline: multichannel scattering on a line"};
  app.require_subcommand(1);

  CommonArgs scatter_args, sweep_args, bound_args, verify_args;
  Real scatter_lambda = 0;
  std::string sweep_range_text, bound_range_text;
  std::vector<Real> verify_lambdas;
  Real verify_corrupt = 0;

  CLI::App* scatter =
      app.add_subcommand("scatter", "Scattering data at one lambda");
  add_common(scatter, scatter_args);
  scatter->add_option("--lambda", scatter_lambda, "Spectral point")
      ->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Scattering over a lambda range");
  add_common(sweep, sweep_args);
  sweep->add_option("--lambda-range", sweep_range_text, "LO:HI:N[:log]")
      ->required();

  CLI::App* bound =
      app.add_subcommand("bound", "Bound-state scan over a lambda range");
  add_common(bound, bound_args);
  bound->add_option("--lambda-range", bound_range_text, "LO:HI:N")
      ->required();

  CLI::App* verify =
      app.add_subcommand("verify", "Run the full invariant battery");
  add_common(verify, verify_args);
  verify->add_option("--lambda", verify_lambdas,
                     "Explicit spectral points (repeatable; default: "
                     "auto-selected per regime)");
  verify->add_option("--corrupt", verify_corrupt, "Test hook")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (scatter->parsed()) return cmd_scatter(scatter_args, scatter_lambda);
    if (sweep->parsed())
      return cmd_sweep(sweep_args, parse_range(sweep_range_text));
    if (bound->parsed())
      return cmd_bound(bound_args, parse_range(bound_range_text));
    if (verify->parsed())
      return cmd_verify(verify_args, verify_lambdas, verify_corrupt);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  } catch (const AtThreshold& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadPoint;
  } catch (const SingularPhiPlus& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadPoint;
  } catch (const LayerResonance& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBadPoint;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}
