#include "jostline/medium.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace jostline {

namespace {

using nlohmann::ordered_json;

Real asymmetry(const Matrix& m) {
  if (m.rows() != m.cols() || m.size() == 0) return 0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

Real smallest_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_matrix_pair(ValidationReport& report, const Matrix& g,
                       const Matrix& v, int n, Real sym_tol,
                       const std::string& where, int layer_index) {
  CheckResult shape{"shape(" + where + ")", true, "", 0, layer_index};
  if (g.rows() != n || g.cols() != n || v.rows() != n || v.cols() != n) {
    shape.passed = false;
    std::ostringstream os;
    os << "expected " << n << "x" << n << ", got g " << g.rows() << "x"
       << g.cols() << ", v " << v.rows() << "x" << v.cols();
    shape.detail = os.str();
    report.checks.push_back(shape);
    return;  // remaining checks would read out of shape
  }
  report.checks.push_back(shape);

  CheckResult gs{"symmetry(g, " + where + ")", true, "", asymmetry(g),
                 layer_index};
  gs.passed = gs.margin <= sym_tol;
  if (!gs.passed) gs.detail = "asymmetry " + std::to_string(gs.margin);
  report.checks.push_back(gs);

  CheckResult vs{"symmetry(v, " + where + ")", true, "", asymmetry(v),
                 layer_index};
  vs.passed = vs.margin <= sym_tol;
  if (!vs.passed) vs.detail = "asymmetry " + std::to_string(vs.margin);
  report.checks.push_back(vs);

  CheckResult pd{"definiteness(g, " + where + ")", true, "",
                 smallest_eigenvalue(g), layer_index};
  pd.passed = pd.margin > 0;
  if (!pd.passed) pd.detail = "smallest eigenvalue " + std::to_string(pd.margin);
  report.checks.push_back(pd);
}

Matrix parse_matrix(const ordered_json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw InvalidProfile(where + ": expected " + std::to_string(n) +
                         " rows of numbers");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw InvalidProfile(where + ": row " + std::to_string(r) +
                           " has wrong length");
    for (int c = 0; c < n; ++c) {
      if (!row[c].is_number())
        throw InvalidProfile(where + ": non-numeric entry at (" +
                             std::to_string(r) + "," + std::to_string(c) + ")");
      m(r, c) = row[c].get<Real>();
    }
  }
  return m;
}

ordered_json matrix_to_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

bool MediumProfile::piecewise_constant() const {
  return std::all_of(layers.begin(), layers.end(), [](const Layer& l) {
    return l.kind == LayerKind::Constant;
  });
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  int failed = 0;
  for (const auto& c : checks)
    if (!c.passed) {
      ++failed;
      os << c.name;
      if (c.layer_index >= 0) os << " [layer " << c.layer_index << "]";
      if (!c.detail.empty()) os << ": " << c.detail;
      os << "; ";
    }
  if (failed == 0) return "all checks passed";
  return std::to_string(failed) + " check(s) failed: " + os.str();
}

ValidationReport validate_profile(const MediumProfile& profile,
                                  const Tolerances& tol) {
  ValidationReport report;
  const int n = profile.channels;

  CheckResult basic{"channels", n >= 1, "", Real(n), -1};
  if (!basic.passed) basic.detail = "channel count must be >= 1";
  report.checks.push_back(basic);

  CheckResult hw{"half_width", profile.half_width > 0, "", profile.half_width,
                 -1};
  if (!hw.passed) hw.detail = "half_width must be > 0";
  report.checks.push_back(hw);

  if (!basic.passed || !hw.passed) return report;

  check_matrix_pair(report, profile.g_left, profile.v_left, n, tol.sym_tol,
                    "left_tail", -1);
  check_matrix_pair(report, profile.g_right, profile.v_right, n, tol.sym_tol,
                    "right_tail", -1);

  const Real lz = profile.half_width;
  // Coverage tolerance: endpoint bookkeeping only, well below any physics.
  const Real edge_tol = 1e-12 * std::max(Real(1), lz);

  CheckResult cover{"coverage", true, "", 0, -1};
  if (profile.layers.empty()) {
    cover.passed = false;
    cover.detail = "no layers";
  } else {
    if (std::abs(profile.layers.front().z_lo + lz) > edge_tol) {
      cover.passed = false;
      cover.detail = "first layer starts at " +
                     std::to_string(profile.layers.front().z_lo) +
                     ", expected " + std::to_string(-lz);
    }
    if (std::abs(profile.layers.back().z_hi - lz) > edge_tol) {
      cover.passed = false;
      cover.detail += (cover.detail.empty() ? "" : "; ");
      cover.detail += "last layer ends at " +
                      std::to_string(profile.layers.back().z_hi) +
                      ", expected " + std::to_string(lz);
    }
  }
  for (std::size_t i = 0; i + 1 < profile.layers.size(); ++i) {
    if (std::abs(profile.layers[i].z_hi - profile.layers[i + 1].z_lo) >
        edge_tol) {
      cover.passed = false;
      cover.detail += (cover.detail.empty() ? "" : "; ");
      cover.detail += "gap or overlap between layers " + std::to_string(i) +
                      " and " + std::to_string(i + 1);
    }
  }
  report.checks.push_back(cover);

  for (std::size_t i = 0; i < profile.layers.size(); ++i) {
    const Layer& l = profile.layers[i];
    const int li = static_cast<int>(i);

    CheckResult order{"layer_extent", l.z_lo < l.z_hi, "", l.z_hi - l.z_lo,
                      li};
    if (!order.passed) order.detail = "z_lo must be < z_hi";
    report.checks.push_back(order);

    if (l.kind == LayerKind::Constant) {
      check_matrix_pair(report, l.g, l.v, n, tol.sym_tol,
                        "layer " + std::to_string(i), li);
    } else {
      CheckResult grid{"sample_grid", true, "", 0, li};
      if (l.nodes.size() < 2) {
        grid.passed = false;
        grid.detail = "sampled layer needs at least 2 nodes";
      } else {
        if (std::abs(l.nodes.front().z - l.z_lo) > edge_tol ||
            std::abs(l.nodes.back().z - l.z_hi) > edge_tol) {
          grid.passed = false;
          grid.detail = "node grid must span [z_lo, z_hi]";
        }
        for (std::size_t k = 0; k + 1 < l.nodes.size(); ++k)
          if (!(l.nodes[k].z < l.nodes[k + 1].z)) {
            grid.passed = false;
            grid.detail = "node z values must be strictly increasing";
            break;
          }
      }
      report.checks.push_back(grid);
      if (grid.passed) {
        for (std::size_t k = 0; k < l.nodes.size(); ++k)
          check_matrix_pair(report, l.nodes[k].g, l.nodes[k].v, n, tol.sym_tol,
                            "layer " + std::to_string(i) + " node " +
                                std::to_string(k),
                            li);
      }
    }
  }
  return report;
}

void require_valid(const MediumProfile& profile, const Tolerances& tol) {
  const ValidationReport report = validate_profile(profile, tol);
  if (!report.ok()) throw InvalidProfile(report.summary());
}

EndBases diagonalize_ends(const MediumProfile& profile, const Tolerances& tol) {
  auto solve_side = [&](const Matrix& g, const Matrix& v,
                        AsymptoticBasis::Side side) {
    // Generalized symmetric-definite eigenproblem V f = g f Lambda with the
    // B-normalization f^T g f = 1 and ascending eigenvalues.
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(v, g);
    if (es.info() != Eigen::Success)
      throw InvalidProfile("tail eigenproblem failed to converge");

    AsymptoticBasis basis;
    basis.side = side;
    basis.thresholds = es.eigenvalues();
    basis.frame = es.eigenvectors();

    const Real gap_tol = tol.gap_tol(basis.thresholds.cwiseAbs().maxCoeff());
    for (int s = 0; s + 1 < basis.thresholds.size(); ++s) {
      const Real gap = basis.thresholds[s + 1] - basis.thresholds[s];
      if (gap <= gap_tol) {
        std::ostringstream os;
        os << (side == AsymptoticBasis::Side::Left ? "left" : "right")
           << " thresholds " << s << " and " << s + 1 << " coincide: "
           << basis.thresholds[s] << " vs " << basis.thresholds[s + 1];
        throw DegenerateThresholds(os.str());
      }
    }

    for (int s = 0; s < basis.frame.cols(); ++s) {
      int arg = 0;
      Real best = 0;
      for (int r = 0; r < basis.frame.rows(); ++r) {
        const Real a = std::abs(basis.frame(r, s));
        if (a > best) {
          best = a;
          arg = r;
        }
      }
      if (basis.frame(arg, s) < 0) basis.frame.col(s) = -basis.frame.col(s);
    }
    return basis;
  };

  EndBases bases;
  bases.left = solve_side(profile.g_left, profile.v_left,
                          AsymptoticBasis::Side::Left);
  bases.right = solve_side(profile.g_right, profile.v_right,
                           AsymptoticBasis::Side::Right);
  return bases;
}

void sample_medium(const MediumProfile& profile, Real z, Matrix& g, Matrix& v) {
  if (z > profile.half_width) {
    g = profile.g_right;
    v = profile.v_right;
    return;
  }
  if (z < -profile.half_width) {
    g = profile.g_left;
    v = profile.v_left;
    return;
  }

  // Right-continuous convention: at a shared boundary the layer with the
  // larger index wins, so take the rearmost layer whose z_lo is <= z.
  const Layer* chosen = &profile.layers.front();
  for (auto it = profile.layers.rbegin(); it != profile.layers.rend(); ++it) {
    if (z >= it->z_lo) {
      chosen = &*it;
      break;
    }
  }

  const Layer& l = *chosen;
  if (l.kind == LayerKind::Constant) {
    g = l.g;
    v = l.v;
    return;
  }
  const auto& nodes = l.nodes;
  if (z <= nodes.front().z) {
    g = nodes.front().g;
    v = nodes.front().v;
    return;
  }
  if (z >= nodes.back().z) {
    g = nodes.back().g;
    v = nodes.back().v;
    return;
  }
  auto hi = std::upper_bound(
      nodes.begin(), nodes.end(), z,
      [](Real value, const LayerNode& node) { return value < node.z; });
  auto lo = std::prev(hi);
  const Real t = (z - lo->z) / (hi->z - lo->z);
  g = (1 - t) * lo->g + t * hi->g;
  v = (1 - t) * lo->v + t * hi->v;
}

MediumProfile parse_profile(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw InvalidProfile(std::string("profile JSON parse error: ") + e.what());
  }

  auto need = [&](const ordered_json& obj, const char* key) -> const ordered_json& {
    if (!obj.contains(key))
      throw InvalidProfile(std::string("profile missing key '") + key + "'");
    return obj.at(key);
  };

  MediumProfile p;
  const auto& channels = need(j, "channels");
  if (!channels.is_number_integer() || channels.get<int>() < 1)
    throw InvalidProfile("'channels' must be a positive integer");
  p.channels = channels.get<int>();

  const auto& hw = need(j, "half_width");
  if (!hw.is_number())
    throw InvalidProfile("'half_width' must be a number");
  p.half_width = hw.get<Real>();

  const int n = p.channels;
  const auto& lt = need(j, "left_tail");
  p.g_left = parse_matrix(need(lt, "g"), n, "left_tail.g");
  p.v_left = parse_matrix(need(lt, "v"), n, "left_tail.v");
  const auto& rt = need(j, "right_tail");
  p.g_right = parse_matrix(need(rt, "g"), n, "right_tail.g");
  p.v_right = parse_matrix(need(rt, "v"), n, "right_tail.v");

  const auto& layers = need(j, "layers");
  if (!layers.is_array() || layers.empty())
    throw InvalidProfile("'layers' must be a non-empty array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& jl = layers[i];
    const std::string where = "layers[" + std::to_string(i) + "]";
    const std::string kind = need(jl, "kind").get<std::string>();
    Layer layer;
    if (kind == "constant") {
      layer.kind = LayerKind::Constant;
      const auto& zr = need(jl, "z");
      if (!zr.is_array() || zr.size() != 2)
        throw InvalidProfile(where + ".z must be [lo, hi]");
      layer.z_lo = zr[0].get<Real>();
      layer.z_hi = zr[1].get<Real>();
      layer.g = parse_matrix(need(jl, "g"), n, where + ".g");
      layer.v = parse_matrix(need(jl, "v"), n, where + ".v");
    } else if (kind == "sampled") {
      layer.kind = LayerKind::Sampled;
      const auto& jnodes = need(jl, "nodes");
      if (!jnodes.is_array() || jnodes.size() < 2)
        throw InvalidProfile(where + ".nodes must hold at least 2 nodes");
      for (std::size_t k = 0; k < jnodes.size(); ++k) {
        const auto& jn = jnodes[k];
        LayerNode node;
        node.z = need(jn, "z").get<Real>();
        node.g = parse_matrix(need(jn, "g"), n,
                              where + ".nodes[" + std::to_string(k) + "].g");
        node.v = parse_matrix(need(jn, "v"), n,
                              where + ".nodes[" + std::to_string(k) + "].v");
        layer.nodes.push_back(std::move(node));
      }
      layer.z_lo = layer.nodes.front().z;
      layer.z_hi = layer.nodes.back().z;
    } else {
      throw InvalidProfile(where + ".kind must be 'constant' or 'sampled'");
    }
    p.layers.push_back(std::move(layer));
  }
  return p;
}

MediumProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidProfile("cannot open profile file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_profile(buffer.str());
}

std::string profile_to_json(const MediumProfile& p) {
  ordered_json j;
  j["channels"] = p.channels;
  j["half_width"] = p.half_width;
  j["left_tail"] = {{"g", matrix_to_json(p.g_left)},
                    {"v", matrix_to_json(p.v_left)}};
  j["right_tail"] = {{"g", matrix_to_json(p.g_right)},
                     {"v", matrix_to_json(p.v_right)}};
  j["layers"] = ordered_json::array();
  for (const Layer& l : p.layers) {
    ordered_json jl;
    if (l.kind == LayerKind::Constant) {
      jl["kind"] = "constant";
      jl["z"] = {l.z_lo, l.z_hi};
      jl["g"] = matrix_to_json(l.g);
      jl["v"] = matrix_to_json(l.v);
    } else {
      jl["kind"] = "sampled";
      jl["nodes"] = ordered_json::array();
      for (const LayerNode& node : l.nodes) {
        ordered_json jn;
        jn["z"] = node.z;
        jn["g"] = matrix_to_json(node.g);
        jn["v"] = matrix_to_json(node.v);
        jl["nodes"].push_back(jn);
      }
    }
    j["layers"].push_back(jl);
  }
  return j.dump(2);
}

}  // namespace jostline
