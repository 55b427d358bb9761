#include "jostline/types.hpp"

#include <array>
#include <functional>
#include <utility>

namespace jostline {

namespace {

using Setter = std::function<void(Tolerances&, Real)>;

const std::array<std::pair<const char*, Setter>, 12>& table() {
  static const std::array<std::pair<const char*, Setter>, 12> entries{{
      {"sym_tol", [](Tolerances& t, Real v) { t.sym_tol = v; }},
      {"eig_tol", [](Tolerances& t, Real v) { t.eig_tol = v; }},
      {"gap_tol", [](Tolerances& t, Real v) { t.gap_scale = v; }},
      {"threshold_tol", [](Tolerances& t, Real v) { t.threshold_scale = v; }},
      {"rank_tol", [](Tolerances& t, Real v) { t.rank_scale = v; }},
      {"singularity_tol", [](Tolerances& t, Real v) { t.sing_scale = v; }},
      {"null_tol", [](Tolerances& t, Real v) { t.null_tol = v; }},
      {"det_accept_tol", [](Tolerances& t, Real v) { t.det_accept_scale = v; }},
      {"refine_tol", [](Tolerances& t, Real v) { t.refine_tol = v; }},
      {"h_max", [](Tolerances& t, Real v) { t.h_max = v; }},
      {"pad", [](Tolerances& t, Real v) { t.pad = v; }},
      {"n_scan", [](Tolerances& t, Real v) { t.n_scan = v; }},
  }};
  return entries;
}

}  // namespace

bool set_tolerance(Tolerances& tol, const std::string& name, Real value) {
  for (const auto& [key, set] : table()) {
    if (name == key) {
      set(tol, value);
      return true;
    }
  }
  return false;
}

const std::vector<std::string>& tolerance_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [key, set] : table()) out.emplace_back(key);
    return out;
  }();
  return names;
}

}  // namespace jostline
