#include "jostline/jost.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace jostline {
namespace {

// One evaluation point of the first-order system
//   du/dz = g(z)^-1 p,   dp/dz = (lambda g(z) - V(z)) u.
struct Stage {
  Eigen::LLT<Matrix> g_llt;
  CMatrix a;
};

void make_stage(const Matrix& g, const Matrix& v, Complex lambda, Stage& st) {
  st.g_llt.compute(g);
  st.a = lambda * g.cast<Complex>() - v.cast<Complex>();
}

CMatrix solve_g(const Eigen::LLT<Matrix>& llt, const CMatrix& m) {
  CMatrix out(m.rows(), m.cols());
  out.real() = llt.solve(m.real().eval());
  out.imag() = llt.solve(m.imag().eval());
  return out;
}

// Classical RK4 across one step [z, z + h] whose three abscissae carry the
// coefficient data s0 (at z), sm (at z + h/2), s1 (at z + h). h may be
// negative for right-to-left integration.
void rk4_step(const Stage& s0, const Stage& sm, const Stage& s1, Real h,
              CMatrix& u, CMatrix& p) {
  const CMatrix ku1 = solve_g(s0.g_llt, p);
  const CMatrix kp1 = s0.a * u;
  const CMatrix ku2 = solve_g(sm.g_llt, p + (h / 2) * kp1);
  const CMatrix kp2 = sm.a * (u + (h / 2) * ku1);
  const CMatrix ku3 = solve_g(sm.g_llt, p + (h / 2) * kp2);
  const CMatrix kp3 = sm.a * (u + (h / 2) * ku2);
  const CMatrix ku4 = solve_g(s1.g_llt, p + h * kp3);
  const CMatrix kp4 = s1.a * (u + h * ku3);
  u += (h / 6) * (ku1 + 2 * ku2 + 2 * ku3 + ku4);
  p += (h / 6) * (kp1 + 2 * kp2 + 2 * kp3 + kp4);
}

// g, V inside one layer at abscissa z (sampled layers interpolate their own
// node table; never falls through to a neighboring layer, so steps that end
// exactly on a boundary still use the owning layer's data).
void layer_data(const Layer& layer, Real z, Matrix& g, Matrix& v) {
  if (layer.kind == LayerKind::Constant) {
    g = layer.g;
    v = layer.v;
    return;
  }
  const auto& nodes = layer.nodes;
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
      [](Real value, const LayerNode& n) { return value < n.z; });
  auto lo = std::prev(hi);
  const Real t = (z - lo->z) / (hi->z - lo->z);
  g = (1 - t) * lo->g + t * hi->g;
  v = (1 - t) * lo->v + t * hi->v;
}

struct GridPlan {
  std::vector<Real> nodes;     // ascending, [-Lz, Lz]
  std::vector<int> seg_layer;  // nodes.size() - 1 entries
  std::size_t i_zero = 0;
};

int owning_layer(const MediumProfile& profile, Real z) {
  int best = 0;
  for (std::size_t i = 0; i < profile.layers.size(); ++i) {
    if (profile.layers[i].z_lo <= z) best = static_cast<int>(i);
  }
  return best;
}

GridPlan plan_interior(const MediumProfile& profile, Real h) {
  if (profile.layers.empty())
    throw InvalidProfile("profile interior has no layers; the layer list "
                         "must cover [-half_width, half_width]");
  const Real L = profile.half_width;
  const Real merge = 1e-13 * std::max(Real(1), L);

  std::vector<Real> breaks;
  breaks.push_back(-L);
  breaks.push_back(L);
  if (-L < 0 && 0 < L) breaks.push_back(0);
  for (const auto& layer : profile.layers) {
    breaks.push_back(layer.z_lo);
    breaks.push_back(layer.z_hi);
    if (layer.kind == LayerKind::Sampled)
      for (const auto& n : layer.nodes) breaks.push_back(n.z);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [merge](Real a, Real b) { return b - a <= merge; }),
               breaks.end());
  while (!breaks.empty() && breaks.front() < -L - merge) breaks.erase(breaks.begin());
  while (!breaks.empty() && breaks.back() > L + merge) breaks.pop_back();
  breaks.front() = -L;
  breaks.back() = L;

  if (h <= 1e-13 * 2 * L)
    throw IntegratorStep("integration step " + std::to_string(h) +
                         " underflows for half-width " + std::to_string(L));

  std::size_t total = 0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    total += static_cast<std::size_t>(
        std::ceil((breaks[i + 1] - breaks[i]) / h - 1e-12));
  if (total > 20'000'000)
    throw IntegratorStep("step " + std::to_string(h) + " needs " +
                         std::to_string(total) +
                         " nodes; raise h_max or shrink the domain");

  GridPlan plan;
  plan.nodes.reserve(total + 1);
  plan.seg_layer.reserve(total);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const Real a = breaks[i];
    const Real b = breaks[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-12)));
    const int layer = owning_layer(profile, (a + b) / 2);
    for (int k = 0; k < n; ++k) {
      plan.nodes.push_back(a + (b - a) * k / n);
      plan.seg_layer.push_back(layer);
    }
  }
  plan.nodes.push_back(L);

  Real best = std::abs(plan.nodes[0]);
  for (std::size_t i = 1; i < plan.nodes.size(); ++i)
    if (std::abs(plan.nodes[i]) < best) {
      best = std::abs(plan.nodes[i]);
      plan.i_zero = i;
    }
  return plan;
}

// Per-layer stage factory with a cache for constant layers.
class StageSource {
 public:
  StageSource(const MediumProfile& profile, Complex lambda)
      : profile_(profile),
        lambda_(lambda),
        constant_(profile.layers.size()),
        ready_(profile.layers.size(), false) {}

  // Fills the three RK4 abscissae of the step [a, b] inside layer `layer`.
  // For constant layers all three alias the cached stage.
  void step_stages(int layer, Real a, Real b, const Stage*& s0,
                   const Stage*& sm, const Stage*& s1) {
    const Layer& lay = profile_.layers[static_cast<std::size_t>(layer)];
    if (lay.kind == LayerKind::Constant) {
      auto idx = static_cast<std::size_t>(layer);
      if (!ready_[idx]) {
        make_stage(lay.g, lay.v, lambda_, constant_[idx]);
        ready_[idx] = true;
      }
      s0 = sm = s1 = &constant_[idx];
      return;
    }
    Matrix g, v;
    layer_data(lay, a, g, v);
    make_stage(g, v, lambda_, scratch_[0]);
    layer_data(lay, (a + b) / 2, g, v);
    make_stage(g, v, lambda_, scratch_[1]);
    layer_data(lay, b, g, v);
    make_stage(g, v, lambda_, scratch_[2]);
    s0 = &scratch_[0];
    sm = &scratch_[1];
    s1 = &scratch_[2];
  }

 private:
  const MediumProfile& profile_;
  Complex lambda_;
  std::vector<Stage> constant_;
  std::vector<bool> ready_;
  Stage scratch_[3];
};

// Advances `states` across the planned grid from node i0 to node i1 (either
// order), invoking emit(node) after arriving at each node, including i0
// before the first step.
template <typename Emit>
void walk(const GridPlan& plan, StageSource& stages,
          std::vector<FamilyState*> states, std::size_t i0, std::size_t i1,
          Emit&& emit) {
  emit(i0);
  if (i0 == i1) return;
  const bool fwd = i1 > i0;
  for (std::size_t i = i0; i != i1; fwd ? ++i : --i) {
    const std::size_t seg = fwd ? i : i - 1;
    const Real za = plan.nodes[i];
    const Real zb = plan.nodes[fwd ? i + 1 : i - 1];
    const Stage *s0, *sm, *s1;
    if (fwd)
      stages.step_stages(plan.seg_layer[seg], za, zb, s0, sm, s1);
    else
      stages.step_stages(plan.seg_layer[seg], zb, za, s1, sm, s0);
    for (FamilyState* st : states)
      rk4_step(*s0, *sm, *s1, zb - za, st->u, st->p);
    emit(fwd ? i + 1 : i - 1);
  }
}

CVector phase(const CVector& k, Real z, Complex sign) {
  return (sign * z * k.array()).exp().matrix();
}

Real max_abs(const CMatrix& m) {
  return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

Real max_channel_momentum(const MediumProfile& profile, Complex lambda) {
  Real max_k = 0;
  auto absorb = [&](const Matrix& g, const Matrix& v) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(v, g);
    for (int s = 0; s < eig.eigenvalues().size(); ++s)
      max_k = std::max(max_k, std::sqrt(std::abs(eig.eigenvalues()[s] - lambda)));
  };
  absorb(profile.g_left, profile.v_left);
  absorb(profile.g_right, profile.v_right);
  for (const auto& layer : profile.layers) {
    if (layer.kind == LayerKind::Constant) {
      absorb(layer.g, layer.v);
    } else {
      for (const auto& n : layer.nodes) absorb(n.g, n.v);
    }
  }
  return max_k;
}

}  // namespace

const char* family_name(JostFamily f) {
  switch (f) {
    case JostFamily::RightPlus:
      return "right+";
    case JostFamily::RightMinus:
      return "right-";
    case JostFamily::LeftPlus:
      return "left+";
    default:
      return "left-";
  }
}

Real resolve_step(const MediumProfile& profile, Complex lambda,
                  const GridSpec& grid, const Tolerances& tol) {
  const Real user = grid.h_max > 0 ? grid.h_max : tol.h_max;
  if (user > 0) return user;
  const Real max_k = max_channel_momentum(profile, lambda);
  Real h = 1e-3 * 2 * profile.half_width;
  if (max_k > 0) h = std::min(h, 0.05 / max_k);
  return h;
}

std::vector<Real> integration_nodes(const MediumProfile& profile, Real h) {
  return plan_interior(profile, h).nodes;
}

FamilyState seed_family(const MediumProfile& profile, const EndBases& bases,
                        const ChannelMomenta& momenta, JostFamily family) {
  const bool right =
      family == JostFamily::RightPlus || family == JostFamily::RightMinus;
  const bool plus =
      family == JostFamily::RightPlus || family == JostFamily::LeftPlus;
  const AsymptoticBasis& basis = right ? bases.right : bases.left;
  const CVector& k = right ? momenta.K_right : momenta.K_left;
  const Matrix& g = right ? profile.g_right : profile.g_left;
  const Real z = right ? profile.half_width : -profile.half_width;
  const Complex sign = plus ? Complex(0, 1) : Complex(0, -1);

  const CVector e = phase(k, z, sign);
  FamilyState st;
  st.u = basis.frame.cast<Complex>() * e.asDiagonal();
  st.p = (g * basis.frame).cast<Complex>() *
         (sign * k.array() * e.array()).matrix().asDiagonal();
  return st;
}

FamilyState propagate_state(const MediumProfile& profile, Complex lambda,
                            FamilyState state, Real z_from, Real z_to,
                            Real h) {
  const Real L = profile.half_width;
  if (z_from < -L - 1e-12 || z_from > L + 1e-12 || z_to < -L - 1e-12 ||
      z_to > L + 1e-12)
    throw Error("propagate_state endpoints must lie inside [-Lz, Lz]");
  GridPlan plan = plan_interior(profile, h);
  auto locate = [&](Real z) {
    std::size_t best = 0;
    Real dist = std::abs(plan.nodes[0] - z);
    for (std::size_t i = 1; i < plan.nodes.size(); ++i)
      if (std::abs(plan.nodes[i] - z) < dist) {
        dist = std::abs(plan.nodes[i] - z);
        best = i;
      }
    return best;
  };
  StageSource stages(profile, lambda);
  walk(plan, stages, {&state}, locate(z_from), locate(z_to),
       [](std::size_t) {});
  return state;
}

JostField integrate_jost(const MediumProfile& profile, const EndBases& bases,
                         const SpectralPoint& point, const GridSpec& grid,
                         const Tolerances& tol) {
  require_off_thresholds(bases, point, tol);

  const Real h = resolve_step(profile, point.lambda, grid, tol);
  const Real L = profile.half_width;
  const Real pad = grid.pad >= 0 ? grid.pad : (tol.pad >= 0 ? tol.pad : L / 2);
  GridPlan plan = plan_interior(profile, h);

  const std::size_t n_pad =
      pad > 0 ? static_cast<std::size_t>(std::ceil(pad / h - 1e-12)) : 0;
  if (n_pad > 2'000'000)
    throw IntegratorStep("tail pad " + std::to_string(pad) + " needs " +
                         std::to_string(n_pad) + " nodes at step " +
                         std::to_string(h));

  JostField field;
  field.point = point;
  field.momenta = channel_momenta(bases, point);
  field.bases = bases;

  const std::size_t n_int = plan.nodes.size();
  const std::size_t n_total = n_int + 2 * n_pad;
  field.z.resize(n_total);
  for (std::size_t k = 0; k < n_pad; ++k)
    field.z[k] = -L - pad + pad * static_cast<Real>(k) / n_pad;
  for (std::size_t i = 0; i < n_int; ++i) field.z[n_pad + i] = plan.nodes[i];
  for (std::size_t k = 0; k < n_pad; ++k)
    field.z[n_pad + n_int + k] = L + pad * static_cast<Real>(k + 1) / n_pad;
  field.i_left = n_pad;
  field.i_right = n_pad + n_int - 1;
  field.i_zero = n_pad + plan.i_zero;

  for (auto& fu : field.u) fu.resize(n_total);
  for (auto& fp : field.p) fp.resize(n_total);

  StageSource stages(profile, point.lambda);

  // Interior sweeps: left families ascend, right families descend, each pair
  // sharing the stage evaluations of its pass.
  FamilyState lp = seed_family(profile, bases, field.momenta, JostFamily::LeftPlus);
  FamilyState lm = seed_family(profile, bases, field.momenta, JostFamily::LeftMinus);
  walk(plan, stages, {&lp, &lm}, 0, n_int - 1, [&](std::size_t i) {
    field.u[2][n_pad + i] = lp.u;
    field.p[2][n_pad + i] = lp.p;
    field.u[3][n_pad + i] = lm.u;
    field.p[3][n_pad + i] = lm.p;
  });

  FamilyState rp = seed_family(profile, bases, field.momenta, JostFamily::RightPlus);
  FamilyState rm = seed_family(profile, bases, field.momenta, JostFamily::RightMinus);
  walk(plan, stages, {&rp, &rm}, n_int - 1, 0, [&](std::size_t i) {
    field.u[0][n_pad + i] = rp.u;
    field.p[0][n_pad + i] = rp.p;
    field.u[1][n_pad + i] = rm.u;
    field.p[1][n_pad + i] = rm.p;
  });

  if (n_pad == 0) return field;

  // Tail samples are exact: each family is a combination of the two
  // plane-wave branches of the tail it reaches, with coefficients read off
  // from (u, p) at the boundary via the tail eigenbasis.
  const CMatrix f_l = bases.left.frame.cast<Complex>();
  const CMatrix f_r = bases.right.frame.cast<Complex>();
  const CMatrix gf_l = (profile.g_left * bases.left.frame).cast<Complex>();
  const CMatrix gf_r = (profile.g_right * bases.right.frame).cast<Complex>();
  const CVector& kl = field.momenta.K_left;
  const CVector& kr = field.momenta.K_right;

  for (int fam = 0; fam < 4; ++fam) {
    const bool right_family = fam < 2;
    // Coefficients in the left tail basis: u = f_l (e^{iK-z} A + e^{-iK-z} B).
    {
      const CMatrix& ub = field.u[fam][field.i_left];
      const CMatrix& pb = field.p[fam][field.i_left];
      const CMatrix alpha = gf_l.transpose() * ub;
      const CMatrix beta = f_l.transpose() * pb;
      const CVector ikinv =
          kl.unaryExpr([](Complex k) { return Complex(1) / (I_UNIT * k); });
      CMatrix a_coef = phase(kl, L, I_UNIT).asDiagonal() *
                       (alpha + ikinv.asDiagonal() * beta) / 2;
      CMatrix b_coef = phase(kl, -L, I_UNIT).asDiagonal() *
                       (alpha - ikinv.asDiagonal() * beta) / 2;
      if (!right_family) {
        // Own tail: freeze the exact seed coefficients (identity or zero)
        // instead of round-tripping them through the extraction.
        if (fam == 2) {
          a_coef = CMatrix::Identity(ub.rows(), ub.cols());
          b_coef = CMatrix::Zero(ub.rows(), ub.cols());
        } else {
          a_coef = CMatrix::Zero(ub.rows(), ub.cols());
          b_coef = CMatrix::Identity(ub.rows(), ub.cols());
        }
      }
      const CVector ik = I_UNIT * kl;
      for (std::size_t i = 0; i < field.i_left; ++i) {
        const Real z = field.z[i];
        const CMatrix up = phase(kl, z, I_UNIT).asDiagonal() * a_coef;
        const CMatrix dn = phase(kl, z, -I_UNIT).asDiagonal() * b_coef;
        field.u[fam][i] = f_l * (up + dn);
        field.p[fam][i] = gf_l * (ik.asDiagonal() * (up - dn).eval());
      }
    }
    // Coefficients in the right tail basis.
    {
      const CMatrix& ub = field.u[fam][field.i_right];
      const CMatrix& pb = field.p[fam][field.i_right];
      const CMatrix alpha = gf_r.transpose() * ub;
      const CMatrix beta = f_r.transpose() * pb;
      const CVector ikinv =
          kr.unaryExpr([](Complex k) { return Complex(1) / (I_UNIT * k); });
      CMatrix a_coef = phase(kr, -L, I_UNIT).asDiagonal() *
                       (alpha + ikinv.asDiagonal() * beta) / 2;
      CMatrix b_coef = phase(kr, L, I_UNIT).asDiagonal() *
                       (alpha - ikinv.asDiagonal() * beta) / 2;
      if (right_family) {
        if (fam == 0) {
          a_coef = CMatrix::Identity(ub.rows(), ub.cols());
          b_coef = CMatrix::Zero(ub.rows(), ub.cols());
        } else {
          a_coef = CMatrix::Zero(ub.rows(), ub.cols());
          b_coef = CMatrix::Identity(ub.rows(), ub.cols());
        }
      }
      const CVector ik = I_UNIT * kr;
      for (std::size_t i = field.i_right + 1; i < n_total; ++i) {
        const Real z = field.z[i];
        const CMatrix up = phase(kr, z, I_UNIT).asDiagonal() * a_coef;
        const CMatrix dn = phase(kr, z, -I_UNIT).asDiagonal() * b_coef;
        field.u[fam][i] = f_r * (up + dn);
        field.p[fam][i] = gf_r * (ik.asDiagonal() * (up - dn).eval());
      }
    }
  }
  return field;
}

CMatrix wronskian(const CMatrix& u1, const CMatrix& p1, const CMatrix& u2,
                  const CMatrix& p2) {
  return u1.transpose() * p2 - p1.transpose() * u2;
}

CMatrix wronskian_at(const JostField& field, JostFamily a, JostFamily b,
                     std::size_t node) {
  return wronskian(field.u_at(a, node), field.p_at(a, node),
                   field.u_at(b, node), field.p_at(b, node));
}

Real wronskian_drift(const JostField& field) {
  static constexpr std::pair<JostFamily, JostFamily> pairings[] = {
      {JostFamily::LeftMinus, JostFamily::RightPlus},
      {JostFamily::LeftPlus, JostFamily::RightPlus},
      {JostFamily::LeftPlus, JostFamily::RightMinus},
      {JostFamily::LeftMinus, JostFamily::RightMinus},
  };
  Real worst = 0;
  for (const auto& [a, b] : pairings) {
    const CMatrix ref = wronskian_at(field, a, b, field.i_zero);
    const Real scale = 1 + max_abs(ref);
    for (std::size_t i = 0; i < field.z.size(); ++i) {
      const Real dev = max_abs(wronskian_at(field, a, b, i) - ref) / scale;
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

}  // namespace jostline
