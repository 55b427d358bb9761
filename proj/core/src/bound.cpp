#include "jostline/bound.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jostline/transition.hpp"

namespace jostline {
namespace {

int sign_of(Real x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Least-squares slope of y against x.
Real fit_slope(const std::vector<Real>& x, const std::vector<Real>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0;
  Real mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<Real>(n);
  my /= static_cast<Real>(n);
  Real sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0;
}

// Rotate the global phase so the first entry above the cutoff is real
// positive.
void fix_phase(CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-10) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      return;
    }
}

Real norm_on(const CVector& v, const std::vector<int>& idx) {
  Real s = 0;
  for (int i : idx) s += std::norm(v[i]);
  return std::sqrt(s);
}

// Smallest decay rate among the closed channels the coefficient vector
// actually excites; 0 when no closed channel participates.
Real predicted_kappa(const CVector& coeff, const CVector& k,
                     const std::vector<int>& closed) {
  Real kappa = 0;
  for (int s : closed)
    if (std::abs(coeff[s]) > 1e-8) {
      const Real rate = k[s].imag();
      if (kappa == 0 || rate < kappa) kappa = rate;
    }
  return kappa;
}

struct RefineCtx {
  const MediumProfile& profile;
  const EndBases& bases;
  Real h;

  Complex d(Real lambda) const {
    return bound_determinant(profile, bases, lambda, h);
  }
};

Real bisect_root(const RefineCtx& ctx, Real a, Real b, Real fa, Real tol) {
  int sa = sign_of(fa);
  while (b - a > tol) {
    const Real mid = (a + b) / 2;
    if (mid <= a || mid >= b) break;
    const Real fm = ctx.d(mid).real();
    if (sign_of(fm) == sa)
      a = mid;
    else
      b = mid;
  }
  return (a + b) / 2;
}

Real golden_min(const RefineCtx& ctx, Real a, Real b, Real tol) {
  constexpr Real inv_phi = 0.6180339887498949;
  Real x1 = b - inv_phi * (b - a);
  Real x2 = a + inv_phi * (b - a);
  Real f1 = std::abs(ctx.d(x1));
  Real f2 = std::abs(ctx.d(x2));
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = std::abs(ctx.d(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = std::abs(ctx.d(x2));
    }
  }
  return (a + b) / 2;
}

}  // namespace

Complex bound_determinant(const MediumProfile& profile, const EndBases& bases,
                          Real lambda, Real h) {
  const SpectralPoint point =
      SpectralPoint::physical(lambda, profile.channels);
  const ChannelMomenta momenta = channel_momenta(bases, point);
  FamilyState rp =
      seed_family(profile, bases, momenta, JostFamily::RightPlus);
  FamilyState lm =
      seed_family(profile, bases, momenta, JostFamily::LeftMinus);
  const Real L = profile.half_width;
  rp = propagate_state(profile, point.lambda, std::move(rp), L, 0, h);
  lm = propagate_state(profile, point.lambda, std::move(lm), -L, 0, h);
  return wronskian(lm.u, lm.p, rp.u, rp.p).determinant();
}

BoundScan bound_state_scan(const MediumProfile& profile, const EndBases& bases,
                           Real lambda_lo, Real lambda_hi, int n_per_unit,
                           const GridSpec& grid, const Tolerances& tol) {
  if (!(lambda_lo < lambda_hi))
    throw Error("bound scan window is empty: lambda_lo must be below "
                "lambda_hi");

  BoundScan scan;
  // One step for the whole window keeps the integration grid, and hence
  // D(lambda), free of node-count jumps that would fake sign structure.
  const Real h = std::min(
      resolve_step(profile, Complex(lambda_lo, 0), grid, tol),
      resolve_step(profile, Complex(lambda_hi, 0), grid, tol));
  const RefineCtx ctx{profile, bases, h};

  std::vector<Real> edges{lambda_lo};
  for (const Vector* th : {&bases.left.thresholds, &bases.right.thresholds})
    for (Eigen::Index s = 0; s < th->size(); ++s)
      if ((*th)[s] > lambda_lo && (*th)[s] < lambda_hi)
        edges.push_back((*th)[s]);
  edges.push_back(lambda_hi);
  std::sort(edges.begin(), edges.end());

  const Real margin = 10 * tol.threshold_tol(std::max(std::abs(lambda_lo),
                                                      std::abs(lambda_hi)));
  const Real density = n_per_unit > 0 ? n_per_unit : tol.n_scan;
  const Real refine = std::max(tol.refine_tol, Real(1e-15));

  std::vector<Real> roots;

  for (std::size_t piece = 0; piece + 1 < edges.size(); ++piece) {
    const Real a = edges[piece] + (piece > 0 ? margin : 0);
    const Real b =
        edges[piece + 1] - (piece + 2 < edges.size() ? margin : 0);
    if (b <= a) continue;

    const ChannelClassification cls =
        classify_channels(bases, (a + b) / 2, tol);
    if (cls.all_open()) {
      std::ostringstream os;
      os << "all channels open on [" << a << ", " << b
         << "]: no bound states possible";
      scan.notices.push_back(os.str());
      continue;
    }

    const int n_nodes =
        std::max(5, static_cast<int>(std::ceil(density * (b - a))) + 1);
    std::vector<Real> xs(static_cast<std::size_t>(n_nodes));
    std::vector<Complex> ds(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
      xs[static_cast<std::size_t>(i)] =
          a + (b - a) * i / (n_nodes - 1);
      ds[static_cast<std::size_t>(i)] =
          ctx.d(xs[static_cast<std::size_t>(i)]);
      scan.trace.push_back(
          {xs[static_cast<std::size_t>(i)], ds[static_cast<std::size_t>(i)]});
    }

    if (cls.all_closed()) {
      // D is real here; bracket sign changes, then probe the cells around
      // sign-preserving |D| dips for roots hiding in pairs.
      std::vector<bool> has_change(static_cast<std::size_t>(n_nodes - 1),
                                   false);
      for (int i = 0; i + 1 < n_nodes; ++i) {
        const Real fa = ds[static_cast<std::size_t>(i)].real();
        const Real fb = ds[static_cast<std::size_t>(i + 1)].real();
        if (sign_of(fa) == 0) {
          roots.push_back(xs[static_cast<std::size_t>(i)]);
          continue;
        }
        if (sign_of(fa) * sign_of(fb) < 0) {
          has_change[static_cast<std::size_t>(i)] = true;
          roots.push_back(bisect_root(
              ctx, xs[static_cast<std::size_t>(i)],
              xs[static_cast<std::size_t>(i + 1)], fa, refine));
        }
      }
      for (int i = 1; i + 1 < n_nodes; ++i) {
        const Real am = std::abs(ds[static_cast<std::size_t>(i - 1)]);
        const Real ac = std::abs(ds[static_cast<std::size_t>(i)]);
        const Real ap = std::abs(ds[static_cast<std::size_t>(i + 1)]);
        const bool is_min = ac <= am && ac <= ap && (ac < am || ac < ap);
        const bool near_change =
            has_change[static_cast<std::size_t>(i - 1)] ||
            has_change[static_cast<std::size_t>(i)];
        if (!is_min || near_change) continue;
        for (int cell : {i - 1, i}) {
          const Real xa = xs[static_cast<std::size_t>(cell)];
          const Real xb = xs[static_cast<std::size_t>(cell + 1)];
          const Real fa = ds[static_cast<std::size_t>(cell)].real();
          const Real fm = ctx.d((xa + xb) / 2).real();
          if (sign_of(fa) * sign_of(fm) < 0) {
            std::ostringstream os;
            os << "scan too coarse near lambda = " << (xa + xb) / 2
               << ": two sign changes inside one cell";
            scan.notices.push_back(os.str());
            roots.push_back(
                bisect_root(ctx, xa, (xa + xb) / 2, fa, refine));
            roots.push_back(
                bisect_root(ctx, (xa + xb) / 2, xb, fm, refine));
          }
        }
      }
    } else {
      std::vector<Real> mags;
      mags.reserve(ds.size());
      for (const Complex& d : ds) mags.push_back(std::abs(d));
      std::vector<Real> sorted = mags;
      std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                       sorted.end());
      const Real accept =
          tol.det_accept_scale * sorted[sorted.size() / 2];

      for (int i = 1; i + 1 < n_nodes; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        const bool is_min = mags[k] <= mags[k - 1] && mags[k] <= mags[k + 1] &&
                            (mags[k] < mags[k - 1] || mags[k] < mags[k + 1]);
        if (!is_min) continue;
        const Real x =
            golden_min(ctx, xs[k - 1], xs[k + 1], refine);
        if (std::abs(ctx.d(x)) <= accept) roots.push_back(x);
      }
    }
  }

  std::sort(roots.begin(), roots.end());
  const Real dedupe = std::max(1000 * refine, Real(1e-11));
  std::vector<Real> unique_roots;
  for (Real r : roots)
    if (unique_roots.empty() || r - unique_roots.back() > dedupe)
      unique_roots.push_back(r);

  for (Real r : unique_roots) {
    BoundState bs = make_bound_state(profile, bases, r, grid, tol);
    const Real gate = tol.null_tol;
    if (bs.null_residual_v > gate || bs.null_residual_w > gate) {
      std::ostringstream os;
      os << "candidate at lambda = " << r
         << " rejected: null residuals " << bs.null_residual_v << ", "
         << bs.null_residual_w << " exceed " << gate;
      scan.notices.push_back(os.str());
      continue;
    }
    scan.states.push_back(std::move(bs));
  }
  return scan;
}

BoundState make_bound_state(const MediumProfile& profile,
                            const EndBases& bases, Real lambda_b,
                            const GridSpec& grid, const Tolerances& tol) {
  GridSpec wide = grid;
  if (wide.pad < 0 && tol.pad < 0) wide.pad = profile.half_width;
  const SpectralPoint point =
      SpectralPoint::physical(lambda_b, profile.channels);
  const JostField field = integrate_jost(profile, bases, point, wide, tol);
  const TransitionSet ts = transition_matrices(field);
  const ChannelClassification cls = classify_channels(bases, lambda_b, tol);
  const int n = profile.channels;

  BoundState bs;
  bs.lambda_b = lambda_b;

  Eigen::JacobiSVD<CMatrix> svd(
      ts.phi_plus, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  bs.v = svd.matrixV().col(n - 1);
  bs.w = svd.matrixU().col(n - 1).conjugate();
  fix_phase(bs.v);
  fix_phase(bs.w);
  bs.multiple = n >= 2 && sv(n - 2) <= tol.null_tol * std::max(Real(1), sv(0));
  if (bs.multiple) {
    bs.v2 = svd.matrixV().col(n - 2);
    bs.w2 = svd.matrixU().col(n - 2).conjugate();
    fix_phase(bs.v2);
    fix_phase(bs.w2);
  }

  bs.det_residual = std::abs(ts.phi_plus.determinant());
  bs.null_residual_v = (ts.phi_plus * bs.v).norm();
  bs.null_residual_w = (ts.phi_plus.transpose() * bs.w).norm();
  bs.open_norm_v = norm_on(bs.v, cls.open_right);
  bs.open_norm_w = norm_on(bs.w, cls.open_left);

  Real threshold_gap = std::numeric_limits<Real>::max();
  for (const Vector* th : {&bases.left.thresholds, &bases.right.thresholds})
    for (Eigen::Index s = 0; s < th->size(); ++s)
      threshold_gap = std::min(threshold_gap, std::abs((*th)[s] - lambda_b));
  bs.near_threshold =
      threshold_gap <= 10 * tol.threshold_tol(std::abs(lambda_b));

  const CVector& kl = ts.momenta.K_left;
  const CVector lhs = kl.asDiagonal() * (ts.psi_plus * bs.v).eval();
  bs.pairing_scale = (bs.w.adjoint() * lhs).value();
  bs.pairing_residual = (lhs - bs.pairing_scale * bs.w).norm() /
                        (1 + std::abs(bs.pairing_scale));

  // The bound solution two ways: F right,+ v directly, and through the left
  // family as F left,- K-^-1 c w.
  const CVector kw =
      bs.pairing_scale * (bs.w.array() / kl.array()).matrix();
  const std::size_t m = field.z.size();
  bs.z.assign(field.z.begin(), field.z.end());
  bs.wave_u.resize(m);
  bs.wave_p.resize(m);
  Real defect = 0, scale = 0;
  for (std::size_t i = 0; i < m; ++i) {
    bs.wave_u[i] = field.u_at(JostFamily::RightPlus, i) * bs.v;
    bs.wave_p[i] = field.p_at(JostFamily::RightPlus, i) * bs.v;
    const CVector ou = field.u_at(JostFamily::LeftMinus, i) * kw;
    const CVector op = field.p_at(JostFamily::LeftMinus, i) * kw;
    defect = std::max({defect, (bs.wave_u[i] - ou).cwiseAbs().maxCoeff(),
                       (bs.wave_p[i] - op).cwiseAbs().maxCoeff()});
    scale = std::max({scale, bs.wave_u[i].cwiseAbs().maxCoeff(),
                      bs.wave_p[i].cwiseAbs().maxCoeff()});
  }
  bs.expansion_residual = defect / (1 + scale);

  bs.kappa_left = predicted_kappa(bs.w, kl, cls.closed_left);
  bs.kappa_right =
      predicted_kappa(bs.v, ts.momenta.K_right, cls.closed_right);

  // Fit the decay over a window next to the matching boundary; far tail
  // samples are dominated by the exponentially amplified remnant of the
  // nominally vanishing branch and would bias the slope.
  const Real L = profile.half_width;
  auto collect = [&](Real z_lo, Real z_hi) {
    std::vector<Real> zz, ln;
    for (std::size_t i = 0; i < m; ++i)
      if (field.z[i] >= z_lo && field.z[i] <= z_hi) {
        const Real nrm = bs.wave_u[i].norm();
        if (nrm > 1e-290) {
          zz.push_back(field.z[i]);
          ln.push_back(std::log(nrm));
        }
      }
    return fit_slope(zz, ln);
  };
  if (bs.kappa_left > 0) {
    const Real window = std::min(field.z[field.i_left] - field.z.front(),
                                 5 / bs.kappa_left);
    bs.decay_left = collect(-L - window, -L);
  }
  if (bs.kappa_right > 0) {
    const Real window = std::min(field.z.back() - field.z[field.i_right],
                                 5 / bs.kappa_right);
    bs.decay_right = -collect(L, L + window);
  }
  return bs;
}

std::vector<ResidualRecord> verify_bound_state(const BoundState& bs,
                                               const MediumProfile& profile,
                                               const EndBases& bases,
                                               const GridSpec& grid,
                                               const Tolerances& tol) {
  const BoundState fresh =
      make_bound_state(profile, bases, bs.lambda_b, grid, tol);

  std::vector<ResidualRecord> out;
  out.push_back({"det", fresh.det_residual});
  out.push_back({"null_v", fresh.null_residual_v});
  out.push_back({"null_w", fresh.null_residual_w});
  out.push_back({"open_v", fresh.open_norm_v});
  out.push_back({"open_w", fresh.open_norm_w});
  out.push_back({"pairing", fresh.pairing_residual});
  out.push_back({"expansion", fresh.expansion_residual});

  // Five-point first derivatives of (u, p) against the first-order system,
  // on uniform windows clear of layer boundaries and sample kinks.
  std::vector<Real> breaks{-profile.half_width, profile.half_width};
  for (const auto& layer : profile.layers) {
    breaks.push_back(layer.z_lo);
    breaks.push_back(layer.z_hi);
    if (layer.kind == LayerKind::Sampled)
      for (const auto& node : layer.nodes) breaks.push_back(node.z);
  }

  Real ode_u = 0, ode_p = 0, amp = 0;
  const std::size_t m = fresh.z.size();
  for (std::size_t i = 0; i < m; ++i)
    amp = std::max({amp, fresh.wave_u[i].cwiseAbs().maxCoeff(),
                    fresh.wave_p[i].cwiseAbs().maxCoeff()});
  Matrix g, v;
  for (std::size_t i = 2; i + 2 < m; ++i) {
    const Real h = fresh.z[i + 1] - fresh.z[i];
    bool uniform = h > 0;
    for (int k = -2; k <= 1 && uniform; ++k)
      uniform = std::abs(fresh.z[i + static_cast<std::size_t>(k + 1)] -
                         fresh.z[i + static_cast<std::size_t>(k)] - h) <
                1e-9 * h;
    if (!uniform) continue;
    bool clear = true;
    for (Real b : breaks)
      if (std::abs(fresh.z[i] - b) <= 2.5 * h) {
        clear = false;
        break;
      }
    if (!clear) continue;

    const CVector du = (-fresh.wave_u[i + 2] + 8 * fresh.wave_u[i + 1] -
                        8 * fresh.wave_u[i - 1] + fresh.wave_u[i - 2]) /
                       (12 * h);
    const CVector dp = (-fresh.wave_p[i + 2] + 8 * fresh.wave_p[i + 1] -
                        8 * fresh.wave_p[i - 1] + fresh.wave_p[i - 2]) /
                       (12 * h);
    sample_medium(profile, fresh.z[i], g, v);
    Eigen::LLT<Matrix> llt(g);
    CVector ginv_p(g.rows());
    ginv_p.real() = llt.solve(fresh.wave_p[i].real().eval());
    ginv_p.imag() = llt.solve(fresh.wave_p[i].imag().eval());
    const CMatrix a =
        Complex(fresh.lambda_b, 0) * g.cast<Complex>() - v.cast<Complex>();
    ode_u = std::max(ode_u, (du - ginv_p).cwiseAbs().maxCoeff());
    ode_p = std::max(ode_p, (dp - a * fresh.wave_u[i]).cwiseAbs().maxCoeff());
  }
  out.push_back({"ode_u", ode_u / (1 + amp)});
  out.push_back({"ode_p", ode_p / (1 + amp)});

  const Real gap_l = fresh.kappa_left > 0
                         ? std::abs(fresh.decay_left - fresh.kappa_left) /
                               fresh.kappa_left
                         : 0;
  const Real gap_r = fresh.kappa_right > 0
                         ? std::abs(fresh.decay_right - fresh.kappa_right) /
                               fresh.kappa_right
                         : 0;
  out.push_back({"decay_left_gap", gap_l});
  out.push_back({"decay_right_gap", gap_r});
  return out;
}

}  // namespace jostline
