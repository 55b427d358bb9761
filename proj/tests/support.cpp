#include "support.hpp"

#include <jostline/medium.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jostline::testing {

namespace {

Matrix scalar1(Real v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

Layer constant_layer(Real lo, Real hi, Matrix g, Matrix v) {
  Layer l;
  l.kind = LayerKind::Constant;
  l.z_lo = lo;
  l.z_hi = hi;
  l.g = std::move(g);
  l.v = std::move(v);
  return l;
}

Matrix random_orthogonal(Rng& rng, int n) {
  std::normal_distribution<Real> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ();
  return q;
}

Matrix random_spd(Rng& rng, int n, Real eig_lo, Real eig_hi) {
  std::uniform_real_distribution<Real> u(eig_lo, eig_hi);
  Vector eigs(n);
  for (int i = 0; i < n; ++i) eigs(i) = u(rng);
  Matrix q = random_orthogonal(rng, n);
  return q * eigs.asDiagonal() * q.transpose();
}

Matrix random_symmetric(Rng& rng, int n, Real lo, Real hi) {
  std::uniform_real_distribution<Real> u(lo, hi);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  return Matrix((a + a.transpose()) / 2);
}

Matrix spd_sqrt(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  return es.operatorSqrt();
}

// Symmetric tail matrix whose generalized eigenvalues against g are exactly
// the prescribed thresholds: V = g^{1/2} Q diag(t) Q^T g^{1/2}.
Matrix tail_with_thresholds(Rng& rng, const Matrix& g, const Vector& t) {
  const int n = static_cast<int>(t.size());
  Matrix q = random_orthogonal(rng, n);
  Matrix s = spd_sqrt(g);
  return s * q * t.asDiagonal() * q.transpose() * s;
}

std::pair<Vector, Vector> side_thresholds(const MediumProfile& profile) {
  EndBases bases = diagonalize_ends(profile);
  return {bases.left.thresholds, bases.right.thresholds};
}

}  // namespace

MediumProfile uniform_profile(Real v, Real half) {
  return scalar_layer(v, v, half);
}

MediumProfile scalar_layer(Real v_tail, Real v_layer, Real half) {
  MediumProfile p;
  p.channels = 1;
  p.half_width = half;
  p.g_left = p.g_right = scalar1(1.0);
  p.v_left = p.v_right = scalar1(v_tail);
  p.layers.push_back(
      constant_layer(-half, half, scalar1(1.0), scalar1(v_layer)));
  return p;
}

MediumProfile scalar_step(Real v_left, Real v_right, Real half) {
  MediumProfile p;
  p.channels = 1;
  p.half_width = half;
  p.g_left = p.g_right = scalar1(1.0);
  p.v_left = scalar1(v_left);
  p.v_right = scalar1(v_right);
  p.layers.push_back(constant_layer(-half, 0.0, scalar1(1.0), scalar1(v_left)));
  p.layers.push_back(constant_layer(0.0, half, scalar1(1.0), scalar1(v_right)));
  return p;
}

MediumProfile square_well(Real v0, Real v_tail, Real half) {
  return scalar_layer(v_tail, v_tail + v0, half);
}

MediumProfile decoupled_two_channel_wells(Real v0a, Real v0b, Real t0, Real t1,
                                          Real half) {
  MediumProfile p;
  p.channels = 2;
  p.half_width = half;
  p.g_left = p.g_right = Matrix::Identity(2, 2);
  Matrix tails = Vector{{t0, t1}}.asDiagonal();
  p.v_left = p.v_right = tails;
  Matrix inner = Vector{{t0 + v0a, t1 + v0b}}.asDiagonal();
  p.layers.push_back(constant_layer(-half, half, Matrix::Identity(2, 2), inner));
  return p;
}

MediumProfile mixed_two_channel(Real half) {
  MediumProfile p;
  p.channels = 2;
  p.half_width = half;
  p.g_left = p.g_right = Matrix::Identity(2, 2);
  p.v_left = Matrix{{0.0, 0.3}, {0.3, 2.0}};
  p.v_right = Matrix{{0.5, -0.2}, {-0.2, 3.0}};
  p.layers.push_back(constant_layer(-half, 0.4 * half,
                                    Matrix{{1.2, 0.1}, {0.1, 0.9}},
                                    Matrix{{1.0, -0.5}, {-0.5, 0.2}}));
  p.layers.push_back(constant_layer(0.4 * half, half,
                                    Matrix{{0.8, -0.05}, {-0.05, 1.1}},
                                    Matrix{{0.2, 0.4}, {0.4, 2.5}}));
  return p;
}

MediumProfile smooth_rotating_profile(int nodes, Real half) {
  MediumProfile p;
  p.channels = 2;
  p.half_width = half;
  p.g_left = p.g_right = Matrix::Identity(2, 2);
  p.v_left = p.v_right = Vector{{0.3, 1.1}}.asDiagonal();

  Layer l;
  l.kind = LayerKind::Sampled;
  l.z_lo = -half;
  l.z_hi = half;
  l.nodes.reserve(nodes);
  const Real pi = std::acos(Real(-1));
  for (int i = 0; i < nodes; ++i) {
    const Real z = -half + 2 * half * Real(i) / Real(nodes - 1);
    const Real x = z / half;
    const Real c2 = std::cos(pi * x / 2) * std::cos(pi * x / 2);
    const Real lam1 = 0.3 + 0.25 * c2;
    const Real lam2 = 1.1 - 0.2 * c2;
    const Real th = 0.9 * std::sin(pi * x) * c2;
    const Real c = std::cos(th), s = std::sin(th);
    Matrix r{{c, -s}, {s, c}};
    LayerNode nd;
    nd.z = z;
    nd.g = Matrix::Identity(2, 2);
    nd.v = r * Vector{{lam1, lam2}}.asDiagonal() * r.transpose();
    l.nodes.push_back(std::move(nd));
  }
  p.layers.push_back(std::move(l));
  return p;
}

MediumProfile smooth_graded_profile(int nodes, Real half) {
  const Real pi = std::acos(Real(-1));
  const Real c = std::cos(0.6), s = std::sin(0.6);
  const Matrix q{{c, -s}, {s, c}};

  MediumProfile p;
  p.channels = 2;
  p.half_width = half;
  p.g_left = p.g_right = Matrix::Identity(2, 2);
  p.v_left = p.v_right =
      Matrix(q * Vector{{0.3, 1.1}}.asDiagonal() * q.transpose());

  Layer l;
  l.kind = LayerKind::Sampled;
  l.z_lo = -half;
  l.z_hi = half;
  l.nodes.reserve(nodes);
  for (int i = 0; i < nodes; ++i) {
    const Real z = -half + 2 * half * Real(i) / Real(nodes - 1);
    const Real c2 = std::cos(pi * z / (2 * half));
    const Real cc = c2 * c2;
    LayerNode nd;
    nd.z = z;
    nd.g = Matrix::Identity(2, 2);
    nd.v = q * Vector{{0.3 + 0.25 * cc, 1.1 - 0.2 * cc}}.asDiagonal() *
           q.transpose();
    l.nodes.push_back(std::move(nd));
  }
  p.layers.push_back(std::move(l));
  return p;
}

MediumProfile random_profile(Rng& rng, const RandomProfileOptions& opt) {
  const int n = opt.channels;
  std::uniform_real_distribution<Real> u01(0.0, 1.0);
  std::uniform_real_distribution<Real> gap(0.6, 1.4);
  std::uniform_real_distribution<Real> jitter(-0.12, 0.12);

  Vector base(n);
  base(0) = -0.5 + u01(rng);
  for (int k = 1; k < n; ++k) base(k) = base(k - 1) + gap(rng);
  Vector t_left(n), t_right(n);
  for (int k = 0; k < n; ++k) {
    t_left(k) = base(k) + jitter(rng);
    t_right(k) = base(k) + jitter(rng);
  }

  MediumProfile p;
  p.channels = n;
  p.half_width = opt.half;
  p.g_left = random_spd(rng, n, 0.6, 1.6);
  p.g_right = random_spd(rng, n, 0.6, 1.6);
  p.v_left = tail_with_thresholds(rng, p.g_left, t_left);
  p.v_right = tail_with_thresholds(rng, p.g_right, t_right);

  const int m = 1 + static_cast<int>(rng() % std::uint64_t(opt.max_layers));
  std::vector<Real> cuts{-opt.half};
  std::uniform_real_distribution<Real> interior(-opt.half + 0.08,
                                                opt.half - 0.08);
  for (int attempt = 0; attempt < 64 && static_cast<int>(cuts.size()) < m;
       ++attempt) {
    std::vector<Real> trial = cuts;
    for (int k = static_cast<int>(cuts.size()); k < m; ++k)
      trial.push_back(interior(rng));
    trial.push_back(opt.half);
    std::sort(trial.begin(), trial.end());
    bool spaced = true;
    for (std::size_t k = 1; k < trial.size(); ++k)
      spaced = spaced && trial[k] - trial[k - 1] >= 0.08;
    if (spaced) {
      trial.pop_back();
      cuts = std::move(trial);
    }
  }
  if (static_cast<int>(cuts.size()) < m) {
    cuts.assign(1, -opt.half);
    for (int k = 1; k < m; ++k)
      cuts.push_back(-opt.half + 2 * opt.half * Real(k) / Real(m));
  }
  cuts.push_back(opt.half);

  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Matrix g = random_spd(rng, n, 0.7, 1.5);
    Matrix v = random_symmetric(rng, n, -1.5, 1.5);
    p.layers.push_back(constant_layer(cuts[k], cuts[k + 1], std::move(g),
                                      std::move(v)));
  }
  return p;
}

MediumProfile random_profile(Rng& rng, int ch_lo, int ch_hi) {
  RandomProfileOptions opt;
  opt.channels =
      ch_lo + static_cast<int>(rng() % std::uint64_t(ch_hi - ch_lo + 1));
  return random_profile(rng, opt);
}

Real pick_all_open(Rng& rng, const MediumProfile& profile) {
  auto [tl, tr] = side_thresholds(profile);
  const Real t_min = std::min(tl.minCoeff(), tr.minCoeff());
  const Real t_max = std::max(tl.maxCoeff(), tr.maxCoeff());
  const Real span = std::max(t_max - t_min, Real(1));
  std::uniform_real_distribution<Real> u(0.3, 2.0);
  return t_min - u(rng) * span;
}

Real pick_all_closed(Rng& rng, const MediumProfile& profile) {
  auto [tl, tr] = side_thresholds(profile);
  const Real t_min = std::min(tl.minCoeff(), tr.minCoeff());
  const Real t_max = std::max(tl.maxCoeff(), tr.maxCoeff());
  const Real span = std::max(t_max - t_min, Real(1));
  std::uniform_real_distribution<Real> u(0.3, 1.2);
  return t_max + u(rng) * span;
}

Real pick_in_gap(Rng& rng, const MediumProfile& profile, int gap) {
  auto [tl, tr] = side_thresholds(profile);
  const Real lo = std::max(tl(gap), tr(gap)) + 0.15;
  const Real hi = std::min(tl(gap + 1), tr(gap + 1)) - 0.15;
  if (!(hi > lo))
    throw std::logic_error("test profile gap too narrow for a spectral point");
  std::uniform_real_distribution<Real> u(lo, hi);
  return u(rng);
}

Real pick_mixed(Rng& rng, const MediumProfile& profile) {
  const int gaps = usable_gaps(profile);
  if (gaps <= 0)
    throw std::logic_error("test profile has no usable interior gap");
  const int g = static_cast<int>(rng() % std::uint64_t(gaps));
  return pick_in_gap(rng, profile, g);
}

int usable_gaps(const MediumProfile& profile) {
  auto [tl, tr] = side_thresholds(profile);
  int count = 0;
  for (int gidx = 0; gidx + 1 < tl.size(); ++gidx) {
    const Real width =
        std::min(tl(gidx + 1), tr(gidx + 1)) - std::max(tl(gidx), tr(gidx));
    if (width > 0.34) ++count;
  }
  return count;
}

std::vector<Real> square_well_levels(Real v0, Real v_tail, Real half) {
  auto even = [&](Real e) {
    const Real q = std::sqrt(v0 - e), k = std::sqrt(e);
    return q * std::sin(q * half) - k * std::cos(q * half);
  };
  auto odd = [&](Real e) {
    const Real q = std::sqrt(v0 - e), k = std::sqrt(e);
    return q * std::cos(q * half) + k * std::sin(q * half);
  };
  auto bisect = [](auto f, Real a, Real b) {
    Real fa = f(a);
    for (int it = 0; it < 200 && b - a > 1e-14 * (1 + std::abs(a)); ++it) {
      const Real m = (a + b) / 2, fm = f(m);
      if ((fa < 0) == (fm < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return (a + b) / 2;
  };

  std::vector<Real> levels;
  const int n_grid = std::max(2000, static_cast<int>(4000 * v0));
  for (int parity = 0; parity < 2; ++parity) {
    auto f = [&](Real e) { return parity == 0 ? even(e) : odd(e); };
    Real e_prev = 1e-9 * v0;
    Real f_prev = f(e_prev);
    for (int i = 1; i <= n_grid; ++i) {
      const Real e = v0 * (1e-9 + (1 - 2e-9) * Real(i) / Real(n_grid));
      const Real fe = f(e);
      if ((f_prev < 0) != (fe < 0))
        levels.push_back(v_tail + bisect(f, e_prev, e));
      e_prev = e;
      f_prev = fe;
    }
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

Pipeline run_pipeline(const MediumProfile& profile, Real lambda,
                      const GridSpec& grid, const Tolerances& tol) {
  Pipeline out;
  out.bases = diagonalize_ends(profile, tol);
  out.cls = classify_channels(out.bases, lambda, tol);
  out.field = integrate_jost(profile, out.bases,
                             SpectralPoint::physical(lambda, profile.channels),
                             grid, tol);
  out.ts = transition_matrices(out.field);
  out.ss = scattering_matrices(out.ts, out.cls, tol);
  return out;
}

Real same_side_wronskian_residual(const JostField& field) {
  const int n = field.channels();
  Real worst = 0;
  for (int side = 0; side < 2; ++side) {
    const JostFamily fp =
        side == 0 ? JostFamily::RightPlus : JostFamily::LeftPlus;
    const JostFamily fm =
        side == 0 ? JostFamily::RightMinus : JostFamily::LeftMinus;
    const CVector& kk = side == 0 ? field.momenta.K_right : field.momenta.K_left;
    CMatrix expect = CMatrix::Zero(n, n);
    for (int s = 0; s < n; ++s) expect(s, s) = Complex(0, -2) * kk(s);
    for (std::size_t i = 0; i < field.z.size(); ++i) {
      const CMatrix& up = field.u_at(fp, i);
      const CMatrix& pp = field.p_at(fp, i);
      const CMatrix& um = field.u_at(fm, i);
      const CMatrix& pm = field.p_at(fm, i);
      const Real mu_p = up.cwiseAbs().maxCoeff() * pp.cwiseAbs().maxCoeff();
      const Real mu_m = um.cwiseAbs().maxCoeff() * pm.cwiseAbs().maxCoeff();
      const Real mu_x = up.cwiseAbs().maxCoeff() * pm.cwiseAbs().maxCoeff();
      const Real scale = 1 + std::max({mu_p, mu_m, mu_x});
      worst = std::max(
          worst, wronskian(up, pp, up, pp).cwiseAbs().maxCoeff() / scale);
      worst = std::max(
          worst, wronskian(um, pm, um, pm).cwiseAbs().maxCoeff() / scale);
      worst = std::max(worst, (wronskian(up, pp, um, pm) - expect)
                                  .cwiseAbs()
                                  .maxCoeff() /
                                  scale);
    }
  }
  return worst;
}

Real max_record(const std::vector<ResidualRecord>& records) {
  Real m = 0;
  for (const auto& r : records) m = std::max(m, r.value);
  return m;
}

Real record_named(const std::vector<ResidualRecord>& records,
                  const std::string& name) {
  for (const auto& r : records)
    if (r.name == name) return r.value;
  throw std::logic_error("no residual record named " + name);
}

}  // namespace jostline::testing
