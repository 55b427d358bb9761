#include "jostline/transition.hpp"

#include <algorithm>
#include <cmath>

namespace jostline {
namespace {

Real max_abs(const CMatrix& m) {
  return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

// diag(scale / K-) * m, rowwise.
CMatrix row_scaled(const CVector& k_left, Complex scale, const CMatrix& m) {
  CVector pref = k_left.unaryExpr([scale](Complex k) { return scale / k; });
  return pref.asDiagonal() * m;
}

}  // namespace

TransitionSet transition_matrices(const JostField& field) {
  const std::size_t i0 = field.i_zero;
  const CVector& kl = field.momenta.K_left;
  const Complex half_i = Complex(1) / (2.0 * I_UNIT);

  TransitionSet ts;
  ts.point = field.point;
  ts.momenta = field.momenta;
  ts.phi_plus = row_scaled(
      kl, half_i,
      wronskian_at(field, JostFamily::LeftMinus, JostFamily::RightPlus, i0));
  ts.psi_plus = row_scaled(
      kl, -half_i,
      wronskian_at(field, JostFamily::LeftPlus, JostFamily::RightPlus, i0));
  ts.phi_minus = row_scaled(
      kl, -half_i,
      wronskian_at(field, JostFamily::LeftPlus, JostFamily::RightMinus, i0));
  ts.psi_minus = row_scaled(
      kl, half_i,
      wronskian_at(field, JostFamily::LeftMinus, JostFamily::RightMinus, i0));

  Real scale = 0;
  Real defect = 0;
  for (std::size_t i = 0; i < field.z.size(); ++i) {
    const CMatrix& lu = field.u_at(JostFamily::LeftPlus, i);
    const CMatrix& lmu = field.u_at(JostFamily::LeftMinus, i);
    const CMatrix& lp = field.p_at(JostFamily::LeftPlus, i);
    const CMatrix& lmp = field.p_at(JostFamily::LeftMinus, i);
    const CMatrix& rpu = field.u_at(JostFamily::RightPlus, i);
    const CMatrix& rpp = field.p_at(JostFamily::RightPlus, i);
    const CMatrix& rmu = field.u_at(JostFamily::RightMinus, i);
    const CMatrix& rmp = field.p_at(JostFamily::RightMinus, i);

    defect = std::max(defect, max_abs(lu * ts.phi_plus + lmu * ts.psi_plus - rpu));
    defect = std::max(defect, max_abs(lp * ts.phi_plus + lmp * ts.psi_plus - rpp));
    defect = std::max(defect, max_abs(lu * ts.psi_minus + lmu * ts.phi_minus - rmu));
    defect = std::max(defect, max_abs(lp * ts.psi_minus + lmp * ts.phi_minus - rmp));
    scale = std::max({scale, max_abs(rpu), max_abs(rpp), max_abs(rmu), max_abs(rmp)});
  }
  ts.expansion_residual = defect / (1 + scale);
  return ts;
}

std::vector<ResidualRecord> bilinear_residuals(const TransitionSet& ts) {
  const int n = ts.channels();
  const CMatrix kl = CMatrix(ts.momenta.K_left.asDiagonal());
  const CVector kp_inv_v = ts.momenta.K_right.unaryExpr(
      [](Complex k) { return Complex(1) / k; });
  const CMatrix kp = CMatrix(ts.momenta.K_right.asDiagonal());
  const CMatrix kp_inv = CMatrix(kp_inv_v.asDiagonal());
  const CMatrix kl_inv =
      CMatrix(ts.momenta.K_left
                  .unaryExpr([](Complex k) { return Complex(1) / k; })
                  .asDiagonal());
  const CMatrix zero = CMatrix::Zero(n, n);

  const CMatrix& fp = ts.phi_plus;
  const CMatrix& fm = ts.phi_minus;
  const CMatrix& sp = ts.psi_plus;
  const CMatrix& sm = ts.psi_minus;

  auto entry = [](const char* name, const CMatrix& a, const CMatrix& b,
                  const CMatrix& rhs) {
    const Real scale =
        1 + std::max({max_abs(a), max_abs(b), max_abs(rhs)});
    return ResidualRecord{name, max_abs(a - b - rhs) / scale};
  };

  std::vector<ResidualRecord> out;
  out.push_back(entry("bilinear_left_plus_plus", fp.transpose() * kl * sp,
                      sp.transpose() * kl * fp, zero));
  out.push_back(entry("bilinear_left_plus_minus", fp.transpose() * kl * fm,
                      sp.transpose() * kl * sm, kp));
  out.push_back(entry("bilinear_left_minus_minus", fm.transpose() * kl * sm,
                      sm.transpose() * kl * fm, zero));
  out.push_back(entry("bilinear_right_plus_minus", fp * kp_inv * sm.transpose(),
                      sm * kp_inv * fp.transpose(), zero));
  out.push_back(entry("bilinear_right_plus_plus", fp * kp_inv * fm.transpose(),
                      sm * kp_inv * sp.transpose(), kl_inv));
  out.push_back(entry("bilinear_right_minus_plus", fm * kp_inv * sp.transpose(),
                      sp * kp_inv * fm.transpose(), zero));
  return out;
}

Real conjugation_residual(const TransitionSet& ts,
                          const ChannelClassification& cls) {
  const int n = ts.channels();
  std::vector<bool> flip_left(n, false), flip_right(n, false);
  for (int s : cls.open_left) flip_left[static_cast<std::size_t>(s)] = true;
  for (int s : cls.open_right) flip_right[static_cast<std::size_t>(s)] = true;

  // m[a][b]: coefficient of F left,(a) inside F right,(b), labels 0 = +,
  // 1 = -. Conjugation flips a label exactly when that side's channel is
  // open (real momentum), and fixes it when closed (imaginary momentum).
  const CMatrix* m[2][2] = {{&ts.phi_plus, &ts.psi_minus},
                            {&ts.psi_plus, &ts.phi_minus}};
  Real scale = 1;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) scale = std::max(scale, 1 + max_abs(*m[a][b]));

  Real worst = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
          const int a2 = flip_left[static_cast<std::size_t>(s)] ? 1 - a : a;
          const int b2 = flip_right[static_cast<std::size_t>(t)] ? 1 - b : b;
          const Complex want = (*m[a2][b2])(s, t);
          worst = std::max(worst, std::abs(std::conj((*m[a][b])(s, t)) - want));
        }
  return worst / scale;
}

Real monodromy_residual(const MediumProfile& profile, const EndBases& bases,
                        const SpectralPoint& point, AsymptoticBasis::Side side,
                        int channel, const GridSpec& grid,
                        const Tolerances& tol) {
  const TransitionSet base =
      transition_matrices(integrate_jost(profile, bases, point, grid, tol));

  SpectralPoint flipped = point;
  if (side == AsymptoticBasis::Side::Left)
    flipped.sheet_left[static_cast<std::size_t>(channel)] *= -1;
  else
    flipped.sheet_right[static_cast<std::size_t>(channel)] *= -1;
  const TransitionSet turned =
      transition_matrices(integrate_jost(profile, bases, flipped, grid, tol));

  const CMatrix* m[2][2] = {{&base.phi_plus, &base.psi_minus},
                            {&base.psi_plus, &base.phi_minus}};
  const CMatrix* t[2][2] = {{&turned.phi_plus, &turned.psi_minus},
                            {&turned.psi_plus, &turned.phi_minus}};

  const int n = base.channels();
  Real scale = 1;
  Real worst = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      scale = std::max(scale, 1 + max_abs(*m[a][b]));
      // Crossing the cut of one channel trades the two branch exponentials
      // of that channel: row `channel` of the left label (or column of the
      // right label) swaps + and -, the rest stays put.
      CMatrix expected = *m[a][b];
      if (side == AsymptoticBasis::Side::Left)
        expected.row(channel) = m[1 - a][b]->row(channel);
      else
        expected.col(channel) = m[a][1 - b]->col(channel);
      worst = std::max(worst, max_abs(*t[a][b] - expected));
    }
  return worst / scale;
}

}  // namespace jostline
