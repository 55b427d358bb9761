#include "jostline/asymptotics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "jostline/smatrix.hpp"
#include "jostline/transition.hpp"

namespace jostline {
namespace {

// Tracks which side of lambda the channel curve Lambda_s(z) stays on; any
// crossing is a turning point and the semiclassical form breaks down.
void check_side(int& side, Real gap, Real z, int channel) {
  const int here = gap > 0 ? 1 : (gap < 0 ? -1 : 0);
  if (here == 0 || (side != 0 && here != side)) {
    std::ostringstream os;
    os << "turning point: Lambda_" << channel
       << "(z) - lambda changes sign near z = " << z;
    throw TurningPoint(os.str());
  }
  if (side == 0) side = here;
}

Vector eigenvalues_at(const MediumProfile& profile, Real z, Matrix& g,
                      Matrix& v) {
  sample_medium(profile, z, g, v);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(v, g,
                                                      Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "node eigenproblem failed to converge at z = " << z;
    throw Error(os.str());
  }
  return es.eigenvalues();
}

}  // namespace

WkbField wkb_jost(const MediumProfile& profile, const EndBases& bases,
                  Real lambda, const GridSpec& grid, const Tolerances& tol) {
  const Real h = resolve_step(profile, Complex(lambda, 0), grid, tol);
  const Real L = profile.half_width;
  const int n = profile.channels;

  WkbField out;
  out.point = SpectralPoint::physical(lambda, n);
  out.momenta = channel_momenta(bases, out.point);
  out.z = integration_nodes(profile, h);
  const std::size_t m = out.z.size();

  std::vector<int> side(static_cast<std::size_t>(n), 0);
  for (int s = 0; s < n; ++s) {
    check_side(side[static_cast<std::size_t>(s)],
               bases.left.thresholds[s] - lambda, -L, s);
    check_side(side[static_cast<std::size_t>(s)],
               bases.right.thresholds[s] - lambda, L, s);
  }

  out.frame.resize(m);
  out.lambdas.resize(m);
  out.k.resize(m);
  std::vector<Matrix> gs(m);
  Matrix g, v;
  for (std::size_t i = 0; i < m; ++i) {
    sample_medium(profile, out.z[i], g, v);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(v, g);
    if (es.info() != Eigen::Success) {
      std::ostringstream os;
      os << "node eigenproblem failed to converge at z = " << out.z[i];
      throw Error(os.str());
    }
    Matrix f = es.eigenvectors();
    const Vector lam = es.eigenvalues();
    for (int s = 0; s < n; ++s)
      check_side(side[static_cast<std::size_t>(s)], lam[s] - lambda, out.z[i],
                 s);

    // Per-node eigenvectors carry an arbitrary sign; align each column with
    // its predecessor (the left tail frame for the first node).
    const Matrix& ref = i == 0 ? bases.left.frame : out.frame[i - 1];
    for (int s = 0; s < n; ++s)
      if ((ref.col(s).transpose() * g * f.col(s)).value() < 0)
        f.col(s) = -f.col(s);

    out.frame[i] = f;
    out.lambdas[i] = lam;
    out.k[i] =
        (lam.cast<Complex>().array() - Complex(lambda, 0)).sqrt().matrix();
    gs[i] = g;
  }

  // Composite Simpson per interval, with a fresh eigenvalue solve at each
  // midpoint, then prefix sums for the two phase conventions.
  std::vector<CVector> seg(m > 0 ? m - 1 : 0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const Real za = out.z[i];
    const Real zb = out.z[i + 1];
    const Vector lam_mid = eigenvalues_at(profile, (za + zb) / 2, g, v);
    for (int s = 0; s < n; ++s)
      check_side(side[static_cast<std::size_t>(s)], lam_mid[s] - lambda,
                 (za + zb) / 2, s);
    const CVector k_mid =
        (lam_mid.cast<Complex>().array() - Complex(lambda, 0)).sqrt().matrix();
    seg[i] = (zb - za) / 6 * (out.k[i] + 4 * k_mid + out.k[i + 1]);
  }

  out.s_minus.resize(m);
  out.s_plus.resize(m);
  CVector acc = (-L) * out.momenta.K_left;
  out.s_minus[0] = acc;
  for (std::size_t i = 1; i < m; ++i) {
    acc += seg[i - 1];
    out.s_minus[i] = acc;
  }
  acc = L * out.momenta.K_right;
  out.s_plus[m - 1] = acc;
  for (std::size_t i = m - 1; i-- > 0;) {
    acc -= seg[i];
    out.s_plus[i] = acc;
  }

  for (int fam = 0; fam < 4; ++fam) {
    const Real sgn = (fam % 2 == 0) ? 1 : -1;
    const auto& phases = fam < 2 ? out.s_plus : out.s_minus;
    out.u[fam].resize(m);
    out.p[fam].resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const CVector sqrtk = out.k[i].array().sqrt().matrix();
      const CVector ph =
          (sgn * I_UNIT * phases[i].array()).exp().matrix();
      out.u[fam][i] = out.frame[i].cast<Complex>() *
                      (ph.array() / sqrtk.array()).matrix().asDiagonal();
      out.p[fam][i] =
          (gs[i] * out.frame[i]).cast<Complex>() *
          (sgn * I_UNIT * (ph.array() * sqrtk.array())).matrix().asDiagonal();
    }
  }
  return out;
}

std::vector<ResidualRecord> wkb_deviation(const MediumProfile& profile,
                                          const EndBases& bases, Real lambda,
                                          const GridSpec& grid,
                                          const Tolerances& tol) {
  const WkbField w = wkb_jost(profile, bases, lambda, grid, tol);
  const SpectralPoint point =
      SpectralPoint::physical(lambda, profile.channels);
  const JostField field = integrate_jost(profile, bases, point, grid, tol);

  const CVector dress_r =
      field.momenta.K_right.array().sqrt().inverse().matrix();
  const CVector dress_l =
      field.momenta.K_left.array().sqrt().inverse().matrix();

  std::vector<ResidualRecord> out;
  for (int fam = 0; fam < 4; ++fam) {
    const CVector& dress = fam < 2 ? dress_r : dress_l;
    Real worst = 0;
    for (std::size_t j = 0; j < w.z.size(); ++j) {
      const std::size_t i = field.i_left + j;
      const CMatrix eu = field.u[fam][i] * dress.asDiagonal();
      const CMatrix ep = field.p[fam][i] * dress.asDiagonal();
      const Real scale =
          1 + std::max(eu.cwiseAbs().maxCoeff(), ep.cwiseAbs().maxCoeff());
      const Real diff = std::max(
          (eu - w.u[fam][j]).cwiseAbs().maxCoeff(),
          (ep - w.p[fam][j]).cwiseAbs().maxCoeff());
      worst = std::max(worst, diff / scale);
    }
    out.push_back({std::string("wkb_dev_") +
                       family_name(static_cast<JostFamily>(fam)),
                   worst});
  }

  // Transport-equation flux: with amplitude a_s = f_s / sqrt(K_s) the
  // product K_s a_s^T g a_s stays at 1 along z.
  Real cons = 0;
  Matrix g, v;
  for (std::size_t j = 0; j < w.z.size(); ++j) {
    sample_medium(profile, w.z[j], g, v);
    for (int s = 0; s < profile.channels; ++s) {
      const CVector a =
          w.frame[j].col(s).cast<Complex>() / std::sqrt(w.k[j][s]);
      const Complex flux = w.k[j][s] * (a.transpose() * g * a).value();
      cons = std::max(cons, std::abs(flux - Complex(1, 0)));
    }
  }
  out.push_back({"wkb_conservation", cons});
  return out;
}

std::vector<AsymptoteRecord> dets_asymptote(const MediumProfile& profile,
                                            const EndBases& bases,
                                            const std::vector<Real>& lambdas,
                                            const GridSpec& grid,
                                            const Tolerances& tol) {
  std::vector<AsymptoteRecord> out;
  out.reserve(lambdas.size());
  for (Real lambda : lambdas) {
    const WkbField w = wkb_jost(profile, bases, lambda, grid, tol);
    const SpectralPoint point =
        SpectralPoint::physical(lambda, profile.channels);
    const JostField field = integrate_jost(profile, bases, point, grid, tol);
    const TransitionSet ts = transition_matrices(field);
    const ChannelClassification cls = classify_channels(bases, lambda, tol);
    const ScatteringSet ss = scattering_matrices(ts, cls, tol);

    AsymptoteRecord rec;
    rec.lambda = lambda;
    rec.det_gap = std::abs(ss.S_tilde().determinant() - Complex(1, 0));

    const CVector kl_h = ts.momenta.K_left.array().sqrt().matrix();
    const CVector kr_hi =
        ts.momenta.K_right.array().sqrt().inverse().matrix();
    const CMatrix phi_dressed =
        kl_h.asDiagonal() * (ts.phi_plus * kr_hi.asDiagonal()).eval();
    const CMatrix predicted =
        (I_UNIT * (w.s_plus[0] - w.s_minus[0]).array())
            .exp()
            .matrix()
            .asDiagonal();
    rec.phi_dev = (phi_dressed - predicted).cwiseAbs().maxCoeff();
    out.push_back(rec);
  }
  return out;
}

}  // namespace jostline
