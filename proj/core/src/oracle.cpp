#include "jostline/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

namespace jostline {
namespace {

// Plane-wave coefficient pair of one family inside one constant piece,
// u(z) = f (e^{ikz} a + e^{-ikz} b), with a running rescale to keep the
// entries representable across strongly closed layers.
struct CoeffState {
  CMatrix a;
  CMatrix b;
  Real log_scale = 0;

  void rescale() {
    const Real m = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    if (m > 1e50 || (m > 0 && m < 1e-50)) {
      a /= m;
      b /= m;
      log_scale += std::log(m);
    }
  }
};

struct Piece {
  Matrix frame;
  Matrix g;
  CVector k;
};

CVector phase(const CVector& k, Real z, Complex sign) {
  return (sign * z * k.array()).exp().matrix();
}

// Cross the junction at zeta from the piece `from` (coefficients `st`) into
// the piece `to`, matching u and g du/dz.
void cross(const Piece& from, const Piece& to, Real zeta, CoeffState& st) {
  const CVector ep = phase(from.k, zeta, I_UNIT);
  const CVector em = phase(from.k, zeta, -I_UNIT);
  const CMatrix fu = ep.asDiagonal() * st.a + em.asDiagonal() * st.b;
  const CVector ik_from = I_UNIT * from.k;
  const CMatrix fp =
      ik_from.asDiagonal() * (ep.asDiagonal() * st.a - em.asDiagonal() * st.b).eval();

  const CMatrix u = from.frame.cast<Complex>() * fu;
  const CMatrix p = (from.g * from.frame).cast<Complex>() * fp;

  const CMatrix alpha = (to.g * to.frame).cast<Complex>().transpose() * u;
  const CMatrix beta = to.frame.cast<Complex>().transpose() * p;
  const CVector ikinv =
      to.k.unaryExpr([](Complex k) { return Complex(1) / (I_UNIT * k); });

  st.a = phase(to.k, zeta, -I_UNIT).asDiagonal() *
         (alpha + ikinv.asDiagonal() * beta) / 2;
  st.b = phase(to.k, zeta, I_UNIT).asDiagonal() *
         (alpha - ikinv.asDiagonal() * beta) / 2;
  st.rescale();
}

}  // namespace

std::vector<LayerEigenData> layer_eigendata(const MediumProfile& profile,
                                            Complex lambda) {
  if (!profile.piecewise_constant())
    throw NotPiecewiseConstant(
        "layer eigendata is defined for constant layers only");
  std::vector<LayerEigenData> out;
  out.reserve(profile.layers.size());
  for (const auto& layer : profile.layers) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(layer.v, layer.g);
    LayerEigenData data;
    data.frame = eig.eigenvectors();
    data.lambdas = eig.eigenvalues();
    data.k = (data.lambdas.cast<Complex>().array() - lambda)
                 .sqrt()
                 .matrix();
    out.push_back(std::move(data));
  }
  return out;
}

TransitionSet transfer_transition(const MediumProfile& profile,
                                  const EndBases& bases,
                                  const SpectralPoint& point,
                                  const Tolerances& tol) {
  if (!profile.piecewise_constant())
    throw NotPiecewiseConstant(
        "transfer-matrix solve requires every layer to be constant");
  require_off_thresholds(bases, point, tol);

  const ChannelMomenta momenta = channel_momenta(bases, point);
  const std::vector<LayerEigenData> layers =
      layer_eigendata(profile, point.lambda);

  const Real near = tol.threshold_tol(std::abs(point.lambda));
  for (std::size_t l = 0; l < layers.size(); ++l)
    for (int s = 0; s < layers[l].lambdas.size(); ++s)
      if (std::abs(Complex(layers[l].lambdas[s], 0) - point.lambda) <= near)
        throw LayerResonance("layer " + std::to_string(l) + " eigenvalue " +
                             std::to_string(layers[l].lambdas[s]) +
                             " coincides with lambda; the plane-wave basis "
                             "of that layer degenerates");

  // Pieces in right-to-left crossing order: right tail, layers from last to
  // first, left tail; junction n sits at the left edge of piece n.
  std::vector<Piece> pieces;
  std::vector<Real> junctions;
  pieces.push_back({bases.right.frame, profile.g_right, momenta.K_right});
  for (std::size_t l = profile.layers.size(); l-- > 0;) {
    junctions.push_back(profile.layers[l].z_hi);
    pieces.push_back(
        {layers[l].frame, profile.layers[l].g, layers[l].k});
  }
  junctions.push_back(-profile.half_width);
  pieces.push_back({bases.left.frame, profile.g_left, momenta.K_left});

  const int n = profile.channels;
  TransitionSet ts;
  ts.point = point;
  ts.momenta = momenta;

  for (int plus = 1; plus >= 0; --plus) {
    CoeffState st;
    if (plus) {
      st.a = CMatrix::Identity(n, n);
      st.b = CMatrix::Zero(n, n);
    } else {
      st.a = CMatrix::Zero(n, n);
      st.b = CMatrix::Identity(n, n);
    }
    for (std::size_t j = 0; j < junctions.size(); ++j)
      cross(pieces[j], pieces[j + 1], junctions[j], st);
    const Complex back = std::exp(Complex(st.log_scale, 0));
    if (plus) {
      ts.phi_plus = back * st.a;
      ts.psi_plus = back * st.b;
    } else {
      ts.psi_minus = back * st.a;
      ts.phi_minus = back * st.b;
    }
  }
  ts.expansion_residual = 0;
  return ts;
}

OracleResult transfer_matrix_solve(const MediumProfile& profile,
                                   const EndBases& bases, Real lambda,
                                   const Tolerances& tol) {
  const SpectralPoint point =
      SpectralPoint::physical(lambda, profile.channels);
  OracleResult res;
  res.transition = transfer_transition(profile, bases, point, tol);
  res.scattering = scattering_matrices(
      res.transition, classify_channels(bases, lambda, tol), tol);
  return res;
}

}  // namespace jostline
