#include "jostline/smatrix.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

namespace jostline {
namespace {

Real max_abs(const CMatrix& m) {
  return m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
}

CMatrix pick(const CMatrix& m, const std::vector<int>& rows,
             const std::vector<int>& cols) {
  CMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(rows[i], cols[j]);
  return out;
}

CMatrix pseudo_inverse(const CMatrix& m, Real rank_scale, int* rank_out) {
  Eigen::JacobiSVD<CMatrix> svd(m,
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Real cut = sv.size() > 0 ? rank_scale * sv(0) : Real(0);
  CVector inv_sv = CVector::Zero(sv.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut && sv(i) > 0) {
      inv_sv(i) = Complex(1 / sv(i), 0);
      ++rank;
    }
  if (rank_out) *rank_out = rank;
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
}

CVector entry_sqrt(const CVector& k) {
  return k.unaryExpr([](Complex v) { return std::sqrt(v); });
}

CVector entry_inv(const CVector& k) {
  return k.unaryExpr([](Complex v) { return Complex(1) / v; });
}

CMatrix real_diag(const Vector& d) {
  return Matrix(d.asDiagonal()).cast<Complex>();
}

ResidualRecord relation(const char* name, const CMatrix& lhs,
                        const CMatrix& rhs) {
  const Real scale = 1 + std::max(max_abs(lhs), max_abs(rhs));
  return {name, max_abs(lhs - rhs) / scale};
}

}  // namespace

CMatrix ScatteringSet::S() const {
  const int n = channels();
  CMatrix s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = t1;
  s.topRightCorner(n, n) = r2;
  s.bottomLeftCorner(n, n) = r1;
  s.bottomRightCorner(n, n) = t2;
  return s;
}

CMatrix ScatteringSet::S_tilde() const {
  const int n = channels();
  CMatrix s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = t1_tilde;
  s.topRightCorner(n, n) = r2_tilde;
  s.bottomLeftCorner(n, n) = r1_tilde;
  s.bottomRightCorner(n, n) = t2_tilde;
  return s;
}

ScatteringSet scattering_matrices(const TransitionSet& ts,
                                  const ChannelClassification& cls,
                                  const Tolerances& tol) {
  Eigen::JacobiSVD<CMatrix> svd(ts.phi_plus);
  const auto& sv = svd.singularValues();
  const Real smax = sv(0);
  const Real smin = sv(sv.size() - 1);
  if (smax <= 0 || smin <= tol.sing_scale * smax)
    throw SingularPhiPlus(
        "Phi+ is singular at lambda = " +
        std::to_string(ts.point.lambda.real()) +
        " (singular value ratio " + std::to_string(smin / std::max(smax, Real(1e-300))) +
        "); lambda is at or near a bound state");

  ScatteringSet ss;
  ss.point = ts.point;
  ss.cls = cls;
  ss.momenta = ts.momenta;

  ss.t1 = ts.phi_plus.fullPivLu().inverse();
  ss.r1 = ts.psi_plus * ss.t1;
  ss.t2 = ts.phi_minus - ss.r1 * ts.psi_minus;
  ss.r2 = -ss.t1 * ts.psi_minus;

  const CVector sq_l = entry_sqrt(ts.momenta.K_left);
  const CVector sq_r = entry_sqrt(ts.momenta.K_right);
  const CVector isq_l = entry_inv(sq_l);
  const CVector isq_r = entry_inv(sq_r);
  ss.t1_tilde = sq_r.asDiagonal() * ss.t1 * isq_l.asDiagonal();
  ss.r1_tilde = sq_l.asDiagonal() * ss.r1 * isq_l.asDiagonal();
  ss.t2_tilde = sq_l.asDiagonal() * ss.t2 * isq_r.asDiagonal();
  ss.r2_tilde = sq_r.asDiagonal() * ss.r2 * isq_r.asDiagonal();

  ss.sides_swapped = cls.l_o < cls.r_o;
  if (cls.l_o > 0 && cls.r_o > 0) {
    if (!ss.sides_swapped) {
      const CMatrix t1oo = pick(ss.t1, cls.open_right, cls.open_left);
      ss.proj = pseudo_inverse(t1oo, tol.rank_scale, &ss.proj_rank) * t1oo;
    } else {
      // Space reflection z -> -z exchanges the roles of the two tails, so
      // the projector of the reflected problem lives on the open right
      // channels and is built from t2.
      const CMatrix t2oo = pick(ss.t2, cls.open_left, cls.open_right);
      ss.proj = pseudo_inverse(t2oo, tol.rank_scale, &ss.proj_rank) * t2oo;
    }
  }
  return ss;
}

std::vector<ResidualRecord> symmetry_residuals(const ScatteringSet& ss) {
  const ChannelClassification& c = ss.cls;
  const int n = ss.channels();
  const CMatrix kl = CMatrix(ss.momenta.K_left.asDiagonal());
  const CMatrix kp = CMatrix(ss.momenta.K_right.asDiagonal());

  std::vector<ResidualRecord> out;
  out.push_back(relation("symmetry_t", kl * ss.t2, ss.t1.transpose() * kp));
  out.push_back(relation("symmetry_r1", kl * ss.r1, ss.r1.transpose() * kl));
  out.push_back(relation("symmetry_r2", kp * ss.r2, ss.r2.transpose() * kp));

  CMatrix wl = CMatrix::Zero(2 * n, 2 * n);
  wl.topRightCorner(n, n) = kl;
  wl.bottomLeftCorner(n, n) = kp;
  CMatrix wr = CMatrix::Zero(2 * n, 2 * n);
  wr.topRightCorner(n, n) = kp;
  wr.bottomLeftCorner(n, n) = kl;
  const CMatrix s = ss.S();
  out.push_back(relation("symmetry_s_2n", wl * s, s.transpose() * wr));

  const CMatrix ko_l = real_diag(c.kappa_open_left);
  const CMatrix ko_r = real_diag(c.kappa_open_right);
  const CMatrix kc_l = real_diag(c.kappa_closed_left);
  const CMatrix kc_r = real_diag(c.kappa_closed_right);
  const CMatrix ikc_l = I_UNIT * kc_l;
  const CMatrix ikc_r = I_UNIT * kc_r;

  auto blk = [&](const CMatrix& m, const std::vector<int>& r,
                 const std::vector<int>& cc) { return pick(m, r, cc); };

  // t1 rows are right channels, t2/r1 rows left, r2 rows right.
  const CMatrix t1oo = blk(ss.t1, c.open_right, c.open_left);
  const CMatrix t1oc = blk(ss.t1, c.open_right, c.closed_left);
  const CMatrix t1co = blk(ss.t1, c.closed_right, c.open_left);
  const CMatrix t1cc = blk(ss.t1, c.closed_right, c.closed_left);
  const CMatrix t2oo = blk(ss.t2, c.open_left, c.open_right);
  const CMatrix t2oc = blk(ss.t2, c.open_left, c.closed_right);
  const CMatrix t2co = blk(ss.t2, c.closed_left, c.open_right);
  const CMatrix t2cc = blk(ss.t2, c.closed_left, c.closed_right);
  const CMatrix r1oo = blk(ss.r1, c.open_left, c.open_left);
  const CMatrix r1oc = blk(ss.r1, c.open_left, c.closed_left);
  const CMatrix r1co = blk(ss.r1, c.closed_left, c.open_left);
  const CMatrix r1cc = blk(ss.r1, c.closed_left, c.closed_left);
  const CMatrix r2oo = blk(ss.r2, c.open_right, c.open_right);
  const CMatrix r2oc = blk(ss.r2, c.open_right, c.closed_right);
  const CMatrix r2co = blk(ss.r2, c.closed_right, c.open_right);
  const CMatrix r2cc = blk(ss.r2, c.closed_right, c.closed_right);

  out.push_back(relation("block_t_oo", ko_l * t2oo, t1oo.transpose() * ko_r));
  out.push_back(relation("block_t_oc", ko_l * t2oc, t1co.transpose() * ikc_r));
  out.push_back(relation("block_t_co", ikc_l * t2co, t1oc.transpose() * ko_r));
  out.push_back(relation("block_t_cc", kc_l * t2cc, t1cc.transpose() * kc_r));
  out.push_back(relation("block_r1_oo", ko_l * r1oo, r1oo.transpose() * ko_l));
  out.push_back(relation("block_r1_oc", ko_l * r1oc, r1co.transpose() * ikc_l));
  out.push_back(relation("block_r1_co", ikc_l * r1co, r1oc.transpose() * ko_l));
  out.push_back(relation("block_r1_cc", kc_l * r1cc, r1cc.transpose() * kc_l));
  out.push_back(relation("block_r2_oo", ko_r * r2oo, r2oo.transpose() * ko_r));
  out.push_back(relation("block_r2_oc", ko_r * r2oc, r2co.transpose() * ikc_r));
  out.push_back(relation("block_r2_co", ikc_r * r2co, r2oc.transpose() * ko_r));
  out.push_back(relation("block_r2_cc", kc_r * r2cc, r2cc.transpose() * kc_r));
  return out;
}

std::vector<ResidualRecord> unitarity_residuals(const ScatteringSet& ss) {
  const ChannelClassification& c = ss.cls;
  const int n = ss.channels();
  std::vector<ResidualRecord> out;

  const CMatrix st = ss.S_tilde();
  out.push_back(
      {"unitarity_full_raw",
       max_abs(st.adjoint() * st - CMatrix::Identity(2 * n, 2 * n))});

  // The adjoint flux identity is a theorem only when every channel is open;
  // with closed channels present the conjugate no longer matches the other
  // branch and the identity genuinely fails.
  if (c.all_open()) {
    const CMatrix s = ss.S();
    CMatrix w_out = CMatrix::Zero(2 * n, 2 * n);
    w_out.topLeftCorner(n, n) = CMatrix(ss.momenta.K_right.asDiagonal());
    w_out.bottomRightCorner(n, n) = CMatrix(ss.momenta.K_left.asDiagonal());
    CMatrix w_in = CMatrix::Zero(2 * n, 2 * n);
    w_in.topLeftCorner(n, n) = CMatrix(ss.momenta.K_left.asDiagonal());
    w_in.bottomRightCorner(n, n) = CMatrix(ss.momenta.K_right.asDiagonal());
    out.push_back(relation("unitarity_flux", s.adjoint() * w_out * s, w_in));
  }

  if (c.l_o == 0 || c.r_o == 0) return out;

  // Open-open blocks of the problem whose incoming-left open count
  // dominates; when sides_swapped this is the space-reflected problem, in
  // which t1 <-> t2, r1 <-> r2 and the two tails trade places.
  CMatrix T1, R1, T2, R2, ko_m, ko_p;
  if (!ss.sides_swapped) {
    T1 = pick(ss.t1, c.open_right, c.open_left);
    R1 = pick(ss.r1, c.open_left, c.open_left);
    T2 = pick(ss.t2, c.open_left, c.open_right);
    R2 = pick(ss.r2, c.open_right, c.open_right);
    ko_m = real_diag(c.kappa_open_left);
    ko_p = real_diag(c.kappa_open_right);
  } else {
    T1 = pick(ss.t2, c.open_left, c.open_right);
    R1 = pick(ss.r2, c.open_right, c.open_right);
    T2 = pick(ss.t1, c.open_right, c.open_left);
    R2 = pick(ss.r1, c.open_left, c.open_left);
    ko_m = real_diag(c.kappa_open_right);
    ko_p = real_diag(c.kappa_open_left);
  }
  const CMatrix& L = ss.proj;
  const Eigen::Index lo = T1.cols();

  auto rel3 = [&out](const char* name, const CMatrix& a, const CMatrix& b,
                     const CMatrix& rhs) {
    const Real scale = 1 + std::max({max_abs(a), max_abs(b), max_abs(rhs)});
    out.push_back({name, max_abs(a + b - rhs) / scale});
  };

  rel3("unitarity_open_1", T2.adjoint() * ko_m * R1 * L,
       R2.adjoint() * ko_p * T1, CMatrix::Zero(T1.rows(), T1.cols()));
  rel3("unitarity_open_2", T1.adjoint() * ko_p * T1,
       R1.adjoint() * ko_m * R1 * L, ko_m * L);
  rel3("unitarity_open_3", R1.adjoint() * ko_m * T2,
       T1.adjoint() * ko_p * R2, CMatrix::Zero(lo, T2.cols()));
  rel3("unitarity_open_4", T2.adjoint() * ko_m * T2,
       R2.adjoint() * ko_p * R2, ko_p);
  rel3("unitarity_open_left_flux", T1.adjoint() * ko_p * T1,
       R1.adjoint() * ko_m * R1, ko_m);
  rel3("unitarity_open_pair", T2.conjugate() * T1, R1.conjugate() * R1,
       CMatrix::Identity(lo, lo));
  return out;
}

std::vector<ResidualRecord> closed_open_residuals(const ScatteringSet& ss) {
  const ChannelClassification& c = ss.cls;
  if (c.l_o == 0 || c.r_o == 0 || c.l_c == 0 || c.r_c == 0)
    throw DegenerateSplit(
        "closed<->open relations need both open and closed channels on both "
        "sides; at lambda = " +
        std::to_string(c.lambda) + " the split is (" + std::to_string(c.l_o) +
        "o/" + std::to_string(c.l_c) + "c | " + std::to_string(c.r_o) + "o/" +
        std::to_string(c.r_c) + "c)");

  const CMatrix t1oo = pick(ss.t1, c.open_right, c.open_left);
  const CMatrix t1oc = pick(ss.t1, c.open_right, c.closed_left);
  const CMatrix t1co = pick(ss.t1, c.closed_right, c.open_left);
  const CMatrix t1cc = pick(ss.t1, c.closed_right, c.closed_left);
  const CMatrix t2oo = pick(ss.t2, c.open_left, c.open_right);
  const CMatrix t2oc = pick(ss.t2, c.open_left, c.closed_right);
  const CMatrix t2co = pick(ss.t2, c.closed_left, c.open_right);
  const CMatrix t2cc = pick(ss.t2, c.closed_left, c.closed_right);
  const CMatrix r1oo = pick(ss.r1, c.open_left, c.open_left);
  const CMatrix r1oc = pick(ss.r1, c.open_left, c.closed_left);
  const CMatrix r1co = pick(ss.r1, c.closed_left, c.open_left);
  const CMatrix r1cc = pick(ss.r1, c.closed_left, c.closed_left);
  const CMatrix r2oo = pick(ss.r2, c.open_right, c.open_right);
  const CMatrix r2oc = pick(ss.r2, c.open_right, c.closed_right);
  const CMatrix r2co = pick(ss.r2, c.closed_right, c.open_right);
  const CMatrix r2cc = pick(ss.r2, c.closed_right, c.closed_right);

  std::vector<ResidualRecord> out;
  out.push_back(relation("closed_open_t1_cc", t1cc,
                         t1cc.conjugate() - r2co * t1oc.conjugate() -
                             t1co * r1oc.conjugate()));
  out.push_back(relation("closed_open_r1_cc", r1cc,
                         r1cc.conjugate() - t2co * t1oc.conjugate() -
                             r1co * r1oc.conjugate()));
  out.push_back(relation("closed_open_t1_co", t1co,
                         t1co.conjugate() * r1oo + r2co.conjugate() * t1oo));
  out.push_back(relation("closed_open_r1_co", r1co,
                         t2co.conjugate() * t1oo + r1co.conjugate() * r1oo));
  out.push_back(relation("closed_open_t1_oc", t1oc,
                         -r2oo * t1oc.conjugate() - t1oo * r1oc.conjugate()));
  out.push_back(relation("closed_open_r1_oc", r1oc,
                         -t2oo * t1oc.conjugate() - r1oo * r1oc.conjugate()));
  out.push_back(relation("closed_open_t2_cc", t2cc,
                         t2cc.conjugate() - r1co * t2oc.conjugate() -
                             t2co * r2oc.conjugate()));
  out.push_back(relation("closed_open_r2_cc", r2cc,
                         r2cc.conjugate() - t1co * t2oc.conjugate() -
                             r2co * r2oc.conjugate()));
  out.push_back(relation("closed_open_t2_co", t2co,
                         t2co.conjugate() * r2oo + r1co.conjugate() * t2oo));
  out.push_back(relation("closed_open_r2_co", r2co,
                         t1co.conjugate() * t2oo + r2co.conjugate() * r2oo));
  out.push_back(relation("closed_open_t2_oc", t2oc,
                         -r1oo * t2oc.conjugate() - t2oo * r2oc.conjugate()));
  out.push_back(relation("closed_open_r2_oc", r2oc,
                         -t1oo * t2oc.conjugate() - r2oo * r2oc.conjugate()));
  return out;
}

Real barred_flux_residual(const ScatteringSet& ss, const TransitionSet& ts) {
  const int n = ss.channels();
  const CMatrix t1b = ts.phi_minus.fullPivLu().inverse();
  const CMatrix r1b = ts.psi_minus * t1b;
  CMatrix sb(2 * n, 2 * n);
  sb.topLeftCorner(n, n) = t1b;
  sb.topRightCorner(n, n) = -t1b * ts.psi_plus;
  sb.bottomLeftCorner(n, n) = r1b;
  sb.bottomRightCorner(n, n) = ts.phi_plus - r1b * ts.psi_plus;

  CMatrix w_out = CMatrix::Zero(2 * n, 2 * n);
  w_out.topLeftCorner(n, n) = CMatrix(ss.momenta.K_right.asDiagonal());
  w_out.bottomRightCorner(n, n) = CMatrix(ss.momenta.K_left.asDiagonal());
  CMatrix w_in = CMatrix::Zero(2 * n, 2 * n);
  w_in.topLeftCorner(n, n) = CMatrix(ss.momenta.K_left.asDiagonal());
  w_in.bottomRightCorner(n, n) = CMatrix(ss.momenta.K_right.asDiagonal());

  const CMatrix lhs = sb.transpose() * w_out * ss.S();
  const Real scale = 1 + std::max(max_abs(lhs), max_abs(w_in));
  return max_abs(lhs - w_in) / scale;
}

Real det_consistency(const ScatteringSet& ss, const TransitionSet& ts) {
  const Complex d_s = ss.S().determinant();
  const Complex d_st = ss.S_tilde().determinant();
  const Complex d_phi =
      ts.phi_minus.determinant() / ts.phi_plus.determinant();
  const Real scale =
      1 + std::max({std::abs(d_s), std::abs(d_st), std::abs(d_phi)});
  return std::max({std::abs(d_s - d_st), std::abs(d_s - d_phi),
                   std::abs(d_st - d_phi)}) /
         scale;
}

}  // namespace jostline
