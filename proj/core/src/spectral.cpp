#include "jostline/spectral.hpp"

#include <cmath>
#include <sstream>

namespace jostline {

SpectralPoint SpectralPoint::physical(Real lambda_value, int channels) {
  SpectralPoint p;
  p.lambda = Complex(lambda_value, 0);
  p.sheet_left.assign(static_cast<std::size_t>(channels), 1);
  p.sheet_right.assign(static_cast<std::size_t>(channels), 1);
  return p;
}

bool SpectralPoint::principal() const {
  for (int s : sheet_left)
    if (s != 1) return false;
  for (int s : sheet_right)
    if (s != 1) return false;
  return true;
}

namespace {

CVector side_momenta(const Vector& thresholds, Complex lambda,
                     const std::vector<int>& sheet) {
  const int n = static_cast<int>(thresholds.size());
  CVector k(n);
  for (int s = 0; s < n; ++s) {
    Complex root = std::sqrt(Complex(thresholds[s], 0) - lambda);
    // std::sqrt maps the negative real axis to the positive imaginary one,
    // which is exactly the principal branch convention used here.
    k[s] = Real(sheet[static_cast<std::size_t>(s)]) * root;
  }
  return k;
}

}  // namespace

ChannelMomenta channel_momenta(const EndBases& bases,
                               const SpectralPoint& point) {
  const int n = static_cast<int>(bases.left.thresholds.size());
  if (static_cast<int>(point.sheet_left.size()) != n ||
      static_cast<int>(point.sheet_right.size()) != n)
    throw Error("sheet selector length does not match the channel count");
  ChannelMomenta m;
  m.K_left = side_momenta(bases.left.thresholds, point.lambda, point.sheet_left);
  m.K_right =
      side_momenta(bases.right.thresholds, point.lambda, point.sheet_right);
  return m;
}

void require_off_thresholds(const EndBases& bases, const SpectralPoint& point,
                            const Tolerances& tol) {
  const Real near = tol.threshold_tol(std::abs(point.lambda));
  if (std::abs(point.lambda.imag()) > near) return;
  auto check_side = [&](const Vector& thresholds, const char* side) {
    for (int s = 0; s < thresholds.size(); ++s)
      if (std::abs(point.lambda.real() - thresholds[s]) <= near) {
        std::ostringstream os;
        os << side << " channel " << s << " threshold " << thresholds[s]
           << " within " << near << " of lambda " << point.lambda.real();
        throw AtThreshold(os.str());
      }
  };
  check_side(bases.left.thresholds, "left");
  check_side(bases.right.thresholds, "right");
}

ChannelClassification classify_channels(const EndBases& bases, Real lambda,
                                        const Tolerances& tol) {
  const Real near = tol.threshold_tol(std::abs(lambda));

  auto split_side = [&](const Vector& thresholds, const char* side,
                        std::vector<int>& open, std::vector<int>& closed,
                        Vector& kappa_open, Vector& kappa_closed) {
    std::vector<Real> ko, kc;
    for (int s = 0; s < thresholds.size(); ++s) {
      const Real gap = thresholds[s] - lambda;
      if (std::abs(gap) <= near) {
        std::ostringstream os;
        os << side << " channel " << s << " threshold " << thresholds[s]
           << " within " << near << " of lambda " << lambda;
        throw AtThreshold(os.str());
      }
      if (gap > 0) {
        open.push_back(s);
        ko.push_back(std::sqrt(gap));
      } else {
        closed.push_back(s);
        kc.push_back(std::sqrt(-gap));
      }
    }
    kappa_open = Eigen::Map<Vector>(ko.data(), static_cast<long>(ko.size()));
    kappa_closed = Eigen::Map<Vector>(kc.data(), static_cast<long>(kc.size()));
  };

  ChannelClassification c;
  c.lambda = lambda;
  split_side(bases.left.thresholds, "left", c.open_left, c.closed_left,
             c.kappa_open_left, c.kappa_closed_left);
  split_side(bases.right.thresholds, "right", c.open_right, c.closed_right,
             c.kappa_open_right, c.kappa_closed_right);

  c.l_o = static_cast<int>(c.open_left.size());
  c.l_c = static_cast<int>(c.closed_left.size());
  c.r_o = static_cast<int>(c.open_right.size());
  c.r_c = static_cast<int>(c.closed_right.size());

  c.perm_left = c.open_left;
  c.perm_left.insert(c.perm_left.end(), c.closed_left.begin(),
                     c.closed_left.end());
  c.perm_right = c.open_right;
  c.perm_right.insert(c.perm_right.end(), c.closed_right.begin(),
                      c.closed_right.end());
  return c;
}

}  // namespace jostline
