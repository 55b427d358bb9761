#include <doctest.h>

#include <jostline/medium.hpp>
#include <jostline/spectral.hpp>

#include "support.hpp"

#include <cmath>

using namespace jostline;
using namespace jostline::testing;

namespace {

MediumProfile diagonal_tails(Real l0, Real l1, Real r0, Real r1) {
  MediumProfile p;
  p.channels = 2;
  p.half_width = 1.0;
  p.g_left = p.g_right = Matrix::Identity(2, 2);
  p.v_left = Vector{{l0, l1}}.asDiagonal();
  p.v_right = Vector{{r0, r1}}.asDiagonal();
  Layer l;
  l.z_lo = -1.0;
  l.z_hi = 1.0;
  l.g = Matrix::Identity(2, 2);
  l.v = Matrix::Zero(2, 2);
  p.layers.push_back(l);
  return p;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("momenta on the principal and flipped sheets") {
  MediumProfile p = uniform_profile(4.0);
  EndBases bases = diagonalize_ends(p);

  ChannelMomenta m = channel_momenta(bases, SpectralPoint::physical(0.0, 1));
  CHECK(std::abs(m.K_left(0) - Complex(2.0, 0.0)) < 1e-14);
  CHECK(std::abs(m.K_right(0) - Complex(2.0, 0.0)) < 1e-14);

  MediumProfile q = uniform_profile(0.0);
  EndBases qb = diagonalize_ends(q);
  SpectralPoint above = SpectralPoint::physical(4.0, 1);
  ChannelMomenta mc = channel_momenta(qb, above);
  CHECK(std::abs(mc.K_left(0) - Complex(0.0, 2.0)) < 1e-14);

  SpectralPoint flipped = above;
  flipped.sheet_left[0] = -1;
  ChannelMomenta mf = channel_momenta(qb, flipped);
  CHECK(std::abs(mf.K_left(0) - Complex(0.0, -2.0)) < 1e-14);
  CHECK(std::abs(mf.K_right(0) - Complex(0.0, 2.0)) < 1e-14);
}

TEST_CASE("momenta square back to threshold minus lambda") {
  Rng rng(11u);
  for (int trial = 0; trial < 50; ++trial) {
    MediumProfile p = random_profile(rng, 1, 4);
    EndBases bases = diagonalize_ends(p);
    SpectralPoint pt = SpectralPoint::physical(0.0, p.channels);
    std::uniform_real_distribution<Real> u(-3.0, 3.0);
    pt.lambda = Complex(u(rng), u(rng));
    for (int s = 0; s < p.channels; ++s) {
      pt.sheet_left[s] = (rng() & 1) ? 1 : -1;
      pt.sheet_right[s] = (rng() & 1) ? 1 : -1;
    }
    ChannelMomenta m = channel_momenta(bases, pt);
    for (int s = 0; s < p.channels; ++s) {
      const Complex kl2 = m.K_left(s) * m.K_left(s);
      const Complex kr2 = m.K_right(s) * m.K_right(s);
      CHECK(std::abs(kl2 - (bases.left.thresholds(s) - pt.lambda)) < 1e-12);
      CHECK(std::abs(kr2 - (bases.right.thresholds(s) - pt.lambda)) < 1e-12);
    }
  }
}

TEST_CASE("physical points are principal; sheet flips are not") {
  SpectralPoint pt = SpectralPoint::physical(1.0, 3);
  CHECK(pt.principal());
  CHECK(pt.lambda == Complex(1.0, 0.0));
  REQUIRE(pt.sheet_left.size() == 3);
  pt.sheet_right[2] = -1;
  CHECK_FALSE(pt.principal());
}

TEST_CASE("classification splits by side and threshold") {
  MediumProfile p = diagonal_tails(1.0, 3.0, 2.0, 5.0);
  EndBases bases = diagonalize_ends(p);

  ChannelClassification all = classify_channels(bases, 0.0);
  CHECK(all.all_open());
  CHECK(all.l_o == 2);
  CHECK(all.r_o == 2);
  CHECK(all.kappa_open_left(0) == doctest::Approx(1.0));
  CHECK(all.kappa_open_left(1) == doctest::Approx(std::sqrt(3.0)));

  ChannelClassification mix = classify_channels(bases, 1.5);
  CHECK(mix.l_o == 1);
  CHECK(mix.l_c == 1);
  CHECK(mix.r_o == 2);
  CHECK(mix.r_c == 0);
  REQUIRE(mix.open_left.size() == 1);
  CHECK(mix.open_left[0] == 1);
  CHECK(mix.closed_left[0] == 0);
  CHECK(mix.kappa_open_left(0) == doctest::Approx(std::sqrt(1.5)));
  CHECK(mix.kappa_closed_left(0) == doctest::Approx(std::sqrt(0.5)));
  REQUIRE(mix.perm_left.size() == 2);
  CHECK(mix.perm_left[0] == 1);
  CHECK(mix.perm_left[1] == 0);

  ChannelClassification upper = classify_channels(bases, 4.0);
  CHECK(upper.l_o == 0);
  CHECK(upper.l_c == 2);
  CHECK(upper.r_o == 1);
  CHECK(upper.r_c == 1);
  CHECK(upper.open_right[0] == 1);

  ChannelClassification closed = classify_channels(bases, 6.0);
  CHECK(closed.all_closed());
}

TEST_CASE("thresholds are rejected within tolerance") {
  MediumProfile p = diagonal_tails(1.0, 3.0, 2.0, 5.0);
  EndBases bases = diagonalize_ends(p);
  CHECK_THROWS_AS(classify_channels(bases, 3.0), AtThreshold);
  CHECK_THROWS_AS(classify_channels(bases, 2.0 + 1e-12), AtThreshold);
  CHECK_THROWS_AS(
      require_off_thresholds(bases, SpectralPoint::physical(5.0, 2)),
      AtThreshold);
  CHECK_NOTHROW(
      require_off_thresholds(bases, SpectralPoint::physical(4.9, 2)));
}

TEST_CASE("momenta agree with the classification kappas") {
  Rng rng(12u);
  for (int trial = 0; trial < 20; ++trial) {
    MediumProfile p = random_profile(rng, 2, 4);
    EndBases bases = diagonalize_ends(p);
    const Real lambda = (trial % 2 == 0) ? pick_all_open(rng, p)
                                         : pick_all_closed(rng, p);
    ChannelClassification cls = classify_channels(bases, lambda);
    ChannelMomenta m =
        channel_momenta(bases, SpectralPoint::physical(lambda, p.channels));
    for (std::size_t i = 0; i < cls.open_left.size(); ++i) {
      const Complex k = m.K_left(cls.open_left[i]);
      CHECK(std::abs(k.imag()) < 1e-14);
      CHECK(k.real() == doctest::Approx(cls.kappa_open_left(i)));
    }
    for (std::size_t i = 0; i < cls.closed_left.size(); ++i) {
      const Complex k = m.K_left(cls.closed_left[i]);
      CHECK(std::abs(k.real()) < 1e-14);
      CHECK(k.imag() == doctest::Approx(cls.kappa_closed_left(i)));
    }
  }
}

TEST_CASE("open counts shrink monotonically in lambda") {
  Rng rng(13u);
  MediumProfile p = random_profile(rng, 3, 3);
  EndBases bases = diagonalize_ends(p);
  int prev_l = 4, prev_r = 4;
  const Real lo = std::min(bases.left.thresholds(0), bases.right.thresholds(0));
  const Real hi = std::max(bases.left.thresholds(2), bases.right.thresholds(2));
  for (Real lambda = lo - 1.0; lambda < hi + 1.0; lambda += 0.02) {
    ChannelClassification cls;
    try {
      cls = classify_channels(bases, lambda);
    } catch (const AtThreshold&) {
      continue;
    }
    CHECK(cls.l_o <= prev_l);
    CHECK(cls.r_o <= prev_r);
    CHECK(cls.l_o + cls.l_c == 3);
    CHECK(cls.r_o + cls.r_c == 3);
    prev_l = cls.l_o;
    prev_r = cls.r_o;
  }
  CHECK(prev_l == 0);
  CHECK(prev_r == 0);
}

}  // TEST_SUITE
