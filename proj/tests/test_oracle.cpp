#include <doctest.h>

#include <jostline/medium.hpp>
#include <jostline/oracle.hpp>

#include "support.hpp"

#include <cmath>

using namespace jostline;
using namespace jostline::testing;

namespace {

Real block_dev(const CMatrix& a, const CMatrix& b) {
  const Real scale =
      1 + std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

Real transition_dev(const TransitionSet& a, const TransitionSet& b) {
  return std::max({block_dev(a.phi_plus, b.phi_plus),
                   block_dev(a.phi_minus, b.phi_minus),
                   block_dev(a.psi_plus, b.psi_plus),
                   block_dev(a.psi_minus, b.psi_minus)});
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("uniform medium connects trivially to round-off") {
  MediumProfile p = uniform_profile(1.0);
  EndBases bases = diagonalize_ends(p);
  TransitionSet ts =
      transfer_transition(p, bases, SpectralPoint::physical(-0.5, 1));
  CHECK(std::abs(ts.phi_plus(0, 0) - Complex(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(ts.phi_minus(0, 0) - Complex(1.0, 0.0)) < 1e-14);
  CHECK(std::abs(ts.psi_plus(0, 0)) < 1e-14);
  CHECK(std::abs(ts.psi_minus(0, 0)) < 1e-14);
}

TEST_CASE("closed forms to round-off: barrier and step") {
  MediumProfile bar = scalar_barrier();
  EndBases bb = diagonalize_ends(bar);
  OracleResult obar = transfer_matrix_solve(bar, bb, 0.5);
  const Real sh = std::sinh(2.0 * std::sqrt(0.5));
  CHECK(std::abs(std::norm(obar.scattering.t1_tilde(0, 0)) -
                 1.0 / (1.0 + sh * sh)) < 1e-12);

  MediumProfile st = scalar_step(0.0, 3.0);
  EndBases sb = diagonalize_ends(st);
  OracleResult ostep = transfer_matrix_solve(st, sb, -1.0);
  CHECK(std::abs(ostep.transition.phi_plus(0, 0) - Complex(1.5, 0.0)) < 1e-13);
  CHECK(std::abs(ostep.transition.psi_plus(0, 0) - Complex(-0.5, 0.0)) <
        1e-13);
  CHECK(std::abs(ostep.scattering.r1_tilde(0, 0) - Complex(-1.0 / 3.0, 0.0)) <
        1e-13);
}

TEST_CASE("layer eigendata solves the generalized problem") {
  MediumProfile p = mixed_two_channel();
  std::vector<LayerEigenData> data = layer_eigendata(p, Complex(0.7, 0.0));
  REQUIRE(data.size() == p.layers.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Matrix& g = p.layers[i].g;
    const Matrix& v = p.layers[i].v;
    const Matrix& f = data[i].frame;
    CHECK((f.transpose() * g * f - Matrix::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((v * f - g * f * data[i].lambdas.asDiagonal().toDenseMatrix())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    for (int s = 0; s < 2; ++s)
      CHECK(std::abs(data[i].k(s) * data[i].k(s) -
                     Complex(data[i].lambdas(s) - 0.7)) < 1e-12);
  }
}

TEST_CASE("identities hold at the oracle solution to near round-off") {
  MediumProfile p = mixed_two_channel();
  EndBases bases = diagonalize_ends(p);
  for (Real lambda : {-1.3, 1.0, 4.0}) {
    OracleResult o = transfer_matrix_solve(p, bases, lambda);
    CHECK(max_record(bilinear_residuals(o.transition)) < 1e-12);
    CHECK(max_record(symmetry_residuals(o.scattering)) < 1e-12);
    CHECK(det_consistency(o.scattering, o.transition) < 1e-12);
    CHECK(barred_flux_residual(o.scattering, o.transition) < 1e-12);
    ChannelClassification cls = classify_channels(bases, lambda);
    CHECK(conjugation_residual(o.transition, cls) < 1e-12);
  }
}

TEST_CASE("splitting a constant layer changes nothing") {
  MediumProfile p = mixed_two_channel();
  MediumProfile split = p;
  const Layer whole = split.layers[0];
  Layer a = whole, b = whole;
  a.z_hi = -0.37;
  b.z_lo = -0.37;
  split.layers[0] = a;
  split.layers.insert(split.layers.begin() + 1, b);
  REQUIRE(validate_profile(split).ok());

  EndBases bases = diagonalize_ends(p);
  for (Real lambda : {-1.3, 1.0}) {
    TransitionSet t1 =
        transfer_transition(p, bases, SpectralPoint::physical(lambda, 2));
    TransitionSet t2 =
        transfer_transition(split, bases, SpectralPoint::physical(lambda, 2));
    CHECK(transition_dev(t1, t2) < 1e-12);
  }
}

TEST_CASE("integrated pipeline matches the oracle blockwise") {
  Rng rng(61u);
  for (int trial = 0; trial < 5; ++trial) {
    MediumProfile prof = random_profile(rng, 1, 3);
    EndBases bases = diagonalize_ends(prof);
    std::vector<Real> lambdas{pick_all_open(rng, prof),
                              pick_all_closed(rng, prof)};
    if (usable_gaps(prof) > 0) lambdas.push_back(pick_mixed(rng, prof));
    for (Real lambda : lambdas) {
      Pipeline p = run_pipeline(prof, lambda);
      TransitionSet ots = transfer_transition(
          prof, bases, SpectralPoint::physical(lambda, prof.channels));
      CHECK(transition_dev(p.ts, ots) < 1e-8);
    }
  }
}

TEST_CASE("sampled layers and layer resonances are refused") {
  MediumProfile s = smooth_rotating_profile(41);
  EndBases sb = diagonalize_ends(s);
  CHECK_THROWS_AS(
      transfer_transition(s, sb, SpectralPoint::physical(-3.0, 2)),
      NotPiecewiseConstant);

  MediumProfile res = scalar_layer(2.0, 5.0);
  EndBases rb = diagonalize_ends(res);
  CHECK_THROWS_AS(
      transfer_transition(res, rb, SpectralPoint::physical(5.0, 1)),
      LayerResonance);
}

}  // TEST_SUITE
