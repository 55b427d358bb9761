#include <doctest.h>

#include <jostline/medium.hpp>
#include <jostline/smatrix.hpp>

#include "support.hpp"

#include <cmath>
#include <complex>

using namespace jostline;
using namespace jostline::testing;

TEST_SUITE("smatrix") {

TEST_CASE("uniform medium scatters trivially") {
  Pipeline p = run_pipeline(uniform_profile(1.0), -0.5);
  CHECK(std::abs(p.ss.t1(0, 0) - Complex(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(p.ss.t2(0, 0) - Complex(1.0, 0.0)) < 1e-12);
  CHECK(std::abs(p.ss.r1(0, 0)) < 1e-12);
  CHECK(std::abs(p.ss.r2(0, 0)) < 1e-12);
  CHECK((p.ss.S() - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.ss.S_tilde() - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("rectangular barrier transmission probability") {
  // Tunneling through v = 0 inside tails at v = 1, evaluated at lambda = 1/2:
  // the tail momentum is sqrt(1/2), the interior decay rate is sqrt(1/2), and
  // |t|^2 = 1 / (1 + sinh^2(2 sqrt(1/2))) for the width-2 barrier.
  Pipeline p = run_pipeline(scalar_barrier(), 0.5);
  const Real sh = std::sinh(2.0 * std::sqrt(0.5));
  const Real expected = 1.0 / (1.0 + sh * sh);
  CHECK(std::norm(p.ss.t1_tilde(0, 0)) ==
        doctest::Approx(expected).epsilon(1e-9));
  CHECK(std::norm(p.ss.t1_tilde(0, 0)) + std::norm(p.ss.r1_tilde(0, 0)) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("potential step reflection") {
  Pipeline p = run_pipeline(scalar_step(0.0, 3.0), -1.0);
  CHECK(std::abs(p.ss.r1_tilde(0, 0) - Complex(-1.0 / 3.0, 0.0)) < 1e-10);
  CHECK(std::norm(p.ss.t1_tilde(0, 0)) ==
        doctest::Approx(8.0 / 9.0).epsilon(1e-10));
}

TEST_CASE("flux dressing conjugates by the momentum square roots") {
  Pipeline p = run_pipeline(mixed_two_channel(), 1.0);
  Real worst = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Complex sr = std::sqrt(p.ss.momenta.K_right(i));
      const Complex sl = std::sqrt(p.ss.momenta.K_left(j));
      worst = std::max(worst, std::abs(p.ss.t1_tilde(i, j) -
                                       sr * p.ss.t1(i, j) / sl));
      const Complex sli = std::sqrt(p.ss.momenta.K_left(i));
      worst = std::max(worst, std::abs(p.ss.r1_tilde(i, j) -
                                       sli * p.ss.r1(i, j) / sl));
    }
  CHECK(worst < 1e-13);
}

TEST_CASE("block assembly of S") {
  Pipeline p = run_pipeline(mixed_two_channel(), -1.3);
  const CMatrix s = p.ss.S();
  CHECK((s.topLeftCorner(2, 2) - p.ss.t1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.topRightCorner(2, 2) - p.ss.r2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.bottomLeftCorner(2, 2) - p.ss.r1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.bottomRightCorner(2, 2) - p.ss.t2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("momentum-weighted transpose symmetry in every regime") {
  for (Real lambda : {-1.3, 0.22, 1.0, 4.0}) {
    Pipeline p = run_pipeline(mixed_two_channel(), lambda);
    std::vector<ResidualRecord> res = symmetry_residuals(p.ss);
    CHECK(res.size() == 16);
    CHECK(max_record(res) < 1e-8);
  }
  Rng rng(51u);
  for (int trial = 0; trial < 4; ++trial) {
    MediumProfile prof = random_profile(rng, 2, 4);
    const Real lambda = (trial % 2 == 0 || usable_gaps(prof) == 0)
                            ? pick_all_open(rng, prof)
                            : pick_mixed(rng, prof);
    Pipeline p = run_pipeline(prof, lambda);
    CHECK(max_record(symmetry_residuals(p.ss)) < 1e-8);
  }
}

TEST_CASE("all-open lambda: the dressed S-matrix is unitary") {
  Pipeline p = run_pipeline(mixed_two_channel(), -1.3);
  REQUIRE(p.cls.all_open());
  std::vector<ResidualRecord> res = unitarity_residuals(p.ss);
  CHECK(record_named(res, "unitarity_full_raw") < 1e-8);
  CHECK(record_named(res, "unitarity_flux") < 1e-8);
  CHECK(record_named(res, "unitarity_open_4") < 1e-8);
  CHECK(max_record(res) < 1e-8);

  Rng rng(52u);
  for (int trial = 0; trial < 4; ++trial) {
    MediumProfile prof = random_profile(rng, 1, 4);
    Pipeline q = run_pipeline(prof, pick_all_open(rng, prof));
    CHECK(max_record(unitarity_residuals(q.ss)) < 1e-8);
  }
}

TEST_CASE("closed channels break full unitarity but not the open relations") {
  for (Real lambda : {0.22, 1.0}) {
    Pipeline p = run_pipeline(mixed_two_channel(), lambda);
    REQUIRE_FALSE(p.cls.all_open());
    std::vector<ResidualRecord> res = unitarity_residuals(p.ss);
    CHECK(record_named(res, "unitarity_full_raw") > 1e-2);
    for (const ResidualRecord& r : res)
      if (r.name.rfind("unitarity_open", 0) == 0) CHECK(r.value < 1e-8);
    bool has_flux = false;
    for (const ResidualRecord& r : res) has_flux |= r.name == "unitarity_flux";
    CHECK_FALSE(has_flux);
  }

  Pipeline closed = run_pipeline(mixed_two_channel(), 4.0);
  REQUIRE(closed.cls.all_closed());
  std::vector<ResidualRecord> res = unitarity_residuals(closed.ss);
  CHECK(res.size() == 1);
  CHECK(record_named(res, "unitarity_full_raw") > 1e-2);
}

TEST_CASE("transmission projector structure") {
  Pipeline sq = run_pipeline(mixed_two_channel(), 1.0);
  REQUIRE((sq.cls.l_o == 1 && sq.cls.r_o == 1));
  CHECK_FALSE(sq.ss.sides_swapped);
  CHECK(sq.ss.proj_rank == 1);
  CHECK((sq.ss.proj - CMatrix::Identity(1, 1)).cwiseAbs().maxCoeff() < 1e-9);

  Pipeline rect = run_pipeline(mixed_two_channel(), 0.22);
  REQUIRE((rect.cls.l_o == 1 && rect.cls.r_o == 2));
  CHECK(rect.ss.sides_swapped);
  CHECK(rect.ss.proj_rank == 1);
  const CMatrix& L = rect.ss.proj;
  REQUIRE(L.rows() == 2);
  CHECK((L - L.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((L * L - L).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(L.trace() - Complex(1.0, 0.0)) < 1e-9);

  Rng rng(53u);
  MediumProfile prof = random_profile(rng, 3, 3);
  if (usable_gaps(prof) > 0) {
    Pipeline p = run_pipeline(prof, pick_in_gap(rng, prof, 0));
    REQUIRE(p.cls.l_o == p.cls.r_o);
    const int lo = p.cls.l_o;
    CHECK(p.ss.proj_rank == lo);
    CHECK((p.ss.proj - CMatrix::Identity(lo, lo)).cwiseAbs().maxCoeff() <
          1e-8);
  }
}

TEST_CASE("closed-open relations hold at mixed lambda and refuse elsewhere") {
  Pipeline p = run_pipeline(mixed_two_channel(), 1.0);
  std::vector<ResidualRecord> res = closed_open_residuals(p.ss);
  CHECK(res.size() == 12);
  CHECK(max_record(res) < 1e-8);

  CHECK_THROWS_AS(
      closed_open_residuals(run_pipeline(mixed_two_channel(), -1.3).ss),
      DegenerateSplit);
  CHECK_THROWS_AS(
      closed_open_residuals(run_pipeline(mixed_two_channel(), 4.0).ss),
      DegenerateSplit);
  CHECK_THROWS_AS(
      closed_open_residuals(run_pipeline(mixed_two_channel(), 0.22).ss),
      DegenerateSplit);
}

TEST_CASE("barred flux identity holds with closed channels present") {
  for (Real lambda : {-1.3, 0.22, 1.0, 4.0}) {
    Pipeline p = run_pipeline(mixed_two_channel(), lambda);
    CHECK(barred_flux_residual(p.ss, p.ts) < 1e-8);
  }
  Rng rng(54u);
  for (int trial = 0; trial < 3; ++trial) {
    MediumProfile prof = random_profile(rng, 2, 3);
    for (Real lambda : {pick_all_open(rng, prof), pick_all_closed(rng, prof)}) {
      Pipeline p = run_pipeline(prof, lambda);
      CHECK(barred_flux_residual(p.ss, p.ts) < 1e-8);
    }
  }
}

TEST_CASE("determinant consistency across the three forms") {
  for (Real lambda : {-1.3, 0.22, 1.0, 4.0}) {
    Pipeline p = run_pipeline(mixed_two_channel(), lambda);
    CHECK(det_consistency(p.ss, p.ts) < 1e-8);
  }
}

TEST_CASE("lambda at a bound state is rejected as singular") {
  MediumProfile p = decoupled_two_channel_wells(10.0, 3.5);
  std::vector<Real> levels = square_well_levels(10.0, 0.0);
  REQUIRE(levels.size() == 3);
  EndBases bases = diagonalize_ends(p);
  const Real lb = levels[1];
  ChannelClassification cls = classify_channels(bases, lb);
  JostField field =
      integrate_jost(p, bases, SpectralPoint::physical(lb, p.channels));
  TransitionSet ts = transition_matrices(field);
  Tolerances loose;
  loose.sing_scale = 1e-4;
  CHECK_THROWS_AS(scattering_matrices(ts, cls, loose), SingularPhiPlus);

  JostField off = integrate_jost(
      p, bases, SpectralPoint::physical(lb + 0.05, p.channels));
  CHECK_NOTHROW(scattering_matrices(transition_matrices(off),
                                    classify_channels(bases, lb + 0.05),
                                    loose));
}

}  // TEST_SUITE
