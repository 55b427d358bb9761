// Throughput of the hot paths: ODE integration of the Jost families, the
// closed-form transfer-matrix solver, S-matrix assembly, the bound-state
// determinant, and the WKB field. Profiles are built once per benchmark;
// the timed region is the solver call alone.

#include <benchmark/benchmark.h>

#include <jostline/asymptotics.hpp>
#include <jostline/bound.hpp>
#include <jostline/jost.hpp>
#include <jostline/medium.hpp>
#include <jostline/oracle.hpp>
#include <jostline/smatrix.hpp>
#include <jostline/spectral.hpp>
#include <jostline/transition.hpp>

using namespace jostline;

namespace {

// Coupled two-channel fixture with distinct thresholds per side; the same
// medium the tests lean on, so numbers here map onto test runtimes.
MediumProfile coupled_two_channel() {
  MediumProfile p;
  p.channels = 2;
  p.half_width = 1.0;
  p.g_left = p.g_right = Matrix::Identity(2, 2);
  p.v_left = Matrix{{0.0, 0.3}, {0.3, 2.0}};
  p.v_right = Matrix{{0.5, -0.2}, {-0.2, 3.0}};
  Layer a;
  a.kind = LayerKind::Constant;
  a.z_lo = -1.0;
  a.z_hi = 0.4;
  a.g = Matrix{{1.2, 0.1}, {0.1, 0.9}};
  a.v = Matrix{{1.0, -0.5}, {-0.5, 0.2}};
  Layer b;
  b.kind = LayerKind::Constant;
  b.z_lo = 0.4;
  b.z_hi = 1.0;
  b.g = Matrix{{0.8, -0.05}, {-0.05, 1.1}};
  b.v = Matrix{{0.2, 0.4}, {0.4, 2.5}};
  p.layers.push_back(std::move(a));
  p.layers.push_back(std::move(b));
  return p;
}

MediumProfile scalar_well() {
  MediumProfile p;
  p.channels = 1;
  p.half_width = 1.0;
  p.g_left = p.g_right = Matrix::Identity(1, 1);
  p.v_left = p.v_right = Matrix::Zero(1, 1);
  Layer l;
  l.kind = LayerKind::Constant;
  l.z_lo = -1.0;
  l.z_hi = 1.0;
  l.g = Matrix::Identity(1, 1);
  l.v = Matrix::Constant(1, 1, 10.0);
  p.layers.push_back(std::move(l));
  return p;
}

MediumProfile smooth_two_channel(int nodes) {
  MediumProfile p;
  p.channels = 2;
  p.half_width = 1.0;
  p.g_left = p.g_right = Matrix::Identity(2, 2);
  p.v_left = p.v_right = Vector{{0.3, 1.1}}.asDiagonal();
  Layer l;
  l.kind = LayerKind::Sampled;
  l.z_lo = -1.0;
  l.z_hi = 1.0;
  const Real pi = std::acos(Real(-1));
  for (int i = 0; i < nodes; ++i) {
    const Real z = -1.0 + 2.0 * Real(i) / Real(nodes - 1);
    const Real c2 = std::cos(pi * z / 2) * std::cos(pi * z / 2);
    const Real th = 0.9 * std::sin(pi * z) * c2;
    const Real c = std::cos(th), s = std::sin(th);
    Matrix r{{c, -s}, {s, c}};
    LayerNode nd;
    nd.z = z;
    nd.g = Matrix::Identity(2, 2);
    nd.v = r * Vector{{0.3 + 0.25 * c2, 1.1 - 0.2 * c2}}.asDiagonal() *
           r.transpose();
    l.nodes.push_back(std::move(nd));
  }
  p.layers.push_back(std::move(l));
  return p;
}

void bm_integrate_jost(benchmark::State& state) {
  const MediumProfile profile = coupled_two_channel();
  const EndBases bases = diagonalize_ends(profile);
  const SpectralPoint point = SpectralPoint::physical(1.0, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_jost(profile, bases, point));
}

void bm_transfer_oracle(benchmark::State& state) {
  const MediumProfile profile = coupled_two_channel();
  const EndBases bases = diagonalize_ends(profile);
  for (auto _ : state)
    benchmark::DoNotOptimize(transfer_matrix_solve(profile, bases, 1.0));
}

void bm_scattering_assembly(benchmark::State& state) {
  const MediumProfile profile = coupled_two_channel();
  const EndBases bases = diagonalize_ends(profile);
  const SpectralPoint point = SpectralPoint::physical(1.0, 2);
  const ChannelClassification cls = classify_channels(bases, 1.0);
  const TransitionSet ts =
      transition_matrices(integrate_jost(profile, bases, point));
  for (auto _ : state) {
    ScatteringSet ss = scattering_matrices(ts, cls);
    benchmark::DoNotOptimize(symmetry_residuals(ss));
    benchmark::DoNotOptimize(unitarity_residuals(ss));
  }
}

void bm_bound_determinant(benchmark::State& state) {
  const MediumProfile profile = scalar_well();
  const EndBases bases = diagonalize_ends(profile);
  const Real h = resolve_step(profile, Complex(2.0, 0.0), {});
  for (auto _ : state)
    benchmark::DoNotOptimize(bound_determinant(profile, bases, 2.0, h));
}

void bm_wkb_field(benchmark::State& state) {
  const MediumProfile profile = smooth_two_channel(201);
  const EndBases bases = diagonalize_ends(profile);
  for (auto _ : state)
    benchmark::DoNotOptimize(wkb_jost(profile, bases, -100.0));
}

void bm_sampled_integrate(benchmark::State& state) {
  const MediumProfile profile =
      smooth_two_channel(static_cast<int>(state.range(0)));
  const EndBases bases = diagonalize_ends(profile);
  const SpectralPoint point = SpectralPoint::physical(-2.0, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_jost(profile, bases, point));
}

}  // namespace

BENCHMARK(bm_integrate_jost)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_transfer_oracle)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_scattering_assembly)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_bound_determinant)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_wkb_field)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_sampled_integrate)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
