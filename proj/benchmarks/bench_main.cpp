#include <benchmark/benchmark.h>

#include "frackin/fractional.hpp"
#include "frackin/kinetic.hpp"
#include "frackin/particles.hpp"

using namespace frackin;

namespace {

CoefficientSet reference_set() {
    CoefficientSet c;
    c.sigma = 1.5;
    c.beta = 2.0;
    c.gamma = 2.0;
    c.n_exp = 2.5;
    c.s_exp = 1.3;
    c.M0 = 2.0;
    c.c_plus = c.c_minus = 0.2;
    c.A0 = c.A1 = c.V0 = 1.0;
    c.lambda_plateau = 1.25;
    return c;
}

const CoefficientModel& model() {
    static CoefficientModel m(reference_set());
    return m;
}

}  // namespace

static void BM_KineticStep(benchmark::State& st) {
    const auto ctx = make_scaling_context(model(), 0.1, 1);
    GridOptions o;
    o.Nx = 128;
    o.Ny = 160;
    o.scheme = st.range(0) ? TransportScheme::Muscl : TransportScheme::Upwind;
    if (st.range(0)) o.cfl = 0.5;
    KineticSolver S(model(), ctx, make_phase_grid(model(), ctx, o),
                    {true, true, true, static_cast<int>(st.range(1))}, o.scheme);
    auto s = S.init_state(sample_profile({1.0, {{1, 0.5}}}, o.L, o.Nx));
    for (auto _ : st) S.step(s);
    st.SetItemsProcessed(st.iterations() * S.grid().size());
}
BENCHMARK(BM_KineticStep)->Args({0, 1})->Args({1, 1})->Args({0, 4})->Unit(benchmark::kMillisecond);

static void BM_FractionalSolve(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    FractionalProblem p{0.5, 1.75, sample_profile({1.0, {{1, 0.5}, {3, 0.1}}}, 6.283185307179586, N)};
    for (auto _ : st) benchmark::DoNotOptimize(fractional_solve(p, 0.5));
}
BENCHMARK(BM_FractionalSolve)->Arg(128)->Arg(4096);

static void BM_ParticleStep(benchmark::State& st) {
    const auto ctx = make_scaling_context(model(), 0.05, 1);
    ParticleSimulator S(model(), ctx, {.dt_sde = 1e-3});
    auto e = S.init({.N = 1000, .seed = 1});
    double T = 0.0;
    for (auto _ : st) {
        T += 1e-3;
        S.simulate(e, T);
    }
    st.SetItemsProcessed(st.iterations() * 1000);
}
BENCHMARK(BM_ParticleStep)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
