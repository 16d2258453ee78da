#include <benchmark/benchmark.h>

#include "d2alf/duy.hpp"
#include "d2alf/operators.hpp"

using namespace d2alf;

static ComplexNahm family_fixture(GridPtr grid) {
    FamilyParams p;
    p.alpha0 = cplx(0.4, 0.5);
    p.beta_x = cplx(0.7, -0.2);
    return complex_nahm_family(FamilyKind::I, p, 0.2, 0.5, grid->L, grid);
}

static void MomentMaps(benchmark::State& state) {
    GridPtr grid = make_grid(1.0, static_cast<int>(state.range(0)));
    const RealNahm A = realify(family_fixture(grid), Xi3{});
    for (auto _ : state) {
        auto mu = moment_maps(A);
        benchmark::DoNotOptimize(mu);
    }
}
BENCHMARK(MomentMaps)->Arg(48)->Arg(96)->Arg(192);

static void GaugeLaplacianSolve(benchmark::State& state) {
    GridPtr grid = make_grid(1.0, static_cast<int>(state.range(0)));
    const RealNahm A = realify(family_fixture(grid), Xi3{});
    const Eigen::VectorXd rhs = Eigen::VectorXd::Random(3 * grid->N);
    for (auto _ : state) {
        Delta0Solve solver = make_delta0_solve(A);
        benchmark::DoNotOptimize(solver.solve(rhs));
    }
}
BENCHMARK(GaugeLaplacianSolve)->Arg(48)->Arg(96);

static void DuySolve(benchmark::State& state) {
    GridPtr grid = make_grid(1.0, static_cast<int>(state.range(0)));
    const ComplexNahm b = family_fixture(grid);
    for (auto _ : state) {
        DuyOptions opts;
        opts.record_history = false;
        benchmark::DoNotOptimize(solve_duy(b, 1.0, 2.0, opts));
    }
}
BENCHMARK(DuySolve)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

static void RiccatiSublines(benchmark::State& state) {
    GridPtr grid = make_grid(1.0, static_cast<int>(state.range(0)));
    FamilyParams p;
    p.c = cplx(0.3, 0.1);
    const ComplexNahm b = complex_nahm_family(FamilyKind::II, p, 0.2, 0.2, 1.0, grid);
    for (auto _ : state) benchmark::DoNotOptimize(find_sublines(b));
}
BENCHMARK(RiccatiSublines)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
