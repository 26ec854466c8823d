#include <random>

#include <benchmark/benchmark.h>

#include "aa/problems/affine.hpp"
#include "aa/problems/quasilinear.hpp"
#include "aa/solver.hpp"

namespace {

aa::linalg::DenseMatrix random_matrix(int rows, int cols, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    aa::linalg::DenseMatrix m(rows, cols);
    for (double& x : m.entries) x = dist(rng);
    return m;
}

void BM_EconomyQr(benchmark::State& state) {
    const auto f = random_matrix(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 7);
    const auto ip = aa::euclidean_inner_product();
    for (auto _ : state) {
        auto qr = aa::linalg::economy_qr(f, ip, 1e-10);
        benchmark::DoNotOptimize(qr.q.entries.data());
    }
}
BENCHMARK(BM_EconomyQr)->Args({256, 4})->Args({1024, 8})->Args({16384, 8});

void BM_MixingLs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int m = static_cast<int>(state.range(1));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<aa::Vector> window(static_cast<std::size_t>(m) + 1,
                                   aa::Vector(static_cast<std::size_t>(n)));
    for (auto& w : window) {
        for (double& x : w) x = dist(rng);
    }
    const auto ip = aa::euclidean_inner_product();
    for (auto _ : state) {
        auto mix = aa::solve_mixing_ls(window, ip);
        benchmark::DoNotOptimize(mix.gamma.data());
    }
}
BENCHMARK(BM_MixingLs)->Args({1024, 2})->Args({1024, 8})->Args({16384, 8});

void BM_SolveAffine(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const auto problem = aa::problems::make_affine_problem(aa::problems::make_affine(256, 0.9, 11));
    aa::AndersonConfig cfg;
    cfg.depth_m = m;
    cfg.residual_tol = 1e-10;
    cfg.max_iters = 500;
    const aa::Vector x0(256, 0.0);
    for (auto _ : state) {
        auto report = aa::solve(problem, x0, cfg);
        benchmark::DoNotOptimize(report.steps.data());
    }
}
BENCHMARK(BM_SolveAffine)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void BM_QuasilinearPicardStep(benchmark::State& state) {
    aa::problems::QuasilinearSpec spec;
    spec.mesh_n = static_cast<int>(state.range(0));
    const auto u = aa::problems::interpolate_exact(spec);
    for (auto _ : state) {
        auto g = aa::problems::quasilinear_picard_g(spec, u);
        benchmark::DoNotOptimize(g.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_QuasilinearPicardStep)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_QuasilinearSolve(benchmark::State& state) {
    aa::problems::QuasilinearSpec spec;
    spec.mesh_n = 1024;
    const auto problem = aa::problems::make_quasilinear_problem(spec);
    aa::AndersonConfig cfg;
    cfg.depth_m = static_cast<int>(state.range(0));
    cfg.residual_tol = 1e-5;
    cfg.max_iters = 200;
    cfg.history_policy = aa::HistoryPolicy::FlushUntilM;
    cfg.damping = aa::DampingSchedule::adaptive();
    const aa::Vector u0(static_cast<std::size_t>(spec.interior_nodes()), 0.0);
    for (auto _ : state) {
        auto report = aa::solve(problem, u0, cfg);
        benchmark::DoNotOptimize(report.steps.data());
    }
}
BENCHMARK(BM_QuasilinearSolve)->Arg(2)->Arg(8);

} // namespace

BENCHMARK_MAIN();
