#include <benchmark/benchmark.h>

#include "taylorgrid/rng.hpp"
#include "taylorgrid/sdf_loss.hpp"
#include "taylorgrid/sh.hpp"
#include "taylorgrid/taylor_grid.hpp"
#include "taylorgrid/volume_render.hpp"

using namespace tg;

namespace {

GridSpec make_spec(int res, int order) {
    GridSpec spec;
    spec.dim = 3;
    spec.resolution = {res, res, res};
    spec.order = order;
    return spec;
}

TaylorGrid random_grid(const GridSpec& spec, std::uint64_t seed) {
    TaylorGrid grid = init_grid(spec);
    Rng rng(seed);
    for (auto& c : grid.coeffs) c = rng.uniform(-1.0, 1.0);
    return grid;
}

std::vector<Vec3> random_points(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = rng.uniform_in_box({-1, -1, -1}, {1, 1, 1}, 3);
    return pts;
}

void BM_Eval(benchmark::State& state) {
    const TaylorGrid grid = random_grid(make_spec(64, static_cast<int>(state.range(0))), 1);
    const auto pts = random_points(4096, 2);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval(grid, pts[i++ & 4095]));
    }
}
BENCHMARK(BM_Eval)->Arg(0)->Arg(1)->Arg(2);

void BM_EvalWithGradient(benchmark::State& state) {
    const TaylorGrid grid = random_grid(make_spec(64, static_cast<int>(state.range(0))), 3);
    const auto pts = random_points(4096, 4);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eval_with_spatial_gradient(grid, pts[i++ & 4095]));
    }
}
BENCHMARK(BM_EvalWithGradient)->Arg(0)->Arg(1)->Arg(2);

void BM_BackpropPoint(benchmark::State& state) {
    const TaylorGrid grid = random_grid(make_spec(64, static_cast<int>(state.range(0))), 5);
    const auto pts = random_points(4096, 6);
    std::vector<double> grad(grid.coeffs.size(), 0.0);
    std::size_t i = 0;
    for (auto _ : state) {
        backprop_point(grid, pts[i++ & 4095], 0.7, grad);
    }
}
BENCHMARK(BM_BackpropPoint)->Arg(0)->Arg(1)->Arg(2);

void BM_TotalLossBatch(benchmark::State& state) {
    const TaylorGrid grid = random_grid(make_spec(64, 2), 7);
    Rng rng(8);
    std::vector<SdfSample> batch(8192);
    for (auto& s : batch) {
        s.point = rng.uniform_in_box({-1, -1, -1}, {1, 1, 1}, 3);
        s.gt_sdf = norm(s.point) - 0.5;
    }
    LossConfig cfg;
    std::vector<double> grad(grid.coeffs.size(), 0.0);
    for (auto _ : state) {
        std::fill(grad.begin(), grad.end(), 0.0);
        benchmark::DoNotOptimize(
            total_loss(grid, batch, cfg, grad, static_cast<int>(state.range(0))));
    }
    state.SetItemsProcessed(state.iterations() * batch.size());
}
BENCHMARK(BM_TotalLossBatch)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_TvLoss(benchmark::State& state) {
    const TaylorGrid grid = random_grid(make_spec(64, 2), 9);
    std::vector<double> grad(grid.coeffs.size(), 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(tv_loss(grid, grad, 1.0, static_cast<int>(state.range(0))));
    }
    state.SetItemsProcessed(state.iterations() * grid.coeffs.size());
}
BENCHMARK(BM_TvLoss)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_RenderRay(benchmark::State& state) {
    const TaylorGrid grid = random_grid(make_spec(48, 2), 10);
    SHColorGrid sh = init_sh_grid(make_spec(24, 0), 2);
    Rng rng(11);
    for (auto& k : sh.coeffs) k = rng.uniform(-0.5, 0.5);
    RenderOptions opts;
    opts.n_samples = static_cast<int>(state.range(0));
    std::uint64_t ray = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_ray(grid, sh, {-1.5, 0.1, 0.05},
                                            normalized(Vec3{1.0, 0.02, 0.01}), 0.4, 2.6, opts,
                                            ray++));
    }
}
BENCHMARK(BM_RenderRay)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
