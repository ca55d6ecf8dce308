#include "taylorgrid/sdf_fit.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/parallel.hpp"

namespace tg {

namespace {

class SdfProblem final : public TrainProblem {
public:
    SdfProblem(std::vector<SdfSample> train, const LossConfig& cfg, std::uint64_t seed, int threads)
        : train_(std::move(train)), cfg_(cfg), rng_(seed), threads_(threads) {
        batch_.resize(std::min<std::size_t>(cfg_.batch_size, train_.size()));
    }

    LossTerms compute(const TaylorGrid& grid, std::span<double> grad) override {
        for (auto& slot : batch_) slot = train_[rng_.index(train_.size())];
        return total_loss(grid, batch_, cfg_, grad, threads_, &rng_);
    }

private:
    std::vector<SdfSample> train_;
    LossConfig cfg_;
    Rng rng_;
    int threads_;
    std::vector<SdfSample> batch_;
};

}  // namespace

double mean_abs_error(const TaylorGrid& grid, std::span<const SdfSample> samples, int threads) {
    if (samples.empty()) return 0.0;
    std::vector<double> partial(static_cast<std::size_t>(std::max(threads, 1)), 0.0);
    parallel_for(static_cast<std::int64_t>(samples.size()), threads,
                 [&](std::int64_t begin, std::int64_t end, int t) {
                     double sum = 0.0;
                     for (std::int64_t i = begin; i < end; ++i) {
                         sum += std::abs(eval(grid, samples[i].point) - samples[i].gt_sdf);
                     }
                     partial[t] += sum;
                 });
    double total = 0.0;
    for (double s : partial) total += s;
    return total / static_cast<double>(samples.size());
}

FitResult fit_sdf(const SampleSet& samples, const GridSpec& spec, const FitOptions& options) {
    require_arg(!samples.samples.empty(), "fit_sdf: sample set is empty");
    require_arg(samples.dim == spec.dim, "fit_sdf: sample/grid dimension mismatch");
    spec.validate();
    options.loss.validate();

    // Seeded shuffle, then split off the holdout tail.
    std::vector<std::uint32_t> order(samples.samples.size());
    std::iota(order.begin(), order.end(), 0u);
    Rng shuffle_rng(options.seed ^ 0x5deece66dull);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[shuffle_rng.index(i)]);
    }
    const std::size_t holdout_n =
        std::min(samples.samples.size() - 1,
                 static_cast<std::size_t>(options.holdout_fraction * samples.samples.size()));
    std::vector<SdfSample> train;
    std::vector<SdfSample> holdout;
    train.reserve(order.size() - holdout_n);
    holdout.reserve(holdout_n);
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < order.size() - holdout_n ? train : holdout).push_back(samples.samples[order[i]]);
    }

    Schedule schedule = options.schedule;
    if (schedule.stages.empty()) {
        schedule = Schedule::progressive(spec.resolution, spec.dim, options.total_steps);
    }
    GridSpec start_spec = spec;
    start_spec.resolution = schedule.stages.front().resolution;

    TaylorGrid grid = init_grid(start_spec);
    SdfProblem problem(std::move(train), options.loss, options.seed, options.threads);

    const auto t0 = std::chrono::steady_clock::now();
    ScheduleResult sr = run_schedule(problem, schedule, std::move(grid), options.adam,
                                     options.threads);
    const auto t1 = std::chrono::steady_clock::now();

    FitResult result;
    result.report.stage_seconds = sr.stage_seconds;
    result.report.total_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.report.total_steps = schedule.total_steps();
    result.report.train_samples = static_cast<std::int64_t>(order.size() - holdout_n);
    result.report.holdout_samples = static_cast<std::int64_t>(holdout_n);
    if (!sr.trace.empty()) result.report.final_loss = sr.trace.back().loss;
    if (holdout_n > 0) {
        result.report.holdout_mae = mean_abs_error(sr.grid, holdout, options.threads);
    }
    if (options.metric_hook) result.report.metrics = options.metric_hook(sr.grid);
    result.grid = std::move(sr.grid);
    result.trace = std::move(sr.trace);
    return result;
}

nlohmann::json FitReport::to_json() const {
    nlohmann::json j;
    j["final_loss"] = {{"total", final_loss.total},
                       {"recon", final_loss.fit},
                       {"eik", final_loss.eik},
                       {"tv", final_loss.tv}};
    j["stage_seconds"] = stage_seconds;
    j["total_seconds"] = total_seconds;
    j["total_steps"] = total_steps;
    j["train_samples"] = train_samples;
    j["holdout_samples"] = holdout_samples;
    j["holdout_mae"] = holdout_mae;
    j["metrics"] = metrics.is_null() ? nlohmann::json::object() : metrics;
    j["config"] = config_echo.is_null() ? nlohmann::json::object() : config_echo;
    return j;
}

}  // namespace tg
