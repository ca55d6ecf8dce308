#pragma once

#include <functional>

#include <nlohmann/json.hpp>

#include "taylorgrid/sdf_loss.hpp"

namespace tg {

struct FitOptions {
    LossConfig loss;
    AdamConfig adam;
    Schedule schedule;        // empty stages -> default progressive plan
    int total_steps = 3000;   // drives the default plan
    double holdout_fraction = 0.0;
    std::uint64_t seed = 1;
    int threads = 1;
    /// Optional post-training metric evaluation stored in the report.
    std::function<nlohmann::json(const TaylorGrid&)> metric_hook;
};

struct FitReport {
    LossTerms final_loss;
    std::vector<double> stage_seconds;
    double total_seconds = 0.0;
    int total_steps = 0;
    std::int64_t train_samples = 0;
    std::int64_t holdout_samples = 0;
    double holdout_mae = 0.0;  // mean |d_hat - d| on held-out samples
    nlohmann::json metrics;    // filled from FitOptions::metric_hook
    nlohmann::json config_echo;

    nlohmann::json to_json() const;
};

struct FitResult {
    TaylorGrid grid;
    FitReport report;
    std::vector<TraceRow> trace;
};

/// Minibatched optimization of the weighted reconstruction + eikonal + TV
/// objective over a progressive schedule. Throws std::invalid_argument for an
/// empty sample set.
FitResult fit_sdf(const SampleSet& samples, const GridSpec& spec, const FitOptions& options);

/// Mean absolute SDF error of the grid on a sample list (no gradient).
double mean_abs_error(const TaylorGrid& grid, std::span<const SdfSample> samples, int threads = 1);

}  // namespace tg
