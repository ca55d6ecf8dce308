#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "taylorgrid/adam.hpp"
#include "taylorgrid/taylor_grid.hpp"

namespace tg {

/// Coarse-to-fine training plan: train `steps` at each resolution, upsampling
/// (and resetting optimizer moments) between stages.
struct Schedule {
    struct Stage {
        std::array<int, 3> resolution{2, 2, 2};
        int steps = 0;
    };
    std::vector<Stage> stages;

    /// Throws std::invalid_argument unless stage resolutions are
    /// non-decreasing per axis and step counts non-negative.
    void validate(int dim) const;

    int total_steps() const {
        int n = 0;
        for (const auto& s : stages) n += s.steps;
        return n;
    }

    /// Default progressive plan: target/4, target/2, target with an equal
    /// step split (resolutions floored at 4 vertices per axis).
    static Schedule progressive(const std::array<int, 3>& target, int dim, int total_steps);

    /// Single stage at the target resolution.
    static Schedule single(const std::array<int, 3>& target, int steps);
};

/// Loss breakdown for one training step. `fit` is the data term (recon for
/// SDF problems, photometric for radiance).
struct LossTerms {
    double total = 0.0;
    double fit = 0.0;
    double eik = 0.0;
    double tv = 0.0;
};

struct TraceRow {
    int step = 0;   // global step index
    int stage = 0;
    std::array<int, 3> resolution{0, 0, 0};
    LossTerms loss;
    double wall_ms = 0.0;
};

/// Loss/gradient callback for run_schedule. compute() fills `grad` (already
/// zeroed) and returns the loss breakdown for the current grid.
class TrainProblem {
public:
    virtual ~TrainProblem() = default;
    virtual LossTerms compute(const TaylorGrid& grid, std::span<double> grad) = 0;
    /// Called once per stage after any upsample, before its first step.
    virtual void on_stage_start(const TaylorGrid& grid, int stage) { (void)grid; (void)stage; }
};

struct ScheduleResult {
    TaylorGrid grid;
    std::vector<TraceRow> trace;
    std::vector<double> stage_seconds;
};

/// Drives the progressive optimization. Throws NumericalError with stage and
/// step context when the callback produces a non-finite loss.
ScheduleResult run_schedule(TrainProblem& problem, const Schedule& schedule, TaylorGrid grid,
                            const AdamConfig& adam, int threads = 1);

/// CSV with columns step,stage,resolution,total_loss,<fit_label>,eik,tv,wall_ms.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace,
                     const std::string& fit_label);

std::string trace_csv_string(const std::vector<TraceRow>& trace, const std::string& fit_label);

}  // namespace tg
