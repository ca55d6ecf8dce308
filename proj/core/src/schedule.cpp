#include "taylorgrid/schedule.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "taylorgrid/errors.hpp"

namespace tg {

void Schedule::validate(int dim) const {
    require_arg(!stages.empty(), "Schedule: needs at least one stage");
    for (std::size_t s = 0; s < stages.size(); ++s) {
        require_arg(stages[s].steps >= 0, "Schedule: negative step count");
        for (int a = 0; a < dim; ++a) {
            require_arg(stages[s].resolution[a] >= 2, "Schedule: stage resolution must be >= 2");
            if (s > 0) {
                require_arg(stages[s].resolution[a] >= stages[s - 1].resolution[a],
                            "Schedule: resolutions must be non-decreasing across stages");
            }
        }
    }
}

Schedule Schedule::progressive(const std::array<int, 3>& target, int dim, int total_steps) {
    Schedule sch;
    const int divisors[3] = {4, 2, 1};
    for (int d : divisors) {
        Stage st;
        bool same_as_target = true;
        for (int a = 0; a < dim; ++a) {
            st.resolution[a] = std::max(4, target[a] / d);
            st.resolution[a] = std::min(st.resolution[a], target[a]);
            if (st.resolution[a] != target[a]) same_as_target = false;
        }
        st.steps = total_steps / 3;
        if (!sch.stages.empty()) {
            bool same_as_prev = true;
            for (int a = 0; a < dim; ++a) {
                if (st.resolution[a] != sch.stages.back().resolution[a]) same_as_prev = false;
            }
            if (same_as_prev) continue;  // tiny targets collapse stages
        }
        sch.stages.push_back(st);
        if (same_as_target) break;
    }
    // Give any rounding remainder to the final stage.
    int assigned = 0;
    for (const auto& s : sch.stages) assigned += s.steps;
    sch.stages.back().steps += total_steps - assigned;
    return sch;
}

Schedule Schedule::single(const std::array<int, 3>& target, int steps) {
    Schedule sch;
    sch.stages.push_back(Stage{target, steps});
    return sch;
}

ScheduleResult run_schedule(TrainProblem& problem, const Schedule& schedule, TaylorGrid grid,
                            const AdamConfig& adam, int threads) {
    schedule.validate(grid.spec.dim);
    using clock = std::chrono::steady_clock;

    ScheduleResult result;
    std::vector<double> grad;
    AdamState state;
    int global_step = 0;

    for (std::size_t stage = 0; stage < schedule.stages.size(); ++stage) {
        const auto& st = schedule.stages[stage];
        bool needs_resize = false;
        for (int a = 0; a < grid.spec.dim; ++a) {
            if (st.resolution[a] != grid.spec.resolution[a]) needs_resize = true;
        }
        if (needs_resize) grid = upsample(grid, st.resolution);
        state = AdamState(grid.coeffs.size(), adam);  // moments reset with each stage
        grad.assign(grid.coeffs.size(), 0.0);
        problem.on_stage_start(grid, static_cast<int>(stage));

        const auto stage_start = clock::now();
        for (int step = 0; step < st.steps; ++step) {
            const auto t0 = clock::now();
            std::fill(grad.begin(), grad.end(), 0.0);
            const LossTerms loss = problem.compute(grid, grad);
            if (!std::isfinite(loss.total)) {
                throw NumericalError("run_schedule: non-finite loss at stage " +
                                     std::to_string(stage) + " step " + std::to_string(step));
            }
            adam_step(grid.coeffs, grad, state, threads);
            const auto t1 = clock::now();

            TraceRow row;
            row.step = global_step++;
            row.stage = static_cast<int>(stage);
            row.resolution = st.resolution;
            row.loss = loss;
            row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            result.trace.push_back(row);
        }
        result.stage_seconds.push_back(
            std::chrono::duration<double>(clock::now() - stage_start).count());
    }
    result.grid = std::move(grid);
    return result;
}

std::string trace_csv_string(const std::vector<TraceRow>& trace, const std::string& fit_label) {
    std::string out = "step,stage,resolution,total_loss," + fit_label + ",eik,tv,wall_ms\n";
    char line[256];
    for (const auto& r : trace) {
        std::snprintf(line, sizeof(line), "%d,%d,%dx%dx%d,%.17g,%.17g,%.17g,%.17g,%.3f\n", r.step,
                      r.stage, r.resolution[0], r.resolution[1], r.resolution[2], r.loss.total,
                      r.loss.fit, r.loss.eik, r.loss.tv, r.wall_ms);
        out += line;
    }
    return out;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace,
                     const std::string& fit_label) {
    std::ofstream os(path);
    if (!os) throw IngestError("trace csv: cannot open for writing: " + path.string());
    os << trace_csv_string(trace, fit_label);
}

}  // namespace tg
