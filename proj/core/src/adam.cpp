#include "taylorgrid/adam.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/parallel.hpp"

namespace tg {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               int threads) {
    require_arg(params.size() == grads.size(), "adam_step: params/grads length mismatch");
    require_arg(params.size() == state.m.size() && params.size() == state.v.size(),
                "adam_step: state sized for a different parameter array");

    // Validate before mutating anything so a bad step leaves params intact.
    std::atomic<std::int64_t> bad_index{-1};
    parallel_for(static_cast<std::int64_t>(grads.size()), threads,
                 [&](std::int64_t begin, std::int64_t end, int) {
                     const double* g = grads.data();
                     for (std::int64_t i = begin; i < end; ++i) {
                         if (!std::isfinite(g[i])) {
                             std::int64_t expected = -1;
                             bad_index.compare_exchange_strong(expected, i);
                             return;
                         }
                     }
                 });
    if (bad_index.load() >= 0) {
        throw NumericalError("adam_step: non-finite gradient at parameter index " +
                             std::to_string(bad_index.load()));
    }

    state.t += 1;
    const AdamConfig& c = state.cfg;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));

    parallel_for(static_cast<std::int64_t>(params.size()), threads,
                 [&](std::int64_t begin, std::int64_t end, int) {
                     double* p = params.data();
                     const double* g = grads.data();
                     double* m = state.m.data();
                     double* v = state.v.data();
                     for (std::int64_t i = begin; i < end; ++i) {
                         const double gi = g[i];
                         m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * gi;
                         v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * gi * gi;
                         const double mhat = m[i] / bc1;
                         const double vhat = v[i] / bc2;
                         p[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
                     }
                 });
}

}  // namespace tg
