#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tg {

struct AdamConfig {
    double lr = 0.003;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First/second moment buffers plus step counter for one parameter array.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;
    AdamConfig cfg;

    AdamState() = default;
    AdamState(std::size_t n, const AdamConfig& c) : m(n, 0.0), v(n, 0.0), cfg(c) {}

    /// Re-size after an upsample; parameter identities changed, so moments restart.
    void reset(std::size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
        t = 0;
    }
};

/// In-place bias-corrected Adam update. Throws NumericalError naming the
/// first offending index when a gradient is not finite.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               int threads = 1);

}  // namespace tg
