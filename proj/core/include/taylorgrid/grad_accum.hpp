#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace tg {

/// Per-thread dense gradient buffer with a touched-block list, so clearing and
/// merging cost is proportional to what a chunk actually wrote. Merging the
/// per-thread buffers in chunk order keeps parallel accumulation run-to-run
/// deterministic for a fixed thread count.
class GradScratch {
public:
    void ensure(std::size_t n) {
        if (buf_.size() != n) buf_.assign(n, 0.0);
        blocks_.clear();
    }
    std::span<double> span() { return buf_; }
    void note(std::size_t begin, std::size_t len) { blocks_.emplace_back(begin, len); }
    void merge_into(std::span<double> global) {
        for (const auto& [begin, len] : blocks_) {
            for (std::size_t i = begin; i < begin + len; ++i) {
                const double g = buf_[i];
                buf_[i] = 0.0;  // duplicate blocks then contribute nothing
                global[i] += g;
            }
        }
        blocks_.clear();
    }

private:
    std::vector<double> buf_;
    std::vector<std::pair<std::size_t, std::size_t>> blocks_;
};

}  // namespace tg
