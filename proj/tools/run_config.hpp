#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taylorgrid/adam.hpp"
#include "taylorgrid/grid_spec.hpp"
#include "taylorgrid/schedule.hpp"
#include "taylorgrid/sdf_loss.hpp"

namespace tgcli {

using nlohmann::json;

/// Built-in defaults for every command; a --config file and dotted-key
/// overrides are merged on top.
json default_config();

/// Recursive merge: values in `over` replace values in `base`.
void merge_json(json& base, const json& over);

/// Parse trailing "--a.b.c value" tokens into a JSON patch.
json overrides_from_args(const std::vector<std::string>& extras);

/// Git-style blob hash ("blob <size>\0" + content, SHA-1, hex).
std::string git_blob_hash(const std::filesystem::path& path);

tg::GridSpec grid_spec_from(const json& cfg, int dim);
tg::LossConfig loss_config_from(const json& cfg);
tg::AdamConfig adam_config_from(const json& cfg);
tg::Schedule schedule_from(const json& cfg, const std::array<int, 3>& target, int dim);

/// Resolved thread count honoring --deterministic (sequential reductions).
int threads_from(const json& cfg);

/// Writes the fully resolved config (with seed and input hashes) into the run
/// directory so every run is self-describing.
void write_resolved_config(const json& cfg, const std::filesystem::path& out_dir,
                           const std::vector<std::filesystem::path>& inputs);

}  // namespace tgcli
