#include "run_config.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/parallel.hpp"

namespace tgcli {

json default_config() {
    return json{
        {"seed", 1},
        {"threads", 0},
        {"deterministic", false},
        {"out", "runs/out"},
        {"grid",
         {{"dim", 3},
          {"resolution", {64, 64, 64}},
          {"origin", {-1.0, -1.0, -1.0}},
          {"extent", {2.0, 2.0, 2.0}},
          {"order", 2}}},
        {"loss",
         {{"lambda1", 1e-4},
          {"lambda2", 2e-5},
          {"k", 50.0},
          {"use_weighting", true},
          {"use_tv", true},
          {"batch_size", 8192},
          {"eikonal_points", "reuse-batch"},
          {"differentiate_weight", false}}},
        {"optim", {{"lr", 0.003}, {"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}}},
        {"schedule", {{"mode", "progressive"}, {"total_steps", 3000}, {"stages", json::array()}}},
        {"sdf",
         {{"mesh", ""},
          {"points", ""},
          {"analytic_sphere_radius", 0.0},
          {"total_samples", 500000},
          {"ratio", {1, 2, 2}},
          {"sigma_near", 0.02},
          {"holdout_fraction", 0.05},
          {"eval_iou_samples", 100000},
          {"extract_resolution", 128},
          {"chamfer_points", 100000},
          {"save_points", false}}},
        {"image",
         {{"path", ""},
          {"threshold", 0.5},
          {"grid_scale", 16},
          {"total_samples", 200000},
          {"holdout_fraction", 0.1}}},
        {"nerf",
         {{"scene", ""},
          {"sh_degree", 2},
          {"sh_resolution", {32, 32, 32}},
          {"ray_batch", 1024},
          {"n_samples", 48},
          {"activation", "shifted-softplus"},
          {"softplus_shift", -10.0},
          {"lr_density", 0.1},
          {"lr_sh", 0.01},
          {"lambda_tv_density", 0.0},
          {"jitter", true},
          {"total_steps", 6000},
          {"holdout_views", 2},
          {"toy_views", 24},
          {"toy_size", 64}}},
        {"render", {{"tgrid", ""}, {"shgrid", ""}, {"scene", ""}, {"view", 0}, {"out_png", ""}}},
        {"extract", {{"tgrid", ""}, {"resolution", 128}, {"isolevel", 0.0}, {"out_obj", ""}}},
        {"eval",
         {{"mesh_a", ""},
          {"mesh_b", ""},
          {"grid_a", ""},
          {"grid_b", ""},
          {"image_a", ""},
          {"image_b", ""},
          {"iou_samples", 100000},
          {"chamfer_points", 100000}}},
        {"bench",
         {{"orders", {0, 1, 2}},
          {"resolution", 32},
          {"total_steps", 900},
          {"samples", 30000},
          {"target_iou", 0.95},
          {"probe_every", 100},
          {"probe_samples", 20000}}},
    };
}

void merge_json(json& base, const json& over) {
    if (!over.is_object() || !base.is_object()) {
        base = over;
        return;
    }
    for (const auto& [key, value] : over.items()) {
        if (base.contains(key) && base[key].is_object() && value.is_object()) {
            merge_json(base[key], value);
        } else {
            base[key] = value;
        }
    }
}

json overrides_from_args(const std::vector<std::string>& extras) {
    json patch = json::object();
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& tok = extras[i];
        if (tok.rfind("--", 0) != 0 || tok.size() <= 2) {
            throw tg::ConfigError("unexpected argument '" + tok + "' (expected --key value)");
        }
        std::string key = tok.substr(2);
        std::string value;
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else {
            if (i + 1 >= extras.size()) {
                throw tg::ConfigError("missing value for override --" + key);
            }
            value = extras[++i];
        }
        std::string pointer = "/";
        for (char c : key) pointer += c == '.' ? '/' : c;
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            parsed = value;  // plain string
        }
        patch[json::json_pointer(pointer)] = parsed;
    }
    return patch;
}

std::string git_blob_hash(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw tg::IngestError("hash: cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    const std::string content = ss.str();
    const std::string header = "blob " + std::to_string(content.size()) + '\0';

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
    EVP_DigestUpdate(ctx, header.data(), header.size());
    EVP_DigestUpdate(ctx, content.data(), content.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

tg::GridSpec grid_spec_from(const json& cfg, int dim) {
    const json& g = cfg.at("grid");
    tg::GridSpec spec;
    spec.dim = dim;
    spec.order = g.at("order").get<int>();
    const auto& res = g.at("resolution");
    const auto& origin = g.at("origin");
    const auto& extent = g.at("extent");
    for (int a = 0; a < dim; ++a) {
        spec.resolution[a] = res.at(a).get<int>();
        spec.origin[a] = origin.at(a).get<double>();
        spec.extent[a] = extent.at(a).get<double>();
    }
    spec.validate();
    return spec;
}

tg::LossConfig loss_config_from(const json& cfg) {
    const json& l = cfg.at("loss");
    tg::LossConfig out;
    out.lambda1 = l.at("lambda1").get<double>();
    out.lambda2 = l.at("lambda2").get<double>();
    out.k = l.at("k").get<double>();
    out.use_weighting = l.at("use_weighting").get<bool>();
    out.use_tv = l.at("use_tv").get<bool>();
    out.batch_size = l.at("batch_size").get<int>();
    out.differentiate_weight = l.at("differentiate_weight").get<bool>();
    const std::string src = l.at("eikonal_points").get<std::string>();
    if (src == "reuse-batch") {
        out.eikonal_point_source = tg::EikonalPointSource::ReuseBatch;
    } else if (src == "fresh-uniform") {
        out.eikonal_point_source = tg::EikonalPointSource::FreshUniform;
    } else {
        throw tg::ConfigError("loss.eikonal_points must be reuse-batch or fresh-uniform");
    }
    out.validate();
    return out;
}

tg::AdamConfig adam_config_from(const json& cfg) {
    const json& o = cfg.at("optim");
    tg::AdamConfig out;
    out.lr = o.at("lr").get<double>();
    out.beta1 = o.at("beta1").get<double>();
    out.beta2 = o.at("beta2").get<double>();
    out.eps = o.at("eps").get<double>();
    if (out.lr <= 0.0) throw tg::ConfigError("optim.lr must be > 0");
    return out;
}

tg::Schedule schedule_from(const json& cfg, const std::array<int, 3>& target, int dim) {
    const json& s = cfg.at("schedule");
    const std::string mode = s.at("mode").get<std::string>();
    const int total_steps = s.at("total_steps").get<int>();
    if (total_steps < 0) throw tg::ConfigError("schedule.total_steps must be >= 0");
    tg::Schedule schedule;
    if (!s.at("stages").empty()) {
        for (const auto& stage : s.at("stages")) {
            tg::Schedule::Stage st;
            for (int a = 0; a < dim; ++a) st.resolution[a] = stage.at("resolution").at(a).get<int>();
            for (int a = dim; a < 3; ++a) st.resolution[a] = st.resolution[0];
            st.steps = stage.at("steps").get<int>();
            schedule.stages.push_back(st);
        }
    } else if (mode == "progressive") {
        schedule = tg::Schedule::progressive(target, dim, total_steps);
    } else if (mode == "single") {
        schedule = tg::Schedule::single(target, total_steps);
    } else {
        throw tg::ConfigError("schedule.mode must be progressive or single");
    }
    schedule.validate(dim);
    return schedule;
}

int threads_from(const json& cfg) {
    if (cfg.at("deterministic").get<bool>()) return 1;  // sequential reductions
    return tg::resolve_threads(cfg.at("threads").get<int>());
}

void write_resolved_config(const json& cfg, const std::filesystem::path& out_dir,
                           const std::vector<std::filesystem::path>& inputs) {
    std::filesystem::create_directories(out_dir);
    json resolved = cfg;
    resolved["resolved_threads"] = threads_from(cfg);
    json hashes = json::object();
    for (const auto& input : inputs) {
        if (std::filesystem::exists(input)) hashes[input.string()] = git_blob_hash(input);
    }
    resolved["input_hashes"] = hashes;
    std::ofstream os(out_dir / "config.json");
    if (!os) throw tg::IngestError("cannot write " + (out_dir / "config.json").string());
    os << resolved.dump(1) << '\n';
}

}  // namespace tgcli
