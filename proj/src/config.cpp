#include "roam/config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace roam {

namespace {

using json = nlohmann::json;

double number(const json& v, const std::string& key, double lo, double hi)
{
    if (!v.is_number())
        throw InputError("config key '" + key + "' must be a number");
    const double d = v.get<double>();
    if (!(d >= lo && d <= hi))
        throw InputError("config key '" + key + "' out of range");
    return d;
}

int integer(const json& v, const std::string& key, int lo, int hi)
{
    if (!v.is_number_integer())
        throw InputError("config key '" + key + "' must be an integer");
    const auto i = v.get<long long>();
    if (i < lo || i > hi)
        throw InputError("config key '" + key + "' out of range");
    return static_cast<int>(i);
}

bool boolean(const json& v, const std::string& key)
{
    if (!v.is_boolean())
        throw InputError("config key '" + key + "' must be true or false");
    return v.get<bool>();
}

std::string text(const json& v, const std::string& key)
{
    if (!v.is_string())
        throw InputError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

constexpr double kBig = 1e12;

using Setter = std::function<void(RunConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> s = {
        {"mu", [](RunConfig& c, const json& v, const std::string& k) { c.weights.mu = number(v, k, 0, kBig); }},
        {"lambda", [](RunConfig& c, const json& v, const std::string& k) { c.weights.lambda = number(v, k, 0, kBig); }},
        {"w_loc", [](RunConfig& c, const json& v, const std::string& k) { c.weights.w_loc = number(v, k, 0, kBig); }},
        {"w_glob", [](RunConfig& c, const json& v, const std::string& k) { c.weights.w_glob = number(v, k, 0, kBig); }},
        {"w_land", [](RunConfig& c, const json& v, const std::string& k) { c.weights.w_land = number(v, k, 0, kBig); }},
        {"w_joint", [](RunConfig& c, const json& v, const std::string& k) { c.weights.w_joint = number(v, k, 0, kBig); }},
        {"support_w", [](RunConfig& c, const json& v, const std::string& k) { c.weights.support_w = integer(v, k, 1, 100); }},
        {"pure_l2", [](RunConfig& c, const json& v, const std::string& k) { c.weights.pure_l2 = boolean(v, k); }},
        {"k_global", [](RunConfig& c, const json& v, const std::string& k) { c.models.k_global = integer(v, k, 1, 16); }},
        {"k_local", [](RunConfig& c, const json& v, const std::string& k) { c.models.k_local = integer(v, k, 1, 16); }},
        {"max_global_samples",
         [](RunConfig& c, const json& v, const std::string& k) {
             c.models.max_global_samples = static_cast<std::size_t>(integer(v, k, 1, 1 << 30));
         }},
        {"alpha", [](RunConfig& c, const json& v, const std::string& k) {
             c.models.alpha = number(v, k, 1e-9, 1.0 - 1e-9);
         }},
        {"adapt_local", [](RunConfig& c, const json& v, const std::string& k) { c.models.adapt_local = boolean(v, k); }},
        {"spare_slot", [](RunConfig& c, const json& v, const std::string& k) { c.models.spare_slot = boolean(v, k); }},
        {"seed", [](RunConfig& c, const json& v, const std::string& k) {
             if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
                 throw InputError("config key '" + k + "' must be a non-negative integer");
             c.seed = v.get<std::uint64_t>();
             c.models.seed = c.seed;
         }},
        {"patch", [](RunConfig& c, const json& v, const std::string& k) {
             c.landmarks.patch = integer(v, k, 5, 127);
             if (c.landmarks.patch % 2 == 0)
                 throw InputError("config key 'patch' must be odd");
         }},
        {"reg", [](RunConfig& c, const json& v, const std::string& k) { c.landmarks.reg = number(v, k, 1e-12, kBig); }},
        {"sigma_resp", [](RunConfig& c, const json& v, const std::string& k) { c.landmarks.sigma_resp = number(v, k, 1e-3, 100); }},
        {"psr_threshold", [](RunConfig& c, const json& v, const std::string& k) { c.landmarks.psr_threshold = number(v, k, 0, kBig); }},
        {"capacity", [](RunConfig& c, const json& v, const std::string& k) { c.landmarks.capacity = integer(v, k, 0, 1000); }},
        {"min_separation", [](RunConfig& c, const json& v, const std::string& k) { c.landmarks.min_separation = integer(v, k, 0, 1000); }},
        {"search_side", [](RunConfig& c, const json& v, const std::string& k) {
             c.landmarks.search_side = integer(v, k, 3, 401);
             if (c.landmarks.search_side % 2 == 0)
                 throw InputError("config key 'search_side' must be odd");
         }},
        {"k_pair", [](RunConfig& c, const json& v, const std::string& k) { c.landmarks.k_pair = integer(v, k, 0, 64); }},
        {"gain", [](RunConfig& c, const json& v, const std::string& k) { c.landmarks.gain = number(v, k, 0, kBig); }},
        {"detector", [](RunConfig& c, const json& v, const std::string& k) {
             const std::string d = text(v, k);
             if (d == "mser")
                 c.landmarks.detector = Detector::mser;
             else if (d == "harris")
                 c.landmarks.detector = Detector::harris;
             else
                 throw InputError("config key 'detector' must be mser or harris");
         }},
        {"gamma", [](RunConfig& c, const json& v, const std::string& k) { c.topology.gamma = number(v, k, 0, kBig); }},
        {"area_fraction", [](RunConfig& c, const json& v, const std::string& k) { c.topology.area_fraction = number(v, k, 0, 1); }},
        {"band_factor", [](RunConfig& c, const json& v, const std::string& k) { c.topology.band_factor = integer(v, k, 0, 100); }},
        {"local_factor", [](RunConfig& c, const json& v, const std::string& k) { c.topology.local_factor = integer(v, k, 0, 100); }},
        {"warp", [](RunConfig& c, const json& v, const std::string& k) { c.warp = parse_warp(text(v, k)); }},
        {"topology", [](RunConfig& c, const json& v, const std::string& k) { c.topology_enabled = boolean(v, k); }},
        {"move_radius", [](RunConfig& c, const json& v, const std::string& k) { c.move_radius = integer(v, k, 0, 10); }},
        {"max_iters", [](RunConfig& c, const json& v, const std::string& k) { c.max_iters = integer(v, k, 1, 1000); }},
        {"rel_tol", [](RunConfig& c, const json& v, const std::string& k) { c.rel_tol = number(v, k, 0, 1); }},
        {"resample_ratio", [](RunConfig& c, const json& v, const std::string& k) { c.resample_ratio = number(v, k, 1, kBig); }},
        {"vertex_spacing", [](RunConfig& c, const json& v, const std::string& k) { c.vertex_spacing = number(v, k, 1, 1000); }},
        {"adapt_before_cull", [](RunConfig& c, const json& v, const std::string& k) { c.adapt_before_cull = boolean(v, k); }},
        {"ransac_tol", [](RunConfig& c, const json& v, const std::string& k) { c.ransac_tol = number(v, k, 1e-6, 1000); }},
        {"ransac_trials", [](RunConfig& c, const json& v, const std::string& k) { c.ransac_trials = integer(v, k, 1, 100000); }},
        {"exec", [](RunConfig& c, const json& v, const std::string& k) {
             const std::string e = text(v, k);
             if (e == "serial")
                 c.exec = Exec::serial;
             else if (e == "parallel")
                 c.exec = Exec::parallel;
             else
                 throw InputError("config key 'exec' must be serial or parallel");
         }},
    };
    return s;
}

}  // namespace

void apply_overrides(RunConfig& cfg, const json& doc)
{
    if (!doc.is_object())
        throw InputError("config must be a flat object");
    if (doc.contains("preset")) {
        const RunConfig base = preset_config(parse_preset(text(doc["preset"], "preset")));
        const std::uint64_t seed = cfg.seed;
        const Exec exec = cfg.exec;
        cfg = base;
        cfg.seed = cfg.models.seed = seed;
        cfg.exec = exec;
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "preset")
            continue;
        const auto it = setters().find(key);
        if (it == setters().end())
            throw InputError("unknown config key: " + key);
        it->second(cfg, value, key);
    }
}

RunConfig parse_config(const json& doc)
{
    RunConfig cfg = preset_config(Preset::full);
    apply_overrides(cfg, doc);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("malformed config " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const RunConfig& c)
{
    return {
        {"preset", preset_name(c.preset)},
        {"mu", c.weights.mu},
        {"lambda", c.weights.lambda},
        {"w_loc", c.weights.w_loc},
        {"w_glob", c.weights.w_glob},
        {"w_land", c.weights.w_land},
        {"w_joint", c.weights.w_joint},
        {"support_w", c.weights.support_w},
        {"pure_l2", c.weights.pure_l2},
        {"k_global", c.models.k_global},
        {"k_local", c.models.k_local},
        {"max_global_samples", c.models.max_global_samples},
        {"alpha", c.models.alpha},
        {"adapt_local", c.models.adapt_local},
        {"spare_slot", c.models.spare_slot},
        {"seed", c.seed},
        {"patch", c.landmarks.patch},
        {"reg", c.landmarks.reg},
        {"sigma_resp", c.landmarks.sigma_resp},
        {"psr_threshold", c.landmarks.psr_threshold},
        {"capacity", c.landmarks.capacity},
        {"min_separation", c.landmarks.min_separation},
        {"search_side", c.landmarks.search_side},
        {"k_pair", c.landmarks.k_pair},
        {"gain", c.landmarks.gain},
        {"detector", c.landmarks.detector == Detector::mser ? "mser" : "harris"},
        {"gamma", c.topology.gamma},
        {"area_fraction", c.topology.area_fraction},
        {"band_factor", c.topology.band_factor},
        {"local_factor", c.topology.local_factor},
        {"warp", warp_name(c.warp)},
        {"topology", c.topology_enabled},
        {"move_radius", c.move_radius},
        {"max_iters", c.max_iters},
        {"rel_tol", c.rel_tol},
        {"resample_ratio", c.resample_ratio},
        {"vertex_spacing", c.vertex_spacing},
        {"adapt_before_cull", c.adapt_before_cull},
        {"ransac_tol", c.ransac_tol},
        {"ransac_trials", c.ransac_trials},
        {"exec", c.exec == Exec::serial ? "serial" : "parallel"},
    };
}

}  // namespace roam
