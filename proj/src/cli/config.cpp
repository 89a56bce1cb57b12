#include "promptpainter/cli/config.hpp"

#include "promptpainter/core/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace promptpainter::cli {

namespace {

using nlohmann::json;

int line_of_byte(const std::string& text, std::size_t byte) {
    const std::size_t end = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + end, '\n'));
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + " at line " +
                          std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& prefix) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown config key: " + prefix + key);
        }
    }
}

template <typename T>
T get_field(const json& j, const char* key, const T& fallback, const std::string& prefix) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key " + prefix + key + " has the wrong type");
    }
}

std::optional<int> apply_file(RunSetup& setup, const json& j) {
    reject_unknown_keys(j, {"seed", "content", "styles", "levels", "size", "optimizer", "threads",
                            "augment", "noise", "encoder", "generator", "superres", "output_dir",
                            "save_intermediates"},
                        "");

    std::optional<int> file_size;
    if (j.contains("size")) {
        file_size = get_field<int>(j, "size", 0, "");
    }
    setup.run.seed = get_field<std::uint64_t>(j, "seed", setup.run.seed, "");
    if (j.contains("content")) {
        setup.run.content = get_field<std::string>(j, "content", "", "");
    }
    setup.run.threads = get_field<int>(j, "threads", setup.run.threads, "");
    if (j.contains("optimizer")) {
        setup.run.optimizer = optimizer_from_string(get_field<std::string>(j, "optimizer", "", ""));
    }
    setup.output_dir = get_field<std::string>(j, "output_dir", setup.output_dir, "");
    setup.save_intermediates = get_field<bool>(j, "save_intermediates", setup.save_intermediates, "");

    if (j.contains("styles")) {
        if (!j["styles"].is_array()) {
            throw ConfigError("config key styles must be an array");
        }
        setup.run.styles.params.clear();
        for (const auto& s : j["styles"]) {
            reject_unknown_keys(s, {"kind", "payload", "weight"}, "styles[].");
            const std::string kind = get_field<std::string>(s, "kind", "", "styles[].");
            if (kind != "text" && kind != "image") {
                throw ConfigError("styles[].kind must be 'text' or 'image'");
            }
            StyleParam p;
            p.kind = kind == "text" ? StyleParam::Kind::text : StyleParam::Kind::image;
            p.payload = get_field<std::string>(s, "payload", "", "styles[].");
            p.weight = get_field<double>(s, "weight", 1.0, "styles[].");
            setup.run.styles.params.push_back(std::move(p));
        }
    }

    if (j.contains("levels")) {
        if (!j["levels"].is_array()) {
            throw ConfigError("config key levels must be an array");
        }
        setup.run.levels.clear();
        for (const auto& l : j["levels"]) {
            reject_unknown_keys(l, {"resolution", "iterations", "learning_rate"}, "levels[].");
            LevelConfig lc;
            lc.resolution = get_field<int>(l, "resolution", 0, "levels[].");
            lc.iterations = get_field<int>(l, "iterations", 0, "levels[].");
            lc.learning_rate = get_field<double>(l, "learning_rate", 0.1, "levels[].");
            setup.run.levels.push_back(lc);
        }
    }

    if (j.contains("augment")) {
        const json& a = j["augment"];
        reject_unknown_keys(a, {"n_views", "resize_low", "resize_high", "crop_size",
                                "perspective_scale", "flip_probability", "gaussian_sigma"},
                            "augment.");
        AugmentConfig& c = setup.run.augment;
        c.n_views = get_field<int>(a, "n_views", c.n_views, "augment.");
        c.resize_low = get_field<double>(a, "resize_low", c.resize_low, "augment.");
        c.resize_high = get_field<double>(a, "resize_high", c.resize_high, "augment.");
        c.crop_size = get_field<int>(a, "crop_size", c.crop_size, "augment.");
        c.perspective_scale = get_field<double>(a, "perspective_scale", c.perspective_scale, "augment.");
        c.flip_probability = get_field<double>(a, "flip_probability", c.flip_probability, "augment.");
        c.gaussian_sigma = get_field<double>(a, "gaussian_sigma", c.gaussian_sigma, "augment.");
    }

    if (j.contains("noise")) {
        const json& n = j["noise"];
        reject_unknown_keys(n, {"octaves", "persistence", "base_frequency", "amplitude"}, "noise.");
        NoiseConfig& c = setup.run.noise;
        c.octaves = get_field<int>(n, "octaves", c.octaves, "noise.");
        c.persistence = get_field<double>(n, "persistence", c.persistence, "noise.");
        c.base_frequency = get_field<int>(n, "base_frequency", c.base_frequency, "noise.");
        c.amplitude = get_field<double>(n, "amplitude", c.amplitude, "noise.");
    }

    if (j.contains("encoder")) {
        const json& e = j["encoder"];
        reject_unknown_keys(e, {"id", "weights_path"}, "encoder.");
        setup.encoder.id = get_field<std::string>(e, "id", setup.encoder.id, "encoder.");
        setup.encoder.weights_path =
            get_field<std::string>(e, "weights_path", setup.encoder.weights_path, "encoder.");
    }
    if (j.contains("generator")) {
        const json& g = j["generator"];
        reject_unknown_keys(g, {"id", "weights_path"}, "generator.");
        setup.generator.id = get_field<std::string>(g, "id", setup.generator.id, "generator.");
        setup.generator.weights_path =
            get_field<std::string>(g, "weights_path", setup.generator.weights_path, "generator.");
    }
    if (j.contains("superres")) {
        const json& s = j["superres"];
        reject_unknown_keys(s, {"enabled", "adapter", "factor"}, "superres.");
        setup.superres.enabled = get_field<bool>(s, "enabled", setup.superres.enabled, "superres.");
        setup.superres.adapter =
            get_field<std::string>(s, "adapter", setup.superres.adapter, "superres.");
        setup.superres.factor = get_field<int>(s, "factor", setup.superres.factor, "superres.");
    }
    return file_size;
}

} // namespace

std::vector<LevelConfig> parse_levels_flag(const std::string& text) {
    std::vector<LevelConfig> levels;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        LevelConfig lc;
        std::stringstream part(item);
        std::string token;
        int field = 0;
        try {
            while (std::getline(part, token, ':')) {
                switch (field++) {
                case 0: lc.resolution = std::stoi(token); break;
                case 1: lc.iterations = std::stoi(token); break;
                case 2: lc.learning_rate = std::stod(token); break;
                default: throw ConfigError("levels: too many fields in '" + item + "'");
                }
            }
        } catch (const std::logic_error&) {
            throw ConfigError("levels: cannot parse '" + item + "' (expected res:iters[:lr])");
        }
        if (field < 2) {
            throw ConfigError("levels: '" + item + "' needs at least res:iters");
        }
        levels.push_back(lc);
    }
    if (levels.empty()) {
        throw ConfigError("levels: empty schedule");
    }
    return levels;
}

std::vector<LevelConfig> default_levels(int final_size) {
    if (final_size < 8) {
        throw ConfigError("size must be >= 8");
    }
    std::vector<LevelConfig> levels;
    if (256 < final_size) {
        levels.push_back({256, 300, 0.1});
    }
    if (512 < final_size) {
        levels.push_back({512, 200, 0.1});
    }
    levels.push_back({final_size, 100, 0.1});
    return levels;
}

RunSetup parse_setup(const CliOptions& opts) {
    RunSetup setup;
    std::optional<int> file_size;
    if (opts.config_path) {
        file_size = apply_file(setup, load_config_file(*opts.config_path));
    }

    // Flags override the file.
    if (opts.seed) {
        setup.run.seed = *opts.seed;
    }
    if (opts.content) {
        setup.run.content = *opts.content;
    }
    if (opts.optimizer) {
        setup.run.optimizer = optimizer_from_string(*opts.optimizer);
    }
    if (opts.threads) {
        setup.run.threads = *opts.threads;
    }
    if (opts.output_dir) {
        setup.output_dir = *opts.output_dir;
    }
    if (opts.save_intermediates) {
        setup.save_intermediates = true;
    }
    if (opts.encoder_id) {
        setup.encoder.id = *opts.encoder_id;
    }
    if (opts.generator_id) {
        setup.generator.id = *opts.generator_id;
    }
    if (opts.superres_adapter) {
        setup.superres.adapter = *opts.superres_adapter;
        setup.superres.enabled = true;
    }
    if (opts.superres_factor) {
        setup.superres.factor = *opts.superres_factor;
        setup.superres.enabled = true;
    }
    setup.bench = opts.bench;

    if (!opts.texts.empty() || !opts.style_images.empty()) {
        setup.run.styles.params.clear();
        for (const auto& t : opts.texts) {
            setup.run.styles.params.push_back(StyleParam::text(t));
        }
        for (const auto& p : opts.style_images) {
            setup.run.styles.params.push_back(StyleParam::image(p));
        }
        if (opts.style_weights.size() > setup.run.styles.params.size()) {
            throw ConfigError("more --style-weight values than style parameters");
        }
        for (std::size_t i = 0; i < opts.style_weights.size(); ++i) {
            setup.run.styles.params[i].weight = opts.style_weights[i];
        }
    } else if (!opts.style_weights.empty()) {
        throw ConfigError("--style-weight requires --text or --style-image on the command line");
    }

    if (opts.levels) {
        setup.run.levels = parse_levels_flag(*opts.levels);
    } else if (setup.run.levels.empty()) {
        setup.run.levels = default_levels(opts.size.value_or(file_size.value_or(1024)));
    } else if (opts.size) {
        throw ConfigError("--size conflicts with an explicit levels schedule; drop one");
    }

    if (setup.run.styles.params.empty()) {
        throw ConfigError("styles: at least one --text or --style-image is required");
    }

    // Environment fallback for backend weights.
    if (setup.encoder.weights_path.empty()) {
        if (const char* env = std::getenv("PROMPTPAINTER_ENCODER_PATH")) {
            setup.encoder.weights_path = env;
        }
    }
    if (setup.generator.weights_path.empty()) {
        if (const char* env = std::getenv("PROMPTPAINTER_GENERATOR_PATH")) {
            setup.generator.weights_path = env;
        }
    }
    return setup;
}

} // namespace promptpainter::cli
