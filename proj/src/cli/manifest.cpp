#include "promptpainter/cli/manifest.hpp"

#include "promptpainter/core/errors.hpp"

#include <fstream>

namespace promptpainter::cli {

namespace {

using nlohmann::json;

json timings_to_json(const StageTimings& t) {
    return json{{"decode", t.decode_ms},
                {"augment", t.augment_ms},
                {"embed", t.embed_ms},
                {"backprop", t.backprop_ms},
                {"update", t.update_ms}};
}

StageTimings timings_from_json(const json& j) {
    StageTimings t;
    t.decode_ms = j.at("decode").get<double>();
    t.augment_ms = j.at("augment").get<double>();
    t.embed_ms = j.at("embed").get<double>();
    t.backprop_ms = j.at("backprop").get<double>();
    t.update_ms = j.at("update").get<double>();
    return t;
}

json style_to_json(const StyleParam& p) {
    return json{{"kind", p.kind == StyleParam::Kind::text ? "text" : "image"},
                {"payload", p.payload},
                {"weight", p.weight}};
}

StyleParam style_from_json(const json& j) {
    StyleParam p;
    p.kind = j.at("kind").get<std::string>() == "text" ? StyleParam::Kind::text
                                                       : StyleParam::Kind::image;
    p.payload = j.at("payload").get<std::string>();
    p.weight = j.at("weight").get<double>();
    return p;
}

json setup_to_json(const RunSetup& s) {
    json levels = json::array();
    for (const auto& l : s.run.levels) {
        levels.push_back({{"resolution", l.resolution},
                          {"iterations", l.iterations},
                          {"learning_rate", l.learning_rate}});
    }
    json styles = json::array();
    for (const auto& p : s.run.styles.params) {
        styles.push_back(style_to_json(p));
    }
    json j;
    j["seed"] = s.run.seed;
    if (s.run.content) {
        j["content"] = *s.run.content;
    }
    j["styles"] = styles;
    j["levels"] = levels;
    j["optimizer"] = to_string(s.run.optimizer);
    j["threads"] = s.run.threads;
    j["augment"] = {{"n_views", s.run.augment.n_views},
                    {"resize_low", s.run.augment.resize_low},
                    {"resize_high", s.run.augment.resize_high},
                    {"crop_size", s.run.augment.crop_size},
                    {"perspective_scale", s.run.augment.perspective_scale},
                    {"flip_probability", s.run.augment.flip_probability},
                    {"gaussian_sigma", s.run.augment.gaussian_sigma}};
    j["noise"] = {{"octaves", s.run.noise.octaves},
                  {"persistence", s.run.noise.persistence},
                  {"base_frequency", s.run.noise.base_frequency},
                  {"amplitude", s.run.noise.amplitude}};
    j["encoder"] = {{"id", s.encoder.id}, {"weights_path", s.encoder.weights_path}};
    j["generator"] = {{"id", s.generator.id}, {"weights_path", s.generator.weights_path}};
    j["superres"] = {{"enabled", s.superres.enabled},
                     {"adapter", s.superres.adapter},
                     {"factor", s.superres.factor}};
    j["output_dir"] = s.output_dir;
    j["save_intermediates"] = s.save_intermediates;
    j["bench"] = s.bench;
    return j;
}

RunSetup setup_from_json(const json& j) {
    RunSetup s;
    s.run.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("content")) {
        s.run.content = j.at("content").get<std::string>();
    }
    for (const auto& p : j.at("styles")) {
        s.run.styles.params.push_back(style_from_json(p));
    }
    for (const auto& l : j.at("levels")) {
        s.run.levels.push_back({l.at("resolution").get<int>(), l.at("iterations").get<int>(),
                                l.at("learning_rate").get<double>()});
    }
    s.run.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    s.run.threads = j.at("threads").get<int>();
    const json& a = j.at("augment");
    s.run.augment.n_views = a.at("n_views").get<int>();
    s.run.augment.resize_low = a.at("resize_low").get<double>();
    s.run.augment.resize_high = a.at("resize_high").get<double>();
    s.run.augment.crop_size = a.at("crop_size").get<int>();
    s.run.augment.perspective_scale = a.at("perspective_scale").get<double>();
    s.run.augment.flip_probability = a.at("flip_probability").get<double>();
    s.run.augment.gaussian_sigma = a.at("gaussian_sigma").get<double>();
    const json& n = j.at("noise");
    s.run.noise.octaves = n.at("octaves").get<int>();
    s.run.noise.persistence = n.at("persistence").get<double>();
    s.run.noise.base_frequency = n.at("base_frequency").get<int>();
    s.run.noise.amplitude = n.at("amplitude").get<double>();
    s.encoder.id = j.at("encoder").at("id").get<std::string>();
    s.encoder.weights_path = j.at("encoder").at("weights_path").get<std::string>();
    s.generator.id = j.at("generator").at("id").get<std::string>();
    s.generator.weights_path = j.at("generator").at("weights_path").get<std::string>();
    s.superres.enabled = j.at("superres").at("enabled").get<bool>();
    s.superres.adapter = j.at("superres").at("adapter").get<std::string>();
    s.superres.factor = j.at("superres").at("factor").get<int>();
    s.output_dir = j.at("output_dir").get<std::string>();
    s.save_intermediates = j.at("save_intermediates").get<bool>();
    s.bench = j.at("bench").get<bool>();
    return s;
}

} // namespace

std::vector<RunManifest::LevelTrace> group_trace(const LossTrace& trace,
                                                 const std::vector<LevelConfig>& levels) {
    std::vector<RunManifest::LevelTrace> out;
    out.reserve(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
        RunManifest::LevelTrace lt;
        lt.level_index = static_cast<int>(li);
        lt.resolution = levels[li].resolution;
        lt.iterations = levels[li].iterations;
        lt.learning_rate = levels[li].learning_rate;
        out.push_back(std::move(lt));
    }
    for (const auto& r : trace.records) {
        if (r.level_index >= 0 && r.level_index < static_cast<int>(out.size())) {
            out[r.level_index].records.push_back(r);
        }
    }
    return out;
}

json RunManifest::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["config"] = setup_to_json(config);
    j["seeds"] = {{"run", run_seed}};
    json b;
    b["encoder"] = {{"id", backends.encoder_id},
                    {"dim", backends.encoder_dim},
                    {"input_resolution", backends.encoder_input_resolution}};
    b["generator"] = {{"id", backends.generator_id}, {"stride", backends.generator_stride}};
    if (backends.superres_id) {
        b["superres"] = {{"id", *backends.superres_id}, {"factor", backends.superres_factor.value_or(0)}};
    } else {
        b["superres"] = nullptr;
    }
    j["backends"] = b;
    json levels = json::array();
    for (const auto& lt : trace) {
        json records = json::array();
        for (const auto& r : lt.records) {
            records.push_back({{"iteration", r.iteration},
                               {"total_loss", r.total_loss},
                               {"per_style", r.per_style},
                               {"timings_ms", timings_to_json(r.timings)}});
        }
        levels.push_back({{"level", lt.level_index},
                          {"resolution", lt.resolution},
                          {"iterations", lt.iterations},
                          {"learning_rate", lt.learning_rate},
                          {"records", std::move(records)}});
    }
    j["trace"] = std::move(levels);
    json outs;
    outs["image"] = outputs.image;
    outs["snapshots"] = outputs.snapshots;
    if (outputs.bench) {
        outs["bench"] = *outputs.bench;
    } else {
        outs["bench"] = nullptr;
    }
    j["outputs"] = std::move(outs);
    j["total_wall_ms"] = total_wall_ms;
    if (abort) {
        j["abort"] = {{"level", abort->level_index},
                      {"iteration", abort->iteration},
                      {"reason", abort->reason}};
    } else {
        j["abort"] = nullptr;
    }
    return j;
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != 1) {
        throw ConfigError("unsupported manifest schema_version " + std::to_string(m.schema_version));
    }
    m.config = setup_from_json(j.at("config"));
    m.run_seed = j.at("seeds").at("run").get<std::uint64_t>();
    const json& b = j.at("backends");
    m.backends.encoder_id = b.at("encoder").at("id").get<std::string>();
    m.backends.encoder_dim = b.at("encoder").at("dim").get<int>();
    m.backends.encoder_input_resolution = b.at("encoder").at("input_resolution").get<int>();
    m.backends.generator_id = b.at("generator").at("id").get<std::string>();
    m.backends.generator_stride = b.at("generator").at("stride").get<int>();
    if (!b.at("superres").is_null()) {
        m.backends.superres_id = b.at("superres").at("id").get<std::string>();
        m.backends.superres_factor = b.at("superres").at("factor").get<int>();
    }
    for (const auto& lt : j.at("trace")) {
        LevelTrace out;
        out.level_index = lt.at("level").get<int>();
        out.resolution = lt.at("resolution").get<int>();
        out.iterations = lt.at("iterations").get<int>();
        out.learning_rate = lt.at("learning_rate").get<double>();
        for (const auto& r : lt.at("records")) {
            IterationRecord rec;
            rec.level_index = out.level_index;
            rec.resolution = out.resolution;
            rec.iteration = r.at("iteration").get<int>();
            rec.total_loss = r.at("total_loss").get<double>();
            rec.per_style = r.at("per_style").get<std::vector<double>>();
            rec.timings = timings_from_json(r.at("timings_ms"));
            out.records.push_back(std::move(rec));
        }
        m.trace.push_back(std::move(out));
    }
    const json& outs = j.at("outputs");
    m.outputs.image = outs.at("image").get<std::string>();
    m.outputs.snapshots = outs.at("snapshots").get<std::vector<std::string>>();
    if (!outs.at("bench").is_null()) {
        m.outputs.bench = outs.at("bench").get<std::string>();
    }
    m.total_wall_ms = j.at("total_wall_ms").get<double>();
    if (!j.at("abort").is_null()) {
        Abort a;
        a.level_index = j.at("abort").at("level").get<int>();
        a.iteration = j.at("abort").at("iteration").get<int>();
        a.reason = j.at("abort").at("reason").get<std::string>();
        m.abort = a;
    }
    return m;
}

void RunManifest::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write manifest: " + path);
    }
    out << to_json().dump(2) << '\n';
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read manifest: " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("manifest parse error in " + path + ": " + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError("manifest schema error in " + path + ": " + e.what());
    }
}

} // namespace promptpainter::cli
