#include "promptpainter/adapters/registry.hpp"

#include "promptpainter/core/errors.hpp"
#include "promptpainter/embedding/toy_encoder.hpp"
#include "promptpainter/generator/toy_generator.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <limits>

namespace promptpainter::adapters {

namespace {

using nlohmann::json;

json load_weights_json(const std::string& path, const std::string& expected_kind) {
    if (path.empty()) {
        throw BackendError("adapter '" + expected_kind + "' requires a weights_path");
    }
    std::ifstream in(path);
    if (!in) {
        throw BackendError("cannot open weights file: " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw BackendError("corrupt weights file " + path + ": " + e.what());
    }
    if (!j.is_object() || j.value("kind", "") != expected_kind) {
        throw BackendError("weights file " + path + " is not a '" + expected_kind + "' bundle");
    }
    return j;
}

std::vector<double> read_matrix(const json& j, const char* key, std::size_t expected,
                                const std::string& path) {
    if (!j.contains(key) || !j[key].is_array()) {
        throw BackendError("weights file " + path + " is missing array '" + key + "'");
    }
    std::vector<double> m;
    try {
        m = j[key].get<std::vector<double>>();
    } catch (const json::exception&) {
        throw BackendError("weights file " + path + ": '" + key + "' holds non-numeric entries");
    }
    if (m.size() != expected) {
        throw BackendError("weights file " + path + ": '" + key + "' has " +
                           std::to_string(m.size()) + " entries, expected " + std::to_string(expected));
    }
    for (double v : m) {
        if (!std::isfinite(v)) {
            throw BackendError("weights file " + path + ": '" + key + "' holds non-finite entries");
        }
    }
    return m;
}

void require_cpu(const AdapterSpec& spec) {
    if (spec.device != Device::cpu) {
        throw ConfigError("adapter '" + spec.id + "' supports device cpu only");
    }
}

/// Deliberately broken backend: embeds everything to NaN. Lets the CLI's
/// numerical-abort path be exercised end to end.
class NanEncoder : public Encoder {
public:
    const std::string& id() const override { return id_; }
    int dim() const override { return 16; }
    int input_resolution() const override { return 32; }
    bool reentrant() const override { return true; }

    EmbeddingVector embed_text(std::string_view) const override { return nan_vector(); }
    EmbeddingVector embed_image(const ImageBuffer&) const override { return nan_vector(); }
    Field embed_image_grad(const ImageBuffer& img, std::span<const double>) const override {
        return Field(img.height(), img.width());
    }

private:
    EmbeddingVector nan_vector() const {
        EmbeddingVector v;
        v.values.assign(16, std::numeric_limits<double>::quiet_NaN());
        return v;
    }
    std::string id_ = "nan-encoder";
};

} // namespace

Registry::Registry() {
    register_encoder("toy-encoder", [](const AdapterSpec& spec) -> EncoderPtr {
        require_cpu(spec);
        return std::make_shared<ToyEncoder>();
    });
    register_encoder("proj-encoder", [](const AdapterSpec& spec) -> EncoderPtr {
        require_cpu(spec);
        return load_projection_encoder(spec.weights_path);
    });
    register_encoder("nan-encoder", [](const AdapterSpec& spec) -> EncoderPtr {
        require_cpu(spec);
        return std::make_shared<NanEncoder>();
    });
    register_generator("toy-generator", [](const AdapterSpec& spec) -> GeneratorPtr {
        require_cpu(spec);
        return std::make_shared<ToyGenerator>();
    });
    register_generator("proj-generator", [](const AdapterSpec& spec) -> GeneratorPtr {
        require_cpu(spec);
        return load_projection_generator(spec.weights_path);
    });
}

Registry& Registry::instance() {
    static Registry registry;
    return registry;
}

void Registry::register_encoder(const std::string& id, EncoderFactory factory) {
    encoders_[id] = std::move(factory);
}

void Registry::register_generator(const std::string& id, GeneratorFactory factory) {
    generators_[id] = std::move(factory);
}

EncoderPtr Registry::make_encoder(const AdapterSpec& spec) const {
    auto it = encoders_.find(spec.id);
    if (it == encoders_.end()) {
        throw ConfigError("unknown encoder adapter: " + spec.id);
    }
    return it->second(spec);
}

GeneratorPtr Registry::make_generator(const AdapterSpec& spec) const {
    auto it = generators_.find(spec.id);
    if (it == generators_.end()) {
        throw ConfigError("unknown generator adapter: " + spec.id);
    }
    return it->second(spec);
}

std::vector<std::string> Registry::encoder_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : encoders_) {
        ids.push_back(id);
    }
    return ids;
}

std::vector<std::string> Registry::generator_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : generators_) {
        ids.push_back(id);
    }
    return ids;
}

EncoderPtr load_projection_encoder(const std::string& path) {
    const json j = load_weights_json(path, "encoder");
    const int dim = j.value("dim", 0);
    const int res = j.value("input_resolution", 0);
    if (dim < 1 || res < 8) {
        throw BackendError("weights file " + path + ": invalid dim/input_resolution");
    }
    const std::size_t n = static_cast<std::size_t>(dim) * res * res * 3;
    std::vector<double> projection = read_matrix(j, "projection", n, path);
    const std::uint64_t salt = j.value("text_salt", std::uint64_t{0});
    try {
        return std::make_shared<ToyEncoder>("proj-encoder", dim, res, std::move(projection), salt);
    } catch (const Error& e) {
        throw BackendError("weights file " + path + ": " + e.what());
    }
}

GeneratorPtr load_projection_generator(const std::string& path) {
    const json j = load_weights_json(path, "generator");
    const int channels = j.value("channels", 0);
    const int stride = j.value("stride", 0);
    if (channels < 1 || stride < 1) {
        throw BackendError("weights file " + path + ": invalid channels/stride");
    }
    const std::size_t n = static_cast<std::size_t>(channels) * 3;
    std::vector<double> enc = read_matrix(j, "encode_map", n, path);
    std::vector<double> dec = read_matrix(j, "decode_map", n, path);
    try {
        return std::make_shared<ToyGenerator>("proj-generator", channels, stride, std::move(enc),
                                              std::move(dec));
    } catch (const Error& e) {
        throw BackendError("weights file " + path + ": " + e.what());
    }
}

void write_toy_encoder_weights(const std::string& path) {
    const ToyEncoder toy;
    json j;
    j["kind"] = "encoder";
    j["dim"] = toy.dim();
    j["input_resolution"] = toy.input_resolution();
    j["text_salt"] = toy.text_salt();
    j["projection"] = toy.projection();
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write weights file: " + path);
    }
    out << j.dump();
}

void write_toy_generator_weights(const std::string& path) {
    const ToyGenerator toy;
    json j;
    j["kind"] = "generator";
    j["channels"] = ToyGenerator::kChannels;
    j["stride"] = ToyGenerator::kStride;
    j["encode_map"] = toy.encode_map();
    j["decode_map"] = toy.decode_map();
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write weights file: " + path);
    }
    out << j.dump();
}

} // namespace promptpainter::adapters
