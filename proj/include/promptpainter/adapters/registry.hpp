#pragma once

#include "promptpainter/embedding/embedding.hpp"
#include "promptpainter/generator/generator.hpp"

#include <functional>
#include <map>
#include <string>

namespace promptpainter::adapters {

enum class Device { cpu, accelerator };

/// How to bind an abstract encoder/generator role to a concrete backend.
struct AdapterSpec {
    std::string id;
    std::string weights_path; // may be empty for built-ins
    Device device = Device::cpu;
};

/// Backend factories keyed by string id. Built-ins:
///   toy-encoder / toy-generator   deterministic, no weights
///   proj-encoder / proj-generator weights-backed projection models (JSON)
///   nan-encoder                   fault-injection backend for diagnostics
class Registry {
public:
    static Registry& instance();

    using EncoderFactory = std::function<EncoderPtr(const AdapterSpec&)>;
    using GeneratorFactory = std::function<GeneratorPtr(const AdapterSpec&)>;

    void register_encoder(const std::string& id, EncoderFactory factory);
    void register_generator(const std::string& id, GeneratorFactory factory);

    /// Throws ConfigError for unknown ids; factories throw BackendError for
    /// missing or corrupt weights.
    EncoderPtr make_encoder(const AdapterSpec& spec) const;
    GeneratorPtr make_generator(const AdapterSpec& spec) const;

    std::vector<std::string> encoder_ids() const;
    std::vector<std::string> generator_ids() const;

private:
    Registry();

    std::map<std::string, EncoderFactory> encoders_;
    std::map<std::string, GeneratorFactory> generators_;
};

/// Load the projection encoder/generator weight files (JSON).
EncoderPtr load_projection_encoder(const std::string& path);
GeneratorPtr load_projection_generator(const std::string& path);

/// Export the built-in toy backends as projection weight files. A
/// proj-encoder / proj-generator loaded from these reproduces the toy
/// backends exactly, which is how the weights path is conformance-tested.
void write_toy_encoder_weights(const std::string& path);
void write_toy_generator_weights(const std::string& path);

} // namespace promptpainter::adapters
