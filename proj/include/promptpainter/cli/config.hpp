#pragma once

#include "promptpainter/adapters/registry.hpp"
#include "promptpainter/pipeline/pipeline.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace promptpainter::cli {

struct SuperresConfig {
    bool enabled = false;
    std::string adapter = "lanczos";
    int factor = 2;

    bool operator==(const SuperresConfig&) const = default;
};

/// Raw command-line values. Optionals are set only when the flag was given,
/// which is what drives flags-override-file precedence.
struct CliOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> content;
    std::vector<std::string> texts;
    std::vector<std::string> style_images;
    std::vector<double> style_weights;
    std::optional<int> size;
    std::optional<std::string> levels; // "res:iters[:lr],..."
    std::optional<std::uint64_t> seed;
    std::optional<std::string> optimizer;
    std::optional<std::string> output_dir;
    bool save_intermediates = false;
    std::optional<std::string> encoder_id;
    std::optional<std::string> generator_id;
    std::optional<std::string> superres_adapter;
    std::optional<int> superres_factor;
    std::optional<int> threads;
    bool bench = false;
};

/// Fully resolved description of what the CLI should execute.
struct RunSetup {
    RunConfig run;
    adapters::AdapterSpec encoder{.id = "toy-encoder"};
    adapters::AdapterSpec generator{.id = "toy-generator"};
    SuperresConfig superres;
    std::string output_dir = ".";
    bool save_intermediates = false;
    bool bench = false;
};

/// Parse "res:iters[:lr],..." level schedules.
std::vector<LevelConfig> parse_levels_flag(const std::string& text);

/// Default coarse-to-fine schedule for a target size: 256 (300 iterations)
/// and 512 (200) below the final size, then the final size at 100, all at
/// learning rate 0.1.
std::vector<LevelConfig> default_levels(int final_size);

/// Merge config file (when given) and flags into a validated RunSetup.
/// Flags override file values; unknown config keys are rejected; malformed
/// JSON reports the line. Backend weight paths fall back to the
/// PROMPTPAINTER_ENCODER_PATH / PROMPTPAINTER_GENERATOR_PATH environment.
RunSetup parse_setup(const CliOptions& opts);

} // namespace promptpainter::cli
