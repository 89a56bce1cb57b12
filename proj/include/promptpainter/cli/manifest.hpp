#pragma once

#include "promptpainter/cli/config.hpp"
#include "promptpainter/pipeline/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace promptpainter::cli {

/// Persisted, replayable record of one run: configuration snapshot, seeds,
/// backend identities, per-level loss traces with stage timings, outputs.
/// Round-trips losslessly through JSON.
struct RunManifest {
    struct Backends {
        std::string encoder_id;
        int encoder_dim = 0;
        int encoder_input_resolution = 0;
        std::string generator_id;
        int generator_stride = 0;
        std::optional<std::string> superres_id;
        std::optional<int> superres_factor;
    };

    struct LevelTrace {
        int level_index = 0;
        int resolution = 0;
        int iterations = 0;
        double learning_rate = 0.0;
        std::vector<IterationRecord> records;
    };

    struct Outputs {
        std::string image;
        std::vector<std::string> snapshots;
        std::optional<std::string> bench;
    };

    struct Abort {
        int level_index = 0;
        int iteration = 0;
        std::string reason;
    };

    int schema_version = 1;
    RunSetup config;
    std::uint64_t run_seed = 0;
    Backends backends;
    std::vector<LevelTrace> trace;
    Outputs outputs;
    double total_wall_ms = 0.0;
    std::optional<Abort> abort;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);

    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);

    bool operator==(const RunManifest& other) const { return to_json() == other.to_json(); }
};

/// Group a flat trace into per-level segments following the configured schedule.
std::vector<RunManifest::LevelTrace> group_trace(const LossTrace& trace,
                                                 const std::vector<LevelConfig>& levels);

} // namespace promptpainter::cli
