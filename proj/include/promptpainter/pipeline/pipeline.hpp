#pragma once

#include "promptpainter/augment/augment.hpp"
#include "promptpainter/core/errors.hpp"
#include "promptpainter/embedding/embedding.hpp"
#include "promptpainter/generator/generator.hpp"
#include "promptpainter/loss/loss.hpp"
#include "promptpainter/pipeline/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace promptpainter {

/// One hierarchy level: optimize `iterations` steps at `resolution`.
struct LevelConfig {
    int resolution = 0;
    int iterations = 0;
    double learning_rate = 0.1;

    bool operator==(const LevelConfig&) const = default;
};

/// Full description of one stylization run.
struct RunConfig {
    std::vector<LevelConfig> levels;
    AugmentConfig augment;
    NoiseConfig noise;
    OptimizerKind optimizer = OptimizerKind::adaptive_moments;
    std::uint64_t seed = 0;
    std::optional<std::string> content; // image path; absent -> random init
    StyleSet styles;
    int threads = 1;

    /// Cross-field validation against the chosen backends. Throws
    /// ConfigError naming the offending field.
    void validate(const Encoder& enc, const Generator& gen) const;
};

/// Wall-clock milliseconds of the phases of one step.
struct StageTimings {
    double decode_ms = 0.0;
    double augment_ms = 0.0;
    double embed_ms = 0.0;
    double backprop_ms = 0.0;
    double update_ms = 0.0;
};

struct IterationRecord {
    int level_index = 0;
    int resolution = 0;
    int iteration = 0;
    double total_loss = 0.0;
    std::vector<double> per_style;
    StageTimings timings;
};

struct LossTrace {
    std::vector<IterationRecord> records;
};

/// Hooks for snapshot dumps and incremental trace persistence. Called
/// synchronously from the optimization loop.
class RunObserver {
public:
    virtual ~RunObserver() = default;
    virtual void on_decoded(int level_index, int iteration, const ImageBuffer& img) {
        (void)level_index;
        (void)iteration;
        (void)img;
    }
    virtual void on_iteration(const IterationRecord& record) { (void)record; }
};

/// NumericError carrying the position the run aborted at.
class RunAbort : public NumericError {
public:
    RunAbort(int level_index, int iteration, const std::string& what)
        : NumericError(what), level_index(level_index), iteration(iteration) {}

    int level_index;
    int iteration;
};

/// Everything one step needs besides the latent itself.
struct StepContext {
    const Encoder& encoder;
    const Generator& generator;
    const std::vector<WeightedEmbedding>& styles;
    const AugmentConfig& augment;
    const NoiseConfig& noise;
    Optimizer& optimizer;
    int threads = 1;
};

/// Initial latent: encode of the content image resized to the first level's
/// resolution, or a seeded random latent when no content is given.
LatentTensor init_latent(const RunConfig& cfg, const Generator& gen);

struct StepResult {
    double total_loss = 0.0;
    std::vector<double> per_style;
    StageTimings timings;
    ImageBuffer decoded; // phase-1 image, pre-noise (snapshot source)
};

/// One optimization step: decode, noise + augment, embed views, batch loss,
/// backpropagate to the latent, optimizer update. Mutates t in place.
/// Throws NumericError when the loss turns non-finite.
StepResult step(LatentTensor& t, const StepContext& ctx, std::uint64_t iteration_seed);

/// Forward phases only: the loss step() would record for this latent and
/// seed, without touching t. Debug/verification hook.
LossValue step_loss(const LatentTensor& t, const StepContext& ctx, std::uint64_t iteration_seed);

/// Run all iterations of one level; appends one record per iteration.
void run_level(LatentTensor& t, const LevelConfig& level, int level_index, const RunConfig& cfg,
               const StepContext& ctx, LossTrace& trace, RunObserver* observer);

struct RunResult {
    ImageBuffer image; // decoded at the last level's resolution, pre-superres
    LossTrace trace;
};

/// The full hierarchical run: init, per-level optimization, latent transfer
/// between levels, final decode.
RunResult run_hierarchy(const RunConfig& cfg, const EncoderPtr& enc, const GeneratorPtr& gen,
                        RunObserver* observer = nullptr);

} // namespace promptpainter
