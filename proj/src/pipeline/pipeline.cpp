#include "promptpainter/pipeline/pipeline.hpp"

#include "promptpainter/core/errors.hpp"
#include "promptpainter/core/imageops.hpp"
#include "promptpainter/core/png_io.hpp"
#include "promptpainter/core/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <utility>

namespace promptpainter {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Static index partition; results land in per-index slots, so the outcome
// is identical for any thread count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += workers) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::uint64_t iteration_seed(const RunConfig& cfg, int level_index, int iteration) {
    return derive_seed({cfg.seed, static_cast<std::uint64_t>(level_index),
                        static_cast<std::uint64_t>(iteration)});
}

// Shared by step() and step_loss(): both must replay identical randomness.
std::uint64_t noise_seed_for(std::uint64_t iteration_seed) {
    return derive_seed({iteration_seed, 0x6e6f697365ULL});
}

std::uint64_t view_seed_for(std::uint64_t iteration_seed) {
    return derive_seed({iteration_seed, 0x7669657773ULL});
}

AugmentConfig resolve_crop(const AugmentConfig& aug, const Encoder& enc) {
    AugmentConfig out = aug;
    if (out.crop_size == 0) {
        out.crop_size = enc.input_resolution();
    }
    return out;
}

} // namespace

void RunConfig::validate(const Encoder& enc, const Generator& gen) const {
    if (levels.empty()) {
        throw ConfigError("levels: at least one hierarchy level is required");
    }
    int prev = 0;
    for (const auto& level : levels) {
        if (level.resolution <= prev) {
            throw ConfigError("levels: resolutions must be strictly increasing");
        }
        prev = level.resolution;
        if (level.resolution < 8 || level.resolution % gen.stride() != 0) {
            throw ConfigError("levels: resolution " + std::to_string(level.resolution) +
                              " must be >= 8 and divisible by the generator stride " +
                              std::to_string(gen.stride()));
        }
        if (level.iterations < 1) {
            throw ConfigError("levels: iterations must be >= 1");
        }
        if (!(level.learning_rate > 0.0)) {
            throw ConfigError("levels: learning_rate must be positive");
        }
    }

    AugmentConfig aug = augment;
    if (aug.crop_size == 0) {
        aug.crop_size = enc.input_resolution();
    }
    try {
        aug.validate();
        noise.validate();
        styles.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    // Every level must survive the worst-case downscale draw.
    const int min_res = levels.front().resolution;
    const int worst = std::max(1, static_cast<int>(std::lround(aug.resize_low * min_res)));
    if (worst < aug.crop_size) {
        throw ConfigError("augment.resize_range: low end " + std::to_string(aug.resize_low) +
                          " shrinks level resolution " + std::to_string(min_res) + " below crop_size " +
                          std::to_string(aug.crop_size));
    }
    if (threads < 1) {
        throw ConfigError("threads must be >= 1");
    }
    if (!gen.differentiable()) {
        throw ConfigError("generator '" + gen.id() + "' is not differentiable; it cannot drive optimization");
    }
}

LatentTensor init_latent(const RunConfig& cfg, const Generator& gen) {
    if (cfg.levels.empty()) {
        throw ConfigError("levels: at least one hierarchy level is required");
    }
    const int res = cfg.levels.front().resolution;
    if (!cfg.content.has_value()) {
        return gen.random_latent(res, cfg.seed);
    }
    const ImageBuffer content = load_png(*cfg.content);
    Field resized = imageops::resize_bilinear(content.field(), res, res);
    return gen.encode(ImageBuffer::clamped(std::move(resized)));
}

LossValue step_loss(const LatentTensor& t, const StepContext& ctx, std::uint64_t iteration_seed) {
    const AugmentConfig aug = resolve_crop(ctx.augment, ctx.encoder);
    const ImageBuffer decoded = ctx.generator.decode(t);
    const std::uint64_t view_seed = view_seed_for(iteration_seed);
    const ImageBuffer noisy = add_noise(decoded, ctx.noise, noise_seed_for(iteration_seed));
    std::vector<EmbeddingVector> embeddings;
    embeddings.reserve(aug.n_views);
    for (int i = 0; i < aug.n_views; ++i) {
        const ViewParams p = ViewParams::sample(noisy.height(), noisy.width(), aug,
                                                view_seed + static_cast<std::uint64_t>(i));
        embeddings.push_back(ctx.encoder.embed_image(apply_view(noisy, aug, p)));
    }
    return batch_loss(embeddings, ctx.styles);
}

StepResult step(LatentTensor& t, const StepContext& ctx, std::uint64_t iteration_seed) {
    const AugmentConfig aug = resolve_crop(ctx.augment, ctx.encoder);
    const int n_views = aug.n_views;
    const int threads = (ctx.encoder.reentrant() && ctx.generator.reentrant()) ? ctx.threads : 1;

    // Phase 1: decode the learnable tensor to an RGB image.
    auto t0 = Clock::now();
    ImageBuffer decoded = ctx.generator.decode(t);
    StepResult result{.decoded = decoded};
    result.timings.decode_ms = ms_since(t0);

    // Fractal noise, then the random view chain.
    t0 = Clock::now();
    const std::uint64_t noise_seed = noise_seed_for(iteration_seed);
    const std::uint64_t view_seed = view_seed_for(iteration_seed);
    const ImageBuffer noisy = add_noise(decoded, ctx.noise, noise_seed);
    std::vector<ViewParams> params(n_views);
    std::vector<ImageBuffer> views(n_views);
    parallel_for(n_views, threads, [&](int i) {
        params[i] = ViewParams::sample(noisy.height(), noisy.width(), aug,
                                       view_seed + static_cast<std::uint64_t>(i));
        views[i] = apply_view(noisy, aug, params[i]);
    });
    result.timings.augment_ms = ms_since(t0);

    // Phase 2: project every view into the joint embedding space.
    t0 = Clock::now();
    std::vector<EmbeddingVector> embeddings(n_views);
    parallel_for(n_views, threads, [&](int i) {
        embeddings[i] = ctx.encoder.embed_image(views[i]);
    });

    // Phase 3: spherical loss against the style set.
    const LossValue loss = batch_loss(embeddings, ctx.styles);
    result.timings.embed_ms = ms_since(t0);
    result.total_loss = loss.total;
    result.per_style = loss.per_style;
    if (!std::isfinite(loss.total)) {
        throw NumericError("non-finite loss");
    }

    // Phase 4: backpropagate to the latent.
    t0 = Clock::now();
    std::vector<Field> view_grads(n_views);
    const double inv_views = 1.0 / static_cast<double>(n_views);
    parallel_for(n_views, threads, [&](int i) {
        std::vector<double> g = style_loss_grad(embeddings[i], ctx.styles);
        for (double& v : g) {
            v *= inv_views;
        }
        const Field g_view = ctx.encoder.embed_image_grad(views[i], g);
        view_grads[i] = apply_view_grad(noisy, aug, params[i], g_view);
    });
    Field grad_noisy(noisy.height(), noisy.width());
    for (const Field& g : view_grads) {
        for (std::size_t k = 0; k < grad_noisy.data.size(); ++k) {
            grad_noisy.data[k] += g.data[k];
        }
    }
    const Field grad_decoded = add_noise_grad(decoded, ctx.noise, noise_seed, grad_noisy);
    const LatentTensor grad_t = ctx.generator.decode_grad(t, grad_decoded);
    result.timings.backprop_ms = ms_since(t0);

    t0 = Clock::now();
    ctx.optimizer.update(t.values, grad_t.values);
    result.timings.update_ms = ms_since(t0);
    return result;
}

void run_level(LatentTensor& t, const LevelConfig& level, int level_index, const RunConfig& cfg,
               const StepContext& ctx, LossTrace& trace, RunObserver* observer) {
    for (int iter = 0; iter < level.iterations; ++iter) {
        StepResult r;
        try {
            r = step(t, ctx, iteration_seed(cfg, level_index, iter));
        } catch (const NumericError&) {
            throw RunAbort(level_index, iter,
                           "non-finite loss at level " + std::to_string(level_index) +
                               " iteration " + std::to_string(iter) + "; aborting run");
        }
        if (observer != nullptr) {
            observer->on_decoded(level_index, iter, r.decoded);
        }
        IterationRecord record;
        record.level_index = level_index;
        record.resolution = level.resolution;
        record.iteration = iter;
        record.total_loss = r.total_loss;
        record.per_style = std::move(r.per_style);
        record.timings = r.timings;
        if (observer != nullptr) {
            observer->on_iteration(record);
        }
        trace.records.push_back(std::move(record));
    }
}

RunResult run_hierarchy(const RunConfig& cfg, const EncoderPtr& enc, const GeneratorPtr& gen,
                        RunObserver* observer) {
    if (!enc || !gen) {
        throw BackendError("run_hierarchy requires encoder and generator backends");
    }
    cfg.validate(*enc, *gen);

    StyleProjector projector(enc);
    const std::vector<WeightedEmbedding>& styles = projector.project(cfg.styles);

    LatentTensor t = init_latent(cfg, *gen);
    LossTrace trace;
    for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
        const LevelConfig& level = cfg.levels[li];
        Optimizer optimizer(cfg.optimizer, level.learning_rate, t.values.size());
        StepContext ctx{*enc, *gen, styles, cfg.augment, cfg.noise, optimizer, cfg.threads};
        run_level(t, level, static_cast<int>(li), cfg, ctx, trace, observer);
        if (li + 1 < cfg.levels.size()) {
            t = latent_transfer(*gen, t, cfg.levels[li + 1].resolution);
        }
    }
    return RunResult{gen->decode(t), std::move(trace)};
}

} // namespace promptpainter
