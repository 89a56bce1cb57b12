#pragma once

#include "promptpainter/core/png_io.hpp"
#include "promptpainter/embedding/toy_encoder.hpp"
#include "promptpainter/generator/toy_generator.hpp"
#include "promptpainter/pipeline/pipeline.hpp"
#include "test_support.hpp"

#include <memory>
#include <string>

namespace pptest {

/// Augmentation with every random stage disabled; crop covers the level.
inline promptpainter::AugmentConfig identity_augment(int crop) {
    promptpainter::AugmentConfig cfg;
    cfg.n_views = 1;
    cfg.resize_low = 1.0;
    cfg.resize_high = 1.0;
    cfg.crop_size = crop;
    cfg.perspective_scale = 0.0;
    cfg.flip_probability = 0.0;
    cfg.gaussian_sigma = 0.0;
    return cfg;
}

/// The seeded convergence fixture: a 32x32 run against the embedding of a
/// decodable target image, deterministic descent (no stochastic stages).
/// Writes the target PNG into `dir` and returns the ready-to-run config.
inline promptpainter::RunConfig convergence_fixture(const TempDir& dir,
                                                    const promptpainter::Generator& gen,
                                                    int iterations, double learning_rate,
                                                    promptpainter::OptimizerKind kind) {
    const std::string target_path = dir.file("target.png");
    promptpainter::save_png(target_path, gen.decode(gen.random_latent(32, 5)));

    promptpainter::RunConfig cfg;
    cfg.levels = {{32, iterations, learning_rate}};
    cfg.augment = identity_augment(32);
    cfg.noise.amplitude = 0.0;
    cfg.optimizer = kind;
    cfg.seed = 7;
    cfg.styles.params.push_back(promptpainter::StyleParam::image(target_path));
    return cfg;
}

} // namespace pptest
