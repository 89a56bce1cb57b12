#pragma once

#include "promptpainter/core/field.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace promptpainter {

/// Parameters of the per-iteration random view chain. Defaults follow the
/// library's documented configuration; crop_size 0 means "use the encoder's
/// input resolution" and is resolved at run setup.
struct AugmentConfig {
    int n_views = 8;
    double resize_low = 0.8;
    double resize_high = 1.2;
    int crop_size = 0;
    double perspective_scale = 0.2;
    double flip_probability = 0.5;
    double gaussian_sigma = 0.02;

    void validate() const;
};

/// Multi-octave value-noise parameters.
struct NoiseConfig {
    int octaves = 4;
    double persistence = 0.5;
    int base_frequency = 4;
    double amplitude = 0.1;

    void validate() const;
};

/// Seeded multi-octave value noise in [-1, 1]: octave o contributes a
/// persistence^o weighted bilinear interpolation of a seeded lattice at
/// base_frequency * 2^o cells per edge; the sum is renormalized by
/// sum(persistence^o). Single channel, broadcast to 3.
Field fractal_noise(int height, int width, const NoiseConfig& cfg, std::uint64_t seed);

/// clamp(img + amplitude * fractal_noise, 0, 1).
ImageBuffer add_noise(const ImageBuffer& img, const NoiseConfig& cfg, std::uint64_t seed);

/// Gradient of add_noise with respect to img: passes grad_out through where
/// the sum stayed strictly inside [0, 1], zero where the clamp engaged.
Field add_noise_grad(const ImageBuffer& img, const NoiseConfig& cfg, std::uint64_t seed,
                     const Field& grad_out);

/// All random draws of one view, fixed up front so forward and gradient
/// passes replay the identical transform.
struct ViewParams {
    double scale_x = 1.0, scale_y = 1.0;
    int resized_h = 0, resized_w = 0;
    int crop_x = 0, crop_y = 0;
    std::array<double, 8> corner_shift{}; // TL.x TL.y TR.x TR.y BR.x BR.y BL.x BL.y
    bool flip = false;
    std::uint64_t pixel_noise_seed = 0;

    static ViewParams sample(int img_h, int img_w, const AugmentConfig& cfg, std::uint64_t seed);
};

/// One random view: per-axis bilinear resize, random crop to crop_size,
/// random perspective warp, horizontal flip, additive Gaussian pixel noise,
/// clamp to [0, 1]. Deterministic by seed; differentiable in the pixels.
ImageBuffer random_view(const ImageBuffer& img, const AugmentConfig& cfg, std::uint64_t seed);

/// random_view with explicit, pre-sampled parameters.
ImageBuffer apply_view(const ImageBuffer& img, const AugmentConfig& cfg, const ViewParams& p);

/// Gradient of apply_view with respect to the input pixels.
Field apply_view_grad(const ImageBuffer& img, const AugmentConfig& cfg, const ViewParams& p,
                      const Field& grad_out);

/// n independent views with per-view seeds seed + i.
std::vector<ImageBuffer> augment_batch(const ImageBuffer& img, const AugmentConfig& cfg, int n,
                                       std::uint64_t seed);

} // namespace promptpainter
