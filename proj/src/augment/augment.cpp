#include "promptpainter/augment/augment.hpp"

#include "promptpainter/core/errors.hpp"
#include "promptpainter/core/imageops.hpp"
#include "promptpainter/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace promptpainter {

namespace {

constexpr std::uint64_t kLatticeTag = 0x6c61747469636531ULL;
constexpr std::uint64_t kPixelNoiseTag = 0x7069786e6f697365ULL;

// Lattice value in [-1, 1], independent of traversal order.
double lattice_value(std::uint64_t seed, int octave, int i, int j) {
    const std::uint64_t h = derive_seed({seed, kLatticeTag, static_cast<std::uint64_t>(octave),
                                         static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
    return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

int round_dim(double scale, int dim) {
    return std::max(1, static_cast<int>(std::lround(scale * dim)));
}

imageops::Quad perspective_quad(int size, const std::array<double, 8>& shift) {
    const double m = static_cast<double>(size - 1);
    return imageops::Quad{
        {0.0 + shift[0], m + shift[2], m + shift[4], 0.0 + shift[6]},
        {0.0 + shift[1], 0.0 + shift[3], m + shift[5], m + shift[7]},
    };
}

bool all_zero(const std::array<double, 8>& a) {
    for (double v : a) {
        if (v != 0.0) {
            return false;
        }
    }
    return true;
}

} // namespace

void AugmentConfig::validate() const {
    if (n_views < 1) {
        throw DomainError("augment.n_views must be >= 1");
    }
    if (!(resize_low > 0.0) || resize_low > resize_high) {
        throw DomainError("augment.resize_range requires 0 < low <= high");
    }
    if (crop_size != 0 && crop_size < 8) {
        throw DomainError("augment.crop_size must be >= 8");
    }
    if (perspective_scale < 0.0 || perspective_scale >= 1.0) {
        throw DomainError("augment.perspective_scale must lie in [0, 1)");
    }
    if (flip_probability < 0.0 || flip_probability > 1.0) {
        throw DomainError("augment.flip_probability must lie in [0, 1]");
    }
    if (gaussian_sigma < 0.0) {
        throw DomainError("augment.gaussian_sigma must be >= 0");
    }
}

void NoiseConfig::validate() const {
    if (octaves < 1) {
        throw DomainError("noise.octaves must be >= 1");
    }
    if (!(persistence > 0.0) || persistence > 1.0) {
        throw DomainError("noise.persistence must lie in (0, 1]");
    }
    if (base_frequency < 1) {
        throw DomainError("noise.base_frequency must be >= 1");
    }
    if (amplitude < 0.0 || amplitude > 0.5) {
        throw DomainError("noise.amplitude must lie in [0, 0.5]");
    }
}

Field fractal_noise(int height, int width, const NoiseConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (height < 8 || width < 8) {
        throw DomainError("fractal_noise requires dimensions >= 8");
    }

    Field out(height, width);
    double total_weight = 0.0;
    double weight = 1.0;
    for (int o = 0; o < cfg.octaves; ++o, weight *= cfg.persistence) {
        total_weight += weight;
        const int freq = cfg.base_frequency << o;
        for (int y = 0; y < height; ++y) {
            const double gy = static_cast<double>(y) * freq / height;
            const int j0 = static_cast<int>(gy);
            const double fy = gy - j0;
            for (int x = 0; x < width; ++x) {
                const double gx = static_cast<double>(x) * freq / width;
                const int i0 = static_cast<int>(gx);
                const double fx = gx - i0;
                const double v00 = lattice_value(seed, o, i0, j0);
                const double v10 = lattice_value(seed, o, i0 + 1, j0);
                const double v01 = lattice_value(seed, o, i0, j0 + 1);
                const double v11 = lattice_value(seed, o, i0 + 1, j0 + 1);
                const double v = (1 - fy) * ((1 - fx) * v00 + fx * v10) +
                                 fy * ((1 - fx) * v01 + fx * v11);
                out.at(y, x, 0) += weight * v;
            }
        }
    }
    const double inv = 1.0 / total_weight;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double v = out.at(y, x, 0) * inv;
            out.at(y, x, 0) = v;
            out.at(y, x, 1) = v;
            out.at(y, x, 2) = v;
        }
    }
    return out;
}

ImageBuffer add_noise(const ImageBuffer& img, const NoiseConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (cfg.amplitude == 0.0) {
        return img;
    }
    Field out = img.field();
    const Field noise = fractal_noise(img.height(), img.width(), cfg, seed);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] += cfg.amplitude * noise.data[i];
    }
    return ImageBuffer::clamped(std::move(out));
}

Field add_noise_grad(const ImageBuffer& img, const NoiseConfig& cfg, std::uint64_t seed,
                     const Field& grad_out) {
    if (!grad_out.same_shape(img.field())) {
        throw DomainError("add_noise gradient shape mismatch");
    }
    if (cfg.amplitude == 0.0) {
        return grad_out;
    }
    const Field noise = fractal_noise(img.height(), img.width(), cfg, seed);
    Field grad_in(img.height(), img.width());
    for (std::size_t i = 0; i < grad_in.data.size(); ++i) {
        const double pre = img.field().data[i] + cfg.amplitude * noise.data[i];
        grad_in.data[i] = (pre > 0.0 && pre < 1.0) ? grad_out.data[i] : 0.0;
    }
    return grad_in;
}

ViewParams ViewParams::sample(int img_h, int img_w, const AugmentConfig& cfg, std::uint64_t seed) {
    Rng rng(derive_seed({seed, 0x76696577ULL}));
    ViewParams p;
    p.scale_x = rng.uniform(cfg.resize_low, cfg.resize_high);
    p.scale_y = rng.uniform(cfg.resize_low, cfg.resize_high);
    p.resized_h = round_dim(p.scale_y, img_h);
    p.resized_w = round_dim(p.scale_x, img_w);
    p.crop_x = rng.uniform_int(0, p.resized_w - cfg.crop_size);
    p.crop_y = rng.uniform_int(0, p.resized_h - cfg.crop_size);
    const double d = cfg.perspective_scale * cfg.crop_size;
    for (double& s : p.corner_shift) {
        s = rng.uniform(-d, d);
    }
    p.flip = rng.uniform01() < cfg.flip_probability;
    p.pixel_noise_seed = derive_seed({seed, kPixelNoiseTag, rng.next_u64()});
    return p;
}

ImageBuffer apply_view(const ImageBuffer& img, const AugmentConfig& cfg, const ViewParams& p) {
    const int cs = cfg.crop_size;
    if (cs < 8) {
        throw DomainError("augment.crop_size must be resolved (>= 8) before sampling views");
    }
    if (p.resized_h < cs || p.resized_w < cs) {
        throw DomainError("image too small after resize: " + std::to_string(p.resized_w) + "x" +
                          std::to_string(p.resized_h) + " < crop " + std::to_string(cs));
    }

    Field f = imageops::resize_bilinear(img.field(), p.resized_h, p.resized_w);
    f = imageops::crop(f, p.crop_y, p.crop_x, cs, cs);
    if (!all_zero(p.corner_shift)) {
        f = imageops::perspective_warp(f, perspective_quad(cs, p.corner_shift));
    }
    if (p.flip) {
        f = imageops::hflip(f);
    }
    if (cfg.gaussian_sigma > 0.0) {
        Rng rng(p.pixel_noise_seed);
        for (double& v : f.data) {
            v += cfg.gaussian_sigma * rng.normal();
        }
    }
    return ImageBuffer::clamped(std::move(f));
}

Field apply_view_grad(const ImageBuffer& img, const AugmentConfig& cfg, const ViewParams& p,
                      const Field& grad_out) {
    const int cs = cfg.crop_size;
    if (grad_out.height != cs || grad_out.width != cs) {
        throw DomainError("view gradient shape mismatch");
    }

    // Replay the forward chain to locate the clamp mask.
    Field pre = imageops::resize_bilinear(img.field(), p.resized_h, p.resized_w);
    pre = imageops::crop(pre, p.crop_y, p.crop_x, cs, cs);
    if (!all_zero(p.corner_shift)) {
        pre = imageops::perspective_warp(pre, perspective_quad(cs, p.corner_shift));
    }
    if (p.flip) {
        pre = imageops::hflip(pre);
    }
    if (cfg.gaussian_sigma > 0.0) {
        Rng rng(p.pixel_noise_seed);
        for (double& v : pre.data) {
            v += cfg.gaussian_sigma * rng.normal();
        }
    }

    Field g = grad_out;
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        if (!(pre.data[i] > 0.0 && pre.data[i] < 1.0)) {
            g.data[i] = 0.0;
        }
    }
    if (p.flip) {
        g = imageops::hflip(g);
    }
    if (!all_zero(p.corner_shift)) {
        g = imageops::perspective_warp_adjoint(g, perspective_quad(cs, p.corner_shift), cs, cs);
    }
    g = imageops::crop_adjoint(g, p.crop_y, p.crop_x, p.resized_h, p.resized_w);
    return imageops::resize_bilinear_adjoint(g, img.height(), img.width());
}

ImageBuffer random_view(const ImageBuffer& img, const AugmentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    return apply_view(img, cfg, ViewParams::sample(img.height(), img.width(), cfg, seed));
}

std::vector<ImageBuffer> augment_batch(const ImageBuffer& img, const AugmentConfig& cfg, int n,
                                       std::uint64_t seed) {
    if (n < 1) {
        throw DomainError("augment_batch requires n >= 1");
    }
    cfg.validate();
    std::vector<ImageBuffer> views;
    views.reserve(n);
    for (int i = 0; i < n; ++i) {
        views.push_back(random_view(img, cfg, seed + static_cast<std::uint64_t>(i)));
    }
    return views;
}

} // namespace promptpainter
