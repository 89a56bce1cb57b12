#pragma once

#include "promptpainter/core/field.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace promptpainter {

struct LatentShape {
    int channels = 0;
    int height = 0;
    int width = 0;

    std::size_t size() const {
        return static_cast<std::size_t>(channels) * height * width;
    }
    bool operator==(const LatentShape& other) const {
        return channels == other.channels && height == other.height && width == other.width;
    }
};

/// The learnable tensor t in generator latent space. resolution_tag is the
/// square image resolution this latent decodes to.
struct LatentTensor {
    LatentShape shape;
    int resolution_tag = 0;
    std::vector<double> values; // [c][y][x] row-major

    double& at(int c, int y, int x) {
        return values[(static_cast<std::size_t>(c) * shape.height + y) * shape.width + x];
    }
    double at(int c, int y, int x) const {
        return values[(static_cast<std::size_t>(c) * shape.height + y) * shape.width + x];
    }
};

/// Abstract latent generator: image -> latent, latent -> image (with a
/// gradient contract), and seeded latent sampling. The VQGAN role.
class Generator {
public:
    virtual ~Generator() = default;

    virtual const std::string& id() const = 0;

    /// Image dimensions must be divisible by this.
    virtual int stride() const = 0;

    virtual bool differentiable() const = 0;
    virtual bool reentrant() const { return false; }

    virtual LatentShape latent_shape_for(int resolution) const = 0;

    virtual LatentTensor encode(const ImageBuffer& img) const = 0;
    virtual ImageBuffer decode(const LatentTensor& t) const = 0;

    /// Vector-Jacobian product of decode: gradient of <grad_image, decode(t)>
    /// with respect to t. Returned tensor has t's shape.
    virtual LatentTensor decode_grad(const LatentTensor& t, const Field& grad_image) const = 0;

    virtual LatentTensor random_latent(int resolution, std::uint64_t seed) const = 0;
};

using GeneratorPtr = std::shared_ptr<const Generator>;

/// Hand a latent to the next hierarchy level: decode, bilinear-resize the
/// image to new_resolution, re-encode. Works for any generator, including
/// families whose latents cannot be resized directly.
LatentTensor latent_transfer(const Generator& gen, const LatentTensor& t, int new_resolution);

} // namespace promptpainter
