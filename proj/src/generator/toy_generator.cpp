#include "promptpainter/generator/toy_generator.hpp"

#include "promptpainter/core/errors.hpp"
#include "promptpainter/core/imageops.hpp"
#include "promptpainter/core/rng.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace promptpainter {

namespace {

constexpr std::uint64_t kToyGeneratorSeed = 0x746f792d67656e31ULL;
constexpr double kSquashGain = 4.0;   // slope 1 at mid-gray
constexpr double kSquashCenter = 0.5;

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Pseudo-inverse of the channels x 3 encode map: (E^T E)^-1 E^T, so that
// decode_map * encode_map == I3 and pooled colors round-trip exactly.
std::vector<double> pseudo_inverse_3(const std::vector<double>& e, int channels) {
    double g[3][3] = {};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < channels; ++k) {
                acc += e[static_cast<std::size_t>(k) * 3 + i] * e[static_cast<std::size_t>(k) * 3 + j];
            }
            g[i][j] = acc;
        }
    }
    const double det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                       g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                       g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    if (std::fabs(det) < 1e-12) {
        throw BackendError("generator encode map is rank deficient");
    }
    double inv[3][3];
    inv[0][0] = (g[1][1] * g[2][2] - g[1][2] * g[2][1]) / det;
    inv[0][1] = (g[0][2] * g[2][1] - g[0][1] * g[2][2]) / det;
    inv[0][2] = (g[0][1] * g[1][2] - g[0][2] * g[1][1]) / det;
    inv[1][0] = (g[1][2] * g[2][0] - g[1][0] * g[2][2]) / det;
    inv[1][1] = (g[0][0] * g[2][2] - g[0][2] * g[2][0]) / det;
    inv[1][2] = (g[0][2] * g[1][0] - g[0][0] * g[1][2]) / det;
    inv[2][0] = (g[1][0] * g[2][1] - g[1][1] * g[2][0]) / det;
    inv[2][1] = (g[0][1] * g[2][0] - g[0][0] * g[2][1]) / det;
    inv[2][2] = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) / det;

    std::vector<double> d(static_cast<std::size_t>(3) * channels);
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < channels; ++k) {
            double acc = 0.0;
            for (int j = 0; j < 3; ++j) {
                acc += inv[i][j] * e[static_cast<std::size_t>(k) * 3 + j];
            }
            d[static_cast<std::size_t>(i) * channels + k] = acc;
        }
    }
    return d;
}

std::vector<double> seeded_encode_map(int channels) {
    Rng rng(kToyGeneratorSeed);
    std::vector<double> e(static_cast<std::size_t>(channels) * 3);
    for (double& v : e) {
        v = rng.normal();
    }
    return e;
}

} // namespace

ToyGenerator::ToyGenerator()
    : id_("toy-generator"),
      channels_(kChannels),
      stride_(kStride),
      encode_map_(seeded_encode_map(kChannels)),
      decode_map_(pseudo_inverse_3(encode_map_, kChannels)) {}

ToyGenerator::ToyGenerator(std::string id, int channels, int stride,
                           std::vector<double> encode_map, std::vector<double> decode_map)
    : id_(std::move(id)),
      channels_(channels),
      stride_(stride),
      encode_map_(std::move(encode_map)),
      decode_map_(std::move(decode_map)) {
    if (channels_ < 1 || stride_ < 1) {
        throw BackendError("generator channels and stride must be positive");
    }
    if (encode_map_.size() != static_cast<std::size_t>(channels_) * 3 ||
        decode_map_.size() != static_cast<std::size_t>(channels_) * 3) {
        throw BackendError("generator channel maps have wrong size");
    }
}

void ToyGenerator::check_resolution(int resolution) const {
    if (resolution < 8 || resolution % stride_ != 0) {
        throw DomainError("resolution " + std::to_string(resolution) +
                          " unsupported: must be >= 8 and divisible by stride " +
                          std::to_string(stride_));
    }
}

LatentShape ToyGenerator::latent_shape_for(int resolution) const {
    check_resolution(resolution);
    return {channels_, resolution / stride_, resolution / stride_};
}

LatentTensor ToyGenerator::encode(const ImageBuffer& img) const {
    if (img.height() != img.width()) {
        throw DomainError("toy generator expects square images, got " +
                          std::to_string(img.height()) + "x" + std::to_string(img.width()));
    }
    if (img.height() % stride_ != 0) {
        throw DomainError("image dimensions must be divisible by stride " +
                          std::to_string(stride_) + ", got " + std::to_string(img.height()));
    }
    const Field pooled = imageops::avgpool(img.field(), stride_);

    LatentTensor t;
    t.shape = {channels_, pooled.height, pooled.width};
    t.resolution_tag = img.height();
    t.values.resize(t.shape.size());
    for (int c = 0; c < channels_; ++c) {
        const double* e = encode_map_.data() + static_cast<std::size_t>(c) * 3;
        for (int y = 0; y < pooled.height; ++y) {
            for (int x = 0; x < pooled.width; ++x) {
                t.at(c, y, x) = e[0] * pooled.at(y, x, 0) + e[1] * pooled.at(y, x, 1) +
                                e[2] * pooled.at(y, x, 2);
            }
        }
    }
    return t;
}

Field ToyGenerator::decode_linear_upsampled(const LatentTensor& t) const {
    Field rgb(t.shape.height, t.shape.width);
    for (int y = 0; y < t.shape.height; ++y) {
        for (int x = 0; x < t.shape.width; ++x) {
            for (int k = 0; k < 3; ++k) {
                const double* d = decode_map_.data() + static_cast<std::size_t>(k) * channels_;
                double acc = 0.0;
                for (int c = 0; c < channels_; ++c) {
                    acc += d[c] * t.at(c, y, x);
                }
                rgb.at(y, x, k) = acc;
            }
        }
    }
    return imageops::resize_bilinear(rgb, t.shape.height * stride_, t.shape.width * stride_);
}

ImageBuffer ToyGenerator::decode(const LatentTensor& t) const {
    if (!(t.shape == latent_shape_for(t.resolution_tag))) {
        throw DomainError("latent shape does not match generator layout for resolution " +
                          std::to_string(t.resolution_tag));
    }
    Field up = decode_linear_upsampled(t);
    for (double& v : up.data) {
        v = logistic(kSquashGain * (v - kSquashCenter));
    }
    return ImageBuffer::clamped(std::move(up));
}

LatentTensor ToyGenerator::decode_grad(const LatentTensor& t, const Field& grad_image) const {
    if (!(t.shape == latent_shape_for(t.resolution_tag))) {
        throw DomainError("latent shape does not match generator layout");
    }
    if (grad_image.height != t.resolution_tag || grad_image.width != t.resolution_tag) {
        throw DomainError("decode gradient has wrong image shape");
    }
    const Field up = decode_linear_upsampled(t);

    // Back through the squash: s' = gain * s * (1 - s).
    Field dup(up.height, up.width);
    for (std::size_t i = 0; i < up.data.size(); ++i) {
        const double s = logistic(kSquashGain * (up.data[i] - kSquashCenter));
        dup.data[i] = grad_image.data[i] * kSquashGain * s * (1.0 - s);
    }

    const Field drgb = imageops::resize_bilinear_adjoint(dup, t.shape.height, t.shape.width);

    LatentTensor grad;
    grad.shape = t.shape;
    grad.resolution_tag = t.resolution_tag;
    grad.values.assign(t.values.size(), 0.0);
    for (int c = 0; c < channels_; ++c) {
        for (int y = 0; y < t.shape.height; ++y) {
            for (int x = 0; x < t.shape.width; ++x) {
                double acc = 0.0;
                for (int k = 0; k < 3; ++k) {
                    acc += decode_map_[static_cast<std::size_t>(k) * channels_ + c] * drgb.at(y, x, k);
                }
                grad.at(c, y, x) = acc;
            }
        }
    }
    return grad;
}

LatentTensor ToyGenerator::random_latent(int resolution, std::uint64_t seed) const {
    const LatentShape shape = latent_shape_for(resolution);
    LatentTensor t;
    t.shape = shape;
    t.resolution_tag = resolution;
    t.values.resize(shape.size());
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(resolution), 0x6c6174656e74ULL}));
    for (double& v : t.values) {
        v = rng.normal();
    }
    return t;
}

} // namespace promptpainter
