#include "promptpainter/embedding/toy_encoder.hpp"

#include "promptpainter/core/errors.hpp"
#include "promptpainter/core/imageops.hpp"
#include "promptpainter/core/rng.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace promptpainter {

namespace {

constexpr int kToyDim = 16;
constexpr int kToyResolution = 32;
constexpr std::uint64_t kToyProjectionSeed = 0x746f792d656e6331ULL;
constexpr std::uint64_t kToyTextSalt = 0x746f792d74787431ULL;

std::vector<double> seeded_projection(int dim, int resolution) {
    const int n = resolution * resolution * 3;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Rng rng(kToyProjectionSeed);
    std::vector<double> w(static_cast<std::size_t>(dim) * n);
    for (double& v : w) {
        v = rng.normal() * scale;
    }
    return w;
}

} // namespace

ToyEncoder::ToyEncoder()
    : id_("toy-encoder"),
      dim_(kToyDim),
      input_resolution_(kToyResolution),
      projection_(seeded_projection(kToyDim, kToyResolution)),
      text_salt_(kToyTextSalt) {}

ToyEncoder::ToyEncoder(std::string id, int dim, int input_resolution,
                       std::vector<double> projection, std::uint64_t text_salt)
    : id_(std::move(id)),
      dim_(dim),
      input_resolution_(input_resolution),
      projection_(std::move(projection)),
      text_salt_(text_salt) {
    if (dim_ <= 0 || input_resolution_ <= 0) {
        throw BackendError("encoder dimension and input resolution must be positive");
    }
    const std::size_t expect =
        static_cast<std::size_t>(dim_) * input_resolution_ * input_resolution_ * 3;
    if (projection_.size() != expect) {
        throw BackendError("encoder projection has wrong size: expected " +
                           std::to_string(expect) + ", got " + std::to_string(projection_.size()));
    }
}

EmbeddingVector ToyEncoder::embed_text(std::string_view text) const {
    if (text.empty()) {
        throw DomainError("cannot embed empty text");
    }
    Rng rng(derive_seed({text_salt_, hash_bytes(text.data(), text.size())}));
    std::vector<double> raw(static_cast<std::size_t>(dim_));
    for (double& v : raw) {
        v = rng.normal();
    }
    return normalize(raw);
}

EmbeddingVector ToyEncoder::embed_image(const ImageBuffer& img) const {
    const Field x = imageops::resize_bilinear(img.field(), input_resolution_, input_resolution_);
    const std::size_t n = x.data.size();
    std::vector<double> raw(static_cast<std::size_t>(dim_));
    bool any_nonzero = false;
    for (int k = 0; k < dim_; ++k) {
        const double* row = projection_.data() + static_cast<std::size_t>(k) * n;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += row[i] * x.data[i];
        }
        raw[k] = std::tanh(acc);
        any_nonzero |= raw[k] != 0.0;
    }
    if (!any_nonzero) {
        // An all-black image projects to zero, which has no direction. Pin
        // it to a fixed axis so every valid image embeds.
        raw[0] = 1.0;
    }
    return normalize(raw);
}

Field ToyEncoder::embed_image_grad(const ImageBuffer& img,
                                   std::span<const double> grad_embedding) const {
    if (static_cast<int>(grad_embedding.size()) != dim_) {
        throw DomainError("embedding gradient dimension mismatch");
    }
    const Field x = imageops::resize_bilinear(img.field(), input_resolution_, input_resolution_);
    const std::size_t n = x.data.size();

    // Recompute the forward pass up to normalization.
    std::vector<double> u(static_cast<std::size_t>(dim_));
    for (int k = 0; k < dim_; ++k) {
        const double* row = projection_.data() + static_cast<std::size_t>(k) * n;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += row[i] * x.data[i];
        }
        u[k] = std::tanh(acc);
    }
    const double norm = l2_norm(u);
    if (norm == 0.0) {
        throw NumericError("embedding collapsed to the zero vector");
    }

    // Back through normalize: du = (g - y (y . g)) / ||u||, y = u / ||u||.
    double y_dot_g = 0.0;
    for (int k = 0; k < dim_; ++k) {
        y_dot_g += (u[k] / norm) * grad_embedding[k];
    }
    std::vector<double> dz(static_cast<std::size_t>(dim_));
    for (int k = 0; k < dim_; ++k) {
        const double du = (grad_embedding[k] - (u[k] / norm) * y_dot_g) / norm;
        dz[k] = du * (1.0 - u[k] * u[k]); // tanh'
    }

    // Back through the projection and the resample.
    Field dx(input_resolution_, input_resolution_);
    for (int k = 0; k < dim_; ++k) {
        const double* row = projection_.data() + static_cast<std::size_t>(k) * n;
        const double g = dz[k];
        if (g == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            dx.data[i] += g * row[i];
        }
    }
    return imageops::resize_bilinear_adjoint(dx, img.height(), img.width());
}

} // namespace promptpainter
