#pragma once

#include "promptpainter/embedding/embedding.hpp"

#include <cstdint>
#include <vector>

namespace promptpainter {

/// Deterministic CPU encoder for tests and desk-scale runs.
///
/// Image path (differentiable): bilinear-resample to 32x32, flatten,
/// multiply by a fixed seeded 16 x 3072 projection, tanh, normalize.
/// Text path: a seeded hash of the string selects a fixed random vector,
/// normalized. No external weights.
class ToyEncoder : public Encoder {
public:
    ToyEncoder();

    /// Shared by the weights-backed projection encoder: builds the same
    /// projection from explicit coefficients.
    ToyEncoder(std::string id, int dim, int input_resolution, std::vector<double> projection,
               std::uint64_t text_salt);

    const std::string& id() const override { return id_; }
    int dim() const override { return dim_; }
    int input_resolution() const override { return input_resolution_; }
    bool reentrant() const override { return true; }

    EmbeddingVector embed_text(std::string_view text) const override;
    EmbeddingVector embed_image(const ImageBuffer& img) const override;
    Field embed_image_grad(const ImageBuffer& img,
                           std::span<const double> grad_embedding) const override;

    const std::vector<double>& projection() const { return projection_; }
    std::uint64_t text_salt() const { return text_salt_; }

private:
    std::string id_;
    int dim_;
    int input_resolution_;
    std::vector<double> projection_; // dim x (res*res*3), row-major
    std::uint64_t text_salt_;
};

} // namespace promptpainter
