#pragma once

#include "promptpainter/embedding/embedding.hpp"

#include <vector>

namespace promptpainter {

/// Value of the spherical style loss plus its per-style breakdown.
/// per_style holds the raw squared-arcsin terms, one per style parameter;
/// total is their weighted combination (2 / sum(w)) * sum(w_i * term_i).
struct LossValue {
    double total = 0.0;
    std::vector<double> per_style;
};

/// Squared arcsin of the half chord between two unit vectors:
/// arcsin(clamp(||f - s|| / 2, 0, 1))^2, which equals (theta / 2)^2 for
/// geodesic angle theta. Inputs must be unit norm within 1e-3.
double chord_term(const EmbeddingVector& f, const EmbeddingVector& s);

/// Gradient of chord_term with respect to f. Near the antipodal point the
/// arcsin derivative is capped (argument limited to 1 - 1e-7); at f == s
/// the gradient is exactly zero.
std::vector<double> chord_term_grad(const EmbeddingVector& f, const EmbeddingVector& s);

/// Weighted spherical loss of one embedding against a style set. With all
/// weights equal to 1 this is (2/|S|) * sum of chord terms.
LossValue style_loss(const EmbeddingVector& f, const std::vector<WeightedEmbedding>& styles);

/// Gradient of style_loss.total with respect to f.
std::vector<double> style_loss_grad(const EmbeddingVector& f,
                                    const std::vector<WeightedEmbedding>& styles);

/// Arithmetic mean of style_loss over a batch of augmented views.
LossValue batch_loss(const std::vector<EmbeddingVector>& views,
                     const std::vector<WeightedEmbedding>& styles);

} // namespace promptpainter
