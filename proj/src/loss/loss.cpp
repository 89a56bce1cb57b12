#include "promptpainter/loss/loss.hpp"

#include "promptpainter/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace promptpainter {

namespace {

constexpr double kUnitNormTolerance = 1e-3;
// Cap on the arcsin argument inside the derivative; keeps the gradient
// bounded at (near-)antipodal pairs where 1/sqrt(1 - a^2) diverges.
constexpr double kDerivativeArgCap = 1.0 - 1e-7;

void require_unit(const EmbeddingVector& v, const char* name) {
    const double n = l2_norm(v.values);
    if (std::fabs(n - 1.0) > kUnitNormTolerance) {
        throw DomainError(std::string(name) + " must be unit norm, got ||v|| = " + std::to_string(n));
    }
}

double half_chord(const EmbeddingVector& f, const EmbeddingVector& s) {
    if (f.values.size() != s.values.size()) {
        throw DomainError("embedding dimension mismatch in loss");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double d = f.values[i] - s.values[i];
        sq += d * d;
    }
    return 0.5 * std::sqrt(sq);
}

} // namespace

double chord_term(const EmbeddingVector& f, const EmbeddingVector& s) {
    require_unit(f, "chord_term input f");
    require_unit(s, "chord_term input s");
    // Float dust can push the argument past 1 for antipodal pairs.
    const double a = std::clamp(half_chord(f, s), 0.0, 1.0);
    const double t = std::asin(a);
    return t * t;
}

std::vector<double> chord_term_grad(const EmbeddingVector& f, const EmbeddingVector& s) {
    require_unit(f, "chord_term input f");
    require_unit(s, "chord_term input s");
    const std::size_t d = f.values.size();
    std::vector<double> grad(d, 0.0);
    const double a_raw = half_chord(f, s);
    const double r = 2.0 * a_raw; // ||f - s||
    if (r < 1e-12) {
        return grad; // the term is quadratic around f == s; gradient vanishes
    }
    const double a = std::min(std::clamp(a_raw, 0.0, 1.0), kDerivativeArgCap);
    // d/df asin(a)^2 = asin(a) / (sqrt(1 - a^2) * r) * (f - s)
    const double factor = std::asin(a) / (std::sqrt(1.0 - a * a) * r);
    for (std::size_t i = 0; i < d; ++i) {
        grad[i] = factor * (f.values[i] - s.values[i]);
    }
    return grad;
}

LossValue style_loss(const EmbeddingVector& f, const std::vector<WeightedEmbedding>& styles) {
    if (styles.empty()) {
        throw DomainError("style_loss requires a non-empty style list");
    }
    LossValue out;
    out.per_style.reserve(styles.size());
    double weight_sum = 0.0;
    double weighted = 0.0;
    for (const auto& s : styles) {
        const double term = chord_term(f, s.embedding);
        out.per_style.push_back(term);
        weighted += s.weight * term;
        weight_sum += s.weight;
    }
    out.total = 2.0 * weighted / weight_sum;
    return out;
}

std::vector<double> style_loss_grad(const EmbeddingVector& f,
                                    const std::vector<WeightedEmbedding>& styles) {
    if (styles.empty()) {
        throw DomainError("style_loss requires a non-empty style list");
    }
    std::vector<double> grad(f.values.size(), 0.0);
    double weight_sum = 0.0;
    for (const auto& s : styles) {
        weight_sum += s.weight;
    }
    for (const auto& s : styles) {
        const auto g = chord_term_grad(f, s.embedding);
        const double scale = 2.0 * s.weight / weight_sum;
        for (std::size_t i = 0; i < grad.size(); ++i) {
            grad[i] += scale * g[i];
        }
    }
    return grad;
}

LossValue batch_loss(const std::vector<EmbeddingVector>& views,
                     const std::vector<WeightedEmbedding>& styles) {
    if (views.empty()) {
        throw DomainError("batch_loss requires at least one view");
    }
    LossValue acc;
    acc.per_style.assign(styles.size(), 0.0);
    for (const auto& v : views) {
        const LossValue l = style_loss(v, styles);
        acc.total += l.total;
        for (std::size_t i = 0; i < l.per_style.size(); ++i) {
            acc.per_style[i] += l.per_style[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(views.size());
    acc.total *= inv;
    for (double& v : acc.per_style) {
        v *= inv;
    }
    return acc;
}

} // namespace promptpainter
