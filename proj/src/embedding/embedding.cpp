#include "promptpainter/embedding/embedding.hpp"

#include "promptpainter/core/errors.hpp"
#include "promptpainter/core/png_io.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace promptpainter {

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

EmbeddingVector normalize(std::span<const double> v) {
    if (v.empty()) {
        throw DomainError("cannot normalize empty vector");
    }
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw DomainError("cannot normalize vector with non-finite components");
        }
    }
    const double n = l2_norm(v);
    if (n == 0.0) {
        throw DomainError("cannot normalize zero vector");
    }
    EmbeddingVector out;
    out.values.reserve(v.size());
    for (double x : v) {
        out.values.push_back(x / n);
    }
    return out;
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.values.size() != b.values.size()) {
        throw DomainError("embedding dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        s += a.values[i] * b.values[i];
    }
    return s;
}

StyleParam StyleParam::text(std::string prompt, double weight) {
    StyleParam p;
    p.kind = Kind::text;
    p.payload = std::move(prompt);
    p.weight = weight;
    return p;
}

StyleParam StyleParam::image(std::string path, double weight) {
    StyleParam p;
    p.kind = Kind::image;
    p.payload = std::move(path);
    p.weight = weight;
    return p;
}

void StyleParam::validate() const {
    if (payload.empty()) {
        throw DomainError(kind == Kind::text ? "style text must be non-empty"
                                             : "style image path must be non-empty");
    }
    if (!(weight > 0.0)) {
        throw DomainError("style weight must be positive");
    }
}

void StyleSet::validate() const {
    if (params.empty()) {
        throw DomainError("style set must contain at least one parameter");
    }
    for (const auto& p : params) {
        p.validate();
    }
}

StyleProjector::StyleProjector(EncoderPtr encoder) : encoder_(std::move(encoder)) {
    if (!encoder_) {
        throw BackendError("StyleProjector requires an encoder");
    }
}

const std::vector<WeightedEmbedding>& StyleProjector::project(const StyleSet& styles) {
    styles.validate();

    // Fingerprint of the whole set, weights included (hex floats: exact).
    std::string set_key;
    for (const auto& p : styles.params) {
        set_key += p.kind == StyleParam::Kind::text ? 'T' : 'I';
        set_key += p.payload;
        set_key += '\x1f';
        char w[32];
        std::snprintf(w, sizeof w, "%a", p.weight);
        set_key += w;
        set_key += '\x1e';
    }
    if (auto it = set_cache_.find(set_key); it != set_cache_.end()) {
        return it->second;
    }

    std::vector<WeightedEmbedding> projected;
    projected.reserve(styles.params.size());
    for (std::size_t i = 0; i < styles.params.size(); ++i) {
        const auto& p = styles.params[i];
        const auto key = std::make_pair(static_cast<int>(p.kind), p.payload);
        auto cached = param_cache_.find(key);
        if (cached == param_cache_.end()) {
            const std::string tag = "style parameter " + std::to_string(i) + ": ";
            try {
                EmbeddingVector e = p.kind == StyleParam::Kind::text
                                        ? encoder_->embed_text(p.payload)
                                        : encoder_->embed_image(load_png(p.payload));
                cached = param_cache_.emplace(key, std::move(e)).first;
            } catch (const IoError& err) {
                throw IoError(tag + err.what());
            } catch (const BackendError& err) {
                throw BackendError(tag + err.what());
            } catch (const DomainError& err) {
                throw DomainError(tag + err.what());
            }
        }
        projected.push_back({cached->second, p.weight});
    }
    return set_cache_.emplace(std::move(set_key), std::move(projected)).first->second;
}

std::vector<WeightedEmbedding> project_style_set(const EncoderPtr& encoder, const StyleSet& styles) {
    StyleProjector projector(encoder);
    return projector.project(styles);
}

} // namespace promptpainter
