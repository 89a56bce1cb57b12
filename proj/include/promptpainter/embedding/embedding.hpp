#pragma once

#include "promptpainter/core/field.hpp"

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace promptpainter {

/// Unit-norm vector in the joint image-text space.
struct EmbeddingVector {
    std::vector<double> values;

    int dim() const { return static_cast<int>(values.size()); }

    bool operator==(const EmbeddingVector& other) const { return values == other.values; }
};

/// v / ||v||_2. Throws DomainError on a zero or non-finite vector.
EmbeddingVector normalize(std::span<const double> v);

double dot(const EmbeddingVector& a, const EmbeddingVector& b);
double l2_norm(std::span<const double> v);

/// One style parameter: a text prompt or a style image file.
struct StyleParam {
    enum class Kind { text, image };

    Kind kind = Kind::text;
    std::string payload; // prompt text, or image file path
    double weight = 1.0;

    static StyleParam text(std::string prompt, double weight = 1.0);
    static StyleParam image(std::string path, double weight = 1.0);

    /// Throws DomainError when the payload or weight is invalid.
    void validate() const;

    bool operator==(const StyleParam& other) const {
        return kind == other.kind && payload == other.payload && weight == other.weight;
    }
};

/// Ordered, non-empty collection of style parameters.
struct StyleSet {
    std::vector<StyleParam> params;

    void validate() const;

    bool operator==(const StyleSet& other) const { return params == other.params; }
};

/// Abstract joint image-text encoder. Adapters bind this to real models;
/// the built-in toy encoder keeps the whole pipeline testable on CPU.
class Encoder {
public:
    virtual ~Encoder() = default;

    virtual const std::string& id() const = 0;
    virtual int dim() const = 0;
    virtual int input_resolution() const = 0;

    /// Safe for concurrent read-only inference calls?
    virtual bool reentrant() const { return false; }

    virtual EmbeddingVector embed_text(std::string_view text) const = 0;

    /// Image is resampled to input_resolution() internally.
    virtual EmbeddingVector embed_image(const ImageBuffer& img) const = 0;

    /// Vector-Jacobian product of embed_image: gradient of <grad_embedding,
    /// embedding(img)> with respect to the pixels of img.
    virtual Field embed_image_grad(const ImageBuffer& img,
                                   std::span<const double> grad_embedding) const = 0;
};

using EncoderPtr = std::shared_ptr<const Encoder>;

struct WeightedEmbedding {
    EmbeddingVector embedding;
    double weight = 1.0;
};

/// Per-run projection of style sets into the embedding space. Projection
/// happens once per distinct parameter regardless of how often the set is
/// requested; repeated (kind, payload) pairs share one encoder call.
class StyleProjector {
public:
    explicit StyleProjector(EncoderPtr encoder);

    /// One embedding per StyleParam, order preserved.
    /// Errors from the encoder are rethrown tagged with the parameter index.
    const std::vector<WeightedEmbedding>& project(const StyleSet& styles);

private:
    EncoderPtr encoder_;
    std::map<std::pair<int, std::string>, EmbeddingVector> param_cache_;
    std::map<std::string, std::vector<WeightedEmbedding>> set_cache_;
};

/// Single-shot convenience wrapper around StyleProjector.
std::vector<WeightedEmbedding> project_style_set(const EncoderPtr& encoder, const StyleSet& styles);

} // namespace promptpainter
