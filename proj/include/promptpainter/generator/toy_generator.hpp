#pragma once

#include "promptpainter/generator/generator.hpp"

#include <array>

namespace promptpainter {

/// Deterministic CPU generator for tests and desk-scale runs.
///
/// encode: stride-4 average-pool, then a fixed seeded 3 -> 8 channel linear
/// map E. decode: the pseudo-inverse 8 -> 3 map, bilinear x4 upsample, then
/// a logistic squash sigma(4 (v - 0.5)) into [0, 1]. Differentiable
/// everywhere; decode(encode(img)) approximately reconstructs smooth images.
class ToyGenerator : public Generator {
public:
    static constexpr int kChannels = 8;
    static constexpr int kStride = 4;

    ToyGenerator();

    /// Weights-backed variant with explicit channel maps (row-major
    /// encode_map[channels][3], decode_map[3][channels]).
    ToyGenerator(std::string id, int channels, int stride, std::vector<double> encode_map,
                 std::vector<double> decode_map);

    const std::string& id() const override { return id_; }
    int stride() const override { return stride_; }
    bool differentiable() const override { return true; }
    bool reentrant() const override { return true; }

    LatentShape latent_shape_for(int resolution) const override;

    LatentTensor encode(const ImageBuffer& img) const override;
    ImageBuffer decode(const LatentTensor& t) const override;
    LatentTensor decode_grad(const LatentTensor& t, const Field& grad_image) const override;
    LatentTensor random_latent(int resolution, std::uint64_t seed) const override;

    const std::vector<double>& encode_map() const { return encode_map_; }
    const std::vector<double>& decode_map() const { return decode_map_; }

private:
    void check_resolution(int resolution) const;
    Field decode_linear_upsampled(const LatentTensor& t) const;

    std::string id_;
    int channels_;
    int stride_;
    std::vector<double> encode_map_; // channels x 3
    std::vector<double> decode_map_; // 3 x channels
};

} // namespace promptpainter
