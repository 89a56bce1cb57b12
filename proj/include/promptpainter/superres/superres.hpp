#pragma once

#include "promptpainter/core/field.hpp"

#include <memory>
#include <string>

namespace promptpainter {

/// Final upscaling stage. The baseline is plain Lanczos-3 resampling;
/// adapters may substitute learned models with painterly effects behind the
/// same interface.
class Upscaler {
public:
    virtual ~Upscaler() = default;

    virtual const std::string& id() const = 0;
    virtual int factor() const = 0;
    virtual bool deterministic() const = 0;

    /// Output dimensions are input times factor(); values stay in [0, 1].
    virtual ImageBuffer upscale(const ImageBuffer& img) const = 0;
};

using UpscalerPtr = std::shared_ptr<const Upscaler>;

class LanczosUpscaler : public Upscaler {
public:
    explicit LanczosUpscaler(int factor);

    const std::string& id() const override { return id_; }
    int factor() const override { return factor_; }
    bool deterministic() const override { return true; }
    ImageBuffer upscale(const ImageBuffer& img) const override;

private:
    std::string id_ = "lanczos";
    int factor_;
};

/// Factory over registered upscaler ids; throws ConfigError for unknown ids
/// or an unsupported factor (must be 2 or 4).
UpscalerPtr make_upscaler(const std::string& id, int factor);

} // namespace promptpainter
