#include "promptpainter/superres/superres.hpp"

#include "promptpainter/core/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace promptpainter;

TEST_CASE("lanczos baseline doubles dimensions and stays deterministic") {
    const auto up = make_upscaler("lanczos", 2);
    const auto img = pptest::smooth_image(64, 64, 3);
    const ImageBuffer a = up->upscale(img);
    CHECK(a.height() == 128);
    CHECK(a.width() == 128);
    CHECK(a == up->upscale(img));

    const auto up4 = make_upscaler("lanczos", 4);
    const ImageBuffer b = up4->upscale(img);
    CHECK(b.height() == 256);
}

TEST_CASE("constant images stay constant through the baseline") {
    Field f(16, 16);
    for (double& v : f.data) {
        v = 0.42;
    }
    const ImageBuffer img(std::move(f));
    const ImageBuffer out = make_upscaler("lanczos", 2)->upscale(img);
    for (double v : out.field().data) {
        CHECK(v == doctest::Approx(0.42).epsilon(1e-12));
    }
}

TEST_CASE("upscaled values are clamped into [0, 1]") {
    const auto img = pptest::random_image(16, 16, 5, 0.0, 1.0);
    const ImageBuffer out = make_upscaler("lanczos", 2)->upscale(img);
    for (double v : out.field().data) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("unknown adapters and bad factors are configuration errors") {
    CHECK_THROWS_AS((void)make_upscaler("van-gogh", 2), ConfigError);
    CHECK_THROWS_AS((void)make_upscaler("lanczos", 3), ConfigError);
}
