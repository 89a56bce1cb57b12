#include "promptpainter/core/png_io.hpp"

#include "promptpainter/core/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace promptpainter;

TEST_CASE("png round trip stays within 8-bit quantization") {
    pptest::TempDir tmp;
    const auto img = pptest::random_image(24, 17, 3, 0.0, 1.0);
    save_png(tmp.file("img.png"), img);
    const ImageBuffer back = load_png(tmp.file("img.png"));
    REQUIRE(back.height() == 24);
    REQUIRE(back.width() == 17);
    for (std::size_t i = 0; i < img.field().data.size(); ++i) {
        CHECK(std::fabs(img.field().data[i] - back.field().data[i]) <= 0.5 / 255.0 + 1e-12);
    }

    // a second load round-trips exactly (already quantized)
    save_png(tmp.file("img2.png"), back);
    CHECK(load_png(tmp.file("img2.png")) == back);
}

TEST_CASE("png bytes are deterministic for identical images") {
    pptest::TempDir tmp;
    const auto img = pptest::smooth_image(32, 32, 5);
    save_png(tmp.file("a.png"), img);
    save_png(tmp.file("b.png"), img);
    CHECK(pptest::read_file_bytes(tmp.file("a.png")) ==
          pptest::read_file_bytes(tmp.file("b.png")));
}

TEST_CASE("missing and malformed files raise I/O errors") {
    pptest::TempDir tmp;
    CHECK_THROWS_AS((void)load_png(tmp.file("absent.png")), IoError);
    std::ofstream(tmp.file("junk.png")) << "this is not a png";
    CHECK_THROWS_AS((void)load_png(tmp.file("junk.png")), IoError);
}
