#include "promptpainter/pipeline/pipeline.hpp"

#include "promptpainter/adapters/registry.hpp"
#include "promptpainter/core/errors.hpp"
#include "promptpainter/core/imageops.hpp"
#include "promptpainter/core/png_io.hpp"
#include "promptpainter/core/rng.hpp"
#include "promptpainter/embedding/toy_encoder.hpp"
#include "promptpainter/generator/toy_generator.hpp"
#include "pipeline_fixtures.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

using namespace promptpainter;

namespace {

struct ToyStack {
    EncoderPtr enc = std::make_shared<ToyEncoder>();
    GeneratorPtr gen = std::make_shared<ToyGenerator>();
};

std::vector<double> trace_losses(const LossTrace& trace) {
    std::vector<double> out;
    for (const auto& r : trace.records) {
        out.push_back(r.total_loss);
    }
    return out;
}

} // namespace

TEST_CASE("init_latent: content encoding, random fallback, upscaling") {
    ToyStack s;
    pptest::TempDir tmp;
    const auto content = pptest::smooth_image(48, 48, 3);
    save_png(tmp.file("content.png"), content);

    RunConfig cfg;
    cfg.levels = {{32, 1, 0.1}};
    cfg.seed = 11;

    SUBCASE("no content: seeded random latent, reproducible") {
        const LatentTensor a = init_latent(cfg, *s.gen);
        const LatentTensor b = init_latent(cfg, *s.gen);
        CHECK(a.values == b.values);
        CHECK(a.shape == LatentShape{8, 8, 8});
        CHECK(a.values == s.gen->random_latent(32, 11).values);
    }

    SUBCASE("content: exactly the encode of the resized image") {
        cfg.content = tmp.file("content.png");
        const LatentTensor got = init_latent(cfg, *s.gen);
        const ImageBuffer loaded = load_png(tmp.file("content.png"));
        const LatentTensor expect = s.gen->encode(
            ImageBuffer::clamped(imageops::resize_bilinear(loaded.field(), 32, 32)));
        CHECK(got.values == expect.values);
        CHECK(got.resolution_tag == 32);
    }

    SUBCASE("content smaller than the first level is upscaled, no error") {
        const auto small = pptest::smooth_image(16, 16, 4);
        save_png(tmp.file("small.png"), small);
        cfg.levels = {{64, 1, 0.1}};
        cfg.content = tmp.file("small.png");
        const LatentTensor got = init_latent(cfg, *s.gen);
        CHECK(got.shape == LatentShape{8, 16, 16});
    }

    SUBCASE("unreadable content is an I/O error") {
        cfg.content = tmp.file("nope.png");
        CHECK_THROWS_AS((void)init_latent(cfg, *s.gen), IoError);
    }
}

TEST_CASE("step with learning rate zero records the loss but leaves t unchanged") {
    ToyStack s;
    const AugmentConfig aug = pptest::identity_augment(32);
    NoiseConfig noise;
    noise.amplitude = 0.0;
    const std::vector<WeightedEmbedding> styles{{s.enc->embed_text("a style"), 1.0}};

    LatentTensor t = s.gen->random_latent(32, 21);
    const std::vector<double> before = t.values;
    Optimizer opt(OptimizerKind::plain_gradient_descent, 0.0, t.values.size());
    StepContext ctx{*s.enc, *s.gen, styles, aug, noise, opt, 1};
    const StepResult r = step(t, ctx, 99);
    CHECK(t.values == before);
    CHECK(r.total_loss > 0.0);
    CHECK(r.per_style.size() == 1);
}

TEST_CASE("loss is exactly zero when the style is the embedding of the decoded start") {
    ToyStack s;
    const AugmentConfig aug = pptest::identity_augment(32);
    NoiseConfig noise;
    noise.amplitude = 0.0;

    LatentTensor t = s.gen->random_latent(32, 23);
    const std::vector<WeightedEmbedding> styles{{s.enc->embed_image(s.gen->decode(t)), 1.0}};
    Optimizer opt(OptimizerKind::plain_gradient_descent, 0.0, t.values.size());
    StepContext ctx{*s.enc, *s.gen, styles, aug, noise, opt, 1};
    const StepResult r = step(t, ctx, 3);
    CHECK(r.total_loss == 0.0);
}

TEST_CASE("recorded loss equals the forward-only recomputation") {
    ToyStack s;
    AugmentConfig aug;
    aug.crop_size = 32;
    aug.resize_low = 1.0; // keep 32px level viable
    NoiseConfig noise;
    const std::vector<WeightedEmbedding> styles{{s.enc->embed_text("verify"), 1.0}};

    LatentTensor t = s.gen->random_latent(32, 29);
    const LatentTensor before = t;
    Optimizer opt(OptimizerKind::adaptive_moments, 0.05, t.values.size());
    StepContext ctx{*s.enc, *s.gen, styles, aug, noise, opt, 1};
    const StepResult r = step(t, ctx, 1234);
    CHECK(step_loss(before, ctx, 1234).total == r.total_loss);
    CHECK(t.values != before.values);
}

TEST_CASE("end-to-end gradient matches finite differences with frozen augmentations") {
    ToyStack s;
    AugmentConfig aug;
    aug.n_views = 2;
    aug.crop_size = 32;
    aug.resize_low = 1.0;
    aug.resize_high = 1.15;
    aug.perspective_scale = 0.1;
    aug.flip_probability = 0.5;
    aug.gaussian_sigma = 0.0;
    NoiseConfig noise;
    noise.amplitude = 0.05;

    // Mid-range start keeps every pixel away from the clamps.
    LatentTensor t = s.gen->encode(pptest::smooth_image(32, 32, 31));
    const std::vector<WeightedEmbedding> styles{{s.enc->embed_text("frozen grad check"), 1.0}};

    const std::uint64_t seed = 4242;
    // Plain descent with lr 1 turns the update into an exact gradient readout.
    LatentTensor stepped = t;
    Optimizer opt(OptimizerKind::plain_gradient_descent, 1.0, t.values.size());
    StepContext ctx{*s.enc, *s.gen, styles, aug, noise, opt, 1};
    (void)step(stepped, ctx, seed);
    std::vector<double> analytic(t.values.size());
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        analytic[i] = t.values[i] - stepped.values[i];
    }

    Rng rng(33);
    const double h = 1e-6;
    std::vector<double> fd_sample;
    std::vector<double> an_sample;
    for (int probe = 0; probe < 10; ++probe) {
        const int k = rng.uniform_int(0, static_cast<int>(t.values.size()) - 1);
        LatentTensor plus = t;
        LatentTensor minus = t;
        plus.values[k] += h;
        minus.values[k] -= h;
        const double fd =
            (step_loss(plus, ctx, seed).total - step_loss(minus, ctx, seed).total) / (2 * h);
        fd_sample.push_back(fd);
        an_sample.push_back(analytic[k]);
    }
    CHECK(pptest::rel_error(an_sample, fd_sample) < 1e-3);
}

TEST_CASE("run_level: record bookkeeping") {
    ToyStack s;
    RunConfig cfg;
    cfg.levels = {{32, 1, 0.1}};
    cfg.augment = pptest::identity_augment(32);
    cfg.seed = 5;
    cfg.styles.params.push_back(StyleParam::text("bookkeeping"));

    StyleProjector projector(s.enc);
    const auto& styles = projector.project(cfg.styles);
    LatentTensor t = init_latent(cfg, *s.gen);
    Optimizer opt(cfg.optimizer, 0.1, t.values.size());
    StepContext ctx{*s.enc, *s.gen, styles, cfg.augment, cfg.noise, opt, 1};
    LossTrace trace;
    run_level(t, cfg.levels[0], 0, cfg, ctx, trace, nullptr);
    REQUIRE(trace.records.size() == 1);
    CHECK(trace.records[0].iteration == 0);
    CHECK(trace.records[0].level_index == 0);
    CHECK(trace.records[0].resolution == 32);
    CHECK(trace.records[0].timings.decode_ms >= 0.0);
    CHECK(trace.records[0].timings.update_ms >= 0.0);
}

TEST_CASE("run_hierarchy: shape laws, record counts, determinism") {
    ToyStack s;
    RunConfig cfg;
    cfg.levels = {{32, 3, 0.1}, {64, 2, 0.1}};
    cfg.augment.crop_size = 32;
    cfg.augment.resize_low = 1.0;
    cfg.seed = 17;
    cfg.styles.params.push_back(StyleParam::text("hierarchy"));

    const RunResult a = run_hierarchy(cfg, s.enc, s.gen);
    CHECK(a.image.height() == 64);
    CHECK(a.image.width() == 64);
    CHECK(a.trace.records.size() == 5);

    // full determinism on the toy stack
    const RunResult b = run_hierarchy(cfg, s.enc, s.gen);
    CHECK(a.image == b.image);
    CHECK(trace_losses(a.trace) == trace_losses(b.trace));

    // iteration indices are sequential within each level
    int expected_iter = 0;
    int level = 0;
    for (const auto& r : a.trace.records) {
        if (r.level_index != level) {
            level = r.level_index;
            expected_iter = 0;
        }
        CHECK(r.iteration == expected_iter++);
    }
}

TEST_CASE("run_hierarchy with one level is the degenerate hierarchy") {
    ToyStack s;
    RunConfig cfg;
    cfg.levels = {{32, 2, 0.1}};
    cfg.augment = pptest::identity_augment(32);
    cfg.seed = 19;
    cfg.styles.params.push_back(StyleParam::text("single"));
    const RunResult r = run_hierarchy(cfg, s.enc, s.gen);
    CHECK(r.image.height() == 32);
    CHECK(r.trace.records.size() == 2);
}

TEST_CASE("thread fan-out does not change results") {
    ToyStack s;
    RunConfig cfg;
    cfg.levels = {{32, 2, 0.1}};
    cfg.augment.crop_size = 32;
    cfg.augment.resize_low = 1.0;
    cfg.augment.n_views = 4;
    cfg.seed = 23;
    cfg.styles.params.push_back(StyleParam::text("threads"));

    const RunResult serial = run_hierarchy(cfg, s.enc, s.gen);
    cfg.threads = 3;
    const RunResult parallel = run_hierarchy(cfg, s.enc, s.gen);
    CHECK(serial.image == parallel.image);
    CHECK(trace_losses(serial.trace) == trace_losses(parallel.trace));
}

TEST_CASE("the full stochastic chain still makes headway") {
    // All augmentation stages active (8 views, fractal noise, perspective,
    // flips, pixel noise) across a two-level hierarchy.
    ToyStack s;
    pptest::TempDir tmp;
    save_png(tmp.file("target.png"), s.gen->decode(s.gen->random_latent(64, 5)));

    RunConfig cfg;
    cfg.levels = {{32, 60, 0.05}, {64, 40, 0.05}};
    cfg.augment.crop_size = 32;
    cfg.augment.resize_low = 1.0;
    cfg.seed = 7;
    cfg.styles.params.push_back(StyleParam::image(tmp.file("target.png")));

    const RunResult r = run_hierarchy(cfg, s.enc, s.gen);
    const double initial = r.trace.records.front().total_loss;
    const double final_loss = r.trace.records.back().total_loss;
    for (const auto& rec : r.trace.records) {
        REQUIRE(std::isfinite(rec.total_loss));
    }
    // measured on the frozen seed: 0.351 -> 0.134
    CHECK(final_loss < 0.5 * initial);
}

TEST_CASE("toy convergence: 200 plain-descent steps cut the loss by 10x") {
    ToyStack s;
    pptest::TempDir tmp;
    const RunConfig cfg = pptest::convergence_fixture(tmp, *s.gen, 200, 40.0,
                                                      OptimizerKind::plain_gradient_descent);
    const RunResult r = run_hierarchy(cfg, s.enc, s.gen);
    REQUIRE(r.trace.records.size() == 200);
    const double initial = r.trace.records.front().total_loss;
    const double final_loss = r.trace.records.back().total_loss;
    CHECK(final_loss <= 0.1 * initial);
    // regression values frozen from the first verified run
    // (initial 0.39622458, final 5.5e-24: the fixture reaches the zero-loss optimum)
    CHECK(initial == doctest::Approx(0.39622458039155573).epsilon(1e-9));
    CHECK(final_loss < 1e-6);
}

namespace {

/// Encoder that turns poisonous after a fixed number of image embeddings.
class DelayedNanEncoder : public ToyEncoder {
public:
    explicit DelayedNanEncoder(int healthy_calls) : healthy_calls_(healthy_calls) {}

    EmbeddingVector embed_image(const ImageBuffer& img) const override {
        if (++calls_ > healthy_calls_) {
            EmbeddingVector v;
            v.values.assign(dim(), std::numeric_limits<double>::quiet_NaN());
            return v;
        }
        return ToyEncoder::embed_image(img);
    }

private:
    int healthy_calls_;
    mutable int calls_ = 0;
};

} // namespace

TEST_CASE("non-finite losses abort the run with diagnostics") {
    adapters::AdapterSpec spec;
    spec.id = "nan-encoder";
    const EncoderPtr nan_enc = adapters::Registry::instance().make_encoder(spec);
    const GeneratorPtr gen = std::make_shared<ToyGenerator>();

    RunConfig cfg;
    cfg.levels = {{32, 2, 0.1}};
    cfg.augment = pptest::identity_augment(32);
    cfg.seed = 31;
    cfg.styles.params.push_back(StyleParam::text("boom"));
    CHECK_THROWS_WITH_AS((void)run_hierarchy(cfg, nan_enc, gen),
                         doctest::Contains("level 0"), NumericError);
}

TEST_CASE("aborts past the first level carry the right position") {
    // One style projection + two clean iterations at level 0, then poison:
    // the abort lands at level 1, iteration 0.
    const EncoderPtr enc = std::make_shared<DelayedNanEncoder>(3);
    const GeneratorPtr gen = std::make_shared<ToyGenerator>();

    RunConfig cfg;
    cfg.levels = {{32, 2, 0.1}, {64, 2, 0.1}};
    cfg.augment = pptest::identity_augment(32);
    cfg.seed = 37;
    pptest::TempDir tmp;
    save_png(tmp.file("style.png"), pptest::smooth_image(32, 32, 1));
    cfg.styles.params.push_back(StyleParam::image(tmp.file("style.png")));

    try {
        (void)run_hierarchy(cfg, enc, gen);
        FAIL("expected RunAbort");
    } catch (const RunAbort& abort) {
        CHECK(abort.level_index == 1);
        CHECK(abort.iteration == 0);
    }
}

TEST_CASE("config validation names the offending field") {
    ToyStack s;
    RunConfig cfg;
    cfg.styles.params.push_back(StyleParam::text("x"));
    cfg.augment.crop_size = 32;
    cfg.augment.resize_low = 1.0;

    SUBCASE("non-increasing resolutions") {
        cfg.levels = {{64, 1, 0.1}, {32, 1, 0.1}};
        CHECK_THROWS_WITH_AS(cfg.validate(*s.enc, *s.gen),
                             doctest::Contains("strictly increasing"), ConfigError);
    }
    SUBCASE("stride mismatch") {
        cfg.levels = {{30, 1, 0.1}};
        CHECK_THROWS_WITH_AS(cfg.validate(*s.enc, *s.gen), doctest::Contains("stride"),
                             ConfigError);
    }
    SUBCASE("crop too large for the first level under worst-case resize") {
        cfg.levels = {{32, 1, 0.1}};
        cfg.augment.resize_low = 0.8;
        CHECK_THROWS_WITH_AS(cfg.validate(*s.enc, *s.gen), doctest::Contains("resize_range"),
                             ConfigError);
    }
    SUBCASE("zero learning rate") {
        cfg.levels = {{32, 0, 0.1}};
        CHECK_THROWS_AS(cfg.validate(*s.enc, *s.gen), ConfigError);
    }
    SUBCASE("empty styles") {
        cfg.levels = {{32, 1, 0.1}};
        cfg.styles.params.clear();
        CHECK_THROWS_AS(cfg.validate(*s.enc, *s.gen), ConfigError);
    }
}
