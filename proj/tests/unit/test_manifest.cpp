#include "promptpainter/cli/manifest.hpp"

#include "promptpainter/core/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace promptpainter;
using namespace promptpainter::cli;

namespace {

RunManifest sample_manifest() {
    RunManifest m;
    m.config.run.seed = 42;
    m.config.run.levels = {{32, 2, 0.1}, {64, 1, 0.05}};
    m.config.run.styles.params.push_back(StyleParam::text("verdigris", 1.5));
    m.config.run.styles.params.push_back(StyleParam::image("style.png"));
    m.config.run.content = "content.png";
    m.config.superres.enabled = true;
    m.run_seed = 42;
    m.backends.encoder_id = "toy-encoder";
    m.backends.encoder_dim = 16;
    m.backends.encoder_input_resolution = 32;
    m.backends.generator_id = "toy-generator";
    m.backends.generator_stride = 4;
    m.backends.superres_id = "lanczos";
    m.backends.superres_factor = 2;

    LossTrace trace;
    for (int level = 0; level < 2; ++level) {
        const int iters = level == 0 ? 2 : 1;
        for (int i = 0; i < iters; ++i) {
            IterationRecord r;
            r.level_index = level;
            r.resolution = level == 0 ? 32 : 64;
            r.iteration = i;
            r.total_loss = 0.123456789012345 + i * 0.25 + level;
            r.per_style = {0.1 + i, 0.2 + i};
            r.timings = {1.5, 2.25, 3.125, 4.0625, 0.5};
            trace.records.push_back(std::move(r));
        }
    }
    m.trace = group_trace(trace, m.config.run.levels);
    m.outputs.image = "output.png";
    m.outputs.snapshots = {"snapshots/level0_iter0.png"};
    m.total_wall_ms = 1234.5678;
    return m;
}

} // namespace

TEST_CASE("manifest round-trips losslessly through its JSON encoding") {
    const RunManifest m = sample_manifest();
    const nlohmann::json j = m.to_json();
    CHECK(j.at("schema_version").get<int>() == 1);

    // through text and back
    const nlohmann::json reparsed = nlohmann::json::parse(j.dump());
    const RunManifest m2 = RunManifest::from_json(reparsed);
    CHECK(m2 == m);
    CHECK(m2.to_json() == j);
}

TEST_CASE("manifest file save/load round trip") {
    pptest::TempDir tmp;
    const RunManifest m = sample_manifest();
    m.save(tmp.file("manifest.json"));
    const RunManifest loaded = RunManifest::load(tmp.file("manifest.json"));
    CHECK(loaded == m);
}

TEST_CASE("abort information survives the round trip") {
    RunManifest m = sample_manifest();
    m.abort = RunManifest::Abort{1, 0, "non-finite loss"};
    const RunManifest m2 = RunManifest::from_json(m.to_json());
    REQUIRE(m2.abort.has_value());
    CHECK(m2.abort->level_index == 1);
    CHECK(m2.abort->reason == "non-finite loss");
}

TEST_CASE("group_trace splits records by level and keeps counts") {
    const RunManifest m = sample_manifest();
    REQUIRE(m.trace.size() == 2);
    CHECK(m.trace[0].records.size() == 2);
    CHECK(m.trace[1].records.size() == 1);
    CHECK(m.trace[0].resolution == 32);
    CHECK(m.trace[1].resolution == 64);
}

TEST_CASE("unsupported schema versions are rejected") {
    nlohmann::json j = sample_manifest().to_json();
    j["schema_version"] = 99;
    CHECK_THROWS_AS((void)RunManifest::from_json(j), ConfigError);
}
