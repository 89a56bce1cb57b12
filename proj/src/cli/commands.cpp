#include "promptpainter/cli/commands.hpp"

#include "promptpainter/adapters/registry.hpp"
#include "promptpainter/cli/manifest.hpp"
#include "promptpainter/core/errors.hpp"
#include "promptpainter/core/png_io.hpp"
#include "promptpainter/superres/superres.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <utility>

namespace promptpainter::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Collects trace records and writes per-iteration snapshots.
class CliObserver : public RunObserver {
public:
    CliObserver(fs::path output_dir, bool save_intermediates)
        : output_dir_(std::move(output_dir)), save_intermediates_(save_intermediates) {}

    void on_decoded(int level_index, int iteration, const ImageBuffer& img) override {
        if (!save_intermediates_) {
            return;
        }
        const fs::path dir = output_dir_ / "snapshots";
        fs::create_directories(dir);
        const std::string name =
            "level" + std::to_string(level_index) + "_iter" + std::to_string(iteration) + ".png";
        save_png((dir / name).string(), img);
        snapshots_.push_back("snapshots/" + name);
    }

    void on_iteration(const IterationRecord& record) override { records_.push_back(record); }

    const std::vector<IterationRecord>& records() const { return records_; }
    const std::vector<std::string>& snapshots() const { return snapshots_; }

private:
    fs::path output_dir_;
    bool save_intermediates_;
    std::vector<IterationRecord> records_;
    std::vector<std::string> snapshots_;
};

double mean(std::vector<double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json stage_stats(const std::vector<IterationRecord>& records) {
    const std::array<std::pair<const char*, double StageTimings::*>, 5> stages{{
        {"decode", &StageTimings::decode_ms},
        {"augment", &StageTimings::augment_ms},
        {"embed", &StageTimings::embed_ms},
        {"backprop", &StageTimings::backprop_ms},
        {"update", &StageTimings::update_ms},
    }};
    json out;
    for (const auto& [name, member] : stages) {
        std::vector<double> values;
        values.reserve(records.size());
        for (const auto& r : records) {
            values.push_back(r.timings.*member);
        }
        out[name] = {{"mean_ms", mean(values)}, {"median_ms", median(values)}};
    }
    return out;
}

void write_bench(const fs::path& path, const std::vector<IterationRecord>& records,
                 const std::vector<LevelConfig>& levels, double total_ms) {
    json j;
    j["schema_version"] = 1;
    j["iterations"] = records.size();
    j["total_ms"] = total_ms;
    j["stages"] = stage_stats(records);
    json per_level = json::array();
    for (std::size_t li = 0; li < levels.size(); ++li) {
        std::vector<IterationRecord> subset;
        for (const auto& r : records) {
            if (r.level_index == static_cast<int>(li)) {
                subset.push_back(r);
            }
        }
        per_level.push_back({{"level", li},
                             {"resolution", levels[li].resolution},
                             {"iterations", subset.size()},
                             {"stages", stage_stats(subset)}});
    }
    j["levels"] = std::move(per_level);
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write bench report: " + path.string());
    }
    out << j.dump(2) << '\n';
}

RunManifest make_manifest(const RunSetup& setup, const Encoder& enc, const Generator& gen) {
    RunManifest m;
    m.config = setup;
    m.run_seed = setup.run.seed;
    m.backends.encoder_id = enc.id();
    m.backends.encoder_dim = enc.dim();
    m.backends.encoder_input_resolution = enc.input_resolution();
    m.backends.generator_id = gen.id();
    m.backends.generator_stride = gen.stride();
    if (setup.superres.enabled) {
        m.backends.superres_id = setup.superres.adapter;
        m.backends.superres_factor = setup.superres.factor;
    }
    return m;
}

int execute(const CliOptions& opts) {
    const auto wall_start = std::chrono::steady_clock::now();
    const RunSetup setup = parse_setup(opts);

    auto& registry = adapters::Registry::instance();
    const EncoderPtr encoder = registry.make_encoder(setup.encoder);
    const GeneratorPtr generator = registry.make_generator(setup.generator);
    setup.run.validate(*encoder, *generator);

    const UpscalerPtr upscaler =
        setup.superres.enabled ? make_upscaler(setup.superres.adapter, setup.superres.factor)
                               : nullptr;

    const fs::path out_dir(setup.output_dir);
    fs::create_directories(out_dir);

    CliObserver observer(out_dir, setup.save_intermediates);
    RunManifest manifest = make_manifest(setup, *encoder, *generator);

    const auto wall_ms = [&wall_start] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         wall_start)
            .count();
    };

    try {
        RunResult result = run_hierarchy(setup.run, encoder, generator, &observer);
        ImageBuffer final_image =
            upscaler ? upscaler->upscale(result.image) : std::move(result.image);
        save_png((out_dir / "output.png").string(), final_image);

        manifest.trace = group_trace(result.trace, setup.run.levels);
        manifest.outputs.image = "output.png";
        manifest.outputs.snapshots = observer.snapshots();
        if (setup.bench) {
            manifest.outputs.bench = "bench.json";
        }
        manifest.total_wall_ms = wall_ms();
        manifest.save((out_dir / "manifest.json").string());
        if (setup.bench) {
            write_bench(out_dir / "bench.json", observer.records(), setup.run.levels,
                        manifest.total_wall_ms);
        }
        std::cout << "wrote " << (out_dir / "output.png").string() << " ("
                  << final_image.width() << "x" << final_image.height() << "), "
                  << observer.records().size() << " iterations\n";
        return kExitOk;
    } catch (const NumericError& e) {
        // Persist the partial trace with the abort diagnostics.
        LossTrace partial;
        partial.records = observer.records();
        manifest.trace = group_trace(partial, setup.run.levels);
        manifest.outputs.snapshots = observer.snapshots();
        manifest.total_wall_ms = wall_ms();
        RunManifest::Abort abort{0, 0, e.what()};
        if (const auto* positioned = dynamic_cast<const RunAbort*>(&e)) {
            abort.level_index = positioned->level_index;
            abort.iteration = positioned->iteration;
        }
        manifest.abort = abort;
        manifest.save((out_dir / "manifest.json").string());
        throw;
    }
}

int dispatch(const CliOptions& opts) {
    try {
        return execute(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << '\n';
        return kExitBackend;
    } catch (const NumericError& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace

int run_command(const CliOptions& opts) {
    return dispatch(opts);
}

int bench_command(CliOptions opts) {
    opts.bench = true;
    return dispatch(opts);
}

} // namespace promptpainter::cli
