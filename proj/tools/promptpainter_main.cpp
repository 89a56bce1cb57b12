#include "promptpainter/cli/commands.hpp"

#include <CLI11.hpp>

#include <cstdint>

namespace {

void add_run_options(CLI::App& cmd, promptpainter::cli::CliOptions& opts) {
    cmd.add_option("--config", opts.config_path, "JSON config file; flags override its values");
    cmd.add_option("--content", opts.content, "content image (PNG); omit for random init");
    cmd.add_option("--text", opts.texts, "style text prompt (repeatable)");
    cmd.add_option("--style-image", opts.style_images, "style image path (repeatable)");
    cmd.add_option("--style-weight", opts.style_weights,
                   "per-style weight, parallel to --text/--style-image order (repeatable)");
    cmd.add_option("--size", opts.size, "final resolution; builds the default level schedule");
    cmd.add_option("--levels", opts.levels, "explicit schedule res:iters[:lr],res:iters[:lr],...");
    cmd.add_option("--seed", opts.seed, "run seed (default 0)");
    cmd.add_option("--optimizer", opts.optimizer,
                   "plain_gradient_descent or adaptive_moments (default)");
    cmd.add_option("--output-dir", opts.output_dir, "output directory (default .)");
    cmd.add_flag("--save-intermediates", opts.save_intermediates,
                 "dump snapshots/level{L}_iter{I}.png each iteration");
    cmd.add_option("--encoder", opts.encoder_id, "encoder adapter id (default toy-encoder)");
    cmd.add_option("--generator", opts.generator_id, "generator adapter id (default toy-generator)");
    cmd.add_option("--superres", opts.superres_adapter, "enable super-resolution with this adapter");
    cmd.add_option("--superres-factor", opts.superres_factor, "super-resolution factor (2 or 4)");
    cmd.add_option("--threads", opts.threads, "view fan-out threads (default 1)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"promptpainter: text- and image-guided stylization by latent optimization"};
    app.require_subcommand(1);

    promptpainter::cli::CliOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "execute a stylization run");
    add_run_options(*run, run_opts);
    run->add_flag("--bench", run_opts.bench, "also write bench.json timing report");

    promptpainter::cli::CliOptions bench_opts;
    CLI::App* bench = app.add_subcommand("bench", "run with per-stage timing report");
    add_run_options(*bench, bench_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help exits 0; every usage error is a configuration error.
        const int code = app.exit(e);
        return code == 0 ? 0 : promptpainter::cli::kExitConfig;
    }

    if (run->parsed()) {
        return promptpainter::cli::run_command(run_opts);
    }
    return promptpainter::cli::bench_command(bench_opts);
}
