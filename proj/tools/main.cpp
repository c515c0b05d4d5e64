// Command-line front end for the Koethe-space verification pipeline.
//
// Subcommands:
//   verify <config>   normalization conditions + inequality chain only
//   basis  <config>   through basis extraction, exports the basis
//   full   <config>   everything including the cone suite
//   demo              the built-in demo space and operator, full pipeline
//
// Exit codes: 0 all checks pass, 1 a verification failed, 2 configuration or
// structural error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "klab/pipeline.hpp"

namespace {

klab::Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw klab::ConfigError("cannot open config file '" + path + "'");
    klab::Json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw klab::ConfigError(std::string("config parse error: ") + ex.what());
    }
    return j;
}

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format = "json";
};

int run(klab::PipelineMode mode, bool demo, const Options& opt) {
    try {
        klab::PipelineConfig cfg =
            demo ? klab::PipelineConfig::demo() : klab::PipelineConfig::parse(load_config(opt.config_path));
        if (opt.seed) cfg.seed = *opt.seed;

        klab::PipelineResult result = klab::run_pipeline(cfg, mode);

        if (!opt.out_dir.empty()) {
            std::filesystem::create_directories(opt.out_dir);
            std::ofstream rep(std::filesystem::path(opt.out_dir) / "report.json");
            rep << result.report.dump(2) << "\n";
            if (mode != klab::PipelineMode::Verify)
                klab::emit_plot_data(result.report, opt.out_dir);
        }
        if (opt.format == "text")
            std::cout << klab::render_text(result.report);
        else
            std::cout << result.report.dump(2) << "\n";
        return result.pass ? 0 : 1;
    } catch (const klab::StageError& err) {
        klab::Json e{{"error", {{"kind", err.kind()}, {"stage", err.stage()}, {"message", err.what()}}}};
        std::cerr << e.dump(2) << "\n";
        return 2;
    } catch (const klab::Error& err) {
        klab::Json e{{"error", {{"kind", err.kind()}, {"message", err.what()}}}};
        std::cerr << e.dump(2) << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-truncation laboratory for closed-range operators on nuclear Koethe spaces"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("config", opt.config_path, "pipeline config (JSON)")->required();
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--out", opt.out_dir, "directory for report.json and plot data");
        sub->add_option("--format", opt.format, "stdout format: json|text")
            ->check(CLI::IsMember({"json", "text"}));
    };

    auto* verify = app.add_subcommand("verify", "conditions and inequality chain only");
    add_common(verify, true);
    auto* basis = app.add_subcommand("basis", "through basis extraction");
    add_common(basis, true);
    auto* full = app.add_subcommand("full", "complete pipeline including the cone suite");
    add_common(full, true);
    auto* demo = app.add_subcommand("demo", "run the built-in demo space and operator");
    add_common(demo, false);

    CLI11_PARSE(app, argc, argv);

    if (verify->parsed()) return run(klab::PipelineMode::Verify, false, opt);
    if (basis->parsed()) return run(klab::PipelineMode::Basis, false, opt);
    if (full->parsed()) return run(klab::PipelineMode::Full, false, opt);
    return run(klab::PipelineMode::Full, true, opt);
}
