#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "haptosim/commands.hpp"

using namespace haptosim;

namespace {

int load(const std::string& path, RunConfig& cfg) {
    try {
        cfg = parse_config(read_file(path));
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << path << ": " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"haptosim: solver and verification harness for a degenerate haptotaxis system"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<double> eps;
    bool no_plots = false;

    auto* validate = app.add_subcommand("validate", "check hypotheses and print derived constants");
    auto* run = app.add_subcommand("run", "integrate one regularization level and audit it");
    auto* sweep = app.add_subcommand("sweep", "run the schedule, Cauchy table, limit-ODE and weak-residual checks");
    auto* report = app.add_subcommand("report", "re-render plots and summary from a previous sweep");
    for (auto* sub : {validate, run, sweep}) sub->add_option("config", config_path, "configuration file")->required();
    for (auto* sub : {run, sweep}) {
        sub->add_option("-o,--out", out_dir, "override output.directory");
        sub->add_flag("--no-plots", no_plots, "skip SVG output");
    }
    run->add_option("--eps", eps, "regularization level (default: coarsest level valid up to T)");
    report->add_option("directory", out_dir, "output directory of a sweep")->required();
    report->add_flag("--no-plots", no_plots, "skip SVG output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (report->parsed()) return cmd_report(out_dir, !no_plots, std::cout);

    RunConfig cfg;
    if (const int rc = load(config_path, cfg); rc != kExitOk) return rc;
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    if (no_plots) cfg.output.plots = false;

    try {
        if (validate->parsed()) return cmd_validate(cfg, std::cout);
        if (run->parsed()) return cmd_run(cfg, eps, std::cout);
        return cmd_sweep(cfg, std::cout);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitRunFailure;
    }
}
