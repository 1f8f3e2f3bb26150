#include <CLI11.hpp>
#include <iostream>

#include "aclab/errors.hpp"
#include "aclab/experiments.hpp"

// Exit codes: 0 success, 2 config error, 3 capacity error, 4 numerical failure.

namespace {

int run(const std::string& experiment, const std::string& config_path,
        std::optional<std::uint64_t> seed, std::optional<int> workers,
        std::optional<std::string> out_dir) {
    aclab::ExperimentConfig cfg = aclab::load_config_file(config_path);
    if (cfg.experiment != experiment)
        throw aclab::config_error("config declares experiment '" + cfg.experiment +
                                  "' but the command line asked for '" + experiment + "'");
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (out_dir) cfg.output_dir = *out_dir;
    const auto manifest = aclab::run_experiment(cfg);
    std::cout << "wrote " << manifest.outputs.size() << " artifact(s) to " << cfg.output_dir
              << " (config " << manifest.config_digest.substr(0, 12) << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anticoncentration statistics laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;

    const std::vector<std::string> experiments = {"haar-ipr", "rmps",     "rpm",
                                                  "simulate", "rtn",      "fit",
                                                  "collapse", "xeb",      "distribution"};
    std::vector<CLI::App*> subs;
    for (const auto& name : experiments) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--workers", workers, "worker count (default: ACLAB_WORKERS or hardware)");
        sub->add_option("--out", out_dir, "output directory");
        subs.push_back(sub);
    }
    auto* validate = app.add_subcommand("validate", "validate a config without running it");
    validate->add_option("--config", config_path, "JSON experiment config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            aclab::load_config_file(config_path);
            std::cout << "ok\n";
            return 0;
        }
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return run(experiments[i], config_path, seed, workers, out_dir);
        return 2;
    } catch (const aclab::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const aclab::capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const aclab::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
}
