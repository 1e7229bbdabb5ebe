// Batch front-end: reflect {validate,dist-rate,strong-rate,weak-compare}
//     --config <file> [--out <dir>] [--threads <k>]
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "reflect/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <utility>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalization schemes for reflected SDEs on convex domains"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
    const std::pair<const char*, const char*> commands[] = {
        {"validate", "Check projection and coefficient diagnostics"},
        {"dist-rate", "Boundary-distance rate of the penalized solution"},
        {"strong-rate", "Strong L^p sup-error rate against the reflected reference"},
        {"weak-compare", "Compare the law of X^n_T with the reference X_T"},
    };
    for (const auto& [name, description] : commands) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (defaults to output_dir in the config)");
        sub->add_option("--threads", threads, "worker threads, 0 = one per hardware thread");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const std::string kind_name = app.get_subcommands().front()->get_name();
    try {
        const reflect::ExperimentKind kind = reflect::parse_experiment_kind(kind_name);
        const reflect::ExperimentConfig config = reflect::load_config(config_path);
        std::string target = out_dir.empty() ? config.output_dir : out_dir;
        if (target.empty()) target = "out";
        const auto result = reflect::run_experiment(kind, config, target, threads, std::cerr);
        for (const auto& file : result.files) std::cout << file.string() << "\n";
        if (result.exit_code != 0) std::cerr << "reflect: " << result.summary << "\n";
        return result.exit_code;
    } catch (const reflect::ConfigError& e) {
        std::cerr << "reflect: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const reflect::SweepError& e) {
        std::cerr << "reflect: numerical failure (n = " << e.level() << ", path "
                  << e.path_index() << "): " << e.what() << "\n";
        return kExitNumerical;
    } catch (const reflect::NumericalError& e) {
        std::cerr << "reflect: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const reflect::ProjectionError& e) {
        std::cerr << "reflect: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "reflect: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "reflect: " << e.what() << "\n";
        return 1;
    }
}
