#include "plap/cli/commands.hpp"
#include "plap/cli/config.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace plap::cli;

namespace {

using Command = int (*)(const ExperimentConfig&, const std::filesystem::path&, std::ostream&);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-Laplacian eigenvalue, maximum principle and bifurcation experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool dump_config = false;

    const std::pair<const char*, const char*> commands[] = {
        {"eigen", "principal eigenvalues and eigenfunctions of the weight"},
        {"sweep", "solve the forced problem over a lambda grid and classify solution signs"},
        {"branch", "trace both one-sign bifurcation branches and their crossings"},
        {"picone", "randomized check of the Picone inequality"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out, "output directory (default: config, then $PLAP_OUT_DIR)");
        sub->add_flag("--print-config", dump_config, "print the parsed configuration and exit");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    const Command cmd = name == "eigen" ? cmd_eigen : name == "sweep" ? cmd_sweep : name == "branch" ? cmd_branch : cmd_picone;

    return run_guarded([&] {
        ExperimentConfig cfg = load_config(config_path);
        if (seed) cfg = with_seed(std::move(cfg), *seed);
        if (dump_config) {
            std::cout << serialize_config(cfg);
            return 0;
        }
        const std::filesystem::path dir = resolve_output_dir(cfg, out);
        std::filesystem::create_directories(dir);
        return cmd(cfg, dir, std::cout);
    }, std::cerr);
}
