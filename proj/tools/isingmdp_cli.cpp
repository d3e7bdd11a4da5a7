#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "isingmdp/experiment.hpp"

using namespace isingmdp;

namespace {

using Command = std::function<CommandResult(const ExperimentConfig&, std::ostream&)>;

struct Overrides {
    std::string config;
    std::string output_dir;
    int threads = -1;
    std::int64_t replications = 0;
    std::vector<std::string> pgm_files;
};

int run(const std::string& name, const Command& command, const Overrides& o) {
    try {
        ExperimentConfig config = o.config.empty() ? parse_config("{}") : load_config(o.config);
        if (!o.output_dir.empty()) config.output_dir = o.output_dir;
        if (o.threads >= 0) config.threads = o.threads;
        if (o.replications > 0) config.replications = o.replications;
        const auto start = std::chrono::steady_clock::now();
        const CommandResult result = command(config, std::cout);
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
        write_manifest(config, name, result, wall.count());
        return result.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int render_files(const std::vector<std::string>& files, double field) {
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) {
            std::cerr << "cannot open " << path << '\n';
            return kExitConfig;
        }
        try {
            const SpinConfiguration sigma = read_pgm(in, field);
            std::cout << path << '\n' << to_ascii(sigma);
            std::cout << "plus sites " << sigma.plus_count() << ", robust " << (is_robust(sigma) ? "yes" : "no")
                      << '\n';
        } catch (const std::exception& e) {
            std::cerr << path << ": " << e.what() << '\n';
            return kExitConfig;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal control experiments for the zero-temperature Ising model on a torus"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolkitVersion));

    Overrides o;
    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
        sub->add_option("-o,--output-dir", o.output_dir, "Output directory (overrides the config)");
        sub->add_option("-j,--threads", o.threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
        return sub;
    };
    CLI::App* verify = add("verify-kernel", "Check the stripe-stripe kernel against exact lattice absorption");
    CLI::App* evaluate = add("evaluate", "Exact policy values, optimal values and lambda crossings");
    CLI::App* simulate = add("simulate", "Monte Carlo hitting times on the lattice");
    simulate->add_option("-r,--replications", o.replications, "Replications per family (overrides the config)")
        ->check(CLI::PositiveNumber);
    CLI::App* moments = add("moments", "Hitting-time moments and the lambda -> 1 expansion");
    CLI::App* render = add("render", "Write the seed configuration, or print PGM snapshots as text");
    render->add_option("files", o.pgm_files, "PGM files to print")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*verify) return run("verify-kernel", cmd_verify_kernel, o);
    if (*evaluate) return run("evaluate", cmd_evaluate, o);
    if (*simulate) return run("simulate", cmd_simulate, o);
    if (*moments) return run("moments", cmd_moments, o);
    if (!o.pgm_files.empty()) return render_files(o.pgm_files, 0.5);
    return run("render", cmd_render, o);
}
