#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "ewalign/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ewalign: joint metric space embedding via unbalanced OT"};
    app.require_subcommand(1);

    std::string config_path;
    ewalign::CliOverrides overrides;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    std::vector<CLI::Option*> seed_options;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        seed_options.push_back(
            sub->add_option("--seed", seed, "seed for randomized preprocessing"));
        sub->add_option("--threads", threads, "worker threads (default: EW_EMBED_THREADS or 1)");
    };

    CLI::App* embed = app.add_subcommand("embed", "joint embedding of two sources");
    add_common(embed, true);
    CLI::App* distances = app.add_subcommand("distances", "pairwise distance matrix over a corpus");
    add_common(distances, true);
    CLI::App* eval = app.add_subcommand("eval", "alignment quality scores for paired sources");
    add_common(eval, true);
    CLI::App* validate = app.add_subcommand("validate", "validate configured inputs");
    add_common(validate, true);

    ewalign::CircleBenchArgs bench;
    CLI::App* circle = app.add_subcommand("circle-bench", "circle benchmark against exact EW");
    circle->add_option("--bins", bench.bins, "circle discretization");
    circle->add_option("--kappas", bench.kappas, "von Mises concentrations")->delimiter(',');
    circle->add_option("--lambdas", bench.lambdas, "penalization weights")->delimiter(',');
    circle->add_option("--epsilon", bench.epsilon, "entropic regularization");
    circle->add_option("--bcd-iters", bench.bcd_iters, "outer iterations");
    circle->add_option("--location", bench.location, "von Mises location");
    circle->add_option("--out", bench.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (threads == 0) {
        if (const char* env = std::getenv("EW_EMBED_THREADS")) threads = std::atoi(env);
        if (threads <= 0) threads = 1;
    }
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    for (const CLI::Option* opt : seed_options)
        if (opt->count() > 0) overrides.seed = seed;
    overrides.threads = threads;

    if (embed->parsed()) return ewalign::cmd_embed(config_path, overrides);
    if (distances->parsed()) return ewalign::cmd_distances(config_path, overrides);
    if (eval->parsed()) return ewalign::cmd_eval(config_path, overrides);
    if (validate->parsed()) return ewalign::cmd_validate(config_path, overrides);
    if (circle->parsed()) return ewalign::cmd_circle_bench(bench);
    return 2;
}
