/******************************************************************************
 * Project:  standage
 * Purpose:  Command-line front end.  Uses only the public C API.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "standage.h"

namespace {

struct ConfigDeleter
{
    void operator()(sa_config *c) const { sa_config_free(c); }
};
using ConfigPtr = std::unique_ptr<sa_config, ConfigDeleter>;

// One CLI option mirrored into a config key when the user supplies it.
struct KeyOption
{
    std::string key;
    std::string value;
    CLI::Option *opt = nullptr;
};

class CommandSpec
{
  public:
    CommandSpec(CLI::App *app, std::string name) : app_(app), name_(std::move(name))
    {
    }

    void add(const std::string &flag, const std::string &key,
             const std::string &help)
    {
        auto entry = std::make_unique<KeyOption>();
        entry->key = key;
        entry->opt = app_->add_option(flag, entry->value, help);
        options_.push_back(std::move(entry));
    }

    void add_flag(const std::string &flag, const std::string &key,
                  const std::string &help)
    {
        auto entry = std::make_unique<KeyOption>();
        entry->key = key;
        entry->opt = app_->add_flag(flag, help);
        options_.push_back(std::move(entry));
    }

    CLI::App *app() const { return app_; }
    const std::string &name() const { return name_; }

    int apply(sa_config *cfg) const
    {
        for (const auto &entry : options_)
        {
            if (entry->opt->count() == 0)
                continue;
            const std::string v = entry->value.empty() ? "1" : entry->value;
            if (sa_config_set(cfg, entry->key.c_str(), v.c_str()) != SA_OK)
                return SA_EINVAL;
        }
        return SA_OK;
    }

  private:
    CLI::App *app_;
    std::string name_;
    std::vector<std::unique_ptr<KeyOption>> options_;
};

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"stand-age mapping toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sa_version());

    std::string config_path;
    app.add_option("--config", config_path,
                   "key=value config file loaded before flag overrides")
        ->expected(1);
    std::string seed, threads;
    CLI::Option *seed_opt = app.add_option("--seed", seed, "random seed");
    CLI::Option *threads_opt =
        app.add_option("--threads", threads, "worker thread count");

    std::vector<std::unique_ptr<CommandSpec>> commands;
    auto make = [&](const std::string &name, const std::string &help)
    {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->fallthrough();  // global --seed/--threads may follow the command
        commands.push_back(std::make_unique<CommandSpec>(sub, name));
        return commands.back().get();
    };

    CommandSpec *metrics =
        make("metrics", "point-cloud metrics per plot or per grid cell");
    metrics->add("--cloud", "cloud", "point cloud text file");
    metrics->add("--dtm", "dtm", "terrain model grid (.asc)");
    metrics->add("--plots", "plots", "plot polygon file");
    metrics->add("--out-dir", "out_dir", "output directory");
    metrics->add_flag("--grid", "grid", "rasterize metrics instead");
    metrics->add("--cellsize-out", "cellsize_out", "output cell size");
    metrics->add("--ncols", "ncols", "output grid columns");
    metrics->add("--nrows", "nrows", "output grid rows");

    CommandSpec *fit = make("fit", "fit class models from a plot table");
    fit->add("--plots", "plots", "training plot table (.csv)");
    fit->add("--out-dir", "out_dir", "output directory");
    fit->add("--link", "link", "log, sqrt, identity or auto");
    fit->add("--min-rows", "min_rows", "minimum rows per stratum");
    fit->add("--p-threshold", "p_threshold", "pruning p-value threshold");
    fit->add("--squares", "squares", "offer squared terms (0/1)");
    fit->add("--interactions", "interactions", "offer interaction terms (0/1)");

    CommandSpec *predict = make("predict", "predict an age map from layers");
    predict->add("--layers-dir", "layers_dir",
                 "directory of predictor/species/si grids");
    predict->add("--registry", "registry", "model registry file or 'builtin'");
    predict->add("--out-dir", "out_dir", "output directory");

    CommandSpec *validate = make("validate", "compare predictions with "
                                             "observed stand or plot ages");
    validate->add("--age-map", "age_map", "predicted age grid (.asc)");
    validate->add("--stands", "stands", "stand polygon file with age attrs");
    validate->add("--plots", "plots", "plot table (.csv)");
    validate->add("--registry", "registry", "model registry file or 'builtin'");
    validate->add("--routing", "routing",
                  "observed_si, predicted_si or predicted_species");
    validate->add("--weighted", "weighted", "area-weighted metrics (0/1)");
    validate->add("--out-dir", "out_dir", "output directory");

    CommandSpec *synth = make("synth", "generate a synthetic scene");
    synth->add("--ncols", "ncols", "scene columns");
    synth->add("--nrows", "nrows", "scene rows");
    synth->add("--species-mix", "species_mix",
               "e.g. spruce:0.6,pine:0.3,birch:0.1");
    synth->add("--si-mix", "si_mix", "e.g. 14:0.25,17:0.25,20:0.5");
    synth->add("--age-lo", "age_lo", "youngest drawn age");
    synth->add("--age-hi", "age_hi", "oldest drawn age");
    synth->add("--sigma-scale", "sigma_scale", "observation noise scale");
    synth->add("--registry", "registry", "model registry file or 'builtin'");
    synth->add("--out-dir", "out_dir", "output directory");

    CommandSpec *curves = make("curves", "age response along one predictor");
    curves->add("--species", "species", "spruce, pine or birch");
    curves->add("--si", "si", "site index class");
    curves->add("--sweep", "sweep", "predictor to sweep");
    curves->add("--lo", "lo", "sweep start");
    curves->add("--hi", "hi", "sweep end");
    curves->add("--steps", "steps", "sweep intervals (writes steps+1 rows)");
    curves->add("--registry", "registry", "model registry file or 'builtin'");
    curves->add("--out-dir", "out_dir", "output directory");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        // CLI11 treats --help as a zero-exit parse error; anything else is
        // a usage problem.
        return rc == 0 ? 0 : SA_EINVAL;
    }

    ConfigPtr cfg;
    {
        sa_config *raw = nullptr;
        const int rc = config_path.empty() ? sa_config_create(&raw)
                                           : sa_config_load(config_path.c_str(), &raw);
        if (rc != SA_OK)
        {
            std::fprintf(stderr, "error: %s\n", sa_last_error());
            return rc;
        }
        cfg.reset(raw);
    }
    if (seed_opt->count() > 0)
        sa_config_set(cfg.get(), "seed", seed.c_str());
    if (threads_opt->count() > 0)
        sa_config_set(cfg.get(), "threads", threads.c_str());

    for (const auto &cmd : commands)
    {
        if (!cmd->app()->parsed())
            continue;
        if (cmd->apply(cfg.get()) != SA_OK)
        {
            std::fprintf(stderr, "error: %s\n", sa_last_error());
            return SA_EINVAL;
        }
        const int rc = sa_run(cmd->name().c_str(), cfg.get());
        if (rc != SA_OK)
            std::fprintf(stderr, "error: %s\n", sa_last_error());
        return rc;
    }
    std::fprintf(stderr, "error: no command given\n");
    return SA_EINVAL;
}
