/******************************************************************************
 * Project:  standage
 * Purpose:  Pipeline command implementations.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "core/evaluation.hpp"
#include "core/fitting.hpp"

namespace fs = std::filesystem;

namespace standage {

namespace {

fs::path ensure_out_dir(const RunConfig &cfg)
{
    const fs::path dir = cfg.get_string("out_dir");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ProcessingError("cannot create output directory '" +
                              dir.string() + "': " + ec.message());
    return dir;
}

void write_text(const fs::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ProcessingError("cannot open for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw ProcessingError("short write: " + path.string());
}

void write_manifest(const fs::path &dir, const std::string &command,
                    const RunConfig &cfg)
{
    RunConfig copy = cfg;
    copy.set("command", command);
    write_text(dir / "manifest.txt", copy.serialize());
}

ModelRegistry load_registry(const RunConfig &cfg)
{
    const std::string path = cfg.get_string("registry", "builtin");
    if (path == "builtin")
        return ModelRegistry::builtin();
    return ModelRegistry::load(path);
}

/* --------------------------- plot tables --------------------------- */

struct PlotTable
{
    std::vector<std::string> predictor_columns;
    std::vector<PlotObservation> plots;
    std::vector<double> ages;  // NaN when absent
};

std::string species_to_field(Species s) { return species_name(s); }

Species species_from_field(const std::string &field, std::size_t line_no,
                           const std::string &path)
{
    if (auto s = species_from_name(field))
        return *s;
    double code;
    if (parse_double(field, code))
        if (auto s = species_from_code(code))
            return *s;
    throw ValidationError("plot table line " + std::to_string(line_no) +
                          ": unknown species '" + field + "' in " + path);
}

bool field_missing(const std::string &f)
{
    return f.empty() || f == "NA" || f == "nan" || f == "NaN";
}

PlotTable read_plot_table(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open plot table: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("plot table is empty: " + path);
    const std::vector<std::string> header = split(trim(line), ',');

    int col_id = -1, col_species = -1, col_si = -1, col_age = -1,
        col_psi = -1, col_pspecies = -1;
    std::vector<int> pred_cols;
    PlotTable table;
    for (std::size_t i = 0; i < header.size(); ++i)
    {
        const std::string name = trim(header[i]);
        if (name == "plot_id")
            col_id = static_cast<int>(i);
        else if (name == "species")
            col_species = static_cast<int>(i);
        else if (name == "si")
            col_si = static_cast<int>(i);
        else if (name == "age")
            col_age = static_cast<int>(i);
        else if (name == "psi")
            col_psi = static_cast<int>(i);
        else if (name == "species_pred")
            col_pspecies = static_cast<int>(i);
        else if (is_known_predictor(name))
        {
            pred_cols.push_back(static_cast<int>(i));
            table.predictor_columns.push_back(name);
        }
        else
        {
            throw ValidationError("plot table " + path +
                                  ": unknown column '" + name + "'");
        }
    }
    if (col_species < 0 || col_si < 0)
        throw ValidationError("plot table " + path +
                              " needs 'species' and 'si' columns");

    std::size_t line_no = 1;
    while (std::getline(in, line))
    {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const std::vector<std::string> fields = split(body, ',');
        if (fields.size() != header.size())
            throw ValidationError("plot table line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(header.size()) +
                                  " fields, got " +
                                  std::to_string(fields.size()) + " in " + path);
        PlotObservation obs;
        obs.id = (col_id >= 0) ? trim(fields[col_id])
                               : "row" + std::to_string(line_no - 1);
        obs.species_observed =
            species_from_field(trim(fields[col_species]), line_no, path);
        double si;
        if (!parse_double(fields[col_si], si))
            throw ValidationError("plot table line " + std::to_string(line_no) +
                                  ": bad si '" + fields[col_si] + "' in " + path);
        obs.si_observed = si;
        if (col_psi >= 0 && !field_missing(trim(fields[col_psi])))
        {
            double psi;
            if (!parse_double(fields[col_psi], psi))
                throw ValidationError("plot table line " +
                                      std::to_string(line_no) + ": bad psi '" +
                                      fields[col_psi] + "' in " + path);
            obs.si_predicted = psi;
        }
        if (col_pspecies >= 0 && !field_missing(trim(fields[col_pspecies])))
            obs.species_predicted =
                species_from_field(trim(fields[col_pspecies]), line_no, path);

        double age = std::numeric_limits<double>::quiet_NaN();
        if (col_age >= 0 && !field_missing(trim(fields[col_age])))
            if (!parse_double(fields[col_age], age))
                throw ValidationError("plot table line " +
                                      std::to_string(line_no) + ": bad age '" +
                                      fields[col_age] + "' in " + path);

        for (std::size_t k = 0; k < pred_cols.size(); ++k)
        {
            const std::string f = trim(fields[pred_cols[k]]);
            if (field_missing(f))
                continue;
            double v;
            if (!parse_double(f, v))
                throw ValidationError(
                    "plot table line " + std::to_string(line_no) +
                    ": bad value '" + f + "' for predictor '" +
                    table.predictor_columns[k] + "' in " + path);
            obs.predictors.set(table.predictor_columns[k], v);
        }
        table.plots.push_back(std::move(obs));
        table.ages.push_back(age);
    }
    return table;
}

void write_plot_table(const fs::path &path,
                      const std::vector<ScenePlot> &plots)
{
    // Emit only predictor columns that at least one plot carries, in the
    // canonical order.
    std::vector<std::string> cols;
    for (const std::string &name : predictor_csv_columns())
        for (const ScenePlot &p : plots)
            if (p.predictors.has(name))
            {
                cols.push_back(name);
                break;
            }

    std::ostringstream os;
    os << "plot_id,species,si,age";
    for (const std::string &c : cols)
        os << ',' << c;
    os << '\n';
    for (const ScenePlot &p : plots)
    {
        os << p.id << ',' << species_to_field(p.species) << ',' << p.si << ','
           << format_g(p.observed_age, 17);
        for (const std::string &c : cols)
        {
            os << ',';
            if (const auto v = p.predictors.resolve(c))
                os << format_g(*v, 17);
            else
                os << "NA";
        }
        os << '\n';
    }
    write_text(path, os.str());
}

/* ---------------------------- layer IO ----------------------------- */

LayerStack read_layer_stack(const RunConfig &cfg)
{
    const fs::path dir = cfg.get_string("layers_dir");
    if (!fs::is_directory(dir))
        throw ValidationError("layers_dir is not a directory: " + dir.string());

    LayerStack stack;
    bool have_species = false, have_si = false;
    for (const auto &entry : fs::directory_iterator(dir))
    {
        if (!entry.is_regular_file() || entry.path().extension() != ".asc")
            continue;
        const std::string stem = entry.path().stem().string();
        Grid g = Grid::read(entry.path().string());
        if (stem == "species")
        {
            stack.species = std::move(g);
            have_species = true;
        }
        else if (stem == "si")
        {
            stack.si = std::move(g);
            have_si = true;
        }
        else if (stem == "mask")
        {
            stack.mask = std::move(g);
        }
        else
        {
            stack.predictors.emplace(stem, std::move(g));
        }
    }
    if (!have_species || !have_si)
        throw ValidationError("layers_dir must hold species.asc and si.asc: " +
                              dir.string());
    return stack;
}

}  // namespace

/* ------------------------------ synth ------------------------------ */

void cmd_synth(const RunConfig &cfg)
{
    const fs::path dir = ensure_out_dir(cfg);

    SceneSpec spec;
    spec.ncols = static_cast<int>(cfg.get_long("ncols", 100));
    spec.nrows = static_cast<int>(cfg.get_long("nrows", 100));
    spec.cellsize = cfg.get_double("cellsize", 16.0);
    spec.xll = cfg.get_double("xllcorner", 0.0);
    spec.yll = cfg.get_double("yllcorner", 0.0);
    spec.age_lo = cfg.get_double("age_lo", 20.0);
    spec.age_hi = cfg.get_double("age_hi", 70.0);
    spec.seed = cfg.get_u64("seed", 1);
    spec.sigma_scale = cfg.get_double("sigma_scale", 1.0);

    if (cfg.has("species_mix"))
    {
        spec.species_mix.clear();
        for (const std::string &item :
             split(cfg.get_string("species_mix"), ','))
        {
            const auto colon = item.find(':');
            const std::string name =
                trim(colon == std::string::npos ? item : item.substr(0, colon));
            const auto sp = species_from_name(name);
            if (!sp)
                throw ValidationError("species_mix: unknown species '" + name +
                                      "'");
            double w = 1.0;
            if (colon != std::string::npos &&
                !parse_double(item.substr(colon + 1), w))
                throw ValidationError("species_mix: bad weight in '" + item +
                                      "'");
            spec.species_mix.emplace_back(*sp, w);
        }
    }
    if (cfg.has("si_mix"))
    {
        spec.si_mix.clear();
        for (const std::string &item : split(cfg.get_string("si_mix"), ','))
        {
            const auto colon = item.find(':');
            long si;
            if (!parse_long(colon == std::string::npos ? item
                                                       : item.substr(0, colon),
                            si))
                throw ValidationError("si_mix: bad level in '" + item + "'");
            double w = 1.0;
            if (colon != std::string::npos &&
                !parse_double(item.substr(colon + 1), w))
                throw ValidationError("si_mix: bad weight in '" + item + "'");
            spec.si_mix.emplace_back(static_cast<int>(si), w);
        }
    }

    const ModelRegistry reg = load_registry(cfg);
    const SyntheticScene scene = synth_scene(reg, spec);

    const fs::path layers = dir / "layers";
    std::error_code ec;
    fs::create_directories(layers, ec);
    if (ec)
        throw ProcessingError("cannot create " + layers.string());

    for (const auto &[name, grid] : scene.stack.predictors)
        grid.write((layers / (name + ".asc")).string());
    scene.stack.species.write((layers / "species.asc").string());
    scene.stack.si.write((layers / "si.asc").string());
    scene.truth.write((dir / "truth.asc").string());
    write_plot_table(dir / "plots.csv", scene.plots);
    write_text(dir / "scene.txt", scene_manifest(spec));
    write_manifest(dir, "synth", cfg);

    std::cerr << "note: scene " << spec.ncols << "x" << spec.nrows << ", "
              << scene.plots.size() << " plots, " << scene.redraws
              << " age redraws\n";
}

/* ----------------------------- predict ----------------------------- */

void cmd_predict(const RunConfig &cfg)
{
    const fs::path dir = ensure_out_dir(cfg);
    const ModelRegistry reg = load_registry(cfg);
    const LayerStack stack = read_layer_stack(cfg);
    const int threads = static_cast<int>(cfg.get_long("threads", 0));

    PredictTally tally;
    const Grid age = predict_map(stack, reg, threads, &tally);
    age.write((dir / "age.asc").string());

    std::ostringstream os;
    os << "cells_total = " << tally.total << "\n";
    os << "cells_predicted = " << tally.predicted << "\n";
    os << "cells_masked = " << tally.masked << "\n";
    os << "cells_missing_predictor = " << tally.missing << "\n";
    os << "routing_exact = " << tally.routing.exact << "\n";
    os << "routing_substituted = " << tally.routing.substituted << "\n";
    write_text(dir / "tally.txt", os.str());
    write_manifest(dir, "predict", cfg);

    std::cerr << "note: predicted " << tally.predicted << "/" << tally.total
              << " cells (" << tally.masked << " masked, " << tally.missing
              << " missing predictors)\n";
}

/* ------------------------------ fit -------------------------------- */

namespace {

struct Stratum
{
    Species species;
    int si;
};

bool operator<(const Stratum &a, const Stratum &b)
{
    if (a.species != b.species)
        return static_cast<int>(a.species) < static_cast<int>(b.species);
    return a.si < b.si;
}

}  // namespace

void cmd_fit(const RunConfig &cfg)
{
    const fs::path dir = ensure_out_dir(cfg);
    const PlotTable table = read_plot_table(cfg.get_string("plots"));
    const long min_rows = cfg.get_long("min_rows", 10);
    const std::string link_req = lower(cfg.get_string("link", "log"));

    StepwiseOptions opt;
    opt.squares = cfg.get_bool("squares", true);
    opt.interactions = cfg.get_bool("interactions", false);
    opt.p_threshold = cfg.get_double("p_threshold", 0.05);

    std::map<Stratum, TrainingSet> strata;
    for (std::size_t i = 0; i < table.plots.size(); ++i)
    {
        const PlotObservation &obs = table.plots[i];
        if (std::isnan(table.ages[i]))
            continue;
        const Stratum key{obs.species_observed,
                          snap_si(obs.si_observed)};
        TrainingSet &set = strata[key];
        set.species = key.species;
        set.si = key.si;
        set.rows.push_back({table.ages[i], obs.predictors});
    }
    if (strata.empty())
        throw ValidationError("no training rows with observed age in " +
                              cfg.get_string("plots"));

    ModelRegistry fitted;
    fitted.provenance = "fit:" + cfg.get_string("plots");
    std::vector<FitSummary> summaries;
    std::ostringstream trace;

    for (auto &[key, set] : strata)
    {
        const std::string label = std::string(species_name(key.species)) +
                                  "/SI " + std::to_string(key.si);
        if (static_cast<long>(set.rows.size()) < min_rows)
        {
            std::cerr << "warning: stratum " << label << " has only "
                      << set.rows.size() << " rows (need " << min_rows
                      << "); skipped\n";
            continue;
        }
        // Candidates: predictor columns resolvable in every row of the
        // stratum; partially missing columns are left out with a note.
        std::vector<std::string> candidates;
        for (const std::string &name : table.predictor_columns)
        {
            const bool complete = std::all_of(
                set.rows.begin(), set.rows.end(),
                [&](const TrainingRow &r)
                { return r.predictors.resolve(name).has_value(); });
            if (complete)
                candidates.push_back(name);
            else
                std::cerr << "note: stratum " << label << ": predictor '"
                          << name << "' has gaps; excluded\n";
        }

        auto run_for_link = [&](LinkFunction link)
        { return stepwise_select(set, candidates, link, opt); };

        FitSummary fit;
        if (link_req == "auto")
        {
            // Fit each link with full selection; keep the best RMSE in
            // years on the training rows.
            double best_rmse = std::numeric_limits<double>::infinity();
            for (const LinkFunction link : {LinkFunction::Log,
                                            LinkFunction::Sqrt,
                                            LinkFunction::Identity})
            {
                FitSummary f = run_for_link(link);
                double se = 0.0;
                for (const TrainingRow &row : set.rows)
                {
                    const double d =
                        row.age - predict_age(f.model, row.predictors);
                    se += d * d;
                }
                const double rmse =
                    std::sqrt(se / static_cast<double>(set.rows.size()));
                trace << label << ": link " << link_name(link) << " RMSE "
                      << format_g(rmse, 6) << " years\n";
                if (rmse < best_rmse)
                {
                    best_rmse = rmse;
                    fit = std::move(f);
                }
            }
        }
        else
        {
            const auto link = link_from_name(link_req);
            if (!link)
                throw ValidationError("unknown link '" + link_req +
                                      "' (use log, sqrt, identity or auto)");
            fit = run_for_link(*link);
        }

        trace << label << ": n=" << fit.n << " selection:";
        for (const SelectionStep &s : fit.trace)
            trace << ' ' << s.action << s.name << " (AIC "
                  << format_g(s.aic, 6) << ")";
        if (fit.protection_hits > 0)
            trace << " [height term protected " << fit.protection_hits
                  << "x]";
        trace << "\n";
        for (const auto &[name, weight] : standardized_importance(fit, set))
            trace << label << ": importance " << name << " "
                  << format_g(weight, 6) << "\n";

        fitted.add(fit.model);
        summaries.push_back(std::move(fit));
    }

    if (fitted.size() == 0)
        throw ValidationError("no stratum had enough rows to fit");

    fitted.save((dir / "models.txt").string());
    write_text(dir / "fit_report.txt", fit_report_text(summaries));
    write_text(dir / "selection.txt", trace.str());
    write_manifest(dir, "fit", cfg);

    std::cerr << "note: fitted " << fitted.size() << " models over "
              << strata.size() << " strata\n";
}

/* ---------------------------- validate ----------------------------- */

void cmd_validate(const RunConfig &cfg)
{
    const fs::path dir = ensure_out_dir(cfg);
    const bool weighted = cfg.get_bool("weighted", true);

    std::vector<EvalPair> pairs;

    if (cfg.has("stands"))
    {
        const Grid age_map = Grid::read(cfg.get_string("age_map"));
        const std::vector<Polygon> stands =
            read_polygons(cfg.get_string("stands"));
        const std::vector<StandEstimate> estimates =
            stand_estimates(age_map, stands);

        std::ostringstream stand_csv;
        stand_csv << "stand_id,mean_age,cells,area_ha,flags\n";
        std::size_t excluded = 0;
        for (std::size_t i = 0; i < stands.size(); ++i)
        {
            const StandEstimate &est = estimates[i];
            std::string flags;
            if (!est.has_estimate)
                flags = "no_cells";
            stand_csv << est.id << ','
                      << (est.has_estimate ? format_g(est.mean_age, 17)
                                           : std::string("NA"))
                      << ',' << est.cells << ',' << format_g(est.area_ha, 17)
                      << ',' << flags << '\n';

            if (!est.has_estimate)
            {
                std::cerr << "warning: stand " << est.id
                          << " covers no predicted cells; excluded\n";
                ++excluded;
                continue;
            }
            if (!stands[i].has_attribute("age"))
            {
                std::cerr << "warning: stand " << est.id
                          << " has no observed age; excluded\n";
                ++excluded;
                continue;
            }
            EvalPair pair;
            pair.observed = stands[i].attribute_double("age");
            pair.predicted = est.mean_age;
            pair.weight = est.area_ha;
            pair.label = stands[i].has_attribute("si")
                             ? "SI " + stands[i].attributes.at("si")
                             : std::string("stands");
            pairs.push_back(std::move(pair));
        }
        write_text(dir / "stands.csv", stand_csv.str());
        if (excluded)
            std::cerr << "note: " << excluded << " stands excluded\n";
    }
    else if (cfg.has("plots"))
    {
        const PlotTable table = read_plot_table(cfg.get_string("plots"));
        const ModelRegistry reg = load_registry(cfg);
        const std::string mode_name =
            lower(cfg.get_string("routing", "observed_si"));
        RoutingMode mode;
        if (mode_name == "observed_si")
            mode = RoutingMode::ObservedSI;
        else if (mode_name == "predicted_si")
            mode = RoutingMode::PredictedSI;
        else if (mode_name == "observed_species")
            mode = RoutingMode::ObservedSpecies;
        else if (mode_name == "predicted_species")
            mode = RoutingMode::PredictedSpecies;
        else
            throw ValidationError("unknown routing mode '" + mode_name + "'");

        PlotTally tally;
        const std::vector<PlotPrediction> preds =
            apply_to_plots(table.plots, reg, mode, &tally);
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < table.plots.size(); ++i)
            index[table.plots[i].id] = i;
        for (const PlotPrediction &p : preds)
        {
            const std::size_t i = index.at(p.id);
            if (std::isnan(table.ages[i]))
                continue;
            EvalPair pair;
            pair.observed = table.ages[i];
            pair.predicted = p.age;
            pair.label = "SI " + std::to_string(p.routed_si);
            pairs.push_back(std::move(pair));
        }
        if (tally.skipped)
            std::cerr << "warning: " << tally.skipped
                      << " plots skipped (missing inputs)\n";
    }
    else
    {
        throw ValidationError(
            "validate needs either 'stands' (with 'age_map') or 'plots'");
    }

    if (pairs.empty())
        throw ValidationError("validation has no usable pairs");

    const EvaluationReport report = breakdown(pairs, weighted);
    write_text(dir / "report.txt", report_text(report));
    write_text(dir / "report.csv", report_csv(report));
    scatter_export(pairs, (dir / "scatter.csv").string());
    write_manifest(dir, "validate", cfg);

    std::cerr << "note: " << pairs.size() << " pairs; RMSE "
              << format_g(report.all.rmse, 4) << " (MD "
              << format_g(report.all.md, 4) << ")\n";
}

/* ----------------------------- metrics ----------------------------- */

void cmd_metrics(const RunConfig &cfg)
{
    const fs::path dir = ensure_out_dir(cfg);
    const Grid dtm = Grid::read(cfg.get_string("dtm"));
    PointCloud cloud = PointCloud::read(cfg.get_string("cloud"));

    NormalizeTally norm;
    const PointCloud normalized = normalize_heights(cloud, dtm, &norm);
    std::cerr << "note: " << normalized.points.size() << " points ("
              << norm.dropped << " dropped, " << norm.clamped << " clamped)\n";

    if (cfg.get_bool("grid", false))
    {
        Grid tmpl(static_cast<int>(cfg.get_long(
                      "ncols", dtm.ncols() * static_cast<long>(dtm.cellsize()) /
                                   16)),
                  static_cast<int>(cfg.get_long(
                      "nrows", dtm.nrows() * static_cast<long>(dtm.cellsize()) /
                                   16)),
                  cfg.get_double("xllcorner", dtm.xll()),
                  cfg.get_double("yllcorner", dtm.yll()),
                  cfg.get_double("cellsize_out", 16.0), kAgeNodata,
                  kAgeNodata);
        const auto grids = metrics_grid(normalized, tmpl);
        const fs::path mdir = dir / "metrics";
        std::error_code ec;
        fs::create_directories(mdir, ec);
        if (ec)
            throw ProcessingError("cannot create " + mdir.string());
        for (const auto &[name, g] : grids)
            g.write((mdir / (name + ".asc")).string());
        write_manifest(dir, "metrics", cfg);
        return;
    }

    const std::vector<Polygon> plots = read_polygons(cfg.get_string("plots"));
    const Grid slope = (dtm.ncols() >= 3 && dtm.nrows() >= 3)
                           ? slope_grid(dtm)
                           : Grid();

    std::vector<ScenePlot> rows;
    for (const Polygon &poly : plots)
    {
        PointCloud clipped;
        clipped.normalized = true;
        for (const PointRecord &p : normalized.points)
            if (poly.contains(p.x, p.y))
                clipped.points.push_back(p);
        if (clipped.points.empty())
        {
            std::cerr << "warning: plot " << poly.id
                      << " holds no points; skipped\n";
            continue;
        }
        const MetricsVector metrics = als_metrics(clipped);

        TerrainValues terrain;
        try
        {
            terrain.dtm = zonal_weighted_mean(dtm, poly);
        }
        catch (const EmptyZoneError &)
        {
        }
        if (slope.size() > 0)
        {
            try
            {
                terrain.slope = zonal_weighted_mean(slope, poly);
            }
            catch (const EmptyZoneError &)
            {
            }
        }
        if (poly.has_attribute("distC"))
            terrain.dist_coast = poly.attribute_double("distC");
        if (poly.has_attribute("Lat"))
            terrain.lat = poly.attribute_double("Lat");
        if (poly.has_attribute("Lon"))
            terrain.lon = poly.attribute_double("Lon");
        std::optional<double> diff_t;
        if (poly.has_attribute("diffT"))
            diff_t = poly.attribute_double("diffT");

        ScenePlot row;
        row.id = poly.id;
        row.species = poly.has_attribute("species")
                          ? species_from_field(poly.attributes.at("species"),
                                               0, "plots")
                          : Species::Spruce;
        row.si = poly.has_attribute("si")
                     ? static_cast<int>(poly.attribute_double("si"))
                     : 0;
        row.observed_age = poly.has_attribute("age")
                               ? poly.attribute_double("age")
                               : std::numeric_limits<double>::quiet_NaN();
        row.predictors =
            assemble_predictors(metrics, std::nullopt, terrain, diff_t);
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ProcessingError("no plot produced metrics");

    write_plot_table(dir / "plots.csv", rows);
    write_manifest(dir, "metrics", cfg);
}

/* ----------------------------- curves ------------------------------ */

void cmd_curves(const RunConfig &cfg)
{
    const fs::path dir = ensure_out_dir(cfg);
    const ModelRegistry reg = load_registry(cfg);

    const auto species = species_from_name(cfg.get_string("species"));
    if (!species)
        throw ValidationError("unknown species '" + cfg.get_string("species") +
                              "'");
    const int si = snap_si(cfg.get_double("si"));
    const AgeModel &model = route_model(reg, *species, si);

    const std::string sweep = cfg.get_string("sweep", "h95_first");
    const double lo = cfg.get_double("lo", 0.0);
    const double hi = cfg.get_double("hi", 30.0);
    const int steps = static_cast<int>(cfg.get_long("steps", 61));

    PredictorVector baseline;
    for (const auto &[name, value] : synth_baseline())
        baseline.set(name, value);
    baseline.set("h95_first", 0.0);
    for (const auto &[key, value] : cfg.entries())
        if (key.rfind("baseline.", 0) == 0)
        {
            double v;
            if (!parse_double(value, v))
                throw ValidationError("config key '" + key +
                                      "' is not numeric: '" + value + "'");
            baseline.set(key.substr(9), v);
        }

    const auto curve = response_curve(model, sweep, lo, hi, steps, baseline);
    std::ostringstream os;
    os << sweep << ",age\n";
    for (const auto &[v, age] : curve)
        os << format_g(v, 17) << ',' << format_g(age, 17) << '\n';
    write_text(dir / "curve.csv", os.str());
    write_manifest(dir, "curves", cfg);
}

/* ------------------------------ entry ------------------------------ */

void run_command(const std::string &command, const RunConfig &cfg)
{
    if (command == "metrics")
        cmd_metrics(cfg);
    else if (command == "fit")
        cmd_fit(cfg);
    else if (command == "predict")
        cmd_predict(cfg);
    else if (command == "validate")
        cmd_validate(cfg);
    else if (command == "synth")
        cmd_synth(cfg);
    else if (command == "curves")
        cmd_curves(cfg);
    else
        throw ValidationError("unknown command '" + command + "'");
}

}  // namespace standage
