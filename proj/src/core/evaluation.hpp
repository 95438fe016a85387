/******************************************************************************
 * Project:  standage
 * Purpose:  Accuracy assessment: (weighted) RMSE and mean deviation,
 *           per-class breakdowns, scatter export, synthetic scenes for
 *           end-to-end verification.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include "core/mapping.hpp"
#include "core/rng.hpp"

namespace standage {

struct EvalPair
{
    double observed;
    double predicted;
    double weight = 1.0;
    std::string label;  // class key for breakdowns, e.g. "SI 14"
};

struct ReportRow
{
    std::string label;
    std::size_t n = 0;
    double rmse = 0.0;
    double rmse_pct = 0.0;  // NaN when the observed mean is 0
    double md = 0.0;        // observed - predicted; positive = underprediction
    double md_pct = 0.0;    // NaN when the observed mean is 0
    double mean_observed = 0.0;
    double weight_sum = 0.0;
};

/**
 * RMSE and mean deviation over the pairs.  Weighted mode normalizes the
 * weights to sum to one; unweighted mode is the plain 1/n average (equal
 * to weighted mode with uniform weights).  Relative values are percent of
 * the (weighted) observed mean.
 */
ReportRow rmse_md(const std::vector<EvalPair> &pairs, bool weighted,
                  const std::string &label = "All");

struct EvaluationReport
{
    std::vector<ReportRow> classes;  // one row per distinct label
    ReportRow all;                   // pooled over every pair
};

/** Per-label rows (ordered by trailing class number, then name) plus a
 *  pooled "All" row computed over the pairs, never by averaging rows. */
EvaluationReport breakdown(const std::vector<EvalPair> &pairs, bool weighted);

/** CSV with header observed,predicted,class,weight. */
void scatter_export(const std::vector<EvalPair> &pairs,
                    const std::string &path);

std::string report_text(const EvaluationReport &report);
std::string report_csv(const EvaluationReport &report);

/* ------------------------------------------------------------------ */
/*                         Synthetic scenes                            */
/* ------------------------------------------------------------------ */

struct SceneSpec
{
    int ncols = 100;
    int nrows = 100;
    double cellsize = 16.0;
    double xll = 0.0;
    double yll = 0.0;
    std::vector<std::pair<Species, double>> species_mix = {
        {Species::Spruce, 1.0}};
    std::vector<std::pair<int, double>> si_mix = {{17, 1.0}};
    double age_lo = 20.0;
    double age_hi = 70.0;
    std::uint64_t seed = 1;
    /** Multiplies each model's sigma when drawing observation noise;
     *  0 gives noise-free observations. */
    double sigma_scale = 1.0;
};

struct ScenePlot
{
    std::string id;
    Species species;
    int si;
    double observed_age;  // truth plus lognormal observation noise
    PredictorVector predictors;
};

struct SyntheticScene
{
    LayerStack stack;
    Grid truth;  // noise-free generating age per cell
    std::vector<ScenePlot> plots;
    std::size_t redraws = 0;  // age draws rejected as unattainable
};

/**
 * Baseline values the generator holds every predictor at except the
 * height term it solves for.  Published in the scene manifest.
 */
const std::vector<std::pair<std::string, double>> &synth_baseline();

/**
 * Build a scene by inverting the registry models: per cell a species, a
 * class and a target age are drawn, then the height predictor is solved
 * so the routed model reproduces that age exactly (all other predictors
 * pinned at the baseline).  Draws whose age no height can reach are
 * redrawn and tallied.  Identical spec -> identical scene, bit for bit.
 */
SyntheticScene synth_scene(const ModelRegistry &reg, const SceneSpec &spec);

/** Key=value manifest describing a scene build. */
std::string scene_manifest(const SceneSpec &spec);

}  // namespace standage
