/******************************************************************************
 * Project:  standage
 * Purpose:  Model fitting: OLS on a transformed response, AIC-guided
 *           stepwise selection with p-value pruning, link comparison and
 *           standardized-coefficient importance ranking.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include "core/model.hpp"

namespace standage {

struct TrainingRow
{
    double age;
    PredictorVector predictors;
};

struct TrainingSet
{
    Species species = Species::Spruce;
    int si = 0;
    std::vector<TrainingRow> rows;
};

struct TermStats
{
    std::string name;
    double estimate;
    double std_error;
    double t_value;
    double p_value;
};

struct SelectionStep
{
    char action;  // '+' add, '-' drop
    std::string name;
    double aic;
};

struct FitSummary
{
    AgeModel model;
    TermStats intercept_stats{};
    std::vector<TermStats> term_stats;
    std::size_t n = 0;
    double rss = 0.0;
    double aic = 0.0;
    double r2_adjusted = 0.0;
    bool perfect_fit = false;
    std::vector<SelectionStep> trace;
    /** Times the mandatory-height-term protection blocked an AIC drop. */
    std::size_t protection_hits = 0;
};

/**
 * OLS of the link-transformed age on the named predictors plus an
 * intercept.  Needs n >= k + 2 rows so at least one residual degree of
 * freedom remains.  A rank-deficient design raises SingularDesignError
 * naming the collinear columns.
 */
FitSummary ols_fit(const TrainingSet &data, const std::vector<std::string> &names,
                   LinkFunction link);

/** n * ln(rss/n) + 2 * (k + 1) with k the number of coefficients including
 *  the intercept.  rss of 0 yields -inf (a perfect fit dominates). */
double aic_value(double rss, std::size_t n, std::size_t n_coefficients);

struct StepwiseOptions
{
    bool squares = false;       // offer <name>2 terms for selected bases
    bool interactions = false;  // offer <a>*<b> terms for selected bases
    double p_threshold = 0.05;
    double aic_epsilon = 1e-9;  // required AIC improvement per move
};

/**
 * Greedy stepwise selection.  Starts from {h95_first}; each round applies
 * the single add or drop with the best AIC improvement.  h95_first cannot
 * be dropped during the AIC phase.  Afterwards terms are pruned one at a
 * time by largest p-value at or above the threshold (refitting between
 * drops), which may remove h95_first too.
 */
FitSummary stepwise_select(const TrainingSet &data,
                           const std::vector<std::string> &candidates,
                           LinkFunction link,
                           const StepwiseOptions &opt = {});

struct LinkFit
{
    LinkFunction link;
    double rmse;       // years, on back-transformed predictions
    double mean_dev;   // observed - predicted, years
    FitSummary fit;
};

/** Fit the same predictor set under all three links and report RMSE and
 *  mean deviation in years; entries are ordered log, sqrt, identity. */
std::vector<LinkFit> compare_links(const TrainingSet &data,
                                   const std::vector<std::string> &names);

/** The link with the smallest RMSE in years. */
const LinkFit &best_link(const std::vector<LinkFit> &fits);

/**
 * Coefficient magnitudes after refitting on z-scored predictors, sorted
 * descending; constant predictors are skipped.  The ordering ranks
 * explanatory weight independent of units.
 */
std::vector<std::pair<std::string, double>> standardized_importance(
    const FitSummary &fit, const TrainingSet &data);

/** Coefficient listing of fitted models in the same layout as the
 *  built-in table text. */
std::string fit_report_text(const std::vector<FitSummary> &fits);

}  // namespace standage
