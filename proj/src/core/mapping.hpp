/******************************************************************************
 * Project:  standage
 * Purpose:  Wall-to-wall age mapping from predictor layers, stand-level
 *           aggregation and plot-table prediction.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include "core/model.hpp"
#include "core/polygon.hpp"

namespace standage {

/** Nodata sentinel used for produced age maps. */
constexpr double kAgeNodata = -9999.0;

/**
 * Co-registered predictor layers plus the two routing layers.  The species
 * grid codes 1 = spruce, 2 = pine, 3 = birch; the si grid carries a
 * (possibly continuous) site index that is snapped per cell.  An optional
 * mask keeps only cells with a non-zero mask value.
 */
struct LayerStack
{
    std::map<std::string, Grid> predictors;
    Grid species;
    Grid si;
    std::optional<Grid> mask;

    /** Geometry consistency and species-code sanity; throws
     *  ValidationError naming the offending layer. */
    void validate() const;
};

struct PredictTally
{
    std::size_t total = 0;      // cells in the template
    std::size_t predicted = 0;  // cells holding an age
    std::size_t masked = 0;     // cells skipped by mask / routing layers
    std::size_t missing = 0;    // cells lost to missing predictor values
    RoutingTally routing;       // per predicted cell
};

/**
 * Predict an age grid over the stack.  Work is split into row bands across
 * threads; each band writes disjoint rows and tallies merge after the
 * join, so the output is identical for any thread count.
 */
Grid predict_map(const LayerStack &stack, const ModelRegistry &reg,
                 int threads = 0, PredictTally *tally = nullptr);

struct StandEstimate
{
    std::string id;
    double mean_age = 0.0;
    std::size_t cells = 0;
    double area_ha = 0.0;
    bool has_estimate = false;
};

/** Mean predicted age per stand polygon over non-nodata cells whose
 *  center falls inside the polygon. */
std::vector<StandEstimate> stand_estimates(const Grid &age_map,
                                           const std::vector<Polygon> &stands);

/** Which site index and species drive model routing for plot tables. */
enum class RoutingMode
{
    ObservedSI,        // observed si, observed species
    PredictedSI,       // predicted si, observed species
    ObservedSpecies,   // alias of ObservedSI routing inputs
    PredictedSpecies,  // observed si, predicted species
};

struct PlotObservation
{
    std::string id;
    PredictorVector predictors;
    Species species_observed = Species::Spruce;
    std::optional<Species> species_predicted;
    double si_observed = 0.0;
    std::optional<double> si_predicted;
};

struct PlotPrediction
{
    std::string id;
    double age;
    Species routed_species;
    int routed_si;
};

struct PlotTally
{
    std::size_t predicted = 0;
    std::size_t skipped = 0;  // missing predictor or routing input
    RoutingTally routing;
};

std::vector<PlotPrediction> apply_to_plots(
    const std::vector<PlotObservation> &plots, const ModelRegistry &reg,
    RoutingMode mode, PlotTally *tally = nullptr);

}  // namespace standage
