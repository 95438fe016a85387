/******************************************************************************
 * Project:  standage
 * Purpose:  Stand-age regression models: per species and site-index class,
 *           link handling with back-transformation bias correction, model
 *           registry with text serialization and nearest-class routing.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/predictors.hpp"

namespace standage {

enum class Species : int
{
    Spruce = 1,
    Pine = 2,
    Birch = 3,
};

const char *species_name(Species s);
std::optional<Species> species_from_name(const std::string &name);
std::optional<Species> species_from_code(double code);

enum class LinkFunction
{
    Log,
    Sqrt,
    Identity,
};

const char *link_name(LinkFunction link);
std::optional<LinkFunction> link_from_name(const std::string &name);

/** The site-index classes models are stratified by (H40, meters). */
std::span<const int> si_levels();

struct ModelTerm
{
    std::string name;
    double coefficient;
};

/**
 * One fitted model: age is back-transformed from the linear predictor eta
 * according to the link.  sigma is the residual standard error on the link
 * scale and drives the back-transformation bias correction.
 */
struct AgeModel
{
    Species species = Species::Spruce;
    int si = 0;
    LinkFunction link = LinkFunction::Log;
    double intercept = 0.0;
    std::vector<ModelTerm> terms;
    double sigma = 0.0;
};

/**
 * Linear predictor for the model, or nothing when a term cannot be
 * resolved (the offending name is reported through missing_name).
 */
std::optional<double> eval_eta(const AgeModel &m, const PredictorVector &x,
                               std::string *missing_name = nullptr);

/**
 * Back-transform a linear predictor to years.
 *   log:      exp(eta + sigma^2 / 2)
 *   sqrt:     eta^2 + sigma^2, with negative eta clamped to 0 first
 *   identity: eta, clamped to 0
 */
double back_transform(LinkFunction link, double eta, double sigma);

/** Predicted age in years; throws ModelInputError naming the first
 *  unresolvable predictor. */
double predict_age(const AgeModel &m, const PredictorVector &x);

/** Snap a continuous site-index estimate to the nearest class level; ties
 *  snap to the lower level, values beyond the range clamp. */
int snap_si(double si_value, std::span<const int> levels = si_levels());

/**
 * Age along a sweep of one predictor, other predictors held at the given
 * baseline.  Sweeping a predictor co-updates its square entry (<name>2)
 * when the model or baseline uses one.  steps counts intervals, so the
 * result holds steps+1 (sweep value, age) pairs including both endpoints.
 */
std::vector<std::pair<double, double>> response_curve(
    const AgeModel &m, const std::string &sweep_name, double lo, double hi,
    int steps, const PredictorVector &baseline);

struct RoutingTally
{
    std::size_t exact = 0;
    std::size_t substituted = 0;
};

class ModelRegistry
{
  public:
    /** The models published with the toolkit (22 models, log link). */
    static ModelRegistry builtin();

    static ModelRegistry load(const std::string &path);
    void save(const std::string &path) const;

    void add(AgeModel model);
    const AgeModel *find(Species s, int si) const;
    /** Model with the nearest available class for the species; ties prefer
     *  the lower class.  Null when the species has no models at all. */
    const AgeModel *nearest(Species s, int si) const;

    const std::vector<AgeModel> &models() const { return models_; }
    std::size_t size() const { return models_.size(); }

    std::string provenance;

  private:
    std::vector<AgeModel> models_;
};

/** Route to the model for (species, snapped si), substituting the nearest
 *  class when the exact one is absent.  Throws ProcessingError when the
 *  species has no models. */
const AgeModel &route_model(const ModelRegistry &reg, Species s, int si,
                            RoutingTally *tally = nullptr);

/**
 * Human-readable coefficient listing of the built-in models, one block per
 * species with per-class coefficient rows and residual standard errors.
 */
std::string builtin_table_text();

}  // namespace standage
