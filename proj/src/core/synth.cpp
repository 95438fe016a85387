/******************************************************************************
 * Project:  standage
 * Purpose:  Synthetic scene generation by model inversion.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace standage {

namespace {

constexpr double kHeightCap = 50.0;  // solver search range for h95_first, m
constexpr int kMaxAgeDraws = 1000;

double forward_link(double age, LinkFunction link)
{
    switch (link)
    {
        case LinkFunction::Log: return std::log(age);
        case LinkFunction::Sqrt: return std::sqrt(age);
        case LinkFunction::Identity: return age;
    }
    return age;
}

double inverse_link(double eta, LinkFunction link)
{
    // Raw inverse, no bias correction: used for truth and noisy draws.
    switch (link)
    {
        case LinkFunction::Log: return std::exp(eta);
        case LinkFunction::Sqrt: return eta < 0.0 ? 0.0 : eta * eta;
        case LinkFunction::Identity: return eta < 0.0 ? 0.0 : eta;
    }
    return eta;
}

double baseline_value(const std::string &name)
{
    for (const auto &[n, v] : synth_baseline())
        if (n == name)
            return v;
    throw ValidationError("scene generator has no baseline for predictor '" +
                          name + "'");
}

// eta(h) = c0 + b h + a h^2 with every other predictor at its baseline.
struct InvertedModel
{
    const AgeModel *model = nullptr;
    double c0 = 0.0;
    double b = 0.0;
    double a = 0.0;
    double eta_lo = 0.0;  // attainable eta over h in [0, kHeightCap]
    double eta_hi = 0.0;

    double eta_at(double h) const { return c0 + b * h + a * h * h; }

    double solve_h(double eta) const
    {
        if (a == 0.0)
            return (eta - c0) / b;
        const double disc = b * b - 4.0 * a * (c0 - eta);
        // Ascending-branch root; valid for either sign of a.
        return (-b + std::sqrt(std::max(0.0, disc))) / (2.0 * a);
    }
};

InvertedModel invert_model(const AgeModel &m)
{
    InvertedModel inv;
    inv.model = &m;
    inv.c0 = m.intercept;
    for (const ModelTerm &t : m.terms)
    {
        if (t.name == "h95_first")
        {
            inv.b += t.coefficient;
        }
        else if (t.name == "h95_first2")
        {
            inv.a += t.coefficient;
        }
        else if (t.name.find('*') != std::string::npos)
        {
            const auto star = t.name.find('*');
            const std::string lhs = t.name.substr(0, star);
            const std::string rhs = t.name.substr(star + 1);
            if (lhs == "h95_first")
                inv.b += t.coefficient * baseline_value(rhs);
            else if (rhs == "h95_first")
                inv.b += t.coefficient * baseline_value(lhs);
            else
                inv.c0 += t.coefficient * baseline_value(lhs) *
                          baseline_value(rhs);
        }
        else if (t.name.size() > 1 && t.name.back() == '2' &&
                 t.name != "cc2" && t.name != "s2_2")
        {
            const double v =
                baseline_value(t.name.substr(0, t.name.size() - 1));
            inv.c0 += t.coefficient * v * v;
        }
        else
        {
            inv.c0 += t.coefficient * baseline_value(t.name);
        }
    }
    if (!(inv.b > 0.0))
        throw ValidationError("scene generator requires a positive "
                              "height-term coefficient in model " +
                              std::string(species_name(m.species)) + "/SI " +
                              std::to_string(m.si));

    double h_hi = kHeightCap;
    if (inv.a < 0.0)
        h_hi = std::min(h_hi, -inv.b / (2.0 * inv.a));  // vertex
    double h_lo = 0.0;
    if (inv.a > 0.0)
        h_lo = std::max(0.0, -inv.b / (2.0 * inv.a));
    inv.eta_lo = inv.eta_at(h_lo);
    inv.eta_hi = inv.eta_at(h_hi);
    return inv;
}

}  // namespace

const std::vector<std::pair<std::string, double>> &synth_baseline()
{
    static const std::vector<std::pair<std::string, double>> baseline = {
        {"cc2", 0.8},  {"cc5", 0.6},    {"cc10", 0.4}, {"NDVI", 0.8},
        {"s2_8A", 3000.0}, {"s2_11", 1500.0}, {"DTM", 300.0},
        {"distC", 30000.0}, {"Lat", 63.0}, {"Lon", 10.0}, {"slope", 5.0},
        {"diffT", 0.0},
    };
    return baseline;
}

SyntheticScene synth_scene(const ModelRegistry &reg, const SceneSpec &spec)
{
    if (spec.ncols < 1 || spec.nrows < 1)
        throw ValidationError("scene dimensions must be positive");
    if (spec.species_mix.empty() || spec.si_mix.empty())
        throw ValidationError("scene needs a non-empty species and class mix");
    if (!(spec.age_lo >= 3.0 && spec.age_hi <= 287.0 &&
          spec.age_lo <= spec.age_hi))
        throw ValidationError("scene age range must lie within [3, 287]");
    if (spec.sigma_scale < 0.0)
        throw ValidationError("scene sigma scale must be >= 0");
    for (const auto &[si, w] : spec.si_mix)
    {
        if (std::find(si_levels().begin(), si_levels().end(), si) ==
            si_levels().end())
            throw ValidationError("scene class mix holds unknown level " +
                                  std::to_string(si));
        if (!(w > 0.0))
            throw ValidationError("scene mix weights must be positive");
    }
    for (const auto &[sp, w] : spec.species_mix)
        if (!(w > 0.0))
            throw ValidationError("scene mix weights must be positive");

    // Pre-invert every stratum and verify the requested age range is
    // attainable somewhere in it.
    const std::size_t n_sp = spec.species_mix.size();
    const std::size_t n_si = spec.si_mix.size();
    std::vector<InvertedModel> inverted(n_sp * n_si);
    for (std::size_t i = 0; i < n_sp; ++i)
        for (std::size_t j = 0; j < n_si; ++j)
        {
            const Species sp = spec.species_mix[i].first;
            const int si = spec.si_mix[j].first;
            const AgeModel &m = route_model(reg, sp, si);
            InvertedModel inv = invert_model(m);
            const double t_lo = forward_link(spec.age_lo, m.link);
            const double t_hi = forward_link(spec.age_hi, m.link);
            if (t_hi < inv.eta_lo || t_lo > inv.eta_hi)
                throw ValidationError(
                    "stratum " + std::string(species_name(sp)) + "/SI " +
                    std::to_string(si) + " cannot reach ages in [" +
                    format_g(spec.age_lo, 6) + ", " + format_g(spec.age_hi, 6) +
                    "] at the scene baseline (attainable [" +
                    format_g(inverse_link(inv.eta_lo, m.link), 6) + ", " +
                    format_g(inverse_link(inv.eta_hi, m.link), 6) + "])");
            inverted[i * n_si + j] = inv;
        }

    std::vector<double> sp_weights, si_weights;
    for (const auto &[sp, w] : spec.species_mix)
        sp_weights.push_back(w);
    for (const auto &[si, w] : spec.si_mix)
        si_weights.push_back(w);

    // The full layer set: every base predictor any registry model needs,
    // so the scene is usable against the whole registry.
    std::vector<std::string> layer_names;
    auto add_layer_name = [&layer_names](const std::string &n)
    {
        if (std::find(layer_names.begin(), layer_names.end(), n) ==
            layer_names.end())
            layer_names.push_back(n);
    };
    for (const AgeModel &m : reg.models())
        for (const ModelTerm &t : m.terms)
        {
            std::string name = t.name;
            const auto star = name.find('*');
            if (star != std::string::npos)
            {
                add_layer_name(name.substr(0, star));
                add_layer_name(name.substr(star + 1));
                continue;
            }
            if (name.size() > 1 && name.back() == '2' && name != "cc2" &&
                name != "s2_2" && name != "h95_first2")
                name = name.substr(0, name.size() - 1);
            if (name == "h95_first2")
                continue;  // derived from h95_first on the fly
            add_layer_name(name);
        }

    SyntheticScene scene;
    const double nodata = kAgeNodata;
    Grid h_grid(spec.ncols, spec.nrows, spec.xll, spec.yll, spec.cellsize,
                nodata, nodata);
    scene.stack.species = Grid(spec.ncols, spec.nrows, spec.xll, spec.yll,
                               spec.cellsize, nodata, nodata);
    scene.stack.si = scene.stack.species;
    scene.truth = scene.stack.species;

    Rng rng(spec.seed);
    scene.plots.reserve(static_cast<std::size_t>(spec.ncols) * spec.nrows);
    for (int r = 0; r < spec.nrows; ++r)
    {
        for (int c = 0; c < spec.ncols; ++c)
        {
            const std::size_t i = rng.weighted_index(sp_weights);
            const std::size_t j = rng.weighted_index(si_weights);
            const InvertedModel &inv = inverted[i * n_si + j];
            const LinkFunction link = inv.model->link;

            double eta_target = 0.0;
            bool ok = false;
            for (int attempt = 0; attempt < kMaxAgeDraws; ++attempt)
            {
                const double age = rng.uniform(spec.age_lo, spec.age_hi);
                const double eta = forward_link(age, link);
                if (eta >= inv.eta_lo && eta <= inv.eta_hi)
                {
                    eta_target = eta;
                    ok = true;
                    break;
                }
                ++scene.redraws;
            }
            if (!ok)
                throw ProcessingError(
                    "scene generator exceeded " +
                    std::to_string(kMaxAgeDraws) + " age draws for stratum " +
                    std::string(species_name(inv.model->species)) + "/SI " +
                    std::to_string(inv.model->si));

            double h = inv.solve_h(eta_target);
            if (h < 0.0)
                h = 0.0;
            const double truth_age = inverse_link(eta_target, link);

            h_grid.set(r, c, h);
            scene.stack.species.set(
                r, c, static_cast<double>(spec.species_mix[i].first));
            scene.stack.si.set(r, c,
                               static_cast<double>(spec.si_mix[j].first));
            scene.truth.set(r, c, truth_age);

            const double noise =
                spec.sigma_scale * inv.model->sigma * rng.normal();

            ScenePlot plot;
            plot.id = "c" + std::to_string(static_cast<std::size_t>(r) *
                                               spec.ncols +
                                           c);
            plot.species = spec.species_mix[i].first;
            plot.si = spec.si_mix[j].first;
            plot.observed_age = inverse_link(eta_target + noise, link);
            plot.predictors.set("h95_first", h);
            plot.predictors.set("h95_first2", h * h);
            for (const std::string &name : layer_names)
                if (name != "h95_first")
                    plot.predictors.set(name, baseline_value(name));
            scene.plots.push_back(std::move(plot));
        }
    }

    scene.stack.predictors.emplace("h95_first", std::move(h_grid));
    for (const std::string &name : layer_names)
    {
        if (name == "h95_first")
            continue;
        scene.stack.predictors.emplace(
            name, Grid(spec.ncols, spec.nrows, spec.xll, spec.yll,
                       spec.cellsize, nodata, baseline_value(name)));
    }
    return scene;
}

std::string scene_manifest(const SceneSpec &spec)
{
    std::ostringstream os;
    os << "ncols = " << spec.ncols << "\n";
    os << "nrows = " << spec.nrows << "\n";
    os << "cellsize = " << format_g(spec.cellsize, 10) << "\n";
    os << "xllcorner = " << format_g(spec.xll, 10) << "\n";
    os << "yllcorner = " << format_g(spec.yll, 10) << "\n";
    std::string mix;
    for (const auto &[sp, w] : spec.species_mix)
        mix += (mix.empty() ? "" : ",") + std::string(species_name(sp)) + ":" +
               format_g(w, 10);
    os << "species_mix = " << mix << "\n";
    mix.clear();
    for (const auto &[si, w] : spec.si_mix)
        mix += (mix.empty() ? "" : ",") + std::to_string(si) + ":" +
               format_g(w, 10);
    os << "si_mix = " << mix << "\n";
    os << "age_lo = " << format_g(spec.age_lo, 10) << "\n";
    os << "age_hi = " << format_g(spec.age_hi, 10) << "\n";
    os << "seed = " << spec.seed << "\n";
    os << "sigma_scale = " << format_g(spec.sigma_scale, 10) << "\n";
    for (const auto &[name, value] : synth_baseline())
        os << "baseline." << name << " = " << format_g(value, 10) << "\n";
    return os.str();
}

}  // namespace standage
