/******************************************************************************
 * Project:  standage
 * Purpose:  Mapping implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace standage {

void LayerStack::validate() const
{
    auto check = [this](const Grid &g, const std::string &name)
    {
        if (g.size() == 0)
            throw ValidationError("layer '" + name + "' is empty");
        if (!species.same_geometry(g))
            throw ValidationError("layer '" + name +
                                  "' does not match the stack geometry");
    };
    if (species.size() == 0)
        throw ValidationError("layer 'species' is empty");
    check(si, "si");
    if (mask)
        check(*mask, "mask");
    for (const auto &[name, g] : predictors)
        check(g, name);

    for (const double v : species.values())
        if (!species.is_nodata(v) && !species_from_code(v))
            throw ValidationError("layer 'species' holds invalid code " +
                                  format_g(v, 10) +
                                  " (expected 1, 2, 3 or nodata)");
}

namespace {

// How one model term is materialized from the stack.
struct TermSource
{
    enum class Kind
    {
        Layer,    // value of one layer
        Square,   // value of one layer, squared
        Product,  // product of two layers
    };
    Kind kind;
    const Grid *a = nullptr;
    const Grid *b = nullptr;
    double coefficient = 0.0;
};

struct PreparedModel
{
    const AgeModel *model = nullptr;
    std::vector<TermSource> terms;
    bool usable = false;  // false when some term has no source layer
};

const Grid *find_layer(const std::map<std::string, Grid> &layers,
                       const std::string &name)
{
    const auto it = layers.find(name);
    return it == layers.end() ? nullptr : &it->second;
}

bool prepare_term(const std::map<std::string, Grid> &layers,
                  const ModelTerm &term, TermSource &out)
{
    out.coefficient = term.coefficient;
    if (const Grid *g = find_layer(layers, term.name))
    {
        out.kind = TermSource::Kind::Layer;
        out.a = g;
        return true;
    }
    if (term.name.size() > 1 && term.name.back() == '2')
    {
        if (const Grid *g = find_layer(
                layers, term.name.substr(0, term.name.size() - 1)))
        {
            out.kind = TermSource::Kind::Square;
            out.a = g;
            return true;
        }
    }
    const auto star = term.name.find('*');
    if (star != std::string::npos)
    {
        const Grid *ga = find_layer(layers, term.name.substr(0, star));
        const Grid *gb = find_layer(layers, term.name.substr(star + 1));
        if (ga && gb)
        {
            out.kind = TermSource::Kind::Product;
            out.a = ga;
            out.b = gb;
            return true;
        }
    }
    return false;
}

PreparedModel prepare_model(const std::map<std::string, Grid> &layers,
                            const AgeModel &m)
{
    PreparedModel pm;
    pm.model = &m;
    pm.usable = true;
    for (const ModelTerm &t : m.terms)
    {
        TermSource src;
        if (!prepare_term(layers, t, src))
        {
            pm.usable = false;
            pm.terms.clear();
            return pm;
        }
        pm.terms.push_back(src);
    }
    return pm;
}

int resolve_threads(int threads)
{
    if (threads > 0)
        return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

Grid predict_map(const LayerStack &stack, const ModelRegistry &reg,
                 int threads, PredictTally *tally)
{
    stack.validate();

    const Grid &sp = stack.species;
    Grid out(sp.ncols(), sp.nrows(), sp.xll(), sp.yll(), sp.cellsize(),
             kAgeNodata, kAgeNodata);

    // Species that never reach the prediction loop (absent from the map or
    // fully masked) must not require models, so scan for codes in use first.
    bool code_present[3] = {false, false, false};
    for (int r = 0; r < sp.nrows(); ++r)
        for (int c = 0; c < sp.ncols(); ++c)
        {
            if (stack.mask)
            {
                const double mv = stack.mask->at(r, c);
                if (stack.mask->is_nodata(mv) || mv == 0.0)
                    continue;
            }
            const double code = sp.at(r, c);
            const double si_raw = stack.si.at(r, c);
            if (sp.is_nodata(code) || stack.si.is_nodata(si_raw) ||
                !std::isfinite(si_raw))
                continue;
            code_present[static_cast<int>(code) - 1] = true;
        }

    // Models are routed per (species code, snapped class); prepare every
    // combination in use up front so worker threads never mutate shared
    // state.
    const auto levels = si_levels();
    const std::size_t nlevels = levels.size();
    std::vector<PreparedModel> prepared(3 * nlevels);
    std::vector<RoutingTally> prep_route(3 * nlevels);
    for (int code = 1; code <= 3; ++code)
    {
        if (!code_present[code - 1])
            continue;
        for (std::size_t li = 0; li < nlevels; ++li)
        {
            const Species s = *species_from_code(code);
            RoutingTally rt;
            const AgeModel &m = route_model(reg, s, levels[li], &rt);
            PreparedModel pm = prepare_model(stack.predictors, m);
            prepared[(code - 1) * nlevels + li] = std::move(pm);
            prep_route[(code - 1) * nlevels + li] = rt;
        }
    }
    auto level_index = [&levels](int si) -> std::size_t
    {
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (levels[i] == si)
                return i;
        return 0;  // snap_si always returns a listed level
    };

    const int nthreads =
        std::max(1, std::min(resolve_threads(threads), sp.nrows()));
    std::vector<PredictTally> tallies(nthreads);

    auto worker = [&](int band)
    {
        const int rows_per = (sp.nrows() + nthreads - 1) / nthreads;
        const int r0 = band * rows_per;
        const int r1 = std::min(sp.nrows(), r0 + rows_per);
        PredictTally &tl = tallies[band];
        for (int r = r0; r < r1; ++r)
        {
            for (int c = 0; c < sp.ncols(); ++c)
            {
                ++tl.total;
                if (stack.mask)
                {
                    const double mv = stack.mask->at(r, c);
                    if (stack.mask->is_nodata(mv) || mv == 0.0)
                    {
                        ++tl.masked;
                        continue;
                    }
                }
                const double code = sp.at(r, c);
                const double si_raw = stack.si.at(r, c);
                if (sp.is_nodata(code) || stack.si.is_nodata(si_raw) ||
                    !std::isfinite(si_raw))
                {
                    ++tl.masked;
                    continue;
                }
                const int snapped = snap_si(si_raw, levels);
                const std::size_t slot =
                    (static_cast<int>(code) - 1) * nlevels +
                    level_index(snapped);
                const PreparedModel &pm = prepared[slot];
                if (!pm.usable)
                {
                    ++tl.missing;
                    continue;
                }
                double eta = pm.model->intercept;
                bool ok = true;
                for (const TermSource &ts : pm.terms)
                {
                    const double va = ts.a->at(r, c);
                    if (ts.a->is_nodata(va))
                    {
                        ok = false;
                        break;
                    }
                    double v = va;
                    if (ts.kind == TermSource::Kind::Square)
                        v = va * va;
                    else if (ts.kind == TermSource::Kind::Product)
                    {
                        const double vb = ts.b->at(r, c);
                        if (ts.b->is_nodata(vb))
                        {
                            ok = false;
                            break;
                        }
                        v = va * vb;
                    }
                    eta += ts.coefficient * v;
                }
                if (!ok)
                {
                    ++tl.missing;
                    continue;
                }
                const double age =
                    back_transform(pm.model->link, eta, pm.model->sigma);
                if (!std::isfinite(age))
                {
                    ++tl.missing;
                    continue;
                }
                out.set(r, c, age);
                ++tl.predicted;
                tl.routing.exact += prep_route[slot].exact;
                tl.routing.substituted += prep_route[slot].substituted;
            }
        }
    };

    if (nthreads == 1)
    {
        worker(0);
    }
    else
    {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int b = 0; b < nthreads; ++b)
            pool.emplace_back(worker, b);
        for (std::thread &t : pool)
            t.join();
    }

    if (tally)
    {
        PredictTally sum;
        for (const PredictTally &tl : tallies)
        {
            sum.total += tl.total;
            sum.predicted += tl.predicted;
            sum.masked += tl.masked;
            sum.missing += tl.missing;
            sum.routing.exact += tl.routing.exact;
            sum.routing.substituted += tl.routing.substituted;
        }
        *tally = sum;
    }
    return out;
}

std::vector<StandEstimate> stand_estimates(const Grid &age_map,
                                           const std::vector<Polygon> &stands)
{
    std::vector<StandEstimate> out;
    out.reserve(stands.size());
    for (const Polygon &p : stands)
    {
        StandEstimate est;
        est.id = p.id;
        est.area_ha = p.area() / 10000.0;
        double sum = 0.0;
        for (const std::size_t idx : cells_in_polygon(age_map, p))
        {
            const double v = age_map.values()[idx];
            if (age_map.is_nodata(v))
                continue;
            sum += v;
            ++est.cells;
        }
        if (est.cells > 0)
        {
            est.mean_age = sum / static_cast<double>(est.cells);
            est.has_estimate = true;
        }
        out.push_back(std::move(est));
    }
    return out;
}

std::vector<PlotPrediction> apply_to_plots(
    const std::vector<PlotObservation> &plots, const ModelRegistry &reg,
    RoutingMode mode, PlotTally *tally)
{
    PlotTally local;
    std::vector<PlotPrediction> out;
    out.reserve(plots.size());
    for (const PlotObservation &plot : plots)
    {
        Species species = plot.species_observed;
        double si_value = plot.si_observed;
        if (mode == RoutingMode::PredictedSI)
        {
            if (!plot.si_predicted)
            {
                ++local.skipped;
                continue;
            }
            si_value = *plot.si_predicted;
        }
        else if (mode == RoutingMode::PredictedSpecies)
        {
            if (!plot.species_predicted)
            {
                ++local.skipped;
                continue;
            }
            species = *plot.species_predicted;
        }
        const int snapped = snap_si(si_value);
        RoutingTally rt;
        const AgeModel &m = route_model(reg, species, snapped, &rt);
        std::string missing;
        const auto eta = eval_eta(m, plot.predictors, &missing);
        if (!eta)
        {
            ++local.skipped;
            continue;
        }
        out.push_back({plot.id, back_transform(m.link, *eta, m.sigma),
                       m.species, m.si});
        ++local.predicted;
        local.routing.exact += rt.exact;
        local.routing.substituted += rt.substituted;
    }
    if (tally)
        *tally = local;
    return out;
}

}  // namespace standage
