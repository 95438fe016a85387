/******************************************************************************
 * Project:  standage
 * Purpose:  Model and registry implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace standage {

const char *species_name(Species s)
{
    switch (s)
    {
        case Species::Spruce: return "spruce";
        case Species::Pine: return "pine";
        case Species::Birch: return "birch";
    }
    return "?";
}

std::optional<Species> species_from_name(const std::string &name)
{
    const std::string n = lower(name);
    if (n == "spruce")
        return Species::Spruce;
    if (n == "pine")
        return Species::Pine;
    if (n == "birch")
        return Species::Birch;
    return std::nullopt;
}

std::optional<Species> species_from_code(double code)
{
    if (code == 1.0)
        return Species::Spruce;
    if (code == 2.0)
        return Species::Pine;
    if (code == 3.0)
        return Species::Birch;
    return std::nullopt;
}

const char *link_name(LinkFunction link)
{
    switch (link)
    {
        case LinkFunction::Log: return "log";
        case LinkFunction::Sqrt: return "sqrt";
        case LinkFunction::Identity: return "identity";
    }
    return "?";
}

std::optional<LinkFunction> link_from_name(const std::string &name)
{
    const std::string n = lower(name);
    if (n == "log")
        return LinkFunction::Log;
    if (n == "sqrt")
        return LinkFunction::Sqrt;
    if (n == "identity")
        return LinkFunction::Identity;
    return std::nullopt;
}

std::span<const int> si_levels()
{
    static const std::array<int, 8> levels = {6, 8, 11, 14, 17, 20, 23, 26};
    return levels;
}

std::optional<double> eval_eta(const AgeModel &m, const PredictorVector &x,
                               std::string *missing_name)
{
    double eta = m.intercept;
    for (const ModelTerm &t : m.terms)
    {
        const auto v = x.resolve(t.name);
        if (!v)
        {
            if (missing_name)
                *missing_name = t.name;
            return std::nullopt;
        }
        eta += t.coefficient * *v;
    }
    return eta;
}

double back_transform(LinkFunction link, double eta, double sigma)
{
    switch (link)
    {
        case LinkFunction::Log:
            return std::exp(eta + 0.5 * sigma * sigma);
        case LinkFunction::Sqrt:
            if (eta < 0.0)
                eta = 0.0;
            return eta * eta + sigma * sigma;
        case LinkFunction::Identity:
            return eta < 0.0 ? 0.0 : eta;
    }
    return 0.0;
}

double predict_age(const AgeModel &m, const PredictorVector &x)
{
    std::string missing;
    const auto eta = eval_eta(m, x, &missing);
    if (!eta)
        throw ModelInputError("model " + std::string(species_name(m.species)) +
                              "/SI " + std::to_string(m.si) +
                              " needs predictor '" + missing +
                              "' which is not resolvable");
    return back_transform(m.link, *eta, m.sigma);
}

int snap_si(double si_value, std::span<const int> levels)
{
    if (levels.empty())
        throw ValidationError("snap_si: empty level set");
    if (!std::isfinite(si_value))
        throw ValidationError("snap_si: non-finite site index");
    int best = levels[0];
    double best_dist = std::fabs(si_value - levels[0]);
    for (const int lev : levels.subspan(1))
    {
        const double d = std::fabs(si_value - lev);
        if (d < best_dist)  // strict: ties keep the lower level
        {
            best = lev;
            best_dist = d;
        }
    }
    return best;
}

std::vector<std::pair<double, double>> response_curve(
    const AgeModel &m, const std::string &sweep_name, double lo, double hi,
    int steps, const PredictorVector &baseline)
{
    if (steps < 1)
        throw ValidationError("response_curve: steps must be >= 1");
    if (!(lo <= hi))
        throw ValidationError("response_curve: sweep range is empty");
    const bool used = std::any_of(
        m.terms.begin(), m.terms.end(),
        [&](const ModelTerm &t)
        {
            return t.name == sweep_name ||
                   t.name == sweep_name + "2" ||
                   t.name.find(sweep_name + "*") == 0 ||
                   (t.name.size() > sweep_name.size() &&
                    t.name.rfind("*" + sweep_name) ==
                        t.name.size() - sweep_name.size() - 1);
        });
    if (!used)
        throw ValidationError("response_curve: model does not use predictor '" +
                              sweep_name + "'");

    const std::string square_name = sweep_name + "2";
    std::vector<std::pair<double, double>> out;
    out.reserve(steps + 1);
    // steps counts intervals: steps+1 samples including both endpoints.
    for (int i = 0; i <= steps; ++i)
    {
        const double v = lo + (hi - lo) * i / static_cast<double>(steps);
        PredictorVector x = baseline;
        x.set(sweep_name, v);
        // The square is a derived value; any explicit baseline entry is
        // overridden so it can never drift from the swept value.
        if (x.has(square_name))
            x.set(square_name, v * v);
        out.emplace_back(v, predict_age(m, x));
    }
    return out;
}

void ModelRegistry::add(AgeModel model)
{
    for (const AgeModel &m : models_)
        if (m.species == model.species && m.si == model.si)
            throw ValidationError("duplicate model for " +
                                  std::string(species_name(model.species)) +
                                  "/SI " + std::to_string(model.si));
    models_.push_back(std::move(model));
}

const AgeModel *ModelRegistry::find(Species s, int si) const
{
    for (const AgeModel &m : models_)
        if (m.species == s && m.si == si)
            return &m;
    return nullptr;
}

const AgeModel *ModelRegistry::nearest(Species s, int si) const
{
    const AgeModel *best = nullptr;
    double best_dist = 0.0;
    for (const AgeModel &m : models_)
    {
        if (m.species != s)
            continue;
        const double d = std::fabs(static_cast<double>(m.si - si));
        if (!best || d < best_dist ||
            (d == best_dist && m.si < best->si))
        {
            best = &m;
            best_dist = d;
        }
    }
    return best;
}

const AgeModel &route_model(const ModelRegistry &reg, Species s, int si,
                            RoutingTally *tally)
{
    if (const AgeModel *m = reg.find(s, si))
    {
        if (tally)
            ++tally->exact;
        return *m;
    }
    if (const AgeModel *m = reg.nearest(s, si))
    {
        if (tally)
            ++tally->substituted;
        return *m;
    }
    throw ProcessingError("no model available for species " +
                          std::string(species_name(s)));
}

ModelRegistry ModelRegistry::load(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open model registry: " + path);

    ModelRegistry reg;
    std::optional<AgeModel> cur;
    bool cur_has_intercept = false;
    std::string line;
    std::size_t line_no = 0;

    auto flush = [&]()
    {
        if (!cur)
            return;
        if (!cur_has_intercept)
            throw ValidationError("model registry " + path + ": model " +
                                  species_name(cur->species) + "/SI " +
                                  std::to_string(cur->si) +
                                  " has no intercept line");
        reg.add(std::move(*cur));
        cur.reset();
        cur_has_intercept = false;
    };

    while (std::getline(in, line))
    {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        const std::string at = " at line " + std::to_string(line_no) + " in " +
                               path;

        if (body.rfind("provenance", 0) == 0)
        {
            reg.provenance = trim(body.substr(10));
            continue;
        }
        if (body.front() == '[')
        {
            flush();
            if (body.back() != ']')
                throw ValidationError("unterminated model header" + at);
            const std::string inner = trim(body.substr(1, body.size() - 2));
            auto fields = split(inner, ' ');
            if (fields.empty() || fields[0] != "model")
                throw ValidationError("expected '[model ...]' header" + at);
            AgeModel m;
            bool have_species = false, have_si = false, have_link = false,
                 have_sigma = false;
            for (std::size_t i = 1; i < fields.size(); ++i)
            {
                const std::string f = trim(fields[i]);
                if (f.empty())
                    continue;
                const auto eq = f.find('=');
                if (eq == std::string::npos)
                    throw ValidationError("bad model header field '" + f + "'" +
                                          at);
                const std::string key = f.substr(0, eq);
                const std::string val = f.substr(eq + 1);
                if (key == "species")
                {
                    const auto s = species_from_name(val);
                    if (!s)
                        throw ValidationError("unknown species '" + val + "'" +
                                              at);
                    m.species = *s;
                    have_species = true;
                }
                else if (key == "si")
                {
                    long v;
                    if (!parse_long(val, v))
                        throw ValidationError("bad si '" + val + "'" + at);
                    m.si = static_cast<int>(v);
                    have_si = true;
                }
                else if (key == "link")
                {
                    const auto l = link_from_name(val);
                    if (!l)
                        throw ValidationError("unknown link '" + val + "'" + at);
                    m.link = *l;
                    have_link = true;
                }
                else if (key == "sigma")
                {
                    double v;
                    if (!parse_double(val, v) || v < 0.0)
                        throw ValidationError("bad sigma '" + val + "'" + at);
                    m.sigma = v;
                    have_sigma = true;
                }
                else
                {
                    throw ValidationError("unknown model header key '" + key +
                                          "'" + at);
                }
            }
            if (!have_species || !have_si || !have_link || !have_sigma)
                throw ValidationError(
                    "model header needs species, si, link and sigma" + at);
            cur = std::move(m);
            continue;
        }
        if (!cur)
            throw ValidationError("coefficient line outside a model block" + at);
        if (body.rfind("intercept", 0) == 0)
        {
            double v;
            if (!parse_double(body.substr(9), v))
                throw ValidationError("bad intercept value" + at);
            cur->intercept = v;
            cur_has_intercept = true;
            continue;
        }
        if (body.rfind("term", 0) == 0)
        {
            std::istringstream ls(body.substr(4));
            std::string name, value, extra;
            ls >> name >> value;
            if (name.empty() || value.empty() || (ls >> extra))
                throw ValidationError("expected 'term <name> <value>'" + at);
            if (!is_known_predictor(name))
                throw ValidationError("unknown predictor name '" + name + "'" +
                                      at);
            double v;
            if (!parse_double(value, v))
                throw ValidationError("bad coefficient value '" + value + "'" +
                                      at);
            cur->terms.push_back({name, v});
            continue;
        }
        throw ValidationError("unrecognized registry line '" + body + "'" + at);
    }
    flush();
    if (reg.models_.empty())
        throw ValidationError("model registry holds no models: " + path);
    return reg;
}

void ModelRegistry::save(const std::string &path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ProcessingError("cannot open model registry for writing: " + path);
    out << "# stand-age model registry\n";
    if (!provenance.empty())
        out << "provenance " << provenance << "\n";
    for (const AgeModel &m : models_)
    {
        out << "\n[model species=" << species_name(m.species)
            << " si=" << m.si << " link=" << link_name(m.link)
            << " sigma=" << format_g(m.sigma, 17) << "]\n";
        out << "intercept " << format_g(m.intercept, 17) << "\n";
        for (const ModelTerm &t : m.terms)
            out << "term " << t.name << " " << format_g(t.coefficient, 17)
                << "\n";
    }
    if (!out)
        throw ProcessingError("short write on model registry: " + path);
}

}  // namespace standage
