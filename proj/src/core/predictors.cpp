/******************************************************************************
 * Project:  standage
 * Purpose:  Predictor assembly implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/predictors.hpp"

#include <algorithm>

namespace standage {

const std::vector<std::string> &SpectralVector::band_names()
{
    static const std::vector<std::string> n = {"s2_2",  "s2_3", "s2_4", "s2_5",
                                               "s2_6",  "s2_7", "s2_8", "s2_8A",
                                               "s2_11", "s2_12"};
    return n;
}

double SpectralVector::band(int i) const
{
    const double *b[] = {&s2_2, &s2_3, &s2_4, &s2_5,  &s2_6,
                         &s2_7, &s2_8, &s2_8A, &s2_11, &s2_12};
    return *b[i];
}

void SpectralVector::set_band(int i, double v)
{
    double *b[] = {&s2_2, &s2_3, &s2_4, &s2_5,  &s2_6,
                   &s2_7, &s2_8, &s2_8A, &s2_11, &s2_12};
    *b[i] = v;
}

double ndvi(double nir, double red)
{
    if (nir < 0.0 || red < 0.0)
        throw ValidationError("ndvi requires non-negative reflectances, got "
                              "nir=" + format_g(nir, 10) +
                              " red=" + format_g(red, 10));
    const double denom = nir + red;
    if (denom == 0.0)
        return 0.0;
    return (nir - red) / denom;
}

void PredictorVector::set(const std::string &name, double v)
{
    for (auto &e : entries_)
        if (e.first == name)
        {
            e.second = v;
            return;
        }
    entries_.emplace_back(name, v);
}

bool PredictorVector::has(const std::string &name) const
{
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const auto &e) { return e.first == name; });
}

double PredictorVector::get(const std::string &name) const
{
    for (const auto &e : entries_)
        if (e.first == name)
            return e.second;
    throw ValidationError("predictor '" + name + "' is not set");
}

std::optional<double> PredictorVector::resolve(const std::string &name) const
{
    for (const auto &e : entries_)
        if (e.first == name)
            return e.second;
    if (name.size() > 1 && name.back() == '2')
    {
        const std::string base = name.substr(0, name.size() - 1);
        for (const auto &e : entries_)
            if (e.first == base)
                return e.second * e.second;
    }
    const auto star = name.find('*');
    if (star != std::string::npos)
    {
        const auto a = resolve(name.substr(0, star));
        const auto b = resolve(name.substr(star + 1));
        if (a && b)
            return *a * *b;
    }
    return std::nullopt;
}

namespace {

void insert_unique(PredictorVector &pv, const std::string &name, double v)
{
    if (pv.has(name))
        throw ValidationError("predictor assembly: duplicate name '" + name +
                              "' across inputs");
    pv.set(name, v);
}

}  // namespace

PredictorVector assemble_predictors(const MetricsVector &metrics,
                                    const std::optional<SpectralVector> &spectral,
                                    const TerrainValues &terrain,
                                    std::optional<double> diff_t)
{
    PredictorVector pv;
    for (int i = 0; i < MetricsVector::kCount; ++i)
        if (metrics.present(i))
            insert_unique(pv, MetricsVector::names()[i], metrics.value(i));

    const int h95 = MetricsVector::index_of("h95_first");
    if (metrics.present(h95))
        insert_unique(pv, "h95_first2",
                      metrics.value(h95) * metrics.value(h95));

    if (spectral)
    {
        const auto &bn = SpectralVector::band_names();
        for (std::size_t i = 0; i < bn.size(); ++i)
            if (!std::isnan(spectral->band(static_cast<int>(i))))
                insert_unique(pv, bn[i], spectral->band(static_cast<int>(i)));
        if (!std::isnan(spectral->s2_8) && !std::isnan(spectral->s2_4))
            insert_unique(pv, "NDVI", ndvi(spectral->s2_8, spectral->s2_4));
    }

    if (terrain.dtm)
        insert_unique(pv, "DTM", *terrain.dtm);
    if (terrain.slope)
        insert_unique(pv, "slope", *terrain.slope);
    if (terrain.dist_coast)
        insert_unique(pv, "distC", *terrain.dist_coast);
    if (terrain.lat)
        insert_unique(pv, "Lat", *terrain.lat);
    if (terrain.lon)
        insert_unique(pv, "Lon", *terrain.lon);
    if (diff_t)
        insert_unique(pv, "diffT", *diff_t);
    return pv;
}

const std::vector<std::string> &predictor_csv_columns()
{
    static const std::vector<std::string> cols = []
    {
        std::vector<std::string> c = {"h95_first", "h95_first2", "cc2",  "cc5",
                                      "cc10",      "NDVI",       "s2_8A", "s2_11",
                                      "DTM",       "distC",      "Lat",   "Lon",
                                      "slope",     "diffT"};
        for (const std::string &n : MetricsVector::names())
            if (std::find(c.begin(), c.end(), n) == c.end())
                c.push_back(n);
        for (const std::string &n : SpectralVector::band_names())
            if (std::find(c.begin(), c.end(), n) == c.end())
                c.push_back(n);
        return c;
    }();
    return cols;
}

bool is_known_predictor(const std::string &name)
{
    const auto &cols = predictor_csv_columns();
    auto base_known = [&cols](const std::string &n)
    { return std::find(cols.begin(), cols.end(), n) != cols.end(); };

    if (base_known(name))
        return true;
    if (name.size() > 1 && name.back() == '2' &&
        base_known(name.substr(0, name.size() - 1)))
        return true;
    const auto star = name.find('*');
    if (star != std::string::npos)
        return is_known_predictor(name.substr(0, star)) &&
               is_known_predictor(name.substr(star + 1));
    return false;
}

}  // namespace standage
