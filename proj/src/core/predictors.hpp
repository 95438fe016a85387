/******************************************************************************
 * Project:  standage
 * Purpose:  Predictor assembly: satellite bands, NDVI, terrain values and
 *           point-cloud metrics merged into one named vector.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/metrics.hpp"

namespace standage {

/** Sentinel-2 style surface reflectance scaled by 10000, NaN = missing. */
struct SpectralVector
{
    double s2_2 = nan_;
    double s2_3 = nan_;
    double s2_4 = nan_;
    double s2_5 = nan_;
    double s2_6 = nan_;
    double s2_7 = nan_;
    double s2_8 = nan_;
    double s2_8A = nan_;
    double s2_11 = nan_;
    double s2_12 = nan_;

    static const std::vector<std::string> &band_names();
    double band(int i) const;
    void set_band(int i, double v);

  private:
    static constexpr double nan_ = std::numeric_limits<double>::quiet_NaN();
};

/** (nir - red) / (nir + red); both bands must be non-negative and not both
 *  zero-summed to a zero denominator (that case yields 0). */
double ndvi(double nir, double red);

/** Optional terrain and location values for a plot or cell. */
struct TerrainValues
{
    std::optional<double> dtm;
    std::optional<double> slope;
    std::optional<double> dist_coast;
    std::optional<double> lat;
    std::optional<double> lon;
};

/**
 * Ordered name -> value map with model-oriented name resolution:
 *   1. exact entry;
 *   2. a name of the form <base>2 resolves to the square of entry <base>;
 *   3. a name of the form <a>*<b> resolves to the product of both parts.
 */
class PredictorVector
{
  public:
    void set(const std::string &name, double v);
    bool has(const std::string &name) const;
    double get(const std::string &name) const;
    std::optional<double> resolve(const std::string &name) const;

    const std::vector<std::pair<std::string, double>> &entries() const
    {
        return entries_;
    }
    std::size_t size() const { return entries_.size(); }

  private:
    std::vector<std::pair<std::string, double>> entries_;
};

/**
 * Merge metric, spectral and terrain inputs into one PredictorVector.
 * Adds the derived square h95_first2 and NDVI when their inputs are
 * present.  Missing inputs simply stay absent.  A duplicate name across
 * inputs is an error.
 */
PredictorVector assemble_predictors(const MetricsVector &metrics,
                                    const std::optional<SpectralVector> &spectral,
                                    const TerrainValues &terrain,
                                    std::optional<double> diff_t);

/**
 * Canonical CSV column order for predictor tables: the model-facing block
 * (h95_first, h95_first2, cc2, cc5, cc10, NDVI, s2_8A, s2_11, DTM, distC,
 * Lat, Lon, slope, diffT) followed by the remaining metric and band names.
 */
const std::vector<std::string> &predictor_csv_columns();

/** True for names storable in model files: schema base names plus their
 *  squares and pairwise products. */
bool is_known_predictor(const std::string &name);

}  // namespace standage
