/******************************************************************************
 * Project:  standage
 * Purpose:  Area-based point-cloud metrics: height distribution statistics
 *           per return set, density slices, crown cover, 16 m rasterization.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>

#include "core/pointcloud.hpp"

namespace standage {

/**
 * Fixed-schema vector of per-cell (or per-plot) point-cloud metrics.
 * Field order:
 *   - 11 height stats on first returns: hmean_first, hvar_first, hcv_first,
 *     hkurt_first, hskew_first, h10_first .. h95_first
 *   - the same 11 on first returns above 2 m, suffix _first2m
 *   - the same 11 on last returns, suffix _last
 *   - d0 .. d9: fraction of first returns per tenth of the local maximum
 *   - cc2, cc5, cc10: fraction of first returns above 2 / 5 / 10 m
 *   - n_first, n_last: return counts
 * Missing fields (empty or degenerate return sets) are carried as NaN and
 * rendered as nodata downstream.
 */
class MetricsVector
{
  public:
    static constexpr int kCount = 48;

    MetricsVector() { values_.fill(std::numeric_limits<double>::quiet_NaN()); }

    static const std::array<std::string, kCount> &names();
    /** Index of a metric name, -1 when unknown. */
    static int index_of(const std::string &name);

    double value(int i) const { return values_[i]; }
    bool present(int i) const { return !std::isnan(values_[i]); }
    void set(int i, double v) { values_[i] = v; }

  private:
    std::array<double, kCount> values_;
};

/**
 * Linear-interpolation quantile (the common "type 7" definition) of an
 * ascending-sorted sequence: rank h = 1 + (n-1)p interpolated between
 * neighboring order statistics.  p must lie in [0, 1]; the input must be
 * non-empty and sorted.
 */
double percentile(std::span<const double> sorted_values, double p);

/**
 * Compute the full MetricsVector for one height-normalized cloud.
 * Variance needs two points, CV additionally a positive mean, and skewness
 * and kurtosis a positive second moment; fields stay missing otherwise.
 * Density and cover fields need at least one first return.
 */
MetricsVector als_metrics(const PointCloud &cloud);

/**
 * Rasterize per-cell metrics over the template geometry (cellsize must be
 * 16).  Points are binned by cell; cells without first returns are nodata
 * in every layer.  Returns one grid per metric name.
 */
std::map<std::string, Grid> metrics_grid(const PointCloud &cloud,
                                         const Grid &tmpl);

}  // namespace standage
