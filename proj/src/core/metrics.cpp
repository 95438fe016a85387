/******************************************************************************
 * Project:  standage
 * Purpose:  Metrics implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace standage {

namespace {

constexpr double kPercentileLevels[6] = {0.10, 0.25, 0.50, 0.75, 0.90, 0.95};
const char *const kStatSuffix[3] = {"_first", "_first2m", "_last"};

std::array<std::string, MetricsVector::kCount> build_names()
{
    std::array<std::string, MetricsVector::kCount> n;
    int i = 0;
    for (const char *sfx : kStatSuffix)
    {
        const std::string s(sfx);
        n[i++] = "hmean" + s;
        n[i++] = "hvar" + s;
        n[i++] = "hcv" + s;
        n[i++] = "hkurt" + s;
        n[i++] = "hskew" + s;
        for (const char *lev : {"10", "25", "50", "75", "90", "95"})
            n[i++] = "h" + std::string(lev) + s;
    }
    for (int d = 0; d < 10; ++d)
        n[i++] = "d" + std::to_string(d);
    n[i++] = "cc2";
    n[i++] = "cc5";
    n[i++] = "cc10";
    n[i++] = "n_first";
    n[i++] = "n_last";
    return n;
}

// Fill the 11 height-statistics slots for one return set starting at
// base index.  'z' must be sorted ascending.
void fill_stats(MetricsVector &m, int base, std::span<const double> z)
{
    const std::size_t n = z.size();
    if (n == 0)
        return;

    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const double v : z)
    {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m.set(base + 0, mean);
    if (n >= 2)
    {
        const double var = m2 / (n - 1);
        m.set(base + 1, var);
        if (mean > 0.0)
            m.set(base + 2, std::sqrt(var) / mean);
    }
    const double c2 = m2 / n;
    if (c2 > 0.0)
    {
        m.set(base + 3, (m4 / n) / (c2 * c2));
        m.set(base + 4, (m3 / n) / std::pow(c2, 1.5));
    }
    for (int k = 0; k < 6; ++k)
        m.set(base + 5 + k, percentile(z, kPercentileLevels[k]));
}

}  // namespace

const std::array<std::string, MetricsVector::kCount> &MetricsVector::names()
{
    static const auto n = build_names();
    return n;
}

int MetricsVector::index_of(const std::string &name)
{
    const auto &n = names();
    const auto it = std::find(n.begin(), n.end(), name);
    return it == n.end() ? -1 : static_cast<int>(it - n.begin());
}

double percentile(std::span<const double> sorted_values, double p)
{
    if (sorted_values.empty())
        throw ValidationError("percentile of an empty sequence");
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("percentile level must lie in [0, 1], got " +
                              format_g(p, 10));
    const std::size_t n = sorted_values.size();
    const double h = 1.0 + (static_cast<double>(n) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h)) - 1;
    const double frac = h - std::floor(h);
    if (frac == 0.0 || lo + 1 >= n)
        return sorted_values[std::min(lo, n - 1)];
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

MetricsVector als_metrics(const PointCloud &cloud)
{
    if (!cloud.normalized)
        throw ValidationError(
            "metrics require a height-normalized point cloud");

    std::vector<double> first, last;
    first.reserve(cloud.points.size());
    last.reserve(cloud.points.size());
    for (const PointRecord &p : cloud.points)
    {
        if (is_first_return(p.rc))
            first.push_back(p.z);
        if (is_last_return(p.rc))
            last.push_back(p.z);
    }
    std::sort(first.begin(), first.end());
    std::sort(last.begin(), last.end());

    MetricsVector m;
    fill_stats(m, 0, first);
    // First returns strictly above the 2 m canopy threshold form a suffix
    // of the sorted sequence.
    const auto above2 = std::upper_bound(first.begin(), first.end(), 2.0);
    fill_stats(m, 11,
               std::span<const double>(first.data() + (above2 - first.begin()),
                                       static_cast<std::size_t>(first.end() -
                                                                above2)));
    fill_stats(m, 22, last);

    const int d_base = 33;
    if (!first.empty())
    {
        const double n_first = static_cast<double>(first.size());
        const double zmax = first.back();
        double bins[10] = {};
        if (zmax <= 0.0)
        {
            bins[0] = n_first;
        }
        else
        {
            for (const double z : first)
            {
                const int b = std::min(9, static_cast<int>(z * 10.0 / zmax));
                bins[b] += 1.0;
            }
        }
        for (int d = 0; d < 10; ++d)
            m.set(d_base + d, bins[d] / n_first);

        const double cc2 =
            static_cast<double>(first.end() - above2) / n_first;
        const auto above5 = std::upper_bound(first.begin(), first.end(), 5.0);
        const auto above10 = std::upper_bound(first.begin(), first.end(), 10.0);
        m.set(43, cc2);
        m.set(44, static_cast<double>(first.end() - above5) / n_first);
        m.set(45, static_cast<double>(first.end() - above10) / n_first);
    }
    m.set(46, static_cast<double>(first.size()));
    m.set(47, static_cast<double>(last.size()));
    return m;
}

std::map<std::string, Grid> metrics_grid(const PointCloud &cloud,
                                         const Grid &tmpl)
{
    if (!cloud.normalized)
        throw ValidationError(
            "metrics require a height-normalized point cloud");
    if (tmpl.cellsize() != 16.0)
        throw ValidationError("metric grids use a 16 m cell size; template "
                              "has " + format_g(tmpl.cellsize(), 10));

    const std::size_t ncells = tmpl.size();
    const double cs = tmpl.cellsize();

    // Bucket point indices per cell (CSR layout, stable point order).
    std::vector<std::uint32_t> counts(ncells + 1, 0);
    std::vector<std::int64_t> cell_of(cloud.points.size(), -1);
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
    {
        const PointRecord &p = cloud.points[i];
        const double fx = (p.x - tmpl.xll()) / cs;
        const double fy = (p.y - tmpl.yll()) / cs;
        if (fx < 0.0 || fy < 0.0)
            continue;
        const int c = static_cast<int>(fx);
        const int s = static_cast<int>(fy);
        if (c >= tmpl.ncols() || s >= tmpl.nrows())
            continue;
        const std::size_t cell =
            static_cast<std::size_t>(tmpl.nrows() - 1 - s) * tmpl.ncols() + c;
        cell_of[i] = static_cast<std::int64_t>(cell);
        ++counts[cell + 1];
    }
    for (std::size_t i = 1; i <= ncells; ++i)
        counts[i] += counts[i - 1];
    std::vector<std::uint32_t> order(counts.back());
    {
        std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
        for (std::size_t i = 0; i < cloud.points.size(); ++i)
            if (cell_of[i] >= 0)
                order[cursor[cell_of[i]]++] = static_cast<std::uint32_t>(i);
    }

    std::map<std::string, Grid> out;
    std::vector<Grid *> layer(MetricsVector::kCount);
    for (int i = 0; i < MetricsVector::kCount; ++i)
    {
        auto [it, ok] = out.emplace(
            MetricsVector::names()[i],
            Grid(tmpl.ncols(), tmpl.nrows(), tmpl.xll(), tmpl.yll(), cs,
                 tmpl.nodata(), tmpl.nodata()));
        (void)ok;
        layer[i] = &it->second;
    }

    const int n_first_idx = MetricsVector::index_of("n_first");
    PointCloud cell_cloud;
    cell_cloud.normalized = true;
    for (std::size_t cell = 0; cell < ncells; ++cell)
    {
        const std::uint32_t b = counts[cell], e = counts[cell + 1];
        if (b == e)
            continue;
        cell_cloud.points.clear();
        for (std::uint32_t k = b; k < e; ++k)
            cell_cloud.points.push_back(cloud.points[order[k]]);
        const MetricsVector m = als_metrics(cell_cloud);
        if (!(m.present(n_first_idx) && m.value(n_first_idx) > 0.0))
            continue;  // no first returns: every layer stays nodata
        const int r = static_cast<int>(cell) / tmpl.ncols();
        const int c = static_cast<int>(cell) % tmpl.ncols();
        for (int i = 0; i < MetricsVector::kCount; ++i)
            if (m.present(i))
                layer[i]->set(r, c, m.value(i));
    }
    return out;
}

}  // namespace standage
