/******************************************************************************
 * Project:  standage
 * Purpose:  Georeferenced single-band grid with ESRI ASCII I/O, bilinear
 *           sampling, Horn slope and block-mean resampling.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace standage {

/**
 * Row-major single-band raster.  Row 0 is the northernmost row.  Cells are
 * square.  The nodata sentinel is compared exactly; arithmetic never mixes
 * nodata cells into results.
 */
class Grid
{
  public:
    Grid() = default;
    Grid(int ncols, int nrows, double xll, double yll, double cellsize,
         double nodata, double fill_value);

    /** Parse an ESRI ASCII grid.  Throws ValidationError on malformed
     *  headers or a value count that disagrees with ncols*nrows. */
    static Grid read(const std::string &path);

    /** Write ESRI ASCII.  Values are serialized with %.10g, so a
     *  write/read cycle of a previously written grid is byte identical. */
    void write(const std::string &path) const;

    int ncols() const { return ncols_; }
    int nrows() const { return nrows_; }
    double xll() const { return xll_; }
    double yll() const { return yll_; }
    double cellsize() const { return cellsize_; }
    double nodata() const { return nodata_; }
    std::size_t size() const { return values_.size(); }

    double at(int row, int col) const { return values_[idx(row, col)]; }
    void set(int row, int col, double v) { values_[idx(row, col)] = v; }
    bool is_nodata(double v) const { return v == nodata_; }
    bool is_nodata_at(int row, int col) const { return is_nodata(at(row, col)); }

    const std::vector<double> &values() const { return values_; }
    std::vector<double> &values() { return values_; }

    double cell_center_x(int col) const { return xll_ + (col + 0.5) * cellsize_; }
    double cell_center_y(int row) const
    {
        return yll_ + (nrows_ - row - 0.5) * cellsize_;
    }
    double xmax() const { return xll_ + ncols_ * cellsize_; }
    double ymax() const { return yll_ + nrows_ * cellsize_; }

    bool same_geometry(const Grid &other) const;

    /**
     * Bilinear interpolation over the lattice of cell centers.  Returns
     * nothing when (x, y) lies outside the center lattice or any of the
     * four surrounding centers is nodata.  At an exact cell center the
     * result equals that cell's value.
     */
    std::optional<double> bilinear(double x, double y) const;

  private:
    std::size_t idx(int row, int col) const
    {
        return static_cast<std::size_t>(row) * ncols_ + col;
    }

    int ncols_ = 0;
    int nrows_ = 0;
    double xll_ = 0.0;
    double yll_ = 0.0;
    double cellsize_ = 1.0;
    double nodata_ = -9999.0;
    std::vector<double> values_;
};

/**
 * Slope in degrees from a DTM using Horn's 3x3 kernel.  Border cells and
 * cells with any nodata neighbor become nodata.  Input must be at least
 * 3x3 cells.
 */
Grid slope_grid(const Grid &dtm);

/**
 * Aggregate by an integer factor; each coarse cell is the mean of its
 * factor*factor fine cells, ignoring nodata.  All-nodata blocks stay
 * nodata.  Dimensions must divide evenly by the factor.
 */
Grid resample_mean(const Grid &g, int factor);

}  // namespace standage
