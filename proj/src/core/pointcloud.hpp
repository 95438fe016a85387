/******************************************************************************
 * Project:  standage
 * Purpose:  Discrete-return point clouds: text I/O, return classification,
 *           height normalization against a terrain model.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/grid.hpp"

namespace standage {

enum class ReturnClass : std::uint8_t
{
    First,
    Intermediate,
    Last,
    Only,  // single-return pulse; counts as both a first and a last return
};

inline bool is_first_return(ReturnClass rc)
{
    return rc == ReturnClass::First || rc == ReturnClass::Only;
}
inline bool is_last_return(ReturnClass rc)
{
    return rc == ReturnClass::Last || rc == ReturnClass::Only;
}

struct PointRecord
{
    double x;
    double y;
    double z;
    ReturnClass rc;
};

struct PointCloud
{
    std::vector<PointRecord> points;
    /** True once z holds height above ground rather than elevation. */
    bool normalized = false;

    /**
     * Read whitespace-separated "x y z return_number number_of_returns"
     * records; '#' starts a comment, blank lines are skipped.  The return
     * class is derived from the two counters.
     */
    static PointCloud read(const std::string &path);
};

struct NormalizeTally
{
    std::size_t dropped = 0;  // outside the DTM or over nodata terrain
    std::size_t clamped = 0;  // negative height clamped to zero
};

/**
 * Subtract bilinear terrain elevation from every point's z.  Points that
 * cannot be interpolated are dropped; negative heights clamp to zero.
 * Calling this on an already normalized cloud is an error.
 */
PointCloud normalize_heights(const PointCloud &cloud, const Grid &dtm,
                             NormalizeTally *tally = nullptr);

}  // namespace standage
