/******************************************************************************
 * Project:  standage
 * Purpose:  Stand polygons: text I/O, area, containment and exact
 *           area-weighted zonal statistics against a grid.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/grid.hpp"

namespace standage {

struct Point2
{
    double x;
    double y;
};

using Ring = std::vector<Point2>;  // closed: first vertex repeated at the end

struct Bounds
{
    double xmin, ymin, xmax, ymax;
};

class Polygon
{
  public:
    std::string id;
    std::map<std::string, std::string> attributes;
    Ring exterior;
    std::vector<Ring> holes;

    /** Shoelace area of the exterior minus the holes; always positive for
     *  a valid polygon. */
    double area() const;

    /** Even-odd containment; points exactly on any ring edge count as
     *  inside. */
    bool contains(double x, double y) const;

    Bounds bounds() const;

    double attribute_double(const std::string &key) const;
    bool has_attribute(const std::string &key) const
    {
        return attributes.count(key) != 0;
    }
};

/**
 * Read the one-record-per-line polygon format:
 *
 *   id key=value;key=value : x1 y1, x2 y2, ...
 *   hole: x1 y1, x2 y2, ...
 *
 * 'hole:' lines attach to the preceding polygon.  Rings must be closed
 * (first vertex repeated last) and hold at least four vertices; polygons
 * must have positive area.
 */
std::vector<Polygon> read_polygons(const std::string &path);

/** Flat indices (row * ncols + col) of grid cells whose center lies inside
 *  the polygon, in row-major order. */
std::vector<std::size_t> cells_in_polygon(const Grid &g, const Polygon &p);

/**
 * Mean of grid values over the polygon, weighting each cell by the exact
 * cell/polygon intersection area.  Nodata cells contribute to neither sum.
 * Throws EmptyZoneError when no non-nodata cell intersects the polygon.
 */
double zonal_weighted_mean(const Grid &g, const Polygon &p);

/** Intersection area between a ring and an axis-aligned rectangle
 *  (Sutherland-Hodgman clip + shoelace). */
double ring_rect_intersection_area(const Ring &ring, double x0, double y0,
                                   double x1, double y1);

}  // namespace standage
