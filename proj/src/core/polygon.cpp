/******************************************************************************
 * Project:  standage
 * Purpose:  Polygon implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace standage {

namespace {

double ring_signed_area(const Ring &ring)
{
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        acc += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
    return 0.5 * acc;
}

bool on_segment(const Point2 &a, const Point2 &b, double x, double y)
{
    const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
    if (cross != 0.0)
        return false;
    return std::min(a.x, b.x) <= x && x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= y && y <= std::max(a.y, b.y);
}

bool ring_crossings_odd(const Ring &ring, double x, double y)
{
    bool odd = false;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    {
        const Point2 &a = ring[i];
        const Point2 &b = ring[i + 1];
        if ((a.y > y) != (b.y > y))
        {
            const double xi = a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (x < xi)
                odd = !odd;
        }
    }
    return odd;
}

Ring parse_ring(const std::string &coords, std::size_t line_no,
                const std::string &path)
{
    Ring ring;
    for (const std::string &pair : split(coords, ','))
    {
        const std::string t = trim(pair);
        if (t.empty())
            continue;
        double x, y;
        char trailing;
        if (std::sscanf(t.c_str(), "%lf %lf %c", &x, &y, &trailing) != 2)
            throw ValidationError("polygon line " + std::to_string(line_no) +
                                  ": bad coordinate pair '" + t + "' in " + path);
        ring.push_back({x, y});
    }
    if (ring.size() < 4)
        throw ValidationError("polygon line " + std::to_string(line_no) +
                              ": ring needs at least 4 vertices (closed), got " +
                              std::to_string(ring.size()) + " in " + path);
    if (ring.front().x != ring.back().x || ring.front().y != ring.back().y)
        throw ValidationError("polygon line " + std::to_string(line_no) +
                              ": ring is not closed (first vertex must repeat "
                              "last) in " + path);
    return ring;
}

}  // namespace

double Polygon::area() const
{
    double a = std::fabs(ring_signed_area(exterior));
    for (const Ring &h : holes)
        a -= std::fabs(ring_signed_area(h));
    return a;
}

bool Polygon::contains(double x, double y) const
{
    for (std::size_t i = 0; i + 1 < exterior.size(); ++i)
        if (on_segment(exterior[i], exterior[i + 1], x, y))
            return true;
    for (const Ring &h : holes)
        for (std::size_t i = 0; i + 1 < h.size(); ++i)
            if (on_segment(h[i], h[i + 1], x, y))
                return true;

    bool odd = ring_crossings_odd(exterior, x, y);
    for (const Ring &h : holes)
        if (ring_crossings_odd(h, x, y))
            odd = !odd;
    return odd;
}

Bounds Polygon::bounds() const
{
    Bounds b{exterior[0].x, exterior[0].y, exterior[0].x, exterior[0].y};
    for (const Point2 &p : exterior)
    {
        b.xmin = std::min(b.xmin, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.xmax = std::max(b.xmax, p.x);
        b.ymax = std::max(b.ymax, p.y);
    }
    return b;
}

double Polygon::attribute_double(const std::string &key) const
{
    const auto it = attributes.find(key);
    if (it == attributes.end())
        throw ValidationError("polygon '" + id + "' lacks attribute '" + key +
                              "'");
    double v;
    if (!parse_double(it->second, v))
        throw ValidationError("polygon '" + id + "': attribute '" + key +
                              "' is not numeric: '" + it->second + "'");
    return v;
}

std::vector<Polygon> read_polygons(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open polygon file: " + path);

    std::vector<Polygon> polys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;

        if (body.rfind("hole:", 0) == 0)
        {
            if (polys.empty())
                throw ValidationError("polygon line " + std::to_string(line_no) +
                                      ": 'hole:' before any polygon in " + path);
            polys.back().holes.push_back(
                parse_ring(body.substr(5), line_no, path));
            continue;
        }

        const auto colon = body.find(':');
        if (colon == std::string::npos)
            throw ValidationError("polygon line " + std::to_string(line_no) +
                                  ": missing ':' separator in " + path);
        const std::string head = trim(body.substr(0, colon));
        const auto ws = head.find_first_of(" \t");
        Polygon poly;
        poly.id = (ws == std::string::npos) ? head : head.substr(0, ws);
        if (poly.id.empty())
            throw ValidationError("polygon line " + std::to_string(line_no) +
                                  ": empty id in " + path);
        if (ws != std::string::npos)
        {
            for (const std::string &kv : split(head.substr(ws + 1), ';'))
            {
                const std::string t = trim(kv);
                if (t.empty())
                    continue;
                const auto eq = t.find('=');
                if (eq == std::string::npos)
                    throw ValidationError("polygon line " +
                                          std::to_string(line_no) +
                                          ": attribute without '=': '" + t +
                                          "' in " + path);
                poly.attributes[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
            }
        }
        poly.exterior = parse_ring(body.substr(colon + 1), line_no, path);
        polys.push_back(std::move(poly));
    }

    for (const Polygon &p : polys)
        if (!(p.area() > 0.0))
            throw ValidationError("polygon '" + p.id +
                                  "' has non-positive area in " + path);
    return polys;
}

std::vector<std::size_t> cells_in_polygon(const Grid &g, const Polygon &p)
{
    const Bounds b = p.bounds();
    const int c_lo = std::max(
        0, static_cast<int>(std::floor((b.xmin - g.xll()) / g.cellsize())) - 1);
    const int c_hi = std::min(
        g.ncols() - 1,
        static_cast<int>(std::ceil((b.xmax - g.xll()) / g.cellsize())));
    const int s_lo = std::max(
        0, static_cast<int>(std::floor((b.ymin - g.yll()) / g.cellsize())) - 1);
    const int s_hi = std::min(
        g.nrows() - 1,
        static_cast<int>(std::ceil((b.ymax - g.yll()) / g.cellsize())));

    std::vector<std::size_t> out;
    for (int r = g.nrows() - 1 - s_hi; r <= g.nrows() - 1 - s_lo; ++r)
    {
        if (r < 0 || r >= g.nrows())
            continue;
        for (int c = c_lo; c <= c_hi; ++c)
            if (p.contains(g.cell_center_x(c), g.cell_center_y(r)))
                out.push_back(static_cast<std::size_t>(r) * g.ncols() + c);
    }
    return out;
}

double ring_rect_intersection_area(const Ring &ring, double x0, double y0,
                                   double x1, double y1)
{
    // Sutherland-Hodgman against the four half-planes of the rectangle.
    Ring poly(ring.begin(), ring.end() - 1);  // open copy
    auto clip = [&poly](auto inside, auto intersect)
    {
        Ring out;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            const Point2 &cur = poly[i];
            const Point2 &prev = poly[(i + n - 1) % n];
            const bool cur_in = inside(cur);
            const bool prev_in = inside(prev);
            if (cur_in)
            {
                if (!prev_in)
                    out.push_back(intersect(prev, cur));
                out.push_back(cur);
            }
            else if (prev_in)
            {
                out.push_back(intersect(prev, cur));
            }
        }
        poly = std::move(out);
    };

    auto at_x = [](const Point2 &a, const Point2 &b, double x) -> Point2
    { return {x, a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)}; };
    auto at_y = [](const Point2 &a, const Point2 &b, double y) -> Point2
    { return {a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), y}; };

    clip([x0](const Point2 &p) { return p.x >= x0; },
         [&at_x, x0](const Point2 &a, const Point2 &b) { return at_x(a, b, x0); });
    if (poly.empty())
        return 0.0;
    clip([x1](const Point2 &p) { return p.x <= x1; },
         [&at_x, x1](const Point2 &a, const Point2 &b) { return at_x(a, b, x1); });
    if (poly.empty())
        return 0.0;
    clip([y0](const Point2 &p) { return p.y >= y0; },
         [&at_y, y0](const Point2 &a, const Point2 &b) { return at_y(a, b, y0); });
    if (poly.empty())
        return 0.0;
    clip([y1](const Point2 &p) { return p.y <= y1; },
         [&at_y, y1](const Point2 &a, const Point2 &b) { return at_y(a, b, y1); });
    if (poly.size() < 3)
        return 0.0;

    poly.push_back(poly.front());
    return std::fabs(ring_signed_area(poly));
}

double zonal_weighted_mean(const Grid &g, const Polygon &p)
{
    const Bounds b = p.bounds();
    const double cs = g.cellsize();
    const int c_lo = std::max(
        0, static_cast<int>(std::floor((b.xmin - g.xll()) / cs)));
    const int c_hi = std::min(
        g.ncols() - 1, static_cast<int>(std::floor((b.xmax - g.xll()) / cs)));
    const int s_lo = std::max(
        0, static_cast<int>(std::floor((b.ymin - g.yll()) / cs)));
    const int s_hi = std::min(
        g.nrows() - 1, static_cast<int>(std::floor((b.ymax - g.yll()) / cs)));

    double wsum = 0.0;
    double vsum = 0.0;
    for (int s = s_lo; s <= s_hi; ++s)
    {
        const int r = g.nrows() - 1 - s;
        const double y0 = g.yll() + s * cs;
        for (int c = c_lo; c <= c_hi; ++c)
        {
            const double v = g.at(r, c);
            if (g.is_nodata(v))
                continue;
            const double x0 = g.xll() + c * cs;
            double w = ring_rect_intersection_area(p.exterior, x0, y0, x0 + cs,
                                                   y0 + cs);
            for (const Ring &h : p.holes)
                w -= ring_rect_intersection_area(h, x0, y0, x0 + cs, y0 + cs);
            if (w <= 0.0)
                continue;
            wsum += w;
            vsum += w * v;
        }
    }
    if (wsum <= 0.0)
        throw EmptyZoneError("polygon '" + p.id +
                             "' intersects no usable grid cells");
    return vsum / wsum;
}

}  // namespace standage
