/******************************************************************************
 * Project:  standage
 * Purpose:  Point cloud implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/pointcloud.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

namespace standage {

namespace {

ReturnClass classify(long return_number, long number_of_returns,
                     std::size_t line_no, const std::string &path)
{
    if (number_of_returns < 1 || return_number < 1 ||
        return_number > number_of_returns)
        throw ValidationError("point record line " + std::to_string(line_no) +
                              ": invalid return counters " +
                              std::to_string(return_number) + "/" +
                              std::to_string(number_of_returns) + " in " + path);
    if (number_of_returns == 1)
        return ReturnClass::Only;
    if (return_number == 1)
        return ReturnClass::First;
    if (return_number == number_of_returns)
        return ReturnClass::Last;
    return ReturnClass::Intermediate;
}

}  // namespace

PointCloud PointCloud::read(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open point cloud file: " + path);

    PointCloud cloud;
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

        double x, y, z;
        long rn, nr;
        char trailing;
        const int got = std::sscanf(body.c_str(), "%lf %lf %lf %ld %ld %c", &x,
                                    &y, &z, &rn, &nr, &trailing);
        if (got != 5)
            throw ValidationError("point record line " + std::to_string(line_no) +
                                  ": expected 'x y z return_number "
                                  "number_of_returns', got '" + body + "' in " +
                                  path);
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
            throw ValidationError("point record line " + std::to_string(line_no) +
                                  ": non-finite coordinate in " + path);
        cloud.points.push_back({x, y, z, classify(rn, nr, line_no, path)});
    }
    return cloud;
}

PointCloud normalize_heights(const PointCloud &cloud, const Grid &dtm,
                             NormalizeTally *tally)
{
    if (cloud.normalized)
        throw ValidationError("point cloud is already height-normalized");

    NormalizeTally local;
    PointCloud out;
    out.normalized = true;
    out.points.reserve(cloud.points.size());
    for (const PointRecord &p : cloud.points)
    {
        const auto ground = dtm.bilinear(p.x, p.y);
        if (!ground)
        {
            ++local.dropped;
            continue;
        }
        double h = p.z - *ground;
        if (h < 0.0)
        {
            h = 0.0;
            ++local.clamped;
        }
        out.points.push_back({p.x, p.y, h, p.rc});
    }
    if (tally)
        *tally = local;
    return out;
}

}  // namespace standage
