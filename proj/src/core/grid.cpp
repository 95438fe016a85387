/******************************************************************************
 * Project:  standage
 * Purpose:  Grid implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace standage {

Grid::Grid(int ncols, int nrows, double xll, double yll, double cellsize,
           double nodata, double fill_value)
    : ncols_(ncols), nrows_(nrows), xll_(xll), yll_(yll), cellsize_(cellsize),
      nodata_(nodata)
{
    if (ncols < 1 || nrows < 1)
        throw ValidationError("grid dimensions must be positive, got " +
                              std::to_string(ncols) + "x" + std::to_string(nrows));
    if (!(cellsize > 0.0))
        throw ValidationError("grid cellsize must be positive, got " +
                              format_g(cellsize, 10));
    values_.assign(static_cast<std::size_t>(ncols) * nrows, fill_value);
}

bool Grid::same_geometry(const Grid &other) const
{
    return ncols_ == other.ncols_ && nrows_ == other.nrows_ &&
           xll_ == other.xll_ && yll_ == other.yll_ &&
           cellsize_ == other.cellsize_;
}

namespace {

void parse_header_line(std::istream &in, const char *expected_key, int line_no,
                       double &out)
{
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(std::string("grid header truncated before '") +
                              expected_key + "' (line " +
                              std::to_string(line_no) + ")");
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    if (lower(key) != lower(expected_key))
        throw ValidationError("grid header line " + std::to_string(line_no) +
                              ": expected '" + expected_key + "', got '" + key +
                              "'");
    if (!parse_double(value, out))
        throw ValidationError("grid header line " + std::to_string(line_no) +
                              ": bad numeric value '" + value + "' for " +
                              expected_key);
}

}  // namespace

Grid Grid::read(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open grid file: " + path);

    double ncols_d, nrows_d, xll, yll, cellsize, nodata;
    parse_header_line(in, "ncols", 1, ncols_d);
    parse_header_line(in, "nrows", 2, nrows_d);
    parse_header_line(in, "xllcorner", 3, xll);
    parse_header_line(in, "yllcorner", 4, yll);
    parse_header_line(in, "cellsize", 5, cellsize);
    parse_header_line(in, "NODATA_value", 6, nodata);

    if (ncols_d < 1 || ncols_d != std::floor(ncols_d) || ncols_d > 1e9)
        throw ValidationError("grid header: ncols must be a positive integer");
    if (nrows_d < 1 || nrows_d != std::floor(nrows_d) || nrows_d > 1e9)
        throw ValidationError("grid header: nrows must be a positive integer");
    if (!(cellsize > 0.0))
        throw ValidationError("grid header: cellsize must be positive");

    Grid g(static_cast<int>(ncols_d), static_cast<int>(nrows_d), xll, yll,
           cellsize, nodata, nodata);

    std::string body((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    const char *p = body.c_str();
    const char *endp = p + body.size();
    std::size_t count = 0;
    const std::size_t expected = g.size();
    while (p < endp)
    {
        while (p < endp && std::isspace(static_cast<unsigned char>(*p)))
            ++p;
        if (p >= endp)
            break;
        char *next = nullptr;
        const double v = std::strtod(p, &next);
        if (next == p)
            throw ValidationError("grid body: unparseable token near '" +
                                  std::string(p, std::min<std::size_t>(16, endp - p)) +
                                  "' in " + path);
        if (count >= expected)
            throw ValidationError(
                "grid dimension mismatch: header declares " +
                std::to_string(expected) + " values but file has more (" + path +
                ")");
        g.values_[count++] = v;
        p = next;
    }
    if (count != expected)
        throw ValidationError("grid dimension mismatch: header declares " +
                              std::to_string(expected) + " values, found " +
                              std::to_string(count) + " (" + path + ")");
    return g;
}

void Grid::write(const std::string &path) const
{
    if (values_.empty())
        throw ProcessingError("refusing to write empty grid: " + path);
    for (const double v : values_)
        if (!std::isfinite(v) && !is_nodata(v))
            throw ProcessingError("grid holds a non-finite value that is not "
                                  "the nodata sentinel: " + path);

    std::string out;
    out.reserve(values_.size() * 8 + 128);
    out += "ncols " + std::to_string(ncols_) + "\n";
    out += "nrows " + std::to_string(nrows_) + "\n";
    out += "xllcorner " + format_g(xll_, 10) + "\n";
    out += "yllcorner " + format_g(yll_, 10) + "\n";
    out += "cellsize " + format_g(cellsize_, 10) + "\n";
    out += "NODATA_value " + format_g(nodata_, 10) + "\n";

    char buf[64];
    for (int r = 0; r < nrows_; ++r)
    {
        for (int c = 0; c < ncols_; ++c)
        {
            const int len = std::snprintf(buf, sizeof(buf), "%.10g", at(r, c));
            if (c)
                out += ' ';
            out.append(buf, len);
        }
        out += '\n';
    }

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ProcessingError("cannot open grid file for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f)
        throw ProcessingError("short write on grid file: " + path);
}

std::optional<double> Grid::bilinear(double x, double y) const
{
    // Continuous coordinates in units of cells, relative to the center of
    // the south-west cell.
    const double fx = (x - xll_) / cellsize_ - 0.5;
    const double fy = (y - yll_) / cellsize_ - 0.5;
    if (fx < 0.0 || fy < 0.0 || fx > ncols_ - 1 || fy > nrows_ - 1)
        return std::nullopt;

    int c0 = static_cast<int>(std::floor(fx));
    int s0 = static_cast<int>(std::floor(fy));  // row index counted from south
    if (c0 >= ncols_ - 1)
        c0 = ncols_ - 2;
    if (s0 >= nrows_ - 1)
        s0 = nrows_ - 2;
    // Degenerate axes (single row or column): sample along the other axis.
    const int c1 = (ncols_ == 1) ? 0 : c0 + 1;
    const int s1 = (nrows_ == 1) ? 0 : s0 + 1;
    if (ncols_ == 1)
        c0 = 0;
    if (nrows_ == 1)
        s0 = 0;

    const double tx = (ncols_ == 1) ? 0.0 : fx - c0;
    const double ty = (nrows_ == 1) ? 0.0 : fy - s0;

    const int r0 = nrows_ - 1 - s0;  // grid rows count from north
    const int r1 = nrows_ - 1 - s1;
    double v00 = at(r0, c0), v10 = at(r0, c1);
    double v01 = at(r1, c0), v11 = at(r1, c1);

    // A nodata corner only blocks interpolation when it carries weight;
    // zero-weight corners (points on the window edge) drop out instead.
    struct CornerRef
    {
        double *v;
        double w;
    };
    const CornerRef corners[] = {{&v00, (1.0 - tx) * (1.0 - ty)},
                                 {&v10, tx * (1.0 - ty)},
                                 {&v01, (1.0 - tx) * ty},
                                 {&v11, tx * ty}};
    for (const CornerRef &corner : corners)
    {
        if (!is_nodata(*corner.v))
            continue;
        if (corner.w > 0.0)
            return std::nullopt;
        *corner.v = 0.0;
    }

    const double south = v00 * (1.0 - tx) + v10 * tx;
    const double north = v01 * (1.0 - tx) + v11 * tx;
    return south * (1.0 - ty) + north * ty;
}

Grid slope_grid(const Grid &dtm)
{
    if (dtm.ncols() < 3 || dtm.nrows() < 3)
        throw ValidationError("slope needs a grid of at least 3x3 cells, got " +
                              std::to_string(dtm.ncols()) + "x" +
                              std::to_string(dtm.nrows()));

    Grid out(dtm.ncols(), dtm.nrows(), dtm.xll(), dtm.yll(), dtm.cellsize(),
             dtm.nodata(), dtm.nodata());
    const double cs = dtm.cellsize();
    for (int r = 1; r < dtm.nrows() - 1; ++r)
    {
        for (int c = 1; c < dtm.ncols() - 1; ++c)
        {
            double z[3][3];
            bool ok = true;
            for (int dr = -1; dr <= 1 && ok; ++dr)
                for (int dc = -1; dc <= 1; ++dc)
                {
                    z[dr + 1][dc + 1] = dtm.at(r + dr, c + dc);
                    if (dtm.is_nodata(z[dr + 1][dc + 1]))
                    {
                        ok = false;
                        break;
                    }
                }
            if (!ok)
                continue;
            // Horn 1981.  z is indexed [row][col] with row 0 the northern
            // neighbor row, so increasing index runs south / east.
            const double dzdx = ((z[0][2] + 2 * z[1][2] + z[2][2]) -
                                 (z[0][0] + 2 * z[1][0] + z[2][0])) /
                                (8.0 * cs);
            const double dzdy = ((z[2][0] + 2 * z[2][1] + z[2][2]) -
                                 (z[0][0] + 2 * z[0][1] + z[0][2])) /
                                (8.0 * cs);
            const double rise = std::sqrt(dzdx * dzdx + dzdy * dzdy);
            out.set(r, c, std::atan(rise) * 180.0 / M_PI);
        }
    }
    return out;
}

Grid resample_mean(const Grid &g, int factor)
{
    if (factor < 1)
        throw ValidationError("resample factor must be >= 1, got " +
                              std::to_string(factor));
    if (g.ncols() % factor != 0 || g.nrows() % factor != 0)
        throw ValidationError("resample factor " + std::to_string(factor) +
                              " does not divide grid dimensions " +
                              std::to_string(g.ncols()) + "x" +
                              std::to_string(g.nrows()));

    Grid out(g.ncols() / factor, g.nrows() / factor, g.xll(), g.yll(),
             g.cellsize() * factor, g.nodata(), g.nodata());
    for (int r = 0; r < out.nrows(); ++r)
    {
        for (int c = 0; c < out.ncols(); ++c)
        {
            double sum = 0.0;
            int n = 0;
            for (int dr = 0; dr < factor; ++dr)
                for (int dc = 0; dc < factor; ++dc)
                {
                    const double v = g.at(r * factor + dr, c * factor + dc);
                    if (!g.is_nodata(v))
                    {
                        sum += v;
                        ++n;
                    }
                }
            if (n > 0)
                out.set(r, c, sum / n);
        }
    }
    return out;
}

}  // namespace standage
