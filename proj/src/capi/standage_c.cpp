/******************************************************************************
 * Project:  standage
 * Purpose:  C API implementation: opaque handles over the C++ core.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "standage.h"

#include <cstring>
#include <string>

#include "core/metrics.hpp"
#include "core/model.hpp"
#include "core/pipeline.hpp"

using namespace standage;

struct sa_grid
{
    Grid grid;
};
struct sa_cloud
{
    PointCloud cloud;
};
struct sa_registry
{
    ModelRegistry reg;
};
struct sa_config
{
    RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char *what)
{
    g_last_error = what;
    return code;
}

template <typename Fn>
int guarded(Fn &&fn)
{
    try
    {
        fn();
        g_last_error.clear();
        return SA_OK;
    }
    catch (const ValidationError &e)
    {
        return fail(SA_EINVAL, e.what());
    }
    catch (const std::exception &e)
    {
        return fail(SA_ERROR, e.what());
    }
    catch (...)
    {
        return fail(SA_ERROR, "unknown error");
    }
}

}  // namespace

extern "C"
{

const char *sa_version(void)
{
    return "0.1.0";
}

const char *sa_last_error(void)
{
    return g_last_error.c_str();
}

/* ------------------------------ grids ------------------------------ */

int sa_grid_create(int ncols, int nrows, double xllcorner, double yllcorner,
                   double cellsize, double nodata, sa_grid **out)
{
    if (!out)
        return fail(SA_EINVAL, "out must not be NULL");
    return guarded(
        [&]
        {
            *out = new sa_grid{Grid(ncols, nrows, xllcorner, yllcorner,
                                    cellsize, nodata, nodata)};
        });
}

int sa_grid_read(const char *path, sa_grid **out)
{
    if (!path || !out)
        return fail(SA_EINVAL, "path and out must not be NULL");
    return guarded([&] { *out = new sa_grid{Grid::read(path)}; });
}

int sa_grid_write(const sa_grid *grid, const char *path)
{
    if (!grid || !path)
        return fail(SA_EINVAL, "grid and path must not be NULL");
    return guarded([&] { grid->grid.write(path); });
}

int sa_grid_get(const sa_grid *grid, int row, int col, double *out)
{
    if (!grid || !out)
        return fail(SA_EINVAL, "grid and out must not be NULL");
    if (row < 0 || row >= grid->grid.nrows() || col < 0 ||
        col >= grid->grid.ncols())
        return fail(SA_EINVAL, "cell index out of range");
    *out = grid->grid.at(row, col);
    return SA_OK;
}

int sa_grid_set(sa_grid *grid, int row, int col, double value)
{
    if (!grid)
        return fail(SA_EINVAL, "grid must not be NULL");
    if (row < 0 || row >= grid->grid.nrows() || col < 0 ||
        col >= grid->grid.ncols())
        return fail(SA_EINVAL, "cell index out of range");
    grid->grid.set(row, col, value);
    return SA_OK;
}

int sa_grid_shape(const sa_grid *grid, int *ncols, int *nrows)
{
    if (!grid)
        return fail(SA_EINVAL, "grid must not be NULL");
    if (ncols)
        *ncols = grid->grid.ncols();
    if (nrows)
        *nrows = grid->grid.nrows();
    return SA_OK;
}

void sa_grid_free(sa_grid *grid)
{
    delete grid;
}

/* --------------------------- point clouds -------------------------- */

int sa_cloud_read(const char *path, sa_cloud **out)
{
    if (!path || !out)
        return fail(SA_EINVAL, "path and out must not be NULL");
    return guarded([&] { *out = new sa_cloud{PointCloud::read(path)}; });
}

int sa_cloud_size(const sa_cloud *cloud, size_t *out)
{
    if (!cloud || !out)
        return fail(SA_EINVAL, "cloud and out must not be NULL");
    *out = cloud->cloud.points.size();
    return SA_OK;
}

int sa_cloud_normalize(const sa_cloud *cloud, const sa_grid *dtm,
                       sa_cloud **out, size_t *dropped, size_t *clamped)
{
    if (!cloud || !dtm || !out)
        return fail(SA_EINVAL, "cloud, dtm and out must not be NULL");
    return guarded(
        [&]
        {
            NormalizeTally tally;
            *out = new sa_cloud{
                normalize_heights(cloud->cloud, dtm->grid, &tally)};
            if (dropped)
                *dropped = tally.dropped;
            if (clamped)
                *clamped = tally.clamped;
        });
}

int sa_cloud_metrics(const sa_cloud *cloud, double *values)
{
    if (!cloud || !values)
        return fail(SA_EINVAL, "cloud and values must not be NULL");
    return guarded(
        [&]
        {
            const MetricsVector m = als_metrics(cloud->cloud);
            for (int i = 0; i < MetricsVector::kCount; ++i)
                values[i] = m.value(i);
        });
}

void sa_cloud_free(sa_cloud *cloud)
{
    delete cloud;
}

int sa_metric_count(void)
{
    return MetricsVector::kCount;
}

const char *sa_metric_name(int index)
{
    if (index < 0 || index >= MetricsVector::kCount)
        return nullptr;
    return MetricsVector::names()[index].c_str();
}

/* ----------------------------- models ------------------------------ */

int sa_registry_builtin(sa_registry **out)
{
    if (!out)
        return fail(SA_EINVAL, "out must not be NULL");
    return guarded([&] { *out = new sa_registry{ModelRegistry::builtin()}; });
}

int sa_registry_load(const char *path, sa_registry **out)
{
    if (!path || !out)
        return fail(SA_EINVAL, "path and out must not be NULL");
    return guarded([&] { *out = new sa_registry{ModelRegistry::load(path)}; });
}

int sa_registry_save(const sa_registry *reg, const char *path)
{
    if (!reg || !path)
        return fail(SA_EINVAL, "registry and path must not be NULL");
    return guarded([&] { reg->reg.save(path); });
}

int sa_registry_size(const sa_registry *reg, size_t *out)
{
    if (!reg || !out)
        return fail(SA_EINVAL, "registry and out must not be NULL");
    *out = reg->reg.size();
    return SA_OK;
}

void sa_registry_free(sa_registry *reg)
{
    delete reg;
}

int sa_predict_age(const sa_registry *reg, int species, double si,
                   const char *const *names, const double *values,
                   size_t count, double *age)
{
    if (!reg || !age || (count > 0 && (!names || !values)))
        return fail(SA_EINVAL, "registry, age and predictor arrays must not "
                               "be NULL");
    return guarded(
        [&]
        {
            const auto sp = species_from_code(species);
            if (!sp)
                throw ValidationError("species code must be 1, 2 or 3");
            PredictorVector x;
            for (size_t i = 0; i < count; ++i)
            {
                if (!names[i])
                    throw ValidationError("predictor name must not be NULL");
                x.set(names[i], values[i]);
            }
            const AgeModel &m = route_model(reg->reg, *sp, snap_si(si));
            *age = predict_age(m, x);
        });
}

int sa_snap_si(double si, int *snapped)
{
    if (!snapped)
        return fail(SA_EINVAL, "snapped must not be NULL");
    return guarded([&] { *snapped = snap_si(si); });
}

/* ----------------------------- pipeline ---------------------------- */

int sa_config_create(sa_config **out)
{
    if (!out)
        return fail(SA_EINVAL, "out must not be NULL");
    return guarded([&] { *out = new sa_config{}; });
}

int sa_config_load(const char *path, sa_config **out)
{
    if (!path || !out)
        return fail(SA_EINVAL, "path and out must not be NULL");
    return guarded([&] { *out = new sa_config{RunConfig::load(path)}; });
}

int sa_config_set(sa_config *cfg, const char *key, const char *value)
{
    if (!cfg || !key || !value)
        return fail(SA_EINVAL, "config, key and value must not be NULL");
    return guarded([&] { cfg->cfg.set(key, value); });
}

const char *sa_config_get(const sa_config *cfg, const char *key)
{
    if (!cfg || !key || !cfg->cfg.has(key))
        return nullptr;
    thread_local std::string value;
    value = cfg->cfg.get_string(key);
    return value.c_str();
}

void sa_config_free(sa_config *cfg)
{
    delete cfg;
}

int sa_run(const char *command, const sa_config *cfg)
{
    if (!command || !cfg)
        return fail(SA_EINVAL, "command and config must not be NULL");
    return guarded([&] { run_command(command, cfg->cfg); });
}

}  // extern "C"
