/******************************************************************************
 * Project:  standage
 * Purpose:  Public C API for the stand-age mapping toolkit.
 *
 * All functions return a status code (SA_OK on success) unless documented
 * otherwise.  Objects are opaque handles that must be released with their
 * matching *_free function.  On failure, sa_last_error() returns a
 * thread-local description of the most recent error.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#ifndef STANDAGE_H
#define STANDAGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C"
{
#endif

#define SA_OK 0      /* success */
#define SA_ERROR 1   /* processing failure */
#define SA_EINVAL 2  /* invalid input or configuration */

typedef struct sa_grid sa_grid;
typedef struct sa_cloud sa_cloud;
typedef struct sa_registry sa_registry;
typedef struct sa_config sa_config;

/* Library version as "major.minor.patch". */
const char *sa_version(void);

/* Thread-local message for the most recent failure; empty string if none. */
const char *sa_last_error(void);

/* ------------------------------ grids ------------------------------ */

int sa_grid_create(int ncols, int nrows, double xllcorner, double yllcorner,
                   double cellsize, double nodata, sa_grid **out);
int sa_grid_read(const char *path, sa_grid **out);
int sa_grid_write(const sa_grid *grid, const char *path);
int sa_grid_get(const sa_grid *grid, int row, int col, double *out);
int sa_grid_set(sa_grid *grid, int row, int col, double value);
int sa_grid_shape(const sa_grid *grid, int *ncols, int *nrows);
void sa_grid_free(sa_grid *grid);

/* --------------------------- point clouds -------------------------- */

int sa_cloud_read(const char *path, sa_cloud **out);
int sa_cloud_size(const sa_cloud *cloud, size_t *out);
/* Height-normalize against a terrain grid.  dropped/clamped may be NULL. */
int sa_cloud_normalize(const sa_cloud *cloud, const sa_grid *dtm,
                       sa_cloud **out, size_t *dropped, size_t *clamped);
/* Metric values in schema order; values must hold sa_metric_count()
 * doubles.  Missing metrics are written as NaN. */
int sa_cloud_metrics(const sa_cloud *cloud, double *values);
void sa_cloud_free(sa_cloud *cloud);

int sa_metric_count(void);
const char *sa_metric_name(int index);

/* ----------------------------- models ------------------------------ */

int sa_registry_builtin(sa_registry **out);
int sa_registry_load(const char *path, sa_registry **out);
int sa_registry_save(const sa_registry *reg, const char *path);
int sa_registry_size(const sa_registry *reg, size_t *out);
void sa_registry_free(sa_registry *reg);

/* Predict one age.  species: 1 spruce, 2 pine, 3 birch.  si is snapped to
 * the nearest class.  Predictors are given as parallel name/value arrays. */
int sa_predict_age(const sa_registry *reg, int species, double si,
                   const char *const *names, const double *values,
                   size_t count, double *age);

/* Snap a site index value to the class it is routed to. */
int sa_snap_si(double si, int *snapped);

/* ----------------------------- pipeline ---------------------------- */

int sa_config_create(sa_config **out);
int sa_config_load(const char *path, sa_config **out);
int sa_config_set(sa_config *cfg, const char *key, const char *value);
/* Returns NULL when the key is absent. */
const char *sa_config_get(const sa_config *cfg, const char *key);
void sa_config_free(sa_config *cfg);

/* Run a pipeline command: "metrics", "fit", "predict", "validate",
 * "synth" or "curves".  Outputs land in the configured out_dir. */
int sa_run(const char *command, const sa_config *cfg);

#ifdef __cplusplus
}
#endif

#endif /* STANDAGE_H */
