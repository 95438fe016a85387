#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "standage.h"

namespace {

std::string capi_temp_dir()
{
    static std::string dir = [] {
        char buf[] = "/tmp/standage_capi_XXXXXX";
        if (mkdtemp(buf) == nullptr)
            std::abort();
        return std::string(buf);
    }();
    return dir;
}

}  // namespace

TEST_CASE("c api: version and error state")
{
    const char *v = sa_version();
    REQUIRE(v != nullptr);
    CHECK(std::strchr(v, '.') != nullptr);

    sa_grid *g = nullptr;
    REQUIRE(sa_grid_create(2, 2, 0, 0, 16, -9999, &g) == SA_OK);
    CHECK(std::string(sa_last_error()).empty());  // success clears it
    sa_grid_free(g);
}

TEST_CASE("c api: grid lifecycle, bounds checks and round-trip")
{
    sa_grid *g = nullptr;
    REQUIRE(sa_grid_create(3, 2, 10.0, 20.0, 16.0, -9999.0, &g) == SA_OK);
    REQUIRE(g != nullptr);

    int ncols = 0, nrows = 0;
    CHECK(sa_grid_shape(g, &ncols, &nrows) == SA_OK);
    CHECK(ncols == 3);
    CHECK(nrows == 2);

    CHECK(sa_grid_set(g, 0, 0, 42.5) == SA_OK);
    CHECK(sa_grid_set(g, 1, 2, 7.0) == SA_OK);
    CHECK(sa_grid_set(g, 2, 0, 1.0) == SA_EINVAL);  // row out of range
    CHECK(std::string(sa_last_error()).find("out of range") !=
          std::string::npos);

    double v = 0.0;
    CHECK(sa_grid_get(g, 0, 0, &v) == SA_OK);
    CHECK(v == 42.5);
    CHECK(sa_grid_get(g, 0, 3, &v) == SA_EINVAL);
    CHECK(sa_grid_get(g, 0, 0, nullptr) == SA_EINVAL);

    const std::string path = capi_temp_dir() + "/grid.asc";
    REQUIRE(sa_grid_write(g, path.c_str()) == SA_OK);

    sa_grid *back = nullptr;
    REQUIRE(sa_grid_read(path.c_str(), &back) == SA_OK);
    CHECK(sa_grid_get(back, 1, 2, &v) == SA_OK);
    CHECK(v == 7.0);

    sa_grid_free(back);
    sa_grid_free(g);

    sa_grid *missing = nullptr;
    CHECK(sa_grid_read((capi_temp_dir() + "/absent.asc").c_str(), &missing) ==
          SA_EINVAL);
    CHECK(!std::string(sa_last_error()).empty());
    CHECK(sa_grid_read(nullptr, &missing) == SA_EINVAL);
}

TEST_CASE("c api: cloud read, normalize and metrics")
{
    const std::string cloud_path = capi_temp_dir() + "/cloud.txt";
    std::ofstream(cloud_path) << "# x y z rn nr\n"
                                 "8 8 105 1 1\n"
                                 "8 8 110 1 2\n"
                                 "8 8 101 2 2\n";

    sa_cloud *raw = nullptr;
    REQUIRE(sa_cloud_read(cloud_path.c_str(), &raw) == SA_OK);
    size_t n = 0;
    CHECK(sa_cloud_size(raw, &n) == SA_OK);
    CHECK(n == 3);

    // Metrics demand a normalized cloud.
    std::vector<double> values(static_cast<size_t>(sa_metric_count()));
    CHECK(sa_cloud_metrics(raw, values.data()) == SA_EINVAL);

    sa_grid *dtm = nullptr;
    REQUIRE(sa_grid_create(3, 3, 0, 0, 16, -9999, &dtm) == SA_OK);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            REQUIRE(sa_grid_set(dtm, r, c, 100.0) == SA_OK);

    sa_cloud *norm = nullptr;
    size_t dropped = 99, clamped = 99;
    REQUIRE(sa_cloud_normalize(raw, dtm, &norm, &dropped, &clamped) == SA_OK);
    CHECK(dropped == 0);
    CHECK(clamped == 0);

    REQUIRE(sa_metric_count() > 0);
    REQUIRE(sa_cloud_metrics(norm, values.data()) == SA_OK);

    int idx_mean = -1, idx_n_first = -1;
    for (int i = 0; i < sa_metric_count(); ++i)
    {
        REQUIRE(sa_metric_name(i) != nullptr);
        if (std::strcmp(sa_metric_name(i), "hmean_first") == 0)
            idx_mean = i;
        if (std::strcmp(sa_metric_name(i), "n_first") == 0)
            idx_n_first = i;
    }
    REQUIRE(idx_mean >= 0);
    REQUIRE(idx_n_first >= 0);
    // First returns: heights 5 and 10 (the rn=2 point is a last return).
    CHECK(values[static_cast<size_t>(idx_mean)] == doctest::Approx(7.5));
    CHECK(values[static_cast<size_t>(idx_n_first)] == 2.0);
    CHECK(sa_metric_name(-1) == nullptr);
    CHECK(sa_metric_name(sa_metric_count()) == nullptr);

    sa_cloud_free(norm);
    sa_cloud_free(raw);
    sa_grid_free(dtm);
}

TEST_CASE("c api: registry and prediction")
{
    sa_registry *reg = nullptr;
    REQUIRE(sa_registry_builtin(&reg) == SA_OK);
    size_t n = 0;
    CHECK(sa_registry_size(reg, &n) == SA_OK);
    CHECK(n == 22);

    const std::string path = capi_temp_dir() + "/models.txt";
    REQUIRE(sa_registry_save(reg, path.c_str()) == SA_OK);
    sa_registry *back = nullptr;
    REQUIRE(sa_registry_load(path.c_str(), &back) == SA_OK);
    size_t n2 = 0;
    CHECK(sa_registry_size(back, &n2) == SA_OK);
    CHECK(n2 == n);
    sa_registry_free(back);

    sa_registry *missing = nullptr;
    CHECK(sa_registry_load((capi_temp_dir() + "/nope.txt").c_str(),
                           &missing) == SA_EINVAL);

    const char *names[] = {"h95_first", "NDVI",  "s2_8A", "s2_11", "DTM",
                           "distC",     "Lat",   "slope", "diffT"};
    const double values[] = {15.0, 0.85, 2900.0, 1400.0, 250.0,
                             20000.0, 63.5, 4.0, 1.0};
    double age = 0.0;
    REQUIRE(sa_predict_age(reg, 1, 14.0, names, values, 9, &age) == SA_OK);
    CHECK(age == doctest::Approx(76.01814030283248).epsilon(1e-9));

    // Unknown species code.
    CHECK(sa_predict_age(reg, 9, 14.0, names, values, 9, &age) == SA_EINVAL);
    CHECK(std::string(sa_last_error()).find("species code") !=
          std::string::npos);

    // A model input the caller did not supply is a processing failure.
    CHECK(sa_predict_age(reg, 1, 14.0, names, values, 1, &age) == SA_ERROR);
    CHECK(std::string(sa_last_error()).find("NDVI") != std::string::npos);

    CHECK(sa_predict_age(reg, 1, 14.0, nullptr, values, 9, &age) == SA_EINVAL);
    CHECK(sa_predict_age(reg, 1, 14.0, names, values, 9, nullptr) ==
          SA_EINVAL);

    sa_registry_free(reg);
}

TEST_CASE("c api: site index snapping")
{
    int snapped = 0;
    REQUIRE(sa_snap_si(12.4, &snapped) == SA_OK);
    CHECK(snapped == 11);
    REQUIRE(sa_snap_si(12.6, &snapped) == SA_OK);
    CHECK(snapped == 14);
    CHECK(sa_snap_si(std::nan(""), &snapped) == SA_EINVAL);
    CHECK(sa_snap_si(14.0, nullptr) == SA_EINVAL);
}

TEST_CASE("c api: config and pipeline run")
{
    sa_config *cfg = nullptr;
    REQUIRE(sa_config_create(&cfg) == SA_OK);
    CHECK(sa_config_get(cfg, "seed") == nullptr);
    REQUIRE(sa_config_set(cfg, "seed", "5") == SA_OK);
    CHECK(std::string(sa_config_get(cfg, "seed")) == "5");

    sa_config *missing = nullptr;
    CHECK(sa_config_load((capi_temp_dir() + "/none.cfg").c_str(), &missing) ==
          SA_EINVAL);

    CHECK(sa_run("harvest", cfg) == SA_EINVAL);
    CHECK(std::string(sa_last_error()).find("harvest") != std::string::npos);

    const std::string out = capi_temp_dir() + "/scene";
    REQUIRE(sa_config_set(cfg, "out_dir", out.c_str()) == SA_OK);
    REQUIRE(sa_config_set(cfg, "ncols", "6") == SA_OK);
    REQUIRE(sa_config_set(cfg, "nrows", "5") == SA_OK);
    REQUIRE(sa_config_set(cfg, "species_mix", "pine") == SA_OK);
    REQUIRE(sa_config_set(cfg, "si_mix", "14") == SA_OK);
    REQUIRE(sa_run("synth", cfg) == SA_OK);
    CHECK(std::ifstream(out + "/truth.asc").good());
    CHECK(std::ifstream(out + "/manifest.txt").good());

    sa_config_free(cfg);
}
