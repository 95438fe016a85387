#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core/pipeline.hpp"
#include "core/grid.hpp"
#include "core/model.hpp"

using namespace standage;

namespace {

std::string pipeline_temp_dir()
{
    static std::string dir = [] {
        char buf[] = "/tmp/standage_pipe_XXXXXX";
        if (mkdtemp(buf) == nullptr)
            std::abort();
        return std::string(buf);
    }();
    return dir;
}

std::string slurp(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool file_exists(const std::string &path)
{
    return std::ifstream(path).good();
}

/* Parse one row of a report.csv by class label; returns the fields. */
std::vector<std::string> csv_row(const std::string &csv,
                                 const std::string &label)
{
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line))
    {
        const auto fields = split(line, ',');
        if (!fields.empty() && fields[0] == label)
            return fields;
    }
    FAIL("row '" << label << "' not found in report csv");
    return {};
}

RunConfig synth_config(const std::string &out_dir, std::uint64_t seed,
                       double sigma_scale)
{
    RunConfig cfg;
    cfg.set("out_dir", out_dir);
    cfg.set("ncols", "15");
    cfg.set("nrows", "12");
    cfg.set("species_mix", "spruce");
    cfg.set("si_mix", "14");
    cfg.set("seed", std::to_string(seed));
    cfg.set("sigma_scale", format_g(sigma_scale, 10));
    return cfg;
}

}  // namespace

TEST_CASE("run_command: unknown command is rejected")
{
    RunConfig cfg;
    cfg.set("out_dir", pipeline_temp_dir() + "/nowhere");
    CHECK_THROWS_AS(run_command("harvest", cfg), ValidationError);
}

TEST_CASE("synth: writes a complete, replayable scene")
{
    const std::string dir_a = pipeline_temp_dir() + "/synth_a";
    const std::string dir_b = pipeline_temp_dir() + "/synth_b";
    run_command("synth", synth_config(dir_a, 42, 1.0));
    run_command("synth", synth_config(dir_b, 42, 1.0));

    for (const char *name :
         {"truth.asc", "plots.csv", "scene.txt", "manifest.txt",
          "layers/species.asc", "layers/si.asc", "layers/h95_first.asc",
          "layers/NDVI.asc", "layers/distC.asc"})
    {
        CHECK_MESSAGE(file_exists(dir_a + "/" + name), name);
    }

    // Identical seeds give byte-identical outputs (manifest differs only
    // in out_dir, so compare the data files).
    for (const char *name : {"truth.asc", "plots.csv", "scene.txt",
                             "layers/h95_first.asc", "layers/species.asc"})
        CHECK_MESSAGE(slurp(dir_a + "/" + name) == slurp(dir_b + "/" + name),
                      name);

    // A different seed changes the scene.
    const std::string dir_c = pipeline_temp_dir() + "/synth_c";
    run_command("synth", synth_config(dir_c, 43, 1.0));
    CHECK(slurp(dir_a + "/truth.asc") != slurp(dir_c + "/truth.asc"));

    // The manifest records the command and the seed.
    const std::string manifest = slurp(dir_a + "/manifest.txt");
    CHECK(manifest.find("command = synth") != std::string::npos);
    CHECK(manifest.find("seed = 42") != std::string::npos);
}

TEST_CASE("predict: consumes synth layers and reports a tally")
{
    const std::string scene_dir = pipeline_temp_dir() + "/scene_pred";
    run_command("synth", synth_config(scene_dir, 7, 0.0));

    const std::string out = pipeline_temp_dir() + "/pred";
    RunConfig cfg;
    cfg.set("out_dir", out);
    cfg.set("layers_dir", scene_dir + "/layers");
    run_command("predict", cfg);

    REQUIRE(file_exists(out + "/age.asc"));
    const std::string tally = slurp(out + "/tally.txt");
    CHECK(tally.find("cells_total = 180") != std::string::npos);
    CHECK(tally.find("cells_predicted = 180") != std::string::npos);
    CHECK(tally.find("cells_masked = 0") != std::string::npos);
    CHECK(tally.find("routing_exact = 180") != std::string::npos);

    // Noise-free scene, log link: prediction is truth times the constant
    // bias-correction factor exp(sigma^2/2) of the routed model.
    const Grid truth = Grid::read(scene_dir + "/truth.asc");
    const Grid age = Grid::read(out + "/age.asc");
    const ModelRegistry reg = ModelRegistry::builtin();
    const double factor =
        std::exp(0.5 * reg.find(Species::Spruce, 14)->sigma *
                 reg.find(Species::Spruce, 14)->sigma);
    REQUIRE(truth.size() == age.size());
    for (std::size_t i = 0; i < truth.size(); ++i)
        CHECK(age.values()[i] ==
              doctest::Approx(truth.values()[i] * factor).epsilon(1e-6));
}

TEST_CASE("fit and validate close the loop on a synthetic scene")
{
    const std::string scene_dir = pipeline_temp_dir() + "/scene_fit";
    run_command("synth", synth_config(scene_dir, 11, 1.0));

    const std::string fit_dir = pipeline_temp_dir() + "/fit";
    RunConfig fit_cfg;
    fit_cfg.set("out_dir", fit_dir);
    fit_cfg.set("plots", scene_dir + "/plots.csv");
    run_command("fit", fit_cfg);

    REQUIRE(file_exists(fit_dir + "/models.txt"));
    CHECK(file_exists(fit_dir + "/fit_report.txt"));
    CHECK(file_exists(fit_dir + "/selection.txt"));

    const ModelRegistry fitted = ModelRegistry::load(fit_dir + "/models.txt");
    CHECK(fitted.size() == 1);
    const AgeModel *m = fitted.find(Species::Spruce, 14);
    REQUIRE(m != nullptr);
    CHECK(m->link == LinkFunction::Log);
    CHECK(m->sigma > 0.0);

    const std::string selection = slurp(fit_dir + "/selection.txt");
    CHECK(selection.find("spruce/SI 14") != std::string::npos);
    CHECK(selection.find("+h95_first") != std::string::npos);
    CHECK(selection.find("importance") != std::string::npos);

    // Validate the fitted registry against the same plots.
    const std::string val_dir = pipeline_temp_dir() + "/val";
    RunConfig val_cfg;
    val_cfg.set("out_dir", val_dir);
    val_cfg.set("plots", scene_dir + "/plots.csv");
    val_cfg.set("registry", fit_dir + "/models.txt");
    val_cfg.set("weighted", "false");
    run_command("validate", val_cfg);

    REQUIRE(file_exists(val_dir + "/report.csv"));
    CHECK(file_exists(val_dir + "/report.txt"));
    CHECK(file_exists(val_dir + "/scatter.csv"));
    const auto all = csv_row(slurp(val_dir + "/report.csv"), "All");
    REQUIRE(all.size() >= 6);
    CHECK(std::stoul(all[1]) == 180);     // n
    CHECK(std::stod(all[2]) > 0.0);       // rmse_years
    CHECK(std::stod(all[3]) < 40.0);      // rmse_pct sane for sigma 0.262
}

TEST_CASE("fit: strata below min_rows are skipped")
{
    // Three pine rows only: every stratum is skipped, so fitting fails.
    const std::string dir = pipeline_temp_dir();
    const std::string plots = dir + "/tiny_plots.csv";
    std::ofstream(plots)
        << "plot_id,species,si,age,h95_first,DTM\n"
           "p1,pine,14,45,12.0,300\n"
           "p2,pine,14,50,14.0,310\n"
           "p3,pine,14,55,16.0,290\n";
    RunConfig cfg;
    cfg.set("out_dir", dir + "/fit_tiny");
    cfg.set("plots", plots);
    CHECK_THROWS_AS(run_command("fit", cfg), ValidationError);

    // Lowering the floor makes it fit (5 rows needed for 3 coefficients).
    std::ofstream(plots, std::ios::app) << "p4,pine,14,60,18.0,305\n"
                                           "p5,pine,14,42,11.0,295\n"
                                           "p6,pine,14,58,17.0,300\n";
    cfg.set("min_rows", "6");
    run_command("fit", cfg);
    const ModelRegistry fitted =
        ModelRegistry::load(dir + "/fit_tiny/models.txt");
    CHECK(fitted.size() == 1);
    CHECK(fitted.find(Species::Pine, 14) != nullptr);
}

TEST_CASE("metrics: plot polygons become a predictor table")
{
    const std::string dir = pipeline_temp_dir();

    // Flat terrain at 100 m over a 60x60 m tile.
    Grid dtm(6, 6, 0.0, 0.0, 10.0, -9999.0, 100.0);
    const std::string dtm_path = dir + "/dtm.asc";
    dtm.write(dtm_path);

    // Points in two plots; heights are ground + canopy.
    const std::string cloud_path = dir + "/cloud.txt";
    {
        std::ofstream out(cloud_path);
        out << "# x y z return_number number_of_returns\n";
        // Plot A around (15, 15): canopy heights 10 and 20.
        out << "14 14 110 1 1\n";
        out << "16 16 120 1 1\n";
        // Plot B around (45, 45): canopy height 6.
        out << "45 45 106 1 1\n";
        // Outside every plot.
        out << "50 15 130 1 1\n";
    }

    const std::string plots_path = dir + "/plots.txt";
    std::ofstream(plots_path)
        << "A species=spruce;si=14;age=60;distC=20000;Lat=63.5;Lon=10.2;"
           "diffT=0.5 : 10 10, 20 10, 20 20, 10 20, 10 10\n"
           "B species=pine;si=11;age=40 : 40 40, 50 40, 50 50, 40 50, "
           "40 40\n"
           "C species=birch;si=8 : 0 55, 5 55, 5 59, 0 59, 0 55\n";

    const std::string out = dir + "/metrics_out";
    RunConfig cfg;
    cfg.set("out_dir", out);
    cfg.set("dtm", dtm_path);
    cfg.set("cloud", cloud_path);
    cfg.set("plots", plots_path);
    run_command("metrics", cfg);  // plot C is empty and must be skipped

    const std::string csv = slurp(out + "/plots.csv");
    std::istringstream is(csv);
    std::string header;
    REQUIRE(std::getline(is, header));
    const auto cols = split(header, ',');
    REQUIRE(cols.size() > 4);
    CHECK(cols[0] == "plot_id");
    CHECK(cols[1] == "species");
    CHECK(cols[2] == "si");
    CHECK(cols[3] == "age");
    // Canonical ordering puts the model-facing block first.
    CHECK(cols[4] == "h95_first");

    auto field = [&cols](const std::vector<std::string> &row,
                         const std::string &name) -> std::string {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name)
                return row[i];
        FAIL("missing column " << name);
        return {};
    };

    std::string line;
    REQUIRE(std::getline(is, line));
    const auto row_a = split(line, ',');
    CHECK(row_a[0] == "A");
    CHECK(row_a[1] == "spruce");
    CHECK(row_a[2] == "14");
    CHECK(std::stod(field(row_a, "age")) == 60.0);
    // Heights 10 and 20 after normalization: h95 by linear interpolation.
    CHECK(std::stod(field(row_a, "h95_first")) == doctest::Approx(19.5));
    CHECK(std::stod(field(row_a, "hmean_first")) == doctest::Approx(15.0));
    CHECK(std::stod(field(row_a, "DTM")) == doctest::Approx(100.0));
    CHECK(std::stod(field(row_a, "distC")) == doctest::Approx(20000.0));
    CHECK(std::stod(field(row_a, "diffT")) == doctest::Approx(0.5));
    // No spectral input: the vegetation index never appears at all.
    CHECK(std::find(cols.begin(), cols.end(), "NDVI") == cols.end());

    REQUIRE(std::getline(is, line));
    const auto row_b = split(line, ',');
    CHECK(row_b[0] == "B");
    CHECK(std::stod(field(row_b, "h95_first")) == doctest::Approx(6.0));
    CHECK(field(row_b, "distC") == "NA");

    CHECK(!std::getline(is, line));  // plot C produced no row
}

TEST_CASE("validate: stand polygons against an age map")
{
    const std::string dir = pipeline_temp_dir();

    Grid age(2, 2, 0.0, 0.0, 16.0, -9999.0, -9999.0);
    age.set(0, 0, 40.0);
    age.set(0, 1, 60.0);
    age.set(1, 0, 80.0);
    age.set(1, 1, 100.0);
    const std::string age_path = dir + "/agemap.asc";
    age.write(age_path);

    const std::string stands_path = dir + "/stands.txt";
    std::ofstream(stands_path)
        << "s1 age=75;si=14 : 0 0, 32 0, 32 32, 0 32, 0 0\n"
           "s2 age=50;si=8 : 0 0, 16 0, 16 16, 0 16, 0 0\n"
           "s3 age=30 : 100 100, 120 100, 120 120, 100 120, 100 100\n"
           "s4 si=11 : 16 0, 32 0, 32 16, 16 16, 16 0\n";

    const std::string out = dir + "/val_stands";
    RunConfig cfg;
    cfg.set("out_dir", out);
    cfg.set("age_map", age_path);
    cfg.set("stands", stands_path);
    cfg.set("weighted", "true");
    run_command("validate", cfg);

    const std::string stands_csv = slurp(out + "/stands.csv");
    CHECK(stands_csv.find("s1,70,4,") != std::string::npos);
    CHECK(stands_csv.find("s2,80,1,") != std::string::npos);
    CHECK(stands_csv.find("s3,NA,0,") != std::string::npos);
    CHECK(stands_csv.find("no_cells") != std::string::npos);

    // s3 (no cells) and s4 (no observed age) are excluded from the pairs;
    // s1: obs 75, pred 70, area 1024 m^2; s2: obs 50, pred 80, area 256.
    // Weighted MD = 0.8*5 + 0.2*(-30) = -2.
    const std::string report = slurp(out + "/report.csv");
    const auto all = csv_row(report, "All");
    REQUIRE(all.size() >= 8);
    CHECK(std::stoul(all[1]) == 2);
    CHECK(std::stod(all[4]) == doctest::Approx(-2.0).epsilon(1e-9));
    const auto si8 = csv_row(report, "SI 8");
    CHECK(std::stod(si8[4]) == doctest::Approx(-30.0).epsilon(1e-9));

    // Requesting stands without pairs fails loudly.
    std::ofstream(stands_path + "2")
        << "s3 age=30 : 100 100, 120 100, 120 120, 100 120, 100 100\n";
    RunConfig bad = cfg;
    bad.set("stands", stands_path + "2");
    bad.set("out_dir", out + "_bad");
    CHECK_THROWS_AS(run_command("validate", bad), ValidationError);
}

TEST_CASE("validate: plot mode with predicted-si routing")
{
    const std::string dir = pipeline_temp_dir();
    const std::string plots = dir + "/val_plots.csv";
    std::ofstream(plots)
        << "plot_id,species,si,psi,age,h95_first,cc2,cc5,cc10,NDVI,s2_8A,"
           "s2_11,DTM,distC,Lat,Lon,slope,diffT\n"
           "v1,spruce,14,17,62,15.0,0.8,0.6,0.4,0.85,2900,1400,250,20000,"
           "63.5,10.2,4,1\n"
           "v2,spruce,14,NA,55,14.0,0.8,0.6,0.4,0.85,2900,1400,250,20000,"
           "63.5,10.2,4,1\n";

    RunConfig cfg;
    cfg.set("out_dir", dir + "/val_psi");
    cfg.set("plots", plots);
    cfg.set("routing", "predicted_si");
    cfg.set("weighted", "false");
    run_command("validate", cfg);

    const std::string report = slurp(dir + "/val_psi/report.csv");
    const auto all = csv_row(report, "All");
    CHECK(std::stoul(all[1]) == 1);  // v2 has no predicted si
    // v1 routes to the SI 17 model under predicted-si routing.
    CHECK(report.find("SI 17") != std::string::npos);

    RunConfig obs = cfg;
    obs.set("out_dir", dir + "/val_obs");
    obs.set("routing", "observed_si");
    run_command("validate", obs);
    const auto all_obs = csv_row(slurp(dir + "/val_obs/report.csv"), "All");
    CHECK(std::stoul(all_obs[1]) == 2);
}

TEST_CASE("curves: response table over the configured sweep")
{
    const std::string out = pipeline_temp_dir() + "/curves";
    RunConfig cfg;
    cfg.set("out_dir", out);
    cfg.set("species", "spruce");
    cfg.set("si", "14");
    cfg.set("lo", "5");
    cfg.set("hi", "25");
    cfg.set("steps", "10");
    run_command("curves", cfg);

    const std::string csv = slurp(out + "/curve.csv");
    std::istringstream is(csv);
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "h95_first,age");
    int rows = 0;
    double first_age = 0.0, last_age = 0.0, first_x = 0.0, last_x = 0.0;
    while (std::getline(is, line))
    {
        const auto f = split(line, ',');
        REQUIRE(f.size() == 2);
        const double x = std::stod(f[0]);
        const double a = std::stod(f[1]);
        CHECK(a > 0.0);
        if (rows == 0)
        {
            first_x = x;
            first_age = a;
        }
        last_x = x;
        last_age = a;
        ++rows;
    }
    CHECK(rows == 11);
    CHECK(first_x == 5.0);
    CHECK(last_x == 25.0);
    CHECK(last_age > first_age);  // taller forest is older

    // Baseline overrides shift the curve.
    RunConfig shifted = cfg;
    shifted.set("out_dir", out + "_shift");
    shifted.set("baseline.NDVI", "0.6");
    run_command("curves", shifted);
    CHECK(slurp(out + "_shift/curve.csv") != csv);
}
