#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/fitting.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

using namespace standage;

namespace {

TrainingSet frozen_set()
{
    const double x1[] = {10.0, 12.0, 9.0, 15.0, 11.0, 14.0, 8.0, 13.0};
    const double x2[] = {0.62, 0.70, 0.55, 0.85, 0.66, 0.80, 0.50, 0.74};
    const double y[] = {42.0, 50.0, 38.0, 65.0, 45.0, 60.0, 33.0, 55.0};
    TrainingSet d;
    d.species = Species::Spruce;
    d.si = 14;
    for (int i = 0; i < 8; ++i)
    {
        TrainingRow r;
        r.age = y[i];
        r.predictors.set("h95_first", x1[i]);
        r.predictors.set("cc2", x2[i]);
        d.rows.push_back(std::move(r));
    }
    return d;
}

const TermStats *stat_for(const FitSummary &f, const std::string &name)
{
    for (const TermStats &t : f.term_stats)
        if (t.name == name)
            return &t;
    return nullptr;
}

bool has_term(const AgeModel &m, const std::string &name)
{
    return std::any_of(m.terms.begin(), m.terms.end(),
                       [&](const ModelTerm &t) { return t.name == name; });
}

}  // namespace

TEST_CASE("incomplete_beta: frozen references")
{
    CHECK(incomplete_beta(0.5, 0.5, 0.3) ==
          doctest::Approx(0.36901011956554536).epsilon(1e-12));
    CHECK(incomplete_beta(2.0, 3.0, 0.4) ==
          doctest::Approx(0.5247999999999999).epsilon(1e-12));
    CHECK(incomplete_beta(5.0, 1.0, 0.9) ==
          doctest::Approx(0.5904900000000001).epsilon(1e-12));
    CHECK(incomplete_beta(4.0, 7.0, 0.15) ==
          doctest::Approx(0.049969798878515624).epsilon(1e-12));
    CHECK(incomplete_beta(10.0, 10.0, 0.5) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("student_t_two_sided_p: frozen references and symmetry")
{
    CHECK(student_t_two_sided_p(2.0, 10) ==
          doctest::Approx(0.07338803477074039).epsilon(1e-12));
    CHECK(student_t_two_sided_p(1.0, 1) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(student_t_two_sided_p(2.5, 3) ==
          doctest::Approx(0.08770664700806555).epsilon(1e-12));
    CHECK(student_t_two_sided_p(0.0, 7) == 1.0);
    CHECK(student_t_two_sided_p(4.2, 25) ==
          doctest::Approx(0.00029600389893005646).epsilon(1e-11));
    CHECK(student_t_two_sided_p(12.0, 2) ==
          doctest::Approx(0.00687293367715846).epsilon(1e-11));
    CHECK(student_t_two_sided_p(-2.0, 10) ==
          student_t_two_sided_p(2.0, 10));
}

TEST_CASE("aic_value: hand case and perfect-fit convention")
{
    // n*ln(rss/n) + 2*(k+1): the residual variance counts as a parameter.
    CHECK(aic_value(2.0, 10, 3) ==
          doctest::Approx(10.0 * std::log(0.2) + 8.0).epsilon(1e-12));
    CHECK(std::isinf(aic_value(0.0, 10, 3)));
    CHECK(aic_value(0.0, 10, 3) < 0.0);
    // Adding a coefficient at fixed rss costs exactly 2.
    CHECK(aic_value(2.0, 10, 4) - aic_value(2.0, 10, 3) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("ols_fit: matches an external reference fit")
{
    const TrainingSet d = frozen_set();

    SUBCASE("identity link, full inference")
    {
        const FitSummary f = ols_fit(d, {"h95_first", "cc2"},
                                     LinkFunction::Identity);
        CHECK(f.n == 8);
        CHECK(f.model.intercept ==
              doctest::Approx(-2.065533980583971).epsilon(1e-8));
        REQUIRE(f.model.terms.size() == 2);
        CHECK(f.model.terms[0].name == "h95_first");
        CHECK(f.model.terms[0].coefficient ==
              doctest::Approx(4.99757281553342).epsilon(1e-8));
        CHECK(f.model.terms[1].name == "cc2");
        CHECK(f.model.terms[1].coefficient ==
              doctest::Approx(-10.19417475726991).epsilon(1e-8));

        CHECK(f.intercept_stats.std_error ==
              doctest::Approx(4.609231481045065).epsilon(1e-8));
        CHECK(f.intercept_stats.t_value ==
              doctest::Approx(-0.44812979974606226).epsilon(1e-8));
        CHECK(f.intercept_stats.p_value ==
              doctest::Approx(0.6728102007871112).epsilon(1e-8));

        const TermStats *h = stat_for(f, "h95_first");
        REQUIRE(h != nullptr);
        CHECK(h->std_error == doctest::Approx(1.8349357244906899).epsilon(1e-8));
        CHECK(h->t_value == doctest::Approx(2.723568323855355).epsilon(1e-8));
        CHECK(h->p_value == doctest::Approx(0.04159768808771907).epsilon(1e-8));

        const TermStats *c = stat_for(f, "cc2");
        REQUIRE(c != nullptr);
        CHECK(c->std_error == doctest::Approx(37.50200296278705).epsilon(1e-8));
        CHECK(c->p_value == doctest::Approx(0.7966196758688265).epsilon(1e-8));

        CHECK(f.rss == doctest::Approx(3.449029126213566).epsilon(1e-8));
        // Reference ln-likelihood AIC shifted to this library's
        // n*ln(rss/n) + 2*(k+1) convention (k = 3 coefficients).
        CHECK(f.aic == doctest::Approx(-0.7307901034581539 + 2.0).epsilon(1e-7));
        CHECK(f.r2_adjusted ==
              doctest::Approx(0.9943458538914531).epsilon(1e-8));
        CHECK(!f.perfect_fit);
        CHECK(f.model.link == LinkFunction::Identity);
    }
    SUBCASE("log link transforms the response and sets sigma")
    {
        const FitSummary f = ols_fit(d, {"h95_first", "cc2"},
                                     LinkFunction::Log);
        CHECK(f.model.intercept ==
              doctest::Approx(2.6977435949775175).epsilon(1e-8));
        CHECK(f.model.terms[0].coefficient ==
              doctest::Approx(0.06385726896585844).epsilon(1e-8));
        CHECK(f.model.terms[1].coefficient ==
              doctest::Approx(0.6290952670379693).epsilon(1e-8));
        CHECK(f.model.sigma ==
              doctest::Approx(0.018899714509285986).epsilon(1e-8));
    }
}

TEST_CASE("ols_fit: residuals are orthogonal to the design")
{
    Rng rng(501);
    TrainingSet d;
    for (int i = 0; i < 60; ++i)
    {
        TrainingRow r;
        const double h = rng.uniform(5.0, 25.0);
        const double cc = rng.uniform(0.2, 0.95);
        const double dtm = rng.uniform(50.0, 600.0);
        r.age = 30.0 + 2.0 * h - 10.0 * cc + 0.01 * dtm + rng.normal(0.0, 3.0);
        r.predictors.set("h95_first", h);
        r.predictors.set("cc2", cc);
        r.predictors.set("DTM", dtm);
        d.rows.push_back(std::move(r));
    }
    const std::vector<std::string> names = {"h95_first", "cc2", "DTM"};
    const FitSummary f = ols_fit(d, names, LinkFunction::Identity);

    // Residual vector recomputed from the published coefficients.
    double dot[4] = {};
    double ynorm = 0.0, xmax = 1.0;
    for (const TrainingRow &r : d.rows)
    {
        double pred = f.model.intercept;
        for (const ModelTerm &t : f.model.terms)
            pred += t.coefficient * *r.predictors.resolve(t.name);
        const double res = r.age - pred;
        dot[0] += res;
        for (int j = 0; j < 3; ++j)
        {
            const double v = *r.predictors.resolve(names[j]);
            dot[j + 1] += res * v;
            xmax = std::max(xmax, std::abs(v));
        }
        ynorm += r.age * r.age;
    }
    const double bound = 1e-8 * xmax * std::sqrt(ynorm);
    for (int j = 0; j < 4; ++j)
        CHECK(std::abs(dot[j]) < bound);
}

TEST_CASE("ols_fit: validation and degeneracy")
{
    TrainingSet d = frozen_set();

    SUBCASE("too few rows")
    {
        d.rows.resize(3);
        CHECK_THROWS_AS(ols_fit(d, {"h95_first", "cc2"},
                                LinkFunction::Identity),
                        ValidationError);
    }
    SUBCASE("collinear columns are named")
    {
        for (TrainingRow &r : d.rows)
            r.predictors.set("twice", 2.0 * r.predictors.get("h95_first"));
        try
        {
            ols_fit(d, {"h95_first", "twice"}, LinkFunction::Identity);
            FAIL("expected SingularDesignError");
        }
        catch (const SingularDesignError &e)
        {
            const std::string what = e.what();
            const bool named =
                what.find("twice") != std::string::npos ||
                what.find("h95_first") != std::string::npos;
            CHECK_MESSAGE(named, what);
        }
    }
    SUBCASE("unresolvable predictor is a validation error")
    {
        CHECK_THROWS_AS(ols_fit(d, {"NDVI"}, LinkFunction::Identity),
                        ValidationError);
    }
    SUBCASE("log link requires positive ages")
    {
        d.rows[0].age = 0.0;
        CHECK_THROWS_AS(ols_fit(d, {"h95_first"}, LinkFunction::Log),
                        ValidationError);
    }
    SUBCASE("intercept-only fit returns the mean response")
    {
        const FitSummary f = ols_fit(d, {}, LinkFunction::Identity);
        double mean = 0.0;
        for (const TrainingRow &r : d.rows)
            mean += r.age;
        mean /= static_cast<double>(d.rows.size());
        CHECK(f.model.intercept == doctest::Approx(mean).epsilon(1e-12));
        CHECK(f.model.terms.empty());
    }
    SUBCASE("exact linear data is recovered to machine precision")
    {
        for (TrainingRow &r : d.rows)
            r.age = 3.0 + 2.0 * r.predictors.get("h95_first");
        const FitSummary f = ols_fit(d, {"h95_first"},
                                     LinkFunction::Identity);
        CHECK(f.model.intercept == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(f.model.terms[0].coefficient ==
              doctest::Approx(2.0).epsilon(1e-9));
        CHECK(f.rss < 1e-10);
        CHECK(f.aic < -100.0);  // a numerically perfect fit dominates
    }
}

namespace {

/* Ages from a known log-linear truth over four predictors plus noise
 * predictors that carry no signal. */
TrainingSet synthetic_training(std::uint64_t seed, int n, double noise_sd)
{
    Rng rng(seed);
    TrainingSet d;
    d.species = Species::Spruce;
    d.si = 14;
    for (int i = 0; i < n; ++i)
    {
        TrainingRow r;
        const double h = rng.uniform(4.0, 28.0);
        const double dtm = rng.uniform(50.0, 600.0);
        const double cc = rng.uniform(0.2, 0.95);
        const double lat = rng.uniform(59.0, 66.0);
        const double eta = 2.0 + 0.09 * h + 0.0012 * dtm - 0.6 * cc;
        r.age = std::exp(eta + rng.normal(0.0, noise_sd));
        r.predictors.set("h95_first", h);
        r.predictors.set("DTM", dtm);
        r.predictors.set("cc2", cc);
        r.predictors.set("Lat", lat);
        r.predictors.set("slope", rng.uniform(0.0, 20.0));
        r.predictors.set("diffT", rng.normal(0.0, 1.0));
        d.rows.push_back(std::move(r));
    }
    return d;
}

const std::vector<std::string> kCandidates = {"h95_first", "DTM", "cc2",
                                              "Lat", "slope", "diffT"};

}  // namespace

TEST_CASE("stepwise_select: recovers a strong truth and prunes noise")
{
    const TrainingSet d = synthetic_training(2024, 400, 0.05);
    const FitSummary f = stepwise_select(d, kCandidates, LinkFunction::Log);

    CHECK(has_term(f.model, "h95_first"));
    CHECK(has_term(f.model, "DTM"));
    CHECK(has_term(f.model, "cc2"));
    // Every surviving term is significant.
    for (const TermStats &t : f.term_stats)
        CHECK(t.p_value < 0.05);
    // The trace only contains adds and drops and starts by adding the
    // mandatory height term.
    REQUIRE(!f.trace.empty());
    CHECK(f.trace.front().action == '+');
    CHECK(f.trace.front().name == "h95_first");
    for (const SelectionStep &s : f.trace)
        CHECK((s.action == '+' || s.action == '-'));
    CHECK(f.model.link == LinkFunction::Log);
    CHECK(f.model.species == Species::Spruce);
    CHECK(f.model.si == 14);
}

TEST_CASE("stepwise_select: squares option offers curvature terms")
{
    Rng rng(77);
    TrainingSet d;
    for (int i = 0; i < 300; ++i)
    {
        TrainingRow r;
        const double h = rng.uniform(2.0, 30.0);
        r.age = 5.0 + 4.0 * h - 0.09 * h * h + rng.normal(0.0, 0.5);
        r.predictors.set("h95_first", h);
        r.predictors.set("cc2", rng.uniform(0.0, 1.0));
        d.rows.push_back(std::move(r));
    }
    StepwiseOptions opt;
    opt.squares = true;
    const FitSummary f = stepwise_select(d, {"h95_first", "cc2"},
                                         LinkFunction::Identity, opt);
    CHECK(has_term(f.model, "h95_first"));
    CHECK(has_term(f.model, "h95_first2"));
    const TermStats *sq = stat_for(f, "h95_first2");
    REQUIRE(sq != nullptr);
    CHECK(sq->estimate == doctest::Approx(-0.09).epsilon(0.15));
}

TEST_CASE("stepwise_select: interactions option offers product terms")
{
    Rng rng(78);
    TrainingSet d;
    for (int i = 0; i < 300; ++i)
    {
        TrainingRow r;
        const double h = rng.uniform(2.0, 30.0);
        const double cc = rng.uniform(0.1, 1.0);
        r.age = 10.0 + 1.0 * h + 2.5 * h * cc + rng.normal(0.0, 0.5);
        r.predictors.set("h95_first", h);
        r.predictors.set("cc2", cc);
        d.rows.push_back(std::move(r));
    }
    StepwiseOptions opt;
    opt.interactions = true;
    const FitSummary f = stepwise_select(d, {"h95_first", "cc2"},
                                         LinkFunction::Identity, opt);
    const bool product = has_term(f.model, "h95_first*cc2") ||
                         has_term(f.model, "cc2*h95_first");
    CHECK(product);
}

TEST_CASE("stepwise_select: mandatory term is protected from AIC drops but "
          "not from pruning")
{
    // Age depends only on DTM; the height term carries nothing.
    Rng rng(99);
    TrainingSet d;
    for (int i = 0; i < 200; ++i)
    {
        TrainingRow r;
        const double dtm = rng.uniform(50.0, 600.0);
        r.age = 20.0 + 0.1 * dtm + rng.normal(0.0, 1.0);
        r.predictors.set("h95_first", rng.uniform(5.0, 25.0));
        r.predictors.set("DTM", dtm);
        d.rows.push_back(std::move(r));
    }
    const FitSummary f = stepwise_select(d, {"h95_first", "DTM"},
                                         LinkFunction::Identity);
    CHECK(has_term(f.model, "DTM"));
    // The useless mandatory term is pruned by p-value at the end.
    CHECK(!has_term(f.model, "h95_first"));
    CHECK(f.protection_hits >= 1);
}

TEST_CASE("stepwise_select: singular candidate adds are skipped")
{
    Rng rng(123);
    TrainingSet d;
    for (int i = 0; i < 100; ++i)
    {
        TrainingRow r;
        const double h = rng.uniform(5.0, 25.0);
        r.age = 10.0 + 2.0 * h + rng.normal(0.0, 1.0);
        r.predictors.set("h95_first", h);
        r.predictors.set("clone", 2.0 * h);  // exactly collinear
        d.rows.push_back(std::move(r));
    }
    const FitSummary f = stepwise_select(d, {"h95_first", "clone"},
                                         LinkFunction::Identity);
    CHECK(has_term(f.model, "h95_first"));
    CHECK(!has_term(f.model, "clone"));
}

TEST_CASE("compare_links: log-generated data prefers the log link")
{
    const TrainingSet d = synthetic_training(31337, 300, 0.25);
    const auto fits = compare_links(d, {"h95_first", "DTM", "cc2"});
    REQUIRE(fits.size() == 3);
    CHECK(fits[0].link == LinkFunction::Log);
    CHECK(fits[1].link == LinkFunction::Sqrt);
    CHECK(fits[2].link == LinkFunction::Identity);
    for (const LinkFit &lf : fits)
        CHECK(lf.rmse > 0.0);
    CHECK(best_link(fits).link == LinkFunction::Log);
}

TEST_CASE("standardized_importance: unit changes do not reorder predictors")
{
    TrainingSet d = synthetic_training(555, 300, 0.10);
    const std::vector<std::string> names = {"h95_first", "DTM", "cc2"};
    const FitSummary f = ols_fit(d, names, LinkFunction::Log);
    const auto imp = standardized_importance(f, d);
    REQUIRE(imp.size() == 3);
    // Descending magnitudes.
    for (std::size_t i = 1; i < imp.size(); ++i)
        CHECK(imp[i - 1].second >= imp[i].second);

    // Rescale DTM into kilometers: same data, same importance.
    TrainingSet scaled = d;
    for (TrainingRow &r : scaled.rows)
        r.predictors.set("DTM", r.predictors.get("DTM") / 1000.0);
    const FitSummary f2 = ols_fit(scaled, names, LinkFunction::Log);
    const auto imp2 = standardized_importance(f2, scaled);
    REQUIRE(imp2.size() == 3);
    for (std::size_t i = 0; i < imp.size(); ++i)
    {
        CHECK(imp[i].first == imp2[i].first);
        CHECK(imp[i].second == doctest::Approx(imp2[i].second).epsilon(1e-9));
    }
}

TEST_CASE("standardized_importance: constant predictors are skipped")
{
    TrainingSet d = frozen_set();
    for (TrainingRow &r : d.rows)
        r.predictors.set("flat", 1.0);
    const FitSummary f = ols_fit(d, {"h95_first"}, LinkFunction::Identity);
    FitSummary with_flat = f;
    with_flat.model.terms.push_back({"flat", 0.0});
    const auto imp = standardized_importance(with_flat, d);
    for (const auto &[name, mag] : imp)
        CHECK(name != "flat");
}

TEST_CASE("fit_report_text: one block per fitted model")
{
    const TrainingSet d = frozen_set();
    const FitSummary f = ols_fit(d, {"h95_first", "cc2"},
                                 LinkFunction::Log);
    const std::string text = fit_report_text({f});
    CHECK(text.find("Model for SI 14") != std::string::npos);
    CHECK(text.find("Variable\tEstimate\tStd. Error\tt-Value\tp-value")
          != std::string::npos);
    CHECK(text.find("h95_first") != std::string::npos);
    CHECK(text.find("Residual standard error") != std::string::npos);
}
