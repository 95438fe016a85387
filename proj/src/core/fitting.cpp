/******************************************************************************
 * Project:  standage
 * Purpose:  Fitting implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "core/stats.hpp"

namespace standage {

namespace {

double transform_age(double age, LinkFunction link)
{
    switch (link)
    {
        case LinkFunction::Log:
            return std::log(age);
        case LinkFunction::Sqrt:
            return std::sqrt(age);
        case LinkFunction::Identity:
            return age;
    }
    return age;
}

Eigen::MatrixXd design_matrix(const TrainingSet &data,
                              const std::vector<std::string> &names)
{
    const std::size_t n = data.rows.size();
    Eigen::MatrixXd X(n, names.size() + 1);
    for (std::size_t i = 0; i < n; ++i)
    {
        X(i, 0) = 1.0;
        for (std::size_t j = 0; j < names.size(); ++j)
        {
            const auto v = data.rows[i].predictors.resolve(names[j]);
            if (!v)
                throw ValidationError("training row " + std::to_string(i) +
                                      " cannot resolve predictor '" + names[j] +
                                      "'");
            X(i, j + 1) = *v;
        }
    }
    return X;
}

}  // namespace

double aic_value(double rss, std::size_t n, std::size_t n_coefficients)
{
    if (rss <= 0.0)
    {
        std::cerr << "warning: zero residual sum of squares, AIC pinned to "
                     "-inf\n";
        return -std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(n) * std::log(rss / static_cast<double>(n)) +
           2.0 * (static_cast<double>(n_coefficients) + 1.0);
}

FitSummary ols_fit(const TrainingSet &data, const std::vector<std::string> &names,
                   LinkFunction link)
{
    const std::size_t n = data.rows.size();
    const std::size_t ncoef = names.size() + 1;
    if (n < ncoef + 1)
        throw ValidationError("need at least " + std::to_string(ncoef + 1) +
                              " rows to fit " + std::to_string(ncoef) +
                              " coefficients, got " + std::to_string(n));
    {
        std::set<std::string> uniq(names.begin(), names.end());
        if (uniq.size() != names.size())
            throw ValidationError("duplicate predictor in fit request");
    }

    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double age = data.rows[i].age;
        if (!(age > 0.0) || !std::isfinite(age))
            throw ValidationError("training row " + std::to_string(i) +
                                  " has non-positive age " + format_g(age, 10));
        y(i) = transform_age(age, link);
    }
    const Eigen::MatrixXd X = design_matrix(data, names);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    const Eigen::MatrixXd &R = qr.matrixQR();  // upper triangle holds R
    const double r_max = std::fabs(R(0, 0));
    const double r_min = std::fabs(R(ncoef - 1, ncoef - 1));
    if (!(r_min > 0.0) || r_max / r_min > 1e12)
    {
        // Columns pivoted to the tail of R carry no independent signal;
        // report them by their original names.
        const auto perm = qr.colsPermutation().indices();
        std::string cols;
        const Eigen::Index rank = qr.rank();
        for (Eigen::Index j = rank; j < static_cast<Eigen::Index>(ncoef); ++j)
        {
            if (!cols.empty())
                cols += ", ";
            const Eigen::Index orig = perm(j);
            cols += (orig == 0) ? "(intercept)" : names[orig - 1];
        }
        if (cols.empty())
            cols = "(ill-conditioned design)";
        throw SingularDesignError("design matrix is singular or nearly so; "
                                  "collinear columns: " + cols);
    }

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double rss = resid.squaredNorm();
    const std::size_t df = n - ncoef;

    // (X'X)^-1 from the pivoted R factor: P R^-1 R^-T P'.
    const Eigen::MatrixXd Rtop =
        R.topLeftCorner(ncoef, ncoef).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        Rtop.triangularView<Eigen::Upper>().solve(
            Eigen::MatrixXd::Identity(ncoef, ncoef));
    const Eigen::MatrixXd M = Rinv * Rinv.transpose();
    const Eigen::MatrixXd P = qr.colsPermutation();
    const Eigen::MatrixXd XtX_inv = P * M * P.transpose();

    const double sigma2 = rss / static_cast<double>(df);

    FitSummary out;
    out.n = n;
    out.rss = rss;
    out.perfect_fit = rss <= 0.0;
    out.aic = aic_value(rss, n, ncoef);

    double tss = 0.0;
    const double ymean = y.mean();
    for (std::size_t i = 0; i < n; ++i)
        tss += (y(i) - ymean) * (y(i) - ymean);
    out.r2_adjusted =
        (tss > 0.0) ? 1.0 - sigma2 / (tss / static_cast<double>(n - 1)) : 0.0;

    auto stats_for = [&](std::size_t j, const std::string &label) -> TermStats
    {
        const double se = std::sqrt(std::max(0.0, sigma2 * XtX_inv(j, j)));
        const double t = (se > 0.0)
                             ? beta(j) / se
                             : std::numeric_limits<double>::infinity() *
                                   (beta(j) < 0 ? -1.0 : 1.0);
        const double p =
            (se > 0.0) ? student_t_two_sided_p(t, static_cast<double>(df)) : 0.0;
        return {label, beta(j), se, t, p};
    };

    out.intercept_stats = stats_for(0, "Intercept");
    for (std::size_t j = 0; j < names.size(); ++j)
        out.term_stats.push_back(stats_for(j + 1, names[j]));

    out.model.species = data.species;
    out.model.si = data.si;
    out.model.link = link;
    out.model.intercept = beta(0);
    for (std::size_t j = 0; j < names.size(); ++j)
        out.model.terms.push_back({names[j], beta(j + 1)});
    out.model.sigma = std::sqrt(sigma2);
    return out;
}

namespace {

// Candidate pool extension once bases are selected: squares and pairwise
// products of plain (underived) selected names.
void extend_pool(const std::vector<std::string> &selected,
                 const StepwiseOptions &opt, std::vector<std::string> &pool,
                 const std::vector<std::string> &candidates)
{
    if (!opt.squares && !opt.interactions)
        return;
    auto is_plain = [](const std::string &n)
    { return n.find('*') == std::string::npos; };
    auto known = [&](const std::string &n)
    {
        return std::find(selected.begin(), selected.end(), n) !=
                   selected.end() ||
               std::find(pool.begin(), pool.end(), n) != pool.end() ||
               std::find(candidates.begin(), candidates.end(), n) !=
                   candidates.end();
    };
    std::vector<std::string> plain;
    for (const auto &s : selected)
        if (is_plain(s) && (s.size() < 2 || s.back() != '2' ||
                            !std::any_of(selected.begin(), selected.end(),
                                         [&](const std::string &o)
                                         { return o + "2" == s; })))
            plain.push_back(s);

    if (opt.squares)
        for (const auto &s : plain)
        {
            const std::string sq = s + "2";
            if (!known(sq))
                pool.push_back(sq);
        }
    if (opt.interactions)
        for (std::size_t i = 0; i < plain.size(); ++i)
            for (std::size_t j = i + 1; j < plain.size(); ++j)
            {
                std::string a = plain[i], b = plain[j];
                if (b < a)
                    std::swap(a, b);
                const std::string inter = a + "*" + b;
                if (!known(inter))
                    pool.push_back(inter);
            }
}

}  // namespace

FitSummary stepwise_select(const TrainingSet &data,
                           const std::vector<std::string> &candidates,
                           LinkFunction link, const StepwiseOptions &opt)
{
    const std::string kMandatory = "h95_first";
    if (std::find(candidates.begin(), candidates.end(), kMandatory) ==
        candidates.end())
        throw ValidationError("stepwise selection requires '" + kMandatory +
                              "' among the candidates");

    std::vector<std::string> selected = {kMandatory};
    std::vector<std::string> pool;
    for (const auto &c : candidates)
        if (c != kMandatory &&
            std::find(pool.begin(), pool.end(), c) == pool.end())
            pool.push_back(c);
    extend_pool(selected, opt, pool, candidates);

    auto try_fit = [&](const std::vector<std::string> &names)
        -> std::optional<FitSummary>
    {
        try
        {
            return ols_fit(data, names, link);
        }
        catch (const SingularDesignError &)
        {
            return std::nullopt;
        }
    };

    FitSummary cur = ols_fit(data, selected, link);
    std::vector<SelectionStep> trace;
    std::size_t protection_hits = 0;
    trace.push_back({'+', kMandatory, cur.aic});

    while (true)
    {
        double best_aic = cur.aic - opt.aic_epsilon;
        std::optional<FitSummary> best_fit;
        char best_action = 0;
        std::string best_name;
        std::vector<std::string> best_selected;

        for (const std::string &name : pool)
        {
            std::vector<std::string> names = selected;
            names.push_back(name);
            if (data.rows.size() < names.size() + 2)
                continue;
            const auto fit = try_fit(names);
            if (fit && fit->aic < best_aic)
            {
                best_aic = fit->aic;
                best_fit = fit;
                best_action = '+';
                best_name = name;
                best_selected = std::move(names);
            }
        }
        for (const std::string &name : selected)
        {
            std::vector<std::string> names;
            for (const auto &s : selected)
                if (s != name)
                    names.push_back(s);
            const auto fit = try_fit(names);
            if (fit && fit->aic < best_aic)
            {
                if (name == kMandatory)
                {
                    ++protection_hits;
                    continue;
                }
                best_aic = fit->aic;
                best_fit = fit;
                best_action = '-';
                best_name = name;
                best_selected = std::move(names);
            }
        }

        if (!best_fit)
            break;
        if (best_action == '+')
            pool.erase(std::find(pool.begin(), pool.end(), best_name));
        else
            pool.push_back(best_name);
        selected = std::move(best_selected);
        cur = std::move(*best_fit);
        trace.push_back({best_action, best_name, cur.aic});
        extend_pool(selected, opt, pool, candidates);
        if (cur.perfect_fit)
            break;
    }

    // p-value pruning: repeatedly drop the weakest term at or above the
    // threshold.  The mandatory term enjoys no protection here.
    while (!selected.empty())
    {
        const TermStats *worst = nullptr;
        for (const TermStats &t : cur.term_stats)
            if (t.p_value >= opt.p_threshold &&
                (!worst || t.p_value > worst->p_value))
                worst = &t;
        if (!worst)
            break;
        const std::string name = worst->name;
        selected.erase(std::find(selected.begin(), selected.end(), name));
        if (selected.empty())
        {
            cur = ols_fit(data, {}, link);
            trace.push_back({'-', name, cur.aic});
            break;
        }
        cur = ols_fit(data, selected, link);
        trace.push_back({'-', name, cur.aic});
    }

    cur.trace = std::move(trace);
    cur.protection_hits = protection_hits;
    return cur;
}

std::vector<LinkFit> compare_links(const TrainingSet &data,
                                   const std::vector<std::string> &names)
{
    std::vector<LinkFit> out;
    for (const LinkFunction link :
         {LinkFunction::Log, LinkFunction::Sqrt, LinkFunction::Identity})
    {
        FitSummary fit = ols_fit(data, names, link);
        double se_sum = 0.0, dev_sum = 0.0;
        for (const TrainingRow &row : data.rows)
        {
            const double pred = predict_age(fit.model, row.predictors);
            const double d = row.age - pred;
            se_sum += d * d;
            dev_sum += d;
        }
        const double n = static_cast<double>(data.rows.size());
        out.push_back({link, std::sqrt(se_sum / n), dev_sum / n,
                       std::move(fit)});
    }
    return out;
}

const LinkFit &best_link(const std::vector<LinkFit> &fits)
{
    if (fits.empty())
        throw ValidationError("best_link: no fits");
    const LinkFit *best = &fits[0];
    for (const LinkFit &f : fits)
        if (f.rmse < best->rmse)
            best = &f;
    return *best;
}

std::vector<std::pair<std::string, double>> standardized_importance(
    const FitSummary &fit, const TrainingSet &data)
{
    const std::size_t n = data.rows.size();
    if (n < 2)
        throw ValidationError("standardized importance needs >= 2 rows");

    std::vector<std::string> names;
    for (const ModelTerm &t : fit.model.terms)
        names.push_back(t.name);

    // Z-score each materialized column; constant columns are skipped.
    std::vector<std::string> kept;
    TrainingSet zdata;
    zdata.species = data.species;
    zdata.si = data.si;
    zdata.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        zdata.rows[i].age = data.rows[i].age;

    for (const std::string &name : names)
    {
        std::vector<double> col(n);
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto v = data.rows[i].predictors.resolve(name);
            if (!v)
                throw ValidationError("cannot resolve predictor '" + name +
                                      "' for importance ranking");
            col[i] = *v;
            mean += *v;
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (const double v : col)
            ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 0.0))
        {
            std::cerr << "warning: predictor '" << name
                      << "' is constant; skipped in importance ranking\n";
            continue;
        }
        kept.push_back(name);
        for (std::size_t i = 0; i < n; ++i)
            zdata.rows[i].predictors.set(name, (col[i] - mean) / sd);
    }

    std::vector<std::pair<std::string, double>> out;
    if (kept.empty())
        return out;
    const FitSummary zfit = ols_fit(zdata, kept, fit.model.link);
    for (const ModelTerm &t : zfit.model.terms)
        out.emplace_back(t.name, std::fabs(t.coefficient));
    std::sort(out.begin(), out.end(),
              [](const auto &a, const auto &b)
              {
                  if (a.second != b.second)
                      return a.second > b.second;
                  return a.first < b.first;
              });
    return out;
}

std::string fit_report_text(const std::vector<FitSummary> &fits)
{
    std::ostringstream os;
    for (const FitSummary &f : fits)
    {
        os << "Model for SI " << f.model.si << " (" <<
            species_name(f.model.species) << ")\n";
        os << "Variable\tEstimate\tStd. Error\tt-Value\tp-value\n";
        auto row = [&os](const TermStats &t)
        {
            os << t.name << '\t' << format_g(t.estimate, 4) << '\t'
               << format_g(t.std_error, 4) << '\t' << format_g(t.t_value, 4)
               << '\t';
            if (t.p_value < 0.001)
                os << "< 0.001";
            else
                os << format_g(t.p_value, 2);
            os << '\n';
        };
        row(f.intercept_stats);
        for (const TermStats &t : f.term_stats)
            row(t);
        os << "Residual standard error (" << link_name(f.model.link)
           << " scale): " << format_g(f.model.sigma, 3) << "\n";
        os << "Adjusted R2: " << format_g(f.r2_adjusted, 3) << "  n: " << f.n
           << "  AIC: " << format_g(f.aic, 6) << "\n\n";
    }
    return os.str();
}

}  // namespace standage
