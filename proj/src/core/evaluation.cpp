/******************************************************************************
 * Project:  standage
 * Purpose:  Accuracy assessment implementation.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace standage {

ReportRow rmse_md(const std::vector<EvalPair> &pairs, bool weighted,
                  const std::string &label)
{
    if (pairs.empty())
        throw ValidationError("accuracy metrics need at least one pair");

    double wsum = 0.0;
    if (weighted)
    {
        for (const EvalPair &p : pairs)
        {
            if (!(p.weight > 0.0))
                throw ValidationError(
                    "weighted metrics need positive weights, got " +
                    format_g(p.weight, 10));
            wsum += p.weight;
        }
    }
    else
    {
        wsum = static_cast<double>(pairs.size());
    }

    double se = 0.0, dev = 0.0, obs = 0.0;
    for (const EvalPair &p : pairs)
    {
        const double w = (weighted ? p.weight : 1.0) / wsum;
        const double d = p.observed - p.predicted;
        se += w * d * d;
        dev += w * d;
        obs += w * p.observed;
    }

    ReportRow row;
    row.label = label;
    row.n = pairs.size();
    row.weight_sum = wsum;
    row.rmse = std::sqrt(se);
    row.md = dev;
    row.mean_observed = obs;
    if (obs != 0.0)
    {
        row.rmse_pct = 100.0 * row.rmse / obs;
        row.md_pct = 100.0 * row.md / obs;
    }
    else
    {
        row.rmse_pct = std::numeric_limits<double>::quiet_NaN();
        row.md_pct = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

namespace {

// Sort key for class labels: trailing integer when present ("SI 14" ->
// ("SI", 14)), otherwise the bare label.
std::pair<std::string, long> label_key(const std::string &label)
{
    const auto pos = label.find_last_of(' ');
    if (pos != std::string::npos)
    {
        long v;
        if (parse_long(label.substr(pos + 1), v))
            return {label.substr(0, pos), v};
    }
    return {label, std::numeric_limits<long>::max()};
}

}  // namespace

EvaluationReport breakdown(const std::vector<EvalPair> &pairs, bool weighted)
{
    EvaluationReport report;
    std::map<std::string, std::vector<EvalPair>> by_label;
    for (const EvalPair &p : pairs)
        by_label[p.label].push_back(p);

    std::vector<std::string> labels;
    for (const auto &[label, group] : by_label)
        labels.push_back(label);
    std::sort(labels.begin(), labels.end(),
              [](const std::string &a, const std::string &b)
              { return label_key(a) < label_key(b); });

    for (const std::string &label : labels)
        report.classes.push_back(rmse_md(by_label[label], weighted, label));
    report.all = rmse_md(pairs, weighted, "All");
    return report;
}

void scatter_export(const std::vector<EvalPair> &pairs, const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ProcessingError("cannot open scatter file for writing: " + path);
    out << "observed,predicted,class,weight\n";
    for (const EvalPair &p : pairs)
        out << format_g(p.observed, 17) << ',' << format_g(p.predicted, 17)
            << ',' << p.label << ',' << format_g(p.weight, 17) << '\n';
    if (!out)
        throw ProcessingError("short write on scatter file: " + path);
}

namespace {

void report_row_text(std::ostringstream &os, const ReportRow &row)
{
    auto pct = [](double v)
    { return std::isnan(v) ? std::string("n/a") : format_g(v, 4) + "%"; };
    os << row.label << "\tn=" << row.n << "\tRMSE=" << format_g(row.rmse, 4)
       << "\tRMSE%=" << pct(row.rmse_pct) << "\tMD=" << format_g(row.md, 4)
       << "\tMD%=" << pct(row.md_pct)
       << "\tmean_obs=" << format_g(row.mean_observed, 4) << "\n";
}

}  // namespace

std::string report_text(const EvaluationReport &report)
{
    std::ostringstream os;
    for (const ReportRow &row : report.classes)
        report_row_text(os, row);
    report_row_text(os, report.all);
    return os.str();
}

std::string report_csv(const EvaluationReport &report)
{
    std::ostringstream os;
    os << "class,n,rmse_years,rmse_pct,md_years,md_pct,mean_observed,"
          "weight_sum\n";
    auto emit = [&os](const ReportRow &row)
    {
        auto num = [](double v)
        { return std::isnan(v) ? std::string("NA") : format_g(v, 17); };
        os << row.label << ',' << row.n << ',' << num(row.rmse) << ','
           << num(row.rmse_pct) << ',' << num(row.md) << ',' << num(row.md_pct)
           << ',' << num(row.mean_observed) << ',' << num(row.weight_sum)
           << '\n';
    };
    for (const ReportRow &row : report.classes)
        emit(row);
    emit(report.all);
    return os.str();
}

}  // namespace standage
