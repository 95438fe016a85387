/******************************************************************************
 * Project:  standage
 * Purpose:  Incomplete beta and Student-t tail probabilities.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#include "core/stats.hpp"

#include <cmath>
#include <limits>

#include "core/common.hpp"

namespace standage {

namespace {

// Continued fraction for the incomplete beta (Lentz's method with the
// usual even/odd coefficient pairs).
double beta_cf(double a, double b, double x)
{
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m)
    {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return h;
    }
    throw ProcessingError("incomplete beta continued fraction did not "
                          "converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw ValidationError("incomplete beta requires a, b > 0");
    if (!(x >= 0.0 && x <= 1.0))
        throw ValidationError("incomplete beta requires x in [0, 1]");
    if (x == 0.0)
        return 0.0;
    if (x == 1.0)
        return 1.0;

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                            std::lgamma(b) + a * std::log(x) +
                            b * std::log1p(-x);
    const double front = std::exp(ln_front);
    // Use the symmetric form on whichever side converges fastest.
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df)
{
    if (!(df > 0.0))
        throw ValidationError("t distribution requires df > 0");
    if (!std::isfinite(t))
        return std::isnan(t) ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    // P(|T| >= t) = I_{df/(df+t^2)}(df/2, 1/2)
    const double x = df / (df + t * t);
    return incomplete_beta(0.5 * df, 0.5, x);
}

}  // namespace standage
