/******************************************************************************
 * Project:  standage
 * Purpose:  Distribution functions needed by the regression code.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

namespace standage {

/** Regularized incomplete beta I_x(a, b) via the continued-fraction
 *  expansion (modified Lentz).  a, b > 0, x in [0, 1]. */
double incomplete_beta(double a, double b, double x);

/** Two-sided p-value of a Student-t statistic with df degrees of
 *  freedom. */
double student_t_two_sided_p(double t, double df);

}  // namespace standage
