#pragma once

#include <span>
#include <utility>

namespace tfz {

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction
// with the symmetry switch at x = (a+1)/(a+b+2).
double reg_inc_beta(double a, double b, double x);

// Smallest x with I_x(a, b) >= p, bisected to 1e-12 in x.
double inv_reg_inc_beta(double a, double b, double p);

// Two-sided Student-t critical value t with P(|T_nu| <= t) = conf.
double student_t_critical(double nu, double conf);

double mean_of(std::span<const double> v);
double sample_sd(std::span<const double> v);

// (mean, half_width) of the confidence-conf t-interval; half_width = 0 and
// degenerate behavior for n < 2 is the caller's concern.
std::pair<double, double> mean_t_interval(std::span<const double> v, double conf);

}  // namespace tfz
