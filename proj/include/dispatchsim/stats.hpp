#pragma once

#include <span>

#include "dispatchsim/dispatch.hpp"

namespace dispatchsim {

double mean(std::span<const double> xs);
// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> xs);

// Regularized incomplete beta I_x(a, b), evaluated by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// Two-tailed p-value of a t statistic with `df` degrees of freedom.
double t_two_tailed_p(double t, double df);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
};

// t = (mean(a) - mean(b)) / se, so a larger mean in `a` gives t > 0.
// Welch: unequal variances, Welch-Satterthwaite df.
// Throws DegenerateInputError if a sample has fewer than two values or zero variance.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);
// Pooled-variance (Student) form, kept for sensitivity checks.
TTestResult student_t_test(std::span<const double> a, std::span<const double> b);
// Paired test on a[i] - b[i].
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// 1-Wasserstein distance between two empirical distributions.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

double choice_difference_pct(std::span<const IncidentPair> pairs);

}  // namespace dispatchsim
