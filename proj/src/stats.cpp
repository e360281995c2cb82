#include "dispatchsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dispatchsim/error.hpp"

namespace dispatchsim {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw DegenerateInputError("mean of an empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw DegenerateInputError("variance needs at least two values");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    return h;
}

void require_spread(std::span<const double> xs, const char* which) {
    if (xs.size() < 2) {
        throw DegenerateInputError(std::string("t-test: sample ") + which + " needs at least two values");
    }
    if (sample_variance(xs) == 0.0) {
        throw DegenerateInputError(std::string("t-test: sample ") + which + " has zero variance");
    }
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DegenerateInputError("incomplete beta: shape parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_two_tailed_p(double t, double df) {
    if (!(df > 0.0)) throw DegenerateInputError("t distribution needs positive degrees of freedom");
    if (std::isinf(t)) return 0.0;
    const double p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return std::clamp(p, 0.0, 1.0);
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    require_spread(a, "a");
    require_spread(b, "b");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_variance(a) / na;
    const double vb = sample_variance(b) / nb;
    TTestResult r;
    r.t = (mean(a) - mean(b)) / std::sqrt(va + vb);
    r.df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    r.p = t_two_tailed_p(r.t, r.df);
    return r;
}

TTestResult student_t_test(std::span<const double> a, std::span<const double> b) {
    require_spread(a, "a");
    require_spread(b, "b");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double pooled = ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
    TTestResult r;
    r.t = (mean(a) - mean(b)) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
    r.df = na + nb - 2.0;
    r.p = t_two_tailed_p(r.t, r.df);
    return r;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DegenerateInputError("paired t-test: samples differ in length");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    require_spread(d, "a - b");
    const double n = static_cast<double>(d.size());
    TTestResult r;
    r.t = mean(d) / std::sqrt(sample_variance(d) / n);
    r.df = n - 1.0;
    r.p = t_two_tailed_p(r.t, r.df);
    return r;
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DegenerateInputError("Wasserstein distance needs non-empty samples");
    std::vector<double> xa(a.begin(), a.end());
    std::vector<double> xb(b.begin(), b.end());
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    const double na = static_cast<double>(xa.size());
    const double nb = static_cast<double>(xb.size());

    if (xa.size() == xb.size()) {
        double sum = 0.0;
        for (std::size_t k = 0; k < xa.size(); ++k) sum += std::fabs(xa[k] - xb[k]);
        return sum / na;
    }

    // Integrate |F_a - F_b| between consecutive breakpoints of the merged support.
    std::size_t i = 0, j = 0;
    double prev = std::min(xa.front(), xb.front());
    double total = 0.0;
    while (i < xa.size() || j < xb.size()) {
        const double next = (j == xb.size() || (i < xa.size() && xa[i] <= xb[j])) ? xa[i] : xb[j];
        const double fa = static_cast<double>(i) / na;
        const double fb = static_cast<double>(j) / nb;
        total += std::fabs(fa - fb) * (next - prev);
        while (i < xa.size() && xa[i] == next) ++i;
        while (j < xb.size() && xb[j] == next) ++j;
        prev = next;
    }
    return total;
}

double choice_difference_pct(std::span<const IncidentPair> pairs) {
    if (pairs.empty()) throw DegenerateInputError("choice difference of an empty set of pairs");
    const auto differs = std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.choice_differs; });
    return 100.0 * static_cast<double>(differs) / static_cast<double>(pairs.size());
}

}  // namespace dispatchsim
