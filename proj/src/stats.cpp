#include "mopp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace mopp {

namespace {

// Series expansion of P(a, x), converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction (modified Lentz) for Q(a, x), x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi_squared_cdf(double x, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("chi_squared_cdf: dof must be positive");
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * dof, 0.5 * x);
}

double poisson_pmf(std::uint64_t k, double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson_pmf: mean must be nonnegative");
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

double poisson_cdf(std::uint64_t k, double mean) {
    double acc = 0.0;
    for (std::uint64_t j = 0; j <= k; ++j) acc += poisson_pmf(j, mean);
    return std::min(acc, 1.0);
}

std::uint64_t poisson_quantile(double mean, double prob) {
    if (!(prob >= 0.0 && prob < 1.0 + 1e-15))
        throw std::invalid_argument("poisson_quantile: prob must be in [0, 1)");
    double acc = 0.0;
    std::uint64_t k = 0;
    const std::uint64_t cap = 1000 + static_cast<std::uint64_t>(20.0 * mean);
    for (;;) {
        acc += poisson_pmf(k, mean);
        if (acc >= prob || k >= cap) return k;
        ++k;
    }
}

GofResult poisson_chi_square(std::span<const std::uint64_t> counts, double mean) {
    if (counts.empty()) throw std::invalid_argument("poisson_chi_square: no counts");
    const double n = static_cast<double>(counts.size());

    std::uint64_t kmax = 0;
    for (std::uint64_t c : counts) kmax = std::max(kmax, c);
    std::vector<double> observed(kmax + 1, 0.0);
    for (std::uint64_t c : counts) observed[c] += 1.0;

    // Walk k in order, merging adjacent cells until expected mass >= 5.
    // The final cell absorbs the pmf tail beyond kmax.
    GofResult result;
    double obs_acc = 0.0;
    double exp_acc = 0.0;
    double pending_obs = 0.0;
    double pending_exp = 0.0;
    std::vector<std::pair<double, double>> cells;  // (observed, expected)
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        obs_acc += observed[k];
        exp_acc += n * poisson_pmf(k, mean);
        if (exp_acc >= 5.0) {
            cells.emplace_back(obs_acc, exp_acc);
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    pending_obs = obs_acc;
    pending_exp = exp_acc + n * (1.0 - poisson_cdf(kmax, mean));
    if (cells.empty() || pending_exp >= 5.0) {
        cells.emplace_back(pending_obs, pending_exp);
    } else {
        cells.back().first += pending_obs;
        cells.back().second += pending_exp;
    }

    result.bins = cells.size();
    if (cells.size() <= 1) {
        result.statistic = 0.0;
        result.p_value = 1.0;
        return result;
    }
    double stat = 0.0;
    for (const auto& [obs, exp] : cells) {
        const double d = obs - exp;
        stat += d * d / exp;
    }
    result.statistic = stat;
    result.p_value = 1.0 - chi_squared_cdf(stat, static_cast<double>(cells.size() - 1));
    return result;
}

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: no values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    Summary s;
    s.n = sorted.size();
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n >= 2) {
        double ss = 0.0;
        for (double v : sorted) {
            const double d = v - s.mean;
            ss += d * d;
        }
        s.variance = ss / static_cast<double>(s.n - 1);
        s.std_error = std::sqrt(s.variance / static_cast<double>(s.n));
    }
    return s;
}

}  // namespace mopp
