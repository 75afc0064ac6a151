#include "testmend/eval/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "testmend/core/errors.hpp"

namespace testmend {

namespace {

void require_samples(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw InvalidState("Mann-Whitney U needs two non-empty samples");
}

// Slack for comparing statistics that are multiples of 0.5.
constexpr double tolerance = 1e-9;

} // namespace

double mwu_statistic(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0;
    for (double x : a) {
        for (double y : b) {
            if (x > y) u += 1;
            else if (x == y) u += 0.5;
        }
    }
    return u;
}

double vargha_delaney_a(const std::vector<double>& a, const std::vector<double>& b) {
    require_samples(a, b);
    return mwu_statistic(a, b) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double mwu_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
    require_samples(a, b);
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size();
    const std::size_t na = a.size();
    const double mean = static_cast<double>(na) * static_cast<double>(b.size()) / 2.0;
    const double observed = std::fabs(mwu_statistic(a, b) - mean);

    // Walk every na-subset of positions as the first group.
    std::vector<std::size_t> pick(na);
    for (std::size_t i = 0; i < na; ++i) pick[i] = i;
    std::size_t total = 0;
    std::size_t extreme = 0;
    std::vector<char> in_a(n);
    while (true) {
        std::fill(in_a.begin(), in_a.end(), 0);
        for (auto i : pick) in_a[i] = 1;
        double u = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!in_a[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (in_a[j]) continue;
                if (pooled[i] > pooled[j]) u += 1;
                else if (pooled[i] == pooled[j]) u += 0.5;
            }
        }
        ++total;
        if (std::fabs(u - mean) >= observed - tolerance) ++extreme;

        std::size_t k = na;
        while (k > 0 && pick[k - 1] == n - na + (k - 1)) --k;
        if (k == 0) break;
        ++pick[k - 1];
        for (std::size_t i = k; i < na; ++i) pick[i] = pick[i - 1] + 1;
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
}

double mwu_normal_p(const std::vector<double>& a, const std::vector<double>& b) {
    require_samples(a, b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;
    std::map<double, std::size_t> counts;
    for (double x : a) ++counts[x];
    for (double x : b) ++counts[x];
    double tie_term = 0;
    for (const auto& [value, t] : counts) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double variance = na * nb / 12.0 * ((n + 1) - tie_term / (n * (n - 1)));
    if (variance <= 0) throw DegenerateSample("all observations are identical");
    const double mean = na * nb / 2.0;
    const double deviation = std::max(0.0, std::fabs(mwu_statistic(a, b) - mean) - 0.5);
    const double z = deviation / std::sqrt(variance);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

MwuResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    require_samples(a, b);
    const double first = a.front();
    bool constant = std::all_of(a.begin(), a.end(), [&](double x) { return x == first; }) &&
                    std::all_of(b.begin(), b.end(), [&](double x) { return x == first; });
    if (constant) throw DegenerateSample("all observations are identical");
    MwuResult r;
    r.u = mwu_statistic(a, b);
    r.exact = a.size() + b.size() <= 12;
    r.p_value = r.exact ? mwu_exact_p(a, b) : mwu_normal_p(a, b);
    return r;
}

} // namespace testmend
