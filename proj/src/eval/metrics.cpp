#include "testmend/eval/metrics.hpp"

#include <cmath>
#include <limits>

#include "testmend/core/errors.hpp"

namespace testmend {

Rate compute_rate(std::size_t numerator, std::size_t denominator) {
    Rate r;
    r.numerator = numerator;
    r.denominator = denominator;
    if (denominator == 0) return r;
    // hundredths = round_half_up(numerator * 10000 / denominator), in integers.
    const unsigned long long n = numerator;
    const unsigned long long d = denominator;
    r.hundredths = static_cast<std::int64_t>((2 * n * 10000 + d) / (2 * d));
    return r;
}

double Rate::exact() const {
    if (!defined()) return std::numeric_limits<double>::quiet_NaN();
    return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::int64_t round_half_up_hundredths(long double percent) {
    // The epsilon absorbs representation error such as 28.675 stored as 28.67499...
    return static_cast<std::int64_t>(std::floor(percent * 100.0L + 0.5L + 1e-9L));
}

std::string format_hundredths(std::int64_t hundredths) {
    bool negative = hundredths < 0;
    std::int64_t v = negative ? -hundredths : hundredths;
    std::string frac = std::to_string(v % 100);
    if (frac.size() < 2) frac = "0" + frac;
    return (negative ? "-" : "") + std::to_string(v / 100) + "." + frac;
}

std::string format_percent(double percent) {
    if (std::isnan(percent)) return "n/a";
    return format_hundredths(round_half_up_hundredths(percent));
}

std::string Rate::str() const { return defined() ? format_hundredths(*hundredths) + "%" : "n/a"; }

std::string Rate::with_counts() const {
    return str() + " (" + std::to_string(numerator) + "/" + std::to_string(denominator) + ")";
}

Rate pooled_rate(const std::vector<Rate>& rates) {
    std::size_t n = 0;
    std::size_t d = 0;
    for (const auto& r : rates) {
        n += r.numerator;
        d += r.denominator;
    }
    return compute_rate(n, d);
}

std::optional<double> average_rate(const std::vector<Rate>& rates) {
    long double sum = 0;
    std::size_t count = 0;
    for (const auto& r : rates) {
        if (!r.defined()) continue;
        sum += 100.0L * static_cast<long double>(r.numerator) / static_cast<long double>(r.denominator);
        ++count;
    }
    if (count == 0) return std::nullopt;
    return static_cast<double>(sum / static_cast<long double>(count));
}

CoverageDelta coverage_delta(double base, double now) {
    if (!(base >= 0 && base <= 100 && now >= 0 && now <= 100))
        throw InvalidState("coverage percentages must lie in [0, 100]");
    CoverageDelta d;
    d.difference = now - base;
    if (base > 0) d.improvement = (now - base) / base * 100.0;
    return d;
}

} // namespace testmend
