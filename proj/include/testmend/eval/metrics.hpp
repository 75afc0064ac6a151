#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace testmend {

/// numerator/denominator as a percentage rounded half-up to two decimals.
struct Rate {
    std::size_t numerator = 0;
    std::size_t denominator = 0;
    std::optional<std::int64_t> hundredths; // 9460 for 94.60%; absent when denominator is 0

    bool defined() const { return hundredths.has_value(); }
    /// Unrounded percentage; NaN when undefined.
    double exact() const;
    /// "94.60%" or "n/a".
    std::string str() const;
    /// "94.60% (4681/4948)".
    std::string with_counts() const;
};

Rate compute_rate(std::size_t numerator, std::size_t denominator);

/// Half-up rounding to hundredths of a percentage point.
std::int64_t round_half_up_hundredths(long double percent);
/// "94.60%" from 9460.
std::string format_hundredths(std::int64_t hundredths);
/// Two-decimal rendering of a percentage or percentage-point value.
std::string format_percent(double percent);

/// Pooled rate: sum of numerators over sum of denominators.
Rate pooled_rate(const std::vector<Rate>& rates);
/// Unweighted mean of the unrounded defined rates, rounded at the end; nullopt if none is defined.
std::optional<double> average_rate(const std::vector<Rate>& rates);

struct CoverageDelta {
    double difference = 0;              // percentage points
    std::optional<double> improvement;  // percent relative to base; absent when base is 0
};

/// Both arguments are percentages in [0, 100]; throws InvalidState otherwise.
CoverageDelta coverage_delta(double base, double now);

} // namespace testmend
