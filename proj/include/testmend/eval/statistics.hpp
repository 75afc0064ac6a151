#pragma once

#include <vector>

namespace testmend {

struct MwuResult {
    double u = 0;       // U of the first sample: #(a > b) + 0.5 * #ties
    double p_value = 1; // two-sided
    bool exact = false;
};

/// Exact enumeration when |a| + |b| <= 12, normal approximation with tie and
/// continuity correction otherwise. Throws DegenerateSample when every value
/// is identical, InvalidState on an empty sample.
MwuResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

/// Two-sided permutation p-value over all splits of the pooled values.
double mwu_exact_p(const std::vector<double>& a, const std::vector<double>& b);
/// Normal approximation of the same p-value.
double mwu_normal_p(const std::vector<double>& a, const std::vector<double>& b);

/// U statistic of `a` against `b`.
double mwu_statistic(const std::vector<double>& a, const std::vector<double>& b);

/// Probability that a value drawn from `a` exceeds one from `b` (ties count half).
double vargha_delaney_a(const std::vector<double>& a, const std::vector<double>& b);

inline constexpr double significance_level = 0.05;

} // namespace testmend
