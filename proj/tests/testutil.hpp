#pragma once
// Shared helpers for the test suites: deterministic random series and
// expression generators, and tolerance checks for big-float comparisons.

#include "subcrit/series.hpp"

#include <random>
#include <vector>

namespace subcrit::testutil {

inline rat random_rat(std::mt19937_64& rng, int num_range = 9, int den_range = 6) {
    std::uniform_int_distribution<int> num(-num_range, num_range);
    std::uniform_int_distribution<int> den(1, den_range);
    return rat(num(rng), den(rng));
}

inline rat random_nonneg_rat(std::mt19937_64& rng, int num_range = 9, int den_range = 6) {
    std::uniform_int_distribution<int> num(0, num_range);
    std::uniform_int_distribution<int> den(1, den_range);
    return rat(num(rng), den(rng));
}

// Random series with the requested constant term (default: zero, as most
// operators need valuation >= 1).
inline qseries random_series(std::mt19937_64& rng, unsigned order, bool zero_const = true,
                             bool nonneg = false) {
    std::vector<rat> c(order + 1);
    for (unsigned n = 0; n <= order; ++n)
        c[n] = nonneg ? random_nonneg_rat(rng) : random_rat(rng);
    if (zero_const) c[0] = 0;
    return qseries(coeff_domain::exact(), std::move(c));
}

inline bigfloat rel_err(const bigfloat& got, const bigfloat& want) {
    using std::abs;
    bigfloat denom = abs(want);
    if (denom < bigfloat(1)) denom = 1;
    return abs(got - want) / denom;
}

} // namespace subcrit::testutil
