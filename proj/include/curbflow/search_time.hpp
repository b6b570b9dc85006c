#pragma once

#include "curbflow/scenario.hpp"

namespace curbflow {

/// Partial derivatives of the search-time function S(n, m).
struct SearchPartials {
    double dn = 0.0;   // dS/dn
    double dnn = 0.0;  // d2S/dn2
    double dm = 0.0;   // dS/dm
    double dnm = 0.0;  // d2S/(dn dm)
};

/// Expected spot-search time for density n against capacity m.
/// Binomial requires n < m strictly; both require m > 0 and n >= 0.
double search_time(const SearchModel& model, double n, double m);

/// First and second partials of search_time. At the piecewise kink the
/// left-branch (flat) constants are used.
SearchPartials search_partials(const SearchModel& model, double n, double m);

}  // namespace curbflow
