#include "curbflow/solution.hpp"

#include <algorithm>
#include <cmath>

namespace curbflow {

double SpatialSolution::density_at(double x) const {
    if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return n.front();
    if (it == xs.end()) return n.back();
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double dx = xs[hi] - xs[lo];
    if (dx <= 0.0) return n[lo];
    const double t = (x - xs[lo]) / dx;
    return n[lo] + t * (n[hi] - n[lo]);
}

double SpatialSolution::mass() const { return trapezoid(xs, n); }

double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sum = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        sum += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return sum;
}

std::vector<double> prefix_integral(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> cum(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i)
        cum[i] = cum[i - 1] + 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return cum;
}

std::vector<double> suffix_integral(const std::vector<double>& xs, const std::vector<double>& ys) {
    std::vector<double> suf(xs.size(), 0.0);
    for (std::size_t i = xs.size(); i-- > 1;)
        suf[i - 1] = suf[i] + 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return suf;
}

}  // namespace curbflow
