#include "curbflow/search_time.hpp"

#include <stdexcept>

namespace curbflow {

namespace {

void check_domain(const SearchModel& model, double n, double m) {
    if (!(m > 0.0)) throw std::domain_error("search_time: capacity m must be positive");
    if (n < 0.0) throw std::domain_error("search_time: density n must be nonnegative");
    if (model.kind == SearchModel::Kind::Binomial) {
        if (n >= m) throw std::domain_error("search_time: binomial model requires occupancy < 1");
    } else if (n > m) {
        throw std::domain_error("search_time: occupancy above 1");
    }
}

}  // namespace

double search_time(const SearchModel& model, double n, double m) {
    check_domain(model, n, m);
    if (model.kind == SearchModel::Kind::Binomial) return m / (m - n);
    const double occ = n / m;
    const double knee = 1.0 - model.omega;
    if (occ <= knee) return model.delta * occ;
    return model.delta * knee + model.Delta * (occ - knee);
}

SearchPartials search_partials(const SearchModel& model, double n, double m) {
    check_domain(model, n, m);
    SearchPartials p;
    if (model.kind == SearchModel::Kind::Binomial) {
        const double d = m - n;
        p.dn = m / (d * d);
        p.dnn = 2.0 * m / (d * d * d);
        p.dm = -n / (d * d);
        p.dnm = -(m + n) / (d * d * d);
        return p;
    }
    // Branch-local constants; the kink itself takes the flat branch.
    const double slope = (n / m <= 1.0 - model.omega) ? model.delta : model.Delta;
    p.dn = slope / m;
    p.dnn = 0.0;
    p.dm = -slope * n / (m * m);
    p.dnm = -slope / (m * m);
    return p;
}

}  // namespace curbflow
