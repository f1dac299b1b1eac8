#include "weylab/geom/chart.hpp"

#include <cmath>

#include "weylab/errors.hpp"

namespace weylab {

Rational::Rational(long long n, long long d) {
    if (d == 0) throw DomainError("rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num_ = n / g;
    den_ = d / g;
}

ChartPtr Chart::make(int dim, Domain domain) {
    if (dim < 2) throw ShapeError("chart: dimension must be at least 2");
    return ChartPtr(new Chart(dim, domain));
}

bool Chart::contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim_) return false;
    switch (domain_) {
        case Domain::Whole:
            return true;
        case Domain::UnitBall: {
            double s = 0.0;
            for (double v : p) s += v * v;
            return s < 1.0;
        }
        case Domain::BaseUnitBall: {
            double s = 0.0;
            for (int i = 0; i < dim_ / 2; ++i) s += p[i] * p[i];
            return s < 1.0;
        }
    }
    return false;
}

std::map<std::vector<int>, double> jet_evaluate(const ScalarField& f, const Chart& chart,
                                                std::span<const double> point, int order) {
    if (f.dim() != chart.dim())
        throw ShapeError("jet_evaluate: field and chart dimensions differ");
    if (!chart.contains(point))
        throw DomainError("jet_evaluate: point outside the chart domain");
    Jet j = f.eval_jet(point, order);
    const JetLayout& L = j.layout();
    std::map<std::vector<int>, double> out;
    for (int i = 0; i < L.size(); ++i) {
        auto e = L.exponent(i);
        out[std::vector<int>(e.begin(), e.end())] = j.raw_partial(i);
    }
    return out;
}

}  // namespace weylab
