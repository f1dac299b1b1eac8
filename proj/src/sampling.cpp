#include "weylab/cli/sampling.hpp"

#include "weylab/errors.hpp"

namespace weylab {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

double halton(unsigned index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

}  // namespace

std::vector<std::vector<double>> sample_points(const ChartPtr& chart, int count,
                                               unsigned seed) {
    const int d = chart->dim();
    if (d > 8) throw ShapeError("sample_points: dimension above the supported maximum");
    std::vector<std::vector<double>> pts;
    std::vector<double> p(d);
    for (unsigned idx = seed + 1; static_cast<int>(pts.size()) < count; ++idx) {
        for (int v = 0; v < d; ++v) p[v] = 1.8 * halton(idx, kPrimes[v]) - 0.9;
        // margin from the boundary for bounded domains
        bool ok = true;
        if (chart->domain() != Chart::Domain::Whole) {
            const int nb = chart->domain() == Chart::Domain::BaseUnitBall ? d / 2 : d;
            double r2 = 0;
            for (int v = 0; v < nb; ++v) r2 += p[v] * p[v];
            ok = r2 <= 0.81;
        }
        if (ok) pts.push_back(p);
        if (idx > seed + 100000u)
            throw DomainError("sample_points: rejection sampling failed to converge");
    }
    return pts;
}

}  // namespace weylab
