#pragma once

#include <vector>

#include "weylab/geom/chart.hpp"

namespace weylab {

// Deterministic quasi-random sample points on a chart: a Halton sequence
// mapped to the box [-0.9, 0.9]^dim and, where the domain is bounded,
// rejected against the ball of radius 0.9 (a 0.1 margin from the boundary,
// which keeps catalog metrics away from their singular locus). The seed is an
// offset into the sequence, so runs are reproducible and distinct seeds give
// distinct but overlapping streams.
std::vector<std::vector<double>> sample_points(const ChartPtr& chart, int count,
                                               unsigned seed);

}  // namespace weylab
