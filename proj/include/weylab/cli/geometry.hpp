#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weylab/proj/connection.hpp"

namespace weylab {

// A geometry request from a scenario file.
struct GeometrySpec {
    std::string kind;  // flat | klein_ball | levi_civita | explicit | random_poly
    int dim = 2;
    int degree = 2;    // random_poly only
    unsigned seed = 0; // random_poly only
    std::vector<std::string> metric; // levi_civita: dim*dim expressions, row-major
    std::vector<std::string> gamma;  // explicit: dim^3 expressions, output slot major
};

struct Geometry {
    Connection conn;
    std::optional<TensorField> metric;  // set for klein_ball and levi_civita
};

Geometry catalog_geometry(const GeometrySpec& spec);
std::vector<std::string> catalog_kinds();

// The catalog's seeded polynomial-connection generator. Deterministic scheme:
// one mt19937_64 stream seeded with `seed`, coefficients drawn uniformly from
// [-0.35, 0.35] in a fixed order — components Gamma^k_{ij} in row-major
// (k, i, j) order with i <= j, and within a component the monomials x^alpha
// of total degree 0..degree with nondecreasing variable lists
// (1, x1, x1 x1, x1 x2, ..., x2, x2 x2, ... in a depth-first walk).
Connection random_poly_connection(int dim, int degree, unsigned seed);

// Companion generator for covector fields, same coefficient scheme with the
// component index as the outer loop.
TensorField random_poly_oneform(const ChartPtr& chart, int degree, unsigned seed);

}  // namespace weylab
