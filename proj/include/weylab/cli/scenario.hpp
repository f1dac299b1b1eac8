#pragma once

#include <string>
#include <vector>

#include "weylab/cli/geometry.hpp"

namespace weylab {

// One verification scenario: a geometry, a list of named checks, the sample
// policy, and optional symbolic inputs. Parsed from a JSON document; the
// schema is documented in the repository (docs/scenario-schema.md) and
// carries an explicit version field.
struct Scenario {
    int schema_version = 1;
    std::string id;
    GeometrySpec geometry;
    std::vector<std::string> checks;
    int points = 20;
    unsigned seed = 0;
    double tol_scale = 1.0;
    // Optional inputs, as expression strings in the chart variables x1..xn:
    std::vector<std::string> section;  // psi components (dim entries)
    std::string potential;             // Lagrangian-section potential
    std::string density;               // weight-1 density component
    int ma_sign = 0;                   // 0 = default (-1)^dim
};

// Names accepted in "checks"; anything else is rejected at parse time.
const std::vector<std::string>& known_checks();

// Parses and validates. Unknown top-level keys, unknown check names, and
// schema-version mismatches throw ParseError.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

}  // namespace weylab
