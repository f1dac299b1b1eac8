#include "weylab/cli/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "weylab/errors.hpp"

namespace weylab {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                return key == a;
            }) == allowed.end())
            throw ParseError(std::string("scenario: unknown key '") + key + "' in " +
                             where);
    }
}

GeometrySpec parse_geometry(const json& g) {
    if (!g.is_object()) throw ParseError("scenario: 'geometry' must be an object");
    reject_unknown_keys(g, {"kind", "dim", "degree", "seed", "metric", "gamma"},
                        "geometry");
    GeometrySpec spec;
    spec.kind = g.value("kind", "");
    spec.dim = g.value("dim", 2);
    spec.degree = g.value("degree", 2);
    spec.seed = g.value("seed", 0u);
    if (g.contains("metric"))
        spec.metric = g.at("metric").get<std::vector<std::string>>();
    if (g.contains("gamma"))
        spec.gamma = g.at("gamma").get<std::vector<std::string>>();
    auto kinds = catalog_kinds();
    if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end())
        throw ParseError("scenario: unknown geometry kind '" + spec.kind + "'");
    return spec;
}

}  // namespace

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = {
        "closedness",       "einstein",          "curvature_dictionary",
        "universal_rho",    "section_forms",     "section_residuals",
        "ma_residual",      "convexity_certificate", "tractor_blocks",
        "engine_soundness",
    };
    return names;
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("scenario: document must be an object");
    reject_unknown_keys(doc,
                        {"schema_version", "id", "geometry", "checks", "points",
                         "seed", "tol_scale", "section", "potential", "density",
                         "ma_sign"},
                        "the scenario");

    Scenario s;
    s.schema_version = doc.value("schema_version", 0);
    if (s.schema_version != 1)
        throw ParseError("scenario: unsupported schema_version (expected 1)");
    s.id = doc.value("id", "");
    if (s.id.empty()) throw ParseError("scenario: missing 'id'");
    if (!doc.contains("geometry")) throw ParseError("scenario: missing 'geometry'");
    s.geometry = parse_geometry(doc.at("geometry"));
    if (!doc.contains("checks")) throw ParseError("scenario: missing 'checks'");
    s.checks = doc.at("checks").get<std::vector<std::string>>();
    if (s.checks.empty()) throw ParseError("scenario: 'checks' must be non-empty");
    const auto& known = known_checks();
    for (const auto& c : s.checks)
        if (std::find(known.begin(), known.end(), c) == known.end())
            throw ParseError("scenario: unknown check '" + c + "'");
    s.points = doc.value("points", 20);
    if (s.points < 1) throw ParseError("scenario: 'points' must be positive");
    s.seed = doc.value("seed", 0u);
    s.tol_scale = doc.value("tol_scale", 1.0);
    if (s.tol_scale <= 0) throw ParseError("scenario: 'tol_scale' must be positive");
    if (doc.contains("section"))
        s.section = doc.at("section").get<std::vector<std::string>>();
    s.potential = doc.value("potential", "");
    s.density = doc.value("density", "");
    s.ma_sign = doc.value("ma_sign", 0);
    if (s.ma_sign != 0 && s.ma_sign != 1 && s.ma_sign != -1)
        throw ParseError("scenario: 'ma_sign' must be -1, 0, or 1");
    if (!s.section.empty() &&
        static_cast<int>(s.section.size()) != s.geometry.dim)
        throw ParseError("scenario: 'section' needs one expression per dimension");
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("scenario: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

}  // namespace weylab
