#pragma once

#include <optional>
#include <string>
#include <vector>

#include "weylab/cli/scenario.hpp"

namespace weylab {

struct ReportRecord {
    std::string scenario_id;
    std::string check;
    int point_index = -1;            // -1 for aggregate quantities
    std::vector<double> point;       // empty for aggregates
    std::string quantity;
    double value = 0;
    double tol = 0;
    bool pass = false;
};

struct RunOptions {
    double tol_scale = 1.0;          // multiplies the scenario's tol_scale
    std::optional<int> points;       // override sample count
    std::optional<unsigned> seed;    // override sample seed
};

struct RunResult {
    std::vector<ReportRecord> records;  // deterministic order: check, then point
    bool all_pass = true;
};

// Executes every check of the scenario. Check computations may run on up to
// WEYLAB_THREADS worker threads; records are assembled in scenario order
// regardless, so serial and parallel runs emit identical reports.
RunResult run_scenario(const Scenario& s, const RunOptions& opt = {});

// CSV with header scenario_id,check,point_index,point_coords,quantity,value,
// tol,pass; numbers printed with %.17g, no timing columns, so identical runs
// are byte-identical.
std::string to_csv(const std::vector<ReportRecord>& records);
std::string to_json(const std::vector<ReportRecord>& records);

// The built-in scenario battery behind `verify-all`.
std::vector<Scenario> builtin_verification_scenarios();

}  // namespace weylab
