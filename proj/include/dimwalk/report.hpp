#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace dimwalk {

/// Outcome of a single numerical identity check: what was checked, on which
/// grid, the worst observed error and the tolerance it was held against.
struct VerificationReport {
    std::string check;       // identity name, e.g. "bernstein-signs", "dimension-walk"
    std::string subject;     // model or function the check ran on
    bool pass = false;
    double max_error = 0.0;  // worst observed violation / discrepancy
    double tolerance = 0.0;
    std::size_t grid_points = 0;
    std::string detail;      // human-readable note (failing order, grid range, ...)

    nlohmann::json to_json() const;
    std::string to_json_line() const;
};

}  // namespace dimwalk
