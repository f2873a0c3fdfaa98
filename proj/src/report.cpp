#include "dimwalk/report.hpp"

#include <nlohmann/json.hpp>

namespace dimwalk {

nlohmann::json VerificationReport::to_json() const {
    return nlohmann::json{
        {"schema", "dimwalk.report.v1"},
        {"check", check},
        {"subject", subject},
        {"pass", pass},
        {"max_error", max_error},
        {"tolerance", tolerance},
        {"grid_points", grid_points},
        {"detail", detail},
    };
}

std::string VerificationReport::to_json_line() const { return to_json().dump(); }

}  // namespace dimwalk
