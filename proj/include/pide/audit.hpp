#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace pide {

/// Outcome of a numeric assumption check.
struct AuditReport {
    std::string assumption;
    std::map<std::string, double> parameters;
    std::vector<double> computed_values;
    bool pass = false;
};

nlohmann::json to_json(const AuditReport& report);

}  // namespace pide
