#include "pide/audit.hpp"

#include <cmath>

namespace pide {

namespace {

nlohmann::json number(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

nlohmann::json to_json(const AuditReport& report) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : report.parameters) params[k] = number(v);
    nlohmann::json values = nlohmann::json::array();
    for (double v : report.computed_values) values.push_back(number(v));
    return {{"assumption", report.assumption},
            {"parameters", params},
            {"computed_values", values},
            {"pass", report.pass}};
}

}  // namespace pide
