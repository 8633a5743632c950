#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace pide {

struct ExpectedMetric {
    std::string metric;
    double value;
    double tolerance;
    /// How the expected value is known: "construction", "cross-method", "convergence", "bound".
    std::string basis;
};

struct ExampleCatalogEntry {
    std::string id;
    std::string description;
    nlohmann::json config;
    std::vector<ExpectedMetric> expected;
};

const std::vector<ExampleCatalogEntry>& example_catalog();

/// Throws Errc::unknown_example.
const ExampleCatalogEntry& find_example(const std::string& id);

}  // namespace pide
