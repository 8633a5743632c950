#include "pide/catalog.hpp"

#include "pide/error.hpp"

namespace pide {

namespace {

using nlohmann::json;

const json kSinX = {{"cos", {{"axis", 0}, {"amp", 0.5}, {"phase", -1.5707963267948966}}}};

std::vector<ExampleCatalogEntry> build() {
    std::vector<ExampleCatalogEntry> out;

    out.push_back({"toy-mixed",
                   "local diffusion in x1, fractional diffusion in x2, quadratic Hamiltonian",
                   json::parse(R"({
                     "grid": {"d1": 1, "d2": 1, "n": 64},
                     "local": [{"block": "x1", "a": 1}],
                     "nonlocal": [{"block": "x2", "beta": 1.5, "discretization": "spectral"}],
                     "gradient": [{"block": "full", "b": 1, "k": 2}],
                     "f": {"sum": ["cos1", "cos2"]},
                     "H_exponent": 2,
                     "mode": "convergence",
                     "T": 10,
                     "delta_schedule": [0.2, 0.1, 0.05, 0.025],
                     "tol": 1e-9
                   })"),
                   {{"lambda_gap", 0.0, 1e-3, "cross-method"},
                    {"osc_final", 0.0, 1e-2, "convergence"},
                    {"bound_excess", 0.0, 1e-6, "bound"},
                    {"audits_failed", 0.0, 0.0, "construction"}}});

    json drift = json::parse(R"({
                     "grid": {"d1": 1, "d2": 0, "n": 64},
                     "nonlocal": [{"block": "full", "beta": 1.5, "discretization": "spectral"}],
                     "f": {"sum": ["cos1", {"cos": {"axis": 0, "amp": 0.5, "freq": 2}}]},
                     "H_exponent": 1,
                     "mode": "ergodic-vd",
                     "T": 8,
                     "delta_schedule": [0.2, 0.1, 0.05, 0.025],
                     "tol": 1e-9
                   })");
    drift["gradient"] = json::array({{{"block", "full"}, {"b", kSinX}, {"k", 1}}});
    out.push_back({"fractional-drift",
                   "fractional diffusion with a sign-changing drift b(x)|Du|",
                   drift,
                   {{"lambda_gap", 0.0, 1e-3, "cross-method"},
                    {"bound_excess", 0.0, 1e-6, "bound"},
                    {"audits_failed", 0.0, 0.0, "construction"}}});

    json superlinear = json::parse(R"({
                     "grid": {"d1": 1, "d2": 1, "n": 64},
                     "nonlocal": [{"block": "full", "beta": 1.5, "discretization": "spectral"}],
                     "f": {"sum": ["cos2d", {"cos": {"axis": 1, "amp": 0.5}}]},
                     "H_exponent": 2,
                     "mode": "ergodic-vd",
                     "T": 8,
                     "delta_schedule": [0.2, 0.1, 0.05, 0.025],
                     "tol": 1e-9
                   })");
    superlinear["gradient"] = json::array({{{"block", "full"}, {"b", kSinX}, {"k", 1}},
                                           {{"block", "full"}, {"b", 1}, {"k", 2}}});
    out.push_back({"superlinear",
                   "full-space fractional diffusion, drift and |Du|^m",
                   superlinear,
                   {{"lambda_gap", 0.0, 1e-3, "cross-method"},
                    {"bound_excess", 0.0, 1e-6, "bound"},
                    {"audits_failed", 0.0, 0.0, "construction"}}});

    out.push_back({"composed",
                   "a1 Laplacian plus a2 fractional diffusion via the jump a2^(1/beta) z, a2 vanishing on half the cell",
                   json::parse(R"({
                     "grid": {"d1": 1, "d2": 0, "n": 64},
                     "local": [{"block": "full",
                                "a": {"sum": [0.2, {"product": [0.8, {"pos-sin": {"axis": 0, "power": 2, "sign": -1}}]}]}}],
                     "nonlocal": [{"block": "full", "beta": 1.5, "discretization": "quadrature",
                                   "jump": {"scaled": {"pos-sin": {"axis": 0, "power": 1.5, "sign": 1}}}}],
                     "gradient": [{"block": "full", "b": 1, "k": 2}],
                     "f": "cos1",
                     "H_exponent": 2,
                     "mode": "ergodic-vd",
                     "T": 8,
                     "delta_schedule": [0.2, 0.1, 0.05, 0.025],
                     "tol": 1e-9
                   })"),
                   {{"lambda_gap", 0.0, 1e-3, "cross-method"},
                    {"max_discount_residual", 0.0, 1e-9, "construction"},
                    {"bound_excess", 0.0, 1e-6, "bound"},
                    {"audits_failed", 0.0, 0.0, "construction"}}});

    out.push_back({"mixed-gradients",
                   "local x1, raw-kernel jumps in x2, blockwise gradient powers with positive weights",
                   json::parse(R"({
                     "grid": {"d1": 1, "d2": 1, "n": 64},
                     "local": [{"block": "x1", "a": 1}],
                     "nonlocal": [{"block": "x2", "beta": 1.5, "discretization": "quadrature", "normalization": "raw"}],
                     "gradient": [{"block": "x1", "b": {"sum": [1, {"cos": {"axis": 0, "amp": 0.5}}]}, "k": 1.5},
                                  {"block": "x2", "b": {"sum": [1, {"cos": {"axis": 1, "amp": 0.5}}]}, "k": 2}],
                     "f": {"sum": ["cos1", "cos2"]},
                     "H_exponent": 1.5,
                     "mode": "ergodic-vd",
                     "T": 8,
                     "delta_schedule": [0.2, 0.1, 0.05, 0.025],
                     "tol": 1e-9
                   })"),
                   {{"lambda_gap", 0.0, 1e-3, "cross-method"},
                    {"bound_excess", 0.0, 1e-6, "bound"},
                    {"audits_failed", 0.0, 0.0, "construction"}}});

    out.push_back({"sub-vs-super",
                   "linear growth in x1, superlinear in x2, plus |Du|^m",
                   json::parse(R"({
                     "grid": {"d1": 1, "d2": 1, "n": 64},
                     "local": [{"block": "x1", "a": 1}],
                     "nonlocal": [{"block": "x2", "beta": 1.5, "discretization": "quadrature", "normalization": "raw"}],
                     "gradient": [{"block": "x1", "b": {"sum": [1, {"cos": {"axis": 0, "amp": 0.5}}]}, "k": 1},
                                  {"block": "x2", "b": {"sum": [1, {"cos": {"axis": 1, "amp": 0.5}}]}, "k": 1.5},
                                  {"block": "full", "b": 1, "k": 2}],
                     "f": {"sum": ["cos1", "cos2"]},
                     "H_exponent": 2,
                     "mode": "ergodic-vd",
                     "T": 8,
                     "delta_schedule": [0.2, 0.1, 0.05, 0.025],
                     "tol": 1e-9
                   })"),
                   {{"lambda_gap", 0.0, 1e-3, "cross-method"},
                    {"bound_excess", 0.0, 1e-6, "bound"},
                    {"audits_failed", 0.0, 0.0, "construction"}}});
    return out;
}

}  // namespace

const std::vector<ExampleCatalogEntry>& example_catalog() {
    static const std::vector<ExampleCatalogEntry> catalog = build();
    return catalog;
}

const ExampleCatalogEntry& find_example(const std::string& id) {
    for (const auto& e : example_catalog()) {
        if (e.id == id) return e;
    }
    throw Error(Errc::unknown_example, "no catalog entry named " + id);
}

}  // namespace pide
