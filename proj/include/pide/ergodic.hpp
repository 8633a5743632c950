#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pide/cauchy.hpp"

namespace pide {

struct DiscountedSolution {
    double delta = 0.0;
    GridField v_delta;
    double lambda_proxy_point = 0.0;  // delta * v(node 0)
    double lambda_proxy_mean = 0.0;   // delta * mean(v)
    double residual = 0.0;            // sup |delta v + op(v)|
    std::size_t iterations = 0;
};

enum class ErgodicMethod { vanishing_discount, long_time };

std::string to_string(ErgodicMethod method);

struct ErgodicPair {
    double lambda = 0.0;
    GridField v;  // v(node 0) = 0
    double residual = 0.0;
    ErgodicMethod method = ErgodicMethod::vanishing_discount;

    // vanishing discount
    std::vector<double> delta_schedule;
    std::vector<double> point_proxies;
    std::vector<double> mean_proxies;
    std::vector<double> osc_series;
    std::vector<double> lip_series;
    std::vector<double> bound_series;  // sup |delta v^delta|
    std::vector<double> discount_residuals;
    double bound = 0.0;                // M
    bool proxies_monotone = true;

    // long time
    double window = 0.0;
    double previous_slope = 0.0;
    bool settled = true;
};

struct DiscountOptions {
    double safety = 0.9;
    int lipschitz_refresh = 16;
    /// Starting iterate; zero field when empty.
    std::optional<GridField> initial;
};

/// M = sup|F(., 0)| + |H(0)| + sup|f|; with the source removed the operator at zero
/// carries both of the first two terms.
double discount_bound(const SpatialOperator& op);

/// Pseudo-time marching v <- v - dtau (delta v + op(v)), dtau = safety / (rate + delta),
/// with the constant mode solved exactly after every step (mean(v) = -mean(op(v)) / delta).
DiscountedSolution solve_discounted(const SpatialOperator& op, double delta, double tol, std::size_t max_iter,
                                    const DiscountOptions& options = {});
DiscountedSolution solve_discounted(const ProblemSpec& problem, double delta, double tol, std::size_t max_iter);

/// Solves along a decreasing schedule (length >= 3, warm-started) and extrapolates the
/// mean proxy linearly to delta = 0 through the two smallest deltas.
ErgodicPair vanishing_discount(const SpatialOperator& op, const std::vector<double>& delta_schedule, double tol,
                               std::size_t max_iter = 2'000'000);
ErgodicPair vanishing_discount(const ProblemSpec& problem, const std::vector<double>& delta_schedule, double tol);

/// Slope of the mean over the last window and the profile u(T) - lambda T.
/// `tol` sets the settled-slope flag: |slope - previous slope| <= 10 tol max(1, |slope|).
ErgodicPair long_time_pair(const SpatialOperator& op, const GridField& u0, double T, double window,
                           double tol = 1e-6, const CauchyOptions& options = {});
ErgodicPair long_time_pair(const ProblemSpec& problem, const GridField& u0, double T, double window);

/// sup |op(v) + lambda|.
double ergodic_residual(const ErgodicPair& pair, const ProblemSpec& problem);
double ergodic_residual(const ErgodicPair& pair, const SpatialOperator& op);

struct UniquenessReport {
    std::vector<double> lambdas;
    std::vector<bool> settled;
    double lambda_spread = 0.0;   // max |lambda_i - lambda_j|
    double profile_spread = 0.0;  // max oscillation(v_i - v_j)
};

UniquenessReport uniqueness_probe(const SpatialOperator& op, const std::vector<GridField>& u0_list, double T,
                                  double window = 0.0);
UniquenessReport uniqueness_probe(const ProblemSpec& problem, const std::vector<GridField>& u0_list, double T);

/// {lambda, residual, method, delta_schedule?, diagnostics{...}}.
nlohmann::json to_json(const ErgodicPair& pair);

}  // namespace pide
