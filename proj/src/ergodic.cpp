#include "pide/ergodic.hpp"

#include "pide/error.hpp"

#include <algorithm>
#include <cmath>

namespace pide {

namespace {

GridField normalized(GridField v) {
    const double v0 = v[0];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= v0;
    return v;
}

bool monotone(const std::vector<double>& xs, double slack) {
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] < xs[i - 1] - slack) up = false;
        if (xs[i] > xs[i - 1] + slack) down = false;
    }
    return up || down;
}

}  // namespace

std::string to_string(ErgodicMethod method) {
    return method == ErgodicMethod::vanishing_discount ? "vanishing-discount" : "long-time";
}

double discount_bound(const SpatialOperator& op) {
    const GridField zero(op.grid());
    return sup_norm(op.apply_homogeneous(zero)) + sup_norm(op.problem().f);
}

DiscountedSolution solve_discounted(const SpatialOperator& op, double delta, double tol, std::size_t max_iter,
                                    const DiscountOptions& options) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(Errc::invalid_argument, "delta must be positive");
    if (!(tol > 0.0)) throw Error(Errc::invalid_argument, "tol must be positive");
    if (options.lipschitz_refresh < 1) throw Error(Errc::invalid_argument, "lipschitz_refresh must be >= 1");
    GridField v = options.initial ? *options.initial : GridField(op.grid());
    if (!(v.grid() == op.grid())) throw Error(Errc::grid_mismatch, "initial iterate lives on another grid");

    const std::size_t n = v.size();
    double dtau = 0.0;
    double res = 0.0;
    for (std::size_t it = 0;; ++it) {
        if (it % static_cast<std::size_t>(options.lipschitz_refresh) == 0) {
            const double rate = op.rate(v) + delta;
            if (!(rate > 0.0)) throw Error(Errc::degenerate, "all CFL rates vanish");
            dtau = options.safety / rate;
        }
        const GridField op_v = op.apply(v);
        res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(delta * v[i] + op_v[i]));
        if (!std::isfinite(res)) throw Error(Errc::non_finite, "discounted iteration diverged");
        if (res <= tol) {
            return {delta, v, delta * v[0], delta * mean(v), res, it};
        }
        if (it >= max_iter) {
            throw Error(Errc::max_iter_exceeded, "discounted solve (delta = " + format_real(delta) +
                                                     ") stopped at residual " + format_real(res));
        }
        const double target_mean = -mean(op_v) / delta;
        for (std::size_t i = 0; i < n; ++i) v[i] -= dtau * (delta * v[i] + op_v[i]);
        const double shift = target_mean - mean(v);
        for (std::size_t i = 0; i < n; ++i) v[i] += shift;
    }
}

DiscountedSolution solve_discounted(const ProblemSpec& problem, double delta, double tol, std::size_t max_iter) {
    return solve_discounted(SpatialOperator(problem), delta, tol, max_iter);
}

ErgodicPair vanishing_discount(const SpatialOperator& op, const std::vector<double>& schedule, double tol,
                               std::size_t max_iter) {
    if (schedule.size() < 3) throw Error(Errc::fewer_than_three, "delta schedule needs at least three values");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0) || (i > 0 && !(schedule[i] < schedule[i - 1]))) {
            throw Error(Errc::invalid_argument, "delta schedule must be positive and decreasing");
        }
    }
    ErgodicPair pair;
    pair.method = ErgodicMethod::vanishing_discount;
    pair.delta_schedule = schedule;
    pair.bound = discount_bound(op);

    DiscountOptions opts;
    std::optional<DiscountedSolution> last;
    for (double delta : schedule) {
        if (last) {
            // Warm start: previous fluctuation with the new mean scale.
            GridField guess = last->v_delta;
            const double shift = last->lambda_proxy_mean / delta - mean(guess);
            for (std::size_t i = 0; i < guess.size(); ++i) guess[i] += shift;
            opts.initial = std::move(guess);
        }
        DiscountedSolution sol = solve_discounted(op, delta, tol, max_iter, opts);
        const GridField tilde = normalized(sol.v_delta);
        pair.point_proxies.push_back(sol.lambda_proxy_point);
        pair.mean_proxies.push_back(sol.lambda_proxy_mean);
        pair.osc_series.push_back(oscillation(tilde));
        pair.lip_series.push_back(discrete_lipschitz(tilde));
        pair.bound_series.push_back(delta * sup_norm(sol.v_delta));
        pair.discount_residuals.push_back(sol.residual);
        last = std::move(sol);
    }
    const std::size_t m = schedule.size();
    const double da = schedule[m - 2];
    const double db = schedule[m - 1];
    const double la = pair.mean_proxies[m - 2];
    const double lb = pair.mean_proxies[m - 1];
    pair.lambda = (da * lb - db * la) / (da - db);
    pair.proxies_monotone = monotone(pair.mean_proxies, 10.0 * tol);
    pair.v = normalized(last->v_delta);
    pair.residual = ergodic_residual(pair, op);
    return pair;
}

ErgodicPair vanishing_discount(const ProblemSpec& problem, const std::vector<double>& schedule, double tol) {
    return vanishing_discount(SpatialOperator(problem), schedule, tol);
}

ErgodicPair long_time_pair(const SpatialOperator& op, const GridField& u0, double T, double window, double tol,
                           const CauchyOptions& options) {
    if (!(window > 0.0) || !(T >= 4.0 * window)) throw Error(Errc::invalid_argument, "need T >= 4 window > 0");
    const CauchyRun run = solve_cauchy(u0, op, T, {T - 2.0 * window, T - window, T}, options);
    const double m0 = mean(run.snapshots[0].u);
    const double m1 = mean(run.snapshots[1].u);
    const double m2 = mean(run.snapshots[2].u);

    ErgodicPair pair;
    pair.method = ErgodicMethod::long_time;
    pair.window = window;
    pair.lambda = (m2 - m1) / window;
    pair.previous_slope = (m1 - m0) / window;
    pair.settled = std::abs(pair.lambda - pair.previous_slope) <= 10.0 * tol * std::max(1.0, std::abs(pair.lambda));
    GridField v = run.snapshots[2].u;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= pair.lambda * T;
    pair.v = normalized(std::move(v));
    pair.residual = ergodic_residual(pair, op);
    return pair;
}

ErgodicPair long_time_pair(const ProblemSpec& problem, const GridField& u0, double T, double window) {
    return long_time_pair(SpatialOperator(problem), u0, T, window);
}

double ergodic_residual(const ErgodicPair& pair, const SpatialOperator& op) {
    const GridField r = op.apply(pair.v);
    double res = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) res = std::max(res, std::abs(r[i] + pair.lambda));
    return res;
}

double ergodic_residual(const ErgodicPair& pair, const ProblemSpec& problem) {
    return ergodic_residual(pair, SpatialOperator(problem));
}

UniquenessReport uniqueness_probe(const SpatialOperator& op, const std::vector<GridField>& u0_list, double T,
                                  double window) {
    if (u0_list.size() < 2) throw Error(Errc::invalid_argument, "uniqueness probe needs at least two initial data");
    if (!(window > 0.0)) window = std::max(1.0, T / 8.0);
    std::vector<ErgodicPair> pairs;
    UniquenessReport report;
    for (const auto& u0 : u0_list) {
        pairs.push_back(long_time_pair(op, u0, T, window));
        report.lambdas.push_back(pairs.back().lambda);
        report.settled.push_back(pairs.back().settled);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            report.lambda_spread = std::max(report.lambda_spread, std::abs(pairs[i].lambda - pairs[j].lambda));
            report.profile_spread = std::max(report.profile_spread, oscillation(pairs[i].v - pairs[j].v));
        }
    }
    return report;
}

UniquenessReport uniqueness_probe(const ProblemSpec& problem, const std::vector<GridField>& u0_list, double T) {
    return uniqueness_probe(SpatialOperator(problem), u0_list, T);
}

nlohmann::json to_json(const ErgodicPair& pair) {
    nlohmann::json j{{"lambda", pair.lambda}, {"residual", pair.residual}, {"method", to_string(pair.method)}};
    if (pair.method == ErgodicMethod::vanishing_discount) {
        j["delta_schedule"] = pair.delta_schedule;
        j["diagnostics"] = {{"osc_series", pair.osc_series},
                            {"lip_series", pair.lip_series},
                            {"point_proxies", pair.point_proxies},
                            {"mean_proxies", pair.mean_proxies},
                            {"bound_series", pair.bound_series},
                            {"discount_residuals", pair.discount_residuals},
                            {"bound", pair.bound},
                            {"proxies_monotone", pair.proxies_monotone}};
    } else {
        j["diagnostics"] = {{"window", pair.window},
                            {"previous_slope", pair.previous_slope},
                            {"settled", pair.settled},
                            {"osc", oscillation(pair.v)},
                            {"lipschitz", discrete_lipschitz(pair.v)}};
    }
    return j;
}

}  // namespace pide
