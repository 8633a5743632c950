#include "pide/cauchy.hpp"

#include "pide/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace pide {

namespace {

void euler_update(const GridField& u, const GridField& op_u, double dt, GridField& out) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - dt * op_u[i];
}

GridField lerp(const GridField& a, const GridField& b, double theta) {
    if (theta <= 0.0) return a;
    if (theta >= 1.0) return b;
    GridField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - theta) * a[i] + theta * b[i];
    return out;
}

}  // namespace

GridField step_explicit(const GridField& u, const SpatialOperator& op, double dt) {
    if (!(dt > 0.0)) throw Error(Errc::invalid_argument, "dt must be positive");
    const double limit = op.cfl_timestep(u, 1.0);
    if (dt > limit * (1.0 + 1e-12)) {
        throw Error(Errc::cfl_violation, "dt = " + format_real(dt) + " exceeds CFL bound " + format_real(limit));
    }
    const GridField op_u = op.apply(u);
    GridField out(u.grid());
    euler_update(u, op_u, dt, out);
    if (!all_finite(out)) throw Error(Errc::non_finite, "explicit step produced non-finite values");
    return out;
}

GridField step_explicit(const GridField& u, const ProblemSpec& problem, double dt) {
    return step_explicit(u, SpatialOperator(problem), dt);
}

CauchyRun solve_cauchy(const GridField& u0, const ProblemSpec& problem, double T,
                       std::vector<double> snapshot_times, const CauchyOptions& options) {
    return solve_cauchy(u0, SpatialOperator(problem), T, std::move(snapshot_times), options);
}

CauchyRun solve_cauchy(const GridField& u0, const SpatialOperator& op, double T,
                       std::vector<double> snapshot_times, const CauchyOptions& options) {
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(Errc::invalid_argument, "T must be positive");
    if (!(u0.grid() == op.grid())) throw Error(Errc::grid_mismatch, "u0 lives on another grid");
    if (!all_finite(u0)) throw Error(Errc::non_finite, "u0 is not finite");
    if (snapshot_times.empty()) snapshot_times.push_back(T);
    for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
        const double s = snapshot_times[k];
        if (!(s >= 0.0 && s <= T) || (k > 0 && !(s > snapshot_times[k - 1]))) {
            throw Error(Errc::invalid_argument, "snapshot times must increase within [0, T]");
        }
    }
    if (options.lipschitz_refresh < 1) throw Error(Errc::invalid_argument, "lipschitz_refresh must be >= 1");

    CauchyRun run{op.problem(), u0, T, snapshot_times, {}, {}, 0};
    run.snapshots.reserve(snapshot_times.size());

    const double guard = 1e6 * (sup_norm(u0) + T * sup_norm(op.problem().f) + 1.0);
    GridField u = u0;
    GridField next(u0.grid());
    double t = 0.0;
    double dt = 0.0;
    std::size_t k = 0;

    auto record = [&](double time, GridField snap) {
        const double slope = run.snapshots.empty()
                                 ? -mean(op.apply(snap))
                                 : (mean(snap) - mean(run.snapshots.back().u)) / (time - run.snapshots.back().t);
        run.slope_series.emplace_back(time, slope);
        run.snapshots.push_back({time, std::move(snap)});
    };

    while (k < snapshot_times.size() && snapshot_times[k] == 0.0) record(snapshot_times[k++], u);

    while (k < snapshot_times.size()) {
        if (run.steps % static_cast<std::size_t>(options.lipschitz_refresh) == 0) {
            const double limit = op.cfl_timestep(u, options.safety);
            if (options.fixed_dt > 0.0) {
                if (options.fixed_dt > limit / options.safety * (1.0 + 1e-12)) {
                    throw Error(Errc::cfl_violation, "fixed dt " + format_real(options.fixed_dt) +
                                                         " exceeds CFL bound at t = " + format_real(t));
                }
                dt = options.fixed_dt;
            } else {
                dt = limit;
            }
        }
        double step = dt;
        const bool last = t + step >= T * (1.0 - 1e-14);
        if (last) step = T - t;
        if (step > 0.0) {
            const GridField op_u = op.apply(u);
            euler_update(u, op_u, step, next);
        } else {
            next = u;
        }
        const double t_next = last ? T : t + step;
        while (k < snapshot_times.size() && (snapshot_times[k] <= t_next || last)) {
            const double s = snapshot_times[k++];
            const double theta = step > 0.0 ? (s - t) / step : 1.0;
            record(s, lerp(u, next, s >= t_next ? 1.0 : theta));
        }
        std::swap(u, next);
        t = t_next;
        ++run.steps;
        if (run.steps % static_cast<std::size_t>(options.lipschitz_refresh) == 0 || last) {
            if (!all_finite(u)) throw Error(Errc::non_finite, "solution became non-finite at t = " + format_real(t));
            if (sup_norm(u) > guard) throw Error(Errc::blow_up, "sup norm exceeded blow-up guard at t = " + format_real(t));
        }
        if (last) break;
    }
    return run;
}

void write_trajectory_csv(const CauchyRun& run, std::ostream& os) {
    os << "t,sup_norm,mean,slope,lipschitz\n";
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        const auto& s = run.snapshots[k];
        os << format_real(s.t) << ',' << format_real(sup_norm(s.u)) << ',' << format_real(mean(s.u)) << ','
           << format_real(run.slope_series[k].second) << ',' << format_real(discrete_lipschitz(s.u)) << '\n';
    }
}

std::vector<std::filesystem::path> write_snapshots(const CauchyRun& run, const std::filesystem::path& dir,
                                                   const std::string& prefix) {
    std::vector<std::filesystem::path> paths;
    std::filesystem::create_directories(dir);
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "_%03zu.csv", k);
        auto path = dir / (prefix + name);
        write_csv(path.string(), run.snapshots[k].u);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace pide
