#include "pide/experiment.hpp"

#include "pide/catalog.hpp"
#include "pide/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>

namespace pide {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& dir, const std::string& name, const std::string& content,
                std::vector<std::string>& files) {
    std::ofstream out(dir / name);
    if (!out) throw Error(Errc::invalid_argument, "cannot write " + (dir / name).string());
    out << content;
    files.push_back(name);
}

void write_json(const fs::path& dir, const std::string& name, const json& j, std::vector<std::string>& files) {
    write_text(dir, name, j.dump(2) + "\n", files);
}

void write_field(const fs::path& dir, const std::string& name, const GridField& u, std::vector<std::string>& files) {
    write_csv((dir / name).string(), u);
    files.push_back(name);
}

template <class F>
void write_stream(const fs::path& dir, const std::string& name, F&& body, std::vector<std::string>& files) {
    std::ofstream out(dir / name);
    if (!out) throw Error(Errc::invalid_argument, "cannot write " + (dir / name).string());
    body(out);
    files.push_back(name);
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

double effective_window(const ExperimentConfig& cfg) { return cfg.window > 0.0 ? cfg.window : std::max(1.0, cfg.T / 8.0); }

json resolved(const ExperimentConfig& cfg) {
    const auto& g = cfg.problem.grid;
    return {{"grid", {{"d1", g.d1()}, {"d2", g.d2()}, {"n", g.n()}}},
            {"mode", to_string(cfg.mode)},
            {"T", cfg.T},
            {"window", effective_window(cfg)},
            {"delta_schedule", cfg.delta_schedule},
            {"tol", cfg.tol},
            {"max_iter", cfg.max_iter},
            {"snapshot_times", cfg.snapshot_times},
            {"H_exponent", cfg.problem.hamiltonian_exponent},
            {"seed", cfg.seed}};
}

double max_spacing(const std::vector<double>& ts) {
    double s = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i) s = std::max(s, ts[i] - ts[i - 1]);
    return s;
}

json convergence_summary(const ConvergenceReport& rep, const ErgodicPair& pair) {
    const double spacing = max_spacing(rep.times);
    return {{"osc_initial", rep.osc_series.empty() ? 0.0 : rep.osc_series.front()},
            {"osc_final", rep.osc_series.empty() ? 0.0 : rep.osc_series.back()},
            {"m_bar", rep.m_bar},
            {"monotone_violation", rep.monotone_violation},
            {"monotone_tolerance", 10.0 * pair.residual * spacing}};
}

int write_audits(const std::vector<AuditReport>& audits, const fs::path& dir, std::vector<std::string>& files, json& summary) {
    int failed = 0;
    json list = json::array();
    for (std::size_t i = 0; i < audits.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "audit_%02zu_%s.json", i, audits[i].assumption.c_str());
        write_json(dir, name, to_json(audits[i]), files);
        list.push_back({{"assumption", audits[i].assumption}, {"pass", audits[i].pass}});
        if (!audits[i].pass) ++failed;
    }
    summary["audits"] = list;
    summary["audits_failed"] = failed;
    return failed;
}

GridField initial(const ExperimentConfig& cfg) { return cfg.u0 ? *cfg.u0 : GridField(cfg.problem.grid); }

}  // namespace

std::vector<AuditReport> run_audits(const ExperimentConfig& cfg) {
    std::vector<AuditReport> out;
    std::vector<double> betas = cfg.audit_betas;
    if (betas.empty()) {
        for (const auto& t : cfg.problem.nonlocal_terms) {
            if (std::find(betas.begin(), betas.end(), t.measure.beta) == betas.end()) betas.push_back(t.measure.beta);
        }
    }
    for (double beta : betas) {
        const LevyMeasureSpec measure{beta, 1};
        out.push_back(audit_M1(measure));
        out.push_back(audit_M2(measure, cfg.audit_deltas));
    }
    for (const auto& alpha : cfg.jump_alpha) {
        if (alpha) out.push_back(audit_jump_lipschitz(*alpha, cfg.problem.grid.dim(), cfg.problem.grid.n()));
    }
    const double m = cfg.problem.hamiltonian_exponent;
    if (m <= 1.0) {
        std::vector<std::vector<double>> samples{{1.0, 0.0}, {0.6, 0.8}, {-2.0, 1.0}};
        out.push_back(audit_Ha(m, samples, {10.0, 100.0, 1000.0, 10000.0}));
    } else {
        out.push_back(audit_Hb(m, 0.1, 1.0, 64));
        out.push_back(audit_propH(m, {1.0, 2.0, 5.0, 10.0}, 101));
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.mode == Mode::reproduce) {
        const ReproduceReport rep = reproduce(cfg.example_id, cfg.output_dir);
        ExperimentResult res;
        res.exit_code = rep.pass ? exit_pass : exit_tolerance_failure;
        res.summary = rep.metrics;
        res.files = {"manifest.json", "reproduce.csv"};
        return res;
    }

    const auto start = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    ExperimentResult res;
    json& summary = res.summary;
    const SpatialOperator op(cfg.problem);

    switch (cfg.mode) {
        case Mode::cauchy: {
            const CauchyRun run = solve_cauchy(initial(cfg), op, cfg.T, cfg.snapshot_times);
            write_stream(dir, "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(run, os); }, res.files);
            for (const auto& p : write_snapshots(run, dir)) res.files.push_back(p.filename().string());
            const auto& last = run.snapshots.back();
            summary = {{"steps", run.steps},
                       {"final_time", last.t},
                       {"final_sup_norm", sup_norm(last.u)},
                       {"final_mean", mean(last.u)},
                       {"final_slope", run.slope_series.back().second},
                       {"final_lipschitz", discrete_lipschitz(last.u)}};
            break;
        }
        case Mode::ergodic_vd:
        case Mode::ergodic_lt: {
            const ErgodicPair pair = cfg.mode == Mode::ergodic_vd
                                         ? vanishing_discount(op, cfg.delta_schedule, cfg.tol, cfg.max_iter)
                                         : long_time_pair(op, initial(cfg), cfg.T, effective_window(cfg), cfg.tol);
            write_json(dir, "ergodic_pair.json", to_json(pair), res.files);
            write_field(dir, "v.csv", pair.v, res.files);
            summary = to_json(pair);
            break;
        }
        case Mode::convergence: {
            const ErgodicPair pair = vanishing_discount(op, cfg.delta_schedule, cfg.tol, cfg.max_iter);
            const CauchyRun run = solve_cauchy(initial(cfg), op, cfg.T, cfg.snapshot_times);
            const ConvergenceReport rep = convergence_report(run, pair);
            write_json(dir, "ergodic_pair.json", to_json(pair), res.files);
            write_field(dir, "v.csv", pair.v, res.files);
            write_stream(dir, "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(run, os); }, res.files);
            write_stream(dir, "convergence.csv", [&](std::ostream& os) { write_convergence_csv(rep, os); }, res.files);
            summary = convergence_summary(rep, pair);
            summary["lambda"] = pair.lambda;
            summary["residual"] = pair.residual;
            break;
        }
        case Mode::audit: {
            if (write_audits(run_audits(cfg), dir, res.files, summary) > 0) res.exit_code = exit_tolerance_failure;
            break;
        }
        case Mode::reproduce:
            break;
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest{{"library", "pide"},
                  {"version", kLibraryVersion},
                  {"started_utc", started},
                  {"wall_time_s", wall},
                  {"config", cfg.source},
                  {"resolved", resolved(cfg)},
                  {"results", summary},
                  {"exit_code", res.exit_code},
                  {"files", res.files}};
    std::vector<std::string> ignored;
    write_json(dir, "manifest.json", manifest, ignored);
    res.files.insert(res.files.begin(), "manifest.json");
    return res;
}

ReproduceReport reproduce(const std::string& example_id, const std::string& output_dir) {
    const ExampleCatalogEntry& entry = find_example(example_id);
    const auto start = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    const ExperimentConfig cfg = parse_config(entry.config);
    const fs::path dir(output_dir);
    fs::create_directories(dir);
    std::vector<std::string> files;

    ReproduceReport rep;
    rep.id = entry.id;
    json& m = rep.metrics;
    write_audits(run_audits(cfg), dir, files, m);

    const SpatialOperator op(cfg.problem);
    const ErgodicPair vd = vanishing_discount(op, cfg.delta_schedule, cfg.tol, cfg.max_iter);
    const ErgodicPair lt = long_time_pair(op, initial(cfg), cfg.T, effective_window(cfg), 1e-6);
    write_json(dir, "ergodic_pair.json", to_json(vd), files);
    write_field(dir, "v.csv", vd.v, files);
    write_json(dir, "ergodic_pair_long_time.json", to_json(lt), files);
    write_field(dir, "v_long_time.csv", lt.v, files);

    double bound_excess = 0.0;
    for (double b : vd.bound_series) bound_excess = std::max(bound_excess, b - vd.bound);
    m["lambda_vd"] = vd.lambda;
    m["lambda_lt"] = lt.lambda;
    m["lambda_gap"] = std::abs(vd.lambda - lt.lambda);
    m["residual_vd"] = vd.residual;
    m["residual_lt"] = lt.residual;
    m["lt_settled"] = lt.settled;
    m["proxies_monotone"] = vd.proxies_monotone;
    m["bound_excess"] = bound_excess;
    m["max_discount_residual"] = *std::max_element(vd.discount_residuals.begin(), vd.discount_residuals.end());

    if (cfg.mode == Mode::convergence) {
        const CauchyRun run = solve_cauchy(initial(cfg), op, cfg.T, cfg.snapshot_times);
        const ConvergenceReport conv = convergence_report(run, vd);
        write_stream(dir, "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(run, os); }, files);
        write_stream(dir, "convergence.csv", [&](std::ostream& os) { write_convergence_csv(conv, os); }, files);
        m.update(convergence_summary(conv, vd));
    }

    rep.pass = true;
    for (const auto& e : entry.expected) {
        if (!m.contains(e.metric)) throw Error(Errc::invalid_argument, "metric " + e.metric + " was not computed");
        const double value = m[e.metric].get<double>();
        const bool ok = std::abs(value - e.value) <= e.tolerance;
        rep.rows.push_back({e.metric, value, e.value, e.tolerance, e.basis, ok});
        rep.pass = rep.pass && ok;
    }
    write_stream(dir, "reproduce.csv", [&](std::ostream& os) {
        os << "metric,value,expected,tolerance,basis,pass\n";
        for (const auto& r : rep.rows) {
            os << r.metric << ',' << format_real(r.value) << ',' << format_real(r.expected) << ','
               << format_real(r.tolerance) << ',' << r.basis << ',' << (r.pass ? "true" : "false") << '\n';
        }
    }, files);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest{{"library", "pide"},
                  {"version", kLibraryVersion},
                  {"started_utc", started},
                  {"wall_time_s", wall},
                  {"example_id", entry.id},
                  {"description", entry.description},
                  {"config", entry.config},
                  {"resolved", resolved(cfg)},
                  {"results", m},
                  {"pass", rep.pass},
                  {"files", files}};
    std::vector<std::string> ignored;
    write_json(dir, "manifest.json", manifest, ignored);
    return rep;
}

}  // namespace pide
