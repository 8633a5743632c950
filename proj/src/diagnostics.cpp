#include "pide/diagnostics.hpp"

#include "pide/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace pide {

ConvergenceReport convergence_report(const CauchyRun& run, const ErgodicPair& pair) {
    if (!(run.u0.grid() == pair.v.grid())) throw Error(Errc::grid_mismatch, "run and ergodic pair use different grids");
    ConvergenceReport report;
    for (const auto& snap : run.snapshots) {
        double hi = -INFINITY;
        double lo = INFINITY;
        const double shift = pair.lambda * snap.t;
        for (std::size_t i = 0; i < snap.u.size(); ++i) {
            const double w = snap.u[i] - shift - pair.v[i];
            hi = std::max(hi, w);
            lo = std::min(lo, w);
        }
        if (!report.m_series.empty()) {
            report.monotone_violation = std::max(report.monotone_violation, hi - report.m_series.back());
        }
        report.times.push_back(snap.t);
        report.m_series.push_back(hi);
        report.min_series.push_back(lo);
        report.osc_series.push_back(hi - lo);
    }
    if (!report.m_series.empty()) report.m_bar = report.m_series.back();
    return report;
}

void write_convergence_csv(const ConvergenceReport& report, std::ostream& os) {
    os << "t,m,min,osc\n";
    for (std::size_t k = 0; k < report.times.size(); ++k) {
        os << format_real(report.times[k]) << ',' << format_real(report.m_series[k]) << ','
           << format_real(report.min_series[k]) << ',' << format_real(report.osc_series[k]) << '\n';
    }
}

AuditReport audit_Ha(double m, const std::vector<std::vector<double>>& sample_p, const std::vector<double>& k_schedule) {
    if (sample_p.empty() || k_schedule.empty()) throw Error(Errc::invalid_argument, "audit_Ha needs samples and a k schedule");
    for (std::size_t i = 1; i < k_schedule.size(); ++i) {
        if (!(k_schedule[i] > k_schedule[i - 1])) throw Error(Errc::invalid_argument, "k schedule must increase");
    }
    AuditReport report{"H-a", {{"m", m}, {"k_max", k_schedule.back()}}, {}, false};
    bool decreasing = true;
    double max_change = 0.0;
    double max_limit = 0.0;
    for (const auto& p : sample_p) {
        double norm2 = 0.0;
        for (double x : p) norm2 += x * x;
        const double r = std::sqrt(norm2);
        if (!(r > 0.0)) throw Error(Errc::invalid_argument, "audit_Ha samples must be nonzero");
        std::vector<double> series;
        for (double k : k_schedule) series.push_back(std::pow(k * r, m) / k);
        for (std::size_t i = 1; i < series.size(); ++i) {
            if (!(series[i] < series[i - 1])) decreasing = false;
        }
        if (series.size() > 1) {
            const double a = series[series.size() - 2];
            const double b = series.back();
            max_change = std::max(max_change, std::abs(b - a) / std::max(std::abs(b), 1e-300));
        }
        max_limit = std::max(max_limit, series.back());
        report.computed_values.insert(report.computed_values.end(), series.begin(), series.end());
    }
    report.parameters["max_relative_change"] = max_change;
    report.parameters["limit_max"] = m < 1.0 ? 0.0 : max_limit;
    if (m == 1.0) {
        report.pass = max_change < 1e-3;
    } else if (m < 1.0) {
        report.pass = decreasing && k_schedule.size() > 1;
    }
    return report;
}

AuditReport audit_Hb(double m, double mu0, double r0, int samples) {
    if (!(m > 1.0)) throw Error(Errc::invalid_argument, "audit_Hb needs m > 1");
    if (!(mu0 > 0.0 && mu0 < 1.0) || !(r0 > 0.0) || samples < 2) {
        throw Error(Errc::invalid_argument, "audit_Hb needs mu0 in (0,1), r0 > 0, samples >= 2");
    }
    constexpr double mu_top = 1.0 - 1e-4;
    AuditReport report{"H-b", {{"m", m}, {"mu0", mu0}, {"r0", r0}, {"samples", double(samples)}}, {}, false};
    double eta = INFINITY;
    for (int i = 0; i < samples; ++i) {
        const double mu = mu0 + (mu_top - mu0) * i / (samples - 1);
        for (int j = 0; j < samples; ++j) {
            const double r = r0 * (1.0 + 9.0 * j / (samples - 1));
            // mu H(p / mu) - H(p) = (mu^{1-m} - 1) |p|^m
            const double gain = std::expm1((1.0 - m) * std::log(mu)) * std::pow(r, m);
            const double ratio = gain / ((1.0 - mu) * std::pow(r, m));
            eta = std::min(eta, ratio);
            if (j == 0) report.computed_values.push_back(ratio);
        }
    }
    report.parameters["eta_fitted"] = eta;
    report.pass = eta >= (m - 1.0) * (1.0 - 1e-9);
    return report;
}

AuditReport audit_propH(double m, const std::vector<double>& c_schedule, int samples, double r0) {
    if (!(m > 1.0)) throw Error(Errc::invalid_argument, "audit_propH needs m > 1");
    if (c_schedule.empty() || samples < 2 || !(r0 > 0.0)) {
        throw Error(Errc::invalid_argument, "audit_propH needs a c schedule, samples >= 2, r0 > 0");
    }
    constexpr double eta = 0.5;
    AuditReport report{"propH", {{"m", m}, {"eta", eta}, {"r0", r0}, {"samples", double(samples)}}, {}, false};
    double worst = INFINITY;
    for (double c : c_schedule) {
        if (!(c >= 1.0)) throw Error(Errc::invalid_argument, "audit_propH needs c >= 1");
        const double cm = std::pow(c, m - 1.0);
        double worst_c = INFINITY;
        for (int j = 0; j < samples; ++j) {
            const double pm = std::pow(r0 * j / (samples - 1), m);
            const double lhs = cm * pm - pm;
            const double rhs = eta * cm * pm - 1.0 / eta;
            worst_c = std::min(worst_c, lhs - rhs);
        }
        report.computed_values.push_back(worst_c);
        worst = std::min(worst, worst_c);
    }
    report.parameters["worst_margin"] = worst;
    report.pass = worst >= 0.0;
    return report;
}

}  // namespace pide
