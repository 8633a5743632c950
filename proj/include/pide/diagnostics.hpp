#pragma once

#include <iosfwd>
#include <vector>

#include "pide/audit.hpp"
#include "pide/cauchy.hpp"
#include "pide/ergodic.hpp"

namespace pide {

/// Series of w(t) = u(., t) - lambda t - v over the snapshots of a run.
struct ConvergenceReport {
    std::vector<double> times;
    std::vector<double> m_series;    // max w
    std::vector<double> min_series;  // min w
    std::vector<double> osc_series;  // max w - min w
    double m_bar = 0.0;              // m at the final snapshot
    double monotone_violation = 0.0; // max positive jump of m between snapshots
};

/// Throws Errc::grid_mismatch when the pair and the run live on different grids.
ConvergenceReport convergence_report(const CauchyRun& run, const ErgodicPair& pair);

/// `t,m,min,osc`.
void write_convergence_csv(const ConvergenceReport& report, std::ostream& os);

/// Recession limit (1/k) H(k p) for H(p) = |p|^m along an increasing k schedule.
/// m = 1 passes when the last relative change is below 1e-3, m < 1 when the values
/// decrease towards 0; m > 1 diverges and fails. Throws on empty input.
AuditReport audit_Ha(double m, const std::vector<std::vector<double>>& sample_p, const std::vector<double>& k_schedule);

/// Best eta in mu H(p / mu) - H(p) >= eta (1 - mu) |p|^m over mu in [mu0, 1),
/// |p| in [r0, 10 r0]. Passes when eta >= m - 1. Throws for m <= 1.
AuditReport audit_Hb(double m, double mu0, double r0, int samples);

/// Worst margin of c^{-1} H(c p) - H(p) - (eta c^{m-1} |p|^m - 1 / eta) with eta = 1/2,
/// over the c schedule and |p| in [0, r0]. Passes when the margin is >= 0.
AuditReport audit_propH(double m, const std::vector<double>& c_schedule, int samples, double r0 = 1.0);

}  // namespace pide
