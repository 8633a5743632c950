#pragma once

#include <memory>
#include <vector>

#include "pide/levy.hpp"
#include "pide/torus.hpp"

namespace pide {

/// -a(x) Laplacian on the axes of `block` (a >= 0).
struct LocalTermSpec {
    Block block;
    GridField a;
};

/// b(x) |D_block u|^k. b may change sign; k >= 0.
struct GradientTermSpec {
    Block block;
    GridField b;
    double k = 1.0;
};

/// Spatial part of  du/dt + F1 + F2 + H(Du) = f  with linear local/nonlocal
/// diffusions and power-type gradient terms.
struct ProblemSpec {
    explicit ProblemSpec(const TorusGrid& g) : grid(g), f(g) {}

    TorusGrid grid;
    std::vector<LocalTermSpec> local_terms;
    std::vector<NonlocalOperatorSpec> nonlocal_terms;
    std::vector<GradientTermSpec> gradient_terms;
    GridField f;
    /// Exponent m of the designated H(p) = |p|^m term, used by the assumption audits.
    double hamiltonian_exponent = 1.0;
};

/// Checks grid consistency, finite data, a >= 0, k >= 0, and returns the
/// ellipticity coverage: the minimum over nodes and axes of the summed
/// diffusion strength acting on that axis. Throws Errc::degenerate if it is not positive.
double validate(const ProblemSpec& problem);

/// a(x) sum over block axes of (2u(i) - u(i-1) - u(i+1)) / h^2.
GridField local_laplacian(const GridField& u, const LocalTermSpec& term);

/// Rouy-Tourin sqrt(sum max(D-u, -D+u, 0)^2) over the block axes.
GridField upwind_grad_plus(const GridField& u, Block block);

/// Mirror stencil sqrt(sum max(D+u, -D-u, 0)^2).
GridField upwind_grad_minus(const GridField& u, Block block);

/// b+ (upwind_grad_plus)^k - b- (upwind_grad_minus)^k. Throws for k < 0.
GridField gradient_term(const GridField& u, const GradientTermSpec& term);

/// A ProblemSpec with its nonlocal operators prepared (FFT plans, quadrature
/// weights). Evaluation is const and thread-safe.
class SpatialOperator {
public:
    /// `osc_reference` sizes the truncation radius of quadrature terms; a
    /// non-positive value selects 1 + osc(f) + sup|f|.
    explicit SpatialOperator(ProblemSpec problem, double osc_reference = 0.0);

    const ProblemSpec& problem() const noexcept { return problem_; }
    const TorusGrid& grid() const noexcept { return problem_.grid; }
    const std::vector<NonlocalOperator>& nonlocal() const noexcept { return nonlocal_; }

    /// Sum of local, nonlocal and gradient terms minus f; du/dt = -apply(u).
    GridField apply(const GridField& u) const;

    /// Same without the source term.
    GridField apply_homogeneous(const GridField& u) const;

    /// Denominator of the CFL bound at state u (sum of per-term diagonal rates).
    double rate(const GridField& u) const;

    /// safety / rate(u). Throws Errc::degenerate when every rate vanishes.
    double cfl_timestep(const GridField& u, double safety) const;

private:
    void accumulate(const GridField& u, std::span<double> out) const;

    ProblemSpec problem_;
    std::vector<NonlocalOperator> nonlocal_;
    std::shared_ptr<const NeighborTable> neighbors_;
};

GridField apply_spatial_operator(const GridField& u, const ProblemSpec& problem);

double cfl_timestep(const ProblemSpec& problem, const GridField& u_current, double safety);

}  // namespace pide
