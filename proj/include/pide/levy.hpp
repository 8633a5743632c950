#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "pide/audit.hpp"
#include "pide/torus.hpp"

namespace pide {

/// Fractional kernel dz / |z|^{d_b + beta} on the block's ambient space R^{d_b}.
struct LevyMeasureSpec {
    double beta = 1.5;
    int block_dim = 1;
};

/// j(x, z) = z (identity) or j(x, z) = a2(x)^{1/beta} z (scaled).
struct JumpFunctionSpec {
    enum class Kind { identity, scaled };

    Kind kind = Kind::identity;
    std::optional<GridField> scale;  // a2 >= 0, only for Kind::scaled

    static JumpFunctionSpec identity() { return {}; }
    static JumpFunctionSpec scaled(GridField a2) { return {Kind::scaled, std::move(a2)}; }
};

enum class Discretization { spectral, quadrature };
enum class Normalization { normalized_multiplier, raw_kernel };

struct NonlocalOperatorSpec {
    Block block = Block::full;
    Discretization discretization = Discretization::spectral;
    LevyMeasureSpec measure;
    JumpFunctionSpec jump;
    /// Quadrature only. Zero selects the tail-budget radius (see default_truncation_radius).
    double truncation_radius = 0.0;
    /// Quadrature only. Zero selects h/2.
    double inner_cut = 0.0;
    Normalization normalization = Normalization::normalized_multiplier;
};

/// Budget for the mass dropped beyond the truncation radius.
inline constexpr double kTailBudget = 1e-8;

/// mu({|z| > R}) for the one-dimensional raw kernel: 2 / (beta R^beta).
double tail_mass(double beta, double radius);

/// Smallest R >= 1 with 2 * osc * mu({|z| > R}) < kTailBudget.
double default_truncation_radius(double beta, double osc);

/// Integral over R of (1 - cos s) / |s|^{1+beta}: the ratio between the raw
/// one-dimensional kernel operator and the (2 pi |k|)^beta multiplier.
double fractional_kernel_constant(double beta);

/// Periodic Fourier multiplier (2 pi |k|)^beta on the axes of `block`.
/// Throws Errc::block_empty if the block has no axes on this grid.
GridField apply_spectral_fractional(const GridField& u, double beta, Block block);

/// Compensated singular quadrature of -I[u], with product integration of the
/// periodic linear interpolant outside the inner cut and a second-difference
/// inner contribution. One-dimensional blocks only.
GridField apply_quadrature_levy(const GridField& u, const NonlocalOperatorSpec& spec);

/// Same, with a caller-supplied gradient (one field per grid axis) for the compensator.
GridField apply_quadrature_levy(const GridField& u, const NonlocalOperatorSpec& spec,
                                std::span<const GridField> grad_u);

/// Central-difference gradient, one field per axis.
std::vector<GridField> central_gradient(const GridField& u);

/// A nonlocal operator prepared for repeated application on one grid.
/// Holds FFT plans or quadrature weights; immutable and shareable after construction.
class NonlocalOperator {
public:
    /// `osc_reference` feeds the automatic truncation radius of quadrature operators.
    NonlocalOperator(const NonlocalOperatorSpec& spec, const TorusGrid& grid, double osc_reference = 1.0);

    const NonlocalOperatorSpec& spec() const noexcept { return spec_; }

    GridField apply(const GridField& u) const;

    /// Adds scale * op(u) into `out`.
    void apply_add(const GridField& u, std::span<double> out, double scale = 1.0) const;

    /// Quadrature compensator uses `grad` (one field per axis) instead of central differences.
    void apply_add(const GridField& u, std::span<const GridField> grad, std::span<double> out,
                   double scale = 1.0) const;

    /// Upper bound of the operator's diagonal rate: max multiplier for spectral,
    /// max (weight sum + inner coefficient) for quadrature.
    double rate_bound() const noexcept { return rate_bound_; }

    /// Quadrature only: the resolved truncation radius and inner cut.
    double truncation_radius() const noexcept { return radius_; }
    double inner_cut() const noexcept { return inner_cut_; }

    struct Impl;

private:
    NonlocalOperatorSpec spec_;
    double rate_bound_ = 0.0;
    double radius_ = 0.0;
    double inner_cut_ = 0.0;
    std::shared_ptr<const Impl> impl_;
};

/// (M1): integral of min(|z|^2, 1) against the measure.
AuditReport audit_M1(const LevyMeasureSpec& measure);

/// (M2): g(delta) = integral over delta < |z| < 1 of |z| dmu, and its power-law exponent.
/// Throws Errc::fewer_than_three for fewer than three deltas.
AuditReport audit_M2(const LevyMeasureSpec& measure, std::span<const double> deltas);

/// (M3)/(M4) for j(x,z) = alpha(x) z: sampled Lipschitz quotient of alpha at
/// resolution n and 4n on the unit torus of dimension `dim`. Passes when the
/// quotient does not grow under refinement.
AuditReport audit_jump_lipschitz(const std::function<double(const Point&)>& alpha, int dim, int n);

}  // namespace pide
