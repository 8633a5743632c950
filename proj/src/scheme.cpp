#include "pide/scheme.hpp"

#include "pide/error.hpp"

#include <algorithm>
#include <cmath>

namespace pide {

namespace {

std::vector<int> block_axes(const TorusGrid& grid, Block block) {
    auto axes = grid.axes(block);
    if (axes.empty()) throw Error(Errc::block_empty, "block " + to_string(block) + " has no axes on this grid");
    return axes;
}

double power(double t, double k) {
    if (k == 1.0) return t;
    if (k == 2.0) return t * t;
    return std::pow(t, k);
}

// Upwind magnitude at node i. `plus` selects max(D-u, -D+u, 0), otherwise max(D+u, -D-u, 0).
double upwind_at(const GridField& u, const NeighborTable& nb, std::size_t i, const std::vector<int>& axes,
                 bool plus, double inv_h) {
    auto one = [&](int a) {
        const double back = u[i] - u[nb.back(i, a)];
        const double fwd = u[nb.fwd(i, a)] - u[i];
        const double m = plus ? std::max(back, -fwd) : std::max(fwd, -back);
        return m > 0.0 ? m * inv_h : 0.0;
    };
    if (axes.size() == 1) return one(axes.front());
    double s = 0.0;
    for (int a : axes) {
        const double m = one(a);
        s += m * m;
    }
    return std::sqrt(s);
}

void require_grid(const GridField& field, const TorusGrid& grid, const char* what) {
    if (!(field.grid() == grid)) throw Error(Errc::grid_mismatch, std::string(what) + " lives on another grid");
}

void add_local(const GridField& u, const NeighborTable& nb, const LocalTermSpec& term, std::span<double> out) {
    const auto& g = u.grid();
    const auto axes = block_axes(g, term.block);
    const double inv_h2 = 1.0 / (g.h() * g.h());
    for (std::size_t i = 0; i < u.size(); ++i) {
        double s = 0.0;
        for (int a : axes) s += 2.0 * u[i] - u[nb.back(i, a)] - u[nb.fwd(i, a)];
        out[i] += term.a[i] * s * inv_h2;
    }
}

void add_gradient(const GridField& u, const NeighborTable& nb, const GradientTermSpec& term,
                  std::span<double> out) {
    if (term.k < 0.0) throw Error(Errc::invalid_argument, "gradient exponent k must be >= 0");
    const auto axes = block_axes(u.grid(), term.block);
    const double inv_h = 1.0 / u.grid().h();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double b = term.b[i];
        if (b > 0.0) {
            out[i] += b * power(upwind_at(u, nb, i, axes, true, inv_h), term.k);
        } else if (b < 0.0) {
            out[i] += b * power(upwind_at(u, nb, i, axes, false, inv_h), term.k);
        }
    }
}

}  // namespace

GridField local_laplacian(const GridField& u, const LocalTermSpec& term) {
    require_grid(term.a, u.grid(), "coefficient a");
    GridField out(u.grid());
    add_local(u, NeighborTable(u.grid()), term, out.values());
    return out;
}

GridField upwind_grad_plus(const GridField& u, Block block) {
    const auto axes = block_axes(u.grid(), block);
    const NeighborTable nb(u.grid());
    GridField out(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = upwind_at(u, nb, i, axes, true, 1.0 / u.grid().h());
    return out;
}

GridField upwind_grad_minus(const GridField& u, Block block) {
    const auto axes = block_axes(u.grid(), block);
    const NeighborTable nb(u.grid());
    GridField out(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = upwind_at(u, nb, i, axes, false, 1.0 / u.grid().h());
    return out;
}

GridField gradient_term(const GridField& u, const GradientTermSpec& term) {
    require_grid(term.b, u.grid(), "coefficient b");
    GridField out(u.grid());
    add_gradient(u, NeighborTable(u.grid()), term, out.values());
    return out;
}

double validate(const ProblemSpec& problem) {
    const auto& g = problem.grid;
    require_grid(problem.f, g, "source f");
    if (!all_finite(problem.f)) throw Error(Errc::non_finite, "source f is not finite");
    if (problem.local_terms.empty() && problem.nonlocal_terms.empty()) {
        throw Error(Errc::degenerate, "problem has no diffusive term");
    }
    // strength[i * dim + axis]
    std::vector<double> strength(g.size() * static_cast<std::size_t>(g.dim()), 0.0);
    auto add = [&](Block block, auto&& coeff) {
        for (int a : block_axes(g, block)) {
            for (std::size_t i = 0; i < g.size(); ++i) strength[i * g.dim() + a] += coeff(i);
        }
    };
    for (const auto& t : problem.local_terms) {
        require_grid(t.a, g, "coefficient a");
        if (!all_finite(t.a) || min_value(t.a) < 0.0) {
            throw Error(Errc::invalid_argument, "local coefficient a must be finite and >= 0");
        }
        add(t.block, [&](std::size_t i) { return t.a[i]; });
    }
    for (const auto& t : problem.nonlocal_terms) {
        if (t.jump.kind == JumpFunctionSpec::Kind::scaled) {
            if (!t.jump.scale) throw Error(Errc::invalid_argument, "scaled jump without a2");
            require_grid(*t.jump.scale, g, "jump scale a2");
            add(t.block, [&](std::size_t i) { return (*t.jump.scale)[i]; });
        } else {
            add(t.block, [](std::size_t) { return 1.0; });
        }
    }
    for (const auto& t : problem.gradient_terms) {
        require_grid(t.b, g, "coefficient b");
        if (!all_finite(t.b)) throw Error(Errc::non_finite, "coefficient b is not finite");
        if (t.k < 0.0) throw Error(Errc::invalid_argument, "gradient exponent k must be >= 0");
        block_axes(g, t.block);
    }
    const double coverage = *std::min_element(strength.begin(), strength.end());
    if (!(coverage > 0.0)) {
        throw Error(Errc::degenerate, "ellipticity coverage vanishes at some node/axis");
    }
    return coverage;
}

SpatialOperator::SpatialOperator(ProblemSpec problem, double osc_reference) : problem_(std::move(problem)) {
    validate(problem_);
    neighbors_ = std::make_shared<const NeighborTable>(problem_.grid);
    if (!(osc_reference > 0.0)) osc_reference = 1.0 + oscillation(problem_.f) + sup_norm(problem_.f);
    nonlocal_.reserve(problem_.nonlocal_terms.size());
    for (const auto& spec : problem_.nonlocal_terms) nonlocal_.emplace_back(spec, problem_.grid, osc_reference);
}

void SpatialOperator::accumulate(const GridField& u, std::span<double> out) const {
    for (const auto& t : problem_.local_terms) add_local(u, *neighbors_, t, out);
    for (const auto& op : nonlocal_) op.apply_add(u, out);
    for (const auto& t : problem_.gradient_terms) add_gradient(u, *neighbors_, t, out);
}

GridField SpatialOperator::apply_homogeneous(const GridField& u) const {
    require_grid(u, problem_.grid, "field");
    GridField out(u.grid());
    accumulate(u, out.values());
    return out;
}

GridField SpatialOperator::apply(const GridField& u) const {
    GridField out = apply_homogeneous(u);
    out -= problem_.f;
    return out;
}

double SpatialOperator::rate(const GridField& u) const {
    const auto& g = problem_.grid;
    const double h = g.h();
    double r = 0.0;
    for (const auto& t : problem_.local_terms) {
        const double db = static_cast<double>(g.axes(t.block).size());
        r += 2.0 * db * max_value(t.a) / (h * h);
    }
    for (const auto& op : nonlocal_) r += op.rate_bound();
    if (!problem_.gradient_terms.empty()) {
        const double lip = discrete_lipschitz(u);
        for (const auto& t : problem_.gradient_terms) {
            const double db = static_cast<double>(g.axes(t.block).size());
            // t^k is not Lipschitz at 0 for k < 1; the bound then uses max(G, 1).
            const double G = t.k < 1.0 ? std::max(lip, 1.0) : lip;
            const double slope = t.k == 1.0 ? 1.0 : t.k * std::pow(G, t.k - 1.0);
            r += slope * sup_norm(t.b) * 2.0 * db / h;
        }
    }
    return r;
}

double SpatialOperator::cfl_timestep(const GridField& u, double safety) const {
    if (!(safety > 0.0 && safety <= 1.0)) throw Error(Errc::invalid_argument, "safety must lie in (0,1]");
    const double r = rate(u);
    if (!(r > 0.0)) throw Error(Errc::degenerate, "all CFL rates vanish");
    return safety / r;
}

GridField apply_spatial_operator(const GridField& u, const ProblemSpec& problem) {
    return SpatialOperator(problem).apply(u);
}

double cfl_timestep(const ProblemSpec& problem, const GridField& u_current, double safety) {
    return SpatialOperator(problem).cfl_timestep(u_current, safety);
}

}  // namespace pide
