#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pide/cauchy.hpp"
#include "pide/error.hpp"
#include "pide/scheme.hpp"
#include "support.hpp"

using namespace pide;

namespace {

GridField peak(const TorusGrid& g) {
    GridField u(g);
    u[1] = 1.0;
    return u;
}

ProblemSpec heat(const TorusGrid& g, double a = 1.0) {
    ProblemSpec p(g);
    p.local_terms.push_back({Block::full, GridField(g, a)});
    return p;
}

NonlocalOperatorSpec spectral(Block block, double beta = 1.5) {
    NonlocalOperatorSpec s;
    s.block = block;
    s.measure.beta = beta;
    return s;
}

}  // namespace

TEST_CASE("local_laplacian") {
    const TorusGrid g = make_grid(1, 0, 64);
    const LocalTermSpec unit{Block::full, GridField(g, 1.0)};
    CHECK(sup_norm(local_laplacian(GridField(g, 3.0), unit)) == 0.0);

    const GridField c = testing::cosine(g);
    const GridField out = local_laplacian(c, unit);
    const double sh = oracle::laplacian_symbol(64);
    CHECK(sh == doctest::Approx(4 * M_PI * M_PI).epsilon(2e-3));
    CHECK(testing::max_abs_diff(out, sh * c) < 1e-9);

    CHECK(sup_norm(local_laplacian(c, {Block::full, GridField(g, 0.0)})) == 0.0);

    const TorusGrid g2 = make_grid(1, 1, 16);
    const GridField c2 = testing::cosine(g2, 1);
    CHECK(sup_norm(local_laplacian(c2, {Block::x1, GridField(g2, 1.0)})) < 1e-12);
    CHECK(testing::max_abs_diff(local_laplacian(c2, {Block::x2, GridField(g2, 2.0)}), 2.0 * oracle::laplacian_symbol(16) * c2) < 1e-9);
}

TEST_CASE("upwind gradients") {
    const TorusGrid g = make_grid(1, 0, 8);
    CHECK(sup_norm(upwind_grad_plus(GridField(g, 1.0), Block::full)) == 0.0);
    CHECK(sup_norm(upwind_grad_minus(GridField(g, 1.0), Block::full)) == 0.0);

    const GridField p = peak(g);
    const GridField plus = upwind_grad_plus(p, Block::full);
    CHECK(plus[1] == 8.0);
    CHECK(plus[5] == 0.0);

    // Mirror stencil: at the maximum both one-sided slopes point downhill.
    const GridField minus = upwind_grad_minus(p, Block::full);
    CHECK(minus[1] == 0.0);
    CHECK(minus[0] == 8.0);
    CHECK(minus[2] == 8.0);
    CHECK(minus[5] == 0.0);

    const GridField saw = sample([](const Point& x) { return x[0]; }, g);
    CHECK(upwind_grad_plus(saw, Block::full)[3] == doctest::Approx(1.0));
    CHECK(upwind_grad_minus(saw, Block::full)[3] == doctest::Approx(1.0));
}

TEST_CASE("property: minus stencil mirrors plus stencil") {
    std::mt19937_64 rng(41);
    const TorusGrid g = make_grid(1, 1, 16);
    for (int trial = 0; trial < 20; ++trial) {
        const GridField u = testing::random_field(g, rng);
        for (Block b : {Block::x1, Block::x2, Block::full}) {
            CHECK(testing::max_abs_diff(upwind_grad_minus(u, b), upwind_grad_plus(-1.0 * u, b)) == 0.0);
        }
    }
}

TEST_CASE("gradient_term") {
    const TorusGrid g = make_grid(1, 0, 8);
    const GridField p = peak(g);
    CHECK(sup_norm(gradient_term(p, {Block::full, GridField(g, 0.0), 2.0})) == 0.0);
    CHECK(sup_norm(gradient_term(GridField(g, 5.0), {Block::full, GridField(g, 3.0), 1.5})) == 0.0);
    CHECK(gradient_term(p, {Block::full, GridField(g, 1.0), 2.0})[1] == 64.0);
    // Negative b selects the mirror stencil.
    const GridField neg = gradient_term(p, {Block::full, GridField(g, -1.0), 2.0});
    CHECK(neg[1] == 0.0);
    CHECK(neg[2] == -64.0);
    CHECK_THROWS_AS(gradient_term(p, {Block::full, GridField(g, 1.0), -0.5}), Error);
}

TEST_CASE("apply_spatial_operator") {
    const TorusGrid g = make_grid(1, 1, 16);
    ProblemSpec p(g);
    p.local_terms.push_back({Block::x1, GridField(g, 1.0)});
    p.nonlocal_terms.push_back(spectral(Block::x2));
    p.gradient_terms.push_back({Block::full, GridField(g, 1.0), 2.0});
    CHECK(sup_norm(apply_spatial_operator(GridField(g, 2.0), p)) < 1e-12);

    p.f = GridField(g, 1.0);
    const GridField out = apply_spatial_operator(GridField(g, 0.0), p);
    for (double v : out.values()) CHECK(v == doctest::Approx(-1.0));

    ProblemSpec s(g);
    s.nonlocal_terms.push_back(spectral(Block::full));
    s.f = sample([](const Point& x) { return std::sin(2 * M_PI * x[0]); }, g);
    const GridField c = testing::cosine(g, 1);
    CHECK(testing::max_abs_diff(apply_spatial_operator(c, s), std::pow(2 * M_PI, 1.5) * c - s.f) < 1e-11);
}

TEST_CASE("cfl_timestep") {
    const TorusGrid g = make_grid(1, 0, 64);
    ProblemSpec p = heat(g);
    CHECK(cfl_timestep(p, GridField(g), 1.0) == doctest::Approx(1.0 / 8192).epsilon(1e-14));
    p.gradient_terms.push_back({Block::full, GridField(g, 1.0), 1.0});
    CHECK(cfl_timestep(p, GridField(g), 1.0) < 1.0 / 8192);
    CHECK_THROWS_AS(cfl_timestep(p, GridField(g), 1.5), Error);

    // Superlinear terms tighten the step as the state steepens.
    ProblemSpec q = heat(g);
    q.gradient_terms.push_back({Block::full, GridField(g, 1.0), 2.0});
    CHECK(cfl_timestep(q, 3.0 * testing::cosine(g), 1.0) < cfl_timestep(q, testing::cosine(g), 1.0));

    try {
        cfl_timestep(heat(g, 0.0), GridField(g), 1.0);
        FAIL("expected degenerate");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate);
    }
}

TEST_CASE("validate: coverage and consistency") {
    const TorusGrid g = make_grid(1, 1, 16);
    ProblemSpec p(g);
    p.local_terms.push_back({Block::x1, GridField(g, 0.5)});
    CHECK_THROWS_AS(validate(p), Error);  // x2 uncovered
    p.nonlocal_terms.push_back(spectral(Block::x2));
    CHECK(validate(p) == doctest::Approx(0.5));

    ProblemSpec none(g);
    CHECK_THROWS_AS(validate(none), Error);

    ProblemSpec neg = heat(make_grid(1, 0, 16), -1.0);
    CHECK_THROWS_AS(validate(neg), Error);

    ProblemSpec mismatch = heat(make_grid(1, 0, 16));
    mismatch.f = GridField(make_grid(1, 0, 32));
    CHECK_THROWS_AS(validate(mismatch), Error);

    // a1 + a2 covers even though each vanishes somewhere.
    const TorusGrid c = make_grid(1, 0, 64);
    ProblemSpec composed(c);
    composed.local_terms.push_back({Block::full, sample([](const Point& x) { return std::max(0.0, std::cos(2 * M_PI * x[0])); }, c)});
    NonlocalOperatorSpec q;
    q.discretization = Discretization::quadrature;
    q.jump = JumpFunctionSpec::scaled(sample([](const Point& x) { return std::max(0.0, -std::cos(2 * M_PI * x[0])) + 0.1; }, c));
    composed.nonlocal_terms.push_back(q);
    CHECK(validate(composed) > 0.09);
}

TEST_CASE("property: adding a constant leaves the operator unchanged") {
    std::mt19937_64 rng(42);
    for (const auto& entry : example_catalog()) {
        CAPTURE(entry.id);
        const ExperimentConfig cfg = parse_config(entry.config);
        const SpatialOperator op(cfg.problem);
        for (int trial = 0; trial < 5; ++trial) {
            const GridField u = testing::random_smooth(cfg.problem.grid, rng);
            const double c = 0.25 * (trial + 1);
            const GridField a = op.apply(u);
            CHECK(testing::max_abs_diff(op.apply(u + c), a) <= 1e-9 * (1.0 + sup_norm(a)));
        }
    }
}

TEST_CASE("property: translation equivariance with translated coefficients") {
    std::mt19937_64 rng(43);
    const TorusGrid g = make_grid(1, 1, 16);
    auto build = [&](int shift) {
        auto coef = [&](double base, int axis) {
            return translate(sample([=](const Point& x) { return base + 0.5 * std::cos(2 * M_PI * x[axis]); }, g), axis, shift);
        };
        ProblemSpec p(g);
        p.local_terms.push_back({Block::x1, coef(1.0, 0)});
        p.nonlocal_terms.push_back(spectral(Block::x2));
        p.gradient_terms.push_back({Block::x1, coef(0.0, 0), 1.0});
        p.gradient_terms.push_back({Block::full, coef(1.0, 0), 2.0});
        p.f = translate(sample([](const Point& x) { return std::cos(2 * M_PI * x[0]) * std::sin(2 * M_PI * x[1]); }, g), 0, shift);
        return p;
    };
    const ProblemSpec base = build(0);
    const ProblemSpec moved = build(3);
    for (int trial = 0; trial < 5; ++trial) {
        const GridField u = testing::random_field(g, rng);
        CHECK(testing::max_abs_diff(apply_spatial_operator(translate(u, 0, 3), moved),
                                    translate(apply_spatial_operator(u, base), 0, 3)) < 1e-9);
    }
}

TEST_CASE("property: k = 1 gradient term is positively homogeneous") {
    std::mt19937_64 rng(44);
    const TorusGrid g = make_grid(1, 1, 16);
    const GradientTermSpec t{Block::full, sample([](const Point& x) { return 1.0 + 0.5 * std::cos(2 * M_PI * x[1]); }, g), 1.0};
    for (int trial = 0; trial < 20; ++trial) {
        const GridField u = testing::random_field(g, rng);
        const double s = 0.1 + 3.0 * trial / 20.0;
        CHECK(testing::max_abs_diff(gradient_term(s * u, t), s * gradient_term(u, t)) <= 1e-12 * s * sup_norm(gradient_term(u, t)));
    }
}

TEST_CASE("property: one explicit step preserves order on every catalog problem") {
    std::mt19937_64 rng(45);
    for (const auto& entry : example_catalog()) {
        CAPTURE(entry.id);
        const ExperimentConfig cfg = parse_config(entry.config);
        const SpatialOperator op(cfg.problem);
        const bool spectral = testing::uses_spectral(cfg.problem);
        const double h = cfg.problem.grid.h();
        for (int trial = 0; trial < 20; ++trial) {
            const GridField u = trial % 2 ? testing::random_smooth(cfg.problem.grid, rng) : testing::random_field(cfg.problem.grid, rng, 0.2);
            const GridField w = spectral ? testing::smooth_gap(u, rng, 0.2) : testing::dominating(u, rng, 0.2);
            const double dt = std::min(op.cfl_timestep(u, 1.0), op.cfl_timestep(w, 1.0));
            const GridField u1 = step_explicit(u, op, dt);
            const GridField w1 = step_explicit(w, op, dt);
            const double tol = spectral ? 10.0 * dt * h * h : 0.0;
            double worst = -INFINITY;
            for (std::size_t i = 0; i < u1.size(); ++i) worst = std::max(worst, u1[i] - w1[i]);
            CHECK(worst <= tol);
        }
    }
}

TEST_CASE("spectral multiplier has positive off-diagonal weights") {
    const TorusGrid g = make_grid(1, 0, 64);
    GridField delta(g);
    delta[0] = 1.0;
    const GridField k = apply_spectral_fractional(delta, 1.5, Block::full);
    CHECK(k[0] > 0.0);
    CHECK(k[1] < 0.0);
    // lag-2 weight
    CHECK(k[2] > 0.0);
}
