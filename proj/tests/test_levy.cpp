#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pide/error.hpp"
#include "pide/levy.hpp"
#include "support.hpp"

using namespace pide;

namespace {

NonlocalOperatorSpec quadrature(double beta, Normalization norm = Normalization::raw_kernel, Block block = Block::full) {
    NonlocalOperatorSpec s;
    s.block = block;
    s.discretization = Discretization::quadrature;
    s.measure.beta = beta;
    s.normalization = norm;
    return s;
}

double relative_mode_error(const GridField& out, const GridField& mode, double coeff) {
    double err = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) err = std::max(err, std::abs(out[i] - coeff * mode[i]));
    return err / std::abs(coeff);
}

}  // namespace

TEST_CASE("kernel constant matches both oracles") {
    for (double beta : {1.1, 1.3, 1.5, 1.7, 1.9}) {
        CAPTURE(beta);
        const double c = fractional_kernel_constant(beta);
        CHECK(c == doctest::Approx(oracle::kernel_constant(beta)).epsilon(1e-7));
        CHECK(c == doctest::Approx(oracle::kernel_constant_gamma(beta)).epsilon(1e-10));
    }
}

TEST_CASE("spectral operator: constants, eigenmodes, empty directions") {
    const TorusGrid g = make_grid(1, 0, 64);
    const GridField zero = apply_spectral_fractional(GridField(g, 4.0), 1.5, Block::full);
    CHECK(sup_norm(zero) < 1e-12);

    const GridField c = testing::cosine(g);
    const GridField out = apply_spectral_fractional(c, 1.5, Block::full);
    CHECK(std::pow(2 * M_PI, 1.5) == doctest::Approx(15.7496).epsilon(1e-5));
    CHECK(relative_mode_error(out, c, std::pow(2 * M_PI, 1.5)) < 1e-12);

    const TorusGrid g2 = make_grid(1, 1, 32);
    const GridField c2 = testing::cosine(g2, 1);
    CHECK(sup_norm(apply_spectral_fractional(c2, 1.5, Block::x1)) < 1e-12);
    CHECK(relative_mode_error(apply_spectral_fractional(c2, 1.5, Block::x2), c2, std::pow(2 * M_PI, 1.5)) < 1e-12);

    try {
        apply_spectral_fractional(testing::cosine(make_grid(0, 1, 16)), 1.5, Block::x1);
        FAIL("expected block_empty");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::block_empty);
    }
}

TEST_CASE("spectral operator: multi-dimensional eigenmodes") {
    const TorusGrid g = make_grid(1, 1, 32);
    for (double beta : {1.1, 1.5, 1.9}) {
        for (auto [k1, k2] : {std::pair{1, 2}, std::pair{3, 0}, std::pair{-2, 5}}) {
            const GridField mode =
                sample([=](const Point& x) { return std::cos(2 * M_PI * (k1 * x[0] + k2 * x[1]) + 0.3); }, g);
            const double coeff = std::pow(2 * M_PI * std::hypot(k1, k2), beta);
            CHECK(relative_mode_error(apply_spectral_fractional(mode, beta, Block::full), mode, coeff) < 1e-12);
        }
    }
}

TEST_CASE("property: spectral operator is linear and translation invariant") {
    std::mt19937_64 rng(21);
    const TorusGrid g = make_grid(1, 1, 16);
    for (int trial = 0; trial < 10; ++trial) {
        const GridField u = testing::random_field(g, rng);
        const GridField w = testing::random_field(g, rng);
        const double a = 0.7, b = -1.3;
        const GridField lhs = apply_spectral_fractional(a * u + b * w, 1.4, Block::full);
        const GridField rhs = a * apply_spectral_fractional(u, 1.4, Block::full) + b * apply_spectral_fractional(w, 1.4, Block::full);
        CHECK(testing::max_abs_diff(lhs, rhs) < 1e-10);
        const int axis = trial % 2;
        const int k = trial + 1;
        CHECK(testing::max_abs_diff(apply_spectral_fractional(translate(u, axis, k), 1.4, Block::x2),
                                    translate(apply_spectral_fractional(u, 1.4, Block::x2), axis, k)) < 1e-10);
    }
}

TEST_CASE("quadrature annihilates constants") {
    for (double beta : {1.1, 1.5, 1.9}) {
        const GridField out = apply_quadrature_levy(GridField(make_grid(1, 0, 64), 7.0), quadrature(beta));
        CHECK(sup_norm(out) <= 1e-12 * 7.0);
    }
    const TorusGrid g2 = make_grid(1, 1, 16);
    CHECK(sup_norm(apply_quadrature_levy(GridField(g2, -2.0), quadrature(1.5, Normalization::raw_kernel, Block::x2))) < 1e-12);
}

TEST_CASE("raw-kernel quadrature reproduces the kernel constant on cos(2 pi x)") {
    const TorusGrid g = make_grid(1, 0, 128);
    const GridField c = testing::cosine(g);
    for (double beta : {1.1, 1.5, 1.9}) {
        CAPTURE(beta);
        const double coeff = oracle::kernel_constant(beta) * std::pow(2 * M_PI, beta);
        const double err = relative_mode_error(apply_quadrature_levy(c, quadrature(beta)), c, coeff);
        CHECK(err < 0.02);
        CHECK(err < 1e-3);
    }
}

TEST_CASE("normalized quadrature converges to the spectral operator at second order") {
    const double beta = 1.5;
    double prev = 0.0;
    for (int n : {32, 64, 128}) {
        const TorusGrid g = make_grid(1, 0, n);
        const GridField u = sample([](const Point& x) { return std::cos(2 * M_PI * x[0]) + 0.5 * std::sin(4 * M_PI * x[0]); }, g);
        const double err = testing::max_abs_diff(apply_quadrature_levy(u, quadrature(beta, Normalization::normalized_multiplier)),
                                                 apply_spectral_fractional(u, beta, Block::full));
        if (prev > 0.0) CHECK(prev / err > 3.0);
        prev = err;
    }
}

TEST_CASE("quadrature on one block of a 2-D grid") {
    const TorusGrid g = make_grid(1, 1, 64);
    const GridField u = sample([](const Point& x) { return std::cos(2 * M_PI * x[1]) * (1.0 + 0.5 * std::cos(2 * M_PI * x[0])); }, g);
    const GridField q = apply_quadrature_levy(u, quadrature(1.5, Normalization::normalized_multiplier, Block::x2));
    const GridField s = apply_spectral_fractional(u, 1.5, Block::x2);
    CHECK(testing::max_abs_diff(q, s) < 1e-2 * sup_norm(s));
    CHECK(sup_norm(apply_quadrature_levy(testing::cosine(g, 1), quadrature(1.5, Normalization::raw_kernel, Block::x1))) < 1e-12);
}

TEST_CASE("scaled jump") {
    const TorusGrid g = make_grid(1, 0, 64);
    const GridField c = testing::cosine(g);

    NonlocalOperatorSpec s = quadrature(1.5);
    s.jump = JumpFunctionSpec::scaled(GridField(g, 0.0));
    CHECK(sup_norm(apply_quadrature_levy(c, s)) == 0.0);

    // a2 constant: j = a2^{1/beta} z turns the operator into a2 times the identity-jump one.
    s.jump = JumpFunctionSpec::scaled(GridField(g, 0.3));
    const GridField scaled = apply_quadrature_levy(c, s);
    const GridField plain = apply_quadrature_levy(c, quadrature(1.5));
    CHECK(testing::max_abs_diff(scaled, 0.3 * plain) < 2e-3 * sup_norm(plain));

    s.jump = JumpFunctionSpec::scaled(GridField(g, -1.0));
    CHECK_THROWS_AS(apply_quadrature_levy(c, s), Error);
}

TEST_CASE("quadrature argument checks") {
    const TorusGrid g = make_grid(1, 0, 32);
    NonlocalOperatorSpec s = quadrature(1.5);
    s.inner_cut = 2.0 / 32;
    CHECK_THROWS_AS(apply_quadrature_levy(GridField(g), s), Error);
    s.inner_cut = 0.0;
    s.truncation_radius = 0.5;
    CHECK_THROWS_AS(apply_quadrature_levy(GridField(g), s), Error);
    s.truncation_radius = 0.0;
    s.measure.beta = 2.0;
    CHECK_THROWS_AS(apply_quadrature_levy(GridField(g), s), Error);

    NonlocalOperatorSpec full2d = quadrature(1.5);
    CHECK_THROWS_AS(apply_quadrature_levy(GridField(make_grid(1, 1, 8)), full2d), Error);

    NonlocalOperatorSpec spec = quadrature(1.5);
    spec.discretization = Discretization::spectral;
    spec.jump = JumpFunctionSpec::scaled(GridField(g, 1.0));
    CHECK_THROWS_AS(NonlocalOperator(spec, g), Error);

    GridField bad(g);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(apply_quadrature_levy(bad, quadrature(1.5)), Error);
}

TEST_CASE("resolved radius and inner cut") {
    const TorusGrid g = make_grid(1, 0, 64);
    const NonlocalOperator op(quadrature(1.5), g, 2.0);
    CHECK(op.inner_cut() == g.h() / 2);
    CHECK(2.0 * 2.0 * tail_mass(1.5, op.truncation_radius()) < kTailBudget);
    CHECK(tail_mass(1.5, 10.0) == doctest::Approx(2.0 / (1.5 * std::pow(10.0, 1.5))));
    CHECK(default_truncation_radius(1.5, 0.0) >= 1.0);
}

TEST_CASE("property: quadrature is monotone at contact points") {
    std::mt19937_64 rng(31);
    const TorusGrid g = make_grid(1, 0, 64);
    const GridField a2 = sample([](const Point& x) { return std::pow(std::max(0.0, std::sin(2 * M_PI * x[0])), 1.5); }, g);
    for (int variant = 0; variant < 3; ++variant) {
        NonlocalOperatorSpec s = quadrature(variant == 1 ? 1.1 : 1.7);
        if (variant == 2) s.jump = JumpFunctionSpec::scaled(a2);
        const NonlocalOperator op(s, g, 4.0);
        for (int trial = 0; trial < 100; ++trial) {
            const GridField u = trial % 2 ? testing::random_field(g, rng) : testing::random_smooth(g, rng);
            GridField w = testing::dominating(u, rng);
            const std::size_t x0 = rng() % g.size();
            w[x0] = u[x0];
            const GridField ou = op.apply(u);
            const GridField ow = op.apply(w);
            CHECK(ou[x0] >= ow[x0] - 1e-12 * (1.0 + std::abs(ou[x0])));
        }
    }
}

TEST_CASE("audit_M1") {
    for (double beta : {1.01, 1.5, 1.99}) {
        CAPTURE(beta);
        const AuditReport r = audit_M1({beta, 1});
        CHECK(r.pass);
        CHECK(r.assumption == "M1");
        CHECK(r.computed_values.at(0) == doctest::Approx(oracle::m1_integral(beta)).epsilon(1e-8));
    }
    CHECK(oracle::m1_integral(1.5) == doctest::Approx(2 * (2 + 2.0 / 3)));
}

TEST_CASE("audit_M2") {
    const std::vector<double> deltas{0.1, 0.01, 0.001};
    for (auto [beta, expect] : {std::pair{1.5, -0.5}, std::pair{1.2, -0.2}, std::pair{1.9, -0.9}}) {
        CAPTURE(beta);
        const AuditReport r = audit_M2({beta, 1}, deltas);
        CHECK(r.pass);
        CHECK(r.computed_values.at(0) == doctest::Approx(expect).epsilon(1e-3));
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            CHECK(r.computed_values.at(2 + i) == doctest::Approx(oracle::m2_integral(beta, deltas[i])).epsilon(1e-8));
        }
    }
    const std::vector<double> one{0.5};
    try {
        audit_M2({1.5, 1}, one);
        FAIL("expected fewer_than_three");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::fewer_than_three);
    }
    const std::vector<double> unordered{0.01, 0.1, 0.001};
    CHECK_THROWS_AS(audit_M2({1.5, 1}, unordered), Error);
}

TEST_CASE("audit_jump_lipschitz") {
    auto smooth = [](const Point& x) { return std::pow(std::max(0.0, std::sin(2 * M_PI * x[0])), 1.0); };
    CHECK(audit_jump_lipschitz(smooth, 1, 64).pass);
    auto rough = [](const Point& x) { return std::sqrt(std::abs(std::sin(2 * M_PI * x[0]))); };
    CHECK_FALSE(audit_jump_lipschitz(rough, 1, 64).pass);
}

TEST_CASE("audit report JSON") {
    const nlohmann::json j = to_json(audit_M1({1.5, 1}));
    CHECK(j.at("assumption") == "M1");
    CHECK(j.at("pass") == true);
    CHECK(j.at("computed_values").is_array());
    CHECK(j.at("parameters").is_object());
    AuditReport r;
    r.computed_values = {std::nan(""), INFINITY};
    const nlohmann::json k = to_json(r);
    CHECK(k["computed_values"][0] == "nan");
    CHECK(k["computed_values"][1] == "inf");
}
