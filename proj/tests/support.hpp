#pragma once

#include <cmath>
#include <random>
#include <string>

#include "pide/catalog.hpp"
#include "pide/config.hpp"
#include "pide/scheme.hpp"
#include "pide/torus.hpp"

namespace testing {

inline pide::GridField random_field(const pide::TorusGrid& grid, std::mt19937_64& rng, double amp = 1.0) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    pide::GridField u(grid);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = dist(rng);
    return u;
}

// A few random Fourier modes per axis.
inline pide::GridField random_smooth(const pide::TorusGrid& grid, std::mt19937_64& rng, double amp = 1.0) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double c[2][3][2];
    for (auto& axis : c)
        for (auto& mode : axis)
            for (auto& v : mode) v = dist(rng);
    return pide::sample(
        [&](const pide::Point& x) {
            double s = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                for (int k = 0; k < 3; ++k) {
                    const double w = 2.0 * M_PI * (k + 1) * x[a];
                    s += (c[a][k][0] * std::cos(w) + c[a][k][1] * std::sin(w)) / (k + 1);
                }
            }
            return amp * s / 3.0;
        },
        grid);
}

// u <= w with w - u >= 0 random, vanishing on roughly a quarter of the nodes.
inline pide::GridField dominating(const pide::GridField& u, std::mt19937_64& rng, double amp = 0.5) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    pide::GridField w = u;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double r = dist(rng);
        if (r > 0.25) w[i] += amp * r;
    }
    return w;
}

// u <= w with a smooth gap amp * s^2 that touches zero along the level set s = 0.
inline pide::GridField smooth_gap(const pide::GridField& u, std::mt19937_64& rng, double amp = 0.5) {
    const pide::GridField s = random_smooth(u.grid(), rng);
    pide::GridField w = u;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += amp * s[i] * s[i];
    return w;
}

inline bool uses_spectral(const pide::ProblemSpec& p) {
    for (const auto& t : p.nonlocal_terms) {
        if (t.discretization == pide::Discretization::spectral) return true;
    }
    return false;
}

inline pide::ExperimentConfig catalog_config(const std::string& id) {
    return pide::parse_config(pide::find_example(id).config);
}

inline pide::GridField cosine(const pide::TorusGrid& grid, int axis = 0, int k = 1) {
    return pide::sample([=](const pide::Point& x) { return std::cos(2.0 * M_PI * k * x[axis]); }, grid);
}

inline double max_abs_diff(const pide::GridField& a, const pide::GridField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testing
