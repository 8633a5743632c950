#include "pide/torus.hpp"

#include "pide/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pide {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::dimension_out_of_range: return "dimension-out-of-range";
        case Errc::n_not_power_of_two: return "n-not-power-of-two";
        case Errc::non_finite: return "non-finite";
        case Errc::block_empty: return "block-empty";
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::grid_mismatch: return "grid-mismatch";
        case Errc::cfl_violation: return "cfl-violation";
        case Errc::degenerate: return "degenerate";
        case Errc::max_iter_exceeded: return "max-iter-exceeded";
        case Errc::blow_up: return "blow-up";
        case Errc::fewer_than_three: return "fewer-than-three";
        case Errc::config: return "config";
        case Errc::unknown_example: return "unknown-example";
    }
    return "unknown";
}

std::string to_string(Block block) {
    switch (block) {
        case Block::x1: return "x1";
        case Block::x2: return "x2";
        case Block::full: return "full";
    }
    return "full";
}

Block block_from_string(const std::string& name) {
    if (name == "x1") return Block::x1;
    if (name == "x2") return Block::x2;
    if (name == "full") return Block::full;
    throw Error(Errc::invalid_argument, "unknown block '" + name + "'");
}

TorusGrid::TorusGrid(int d1, int d2, int n) : d1_(d1), d2_(d2), n_(n), h_(1.0 / n) {}

TorusGrid make_grid(int d1, int d2, int n) {
    if (d1 < 0 || d2 < 0 || d1 > 1 || d2 > 1 || d1 + d2 < 1) {
        throw Error(Errc::dimension_out_of_range,
                    "d1=" + std::to_string(d1) + ", d2=" + std::to_string(d2));
    }
    if (n < 8 || (n & (n - 1)) != 0) {
        throw Error(Errc::n_not_power_of_two, "n=" + std::to_string(n) + " (need power of two >= 8)");
    }
    return TorusGrid(d1, d2, n);
}

std::size_t TorusGrid::size() const noexcept {
    std::size_t s = 1;
    for (int a = 0; a < dim(); ++a) s *= static_cast<std::size_t>(n_);
    return s;
}

std::size_t TorusGrid::stride(int axis) const noexcept {
    return (dim() == 2 && axis == 0) ? static_cast<std::size_t>(n_) : 1;
}

int TorusGrid::coord(std::size_t idx, int axis) const noexcept {
    return static_cast<int>((idx / stride(axis)) % static_cast<std::size_t>(n_));
}

std::size_t TorusGrid::shift(std::size_t idx, int axis, int k) const noexcept {
    const int c = coord(idx, axis);
    int m = (c + k) % n_;
    if (m < 0) m += n_;
    const auto s = stride(axis);
    return idx + (static_cast<std::size_t>(m) - static_cast<std::size_t>(c)) * s;
}

Point TorusGrid::node(std::size_t idx) const noexcept {
    Point p{0.0, 0.0};
    for (int a = 0; a < dim(); ++a) p[a] = coord(idx, a) * h_;
    return p;
}

NeighborTable::NeighborTable(const TorusGrid& grid)
    : size_(grid.size()), fwd_(size_ * grid.dim()), back_(size_ * grid.dim()) {
    for (int a = 0; a < grid.dim(); ++a) {
        for (std::size_t i = 0; i < size_; ++i) {
            fwd_[a * size_ + i] = static_cast<std::uint32_t>(grid.shift(i, a, 1));
            back_[a * size_ + i] = static_cast<std::uint32_t>(grid.shift(i, a, -1));
        }
    }
}

std::vector<int> TorusGrid::axes(Block block) const {
    std::vector<int> out;
    if (block != Block::x2) {
        for (int a = 0; a < d1_; ++a) out.push_back(a);
    }
    if (block != Block::x1) {
        for (int a = d1_; a < dim(); ++a) out.push_back(a);
    }
    return out;
}

GridField::GridField(const TorusGrid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

GridField::GridField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw Error(Errc::grid_mismatch, "value count does not match grid size");
    }
}

namespace {

void require_same_grid(const GridField& a, const GridField& b) {
    if (!(a.grid() == b.grid())) throw Error(Errc::grid_mismatch, "fields live on different grids");
}

}  // namespace

GridField& GridField::operator+=(const GridField& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GridField& GridField::operator-=(const GridField& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

GridField& GridField::operator+=(double c) {
    for (auto& v : values_) v += c;
    return *this;
}

GridField& GridField::operator-=(double c) {
    for (auto& v : values_) v -= c;
    return *this;
}

GridField& GridField::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

GridField sample(const std::function<double(const Point&)>& func, const TorusGrid& grid) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = func(grid.node(i));
        if (!std::isfinite(values[i])) {
            throw Error(Errc::non_finite, "sample at node " + std::to_string(i) + " is not finite");
        }
    }
    return GridField(grid, std::move(values));
}

double max_value(const GridField& u) {
    const auto v = u.values();
    return *std::max_element(v.begin(), v.end());
}

double min_value(const GridField& u) {
    const auto v = u.values();
    return *std::min_element(v.begin(), v.end());
}

double sup_norm(const GridField& u) {
    double s = 0.0;
    for (double v : u.values()) s = std::max(s, std::abs(v));
    return s;
}

double oscillation(const GridField& u) { return max_value(u) - min_value(u); }

double mean(const GridField& u) {
    double s = 0.0;
    for (double v : u.values()) s += v;
    return s / static_cast<double>(u.size());
}

double discrete_lipschitz(const GridField& u) {
    const auto& g = u.grid();
    const std::size_t n = static_cast<std::size_t>(g.n());
    double lip = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        const std::size_t s = g.stride(a);
        const std::size_t line = n * s;
        for (std::size_t base = 0; base < u.size(); base += line) {
            for (std::size_t c = 0; c < n; ++c) {
                const std::size_t next = c + 1 == n ? 0 : c + 1;
                for (std::size_t r = 0; r < s; ++r) {
                    lip = std::max(lip, std::abs(u[base + next * s + r] - u[base + c * s + r]));
                }
            }
        }
    }
    return lip / g.h();
}

GridField translate(const GridField& u, int axis, int k) {
    GridField out(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[u.grid().shift(i, axis, k)];
    return out;
}

bool all_finite(const GridField& u) {
    return std::all_of(u.values().begin(), u.values().end(), [](double v) { return std::isfinite(v); });
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& out, const GridField& u) {
    const auto& g = u.grid();
    out << (g.dim() == 2 ? "i0,i1,value\n" : "i0,value\n");
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (int a = 0; a < g.dim(); ++a) out << g.coord(i, a) << ',';
        out << format_real(u[i]) << '\n';
    }
}

void write_csv(const std::string& path, const GridField& u) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::invalid_argument, "cannot open " + path);
    write_csv(out, u);
}

GridField read_csv(std::istream& in, const TorusGrid& grid) {
    std::string line;
    std::getline(in, line);
    GridField u(grid);
    std::vector<bool> seen(grid.size(), false);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) != grid.dim() + 1) {
            throw Error(Errc::invalid_argument, "malformed CSV row: " + line);
        }
        std::size_t idx = 0;
        for (int a = 0; a < grid.dim(); ++a) {
            const int c = std::stoi(cells[a]);
            if (c < 0 || c >= grid.n()) throw Error(Errc::invalid_argument, "index out of range: " + line);
            idx += static_cast<std::size_t>(c) * grid.stride(a);
        }
        u[idx] = std::stod(cells.back());
        seen[idx] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw Error(Errc::invalid_argument, "CSV does not cover every node");
    }
    return u;
}

}  // namespace pide
