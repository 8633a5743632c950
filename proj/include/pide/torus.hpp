#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pide {

/// Coordinate block of x = (x1, x2). `full` addresses every axis.
enum class Block { x1, x2, full };

std::string to_string(Block block);
Block block_from_string(const std::string& name);

/// Node coordinates; unused trailing entries are zero.
using Point = std::array<double, 2>;

/// Uniform periodic lattice on the unit torus [0,1)^d with d = d1 + d2 <= 2.
/// Axes [0, d1) form the x1 block, axes [d1, d1 + d2) the x2 block.
class TorusGrid {
public:
    /// The one-dimensional n = 8 grid.
    TorusGrid() = default;

    int d1() const noexcept { return d1_; }
    int d2() const noexcept { return d2_; }
    int dim() const noexcept { return d1_ + d2_; }
    int n() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept;

    /// Row-major stride of an axis (last axis is contiguous).
    std::size_t stride(int axis) const noexcept;

    /// Axis index along `axis` of flat node `idx`.
    int coord(std::size_t idx, int axis) const noexcept;

    /// Flat index of the node reached from `idx` by `k` steps along `axis`, wrapping mod n.
    std::size_t shift(std::size_t idx, int axis, int k) const noexcept;

    Point node(std::size_t idx) const noexcept;

    /// Axes belonging to `block`; empty when the block has no axes on this grid.
    std::vector<int> axes(Block block) const;

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

private:
    friend TorusGrid make_grid(int d1, int d2, int n);
    TorusGrid(int d1, int d2, int n);

    int d1_ = 0;
    int d2_ = 1;
    int n_ = 8;
    double h_ = 0.125;
};

/// Throws Errc::dimension_out_of_range or Errc::n_not_power_of_two.
TorusGrid make_grid(int d1, int d2, int n);

/// Forward and backward neighbour of every node along every axis.
class NeighborTable {
public:
    explicit NeighborTable(const TorusGrid& grid);

    std::size_t fwd(std::size_t i, int axis) const noexcept { return fwd_[axis * size_ + i]; }
    std::size_t back(std::size_t i, int axis) const noexcept { return back_[axis * size_ + i]; }

private:
    std::size_t size_;
    std::vector<std::uint32_t> fwd_;
    std::vector<std::uint32_t> back_;
};

/// Real values on a TorusGrid, row-major. Periodicity is structural.
class GridField {
public:
    /// Empty placeholder (size 0); assign before use.
    GridField() = default;
    explicit GridField(const TorusGrid& grid, double value = 0.0);
    GridField(const TorusGrid& grid, std::vector<double> values);

    const TorusGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    GridField& operator+=(const GridField& other);
    GridField& operator-=(const GridField& other);
    GridField& operator+=(double c);
    GridField& operator-=(double c);
    GridField& operator*=(double s);

    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator+(GridField a, double c) { return a += c; }
    friend GridField operator-(GridField a, double c) { return a -= c; }
    friend GridField operator*(double s, GridField a) { return a *= s; }

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

/// Evaluates `func` at every node. Throws Errc::non_finite on a non-finite sample.
GridField sample(const std::function<double(const Point&)>& func, const TorusGrid& grid);

double sup_norm(const GridField& u);
double oscillation(const GridField& u);
double mean(const GridField& u);
double max_value(const GridField& u);
double min_value(const GridField& u);

/// max over nodes and axes of |u(i+1) - u(i)| / h, wrapped.
double discrete_lipschitz(const GridField& u);

/// Field w with w(i) = u(i + k e_axis).
GridField translate(const GridField& u, int axis, int k);

bool all_finite(const GridField& u);

/// CSV: header `i0[,i1],value`, one row per node, 17 significant digits.
void write_csv(std::ostream& out, const GridField& u);
void write_csv(const std::string& path, const GridField& u);
GridField read_csv(std::istream& in, const TorusGrid& grid);

/// Shortest round-trip-safe decimal with 17 significant digits.
std::string format_real(double x);

}  // namespace pide
