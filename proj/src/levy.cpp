#include "pide/levy.hpp"

#include "pide/error.hpp"

#include <fftw3.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <unordered_map>

namespace pide {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Jumps |y| below this get the second-difference interpolation correction.
constexpr double kDefectRange = 0.5;

// FFTW planning is not thread-safe; execution on fresh arrays is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

void check_beta(double beta) {
    if (!(beta > 1.0 && beta < 2.0)) {
        throw Error(Errc::invalid_argument, "beta must lie in (1,2), got " + format_real(beta));
    }
}

double sphere_area(int dim) {
    // |S^{dim-1}|: two points on the line, the unit circle in the plane.
    return dim == 1 ? 2.0 : kTwoPi;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {}
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    double* real() { return static_cast<double*>(ptr); }
    fftw_complex* cplx() { return static_cast<fftw_complex*>(ptr); }
    void* ptr;
};

// Hurwitz zeta partial sum: sum_{p=p0}^{p1} (c + p)^{-s}.
double hurwitz_range(double s, double c, long p0, long p1) {
    if (p1 < p0) return 0.0;
    gsl_sf_result a{}, b{};
    gsl_set_error_handler_off();
    if (gsl_sf_hzeta_e(s, c + static_cast<double>(p0), &a) != GSL_SUCCESS ||
        gsl_sf_hzeta_e(s, c + static_cast<double>(p1) + 1.0, &b) != GSL_SUCCESS) {
        throw Error(Errc::non_finite, "Hurwitz zeta evaluation failed");
    }
    return a.val - b.val;
}

// Folded weights of the one-sided integral over y in [lo, hi] of u(x + y) K(y) dy
// with K(y) = y^{-1-beta} and u the periodic linear interpolant on n nodes.
// Entry k collects all interpolation nodes congruent to k mod n.
std::vector<double> one_sided_weights(double lo, double hi, double beta, int n) {
    const double h = 1.0 / n;
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    if (!(hi > lo)) return w;

    auto node = [n](long m) { return static_cast<std::size_t>(m % n); };

    // Exact product integration on cell [mh, (m+1)h] intersected with [p, q].
    auto add_cell = [&](long m, double p, double q, bool right_part) {
        if (!(q > p)) return;
        const double log_ratio = std::log1p((q - p) / p);
        const double i0 = -std::pow(p, -beta) * std::expm1(-beta * log_ratio) / beta;
        const double i1 = std::pow(p, 1.0 - beta) * std::expm1((1.0 - beta) * log_ratio) / (1.0 - beta);
        const double yl = m * h;
        const double yr = (m + 1) * h;
        w[node(m)] += (yr * i0 - i1) / h;
        if (right_part) w[node(m + 1)] += (i1 - yl * i0) / h;
    };

    auto exact_cells = [&](double a, double b, bool drop_last_right) {
        long m = static_cast<long>(std::floor(a / h));
        const long last = static_cast<long>(std::ceil(b / h)) - 1;
        for (; m <= last; ++m) {
            const double p = std::max(a, m * h);
            const double q = std::min(b, (m + 1) * h);
            add_cell(m, p, q, !(drop_last_right && m == last));
        }
    };

    constexpr double far_start = 2.0;
    if (hi <= far_start + 1.0) {
        exact_cells(lo, hi, false);
    } else {
        // Near field: exact cells up to y = 2; the last cell keeps only the hat of
        // its left node, the right half belongs to the far-field hat at y = 2.
        exact_cells(lo, far_start, true);
        // Far field: full hats at nodes y = c + p, p >= 2, c = k h, summed over
        // periods with the Euler-Maclaurin moments of the hat:
        //   int hat(t) K(y+t) dt = h K + h^3/12 K'' + h^5/360 K'''' + O(h^7).
        const double b1 = beta + 1.0;
        const double c2 = b1 * (beta + 2.0);
        const double c4 = c2 * (beta + 3.0) * (beta + 4.0);
        for (int k = 1; k < n; ++k) {
            const double c = k * h;
            const long p1 = static_cast<long>(std::floor(hi - c));
            if (p1 < 2) continue;
            w[static_cast<std::size_t>(k)] += h * hurwitz_range(b1, c, 2, p1) +
                                              h * h * h / 12.0 * c2 * hurwitz_range(b1 + 2.0, c, 2, p1) +
                                              std::pow(h, 5) / 360.0 * c4 * hurwitz_range(b1 + 4.0, c, 2, p1);
        }
    }
    // Whole periods: u(x + p) - u(x) = 0.
    w[0] = 0.0;
    return w;
}

// Symmetric (both signs of y) folded weights.
std::vector<double> symmetric_weights(double lo, double hi, double beta, int n) {
    const auto w = one_sided_weights(lo, hi, beta, n);
    std::vector<double> out(w.size(), 0.0);
    for (int k = 1; k < n; ++k) out[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k)] + w[static_cast<std::size_t>(n - k)];
    return out;
}

// One-sided integral over [lo, hi] of (y^2 - I[y^2](y)) K(y), I the nodal linear
// interpolant. Equals minus the integral of (y - mh)((m+1)h - y) K on each cell.
double interpolation_defect(double lo, double hi, double beta, int n) {
    if (!(hi > lo)) return 0.0;
    using boost::math::quadrature::gauss;
    const double h = 1.0 / n;
    double total = 0.0;
    const long first = static_cast<long>(std::floor(lo / h));
    const long last = static_cast<long>(std::ceil(hi / h)) - 1;
    for (long m = first; m <= last; ++m) {
        const double p = std::max(lo, m * h);
        const double q = std::min(hi, (m + 1) * h);
        if (!(q > p)) continue;
        const double yl = m * h;
        const double yr = (m + 1) * h;
        total += gauss<double, 8>::integrate(
            [&](double y) { return (y - yl) * (yr - y) * std::pow(y, -1.0 - beta); }, p, q);
    }
    return -total;
}

// Odd moment over lo < y < min(hi, cap) of y K(y), signed by the side of the jump.
double half_moment(double lo, double hi, double cap, double beta) {
    const double b = std::min(hi, cap);
    if (!(b > lo)) return 0.0;
    return (std::pow(lo, 1.0 - beta) - std::pow(b, 1.0 - beta)) / (beta - 1.0);
}

}  // namespace

double tail_mass(double beta, double radius) { return 2.0 / (beta * std::pow(radius, beta)); }

double default_truncation_radius(double beta, double osc) {
    check_beta(beta);
    const double o = std::max(osc, 1e-300);
    // 2 * osc * 2 / (beta R^beta) < budget
    const double r = std::pow(4.0 * o / (beta * kTailBudget), 1.0 / beta);
    return std::max(1.0, std::ceil(r * 1.0001));
}

double fractional_kernel_constant(double beta) {
    check_beta(beta);
    using boost::math::quadrature::gauss_kronrod;
    using boost::math::quadrature::tanh_sinh;

    // [0,1]: 1 - cos s = 2 sin^2(s/2) avoids cancellation near the origin.
    tanh_sinh<double> ts;
    const double near = ts.integrate(
        [beta](double s) {
            if (s <= 0.0) return 0.0;
            const double ratio = std::sin(0.5 * s) / s;
            return 2.0 * ratio * ratio * std::pow(s, 1.0 - beta);
        },
        0.0, 1.0);

    // [1,inf): 1/beta minus the cosine part, integrated by parts twice:
    //   int_1^inf cos(s) s^-a = -sin 1 + a cos 1 - a (a+1) int_1^inf cos(s) s^-(a+2)
    const double a = 1.0 + beta;
    double rest = 0.0;
    const double period = std::numbers::pi;
    for (double s0 = 1.0; s0 < 1e4; s0 += period) {
        rest += gauss_kronrod<double, 31>::integrate(
            [a](double s) { return std::cos(s) * std::pow(s, -a - 2.0); }, s0, s0 + period, 0, 0);
    }
    const double cos_part = -std::sin(1.0) + a * std::cos(1.0) - a * (a + 1.0) * rest;
    return 2.0 * (near + 1.0 / beta - cos_part);
}

// ---------------------------------------------------------------------------

struct NonlocalOperator::Impl {
    TorusGrid grid;

    // spectral
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::size_t complex_size = 0;
    std::vector<double> multiplier;
    double inverse_norm = 1.0;

    // quadrature
    int axis = 0;
    std::vector<double> weights;             // stacked weight rows, n each
    std::vector<std::size_t> row_of_node;    // which row each node uses
    std::vector<double> inner_coeff;         // per node, multiplies (2u - u+ - u-)
    std::vector<double> odd_moment;          // per node, multiplies the axis gradient
    double scale = 1.0;                      // 1 / C for the normalized kernel

    explicit Impl(const TorusGrid& g) : grid(g) {}
    ~Impl() {
        std::lock_guard lock(fftw_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
    Impl(const Impl&) = delete;
    Impl& operator=(const Impl&) = delete;

    void apply_spectral(const GridField& u, std::span<double> out, double s) const;
    void apply_quadrature(const GridField& u, std::span<const GridField> grad, std::span<double> out,
                          double s) const;
};

void NonlocalOperator::Impl::apply_spectral(const GridField& u, std::span<double> out, double s) const {
    const std::size_t real_size = grid.size();
    FftwBuffer in(sizeof(double) * real_size);
    FftwBuffer spec(sizeof(fftw_complex) * complex_size);
    std::copy(u.values().begin(), u.values().end(), in.real());
    fftw_execute_dft_r2c(forward, in.real(), spec.cplx());
    for (std::size_t j = 0; j < complex_size; ++j) {
        spec.cplx()[j][0] *= multiplier[j];
        spec.cplx()[j][1] *= multiplier[j];
    }
    fftw_execute_dft_c2r(backward, spec.cplx(), in.real());
    const double f = s * inverse_norm;
    for (std::size_t i = 0; i < real_size; ++i) out[i] += f * in.real()[i];
}

void NonlocalOperator::Impl::apply_quadrature(const GridField& u, std::span<const GridField> grad,
                                              std::span<double> out, double s) const {
    const int n = grid.n();
    const double h = grid.h();
    const std::size_t stride = grid.stride(axis);
    std::vector<double> line(2 * static_cast<std::size_t>(n));
    const std::size_t lines = grid.size() / static_cast<std::size_t>(n);
    for (std::size_t l = 0; l < lines; ++l) {
        // First node of the line: zero coordinate along `axis`.
        const std::size_t base = (grid.dim() == 2 && axis == 0) ? l : l * static_cast<std::size_t>(n);
        for (int j = 0; j < 2 * n; ++j) line[j] = u[base + static_cast<std::size_t>(j % n) * stride];
        for (int c = 0; c < n; ++c) {
            const std::size_t idx = base + static_cast<std::size_t>(c) * stride;
            const double uc = line[c];
            const double* w = weights.data() + row_of_node[idx] * static_cast<std::size_t>(n);
            double acc = 0.0;
            for (int k = 1; k < n; ++k) acc += w[k] * (uc - line[c + k]);
            const double up = line[c + 1];
            const double um = line[(c + n - 1)];
            acc += inner_coeff[idx] * (2.0 * uc - up - um);
            const double g = grad.empty() ? (up - um) / (2.0 * h) : grad[axis][idx];
            acc += odd_moment[idx] * g;
            out[idx] += s * scale * acc;
        }
    }
}

NonlocalOperator::NonlocalOperator(const NonlocalOperatorSpec& spec, const TorusGrid& grid, double osc_reference)
    : spec_(spec) {
    check_beta(spec.measure.beta);
    const double beta = spec.measure.beta;
    const auto axes = grid.axes(spec.block);
    if (axes.empty()) throw Error(Errc::block_empty, "block " + to_string(spec.block) + " has no axes on this grid");
    auto impl = std::make_shared<Impl>(grid);
    const int n = grid.n();

    if (spec.discretization == Discretization::spectral) {
        if (spec.jump.kind != JumpFunctionSpec::Kind::identity) {
            throw Error(Errc::invalid_argument, "spectral discretization requires the identity jump");
        }
        const std::size_t half = static_cast<std::size_t>(n / 2 + 1);
        FftwBuffer in(sizeof(double) * grid.size());
        std::lock_guard lock(fftw_mutex());
        if (grid.dim() == 2 && axes.size() == 2) {
            impl->complex_size = static_cast<std::size_t>(n) * half;
            FftwBuffer spec_buf(sizeof(fftw_complex) * impl->complex_size);
            impl->forward = fftw_plan_dft_r2c_2d(n, n, in.real(), spec_buf.cplx(), FFTW_ESTIMATE);
            impl->backward = fftw_plan_dft_c2r_2d(n, n, spec_buf.cplx(), in.real(), FFTW_ESTIMATE);
            impl->multiplier.resize(impl->complex_size);
            for (std::size_t i0 = 0; i0 < static_cast<std::size_t>(n); ++i0) {
                const double f0 = i0 <= static_cast<std::size_t>(n / 2) ? double(i0) : double(i0) - n;
                for (std::size_t k1 = 0; k1 < half; ++k1) {
                    const double r = std::hypot(f0, double(k1));
                    impl->multiplier[i0 * half + k1] = std::pow(kTwoPi * r, beta);
                }
            }
            impl->inverse_norm = 1.0 / (double(n) * n);
        } else {
            const int a = axes.front();
            const int howmany = grid.dim() == 2 ? n : 1;
            const int istride = static_cast<int>(grid.stride(a));
            const int idist = (grid.dim() == 2 && a == 0) ? 1 : n;
            const int ostride = (grid.dim() == 2 && a == 0) ? n : 1;
            const int odist = (grid.dim() == 2 && a == 0) ? 1 : static_cast<int>(half);
            impl->complex_size = half * static_cast<std::size_t>(howmany);
            FftwBuffer spec_buf(sizeof(fftw_complex) * impl->complex_size);
            impl->forward = fftw_plan_many_dft_r2c(1, &n, howmany, in.real(), nullptr, istride, idist,
                                                   spec_buf.cplx(), nullptr, ostride, odist, FFTW_ESTIMATE);
            impl->backward = fftw_plan_many_dft_c2r(1, &n, howmany, spec_buf.cplx(), nullptr, ostride, odist,
                                                    in.real(), nullptr, istride, idist, FFTW_ESTIMATE);
            impl->multiplier.resize(impl->complex_size);
            for (std::size_t j = 0; j < impl->complex_size; ++j) {
                const std::size_t k = (grid.dim() == 2 && a == 0) ? j / static_cast<std::size_t>(n) : j % half;
                impl->multiplier[j] = std::pow(kTwoPi * double(k), beta);
            }
            impl->inverse_norm = 1.0 / n;
        }
        if (!impl->forward || !impl->backward) throw Error(Errc::invalid_argument, "FFTW planning failed");
        rate_bound_ = *std::max_element(impl->multiplier.begin(), impl->multiplier.end());
    } else {
        if (axes.size() != 1 || spec.measure.block_dim != 1) {
            throw Error(Errc::invalid_argument, "quadrature discretization supports one-dimensional blocks only");
        }
        const double h = grid.h();
        inner_cut_ = spec.inner_cut > 0.0 ? spec.inner_cut : 0.5 * h;
        if (inner_cut_ > h * (1.0 + 1e-12)) {
            throw Error(Errc::invalid_argument, "inner cut exceeds the grid spacing");
        }
        radius_ = spec.truncation_radius > 0.0 ? spec.truncation_radius
                                               : default_truncation_radius(beta, osc_reference);
        if (radius_ < 1.0) throw Error(Errc::invalid_argument, "truncation radius must be >= 1");

        impl->axis = axes.front();
        impl->scale = spec.normalization == Normalization::normalized_multiplier
                          ? 1.0 / fractional_kernel_constant(beta)
                          : 1.0;
        // int_{|z| < cut} z^2 dz / |z|^{1+beta}
        const double second_moment = 2.0 * std::pow(inner_cut_, 2.0 - beta) / (2.0 - beta);

        const std::size_t size = grid.size();
        impl->row_of_node.resize(size);
        impl->inner_coeff.resize(size);
        impl->odd_moment.resize(size);

        std::unordered_map<double, std::size_t> row_cache;
        auto row_for = [&](double alpha) -> std::size_t {
            if (auto it = row_cache.find(alpha); it != row_cache.end()) return it->second;
            const std::size_t row = impl->weights.size() / static_cast<std::size_t>(n);
            if (alpha == 0.0) {
                impl->weights.resize(impl->weights.size() + static_cast<std::size_t>(n), 0.0);
            } else {
                // y = alpha z: measure alpha^beta |y|^{-1-beta} dy on [alpha cut, alpha R].
                auto w = symmetric_weights(alpha * inner_cut_, alpha * radius_, beta, n);
                const double ab = std::pow(alpha, beta);
                for (auto& x : w) x *= ab;
                impl->weights.insert(impl->weights.end(), w.begin(), w.end());
            }
            row_cache.emplace(alpha, row);
            return row;
        };

        const bool scaled = spec.jump.kind == JumpFunctionSpec::Kind::scaled;
        if (scaled) {
            if (!spec.jump.scale || !(spec.jump.scale->grid() == grid)) {
                throw Error(Errc::grid_mismatch, "scaled jump needs a2 sampled on the operator grid");
            }
        }
        for (std::size_t i = 0; i < size; ++i) {
            double alpha = 1.0;
            if (scaled) {
                const double a2 = (*spec.jump.scale)[i];
                if (!(a2 >= 0.0) || !std::isfinite(a2)) {
                    throw Error(Errc::invalid_argument, "scaled jump requires a2 >= 0");
                }
                alpha = std::pow(a2, 1.0 / beta);
            }
            impl->row_of_node[i] = row_for(alpha);
            // Inner ball |z| < cut: -1/2 alpha^2 s(cut) D^2 u. The interpolation
            // defect of the near field, 1/2 u''(x) (y^2 - I[y^2]), is folded into the
            // same second difference; without it the scheme is only O(h^{2-beta}).
            const double defect =
                alpha == 0.0 ? 0.0
                             : 2.0 * std::pow(alpha, beta) *
                                   interpolation_defect(alpha * inner_cut_, std::min(alpha * radius_, kDefectRange),
                                                        beta, n);
            impl->inner_coeff[i] = 0.5 * (alpha * alpha * second_moment + defect) / (h * h);
            // inner_coeff can go negative for small alpha; only the neighbour totals matter.
            const double* row = impl->weights.data() + impl->row_of_node[i] * static_cast<std::size_t>(n);
            for (int k = 2; k < n - 1; ++k) {
                if (!(row[k] >= 0.0)) throw Error(Errc::invalid_argument, "negative quadrature weight");
            }
            if (!(row[1] + impl->inner_coeff[i] >= 0.0) || !(row[n - 1] + impl->inner_coeff[i] >= 0.0)) {
                throw Error(Errc::invalid_argument, "near-field correction breaks monotonicity");
            }
            // Compensator -Du . j 1_{|z|<1}: jumps +y and -y carry opposite odd moments.
            const double ab = std::pow(alpha, beta);
            const double up = ab * half_moment(alpha * inner_cut_, alpha * radius_, alpha, beta);
            const double down = -ab * half_moment(alpha * inner_cut_, alpha * radius_, alpha, beta);
            impl->odd_moment[i] = alpha == 0.0 ? 0.0 : (up + down);
        }
        double rate = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            const double* w = impl->weights.data() + impl->row_of_node[i] * static_cast<std::size_t>(n);
            double sum = 0.0;
            for (int k = 1; k < n; ++k) sum += w[k];
            rate = std::max(rate, sum + 2.0 * impl->inner_coeff[i]);
        }
        rate_bound_ = rate * impl->scale;
    }
    impl_ = std::move(impl);
}

void NonlocalOperator::apply_add(const GridField& u, std::span<double> out, double scale) const {
    if (!(u.grid() == impl_->grid)) throw Error(Errc::grid_mismatch, "operator prepared for another grid");
    if (spec_.discretization == Discretization::spectral) {
        impl_->apply_spectral(u, out, scale);
    } else {
        impl_->apply_quadrature(u, {}, out, scale);
    }
}

void NonlocalOperator::apply_add(const GridField& u, std::span<const GridField> grad, std::span<double> out,
                                 double scale) const {
    if (spec_.discretization == Discretization::spectral || grad.empty()) {
        apply_add(u, out, scale);
        return;
    }
    if (!(u.grid() == impl_->grid)) throw Error(Errc::grid_mismatch, "operator prepared for another grid");
    impl_->apply_quadrature(u, grad, out, scale);
}

GridField NonlocalOperator::apply(const GridField& u) const {
    GridField out(u.grid());
    apply_add(u, out.values());
    return out;
}

GridField apply_spectral_fractional(const GridField& u, double beta, Block block) {
    NonlocalOperatorSpec spec;
    spec.block = block;
    spec.discretization = Discretization::spectral;
    spec.measure.beta = beta;
    return NonlocalOperator(spec, u.grid()).apply(u);
}

std::vector<GridField> central_gradient(const GridField& u) {
    const auto& g = u.grid();
    std::vector<GridField> grad;
    for (int a = 0; a < g.dim(); ++a) {
        GridField d(g);
        for (std::size_t i = 0; i < u.size(); ++i) {
            d[i] = (u[g.shift(i, a, 1)] - u[g.shift(i, a, -1)]) / (2.0 * g.h());
        }
        grad.push_back(std::move(d));
    }
    return grad;
}

GridField apply_quadrature_levy(const GridField& u, const NonlocalOperatorSpec& spec) {
    const auto grad = central_gradient(u);
    return apply_quadrature_levy(u, spec, grad);
}

GridField apply_quadrature_levy(const GridField& u, const NonlocalOperatorSpec& spec,
                                std::span<const GridField> grad_u) {
    if (spec.discretization != Discretization::quadrature) {
        throw Error(Errc::invalid_argument, "spec is not a quadrature discretization");
    }
    if (!all_finite(u)) throw Error(Errc::non_finite, "input field is not finite");
    if (static_cast<int>(grad_u.size()) != u.grid().dim()) {
        throw Error(Errc::invalid_argument, "gradient needs one field per axis");
    }
    NonlocalOperator op(spec, u.grid(), std::max(oscillation(u), 1e-12));
    GridField out(u.grid());
    op.apply_add(u, grad_u, out.values());
    return out;
}

// ---------------------------------------------------------------------------

AuditReport audit_M1(const LevyMeasureSpec& measure) {
    check_beta(measure.beta);
    const double beta = measure.beta;
    const double area = sphere_area(measure.block_dim);
    using boost::math::quadrature::gauss_kronrod;
    using boost::math::quadrature::exp_sinh;
    // r = e^{-t} on (0, 1]
    exp_sinh<double> es;
    const double inner = es.integrate([beta](double t) { return std::exp(-(2.0 - beta) * t); }, 0.0,
                                      std::numeric_limits<double>::infinity());
    // r = e^t on [1, 1e3]
    const double outer = gauss_kronrod<double, 61>::integrate(
        [beta](double t) { return std::exp(-beta * t); }, 0.0, std::log(1e3), 15, 1e-14);
    const double tail = std::pow(1e3, -beta) / beta;
    const double value = area * (inner + outer + tail);
    const double analytic = area * (1.0 / (2.0 - beta) + 1.0 / beta);

    AuditReport r;
    r.assumption = "M1";
    r.parameters = {{"beta", beta}, {"block_dim", double(measure.block_dim)}};
    r.computed_values = {value, analytic};
    r.pass = std::isfinite(value) && value < 1e6;
    return r;
}

AuditReport audit_M2(const LevyMeasureSpec& measure, std::span<const double> deltas) {
    check_beta(measure.beta);
    if (deltas.size() < 3) throw Error(Errc::fewer_than_three, "audit_M2 needs at least three deltas");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0 && deltas[i] < 1.0) || (i > 0 && !(deltas[i] < deltas[i - 1]))) {
            throw Error(Errc::invalid_argument, "deltas must be decreasing in (0,1)");
        }
    }
    const double beta = measure.beta;
    const double area = sphere_area(measure.block_dim);
    using boost::math::quadrature::gauss_kronrod;

    std::vector<double> g;
    for (double d : deltas) {
        // r = e^t on [delta, 1]: r^{-beta} r dr/r -> e^{(1-beta) t} dt
        g.push_back(area * gauss_kronrod<double, 61>::integrate(
                               [beta](double t) { return std::exp((1.0 - beta) * t); }, std::log(d), 0.0, 15,
                               1e-14));
    }

    // g(delta) = A delta^p + B: for fixed p the pair (A, B) is a linear least-squares fit.
    auto misfit = [&](double p) {
        double sxx = 0, sx = 0, sy = 0, sxy = 0;
        const double m = double(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = std::pow(deltas[i], p);
            sxx += x * x;
            sx += x;
            sy += g[i];
            sxy += x * g[i];
        }
        const double det = m * sxx - sx * sx;
        const double a = (m * sxy - sx * sy) / det;
        const double b = (sy - a * sx) / m;
        double r2 = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double e = (a * std::pow(deltas[i], p) + b - g[i]) / g[i];
            r2 += e * e;
        }
        return r2;
    };
    const auto best = boost::math::tools::brent_find_minima(misfit, -3.0, -1e-4, 60);
    const double fitted = best.first;

    // Plain log-log slope, reported for reference.
    double slx = 0, sly = 0, slxx = 0, slxy = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = std::log(deltas[i]);
        const double y = std::log(g[i]);
        slx += x;
        sly += y;
        slxx += x * x;
        slxy += x * y;
    }
    const double m = double(g.size());
    const double naive = (m * slxy - slx * sly) / (m * slxx - slx * slx);

    AuditReport r;
    r.assumption = "M2";
    r.parameters = {{"beta", beta}, {"block_dim", double(measure.block_dim)}};
    for (std::size_t i = 0; i < deltas.size(); ++i) r.parameters["delta_" + std::to_string(i)] = deltas[i];
    r.computed_values = {fitted, naive};
    r.computed_values.insert(r.computed_values.end(), g.begin(), g.end());
    r.pass = std::abs(fitted - (1.0 - beta)) <= 0.05;
    return r;
}

AuditReport audit_jump_lipschitz(const std::function<double(const Point&)>& alpha, int dim, int n) {
    auto quotient = [&](int res) {
        const auto grid = make_grid(dim == 2 ? 1 : 0, 1, res);
        const auto a = sample(alpha, grid);
        return discrete_lipschitz(a);
    };
    const double coarse = quotient(n);
    const double fine = quotient(4 * n);
    AuditReport r;
    r.assumption = "M3-M4-scaled-jump";
    r.parameters = {{"dim", double(dim)}, {"n", double(n)}};
    r.computed_values = {fine, coarse};
    r.pass = std::isfinite(fine) && fine <= 1.25 * coarse + 1e-12;
    return r;
}

}  // namespace pide
