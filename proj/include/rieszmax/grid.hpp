#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "rieszmax/errors.hpp"

namespace rieszmax {

/// Regular lattice over the box [-A, A]^dim with N cells per axis.
/// Cell centers sit at -A + (i + 1/2) h per axis, h = 2A/N.
class Domain {
public:
    Domain(int dim, double halfwidth, int cells_per_axis)
        : dim_(dim), halfwidth_(halfwidth), cells_(cells_per_axis) {
        if (dim != 1 && dim != 2)
            throw Error("Domain: dim must be 1 or 2");
        if (halfwidth <= 0.0)
            throw Error("Domain: halfwidth must be positive");
        if (cells_per_axis < 1)
            throw Error("Domain: cells_per_axis must be >= 1");
    }

    int dim() const { return dim_; }
    double halfwidth() const { return halfwidth_; }
    int cells_per_axis() const { return cells_; }

    double cell_width() const { return 2.0 * halfwidth_ / cells_; }

    /// Measure of one cell, h^dim.
    double cell_measure() const {
        return dim_ == 1 ? cell_width() : cell_width() * cell_width();
    }

    std::size_t cell_count() const {
        std::size_t n = static_cast<std::size_t>(cells_);
        return dim_ == 1 ? n : n * n;
    }

    double measure() const { return cell_measure() * static_cast<double>(cell_count()); }

    /// Center of the cell at flat index `idx` (row-major, axis 0 outer).
    /// In 1D the second coordinate is 0.
    std::array<double, 2> center(std::size_t idx) const {
        const double h = cell_width();
        if (dim_ == 1) {
            return {-halfwidth_ + (static_cast<double>(idx) + 0.5) * h, 0.0};
        }
        const std::size_t n = static_cast<std::size_t>(cells_);
        const std::size_t i0 = idx / n;
        const std::size_t i1 = idx % n;
        return {-halfwidth_ + (static_cast<double>(i0) + 0.5) * h,
                -halfwidth_ + (static_cast<double>(i1) + 0.5) * h};
    }

    /// Axis indices of flat index `idx`.
    std::array<int, 2> axis_indices(std::size_t idx) const {
        if (dim_ == 1) return {static_cast<int>(idx), 0};
        const std::size_t n = static_cast<std::size_t>(cells_);
        return {static_cast<int>(idx / n), static_cast<int>(idx % n)};
    }

    std::size_t flat_index(int i0, int i1) const {
        if (dim_ == 1) return static_cast<std::size_t>(i0);
        return static_cast<std::size_t>(i0) * static_cast<std::size_t>(cells_) +
               static_cast<std::size_t>(i1);
    }

    bool in_range(int i) const { return i >= 0 && i < cells_; }

    /// Euclidean distance between the centers of two cells.
    double center_distance(std::size_t a, std::size_t b) const {
        const auto ca = center(a);
        const auto cb = center(b);
        const double dx = ca[0] - cb[0];
        const double dy = ca[1] - cb[1];
        return std::sqrt(dx * dx + dy * dy);
    }

    friend bool operator==(const Domain& a, const Domain& b) {
        return a.dim_ == b.dim_ && a.halfwidth_ == b.halfwidth_ && a.cells_ == b.cells_;
    }

private:
    int dim_;
    double halfwidth_;
    int cells_;
};

/// Piecewise-constant nonnegative function on a Domain, one value per cell.
struct GridFunction {
    Domain domain;
    std::vector<double> values;

    GridFunction(Domain d, std::vector<double> v) : domain(d), values(std::move(v)) {
        if (values.size() != domain.cell_count())
            throw Error("GridFunction: value count does not match cell count");
        for (double x : values)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw Error("GridFunction: values must be finite and nonnegative");
    }

    static GridFunction zero(const Domain& d) {
        return GridFunction(d, std::vector<double>(d.cell_count(), 0.0));
    }

    double max_value() const {
        return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    }

    friend bool operator==(const GridFunction& a, const GridFunction& b) {
        return a.domain == b.domain && a.values == b.values;
    }
};

/// Pointwise cap k and mass budget l of one constraint slot.
struct ConstraintSpec {
    double cap;   // k > 0
    double mass;  // l > 0

    ConstraintSpec(double k, double l) : cap(k), mass(l) {
        if (!(k > 0.0) || !(l > 0.0))
            throw Error("ConstraintSpec: cap and mass must be positive");
    }
};

inline constexpr double kDefaultFeasTol = 1e-12;

/// Exact integral of a piecewise-constant function: sum of values times h^dim.
inline double integral(const GridFunction& u) {
    double s = 0.0;
    for (double x : u.values) s += x;
    return s * u.domain.cell_measure();
}

/// Membership in the constraint slot: values capped by k and mass by l.
inline bool is_feasible(const GridFunction& u, const ConstraintSpec& c,
                        double tol_feas = kDefaultFeasTol) {
    return u.max_value() <= c.cap + tol_feas && integral(u) <= c.mass + tol_feas;
}

namespace detail {

/// Cells sorted by |center| ascending, ties broken lexicographically on
/// center coordinates (most-negative first). Exposed as radial_order in
/// the rearrangement API.
inline std::vector<std::size_t> radial_order_impl(const Domain& d) {
    std::vector<std::size_t> order(d.cell_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ca = d.center(a);
        const auto cb = d.center(b);
        const double na = ca[0] * ca[0] + ca[1] * ca[1];
        const double nb = cb[0] * cb[0] + cb[1] * cb[1];
        if (na != nb) return na < nb;
        return ca < cb;
    });
    return order;
}

}  // namespace detail

/// Number of cells of the ball with measure l/k; throws if infeasible or
/// not a whole number of cells.
inline std::size_t ball_cell_count(const Domain& d, const ConstraintSpec& c) {
    const double target = c.mass / c.cap;
    if (target > d.measure() * (1.0 + 1e-12))
        throw InfeasibleMassError("ball_indicator: mass/cap exceeds domain measure");
    const double cells = target / d.cell_measure();
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells))
        throw NotRepresentableError(
            "ball_indicator: mass/cap is not a whole number of cells");
    return static_cast<std::size_t>(rounded);
}

/// k times the indicator of the discrete ball: the first (l/k)/h^dim cells in
/// canonical radial order, all at value k.
inline GridFunction ball_indicator(const Domain& d, const ConstraintSpec& c) {
    const std::size_t m = ball_cell_count(d, c);
    const auto order = detail::radial_order_impl(d);
    GridFunction out = GridFunction::zero(d);
    for (std::size_t i = 0; i < m; ++i) out.values[order[i]] = c.cap;
    return out;
}

}  // namespace rieszmax
