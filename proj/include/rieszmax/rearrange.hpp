#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rieszmax/grid.hpp"

namespace rieszmax {

/// Canonical radial order of the cells: |center| ascending, ties broken
/// lexicographically on coordinates. The discrete stand-in for "centered
/// at the origin".
inline std::vector<std::size_t> radial_order(const Domain& d) {
    return detail::radial_order_impl(d);
}

/// Indicator of a cell set, one flag per cell.
using CellMask = std::vector<bool>;

/// Rearranges a cell set into the innermost cells: the first m cells of
/// radial_order, m = popcount(mask). Exact discrete equimeasurability.
inline CellMask set_rearrange(const Domain& d, const CellMask& mask) {
    if (mask.size() != d.cell_count())
        throw Error("set_rearrange: mask size does not match cell count");
    std::size_t m = 0;
    for (bool b : mask) m += b ? 1 : 0;
    CellMask out(mask.size(), false);
    const auto order = radial_order(d);
    for (std::size_t i = 0; i < m; ++i) out[order[i]] = true;
    return out;
}

/// Symmetric decreasing rearrangement: values sorted descending, assigned
/// along radial_order. Preserves the value multiset exactly.
inline GridFunction schwarz_rearrange(const GridFunction& u) {
    std::vector<double> sorted = u.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    const auto order = radial_order(u.domain);
    GridFunction out = GridFunction::zero(u.domain);
    for (std::size_t i = 0; i < order.size(); ++i) out.values[order[i]] = sorted[i];
    return out;
}

/// True iff values are nonincreasing along radial_order (exact comparison).
inline bool is_schwarz_symmetric(const GridFunction& u) {
    const auto order = radial_order(u.domain);
    for (std::size_t i = 1; i < order.size(); ++i)
        if (u.values[order[i]] > u.values[order[i - 1]]) return false;
    return true;
}

/// Axis-aligned hyperplane reflection x_axis -> 2c - x_axis with c > 0, so
/// the origin side H+ = {x_axis < c} contains the origin. Grid closure
/// requires 2c to be a whole number of cell widths.
struct Reflection {
    int axis;            // in [0, dim)
    double plane_offset; // c > 0

    Reflection(int ax, double c) : axis(ax), plane_offset(c) {
        if (!(c > 0.0)) throw Error("Reflection: plane offset must be positive");
        if (ax < 0) throw Error("Reflection: axis must be nonnegative");
    }

    void validate(const Domain& d) const {
        if (axis >= d.dim())
            throw Error("Reflection: axis out of range for domain");
        const double h = d.cell_width();
        const double steps = 2.0 * plane_offset / h;
        if (std::abs(steps - std::round(steps)) > 1e-9)
            throw ReflectionNotGridCompatibleError(
                "Reflection: 2c is not a whole number of cell widths");
    }
};

/// Two-point rearrangement with respect to sigma: each reflected cell pair
/// carries max on the origin side, min on the far side. Cells whose
/// reflection falls outside the box pair with implicit zero cells.
inline GridFunction polarize(const GridFunction& u, const Reflection& sigma) {
    const Domain& d = u.domain;
    sigma.validate(d);
    const double h = d.cell_width();
    const double c = sigma.plane_offset;
    const double eps = 1e-9 * h;

    GridFunction out = u;
    for (std::size_t idx = 0; idx < d.cell_count(); ++idx) {
        const auto ctr = d.center(idx);
        const double x = ctr[sigma.axis];
        if (x >= c - eps) continue;  // only drive pairs from H+; H0 unchanged
        const double xr = 2.0 * c - x;
        const double fj = (xr + d.halfwidth()) / h - 0.5;
        const int j = static_cast<int>(std::lround(fj));
        if (!d.in_range(j)) continue;  // partner is an implicit zero: max stays put
        auto ai = d.axis_indices(idx);
        std::size_t partner = sigma.axis == 0 ? d.flat_index(j, ai[1])
                                              : d.flat_index(ai[0], j);
        const double a = u.values[idx];
        const double b = u.values[partner];
        out.values[idx] = std::max(a, b);
        out.values[partner] = std::min(a, b);
    }
    return out;
}

}  // namespace rieszmax
