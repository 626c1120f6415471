#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rieszmax/grid.hpp"
#include "rieszmax/riesz.hpp"

namespace rieszmax {

inline constexpr double kDefaultTieTol = 1e-12;
inline constexpr std::size_t kDefaultEvalBudget = 10'000'000;

/// Discrete slice of the constraint set: per-cell levels (sorted, must
/// include 0 and end at the cap) and per-function nonzero-cell budgets.
struct SearchSpace {
    Domain domain;
    std::vector<double> levels;
    int m1 = 0;  // nonzero-cell budget for f1
    int m2 = 0;  // nonzero-cell budget for f2

    SearchSpace(Domain d, std::vector<double> lv, int b1, int b2)
        : domain(d), levels(std::move(lv)), m1(b1), m2(b2) {
        std::sort(levels.begin(), levels.end());
        if (levels.empty() || levels.front() != 0.0)
            throw Error("SearchSpace: levels must include 0");
        if (m1 < 0 || m2 < 0) throw Error("SearchSpace: budgets must be >= 0");
    }
};

using GridPair = std::pair<GridFunction, GridFunction>;

/// Outcome of the exhaustive maximizer scan.
struct MaximizerCertificate {
    double best_value = 0.0;
    std::vector<GridPair> argmax_list;
    double ball_value = 0.0;
    bool ball_is_max = false;
    GridPair ball_pair;
    /// Partition of argmax_list indices by common-shift equivalence.
    std::vector<std::vector<std::size_t>> translation_classes;

    MaximizerCertificate(GridPair ball) : ball_pair(std::move(ball)) {}
};

namespace detail {

/// All level assignments with values capped by `cap`, at most `max_cells`
/// nonzero cells and mass at most `mass_budget`, stored as per-cell level
/// indices.
inline std::vector<std::vector<std::uint8_t>> enumerate_candidates(
    const Domain& d, const std::vector<double>& levels, int max_cells,
    double cap, double mass_budget) {
    const std::size_t m = d.cell_count();
    std::vector<std::vector<std::uint8_t>> out;
    std::vector<std::uint8_t> cur(m, 0);
    const double hm = d.cell_measure();
    auto rec = [&](auto&& self, std::size_t cell, int used, double mass) -> void {
        if (cell == m) {
            out.push_back(cur);
            return;
        }
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const bool nz = levels[l] > 0.0;
            if (nz && used == max_cells) continue;
            if (levels[l] > cap * (1.0 + 1e-12)) continue;
            const double nm = mass + levels[l] * hm;
            if (nm > mass_budget * (1.0 + 1e-12) + 1e-15) continue;
            cur[cell] = static_cast<std::uint8_t>(l);
            self(self, cell + 1, used + (nz ? 1 : 0), nm);
        }
        cur[cell] = 0;
    };
    rec(rec, 0, 0, 0.0);
    return out;
}

inline GridFunction to_function(const Domain& d, const std::vector<double>& levels,
                                const std::vector<std::uint8_t>& idx) {
    std::vector<double> v(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) v[i] = levels[idx[i]];
    return GridFunction(d, std::move(v));
}

/// Shift of a value vector by an integer lattice vector; nullopt when a
/// nonzero cell would leave the box.
inline std::optional<std::vector<double>> shift_values(
    const Domain& d, const std::vector<double>& v, int d0, int d1) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) continue;
        const auto ai = d.axis_indices(i);
        const int n0 = ai[0] + d0;
        const int n1 = ai[1] + d1;
        if (!d.in_range(n0) || (d.dim() == 2 && !d.in_range(n1)))
            return std::nullopt;
        out[d.flat_index(n0, d.dim() == 2 ? n1 : 0)] = v[i];
    }
    return out;
}

/// Canonical representative of a pair under common lattice shifts:
/// lexicographically smallest concatenated value vector.
inline std::vector<double> canonical_shift_form(const Domain& d,
                                                const GridPair& p) {
    const int n = d.cells_per_axis();
    std::vector<double> best;
    const int lim1 = d.dim() == 2 ? n : 0;
    for (int d0 = -n + 1; d0 < n; ++d0) {
        for (int d1 = -lim1 + (d.dim() == 2 ? 1 : 0); d1 <= lim1 - (d.dim() == 2 ? 1 : 0);
             ++d1) {
            auto s1 = shift_values(d, p.first.values, d0, d1);
            if (!s1) continue;
            auto s2 = shift_values(d, p.second.values, d0, d1);
            if (!s2) continue;
            std::vector<double> cat = *s1;
            cat.insert(cat.end(), s2->begin(), s2->end());
            if (best.empty() || cat < best) best = std::move(cat);
        }
        if (d.dim() == 1 && lim1 == 0) continue;
    }
    return best;
}

}  // namespace detail

/// Brute-force certification of the maximizer claim on a finite level set.
/// When the candidate pair count fits the budget the scan is a direct cross
/// enumeration; otherwise the smaller side is enumerated and the other side
/// is maximized exactly per candidate via the per-cell additivity of J in
/// one argument (the budget then bounds the enumerated-side count).
inline MaximizerCertificate exhaustive_max(const SearchSpace& space,
                                           const ConstraintSpec& c1,
                                           const ConstraintSpec& c2,
                                           const Integrand& psi, const Kernel& j,
                                           std::size_t budget = kDefaultEvalBudget,
                                           double tie_tol = kDefaultTieTol) {
    const Domain& d = space.domain;
    const std::size_t m = d.cell_count();
    const std::size_t nl = space.levels.size();
    auto fs = detail::enumerate_candidates(d, space.levels, space.m1, c1.cap, c1.mass);
    auto gs = detail::enumerate_candidates(d, space.levels, space.m2, c2.cap, c2.mass);

    const GridFunction b1 = ball_indicator(d, c1);
    const GridFunction b2 = ball_indicator(d, c2);
    MaximizerCertificate cert({b1, b2});
    cert.ball_value = riesz_eval(b1, b2, psi, j);

    const detail::KernelTable kt(d, j);
    const double hm = d.cell_measure();
    const double h2 = hm * hm;

    // Psi on the level lattice.
    std::vector<std::vector<double>> ptab(nl, std::vector<double>(nl));
    for (std::size_t a = 0; a < nl; ++a)
        for (std::size_t b = 0; b < nl; ++b)
            ptab[a][b] = psi(space.levels[a], space.levels[b]);

    // T[y][l] = sum_x Psi(f(x), level_l) j(|x-y|): J(f, g) = sum_y T[y][g(y)].
    auto build_T = [&](const std::vector<std::uint8_t>& f) {
        std::vector<std::vector<double>> T(m, std::vector<double>(nl, 0.0));
        for (std::size_t y = 0; y < m; ++y)
            for (std::size_t x = 0; x < m; ++x) {
                const double k = kt(x, y);
                for (std::size_t l = 0; l < nl; ++l) T[y][l] += ptab[f[x]][l] * k;
            }
        return T;
    };

    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::size_t, std::size_t>> arg_idx;  // full path
    auto tol_abs = [&](double v) { return tie_tol * std::max(1.0, std::abs(v)); };

    const bool full = fs.size() * gs.size() <= budget;
    if (full) {
        for (std::size_t fi = 0; fi < fs.size(); ++fi) {
            const auto T = build_T(fs[fi]);
            for (std::size_t gi = 0; gi < gs.size(); ++gi) {
                double v = 0.0;
                for (std::size_t y = 0; y < m; ++y) v += T[y][gs[gi][y]];
                v *= h2;
                if (arg_idx.empty() || v > best + tol_abs(best)) {
                    best = v;
                    arg_idx.clear();
                    arg_idx.emplace_back(fi, gi);
                } else if (v >= best - tol_abs(best)) {
                    arg_idx.emplace_back(fi, gi);
                }
            }
        }
        // Second pass prunes near-ties that fell below the final best.
        std::erase_if(arg_idx, [&](const auto& p) {
            const auto T = build_T(fs[p.first]);
            double v = 0.0;
            for (std::size_t y = 0; y < m; ++y) v += T[y][gs[p.second][y]];
            return v * h2 < best - tol_abs(best);
        });
        for (const auto& [fi, gi] : arg_idx)
            cert.argmax_list.emplace_back(detail::to_function(d, space.levels, fs[fi]),
                                          detail::to_function(d, space.levels, gs[gi]));
    } else {
        // Factored scan: enumerate the smaller side, exact inner DP on the other.
        const bool f_outer = fs.size() <= gs.size();
        const auto& outer = f_outer ? fs : gs;
        const auto& ic = f_outer ? c2 : c1;
        const int inner_cells = f_outer ? space.m2 : space.m1;
        if (outer.size() > budget)
            throw BudgetExceededError(
                "exhaustive_max: enumeration size " + std::to_string(outer.size()) +
                " exceeds budget " + std::to_string(budget));

        // Mass quantization for the DP state.
        double unit = 0.0;
        for (double lv : space.levels)
            if (lv > 0.0) { unit = lv; break; }
        if (unit == 0.0) throw Error("exhaustive_max: all levels are zero");
        std::vector<int> lvl_units(nl);
        for (std::size_t l = 0; l < nl; ++l) {
            const double q = space.levels[l] / unit;
            if (std::abs(q - std::round(q)) > 1e-9)
                throw Error("exhaustive_max: levels not commensurable for DP");
            lvl_units[l] = static_cast<int>(std::lround(q));
        }
        const int max_units =
            static_cast<int>(std::floor(ic.mass / (hm * unit) + 1e-9));

        struct Inner {
            double value;
            std::vector<std::vector<std::uint8_t>> argmax;
        };
        const double neg_inf = -std::numeric_limits<double>::infinity();

        // Suffix DP: S[y][cb][ub] = best value over cells y..m-1.
        auto solve_inner = [&](const std::vector<std::vector<double>>& T,
                               bool want_args, double target) {
            std::vector S(m + 1, std::vector(static_cast<std::size_t>(inner_cells) + 1,
                                             std::vector<double>(max_units + 1, neg_inf)));
            for (int cb = 0; cb <= inner_cells; ++cb)
                for (int ub = 0; ub <= max_units; ++ub) S[m][cb][ub] = 0.0;
            for (std::size_t y = m; y-- > 0;)
                for (int cb = 0; cb <= inner_cells; ++cb)
                    for (int ub = 0; ub <= max_units; ++ub) {
                        double v = neg_inf;
                        for (std::size_t l = 0; l < nl; ++l) {
                            const bool nz = space.levels[l] > 0.0;
                            if (nz && cb == 0) continue;
                            if (lvl_units[l] > ub) continue;
                            const double cand =
                                T[y][l] +
                                S[y + 1][cb - (nz ? 1 : 0)][ub - lvl_units[l]];
                            v = std::max(v, cand);
                        }
                        S[y][cb][ub] = v;
                    }
            Inner res;
            res.value = S[0][inner_cells][max_units] * h2;
            if (want_args) {
                std::vector<std::uint8_t> cur(m, 0);
                auto dfs = [&](auto&& self, std::size_t y, int cb, int ub,
                               double acc) -> void {
                    if (res.argmax.size() > 200000)
                        throw Error("exhaustive_max: argmax set too large to collect");
                    if (y == m) {
                        res.argmax.push_back(cur);
                        return;
                    }
                    for (std::size_t l = 0; l < nl; ++l) {
                        const bool nz = space.levels[l] > 0.0;
                        if (nz && cb == 0) continue;
                        if (lvl_units[l] > ub) continue;
                        const double rest =
                            S[y + 1][cb - (nz ? 1 : 0)][ub - lvl_units[l]];
                        if ((acc + T[y][l] + rest) * h2 >= target) {
                            cur[y] = static_cast<std::uint8_t>(l);
                            self(self, y + 1, cb - (nz ? 1 : 0), ub - lvl_units[l],
                                 acc + T[y][l]);
                            cur[y] = 0;
                        }
                    }
                };
                dfs(dfs, 0, inner_cells, max_units, 0.0);
            }
            return res;
        };

        // T built from the outer candidate; when g is outer the roles of the
        // two Psi slots swap.
        auto build_T_oriented = [&](const std::vector<std::uint8_t>& o) {
            std::vector<std::vector<double>> T(m, std::vector<double>(nl, 0.0));
            for (std::size_t y = 0; y < m; ++y)
                for (std::size_t x = 0; x < m; ++x) {
                    const double k = kt(x, y);
                    for (std::size_t l = 0; l < nl; ++l)
                        T[y][l] += (f_outer ? ptab[o[x]][l] : ptab[l][o[x]]) * k;
                }
            return T;
        };

        std::vector<double> outer_best(outer.size());
        for (std::size_t oi = 0; oi < outer.size(); ++oi) {
            const auto T = build_T_oriented(outer[oi]);
            outer_best[oi] = solve_inner(T, false, 0.0).value;
            best = std::max(best, outer_best[oi]);
        }
        for (std::size_t oi = 0; oi < outer.size(); ++oi) {
            if (outer_best[oi] < best - tol_abs(best)) continue;
            const auto T = build_T_oriented(outer[oi]);
            const auto inner = solve_inner(T, true, best - tol_abs(best));
            for (const auto& ia : inner.argmax) {
                auto fo = detail::to_function(d, space.levels,
                                              f_outer ? outer[oi] : ia);
                auto go = detail::to_function(d, space.levels,
                                              f_outer ? ia : outer[oi]);
                cert.argmax_list.emplace_back(std::move(fo), std::move(go));
            }
        }
    }

    cert.best_value = best;
    cert.ball_is_max = cert.ball_value >= best - tol_abs(best);

    // Group argmax members by common-shift equivalence.
    std::vector<std::vector<double>> canon;
    for (std::size_t i = 0; i < cert.argmax_list.size(); ++i) {
        const auto c = detail::canonical_shift_form(d, cert.argmax_list[i]);
        bool placed = false;
        for (std::size_t k = 0; k < canon.size(); ++k) {
            if (canon[k] == c) {
                cert.translation_classes[k].push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            canon.push_back(c);
            cert.translation_classes.push_back({i});
        }
    }
    return cert;
}

/// Result of the uniqueness-up-to-translation check.
struct UniquenessResult {
    bool unique_up_to_translation = false;
    std::optional<GridPair> witness;  // a non-translate maximizer when false
};

/// True iff every argmax member is the ball pair shifted by a common lattice
/// vector.
inline UniquenessResult uniqueness_check(const MaximizerCertificate& cert,
                                         const Domain& d) {
    UniquenessResult r;
    r.unique_up_to_translation = true;
    const auto ball_canon = detail::canonical_shift_form(d, cert.ball_pair);
    for (const auto& p : cert.argmax_list) {
        if (detail::canonical_shift_form(d, p) != ball_canon) {
            r.unique_up_to_translation = false;
            r.witness = p;
            return r;
        }
    }
    return r;
}

/// Outcome of the exchange-ascent local search.
struct AscentResult {
    GridPair final;
    double value = 0.0;
    /// Whether the very first scan found an improving move; false certifies
    /// local optimality of the start (the ball pair, in the intended use).
    bool improving_move_found_at_start = false;
    int iterations = 0;
};

/// Steepest single-move ascent: transfers of delta between two cells of f1
/// or f2 (cap and mass respected), delta from the halving schedule
/// {k/2, k/4, ...}. The value sequence is nondecreasing by construction.
inline AscentResult exchange_ascent(GridPair start, const ConstraintSpec& c1,
                                    const ConstraintSpec& c2, const Integrand& psi,
                                    const Kernel& j, int max_iters,
                                    int schedule_depth = 4,
                                    double tie_tol = kDefaultTieTol) {
    if (!is_feasible(start.first, c1) || !is_feasible(start.second, c2))
        throw InfeasibleInputError("exchange_ascent: infeasible start");
    const Domain& d = start.first.domain;
    const std::size_t m = d.cell_count();
    const detail::KernelTable kt(d, j);
    const double h2 = d.cell_measure() * d.cell_measure();

    AscentResult res{std::move(start), 0.0, false, 0};
    res.value = riesz_eval(res.final.first, res.final.second, psi, j);

    // Change in J from replacing one cell value of f1 (resp. f2).
    auto delta_J = [&](bool first_fn, std::size_t cell, double old_v,
                       double new_v) {
        const auto& other = first_fn ? res.final.second : res.final.first;
        double s = 0.0;
        for (std::size_t y = 0; y < m; ++y) {
            const double ov = other.values[y];
            const double dpsi = first_fn ? psi(new_v, ov) - psi(old_v, ov)
                                         : psi(ov, new_v) - psi(ov, old_v);
            s += dpsi * kt(cell, y);
        }
        return s * h2;
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        double best_gain = 0.0;
        bool bf = true;
        std::size_t bsrc = 0, bdst = 0;
        double bdelta = 0.0;
        for (bool first_fn : {true, false}) {
            auto& fn = first_fn ? res.final.first : res.final.second;
            const double cap = first_fn ? c1.cap : c2.cap;
            for (int sd = 0; sd < schedule_depth; ++sd) {
                const double delta = cap / std::pow(2.0, sd + 1);
                for (std::size_t src = 0; src < m; ++src) {
                    if (fn.values[src] < delta - 1e-15) continue;
                    const double g_src =
                        delta_J(first_fn, src, fn.values[src], fn.values[src] - delta);
                    for (std::size_t dst = 0; dst < m; ++dst) {
                        if (dst == src) continue;
                        if (fn.values[dst] + delta > cap + 1e-15) continue;
                        const double gain =
                            g_src + delta_J(first_fn, dst, fn.values[dst],
                                            fn.values[dst] + delta);
                        if (gain > best_gain) {
                            best_gain = gain;
                            bf = first_fn;
                            bsrc = src;
                            bdst = dst;
                            bdelta = delta;
                        }
                    }
                }
            }
        }
        const double tol = tie_tol * std::max(1.0, std::abs(res.value));
        if (best_gain <= tol) break;
        if (iter == 0) res.improving_move_found_at_start = true;
        auto& fn = bf ? res.final.first : res.final.second;
        fn.values[bsrc] -= bdelta;
        fn.values[bdst] += bdelta;
        if (fn.values[bsrc] < 0.0) fn.values[bsrc] = 0.0;
        res.value = riesz_eval(res.final.first, res.final.second, psi, j);
        res.iterations = iter + 1;
    }
    return res;
}

}  // namespace rieszmax
