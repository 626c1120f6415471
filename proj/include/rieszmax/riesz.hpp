#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rieszmax/grid.hpp"
#include "rieszmax/integrand.hpp"
#include "rieszmax/rearrange.hpp"

namespace rieszmax {

inline constexpr double kDefaultEvalTol = 1e-10;
inline constexpr double kChainTol1D = 1e-9;

/// Nonincreasing radial kernel profile j(r).
struct Kernel {
    std::string name;
    std::function<double(double)> eval;
    bool nonincreasing = true;
    bool strictly_decreasing = false;

    double operator()(double r) const { return eval(r); }
};

inline Kernel make_kernel_exp() {
    return {"exp", [](double r) { return std::exp(-r); }, true, true};
}

/// (1 + r)^{-p}, p > 0.
inline Kernel make_kernel_invpow(double p) {
    if (!(p > 0.0)) throw Error("invpow kernel: p must be positive");
    return {"invpow:" + std::to_string(p),
            [p](double r) { return std::pow(1.0 + r, -p); }, true, true};
}

/// 1_{r < R}: nonincreasing but not strictly decreasing.
inline Kernel make_kernel_cutoff(double R) {
    if (!(R > 0.0)) throw Error("cutoff kernel: R must be positive");
    return {"cutoff:" + std::to_string(R),
            [R](double r) { return r < R ? 1.0 : 0.0; }, true, false};
}

/// Constant kernel (degenerate control: distance plays no role).
inline Kernel make_kernel_const() {
    return {"const", [](double) { return 1.0; }, true, false};
}

inline Kernel make_kernel(const std::string& spec) {
    auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    if (head == "exp") return make_kernel_exp();
    if (head == "const") return make_kernel_const();
    if (head == "invpow") {
        if (colon == std::string::npos) throw Error("invpow needs :p");
        return make_kernel_invpow(std::stod(spec.substr(colon + 1)));
    }
    if (head == "cutoff") {
        if (colon == std::string::npos) throw Error("cutoff needs :R");
        return make_kernel_cutoff(std::stod(spec.substr(colon + 1)));
    }
    throw Error("unknown kernel: " + spec);
}

namespace detail {

/// Kernel values tabulated per cell pair. In 1D the distance depends only
/// on the index difference; in 2D on the axis index differences.
struct KernelTable {
    const Domain* d;
    std::vector<double> by_offset;  // 1D: |i-j|; 2D: (|di|, |dj|) row-major

    KernelTable(const Domain& dom, const Kernel& j) : d(&dom) {
        const int n = dom.cells_per_axis();
        const double h = dom.cell_width();
        if (dom.dim() == 1) {
            by_offset.resize(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) by_offset[k] = j(h * k);
        } else {
            by_offset.resize(static_cast<std::size_t>(n) * n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    by_offset[static_cast<std::size_t>(a) * n + b] =
                        j(h * std::sqrt(double(a) * a + double(b) * b));
        }
    }

    double operator()(std::size_t x, std::size_t y) const {
        const int n = d->cells_per_axis();
        if (d->dim() == 1)
            return by_offset[static_cast<std::size_t>(
                std::abs(static_cast<int>(x) - static_cast<int>(y)))];
        const auto ax = d->axis_indices(x);
        const auto ay = d->axis_indices(y);
        const int da = std::abs(ax[0] - ay[0]);
        const int db = std::abs(ax[1] - ay[1]);
        return by_offset[static_cast<std::size_t>(da) * n + db];
    }
};

}  // namespace detail

/// Riesz-type functional by the direct double sum:
///   J(f, g) = sum_x sum_y Psi(f(x), g(y)) j(|x-y|) h^{2 dim}.
/// Row-major outer and inner loops; optional compensated summation.
inline double riesz_eval(const GridFunction& f, const GridFunction& g,
                         const Integrand& psi, const Kernel& j,
                         bool compensated = false) {
    if (!(f.domain == g.domain))
        throw Error("riesz_eval: f and g must share a domain");
    const detail::KernelTable kt(f.domain, j);
    const std::size_t m = f.domain.cell_count();
    double sum = 0.0, comp = 0.0;
    for (std::size_t x = 0; x < m; ++x) {
        const double fx = f.values[x];
        for (std::size_t y = 0; y < m; ++y) {
            const double term = psi(fx, g.values[y]) * kt(x, y);
            if (compensated) {
                const double t = term - comp;
                const double s = sum + t;
                comp = (s - sum) - t;
                sum = s;
            } else {
                sum += term;
            }
        }
    }
    const double hm = f.domain.cell_measure();
    return sum * hm * hm;
}

/// Potential of a density against a radial kernel:
///   nu(x) = sum_y j(|x-y|) hfun(y) h^dim.
inline GridFunction potential(const GridFunction& hfun, const Kernel& j) {
    const detail::KernelTable kt(hfun.domain, j);
    const std::size_t m = hfun.domain.cell_count();
    GridFunction out = GridFunction::zero(hfun.domain);
    for (std::size_t x = 0; x < m; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < m; ++y) s += kt(x, y) * hfun.values[y];
        out.values[x] = s * hfun.domain.cell_measure();
    }
    return out;
}

namespace detail {

/// Layer-cake sum over superlevel strips of `gvals`: for each strip
/// (s_{m-1}, s_m] of the sorted distinct positive values, accumulates
///   sum_x u(x, strip) [Phi(f(x), s_m) - Phi(f(x), s_{m-1})]
/// with u(x, strip) = sum_y 1{gvals(y) >= s_m} j(|x-y|) h^dim.
/// Exact for any Phi with Phi(., 0) = 0.
inline double strip_sum(const GridFunction& f, const std::vector<double>& gvals,
                        const std::function<double(double, double)>& phi,
                        const Kernel& j) {
    const Domain& d = f.domain;
    const KernelTable kt(d, j);
    const std::size_t m = d.cell_count();
    std::vector<double> levels = gvals;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    while (!levels.empty() && levels.front() <= 0.0) levels.erase(levels.begin());

    double total = 0.0;
    double prev = 0.0;
    for (double s : levels) {
        for (std::size_t x = 0; x < m; ++x) {
            double u = 0.0;
            for (std::size_t y = 0; y < m; ++y)
                if (gvals[y] >= s) u += kt(x, y);
            u *= d.cell_measure();
            total += u * (phi(f.values[x], s) - phi(f.values[x], prev));
        }
        prev = s;
    }
    return total * d.cell_measure();
}

}  // namespace detail

/// Layer-cake evaluation of J: superlevel strips of g with exact strip
/// integration of Psi increments. Discontinuous bounded integrands are
/// routed through their decomposition (strips of phi2(g), increments of
/// PsiTilde). Agrees with riesz_eval to roundoff.
inline double layercake_eval(const GridFunction& f, const GridFunction& g,
                             const Integrand& psi, const Kernel& j) {
    if (!(f.domain == g.domain))
        throw Error("layercake_eval: f and g must share a domain");
    if (psi.flags.continuous || psi.has_closed_form_deriv()) {
        return detail::strip_sum(f, g.values, psi.eval, j);
    }
    if (!psi.flags.bounded)
        throw IntegrandError(
            "layercake_eval: integrand has no F path and is not bounded");
    // Decomposition route: tabulate on the values actually present.
    std::vector<double> grid = f.values;
    grid.insert(grid.end(), g.values.begin(), g.values.end());
    double vmax = 0.0;
    for (double v : grid) vmax = std::max(vmax, v);
    const double v_limit = 2.0 * vmax + 1.0;
    const Decomposition dec = decompose(psi, grid, v_limit);
    std::vector<double> phi2g(g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i) phi2g[i] = dec.phi2(g.values[i]);
    auto tilde_of_phi1 = [&dec](double s1, double q) {
        return dec.tilde(dec.phi1(s1), q);
    };
    return detail::strip_sum(f, phi2g, tilde_of_phi1, j);
}

/// Result of the Hardy-Littlewood-type bound
///   sum u Gamma(nu) h^dim <= sum u Gamma(k 1_B) h^dim.
struct HlBoundResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// The bathtub bound for a Schwarz-symmetric weight u, a profile Gamma with
/// sublinear scaling, and a density nu feasible for (k, l); B is the
/// discrete ball with measure l/k.
inline HlBoundResult hl_bound(const GridFunction& u, const GammaProfile& gamma,
                              const GridFunction& nu, const ConstraintSpec& c,
                              double tol = kDefaultPropTol) {
    if (!(u.domain == nu.domain))
        throw Error("hl_bound: u and nu must share a domain");
    if (!is_schwarz_symmetric(u))
        throw InfeasibleInputError("hl_bound: u is not Schwarz symmetric");
    if (!is_feasible(nu, c))
        throw InfeasibleInputError("hl_bound: nu is not feasible for the constraint");
    const GridFunction ball = ball_indicator(u.domain, c);
    HlBoundResult r;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        r.lhs += u.values[i] * gamma(nu.values[i]);
        r.rhs += u.values[i] * gamma(ball.values[i]);
    }
    r.lhs *= u.domain.cell_measure();
    r.rhs *= u.domain.cell_measure();
    r.holds = r.lhs <= r.rhs + tol;
    return r;
}

/// The four functional values of the maximizer chain and the three
/// consecutive slacks: rearrangement, first-slot ball, second-slot ball.
struct ChainReport {
    double j_ff = 0.0;    // J(f1, f2)
    double j_star = 0.0;  // J(f1*, f2*)
    double j_half = 0.0;  // J(k1 1_B1, f2*)
    double j_ball = 0.0;  // J(k1 1_B1, k2 1_B2)
    double slack_rearrange = 0.0;  // j_star - j_ff
    double slack_first = 0.0;      // j_half - j_star
    double slack_second = 0.0;     // j_ball - j_half

    double min_slack() const {
        return std::min({slack_rearrange, slack_first, slack_second});
    }
};

/// Evaluates J(f1,f2) <= J(f1*,f2*) <= J(k1 1_B1, f2*) <= J(k1 1_B1, k2 1_B2)
/// by the direct path and reports the three slacks.
inline ChainReport verify_chain(const GridFunction& f1, const GridFunction& f2,
                                const ConstraintSpec& c1, const ConstraintSpec& c2,
                                const Integrand& psi, const Kernel& j) {
    if (!is_feasible(f1, c1))
        throw InfeasibleInputError("verify_chain: f1 infeasible for c1");
    if (!is_feasible(f2, c2))
        throw InfeasibleInputError("verify_chain: f2 infeasible for c2");
    const GridFunction s1 = schwarz_rearrange(f1);
    const GridFunction s2 = schwarz_rearrange(f2);
    const GridFunction b1 = ball_indicator(f1.domain, c1);
    const GridFunction b2 = ball_indicator(f2.domain, c2);
    ChainReport r;
    r.j_ff = riesz_eval(f1, f2, psi, j);
    r.j_star = riesz_eval(s1, s2, psi, j);
    r.j_half = riesz_eval(b1, s2, psi, j);
    r.j_ball = riesz_eval(b1, b2, psi, j);
    r.slack_rearrange = r.j_star - r.j_ff;
    r.slack_first = r.j_half - r.j_star;
    r.slack_second = r.j_ball - r.j_half;
    return r;
}

/// Relative slack tolerance: exact (roundoff-level) in 1D, O(h) in 2D with
/// a per-kernel calibrated constant.
inline double chain_tolerance(const Domain& d, double calibrated_C = 1.0) {
    if (d.dim() == 1) return kChainTol1D;
    return calibrated_C * d.cell_width();
}

}  // namespace rieszmax
