#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rieszmax/errors.hpp"

namespace rieszmax {

inline constexpr double kDefaultPropTol = 1e-12;

/// Declared structural properties of a bivariate integrand.
struct IntegrandFlags {
    bool vanishes_at_hyperplanes = false;
    bool supermodular = false;
    bool strict_supermodular = false;
    bool psi3 = false;
    bool strict_psi3 = false;
    bool bounded = false;
    bool continuous = false;  // continuous in each variable
    bool n_luzin = false;     // declarative only, never verified
};

/// Bivariate integrand Psi(s1, s2) on the nonnegative quadrant, with
/// declared property flags and an optional closed-form partial in the
/// second slot.
struct Integrand {
    std::string name;
    std::function<double(double, double)> eval;
    IntegrandFlags flags;
    std::optional<double> bound;  // sup of Psi when bounded
    std::function<double(double, double)> deriv2;  // d/ds2 Psi(s1, s2), optional

    double operator()(double s1, double s2) const { return eval(s1, s2); }
    bool has_closed_form_deriv() const { return static_cast<bool>(deriv2); }
};

// ---------------------------------------------------------------------------
// Built-in catalog
// ---------------------------------------------------------------------------

inline Integrand make_product() {
    Integrand p;
    p.name = "product";
    p.eval = [](double s, double t) { return s * t; };
    p.deriv2 = [](double s, double) { return s; };
    p.flags = {.vanishes_at_hyperplanes = true,
               .supermodular = true,
               .strict_supermodular = true,
               .psi3 = true,
               .strict_psi3 = false,
               .bounded = false,
               .continuous = true};
    return p;
}

/// s^a t^b with a, b >= 1; strict scaling condition when a, b > 1.
inline Integrand make_powerprod(double a, double b) {
    if (a < 1.0 || b < 1.0)
        throw IntegrandError("powerprod: exponents must be >= 1");
    Integrand p;
    p.name = "powerprod:" + std::to_string(a) + ":" + std::to_string(b);
    p.eval = [a, b](double s, double t) { return std::pow(s, a) * std::pow(t, b); };
    p.deriv2 = [a, b](double s, double t) {
        return std::pow(s, a) * b * std::pow(t, b - 1.0);
    };
    p.flags = {.vanishes_at_hyperplanes = true,
               .supermodular = true,
               .strict_supermodular = true,
               .psi3 = true,
               .strict_psi3 = (a > 1.0 && b > 1.0),
               .bounded = false,
               .continuous = true};
    return p;
}

inline Integrand make_min() {
    Integrand p;
    p.name = "min";
    p.eval = [](double s, double t) { return std::min(s, t); };
    p.deriv2 = [](double s, double t) { return t < s ? 1.0 : 0.0; };
    p.flags = {.vanishes_at_hyperplanes = true,
               .supermodular = true,
               .strict_supermodular = false,
               .psi3 = false,
               .strict_psi3 = false,
               .bounded = false,
               .continuous = true};
    return p;
}

inline Integrand make_capped_product() {
    Integrand p;
    p.name = "cappedprod";
    p.eval = [](double s, double t) { return std::min(s, 1.0) * std::min(t, 1.0); };
    p.deriv2 = [](double s, double t) { return t < 1.0 ? std::min(s, 1.0) : 0.0; };
    p.flags = {.vanishes_at_hyperplanes = true,
               .supermodular = true,
               .strict_supermodular = false,
               .psi3 = true,
               .strict_psi3 = false,
               .bounded = true,
               .continuous = true};
    p.bound = 1.0;
    return p;
}

/// 1_{s >= alpha} 1_{t >= beta}: bounded and discontinuous; exercises the
/// decomposition path of the layer-cake evaluator.
inline Integrand make_threshold(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw IntegrandError("threshold: levels must be positive");
    Integrand p;
    p.name = "threshold:" + std::to_string(alpha) + ":" + std::to_string(beta);
    p.eval = [alpha, beta](double s, double t) {
        return (s >= alpha && t >= beta) ? 1.0 : 0.0;
    };
    p.flags = {.vanishes_at_hyperplanes = true,
               .supermodular = true,
               .strict_supermodular = false,
               .psi3 = false,
               .strict_psi3 = false,
               .bounded = true,
               .continuous = false};
    p.bound = 1.0;
    return p;
}

/// Parses catalog names: product | powerprod:a:b | min | cappedprod |
/// threshold:alpha:beta.
inline Integrand make_integrand(const std::string& spec) {
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            auto pos = s.find(':', start);
            parts.push_back(s.substr(start, pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        return parts;
    };
    const auto parts = split(spec);
    if (parts[0] == "product") return make_product();
    if (parts[0] == "min") return make_min();
    if (parts[0] == "cappedprod") return make_capped_product();
    if (parts[0] == "powerprod") {
        if (parts.size() != 3) throw IntegrandError("powerprod needs :a:b");
        return make_powerprod(std::stod(parts[1]), std::stod(parts[2]));
    }
    if (parts[0] == "threshold") {
        if (parts.size() != 3) throw IntegrandError("threshold needs :alpha:beta");
        return make_threshold(std::stod(parts[1]), std::stod(parts[2]));
    }
    throw IntegrandError("unknown integrand: " + spec);
}

// ---------------------------------------------------------------------------
// Property checkers (sampling-based: certify "no violation found")
// ---------------------------------------------------------------------------

struct PropertyReport {
    bool holds = true;
    bool strict = true;
    double worst_violation = 0.0;
};

/// Default sample lattice: 0 plus 20 log-spaced points on [1e-2, 10]. The
/// floor keeps strict margins of the catalog integrands above kDefaultPropTol.
inline std::vector<double> default_samples() {
    std::vector<double> s{0.0};
    const int n = 20;
    for (int i = 0; i < n; ++i)
        s.push_back(std::pow(10.0, -2.0 + 3.0 * i / (n - 1)));
    return s;
}

/// Vanishing at hyperplanes: Psi(s,0) = Psi(0,s) = 0 on the samples.
inline PropertyReport check_psi1(const Integrand& psi,
                                 const std::vector<double>& samples = default_samples(),
                                 double tol = kDefaultPropTol) {
    PropertyReport r;
    r.strict = true;
    for (double s : samples) {
        r.worst_violation = std::max(
            {r.worst_violation, std::abs(psi(s, 0.0)), std::abs(psi(0.0, s))});
    }
    r.holds = r.worst_violation <= tol;
    return r;
}

struct Rectangle {
    double a, b, c, d;  // 0 <= a < b, 0 <= c < d
};

inline std::vector<Rectangle> default_rectangles() {
    const auto s = default_samples();
    std::vector<Rectangle> rects;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        for (std::size_t j = 0; j + 1 < s.size(); ++j)
            rects.push_back({s[i], s[i + 1], s[j], s[j + 1]});
    return rects;
}

/// Supermodularity: nonnegative second-order rectangle differences.
inline PropertyReport check_psi2(const Integrand& psi,
                                 const std::vector<Rectangle>& rects = default_rectangles(),
                                 double tol = kDefaultPropTol) {
    PropertyReport r;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& q : rects) {
        const double diff =
            psi(q.b, q.d) - psi(q.b, q.c) - psi(q.a, q.d) + psi(q.a, q.c);
        worst = std::min(worst, diff);
    }
    r.worst_violation = std::max(0.0, -worst);
    r.holds = worst >= -tol;
    r.strict = worst > tol;
    return r;
}

struct ScalingTriple {
    double x;       // scaled argument (>= 0)
    double lo, hi;  // 0 <= lo < hi, interval in the other slot
    double t;       // scale factor in (0,1)
    bool first_slot;  // true: condition (i) scales the first slot
};

inline std::vector<ScalingTriple> default_scaling_triples() {
    const auto s = default_samples();
    const double ts[] = {0.25, 0.5, 0.75};
    std::vector<ScalingTriple> out;
    for (bool first : {true, false})
        for (double x : s)
            for (std::size_t j = 0; j + 1 < s.size(); ++j)
                for (double t : ts)
                    out.push_back({x, s[j], s[j + 1], t, first});
    return out;
}

/// Sub-homogeneity of partial increments under scaling of one argument:
/// Psi(tx, hi) - t Psi(x, hi) - Psi(tx, lo) + t Psi(x, lo) <= 0, and the
/// symmetric condition in the second slot.
inline PropertyReport check_psi3(const Integrand& psi,
                                 const std::vector<ScalingTriple>& triples =
                                     default_scaling_triples(),
                                 double tol = kDefaultPropTol) {
    PropertyReport r;
    double worst = -std::numeric_limits<double>::infinity();
    bool strict = true;
    for (const auto& q : triples) {
        double expr;
        if (q.first_slot) {
            expr = psi(q.t * q.x, q.hi) - q.t * psi(q.x, q.hi) -
                   psi(q.t * q.x, q.lo) + q.t * psi(q.x, q.lo);
        } else {
            expr = psi(q.hi, q.t * q.x) - q.t * psi(q.hi, q.x) -
                   psi(q.lo, q.t * q.x) + q.t * psi(q.lo, q.x);
        }
        worst = std::max(worst, expr);
        if (q.x > 0.0 && q.hi > q.lo && expr >= -tol) strict = false;
    }
    r.worst_violation = std::max(0.0, worst);
    r.holds = worst <= tol;
    r.strict = strict;
    return r;
}

// ---------------------------------------------------------------------------
// Decomposition Psi(u,v) = PsiTilde(phi1(u), phi2(v)) for bounded Psi
// ---------------------------------------------------------------------------

/// Tabulated nondecreasing map with phi(0) = 0, evaluated by lookup on its
/// tabulation grid (piecewise-constant from the left between knots).
struct MonotoneTable {
    std::vector<double> args;  // sorted, args[0] == 0
    std::vector<double> vals;  // nondecreasing, vals[0] == 0

    double operator()(double x) const {
        // largest tabulated argument <= x
        auto it = std::upper_bound(args.begin(), args.end(), x);
        if (it == args.begin()) return vals.front();
        return vals[static_cast<std::size_t>(it - args.begin()) - 1];
    }
};

/// Lipschitz factor of the decomposition, defined on the product of the
/// closed phi images with linear interpolation across image gaps.
struct Decomposition {
    MonotoneTable phi1, phi2;
    std::vector<double> image1, image2;          // sorted unique image points
    std::vector<std::vector<double>> tilde_vals; // tilde on image1 x image2
    double lipschitz_bound = 0.0;
    double residual = 0.0;

    double tilde(double p, double q) const {
        auto locate = [](const std::vector<double>& grid, double x,
                         std::size_t& lo, double& w) {
            auto it = std::lower_bound(grid.begin(), grid.end(), x);
            if (it == grid.end()) { lo = grid.size() - 1; w = 0.0; return; }
            std::size_t hi = static_cast<std::size_t>(it - grid.begin());
            if (grid[hi] == x || hi == 0) { lo = hi; w = 0.0; return; }
            lo = hi - 1;
            w = (x - grid[lo]) / (grid[hi] - grid[lo]);
        };
        std::size_t i, j;
        double wi, wj;
        locate(image1, p, i, wi);
        locate(image2, q, j, wj);
        const std::size_t i1 = std::min(i + 1, image1.size() - 1);
        const std::size_t j1 = std::min(j + 1, image2.size() - 1);
        const double v00 = tilde_vals[i][j];
        const double v10 = tilde_vals[i1][j];
        const double v01 = tilde_vals[i][j1];
        const double v11 = tilde_vals[i1][j1];
        return (1 - wi) * (1 - wj) * v00 + wi * (1 - wj) * v10 +
               (1 - wi) * wj * v01 + wi * wj * v11;
    }
};

/// Factors a bounded supermodular integrand vanishing at hyperplanes as
/// PsiTilde(phi1(u), phi2(v)): phi1(u) = Psi(u, V), phi2(v) = Psi(V, v)
/// tabulated on `grid`, tilde assigned on the image points and extended by
/// linear interpolation across gaps. Exact whenever Psi(u, .) is constant
/// beyond V.
inline Decomposition decompose(const Integrand& psi, std::vector<double> grid,
                               double v_limit) {
    if (!psi.flags.bounded)
        throw IntegrandError("decompose: integrand must be bounded");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty() || grid.front() != 0.0) grid.insert(grid.begin(), 0.0);

    Decomposition d;
    d.phi1.args = grid;
    d.phi2.args = grid;
    for (double u : grid) d.phi1.vals.push_back(psi(u, v_limit));
    for (double v : grid) d.phi2.vals.push_back(psi(v_limit, v));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (d.phi1.vals[i] < d.phi1.vals[i - 1] ||
            d.phi2.vals[i] < d.phi2.vals[i - 1])
            throw IntegrandError(
                "decompose: non-monotone phi (supermodularity violated on grid)");
    }

    auto uniq = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    d.image1 = uniq(d.phi1.vals);
    d.image2 = uniq(d.phi2.vals);

    // Assign tilde on image points: tilde(phi1(u), phi2(v)) = Psi(u, v),
    // picking the first grid preimage of each image value.
    auto preimage = [&](const MonotoneTable& phi, double p) {
        for (std::size_t i = 0; i < phi.vals.size(); ++i)
            if (phi.vals[i] == p) return phi.args[i];
        return phi.args.back();
    };
    d.tilde_vals.assign(d.image1.size(), std::vector<double>(d.image2.size(), 0.0));
    for (std::size_t i = 0; i < d.image1.size(); ++i)
        for (std::size_t j = 0; j < d.image2.size(); ++j)
            d.tilde_vals[i][j] =
                psi(preimage(d.phi1, d.image1[i]), preimage(d.phi2, d.image2[j]));

    // Empirical Lipschitz bound: max slope between adjacent image points.
    for (std::size_t i = 0; i + 1 < d.image1.size(); ++i)
        for (std::size_t j = 0; j < d.image2.size(); ++j)
            d.lipschitz_bound = std::max(
                d.lipschitz_bound,
                std::abs(d.tilde_vals[i + 1][j] - d.tilde_vals[i][j]) /
                    (d.image1[i + 1] - d.image1[i]));
    for (std::size_t j = 0; j + 1 < d.image2.size(); ++j)
        for (std::size_t i = 0; i < d.image1.size(); ++i)
            d.lipschitz_bound = std::max(
                d.lipschitz_bound,
                std::abs(d.tilde_vals[i][j + 1] - d.tilde_vals[i][j]) /
                    (d.image2[j + 1] - d.image2[j]));

    for (double u : grid)
        for (double v : grid)
            d.residual = std::max(
                d.residual, std::abs(psi(u, v) - d.tilde(d.phi1(u), d.phi2(v))));
    return d;
}

// ---------------------------------------------------------------------------
// Truncation and the F machinery
// ---------------------------------------------------------------------------

/// Psi^L(s1, s2) = Psi(min(s1, L), min(s2, L)); bounded, inherits all
/// declared flags.
inline Integrand truncate(const Integrand& psi, double L) {
    if (!(L > 0.0)) throw IntegrandError("truncate: L must be positive");
    Integrand out = psi;
    out.name = psi.name + "^L=" + std::to_string(L);
    auto base = psi.eval;
    out.eval = [base, L](double s, double t) {
        return base(std::min(s, L), std::min(t, L));
    };
    if (psi.deriv2) {
        auto d2 = psi.deriv2;
        out.deriv2 = [d2, L](double s, double t) {
            return t >= L ? 0.0 : d2(std::min(s, L), t);
        };
    }
    out.flags.bounded = true;
    out.bound = psi(L, L);
    return out;
}

/// F(s1, u) = d/du Psi(s1, u): closed form when available, otherwise a
/// central finite difference (one-sided at the left boundary).
inline double derivative_F(const Integrand& psi, double s1, double u,
                           double delta = 1e-6) {
    if (psi.has_closed_form_deriv()) return psi.deriv2(s1, u);
    if (u - delta < 0.0)
        return (psi(s1, u + delta) - psi(s1, u)) / delta;
    return (psi(s1, u + delta) - psi(s1, u - delta)) / (2.0 * delta);
}

// ---------------------------------------------------------------------------
// Gamma profiles (scaling hypotheses of the Hardy-Littlewood bound)
// ---------------------------------------------------------------------------

struct GammaFlags {
    bool sublinear_scaling = false;
    bool strict_sublinear_scaling = false;
};

struct GammaProfile {
    std::string name;
    std::function<double(double)> eval;
    GammaFlags flags;

    double operator()(double x) const { return eval(x); }
};

struct GammaSample {
    double t;  // in (0,1)
    double x;  // > 0
};

inline std::vector<GammaSample> default_gamma_samples() {
    std::vector<GammaSample> out;
    for (double t : {0.1, 0.25, 0.5, 0.75, 0.9})
        for (double x : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0})
            out.push_back({t, x});
    return out;
}

/// Gamma(0) = 0 and Gamma(t x) <= t Gamma(x) on the samples.
inline PropertyReport check_gamma(const GammaProfile& g,
                                  const std::vector<GammaSample>& samples =
                                      default_gamma_samples(),
                                  double tol = kDefaultPropTol) {
    PropertyReport r;
    r.worst_violation = std::abs(g(0.0));
    bool strict = true;
    for (const auto& s : samples) {
        const double excess = g(s.t * s.x) - s.t * g(s.x);
        r.worst_violation = std::max(r.worst_violation, excess);
        if (excess >= -tol) strict = false;
    }
    r.holds = r.worst_violation <= tol && std::abs(g(0.0)) <= tol;
    r.strict = strict && r.holds;
    return r;
}

}  // namespace rieszmax
