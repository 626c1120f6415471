#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rieszmax/grid.hpp"

namespace rieszmax {

/// Malformed instance file; carries the offending line number.
struct ParseError : Error {
    int line;
    ParseError(int ln, const std::string& msg)
        : Error("line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

/// One problem instance: a domain, the pair (f, g) and both constraint slots.
struct Instance {
    Domain domain;
    GridFunction f;
    GridFunction g;
    ConstraintSpec c1;
    ConstraintSpec c2;
};

/// Parses the line-oriented instance format:
///   dim=1
///   halfwidth=2.5
///   cells=5
///   f=0 3 1 2 0
///   g=0 0 1 0 0
///   k1=1 l1=4 k2=1 l2=4
/// '#' starts a comment; keys k1/l1/k2/l2 may share a line or not.
inline Instance parse_instance(std::istream& in) {
    std::optional<int> dim, cells;
    std::optional<double> halfwidth, k1, l1, k2, l2;
    std::vector<double> fvals, gvals;
    bool have_f = false, have_g = false;

    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
        std::istringstream probe(line);
        std::string first;
        if (!(probe >> first)) continue;

        auto parse_list = [&](const std::string& rest, std::vector<double>& out) {
            std::istringstream vs(rest);
            double v;
            out.clear();
            while (vs >> v) out.push_back(v);
            if (!vs.eof())
                throw ParseError(ln, "malformed number in value list");
        };
        if (first.rfind("f=", 0) == 0) {
            parse_list(line.substr(line.find("f=") + 2), fvals);
            have_f = true;
            continue;
        }
        if (first.rfind("g=", 0) == 0) {
            parse_list(line.substr(line.find("g=") + 2), gvals);
            have_g = true;
            continue;
        }
        std::istringstream ts(line);
        std::string tok;
        while (ts >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw ParseError(ln, "expected key=value, got '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            try {
                if (key == "dim") dim = std::stoi(val);
                else if (key == "cells") cells = std::stoi(val);
                else if (key == "halfwidth") halfwidth = std::stod(val);
                else if (key == "k1") k1 = std::stod(val);
                else if (key == "l1") l1 = std::stod(val);
                else if (key == "k2") k2 = std::stod(val);
                else if (key == "l2") l2 = std::stod(val);
                else throw ParseError(ln, "unknown key '" + key + "'");
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception&) {
                throw ParseError(ln, "malformed value for '" + key + "'");
            }
        }
    }
    if (!dim || !halfwidth || !cells)
        throw ParseError(ln, "missing dim/halfwidth/cells");
    if (!have_f || !have_g) throw ParseError(ln, "missing f= or g= values");
    if (!k1 || !l1 || !k2 || !l2) throw ParseError(ln, "missing k1/l1/k2/l2");
    try {
        Domain d(*dim, *halfwidth, *cells);
        if (fvals.size() != d.cell_count() || gvals.size() != d.cell_count())
            throw ParseError(ln, "value list length does not match cell count");
        return Instance{d, GridFunction(d, fvals), GridFunction(d, gvals),
                        ConstraintSpec(*k1, *l1), ConstraintSpec(*k2, *l2)};
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(ln, e.what());
    }
}

/// Prints a double with 17 significant digits (round-trip exact).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string serialize_instance(const Instance& inst) {
    std::ostringstream os;
    os << "dim=" << inst.domain.dim() << "\n"
       << "halfwidth=" << format_double(inst.domain.halfwidth()) << "\n"
       << "cells=" << inst.domain.cells_per_axis() << "\n";
    os << "f=";
    for (double v : inst.f.values) os << ' ' << format_double(v);
    os << "\ng=";
    for (double v : inst.g.values) os << ' ' << format_double(v);
    os << "\nk1=" << format_double(inst.c1.cap) << " l1=" << format_double(inst.c1.mass)
       << " k2=" << format_double(inst.c2.cap) << " l2=" << format_double(inst.c2.mass)
       << "\n";
    return os.str();
}

/// FNV-1a 64-bit hash, used to tag CSV rows with their instance.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string instance_hash(const Instance& inst) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(serialize_instance(inst))));
    return buf;
}

/// Seeded generator of feasible grid functions: values uniform on [0, cap],
/// rescaled when the mass budget is exceeded.
inline GridFunction random_feasible(const Domain& d, const ConstraintSpec& c,
                                    std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, c.cap);
    std::vector<double> v(d.cell_count());
    for (double& x : v) x = dist(rng);
    double mass = 0.0;
    for (double x : v) mass += x;
    mass *= d.cell_measure();
    if (mass > c.mass) {
        const double scale = c.mass / mass;
        for (double& x : v) x *= scale;
    }
    return GridFunction(d, std::move(v));
}

inline Instance random_instance(const Domain& d, const ConstraintSpec& c1,
                                const ConstraintSpec& c2, std::mt19937_64& rng) {
    return Instance{d, random_feasible(d, c1, rng), random_feasible(d, c2, rng), c1, c2};
}

}  // namespace rieszmax
