// Batch front-end: instance ingestion, verification subcommands, CSV output.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "rieszmax/rieszmax.hpp"

using namespace rieszmax;

namespace {

struct RunConfig {
    double tol_prop = kDefaultPropTol;
    double tol_eval = kDefaultEvalTol;
    double tol_chain_C = 1.0;
    std::uint64_t seed = 0;
    std::string output;
};

class CsvWriter {
public:
    CsvWriter(const RunConfig& cfg, const std::string& subcommand)
        : cfg_(cfg), subcommand_(subcommand) {
        if (!cfg.output.empty()) {
            file_.open(cfg.output);
            if (!file_) throw Error("cannot open output file: " + cfg.output);
        }
    }

    std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

    void header(const std::string& payload_cols) {
        out() << "instance_hash,subcommand,tol_prop,tol_eval,tol_chain_C,"
              << payload_cols << "\n";
    }

    void row(const std::string& hash, const std::string& payload) {
        out() << hash << ',' << subcommand_ << ',' << format_double(cfg_.tol_prop)
              << ',' << format_double(cfg_.tol_eval) << ','
              << format_double(cfg_.tol_chain_C) << ',' << payload << "\n";
    }

private:
    RunConfig cfg_;
    std::string subcommand_;
    std::ofstream file_;
};

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open instance file: " + path);
    return parse_instance(in);
}

std::string join_values(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? " " : "") << format_double(v[i]);
    return os.str();
}

GammaProfile make_gamma(const std::string& name) {
    if (name == "x") return {"x", [](double x) { return x; }, {true, false}};
    if (name == "x2")
        return {"x2", [](double x) { return x * x; }, {true, true}};
    if (name == "xmin1")
        return {"xmin1", [](double x) { return x * std::min(x, 1.0); },
                {true, false}};
    throw Error("unknown gamma profile: " + name + " (use x|x2|xmin1)");
}

std::string hash_of(const std::string& s) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(s)));
    return buf;
}

int cmd_rearrange(const RunConfig& cfg, const std::string& path) {
    const Instance inst = load_instance(path);
    CsvWriter csv(cfg, "rearrange");
    csv.header("field,values");
    const std::string h = instance_hash(inst);
    csv.row(h, "f_star," + join_values(schwarz_rearrange(inst.f).values));
    csv.row(h, "g_star," + join_values(schwarz_rearrange(inst.g).values));
    return 0;
}

int cmd_polarize(const RunConfig& cfg, const std::string& path, int axis,
                 double offset) {
    const Instance inst = load_instance(path);
    const Reflection sigma(axis, offset);
    CsvWriter csv(cfg, "polarize");
    csv.header("field,values");
    const std::string h = instance_hash(inst);
    csv.row(h, "f_sigma," + join_values(polarize(inst.f, sigma).values));
    csv.row(h, "g_sigma," + join_values(polarize(inst.g, sigma).values));
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& path,
             const std::string& psi_name, const std::string& kernel_name,
             const std::string& eval_path) {
    const Instance inst = load_instance(path);
    const Integrand psi = make_integrand(psi_name);
    const Kernel j = make_kernel(kernel_name);
    const double v = eval_path == "layercake"
                         ? layercake_eval(inst.f, inst.g, psi, j)
                         : riesz_eval(inst.f, inst.g, psi, j);
    CsvWriter csv(cfg, "eval");
    csv.header("psi,kernel,path,J");
    csv.row(instance_hash(inst), psi_name + "," + kernel_name + "," + eval_path +
                                     "," + format_double(v));
    return 0;
}

int cmd_check_integrand(const RunConfig& cfg, const std::string& psi_name) {
    const Integrand psi = make_integrand(psi_name);
    CsvWriter csv(cfg, "check-integrand");
    csv.header("psi,property,holds,strict,worst_violation");
    const std::string h = hash_of(psi_name);
    const auto r1 = check_psi1(psi, default_samples(), cfg.tol_prop);
    const auto r2 = check_psi2(psi, default_rectangles(), cfg.tol_prop);
    const auto r3 = check_psi3(psi, default_scaling_triples(), cfg.tol_prop);
    auto emit = [&](const char* prop, const PropertyReport& r) {
        csv.row(h, psi_name + "," + prop + "," + (r.holds ? "1" : "0") + "," +
                       (r.strict ? "1" : "0") + "," +
                       format_double(r.worst_violation));
    };
    emit("psi1", r1);
    emit("psi2", r2);
    emit("psi3", r3);
    return 0;
}

int cmd_decompose(const RunConfig& cfg, const std::string& psi_name,
                  double vlimit) {
    const Integrand psi = make_integrand(psi_name);
    std::vector<double> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(vlimit * i / 49.0);
    const Decomposition dec = decompose(psi, grid, vlimit);
    CsvWriter csv(cfg, "decompose");
    csv.header("psi,field,arg,value");
    const std::string h = hash_of(psi_name);
    for (std::size_t i = 0; i < dec.phi1.args.size(); ++i)
        csv.row(h, psi_name + ",phi1," + format_double(dec.phi1.args[i]) + "," +
                       format_double(dec.phi1.vals[i]));
    for (std::size_t i = 0; i < dec.phi2.args.size(); ++i)
        csv.row(h, psi_name + ",phi2," + format_double(dec.phi2.args[i]) + "," +
                       format_double(dec.phi2.vals[i]));
    csv.row(h, psi_name + ",residual,," + format_double(dec.residual));
    csv.row(h, psi_name + ",lipschitz_bound,," + format_double(dec.lipschitz_bound));
    return 0;
}

struct VerifyArgs {
    std::string kind;
    std::string instance_path;
    int random_n = 0;
    std::string psi_name = "product";
    std::string kernel_name = "exp";
    std::string gamma_name = "x";
    // defaults for random campaigns
    int cells = 32;
    double halfwidth = 4.0;
};

int cmd_verify(const RunConfig& cfg, const VerifyArgs& a) {
    CsvWriter csv(cfg, "verify-" + a.kind);
    std::mt19937_64 rng(cfg.seed);
    int failures = 0;

    auto instances = [&]() {
        std::vector<Instance> out;
        if (!a.instance_path.empty()) {
            out.push_back(load_instance(a.instance_path));
        } else {
            const Domain d(1, a.halfwidth, a.cells);
            const ConstraintSpec c(1.0, d.measure() / 2.0);
            for (int i = 0; i < std::max(1, a.random_n); ++i)
                out.push_back(random_instance(d, c, c, rng));
        }
        return out;
    }();

    const Integrand psi = make_integrand(a.psi_name);
    const Kernel j = make_kernel(a.kernel_name);

    if (a.kind == "chain") {
        csv.header("psi,kernel,slack_rearrange,slack_first,slack_second,pass");
        for (const auto& inst : instances) {
            const auto r = verify_chain(inst.f, inst.g, inst.c1, inst.c2, psi, j);
            const double tol =
                chain_tolerance(inst.domain, cfg.tol_chain_C) *
                (1.0 + std::abs(r.j_ball));
            const bool pass = r.min_slack() >= -tol;
            failures += pass ? 0 : 1;
            csv.row(instance_hash(inst),
                    a.psi_name + "," + a.kernel_name + "," +
                        format_double(r.slack_rearrange) + "," +
                        format_double(r.slack_first) + "," +
                        format_double(r.slack_second) + "," + (pass ? "1" : "0"));
        }
    } else if (a.kind == "lemma21") {
        csv.header("kernel,max_violation,pass");
        for (const auto& inst : instances) {
            const GridFunction hfun = schwarz_rearrange(inst.f);
            const GridFunction nu = potential(hfun, j);
            const auto order = radial_order(inst.domain);
            double worst = 0.0;
            for (std::size_t k = 1; k < order.size(); ++k)
                worst = std::max(
                    worst, nu.values[order[k]] - nu.values[order[k - 1]]);
            const double tol = inst.domain.dim() == 1
                                   ? cfg.tol_prop
                                   : cfg.tol_chain_C * inst.domain.cell_width();
            const bool pass = worst <= tol;
            failures += pass ? 0 : 1;
            csv.row(instance_hash(inst), a.kernel_name + "," +
                                             format_double(worst) + "," +
                                             (pass ? "1" : "0"));
        }
    } else if (a.kind == "lemma23") {
        const GammaProfile gamma = make_gamma(a.gamma_name);
        csv.header("gamma,lhs,rhs,pass");
        for (const auto& inst : instances) {
            const GridFunction u = schwarz_rearrange(inst.f);
            const auto r = hl_bound(u, gamma, inst.g, inst.c2, cfg.tol_prop);
            failures += r.holds ? 0 : 1;
            csv.row(instance_hash(inst),
                    a.gamma_name + "," + format_double(r.lhs) + "," +
                        format_double(r.rhs) + "," + (r.holds ? "1" : "0"));
        }
    } else if (a.kind == "truncation") {
        csv.header("psi,kernel,L,J_L,pass");
        for (const auto& inst : instances) {
            const double full = riesz_eval(inst.f, inst.g, psi, j);
            const double vmax =
                std::max(inst.f.max_value(), inst.g.max_value());
            double prev = -std::numeric_limits<double>::infinity();
            for (int step = 1; step <= 6; ++step) {
                const double L = vmax * step / 5.0 + 1e-12;
                const double v = riesz_eval(inst.f, inst.g, truncate(psi, L), j);
                const bool pass =
                    v >= prev - cfg.tol_prop && (step < 5 || v == full);
                failures += pass ? 0 : 1;
                csv.row(instance_hash(inst),
                        a.psi_name + "," + a.kernel_name + "," +
                            format_double(L) + "," + format_double(v) + "," +
                            (pass ? "1" : "0"));
                prev = v;
            }
        }
    } else {
        throw Error("unknown verify kind: " + a.kind);
    }
    return failures == 0 ? 0 : 1;
}

int cmd_maximize(const RunConfig& cfg, const std::string& path,
                 const std::string& mode, const std::string& levels_str, int m1,
                 int m2, std::size_t budget, int max_iters,
                 const std::string& psi_name, const std::string& kernel_name) {
    const Instance inst = load_instance(path);
    const Integrand psi = make_integrand(psi_name);
    const Kernel j = make_kernel(kernel_name);
    CsvWriter csv(cfg, "maximize");
    const std::string h = instance_hash(inst);
    if (mode == "ascent") {
        auto r = exchange_ascent({inst.f, inst.g}, inst.c1, inst.c2, psi, j,
                                 max_iters);
        csv.header("field,value");
        csv.row(h, "value," + format_double(r.value));
        csv.row(h, std::string("improving_move_found_at_start,") +
                       (r.improving_move_found_at_start ? "1" : "0"));
        csv.row(h, "iterations," + std::to_string(r.iterations));
        csv.row(h, "f_final," + join_values(r.final.first.values));
        csv.row(h, "g_final," + join_values(r.final.second.values));
        return 0;
    }
    std::vector<double> levels;
    {
        std::istringstream ls(levels_str);
        std::string tok;
        while (std::getline(ls, tok, ',')) levels.push_back(std::stod(tok));
    }
    SearchSpace space(inst.domain, levels, m1, m2);
    auto cert = exhaustive_max(space, inst.c1, inst.c2, psi, j, budget);
    csv.header("field,value");
    csv.row(h, "best_value," + format_double(cert.best_value));
    csv.row(h, "ball_value," + format_double(cert.ball_value));
    csv.row(h, std::string("ball_is_max,") + (cert.ball_is_max ? "1" : "0"));
    csv.row(h, "argmax_count," + std::to_string(cert.argmax_list.size()));
    csv.row(h, "translation_classes," +
                   std::to_string(cert.translation_classes.size()));
    const auto u = uniqueness_check(cert, inst.domain);
    csv.row(h, std::string("unique_up_to_translation,") +
                   (u.unique_up_to_translation ? "1" : "0"));
    return 0;
}

int cmd_bench(const RunConfig& cfg, const std::string& path,
              const std::string& psi_name, const std::string& kernel_name) {
    const Instance inst = load_instance(path);
    const Integrand psi = make_integrand(psi_name);
    const Kernel j = make_kernel(kernel_name);
    auto time_of = [&](auto&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        const double v = fn();
        const auto t1 = std::chrono::steady_clock::now();
        return std::pair<double, double>(
            v, std::chrono::duration<double>(t1 - t0).count());
    };
    const auto [vn, tn] =
        time_of([&] { return riesz_eval(inst.f, inst.g, psi, j); });
    const auto [vl, tl] =
        time_of([&] { return layercake_eval(inst.f, inst.g, psi, j); });
    CsvWriter csv(cfg, "bench");
    csv.header("psi,kernel,path,J,seconds");
    const std::string h = instance_hash(inst);
    csv.row(h, psi_name + "," + kernel_name + ",naive," + format_double(vn) +
                   "," + format_double(tn));
    csv.row(h, psi_name + "," + kernel_name + ",layercake," + format_double(vl) +
                   "," + format_double(tl));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete verification toolkit for Riesz-type functional maximizers"};
    app.require_subcommand(1);

    RunConfig cfg;
    app.add_option("--tol-prop", cfg.tol_prop, "property-check tolerance");
    app.add_option("--tol-eval", cfg.tol_eval, "path-equivalence tolerance");
    app.add_option("--tol-chain-C", cfg.tol_chain_C, "2D chain tolerance factor");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--output", cfg.output, "output CSV path (default stdout)");

    std::string instance_path, psi_name = "product", kernel_name = "exp";
    std::string eval_path = "naive", mode = "exhaustive", levels = "0,1";
    int axis = 0, m1 = 1, m2 = 1, max_iters = 100;
    double offset = 0.5, vlimit = 10.0;
    std::size_t budget = kDefaultEvalBudget;
    VerifyArgs va;

    auto* re = app.add_subcommand("rearrange", "emit f*, g*");
    re->add_option("instance", instance_path)->required();

    auto* po = app.add_subcommand("polarize", "emit the polarized pair");
    po->add_option("instance", instance_path)->required();
    po->add_option("--axis", axis);
    po->add_option("--offset", offset)->required();

    auto* ev = app.add_subcommand("eval", "evaluate J");
    ev->add_option("instance", instance_path)->required();
    ev->add_option("--psi", psi_name);
    ev->add_option("--kernel", kernel_name);
    ev->add_option("--path", eval_path)
        ->check(CLI::IsMember({"naive", "layercake"}));

    auto* ci = app.add_subcommand("check-integrand", "property reports");
    ci->add_option("--psi", psi_name)->required();

    auto* de = app.add_subcommand("decompose", "phi tables and residual");
    de->add_option("--psi", psi_name)->required();
    de->add_option("--vlimit", vlimit);

    auto* vf = app.add_subcommand("verify", "inequality campaigns");
    vf->add_option("kind", va.kind)
        ->required()
        ->check(CLI::IsMember({"lemma21", "lemma23", "chain", "truncation"}));
    vf->add_option("instance", va.instance_path);
    vf->add_option("--random", va.random_n);
    vf->add_option("--psi", va.psi_name);
    vf->add_option("--kernel", va.kernel_name);
    vf->add_option("--gamma", va.gamma_name);
    vf->add_option("--cells", va.cells);
    vf->add_option("--halfwidth", va.halfwidth);

    auto* mx = app.add_subcommand("maximize", "maximizer certificates");
    mx->add_option("instance", instance_path)->required();
    mx->add_option("--mode", mode)->check(CLI::IsMember({"exhaustive", "ascent"}));
    mx->add_option("--levels", levels);
    mx->add_option("--m1", m1);
    mx->add_option("--m2", m2);
    mx->add_option("--budget", budget);
    mx->add_option("--max-iters", max_iters);
    mx->add_option("--psi", psi_name);
    mx->add_option("--kernel", kernel_name);

    auto* be = app.add_subcommand("bench", "time both eval paths");
    be->add_option("instance", instance_path)->required();
    be->add_option("--psi", psi_name);
    be->add_option("--kernel", kernel_name);

    // global tolerance/seed/output flags may follow the subcommand
    for (auto* s : {re, po, ev, ci, de, vf, mx, be}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (re->parsed()) return cmd_rearrange(cfg, instance_path);
        if (po->parsed()) return cmd_polarize(cfg, instance_path, axis, offset);
        if (ev->parsed())
            return cmd_eval(cfg, instance_path, psi_name, kernel_name, eval_path);
        if (ci->parsed()) return cmd_check_integrand(cfg, psi_name);
        if (de->parsed()) return cmd_decompose(cfg, psi_name, vlimit);
        if (vf->parsed()) return cmd_verify(cfg, va);
        if (mx->parsed())
            return cmd_maximize(cfg, instance_path, mode, levels, m1, m2, budget,
                                max_iters, psi_name, kernel_name);
        if (be->parsed()) return cmd_bench(cfg, instance_path, psi_name, kernel_name);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
