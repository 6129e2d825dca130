// Command line front end: parsing, printing and the main computations.
#include "jetforms/parser.hpp"
#include "jetforms/printer.hpp"
#include "jetforms/secondary.hpp"
#include "jetforms/selfcheck.hpp"
#include "jetforms/serialize.hpp"
#include "jetforms/truncation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace jetforms;

namespace {

struct Session {
    BundleConfig cfg{1, 1, 1};
    std::string format = "text";
    int max_jet = 3;
    int trunc_deg = 2;
    std::uint64_t seed = 1;

    void print_form(const FormExpr& f) const
    {
        if (format == "latex")
            std::cout << print_latex(f) << "\n";
        else if (format == "structured")
            std::cout << to_json(f).dump(2) << "\n";
        else
            std::cout << print_text(f) << "\n";
    }
};

MultiIndex parse_sigma(const BundleConfig& cfg, std::string s)
{
    for (char& c : s)
        if (c == '(' || c == ')' || c == ',')
            c = ' ';
    std::istringstream in(s);
    std::vector<int> e;
    int v;
    while (in >> v)
        e.push_back(v);
    if (static_cast<int>(e.size()) != cfg.n)
        throw ParseError(1, 1, "multi-index arity mismatch");
    return MultiIndex(e);
}

FormExpr as_top_form(const BundleConfig& cfg, const FormExpr& f)
{
    std::vector<int> top(cfg.k, 0);
    top[cfg.k - 1] = cfg.n;
    bool is_top = !f.is_zero();
    for (const auto& [deg, part] : f.components())
        if (deg != top)
            is_top = false;
    if (is_top)
        return f;
    return f.wedge(top_horizontal(cfg));
}

void print_covector_result(const Session& s, const ModuleElement& psi)
{
    if (s.format == "structured") {
        std::cout << to_json(SecondaryForm::from_covector(psi).kernel()).dump(2) << "\n";
        return;
    }
    if (s.cfg.m == 1 && s.cfg.k == 1) {
        s.print_form(psi[0]);
        return;
    }
    std::cout << print_covector(psi) << "\n";
}

void print_kernel_result(const Session& s, const MultiKernel& k)
{
    if (s.format == "structured") {
        std::cout << to_json(k).dump(2) << "\n";
        return;
    }
    if (k.is_zero()) {
        std::cout << "0\n";
        return;
    }
    const auto& cfg = k.config();
    for (const auto& [key, a] : k.entries()) {
        std::string slots;
        for (const auto& sk : key) {
            auto [j, K] = kappa_decode(cfg, sk.alpha);
            if (!slots.empty())
                slots += ", ";
            slots += "u" + std::to_string(j);
            if (!K.empty())
                slots += "[K=" + K.str() + "]";
            if (!sk.sigma.is_zero())
                slots += "_" + sk.sigma.str();
        }
        std::cout << "[" << slots << "]  " << print_text(a) << "\n";
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"symbolic calculus for iterated differential forms on jet bundles"};
    app.require_subcommand(1);

    Session s;
    std::string config_file;
    app.add_option("--n", s.cfg.n, "base dimension");
    app.add_option("--m", s.cfg.m, "fiber dimension");
    app.add_option("--k", s.cfg.k, "iteration depth");
    app.add_option("--format", s.format, "output format: text | latex | structured")
        ->check(CLI::IsMember({"text", "latex", "structured"}));
    app.add_option("--max-jet", s.max_jet, "jet order bound for truncations");
    app.add_option("--trunc-deg", s.trunc_deg, "polynomial degree bound for truncations");
    app.add_option("--seed", s.seed, "random seed for self checks");
    app.add_option("--config", config_file, "JSON file with the same keys");

    std::vector<std::string> args;
    std::string cmd;
    auto add_cmd = [&](const std::string& name, const std::string& desc, int nargs) {
        auto* c = app.add_subcommand(name, desc);
        c->fallthrough();
        c->callback([&cmd, name]() { cmd = name; });
        if (nargs > 0)
            c->add_option("args", args, "arguments")->expected(nargs);
        return c;
    };

    add_cmd("normalize", "canonical form of an expression", 1);
    add_cmd("wedge", "product of two expressions", 2);
    add_cmd("d", "full differential of a slot", 2);
    add_cmd("dv", "vertical differential of a slot", 2);
    add_cmd("dh", "horizontal differential of a slot", 2);
    add_cmd("kappa", "slot swap involution", 2);
    add_cmd("Dtot", "iterated total derivative", 2);
    add_cmd("el", "Euler-Lagrange covector of a Lagrangian", 1);
    add_cmd("helmholtz", "self-adjointness of the linearization", 1);
    add_cmd("adjoint", "adjoint of a scalar operator in total derivatives", 1);
    add_cmd("lin", "universal linearization of a scalar", 1);
    add_cmd("bracket", "bracket of two evolutionary fields", 2);
    add_cmd("d1", "first differential of a covector", 1);
    add_cmd("lie", "Lie action of a field on a covector", 2);
    add_cmd("insert", "insertion of a field into a covector", 2);
    add_cmd("tensor-check", "membership test for secondary tensors", 1);
    auto* coh = app.add_subcommand("cohomology", "kernel dimension of d_k on the function slice");
    coh->fallthrough();
    coh->callback([&cmd]() { cmd = "cohomology"; });
    auto* sc = app.add_subcommand("selfcheck", "run the internal property suites");
    sc->fallthrough();
    bool quick = false;
    sc->add_flag("--quick", quick, "smaller sample counts");
    sc->callback([&cmd]() { cmd = "selfcheck"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in)
                throw std::invalid_argument("cannot open config file " + config_file);
            json j;
            in >> j;
            if (j.count("n"))
                s.cfg.n = j["n"].get<int>();
            if (j.count("m"))
                s.cfg.m = j["m"].get<int>();
            if (j.count("k"))
                s.cfg.k = j["k"].get<int>();
            if (j.count("format"))
                s.format = j["format"].get<std::string>();
            if (j.count("max_jet"))
                s.max_jet = j["max_jet"].get<int>();
            if (j.count("trunc_deg"))
                s.trunc_deg = j["trunc_deg"].get<int>();
            if (j.count("seed"))
                s.seed = j["seed"].get<std::uint64_t>();
        }
        BundleConfig cfg(s.cfg.n, s.cfg.m, s.cfg.k);

        if (cmd == "normalize") {
            s.print_form(parse_form(cfg, args[0]));
        } else if (cmd == "wedge") {
            s.print_form(parse_form(cfg, args[0]).wedge(parse_form(cfg, args[1])));
        } else if (cmd == "d" || cmd == "dv" || cmd == "dh") {
            int slot = std::stoi(args[0]);
            SlotKind kind = cmd == "d"    ? SlotKind::Full
                            : cmd == "dv" ? SlotKind::Vertical
                                          : SlotKind::Horizontal;
            s.print_form(differential(slot, kind, parse_form(cfg, args[1])));
        } else if (cmd == "kappa") {
            s.print_form(kappa(std::stoi(args[0]), parse_form(cfg, args[1])));
        } else if (cmd == "Dtot") {
            s.print_form(total_derivative(parse_sigma(cfg, args[0]), parse_form(cfg, args[1])));
        } else if (cmd == "el") {
            auto omega = as_top_form(cfg, parse_form(cfg, args[0]));
            print_covector_result(s, euler(omega));
        } else if (cmd == "helmholtz") {
            auto F = parse_form(cfg, args[0]);
            if (!classify(F).in_Cstar)
                throw std::domain_error("expression must lie in the vertical subalgebra");
            ModuleElement xi(cfg, scalar_module(cfg));
            xi.set(0, F);
            auto L = linearization(xi);
            CDiffOp moved(cfg, dual_module(scalar_module(cfg)), dual_module(kappa_module(cfg)));
            for (const auto& [key, cell] : L.entries())
                for (const auto& [sig, a] : cell)
                    moved.add_entry(key.second, key.first, sig, a);
            bool sa = adjoint(L) == moved;
            ModuleElement psi(cfg, dual_module(kappa_module(cfg)));
            psi.set(kappa_index(cfg, 1, SlotSet()), F);
            bool dzero = d1(SecondaryForm::from_covector(psi)).is_zero();
            if (sa != dzero)
                throw std::domain_error("adjoint test and d1 disagree");
            std::cout << (sa ? "self-adjoint: variational" : "not self-adjoint: not variational")
                      << "\n";
        } else if (cmd == "adjoint") {
            std::cout << print_operator(adjoint(parse_operator(cfg, args[0]))) << "\n";
        } else if (cmd == "lin") {
            auto F = parse_form(cfg, args[0]);
            if (!classify(F).in_Cstar)
                throw std::domain_error("expression must lie in the vertical subalgebra");
            ModuleElement xi(cfg, scalar_module(cfg));
            xi.set(0, F);
            std::cout << print_operator(linearization(xi)) << "\n";
        } else if (cmd == "bracket") {
            auto a = parse_kappa_field(cfg, args[0]);
            auto b = parse_kappa_field(cfg, args[1]);
            std::cout << print_kappa_field(bracket(a, b)) << "\n";
        } else if (cmd == "d1") {
            ModuleElement cov(cfg, dual_module(kappa_module(cfg)));
            for (const auto& [key, v] : parse_kappa_field(cfg, args[0]).components())
                cov.set(kappa_index(cfg, key.first, key.second), v);
            print_kernel_result(s, d1(SecondaryForm::from_covector(cov)).kernel());
        } else if (cmd == "lie") {
            auto chi = parse_kappa_field(cfg, args[0]);
            ModuleElement cov(cfg, dual_module(kappa_module(cfg)));
            auto comps = parse_kappa_field(cfg, args[1]);
            for (const auto& [key, v] : comps.components())
                cov.set(kappa_index(cfg, key.first, key.second), v);
            auto out = lie(chi, SecondaryForm::from_covector(cov));
            print_covector_result(s, out.as_covector());
        } else if (cmd == "insert") {
            auto chi = parse_kappa_field(cfg, args[0]);
            ModuleElement cov(cfg, dual_module(kappa_module(cfg)));
            auto comps = parse_kappa_field(cfg, args[1]);
            for (const auto& [key, v] : comps.components())
                cov.set(kappa_index(cfg, key.first, key.second), v);
            auto cls = insert(chi, SecondaryForm::from_covector(cov));
            s.print_form(cls.rep());
        } else if (cmd == "tensor-check") {
            json j;
            std::ifstream in(args[0]);
            if (in) {
                in >> j;
            } else {
                j = json::parse(args[0]);
            }
            auto kern = kernel_from_json(j);
            std::cout << (is_secondary_tensor(kern) ? "secondary tensor: yes"
                                                    : "secondary tensor: no")
                      << "\n";
        } else if (cmd == "cohomology") {
            TruncationSpec spec{s.max_jet, s.trunc_deg};
            std::vector<int> grade(cfg.k, 0);
            auto mid = slice_basis(cfg, spec, grade);
            auto rep = cohomology_dim(
                nullptr, nullptr,
                [&cfg](const FormExpr& f) { return differential(cfg.k, SlotKind::Full, f); },
                mid);
            std::cout << rep.to_json(spec, "d_k on functions").dump(2) << "\n";
        } else if (cmd == "selfcheck") {
            bool ok = run_selfcheck(quick, s.seed, std::cout);
            return ok ? 0 : 1;
        }
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
