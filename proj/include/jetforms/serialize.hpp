#pragma once

#include "secondary.hpp"

#include <json.hpp>

namespace jetforms {

using nlohmann::json;

inline json to_json(const BundleConfig& cfg)
{
    return {{"n", cfg.n}, {"m", cfg.m}, {"k", cfg.k}};
}
inline BundleConfig config_from_json(const json& j)
{
    return BundleConfig(j.at("n").get<int>(), j.at("m").get<int>(), j.at("k").get<int>());
}

inline json to_json(const Var& v)
{
    if (v.is_coord()) {
        const auto& c = v.coord();
        if (c.kind == JetCoord::Kind::Base)
            return {{"kind", "base"}, {"mu", c.index}};
        return {{"kind", "fiber"}, {"j", c.index}, {"sigma", c.sigma.entries()}};
    }
    auto entry = SymbolRegistry::instance().lookup(v.symbol_id());
    json args = json::array();
    for (const auto& a : entry.args)
        args.push_back(to_json(Var::coord(a)));
    return {{"kind", "opaque"}, {"name", entry.name}, {"args", args}, {"derivs", v.derivs()}};
}

inline Var var_from_json(const json& j)
{
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "base")
        return Var::coord(JetCoord::base(j.at("mu").get<int>()));
    if (kind == "fiber")
        return Var::coord(
            JetCoord::fiber(j.at("j").get<int>(), MultiIndex(j.at("sigma").get<std::vector<int>>())));
    if (kind == "opaque") {
        std::vector<JetCoord> args;
        for (const auto& a : j.at("args"))
            args.push_back(var_from_json(a).coord());
        int id = SymbolRegistry::instance().register_symbol(j.at("name").get<std::string>(),
                                                            std::move(args));
        return Var::opaque(id, j.at("derivs").get<std::vector<int>>());
    }
    throw std::invalid_argument("unknown variable kind '" + kind + "'");
}

inline json to_json(const Polynomial& p)
{
    json terms = json::array();
    for (const auto& [pm, c] : p.terms()) {
        json vars = json::array();
        for (const auto& [v, e] : pm)
            vars.push_back({{"var", to_json(v)}, {"exp", e}});
        terms.push_back({{"c", to_string(c)}, {"vars", vars}});
    }
    return terms;
}

inline Polynomial polynomial_from_json(const json& j)
{
    Polynomial p;
    for (const auto& t : j) {
        PolyMonomial pm;
        for (const auto& ve : t.at("vars"))
            pm.emplace_back(var_from_json(ve.at("var")), ve.at("exp").get<int>());
        std::sort(pm.begin(), pm.end());
        p.add_term(pm, parse_rational(t.at("c").get<std::string>()));
    }
    return p;
}

inline json to_json(const Coefficient& c)
{
    return {{"num", to_json(c.num())}, {"den", to_json(c.den())}};
}
inline Coefficient coefficient_from_json(const json& j)
{
    return Coefficient(polynomial_from_json(j.at("num")), polynomial_from_json(j.at("den")));
}

inline json to_json(const Generator& g)
{
    json out = {{"kind", g.is_vertical() ? "v" : "h"},
                {"index", g.index},
                {"slots", g.slots.slots()}};
    if (g.is_vertical())
        out["sigma"] = g.sigma.entries();
    return out;
}

inline Generator generator_from_json(const json& j)
{
    SlotSet s;
    for (int slot : j.at("slots").get<std::vector<int>>())
        s = s.with(slot);
    if (j.at("kind").get<std::string>() == "v")
        return Generator::vertical(j.at("index").get<int>(),
                                   MultiIndex(j.at("sigma").get<std::vector<int>>()), s);
    return Generator::horizontal(j.at("index").get<int>(), s);
}

inline json to_json(const FormExpr& f)
{
    json terms = json::array();
    for (const auto& [mono, coeff] : f.terms()) {
        json gens = json::array();
        for (const auto& [g, e] : mono.factors()) {
            json gj = to_json(g);
            gj["exp"] = e;
            gens.push_back(gj);
        }
        terms.push_back({{"coeff", to_json(coeff)}, {"gens", gens}});
    }
    return {{"config", to_json(f.config())}, {"terms", terms}};
}

inline FormExpr form_from_json(const json& j)
{
    BundleConfig cfg = config_from_json(j.at("config"));
    FormExpr f(cfg);
    for (const auto& t : j.at("terms")) {
        FormExpr term(cfg, coefficient_from_json(t.at("coeff")));
        for (const auto& gj : t.at("gens")) {
            Generator g = generator_from_json(gj);
            g.validate(cfg);
            int e = gj.at("exp").get<int>();
            FormExpr gf(cfg);
            gf.add_term(power_monomial(g, e), Coefficient(1));
            term = term.wedge(gf);
        }
        f += term;
    }
    return f;
}

// covectors and arity-one kernels: entries over (j, K, sigma)
inline json to_json(const MultiKernel& kern)
{
    json entries = json::array();
    const auto& cfg = kern.config();
    for (const auto& [key, a] : kern.entries()) {
        json slots = json::array();
        for (const auto& sk : key) {
            auto [j, K] = kappa_decode(cfg, sk.alpha);
            slots.push_back({{"j", j}, {"K", K.slots()}, {"sigma", sk.sigma.entries()}});
        }
        entries.push_back({{"slots", slots}, {"value", to_json(a)}});
    }
    return {{"config", to_json(cfg)}, {"arity", kern.arity()}, {"entries", entries}};
}

inline MultiKernel kernel_from_json(const json& j)
{
    BundleConfig cfg = config_from_json(j.at("config"));
    MultiKernel kern(cfg, j.at("arity").get<int>());
    for (const auto& e : j.at("entries")) {
        MKey key;
        for (const auto& s : e.at("slots")) {
            SlotSet K;
            for (int slot : s.at("K").get<std::vector<int>>())
                K = K.with(slot);
            key.push_back(SlotKey{kappa_index(cfg, s.at("j").get<int>(), K),
                                  MultiIndex(s.at("sigma").get<std::vector<int>>())});
        }
        kern.add_entry(key, form_from_json(e.at("value")));
    }
    return kern;
}

} // namespace jetforms
