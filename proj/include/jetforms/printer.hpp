#pragma once

#include "cdiff.hpp"
#include "derivations.hpp"

#include <sstream>
#include <string>

namespace jetforms {

enum class OutputFormat { Text, Latex, Structured };

namespace detail {

inline std::string generator_token(const Generator& g)
{
    return g.str(); // nested d/dv applications, grammar-compatible
}

// single polynomial monomial with its rational, sign split off
inline std::pair<bool, std::string> monomial_token(const PolyMonomial& pm, const Rational& c)
{
    bool neg = c < 0;
    Rational a = neg ? Rational(-c) : c;
    std::string s;
    if (a != 1 || pm.empty())
        s = to_string(a);
    for (const auto& [v, e] : pm) {
        if (!s.empty())
            s += "*";
        s += v.str();
        if (e > 1)
            s += "^" + std::to_string(e);
    }
    return {neg, s};
}

} // namespace detail

inline std::string print_text(const FormExpr& f)
{
    if (f.is_zero())
        return "0";
    std::string out;
    bool first = true;
    for (const auto& [mono, coeff] : f.terms()) {
        bool neg = false;
        std::string cs;
        bool skip_coeff = false;
        if (!coeff.has_denominator() && coeff.num().terms().size() == 1) {
            const auto& [pm, c] = *coeff.num().terms().begin();
            auto [n, s] = detail::monomial_token(pm, c);
            neg = n;
            cs = s;
            skip_coeff = pm.empty() && (c == 1 || c == -1) && !mono.is_unit();
        } else {
            cs = "(" + coeff.str() + ")";
        }
        std::string term;
        if (!skip_coeff)
            term = cs;
        for (const auto& [g, e] : mono.factors()) {
            if (!term.empty())
                term += "*";
            term += detail::generator_token(g);
            if (e > 1)
                term += "^" + std::to_string(e);
        }
        if (term.empty())
            term = "1";
        if (first) {
            out = neg ? "-" + term : term;
            first = false;
        } else {
            out += neg ? " - " : " + ";
            out += term;
        }
    }
    return out;
}

namespace detail {

inline std::string latex_rational(const Rational& r)
{
    if (denominator(r) == 1)
        return numerator(r).str();
    std::string num = numerator(r).str();
    bool neg = !num.empty() && num[0] == '-';
    if (neg)
        num = num.substr(1);
    return (neg ? std::string("-") : std::string()) + "\\tfrac{" + num + "}{" +
           denominator(r).str() + "}";
}

inline std::string latex_coord(const JetCoord& c)
{
    if (c.kind == JetCoord::Kind::Base)
        return "x^{" + std::to_string(c.index) + "}";
    std::string s = "u^{" + std::to_string(c.index) + "}";
    if (!c.sigma.is_zero())
        s += "_{" + c.sigma.str() + "}";
    return s;
}

inline std::string latex_var(const Var& v)
{
    if (v.is_coord())
        return latex_coord(v.coord());
    auto entry = SymbolRegistry::instance().lookup(v.symbol_id());
    std::string name = entry.name;
    if (!name.empty() && name[0] == '@')
        name = "g_{" + name.substr(1) + "}";
    std::string subs;
    for (size_t i = 0; i < v.derivs().size(); ++i)
        for (int r = 0; r < v.derivs()[i]; ++r)
            subs += (subs.empty() ? "" : ",") + latex_coord(entry.args[i]);
    if (!subs.empty())
        name += "_{" + subs + "}";
    return name;
}

inline std::string latex_polynomial(const Polynomial& p)
{
    if (p.is_zero())
        return "0";
    std::string s;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [pm, c] = *it;
        bool neg = c < 0;
        Rational a = neg ? Rational(-c) : c;
        std::string t;
        if (a != 1 || pm.empty())
            t = latex_rational(a);
        for (const auto& [v, e] : pm) {
            if (!t.empty())
                t += " ";
            t += latex_var(v);
            if (e > 1)
                t += "^{" + std::to_string(e) + "}";
        }
        if (first) {
            s = (neg ? "-" : "") + t;
            first = false;
        } else {
            s += (neg ? " - " : " + ") + t;
        }
    }
    return s;
}

inline std::string latex_generator(const Generator& g)
{
    std::string core = g.kind == Generator::Kind::Vertical
                           ? latex_coord(JetCoord::fiber(g.index, g.sigma))
                           : latex_coord(JetCoord::base(g.index));
    std::string ops;
    for (int s : g.slots.slots())
        ops += (g.is_vertical() ? "d^{\\mathsf{v}}_{" : "d_{") + std::to_string(s) + "}";
    return ops + core;
}

} // namespace detail

inline std::string print_latex(const FormExpr& f)
{
    if (f.is_zero())
        return "0";
    std::string out;
    bool first = true;
    for (const auto& [mono, coeff] : f.terms()) {
        std::string term;
        if (coeff.has_denominator()) {
            term = "\\frac{" + detail::latex_polynomial(coeff.num()) + "}{" +
                   detail::latex_polynomial(coeff.den()) + "}";
        } else if (coeff.num().terms().size() == 1) {
            term = detail::latex_polynomial(coeff.num());
            if (term == "1" && !mono.is_unit())
                term.clear();
            if (term == "-1" && !mono.is_unit())
                term = "-";
        } else {
            term = "\\left(" + detail::latex_polynomial(coeff.num()) + "\\right)";
        }
        for (const auto& [g, e] : mono.factors()) {
            if (!term.empty() && term != "-")
                term += "\\,";
            term += detail::latex_generator(g);
            if (e > 1)
                term += "^{" + std::to_string(e) + "}";
        }
        if (term.empty())
            term = "1";
        if (first) {
            out = term;
            first = false;
        } else {
            out += term[0] == '-' ? " " + term : " + " + term;
        }
    }
    return out;
}

inline std::string latex_document(const std::string& body)
{
    return "\\documentclass{article}\n\\usepackage{amsmath,amssymb}\n\\begin{document}\n\\[" +
           body + "\\]\n\\end{document}\n";
}

inline std::string print_kappa_field(const KappaField& chi)
{
    if (chi.is_zero())
        return "0";
    std::string out;
    for (const auto& [key, v] : chi.components()) {
        if (!out.empty())
            out += "; ";
        out += "u" + std::to_string(key.first);
        if (!key.second.empty())
            out += "[K=" + key.second.str() + "]";
        out += ": " + print_text(v);
    }
    return out;
}

inline std::string print_covector(const ModuleElement& psi)
{
    const auto& cfg = psi.config();
    if (psi.is_zero())
        return "0";
    std::string out;
    for (int i = 0; i < psi.module()->rank(); ++i) {
        if (psi[i].is_zero())
            continue;
        auto [j, K] = kappa_decode(cfg, i);
        if (!out.empty())
            out += "; ";
        out += "u" + std::to_string(j);
        if (!K.empty())
            out += "[K=" + K.str() + "]";
        out += ": " + print_text(psi[i]);
    }
    return out;
}

// scalar operators as sums of coefficient * D(sigma)
inline std::string print_operator(const CDiffOp& op)
{
    if (op.is_zero())
        return "0";
    std::string out;
    for (const auto& [key, cell] : op.entries())
        for (const auto& [sigma, a] : cell) {
            std::string term;
            std::string cs = print_text(a);
            bool is_one = (cs == "1");
            bool is_minus_one = (cs == "-1");
            if (op.source()->rank() > 1 || op.target()->rank() > 1)
                term += "[" + std::to_string(key.first) + "," + std::to_string(key.second) + "] ";
            if (sigma.is_zero()) {
                term += cs;
            } else {
                if (is_one)
                    term += "D" + sigma.str();
                else if (is_minus_one)
                    term += "-D" + sigma.str();
                else
                    term += (cs.find(' ') != std::string::npos ? "(" + cs + ")" : cs) + "*D" +
                            sigma.str();
            }
            if (out.empty())
                out = term;
            else
                out += term[0] == '-' ? " - " + term.substr(1) : " + " + term;
        }
    return out;
}

} // namespace jetforms
