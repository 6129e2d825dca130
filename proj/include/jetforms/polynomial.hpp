#pragma once

#include "rational.hpp"
#include "vars.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace jetforms {

// Power product of Vars, sorted by Var order, exponents >= 1.
using PolyMonomial = std::vector<std::pair<Var, int>>;

inline PolyMonomial mono_mul(const PolyMonomial& a, const PolyMonomial& b)
{
    PolyMonomial r;
    r.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            r.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            r.push_back(a[i++]);
        } else {
            r.push_back(b[j++]);
        }
    }
    for (; i < a.size(); ++i)
        r.push_back(a[i]);
    for (; j < b.size(); ++j)
        r.push_back(b[j]);
    return r;
}

inline std::optional<PolyMonomial> mono_div(const PolyMonomial& a, const PolyMonomial& b)
{
    PolyMonomial r;
    size_t i = 0;
    for (const auto& [v, e] : b) {
        while (i < a.size() && a[i].first < v)
            r.push_back(a[i++]);
        if (i == a.size() || !(a[i].first == v) || a[i].second < e)
            return std::nullopt;
        if (a[i].second > e)
            r.emplace_back(v, a[i].second - e);
        ++i;
    }
    for (; i < a.size(); ++i)
        r.push_back(a[i]);
    return r;
}

// Graded lexicographic order: total degree first, then the first variable
// (in Var order) with a differing exponent decides. Admissible, so exact
// long division by leading terms terminates.
struct GrlexLess {
    bool operator()(const PolyMonomial& a, const PolyMonomial& b) const
    {
        int da = 0, db = 0;
        for (const auto& [v, e] : a)
            da += e;
        for (const auto& [v, e] : b)
            db += e;
        if (da != db)
            return da < db;
        size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i].first == b[j].first) {
                if (a[i].second != b[j].second)
                    return a[i].second < b[j].second;
                ++i;
                ++j;
            } else if (a[i].first < b[j].first) {
                return false; // a has a positive exponent at an earlier var
            } else {
                return true;
            }
        }
        return i == a.size() && j < b.size();
    }
};

// Sparse multivariate polynomial over Rational. Canonical: no zero coefficients.
class Polynomial {
public:
    using Terms = std::map<PolyMonomial, Rational, GrlexLess>;

    Polynomial() = default;
    Polynomial(const Rational& c)
    {
        if (c != 0)
            terms_[{}] = c;
    }
    Polynomial(long c) : Polynomial(Rational(c)) {}
    static Polynomial variable(Var v, int exp = 1)
    {
        Polynomial p;
        if (exp > 0)
            p.terms_[{{std::move(v), exp}}] = 1;
        else
            p.terms_[{}] = 1;
        return p;
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const
    {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
    }
    Rational constant_value() const
    {
        if (terms_.empty())
            return 0;
        if (!is_constant())
            throw std::domain_error("polynomial is not constant");
        return terms_.begin()->second;
    }

    void add_term(const PolyMonomial& m, const Rational& c)
    {
        if (c == 0)
            return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = c;
        } else {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    Polynomial operator+(const Polynomial& o) const
    {
        Polynomial r = *this;
        for (const auto& [m, c] : o.terms_)
            r.add_term(m, c);
        return r;
    }
    Polynomial operator-() const
    {
        Polynomial r = *this;
        for (auto& [m, c] : r.terms_)
            c = -c;
        return r;
    }
    Polynomial operator-(const Polynomial& o) const { return *this + (-o); }
    Polynomial operator*(const Polynomial& o) const
    {
        Polynomial r;
        for (const auto& [ma, ca] : terms_)
            for (const auto& [mb, cb] : o.terms_)
                r.add_term(mono_mul(ma, mb), ca * cb);
        return r;
    }
    Polynomial operator*(const Rational& c) const
    {
        Polynomial r;
        if (c == 0)
            return r;
        r.terms_ = terms_;
        for (auto& [m, k] : r.terms_)
            k *= c;
        return r;
    }
    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

    Polynomial pow(int e) const
    {
        Polynomial r(1);
        for (int i = 0; i < e; ++i)
            r = r * (*this);
        return r;
    }

    // exact partial derivative w.r.t. a jet coordinate (chain rule through
    // opaque symbols)
    Polynomial partial(const JetCoord& v) const
    {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            for (size_t i = 0; i < m.size(); ++i) {
                const auto& [var, e] = m[i];
                Polynomial dvar; // derivative of var w.r.t. v
                if (var.is_coord()) {
                    if (!(var.coord() == v))
                        continue;
                    dvar = Polynomial(1);
                } else {
                    auto bumped = var.partial(v);
                    if (!bumped)
                        continue;
                    dvar = Polynomial::variable(*bumped);
                }
                PolyMonomial rest;
                rest.reserve(m.size());
                for (size_t l = 0; l < m.size(); ++l) {
                    if (l == i) {
                        if (e > 1)
                            rest.emplace_back(var, e - 1);
                    } else {
                        rest.push_back(m[l]);
                    }
                }
                Polynomial term;
                term.terms_[rest] = c * e;
                r += term * dvar;
            }
        }
        return r;
    }

    std::set<JetCoord> mentioned_coords() const
    {
        std::set<JetCoord> out;
        for (const auto& [m, c] : terms_)
            for (const auto& [var, e] : m)
                for (auto& jc : var.mentioned_coords())
                    out.insert(jc);
        return out;
    }

    std::set<Var> variables() const
    {
        std::set<Var> out;
        for (const auto& [m, c] : terms_)
            for (const auto& [var, e] : m)
                out.insert(var);
        return out;
    }

    bool has_opaque() const
    {
        for (const auto& [m, c] : terms_)
            for (const auto& [var, e] : m)
                if (!var.is_coord())
                    return true;
        return false;
    }

    int total_degree() const
    {
        int d = 0;
        for (const auto& [m, c] : terms_) {
            int t = 0;
            for (const auto& [var, e] : m)
                t += e;
            d = std::max(d, t);
        }
        return d;
    }

    int max_jet_order() const
    {
        int r = 0;
        for (const auto& [m, c] : terms_)
            for (const auto& [var, e] : m)
                for (auto& jc : var.mentioned_coords())
                    if (jc.kind == JetCoord::Kind::Fiber)
                        r = std::max(r, jc.sigma.length());
        return r;
    }

    // gcd of all coefficients, positive; 0 for the zero polynomial
    Rational content() const
    {
        Integer g = 0, l = 1;
        for (const auto& [m, c] : terms_) {
            g = boost::multiprecision::gcd(g, numerator(c));
            l = boost::multiprecision::lcm(l, denominator(c));
        }
        if (g == 0)
            return 0;
        return Rational(g, l);
    }

    const Rational& leading_coefficient() const
    {
        if (terms_.empty())
            throw std::domain_error("leading coefficient of zero");
        return terms_.rbegin()->second;
    }
    const PolyMonomial& leading_monomial() const
    {
        if (terms_.empty())
            throw std::domain_error("leading monomial of zero");
        return terms_.rbegin()->first;
    }

    // exact multivariate division; nullopt if not divisible
    std::optional<Polynomial> divided_by(const Polynomial& d) const
    {
        if (d.is_zero())
            throw std::domain_error("division by zero polynomial");
        if (d.is_constant()) {
            Rational inv = Rational(1) / d.constant_value();
            return *this * inv;
        }
        Polynomial rem = *this, quot;
        while (!rem.is_zero()) {
            auto q = mono_div(rem.leading_monomial(), d.leading_monomial());
            if (!q)
                return std::nullopt;
            Rational c = rem.leading_coefficient() / d.leading_coefficient();
            Polynomial t;
            t.terms_[*q] = c;
            quot += t;
            rem -= t * d;
        }
        return quot;
    }

    std::string str() const;

private:
    Terms terms_;
};

inline Polynomial operator*(const Rational& c, const Polynomial& p) { return p * c; }

inline Polynomial div_exact(const Polynomial& a, const Polynomial& b)
{
    auto q = a.divided_by(b);
    if (!q)
        throw std::logic_error("expected exact polynomial division");
    return *q;
}

// ---- multivariate gcd (primitive PRS on a recursive univariate view) ----

namespace detail {

// view of p as univariate in v: degree -> coefficient polynomial
inline std::map<int, Polynomial> univariate_view(const Polynomial& p, const Var& v)
{
    std::map<int, Polynomial> out;
    for (const auto& [m, c] : p.terms()) {
        int deg = 0;
        PolyMonomial rest;
        for (const auto& [var, e] : m) {
            if (var == v)
                deg = e;
            else
                rest.emplace_back(var, e);
        }
        Polynomial t;
        t.add_term(rest, c);
        auto it = out.find(deg);
        if (it == out.end())
            out[deg] = t;
        else
            it->second += t;
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

inline Polynomial from_univariate(const std::map<int, Polynomial>& u, const Var& v)
{
    Polynomial r;
    for (const auto& [deg, coef] : u)
        r += coef * Polynomial::variable(v, deg);
    return r;
}

Polynomial gcd(const Polynomial& a, const Polynomial& b);

// gcd of all univariate coefficients
inline Polynomial poly_content(const std::map<int, Polynomial>& u)
{
    Polynomial g;
    for (const auto& [deg, coef] : u)
        g = gcd(g, coef);
    return g;
}

inline Polynomial gcd(const Polynomial& a, const Polynomial& b)
{
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    if (a.is_constant() || b.is_constant())
        return Polynomial(1);

    auto va = a.variables();
    auto vb = b.variables();
    std::vector<Var> common;
    std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common));
    if (common.empty())
        return Polynomial(1);
    Var v = common.back();

    auto ua = univariate_view(a, v);
    auto ub = univariate_view(b, v);
    Polynomial ca = poly_content(ua);
    Polynomial cb = poly_content(ub);
    Polynomial f = div_exact(a, ca);
    Polynomial g = div_exact(b, cb);

    // primitive PRS
    auto deg = [&](const Polynomial& p) {
        auto u = univariate_view(p, v);
        return u.empty() ? -1 : u.rbegin()->first;
    };
    auto lead = [&](const Polynomial& p) { return univariate_view(p, v).rbegin()->second; };

    if (deg(f) < deg(g))
        std::swap(f, g);
    while (!g.is_zero() && deg(g) > 0) {
        // pseudo-remainder of f by g in v
        Polynomial r = f;
        Polynomial lg = lead(g);
        int dg = deg(g);
        while (!r.is_zero() && deg(r) >= dg) {
            auto ur = univariate_view(r, v);
            int dr = ur.rbegin()->first;
            Polynomial lr = ur.rbegin()->second;
            r = r * lg - g * (lr * Polynomial::variable(v, dr - dg));
        }
        f = g;
        // primitive part of r
        if (!r.is_zero()) {
            auto urr = univariate_view(r, v);
            Polynomial cr = poly_content(urr);
            r = div_exact(r, cr);
        }
        g = r;
    }
    Polynomial cg = gcd(ca, cb);
    if (g.is_zero())
        return cg * f;
    return cg; // gcd in v is trivial
}

} // namespace detail

inline Polynomial gcd(const Polynomial& a, const Polynomial& b)
{
    Polynomial g = detail::gcd(a, b);
    if (g.is_zero())
        return g;
    // normalize: positive leading rational, content 1
    Rational c = g.content();
    if (g.leading_coefficient() < 0)
        c = -c;
    return div_exact(g, Polynomial(c));
}

inline std::string Polynomial::str() const
{
    if (terms_.empty())
        return "0";
    std::string s;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        Rational ac = c < 0 ? Rational(-c) : c;
        if (first) {
            if (c < 0)
                s += "-";
            first = false;
        } else {
            s += c < 0 ? " - " : " + ";
        }
        bool coef_one = (ac == 1) && !m.empty();
        if (!coef_one)
            s += to_string(ac);
        bool need_star = !coef_one;
        for (const auto& [var, e] : m) {
            if (need_star)
                s += "*";
            s += var.str();
            if (e > 1)
                s += "^" + std::to_string(e);
            need_star = true;
        }
    }
    return s;
}

} // namespace jetforms
