#pragma once

#include "form.hpp"

namespace jetforms {

enum class SlotKind { Vertical, Horizontal, Full };

inline Monomial power_monomial(const Generator& g, int e)
{
    if (e > 1 && g.parity())
        throw std::domain_error("odd generator with exponent > 1");
    Monomial m(g);
    Monomial r = m;
    for (int i = 1; i < e; ++i)
        r = Monomial::merge(r, m)->second;
    return r;
}

// total derivative of a coefficient function:
// D_mu f = df/dx^mu + sum_{j,sigma} u^j_{sigma+1_mu} df/du^j_sigma
inline Coefficient total_derivative(const BundleConfig& cfg, const Coefficient& f, int mu)
{
    cfg.check_base(mu);
    Coefficient r = f.partial(JetCoord::base(mu));
    for (const auto& c : f.mentioned_coords()) {
        if (c.kind != JetCoord::Kind::Fiber)
            continue;
        Coefficient df = f.partial(c);
        if (df.is_zero())
            continue;
        r += Coefficient::coordinate(JetCoord::fiber(c.index, c.sigma.bump(mu - 1))) * df;
    }
    return r;
}

namespace detail {

// d_m^v on a single generator
inline FormExpr dv_generator(const BundleConfig& cfg, const Generator& g, int m)
{
    FormExpr zero(cfg);
    if (!g.is_vertical() || g.slots.contains(m))
        return zero;
    FormExpr r = FormExpr::generator(cfg, Generator::vertical(g.index, g.sigma, g.slots.with(m)));
    return (g.slots.count_below(m) & 1) ? -r : r;
}

// d_m^h on a single generator
inline FormExpr dh_generator(const BundleConfig& cfg, const Generator& g, int m)
{
    FormExpr r(cfg);
    if (!g.is_vertical()) {
        if (g.slots.contains(m))
            return r;
        r = FormExpr::generator(cfg, Generator::horizontal(g.index, g.slots.with(m)));
        return (g.slots.count_below(m) & 1) ? -r : r;
    }
    // d_m^h d_S^v u_sigma = (-1)^{|S|} sum_mu d_S^v u_{sigma+1_mu} . d_m x^mu
    for (int mu = 1; mu <= cfg.n; ++mu) {
        FormExpr t =
            FormExpr::generator(cfg, Generator::vertical(g.index, g.sigma.bump(mu - 1), g.slots));
        t = t.wedge(FormExpr::generator(cfg, Generator::horizontal(mu, SlotSet::single(m))));
        r += t;
    }
    return (g.slots.size() & 1) ? -r : r;
}

inline FormExpr d_generator(const BundleConfig& cfg, const Generator& g, int m, SlotKind kind)
{
    switch (kind) {
    case SlotKind::Vertical:
        return dv_generator(cfg, g, m);
    case SlotKind::Horizontal:
        return dh_generator(cfg, g, m);
    default:
        return dv_generator(cfg, g, m) + dh_generator(cfg, g, m);
    }
}

// d_m^{v/h/full} of a coefficient, as a degree-1 form
inline FormExpr d_coefficient(const BundleConfig& cfg, const Coefficient& f, int m, SlotKind kind)
{
    FormExpr r(cfg);
    if (kind != SlotKind::Horizontal) {
        for (const auto& c : f.mentioned_coords()) {
            if (c.kind != JetCoord::Kind::Fiber)
                continue;
            Coefficient df = f.partial(c);
            if (df.is_zero())
                continue;
            r += FormExpr::generator(cfg,
                                     Generator::vertical(c.index, c.sigma, SlotSet::single(m)))
                     .scaled(df);
        }
    }
    if (kind != SlotKind::Vertical) {
        for (int mu = 1; mu <= cfg.n; ++mu) {
            Coefficient df = total_derivative(cfg, f, mu);
            if (df.is_zero())
                continue;
            r += FormExpr::generator(cfg, Generator::horizontal(mu, SlotSet::single(m))).scaled(df);
        }
    }
    return r;
}

} // namespace detail

// the odd derivation d_m^v, d_m^h or d_m = d_m^v + d_m^h
inline FormExpr differential(int m, SlotKind kind, const FormExpr& w)
{
    const auto& cfg = w.config();
    cfg.check_slot(m);
    FormExpr r(cfg);
    for (const auto& [mono, coeff] : w.terms()) {
        FormExpr dc = detail::d_coefficient(cfg, coeff, m, kind);
        if (!dc.is_zero()) {
            FormExpr tail(cfg);
            tail.add_term(mono, Coefficient(1));
            r += dc.wedge(tail);
        }
        const auto& fac = mono.factors();
        int prefix_parity = 0;
        for (size_t i = 0; i < fac.size(); ++i) {
            const auto& [g, e] = fac[i];
            FormExpr dg = detail::d_generator(cfg, g, m, kind);
            if (!dg.is_zero()) {
                Monomial pm; // factors before i together with g^{e-1}
                for (size_t l = 0; l < i; ++l)
                    pm = Monomial::merge(pm, power_monomial(fac[l].first, fac[l].second))->second;
                if (e > 1)
                    pm = Monomial::merge(pm, power_monomial(g, e - 1))->second;
                Monomial sm; // factors after i
                for (size_t l = i + 1; l < fac.size(); ++l)
                    sm = Monomial::merge(sm, power_monomial(fac[l].first, fac[l].second))->second;
                FormExpr pre(cfg), suf(cfg);
                pre.add_term(pm, coeff * Rational(e));
                suf.add_term(sm, Coefficient(1));
                FormExpr term = pre.wedge(dg).wedge(suf);
                r += (prefix_parity & 1) ? -term : term;
            }
            prefix_parity += e * g.parity();
        }
    }
    return r;
}

// the involution interchanging slots 1 and m
inline FormExpr kappa(int m, const FormExpr& w)
{
    const auto& cfg = w.config();
    cfg.check_slot(m);
    if (m == 1)
        return w;
    FormExpr r(cfg);
    for (const auto& [mono, coeff] : w.terms()) {
        FormExpr term(cfg, coeff);
        for (const auto& [g, e] : mono.factors()) {
            int sgn = g.slots.swap_sign(1, m);
            Generator g2 = g;
            g2.slots = g.slots.swapped(1, m);
            FormExpr f(cfg);
            f.add_term(power_monomial(g2, e), Coefficient(((e & 1) && sgn < 0) ? -1 : 1));
            term = term.wedge(f);
        }
        r += term;
    }
    return r;
}

// d_K^v: composition over K in increasing order, rightmost applied first
inline FormExpr dKv(SlotSet K, const FormExpr& w)
{
    const auto& cfg = w.config();
    if (K.max_slot() > cfg.k)
        throw std::domain_error("slot set exceeds k");
    FormExpr r = w;
    auto slots = K.slots();
    for (auto it = slots.rbegin(); it != slots.rend(); ++it)
        r = differential(*it, SlotKind::Vertical, r);
    return r;
}

struct Classification {
    bool in_Cstar = true;   // vertical generators only, slots within 1..k-1
    bool in_Ccirc = true;   // additionally sigma = 0 and coefficients on (x,u)
    bool in_HLambda = true; // horizontal generators only
};

inline Classification classify(const FormExpr& w)
{
    Classification c;
    const int k = w.config().k;
    for (const auto& [mono, coeff] : w.terms()) {
        for (const auto& [g, e] : mono.factors()) {
            if (g.is_vertical()) {
                c.in_HLambda = false;
                if (g.slots.max_slot() > k - 1) {
                    c.in_Cstar = false;
                    c.in_Ccirc = false;
                }
                if (!g.sigma.is_zero())
                    c.in_Ccirc = false;
            } else {
                c.in_Cstar = false;
                c.in_Ccirc = false;
            }
        }
        for (const auto& jc : coeff.mentioned_coords())
            if (jc.kind == JetCoord::Kind::Fiber && !jc.sigma.is_zero())
                c.in_Ccirc = false;
    }
    return c;
}

// D_mu extended to vertical forms as an even derivation
inline FormExpr total_derivative(const FormExpr& w, int mu)
{
    const auto& cfg = w.config();
    cfg.check_base(mu);
    for (const auto& [mono, coeff] : w.terms())
        if (!mono.vertical_only())
            throw std::domain_error("total derivative requires a vertical form or coefficient");
    FormExpr r(cfg);
    for (const auto& [mono, coeff] : w.terms()) {
        Coefficient dc = total_derivative(cfg, coeff, mu);
        if (!dc.is_zero())
            r.add_term(mono, dc);
        const auto& fac = mono.factors();
        for (size_t i = 0; i < fac.size(); ++i) {
            const auto& [g, e] = fac[i];
            Generator g2 = Generator::vertical(g.index, g.sigma.bump(mu - 1), g.slots);
            Monomial pm; // factors before i together with g^{e-1}
            for (size_t l = 0; l < i; ++l)
                pm = Monomial::merge(pm, power_monomial(fac[l].first, fac[l].second))->second;
            if (e > 1)
                pm = Monomial::merge(pm, power_monomial(g, e - 1))->second;
            Monomial sm;
            for (size_t l = i + 1; l < fac.size(); ++l)
                sm = Monomial::merge(sm, power_monomial(fac[l].first, fac[l].second))->second;
            FormExpr pre(cfg), suf(cfg);
            pre.add_term(pm, coeff * Rational(e));
            suf.add_term(sm, Coefficient(1));
            r += pre.wedge(FormExpr::generator(cfg, g2)).wedge(suf);
        }
    }
    return r;
}

inline FormExpr total_derivative(const MultiIndex& sigma, const FormExpr& w)
{
    FormExpr r = w;
    for (int mu = 1; mu <= sigma.size(); ++mu)
        for (int t = 0; t < sigma[mu - 1]; ++t)
            r = total_derivative(r, mu);
    return r;
}

inline Coefficient total_derivative(const BundleConfig& cfg, const MultiIndex& sigma,
                                    const Coefficient& f)
{
    Coefficient r = f;
    for (int mu = 1; mu <= sigma.size(); ++mu)
        for (int t = 0; t < sigma[mu - 1]; ++t)
            r = total_derivative(cfg, r, mu);
    return r;
}

// split of a slot-k degree-1 form into Cartan and horizontal parts
inline std::pair<FormExpr, FormExpr> split1(const FormExpr& w)
{
    const auto& cfg = w.config();
    FormExpr c(cfg), h(cfg);
    for (const auto& [mono, coeff] : w.terms()) {
        if (mono.degree_in_slot(cfg.k) != 1)
            throw std::domain_error("split1 requires degree 1 in the top slot");
        bool vertical_top = false;
        for (const auto& [g, e] : mono.factors())
            if (g.slots.contains(cfg.k))
                vertical_top = g.is_vertical();
        (vertical_top ? c : h).add_term(mono, coeff);
    }
    return {c, h};
}

// projection onto the homogeneous component of multi-degree (0,...,0,n)
inline FormExpr nu(const FormExpr& w)
{
    const auto& cfg = w.config();
    std::vector<int> top(cfg.k, 0);
    top[cfg.k - 1] = cfg.n;
    return w.component(top);
}

} // namespace jetforms
