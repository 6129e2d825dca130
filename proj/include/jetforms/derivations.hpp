#pragma once

#include "calculus.hpp"

#include <optional>

namespace jetforms {

namespace detail {

// Graded Leibniz extension of a derivation given by its values on coordinates
// and generators. X(c.M) = X(c).M + c.X(M); X(c) by the chain rule.
template <class D>
FormExpr apply_derivation_impl(const D& X, const FormExpr& w)
{
    const auto& cfg = w.config();
    const int px = X.parity() & 1;
    FormExpr r(cfg);
    for (const auto& [mono, coeff] : w.terms()) {
        FormExpr xc(cfg);
        for (const auto& v : coeff.mentioned_coords()) {
            Coefficient df = coeff.partial(v);
            if (df.is_zero())
                continue;
            FormExpr val = (v.kind == JetCoord::Kind::Base) ? X.on_base(cfg, v.index)
                                                            : X.on_coord(cfg, v.index, v.sigma);
            if (!val.is_zero())
                xc += val.scaled(df);
        }
        if (!xc.is_zero()) {
            FormExpr tail(cfg);
            tail.add_term(mono, Coefficient(1));
            r += xc.wedge(tail);
        }
        const auto& fac = mono.factors();
        int prefix_parity = 0;
        for (size_t i = 0; i < fac.size(); ++i) {
            const auto& [g, e] = fac[i];
            FormExpr val = g.is_vertical() ? X.on_vgen(cfg, g.index, g.sigma, g.slots)
                                           : X.on_hgen(cfg, g.index, g.slots);
            if (!val.is_zero()) {
                Monomial pm;
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
                FormExpr term = pre.wedge(val).wedge(suf);
                r += ((px * prefix_parity) & 1) ? -term : term;
            }
            prefix_parity += e * g.parity();
        }
    }
    return r;
}

} // namespace detail

// Derivation with finitely many nonzero values on vertical generators and
// fiber coordinates; kills base coordinates and horizontal generators.
class VerticalDerivation {
public:
    explicit VerticalDerivation(BundleConfig cfg, int parity = 0) : cfg_(cfg), parity_(parity) {}

    // the dual derivation V_j^{sigma,K}: value 1 on d_K^v u^j_sigma
    static VerticalDerivation dual(const BundleConfig& cfg, int j, const MultiIndex& sigma,
                                   SlotSet K)
    {
        if (K.max_slot() > cfg.k - 1)
            throw std::domain_error("dual derivation slot set must lie in 1..k-1");
        VerticalDerivation X(cfg, K.parity());
        FormExpr one(cfg, Coefficient(1));
        if (K.empty())
            X.set_coord_value(j, sigma, one);
        else
            X.set_gen_value(j, sigma, K, one);
        return X;
    }

    void set_coord_value(int j, const MultiIndex& sigma, FormExpr v)
    {
        cfg_.check_fiber(j);
        coord_values_[{j, sigma}] = std::move(v);
    }
    void set_gen_value(int j, const MultiIndex& sigma, SlotSet S, FormExpr v)
    {
        cfg_.check_fiber(j);
        gen_values_[{j, sigma, S}] = std::move(v);
    }

    int parity() const { return parity_; }
    const BundleConfig& config() const { return cfg_; }

    FormExpr on_coord(const BundleConfig& cfg, int j, const MultiIndex& sigma) const
    {
        auto it = coord_values_.find({j, sigma});
        return it == coord_values_.end() ? FormExpr(cfg) : it->second;
    }
    FormExpr on_vgen(const BundleConfig& cfg, int j, const MultiIndex& sigma, SlotSet S) const
    {
        auto it = gen_values_.find({j, sigma, S});
        return it == gen_values_.end() ? FormExpr(cfg) : it->second;
    }
    FormExpr on_hgen(const BundleConfig& cfg, int, SlotSet) const { return FormExpr(cfg); }
    FormExpr on_base(const BundleConfig& cfg, int) const { return FormExpr(cfg); }

private:
    BundleConfig cfg_;
    int parity_;
    std::map<std::tuple<int, MultiIndex, SlotSet>, FormExpr> gen_values_;
    std::map<std::pair<int, MultiIndex>, FormExpr> coord_values_;
};

// C-derivation: determined by values on base coordinates (total-derivative
// components) and on horizontal generators; zero on the vertical side.
class CDerivation {
public:
    explicit CDerivation(BundleConfig cfg, int parity = 0) : cfg_(cfg), parity_(parity) {}

    static CDerivation total(const BundleConfig& cfg, int mu)
    {
        CDerivation X(cfg, 0);
        X.base_values_[mu] = Coefficient(1);
        return X;
    }
    // the dual derivation D_mu^K: value 1 on d_K x^mu
    static CDerivation dual(const BundleConfig& cfg, int mu, SlotSet K)
    {
        if (K.empty())
            return total(cfg, mu);
        if (K.max_slot() > cfg.k - 1)
            throw std::domain_error("dual derivation slot set must lie in 1..k-1");
        CDerivation X(cfg, K.parity());
        X.hgen_values_[{mu, K}] = FormExpr(cfg, Coefficient(1));
        return X;
    }

    int parity() const { return parity_; }

    FormExpr on_coord(const BundleConfig& cfg, int j, const MultiIndex& sigma) const
    {
        FormExpr r(cfg);
        for (const auto& [mu, c] : base_values_)
            r += FormExpr::coordinate(cfg, JetCoord::fiber(j, sigma.bump(mu - 1))).scaled(c);
        return r;
    }
    FormExpr on_vgen(const BundleConfig& cfg, int j, const MultiIndex& sigma, SlotSet S) const
    {
        FormExpr r(cfg);
        for (const auto& [mu, c] : base_values_)
            r += FormExpr::generator(cfg, Generator::vertical(j, sigma.bump(mu - 1), S)).scaled(c);
        return r;
    }
    FormExpr on_hgen(const BundleConfig& cfg, int mu, SlotSet S) const
    {
        auto it = hgen_values_.find({mu, S});
        return it == hgen_values_.end() ? FormExpr(cfg) : it->second;
    }
    FormExpr on_base(const BundleConfig& cfg, int mu) const
    {
        auto it = base_values_.find(mu);
        return it == base_values_.end() ? FormExpr(cfg) : FormExpr(cfg, it->second);
    }

private:
    BundleConfig cfg_;
    int parity_;
    std::map<int, Coefficient> base_values_;
    std::map<std::pair<int, SlotSet>, FormExpr> hgen_values_;
};

// Element of Lambda_{k-1} kappa: components chi^j_K in Cstar Lambda_{k-1}.
class KappaField {
public:
    KappaField() = default;
    explicit KappaField(BundleConfig cfg) : cfg_(cfg) {}

    static KappaField component(const BundleConfig& cfg, int j, SlotSet K, FormExpr value)
    {
        KappaField f(cfg);
        f.set(j, K, std::move(value));
        return f;
    }

    const BundleConfig& config() const { return cfg_; }
    bool is_zero() const { return comps_.empty(); }

    void set(int j, SlotSet K, FormExpr value)
    {
        cfg_.check_fiber(j);
        if (K.max_slot() > cfg_.k - 1)
            throw std::domain_error("kappa field slot set must lie in 1..k-1");
        auto cls = classify(value);
        if (!cls.in_Cstar)
            throw std::domain_error("kappa field component must lie in the vertical subalgebra");
        if (value.is_zero())
            comps_.erase({j, K});
        else
            comps_[{j, K}] = std::move(value);
    }

    FormExpr component(int j, SlotSet K) const
    {
        auto it = comps_.find({j, K});
        return it == comps_.end() ? FormExpr(cfg_) : it->second;
    }
    const std::map<std::pair<int, SlotSet>, FormExpr>& components() const { return comps_; }

    KappaField operator+(const KappaField& o) const
    {
        check_same_config(cfg_, o.cfg_);
        KappaField r = *this;
        for (const auto& [key, v] : o.comps_) {
            auto cur = r.component(key.first, key.second) + v;
            r.set(key.first, key.second, cur);
        }
        return r;
    }
    KappaField operator-() const
    {
        KappaField r = *this;
        for (auto& [key, v] : r.comps_)
            v = -v;
        return r;
    }
    KappaField operator-(const KappaField& o) const { return *this + (-o); }
    KappaField scaled(const Coefficient& c) const
    {
        KappaField r(cfg_);
        for (const auto& [key, v] : comps_)
            r.set(key.first, key.second, v.scaled(c));
        return r;
    }

    bool operator==(const KappaField& o) const { return cfg_ == o.cfg_ && comps_ == o.comps_; }

    // parity of chi = |component| + |K|, common across components
    std::optional<int> parity() const
    {
        std::optional<int> p;
        for (const auto& [key, v] : comps_) {
            auto vp = v.parity();
            if (!vp)
                return std::nullopt;
            int tp = (*vp + key.second.parity()) & 1;
            if (!p)
                p = tp;
            else if (*p != tp)
                return std::nullopt;
        }
        return p ? p : std::optional<int>(0);
    }

    std::pair<KappaField, KappaField> parity_split() const // (even, odd)
    {
        KappaField even(cfg_), odd(cfg_);
        for (const auto& [key, v] : comps_) {
            auto [ve, vo] = v.parity_split();
            // component parity |v| makes field parity |v| + |K|
            if (key.second.parity()) {
                even.set(key.first, key.second, vo);
                odd.set(key.first, key.second, ve);
            } else {
                even.set(key.first, key.second, ve);
                odd.set(key.first, key.second, vo);
            }
        }
        return {even, odd};
    }

private:
    BundleConfig cfg_;
    std::map<std::pair<int, SlotSet>, FormExpr> comps_;
};

// E_chi: generator values are total-derivative prolongations of the field.
class EvolutionaryDerivation {
public:
    explicit EvolutionaryDerivation(KappaField chi) : chi_(std::move(chi))
    {
        auto p = chi_.parity();
        if (!p)
            throw std::domain_error("evolutionary derivation requires a parity-homogeneous field");
        parity_ = *p;
    }

    const KappaField& field() const { return chi_; }
    int parity() const { return parity_; }

    FormExpr on_coord(const BundleConfig& cfg, int j, const MultiIndex& sigma) const
    {
        return total_derivative(sigma, chi_.component(j, SlotSet()));
    }
    FormExpr on_vgen(const BundleConfig& cfg, int j, const MultiIndex& sigma, SlotSet S) const
    {
        if (S.max_slot() > cfg.k - 1)
            throw std::domain_error("evolutionary derivation applied outside Lambda_{k-1}");
        return total_derivative(sigma, chi_.component(j, S));
    }
    FormExpr on_hgen(const BundleConfig& cfg, int, SlotSet) const { return FormExpr(cfg); }
    FormExpr on_base(const BundleConfig& cfg, int) const { return FormExpr(cfg); }

private:
    KappaField chi_;
    int parity_;
};

inline FormExpr apply_derivation(const VerticalDerivation& X, const FormExpr& w)
{
    return detail::apply_derivation_impl(X, w);
}
inline FormExpr apply_derivation(const CDerivation& X, const FormExpr& w)
{
    return detail::apply_derivation_impl(X, w);
}
inline FormExpr apply_derivation(const EvolutionaryDerivation& X, const FormExpr& w)
{
    return detail::apply_derivation_impl(X, w);
}

inline EvolutionaryDerivation prolong(const KappaField& chi)
{
    for (const auto& [key, v] : chi.components())
        if (!classify(v).in_Cstar)
            throw std::domain_error("kappa field component outside the vertical subalgebra");
    return EvolutionaryDerivation(chi);
}

// read the field back off the derivation at sigma = 0
inline KappaField restrict_derivation(const EvolutionaryDerivation& E)
{
    const auto& cfg = E.field().config();
    KappaField chi(cfg);
    MultiIndex zero = MultiIndex::zero(cfg.n);
    for (int j = 1; j <= cfg.m; ++j)
        for (std::uint32_t mask = 0; mask < (1u << (cfg.k - 1)); ++mask) {
            SlotSet K(mask);
            FormExpr v = K.empty() ? E.on_coord(cfg, j, zero) : E.on_vgen(cfg, j, zero, K);
            if (!v.is_zero())
                chi.set(j, K, v);
        }
    return chi;
}

// spot check that a finite-table derivation prolongs consistently: its values
// at bumped multi-indices match total derivatives of the sigma = 0 values
inline bool is_evolutionary_sample(const VerticalDerivation& X, int max_len = 2)
{
    const auto& cfg = X.config();
    for (int j = 1; j <= cfg.m; ++j)
        for (std::uint32_t mask = 0; mask < (1u << (cfg.k - 1)); ++mask) {
            SlotSet K(mask);
            MultiIndex zero = MultiIndex::zero(cfg.n);
            FormExpr base = K.empty() ? X.on_coord(cfg, j, zero) : X.on_vgen(cfg, j, zero, K);
            for (const auto& sigma : indices_up_to(cfg.n, max_len)) {
                FormExpr got =
                    K.empty() ? X.on_coord(cfg, j, sigma) : X.on_vgen(cfg, j, sigma, K);
                if (!(got == total_derivative(sigma, base)))
                    return false;
            }
        }
    return true;
}

inline KappaField restrict_derivation(const VerticalDerivation& X)
{
    if (!is_evolutionary_sample(X))
        throw std::domain_error("derivation fails the evolutionary spot check");
    const auto& cfg = X.config();
    KappaField chi(cfg);
    MultiIndex zero = MultiIndex::zero(cfg.n);
    for (int j = 1; j <= cfg.m; ++j)
        for (std::uint32_t mask = 0; mask < (1u << (cfg.k - 1)); ++mask) {
            SlotSet K(mask);
            FormExpr v = K.empty() ? X.on_coord(cfg, j, zero) : X.on_vgen(cfg, j, zero, K);
            if (!v.is_zero())
                chi.set(j, K, v);
        }
    return chi;
}

// graded commutator of evolutionary derivations, restricted back to a field
inline KappaField bracket(const KappaField& a, const KappaField& b)
{
    check_same_config(a.config(), b.config());
    const auto& cfg = a.config();
    KappaField r(cfg);
    auto [ae, ao] = a.parity_split();
    auto [be, bo] = b.parity_split();
    for (const KappaField* pa : {&ae, &ao})
        for (const KappaField* pb : {&be, &bo}) {
            if (pa->is_zero() || pb->is_zero())
                continue;
            auto Ea = prolong(*pa);
            auto Eb = prolong(*pb);
            int sgn = (Ea.parity() & Eb.parity() & 1) ? -1 : 1;
            KappaField part(cfg);
            for (int j = 1; j <= cfg.m; ++j)
                for (std::uint32_t mask = 0; mask < (1u << (cfg.k - 1)); ++mask) {
                    SlotSet K(mask);
                    FormExpr v = apply_derivation(Ea, pb->component(j, K)) -
                                 apply_derivation(Eb, pa->component(j, K)).scaled(Rational(sgn));
                    if (!v.is_zero())
                        part.set(j, K, v);
                }
            r = r + part;
        }
    return r;
}

// U_m: the field of the evolutionary derivation d_m^v, m < k
inline KappaField u_field(const BundleConfig& cfg, int m)
{
    if (m < 1 || m >= cfg.k)
        throw std::domain_error("u_field requires 1 <= m <= k-1");
    KappaField chi(cfg);
    MultiIndex zero = MultiIndex::zero(cfg.n);
    for (int j = 1; j <= cfg.m; ++j)
        for (std::uint32_t mask = 0; mask < (1u << (cfg.k - 1)); ++mask) {
            SlotSet K(mask);
            if (K.contains(m))
                continue;
            // d_m^v of the K-generator at sigma = 0
            FormExpr v =
                FormExpr::generator(cfg, Generator::vertical(j, zero, K.with(m)));
            if (K.count_below(m) & 1)
                v = -v;
            chi.set(j, K, v);
        }
    return chi;
}

} // namespace jetforms
