#pragma once

#include "cdiff.hpp"

#include <functional>

namespace jetforms {

// ---------------------------------------------------------------------------
// multilinear kernels
// ---------------------------------------------------------------------------

// One argument slot of a multilinear kernel: a basis index of the kappa
// module and a total-derivative multi-index applied to that component.
struct SlotKey {
    int alpha = 0;
    MultiIndex sigma;
    auto operator<=>(const SlotKey&) const = default;
};
using MKey = std::vector<SlotKey>;

// B-valued multilinear operator in total derivatives over the kappa module.
// Evaluation at homogeneous arguments chi_1..chi_p of parities q_i:
//   sum over entries of
//     (-1)^{sum_i q_i * (s_{a_i} + ... + s_{a_p})} a . prod_i D_{sigma_i}(chi_i^{a_i})
// The suffix twist makes slot p behave exactly like the dual pairing and
// freezing produce honest operator matrices.
class MultiKernel {
public:
    MultiKernel() = default;
    MultiKernel(BundleConfig cfg, int arity) : cfg_(cfg), arity_(arity) {}

    const BundleConfig& config() const { return cfg_; }
    int arity() const { return arity_; }
    bool is_zero() const { return entries_.empty(); }
    const std::map<MKey, FormExpr>& entries() const { return entries_; }

    void add_entry(const MKey& key, const FormExpr& v)
    {
        if (v.is_zero())
            return;
        if (static_cast<int>(key.size()) != arity_)
            throw std::invalid_argument("kernel key arity mismatch");
        auto it = entries_.find(key);
        if (it == entries_.end())
            it = entries_.emplace(key, FormExpr(cfg_)).first;
        it->second += v;
        if (it->second.is_zero())
            entries_.erase(it);
    }

    bool operator==(const MultiKernel& o) const
    {
        return cfg_ == o.cfg_ && arity_ == o.arity_ && entries_ == o.entries_;
    }

    // |T| with |T(chi..)| = |T| + sum |chi_i|; requires homogeneity
    std::optional<int> parity() const
    {
        auto km = kappa_module(cfg_);
        std::optional<int> p;
        for (const auto& [key, a] : entries_) {
            auto ap = a.parity();
            if (!ap)
                return std::nullopt;
            int tp = *ap;
            for (const auto& sk : key)
                tp += km->parity(sk.alpha);
            tp &= 1;
            if (!p)
                p = tp;
            else if (*p != tp)
                return std::nullopt;
        }
        return p ? p : std::optional<int>(0);
    }

    int max_order() const
    {
        int r = 0;
        for (const auto& [key, a] : entries_)
            for (const auto& sk : key)
                r = std::max(r, sk.sigma.length());
        return r;
    }

    // scalar value at homogeneous fields
    FormExpr eval(const std::vector<KappaField>& args) const
    {
        if (static_cast<int>(args.size()) != arity_)
            throw std::invalid_argument("kernel applied to wrong argument count");
        auto km = kappa_module(cfg_);
        std::vector<int> q(args.size(), 0);
        for (size_t i = 0; i < args.size(); ++i) {
            auto p = args[i].parity();
            if (!p) {
                // split the offending argument and recurse
                auto [e, o] = args[i].parity_split();
                auto a1 = args, a2 = args;
                a1[i] = e;
                a2[i] = o;
                return eval(a1) + eval(a2);
            }
            q[i] = *p;
        }
        FormExpr r(cfg_);
        for (const auto& [key, a] : entries_) {
            FormExpr term = a;
            int twist = 0, suffix = 0;
            for (int i = arity_ - 1; i >= 0; --i) {
                suffix += km->parity(key[i].alpha);
                twist += q[i] * suffix;
            }
            for (int i = 0; i < arity_; ++i) {
                auto [j, K] = kappa_decode(cfg_, key[i].alpha);
                auto comp = args[i].component(j, K);
                if (comp.is_zero()) {
                    term = FormExpr(cfg_);
                    break;
                }
                term = term.wedge(total_derivative(key[i].sigma, comp));
            }
            if (term.is_zero())
                continue;
            r += (twist & 1) ? -term : term;
        }
        return r;
    }

    // contract the first arity-1 slots, leaving a covector in the last slot
    ModuleElement eval_value(const std::vector<KappaField>& args) const
    {
        if (static_cast<int>(args.size()) != arity_ - 1)
            throw std::invalid_argument("kernel partial evaluation arity mismatch");
        auto km = kappa_module(cfg_);
        std::vector<int> q(args.size(), 0);
        for (size_t i = 0; i < args.size(); ++i) {
            auto p = args[i].parity();
            if (!p) {
                auto [e, o] = args[i].parity_split();
                auto a1 = args, a2 = args;
                a1[i] = e;
                a2[i] = o;
                return eval_value(a1) + eval_value(a2);
            }
            q[i] = *p;
        }
        ModuleElement r(cfg_, dual_module(km));
        for (const auto& [key, a] : entries_) {
            if (!key.back().sigma.is_zero())
                throw std::logic_error("kernel not canonical: last slot has positive order");
            int beta = key.back().alpha;
            FormExpr term = a;
            int twist = 0, suffix = km->parity(beta);
            for (int i = arity_ - 2; i >= 0; --i) {
                suffix += km->parity(key[i].alpha);
                twist += q[i] * suffix;
            }
            for (int i = 0; i + 1 < arity_; ++i) {
                auto [j, K] = kappa_decode(cfg_, key[i].alpha);
                auto comp = args[i].component(j, K);
                if (comp.is_zero()) {
                    term = FormExpr(cfg_);
                    break;
                }
                term = term.wedge(total_derivative(key[i].sigma, comp));
            }
            if (term.is_zero())
                continue;
            if (twist & 1)
                term = -term;
            r.set(beta, r[beta] + term);
        }
        return r;
    }

    // rewrite entries so the last slot has order zero, shifting derivatives
    // onto the other factors by parts; exact on the represented class
    MultiKernel canonicalized() const
    {
        MultiKernel out(cfg_, arity_);
        for (const auto& [key, a] : entries_) {
            const MultiIndex& sp = key.back().sigma;
            if (sp.is_zero()) {
                out.add_entry(key, a);
                continue;
            }
            // a . prod D_{s_i} chi_i . D_{sp} chi_p
            //   == (-1)^{|sp|} sum multinom D_{r0} a . prod D_{s_i + r_i} chi_i . chi_p
            int parts = arity_; // r0 for the coefficient, r_i per earlier slot
            std::vector<MultiIndex> rho(parts, MultiIndex::zero(cfg_.n));
            std::function<void(int, const MultiIndex&, Rational)> rec =
                [&](int pos, const MultiIndex& rem, Rational mult) {
                    if (pos == parts - 1) {
                        rho[pos] = rem;
                        Rational c = mult;
                        if (sp.length() & 1)
                            c = -c;
                        FormExpr entry = total_derivative(rho[0], a).scaled(c);
                        if (entry.is_zero())
                            return;
                        MKey nk = key;
                        for (int i = 0; i + 1 < arity_; ++i)
                            nk[i].sigma = nk[i].sigma + rho[i + 1];
                        nk[arity_ - 1].sigma = MultiIndex::zero(cfg_.n);
                        out.add_entry(nk, entry);
                        return;
                    }
                    for (const auto& r : sub_indices(rem)) {
                        rho[pos] = r;
                        rec(pos + 1, rem - r, mult * binomial(rem, r));
                    }
                };
            rec(0, sp, Rational(1));
        }
        return out;
    }

private:
    BundleConfig cfg_;
    int arity_ = 0;
    std::map<MKey, FormExpr> entries_;
};

// ---------------------------------------------------------------------------
// test-field extraction
// ---------------------------------------------------------------------------

namespace detail {

struct TestVarInfo {
    int slot;
    int alpha;
};

// x-only opaque component symbols; reused across calls via the registry
inline int test_symbol(const BundleConfig& cfg, int slot, int alpha)
{
    std::vector<JetCoord> args;
    for (int mu = 1; mu <= cfg.n; ++mu)
        args.push_back(JetCoord::base(mu));
    return SymbolRegistry::instance().register_symbol(
        "@arg" + std::to_string(slot) + "_" + std::to_string(alpha), std::move(args));
}

inline KappaField test_field(const BundleConfig& cfg, int slot, int alpha)
{
    auto [j, K] = kappa_decode(cfg, alpha);
    return KappaField::component(
        cfg, j, K,
        FormExpr(cfg, Coefficient::variable(
                          Var::opaque(test_symbol(cfg, slot, alpha), std::vector<int>(1, 0)))));
}

} // namespace detail

// Recover the kernel of a multilinear operator from evaluations at opaque
// x-dependent test fields concentrated on single basis elements. Formal
// partials of the test symbols separate the entries exactly.
inline MultiKernel
extract_kernel(const BundleConfig& cfg, int arity,
               const std::function<FormExpr(const std::vector<KappaField>&)>& evaluate)
{
    auto km = kappa_module(cfg);
    const int rank = km->rank();
    MultiKernel out(cfg, arity);

    std::map<int, detail::TestVarInfo> syms;
    for (int slot = 0; slot < arity; ++slot)
        for (int alpha = 0; alpha < rank; ++alpha)
            syms[detail::test_symbol(cfg, slot, alpha)] = {slot, alpha};

    std::vector<int> tuple(arity, 0);
    while (true) {
        std::vector<KappaField> fields;
        int twist = 0, suffix = 0;
        for (int i = 0; i < arity; ++i)
            fields.push_back(detail::test_field(cfg, i, tuple[i]));
        for (int i = arity - 1; i >= 0; --i) {
            suffix += km->parity(tuple[i]);
            twist += km->parity(tuple[i]) * suffix; // q_i = s_{a_i} at the test sector
        }
        FormExpr value = evaluate(fields);
        for (const auto& [mono, coeff] : value.terms()) {
            if (coeff.has_denominator())
                throw std::logic_error("kernel extraction met a rational denominator");
            for (const auto& [pm, c] : coeff.num().terms()) {
                MKey key(arity);
                PolyMonomial rest;
                std::vector<int> seen(arity, 0);
                for (const auto& [var, e] : pm) {
                    bool is_test = false;
                    if (!var.is_coord()) {
                        auto it = syms.find(var.symbol_id());
                        if (it != syms.end()) {
                            is_test = true;
                            if (it->second.slot >= arity || e != 1)
                                throw std::logic_error("nonlinear test variable occurrence");
                            seen[it->second.slot] += 1;
                            key[it->second.slot].alpha = it->second.alpha;
                            key[it->second.slot].sigma = MultiIndex(var.derivs());
                        }
                    }
                    if (!is_test)
                        rest.emplace_back(var, e);
                }
                for (int i = 0; i < arity; ++i) {
                    if (seen[i] != 1)
                        throw std::logic_error("kernel extraction: missing or repeated slot");
                    if (key[i].alpha != tuple[i])
                        throw std::logic_error("kernel extraction: foreign test variable");
                }
                Polynomial restp;
                restp.add_term(rest, c);
                FormExpr entry(cfg);
                entry.add_term(mono, Coefficient(restp));
                if (twist & 1)
                    entry = -entry;
                out.add_entry(key, entry);
            }
        }
        int i = arity - 1;
        while (i >= 0 && tuple[i] == rank - 1)
            tuple[i--] = 0;
        if (i < 0)
            break;
        ++tuple[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// secondary forms
// ---------------------------------------------------------------------------

// E1-term representative: a horizontal-form class for p = 0, otherwise an
// alternating multi-operator kernel with p slots (p-1 arguments + covector).
class SecondaryForm {
public:
    static SecondaryForm top_class(FormExpr rep)
    {
        SecondaryForm f;
        f.p_ = 0;
        f.cfg_ = rep.config();
        f.rep0_ = std::move(rep);
        return f;
    }
    static SecondaryForm from_kernel(MultiKernel k)
    {
        SecondaryForm f;
        f.p_ = k.arity();
        f.cfg_ = k.config();
        f.kernel_ = std::move(k).canonicalized();
        return f;
    }
    static SecondaryForm from_covector(const ModuleElement& psi)
    {
        const auto& cfg = psi.config();
        MultiKernel k(cfg, 1);
        for (int b = 0; b < psi.module()->rank(); ++b)
            if (!psi[b].is_zero())
                k.add_entry({SlotKey{b, MultiIndex::zero(cfg.n)}}, psi[b]);
        return from_kernel(std::move(k));
    }

    int arity() const { return p_; }
    const BundleConfig& config() const { return cfg_; }
    bool is_zero() const { return p_ == 0 ? rep0_.is_zero() : kernel_.is_zero(); }
    const FormExpr& rep() const
    {
        if (p_ != 0)
            throw std::domain_error("not a degree-zero secondary form");
        return rep0_;
    }
    const MultiKernel& kernel() const
    {
        if (p_ == 0)
            throw std::domain_error("degree-zero secondary form has no kernel");
        return kernel_;
    }

    std::optional<int> parity() const { return p_ == 0 ? rep0_.parity() : kernel_.parity(); }

    ModuleElement as_covector() const
    {
        if (p_ != 1)
            throw std::domain_error("not an arity-one secondary form");
        const auto& cfg = cfg_;
        ModuleElement psi(cfg, dual_module(kappa_module(cfg)));
        for (const auto& [key, a] : kernel_.entries())
            psi.set(key[0].alpha, psi[key[0].alpha] + a);
        return psi;
    }

    bool operator==(const SecondaryForm& o) const
    {
        return p_ == o.p_ && cfg_ == o.cfg_ && rep0_ == o.rep0_ && kernel_ == o.kernel_;
    }

private:
    int p_ = 0;
    BundleConfig cfg_;
    FormExpr rep0_;
    MultiKernel kernel_;
};

// ---------------------------------------------------------------------------
// the distinguished element u and the Euler operator
// ---------------------------------------------------------------------------

// u: HLambda_k -> B. Keeps the terms whose horizontal factor is the top
// slot-k volume, with their vertical prefix as the scalar; kills every other
// horizontal monomial.
inline BElement u_apply(const FormExpr& omega)
{
    const auto& cfg = omega.config();
    FormExpr vol = top_horizontal(cfg);
    const Monomial& vm = vol.terms().begin()->first;
    FormExpr scalar(cfg);
    for (const auto& [mono, coeff] : omega.terms()) {
        Monomial vert, horiz;
        for (const auto& [g, e] : mono.factors()) {
            if (g.is_vertical()) {
                if (g.slots.contains(cfg.k))
                    throw std::domain_error("u expects a form without slot-k Cartan factors");
                vert = Monomial::merge(vert, power_monomial(g, e))->second;
            } else {
                horiz = Monomial::merge(horiz, power_monomial(g, e))->second;
            }
        }
        if (!(horiz == vm))
            continue; // projected away
        scalar.add_term(vert, coeff);
    }
    return BElement{cfg, scalar};
}

// the element of the dual of the rank-one top module representing u
inline ModuleElement u_element(const BundleConfig& cfg)
{
    ModuleElement u(cfg, dual_module(htop_module(cfg)));
    u.set(0, FormExpr(cfg, Coefficient(1)));
    return u;
}

// Lagrangian density of a top horizontal form A . d_k x^1 ... d_k x^n
inline FormExpr top_coefficient(const FormExpr& omega)
{
    auto b = u_apply(omega);
    if (!(b.scalar.wedge(top_horizontal(omega.config())) == omega))
        throw std::domain_error("form is not of top slot-k horizontal degree");
    return b.scalar;
}

// d_{k,1}^{0,n} via the adjoint linearization applied to u
inline ModuleElement euler(const FormExpr& omega)
{
    const auto& cfg = omega.config();
    FormExpr A = top_coefficient(omega);
    ModuleElement xi(cfg, htop_module(cfg));
    xi.set(0, A);
    return apply_op(adjoint(linearization(xi)), u_element(cfg));
}

// the same operator from its local description
inline ModuleElement euler_local(const FormExpr& omega)
{
    const auto& cfg = omega.config();
    FormExpr A = top_coefficient(omega);
    ModuleElement psi(cfg, dual_module(kappa_module(cfg)));
    auto [ae, ao] = A.parity_split();
    for (const auto& part : {ae, ao}) {
        if (part.is_zero())
            continue;
        int pa = *part.parity();
        for (const auto& [key, c] : lin_coeffs(part)) {
            auto [j, L, sigma] = key;
            FormExpr v = total_derivative(sigma, c);
            if ((sigma.length() + L.parity() * ((pa + 1) & 1)) & 1)
                v = -v;
            int idx = kappa_index(cfg, j, L);
            psi.set(idx, psi[idx] + v);
        }
    }
    return psi;
}

inline SecondaryForm euler_form(const FormExpr& omega)
{
    return SecondaryForm::from_covector(euler(omega));
}

// ---------------------------------------------------------------------------
// the E1 differential, Lie action and insertions
// ---------------------------------------------------------------------------

namespace detail {

inline int kappa_parity_checked(const KappaField& chi, const char* what)
{
    auto p = chi.parity();
    if (!p)
        throw std::domain_error(std::string(what) + " requires homogeneous fields");
    return *p;
}

} // namespace detail

// adjoint linearization of a field, applied to a covector
inline ModuleElement lhat_field(const KappaField& chi, const ModuleElement& V)
{
    return apply_op(adjoint(linearization(to_element(chi))), V);
}
// adjoint linearization of a covector, applied to a field
inline ModuleElement lhat_covector(const ModuleElement& V, const KappaField& chi)
{
    return apply_op(adjoint(linearization(V)), to_element(chi));
}

// value of the E1 differential at concrete fields
inline ModuleElement d1_value(const SecondaryForm& T, const std::vector<KappaField>& chi)
{
    const auto& cfg = T.config();
    const int p = T.arity();
    if (static_cast<int>(chi.size()) != p)
        throw std::invalid_argument("d1 evaluation expects p fields");
    auto tpar = T.parity();
    if (!tpar)
        throw std::domain_error("d1 requires a homogeneous secondary form");
    std::vector<int> q(p);
    for (int i = 0; i < p; ++i)
        q[i] = detail::kappa_parity_checked(chi[i], "d1");

    auto a_sign = [&](int i) { // 1-based
        int s = *tpar;
        for (int l = 0; l < i - 1; ++l)
            s += q[l];
        return (q[i - 1] * s) & 1;
    };
    auto b_sign = [&](int i) {
        int s = 0;
        for (int l = i; l < p; ++l)
            s += q[l];
        return (q[i - 1] * s) & 1;
    };

    auto minus = [&](int skip) {
        std::vector<KappaField> rest;
        for (int l = 0; l < p; ++l)
            if (l != skip)
                rest.push_back(chi[l]);
        return rest;
    };

    ModuleElement out(cfg, dual_module(kappa_module(cfg)));

    for (int i = 1; i <= p; ++i) {
        auto V = T.kernel().eval_value(minus(i - 1));
        int sgn = (a_sign(i) + i + 1) & 1;
        auto term = act_horizontal(chi[i - 1], V);
        if (sgn)
            term = -term;
        out = out + term;
    }

    for (int i = 1; i <= p; ++i)
        for (int j = i + 1; j <= p; ++j) {
            auto br = bracket(chi[i - 1], chi[j - 1]);
            if (br.is_zero())
                continue;
            std::vector<KappaField> rest;
            rest.push_back(br);
            for (int l = 0; l < p; ++l)
                if (l != i - 1 && l != j - 1)
                    rest.push_back(chi[l]);
            int c = (a_sign(i) + a_sign(j) + *tpar * ((q[i - 1] + q[j - 1]) & 1) +
                     (q[i - 1] * q[j - 1]) + i + j) &
                    1;
            auto V = T.kernel().eval_value(rest);
            if (c)
                V = -V;
            out = out + V;
        }

    for (int i = 1; i <= p; ++i) {
        auto V = T.kernel().eval_value(minus(i - 1));
        auto t1 = lhat_field(chi[i - 1], V).scaled(Coefficient(Rational(p - 1, p)));
        if ((a_sign(i) + i + 1) & 1)
            t1 = -t1;
        auto t2 = lhat_covector(V, chi[i - 1]).scaled(Coefficient(Rational(1, p)));
        if ((b_sign(i) + i) & 1) // (-1)^{i+1} . -(-1)^{b(i)}
            t2 = -t2;
        out = out + t1 + t2;
    }
    return out;
}

inline bool in_Lp(const SecondaryForm& T);

inline SecondaryForm d1(const SecondaryForm& T)
{
    const auto& cfg = T.config();
    if (T.arity() == 0)
        throw std::domain_error("use the Euler operator on degree-zero classes");
    if (!in_Lp(T))
        throw std::domain_error("the form is not anti-self-adjoint after freezing");
    const int p = T.arity();
    auto km = kappa_module(cfg);
    auto evaluate = [&](const std::vector<KappaField>& fields) {
        auto V = d1_value(T, fields);
        // fold the covector into a scalar against a synthetic last slot is
        // not needed: extraction reads the components directly
        return V;
    };
    // extract a (p+1)-slot kernel: p argument slots, then the covector slot
    MultiKernel out(cfg, p + 1);
    std::map<int, detail::TestVarInfo> syms;
    for (int slot = 0; slot < p; ++slot)
        for (int alpha = 0; alpha < km->rank(); ++alpha)
            syms[detail::test_symbol(cfg, slot, alpha)] = {slot, alpha};

    std::vector<int> tuple(p, 0);
    const int rank = km->rank();
    while (true) {
        std::vector<KappaField> fields;
        for (int i = 0; i < p; ++i)
            fields.push_back(detail::test_field(cfg, i, tuple[i]));
        auto V = evaluate(fields);
        for (int beta = 0; beta < rank; ++beta) {
            if (V[beta].is_zero())
                continue;
            int twist = 0, suffix = km->parity(beta);
            for (int i = p - 1; i >= 0; --i) {
                suffix += km->parity(tuple[i]);
                twist += km->parity(tuple[i]) * suffix;
            }
            for (const auto& [mono, coeff] : V[beta].terms()) {
                if (coeff.has_denominator())
                    throw std::logic_error("kernel extraction met a rational denominator");
                for (const auto& [pm, c] : coeff.num().terms()) {
                    MKey key(p + 1);
                    key[p] = SlotKey{beta, MultiIndex::zero(cfg.n)};
                    PolyMonomial restm;
                    std::vector<int> seen(p, 0);
                    for (const auto& [var, e] : pm) {
                        bool is_test = false;
                        if (!var.is_coord()) {
                            auto it = syms.find(var.symbol_id());
                            if (it != syms.end()) {
                                is_test = true;
                                if (e != 1)
                                    throw std::logic_error("nonlinear test variable occurrence");
                                seen[it->second.slot] += 1;
                                key[it->second.slot].alpha = it->second.alpha;
                                key[it->second.slot].sigma = MultiIndex(var.derivs());
                            }
                        }
                        if (!is_test)
                            restm.emplace_back(var, e);
                    }
                    bool complete = true;
                    for (int i = 0; i < p; ++i) {
                        if (seen[i] != 1)
                            complete = false;
                        else if (key[i].alpha != tuple[i])
                            throw std::logic_error("kernel extraction: foreign test variable");
                    }
                    if (!complete)
                        throw std::logic_error("kernel extraction: missing slot");
                    Polynomial restp;
                    restp.add_term(restm, c);
                    FormExpr entry(cfg);
                    entry.add_term(mono, Coefficient(restp));
                    if (twist & 1)
                        entry = -entry;
                    out.add_entry(key, entry);
                }
            }
        }
        int i = p - 1;
        while (i >= 0 && tuple[i] == rank - 1)
            tuple[i--] = 0;
        if (i < 0)
            break;
        ++tuple[i];
    }
    return SecondaryForm::from_kernel(std::move(out));
}

// Lie action on secondary p-forms
inline SecondaryForm lie(const KappaField& chi, const SecondaryForm& T)
{
    const auto& cfg = T.config();
    if (T.arity() == 0)
        throw std::domain_error("Lie action on degree-zero classes is out of scope");
    const int p = T.arity();
    int qchi = detail::kappa_parity_checked(chi, "lie");
    auto tpar = T.parity();
    if (!tpar)
        throw std::domain_error("lie requires a homogeneous secondary form");
    auto E = prolong(chi);

    auto evaluate = [&](const std::vector<KappaField>& fields) -> FormExpr {
        std::vector<int> q(p);
        for (int i = 0; i < p; ++i)
            q[i] = detail::kappa_parity_checked(fields[i], "lie");
        FormExpr r = apply_derivation(E, T.kernel().eval(fields));
        for (int i = 1; i <= p; ++i) {
            std::vector<KappaField> mod = fields;
            mod[i - 1] = bracket(chi, fields[i - 1]);
            if (mod[i - 1].is_zero())
                continue;
            int s = *tpar;
            for (int l = 0; l < i - 1; ++l)
                s += q[l];
            FormExpr t = T.kernel().eval(mod);
            if ((qchi * s) & 1)
                t = -t;
            r -= t;
        }
        return r;
    };
    return SecondaryForm::from_kernel(extract_kernel(cfg, p, evaluate));
}

// insertion, lowering the arity by one
inline SecondaryForm insert(const KappaField& chi, const SecondaryForm& T)
{
    const auto& cfg = T.config();
    if (T.arity() == 0)
        throw std::domain_error("cannot insert into a degree-zero class");
    int q = detail::kappa_parity_checked(chi, "insert");
    auto tpar = T.parity();
    if (!tpar)
        throw std::domain_error("insert requires a homogeneous secondary form");
    int sgn = (q * *tpar) & 1;

    if (T.arity() == 1) {
        FormExpr val = T.kernel().eval({chi});
        FormExpr rep = val.wedge(top_horizontal(cfg));
        if (sgn)
            rep = -rep;
        return SecondaryForm::top_class(rep);
    }

    auto km = kappa_module(cfg);
    MultiKernel out(cfg, T.arity() - 1);
    for (const auto& [key, a] : T.kernel().entries()) {
        auto [j, K] = kappa_decode(cfg, key[0].alpha);
        auto comp = chi.component(j, K);
        if (comp.is_zero())
            continue;
        // twist for slot 1 against the whole key suffix
        int suffix = 0;
        for (const auto& sk : key)
            suffix += km->parity(sk.alpha);
        int tw = (q * suffix + sgn) & 1;
        FormExpr entry = a.wedge(total_derivative(key[0].sigma, comp));
        if (tw)
            entry = -entry;
        out.add_entry(MKey(key.begin() + 1, key.end()), entry);
    }
    return SecondaryForm::from_kernel(std::move(out));
}

// ---------------------------------------------------------------------------
// the L_p membership test
// ---------------------------------------------------------------------------

// freeze the first p-2 argument slots at concrete fields, producing the
// operator matrix kappa -> dual(kappa) of the remaining two slots
inline CDiffOp freeze(const SecondaryForm& T, const std::vector<KappaField>& xi)
{
    const auto& cfg = T.config();
    const int p = T.arity();
    if (static_cast<int>(xi.size()) != p - 2)
        throw std::invalid_argument("freeze expects p-2 fields");
    auto km = kappa_module(cfg);
    std::vector<int> q(xi.size());
    for (size_t i = 0; i < xi.size(); ++i)
        q[i] = detail::kappa_parity_checked(xi[i], "freeze");

    CDiffOp A(cfg, km, dual_module(km));
    for (const auto& [key, a] : T.kernel().entries()) {
        int alpha = key[p - 2].alpha;
        int beta = key[p - 1].alpha;
        if (!key[p - 1].sigma.is_zero())
            throw std::logic_error("kernel not canonical");
        // suffix twists: frozen slots against everything to their right,
        // and the free argument slot against the covector slot
        int s_alpha = km->parity(alpha);
        int s_beta = km->parity(beta);
        FormExpr entry = a;
        int twist = 0, suffix = s_beta + s_alpha;
        for (int i = static_cast<int>(xi.size()) - 1; i >= 0; --i) {
            suffix += km->parity(key[i].alpha);
            twist += q[i] * suffix;
        }
        // the free-slot twist q_{p-1}(s_alpha + s_beta) is the operator
        // convention of apply_op; the covector twist is the pairing's
        for (size_t i = 0; i < xi.size(); ++i) {
            auto [j, K] = kappa_decode(cfg, key[i].alpha);
            auto comp = xi[i].component(j, K);
            if (comp.is_zero()) {
                entry = FormExpr(cfg);
                break;
            }
            entry = entry.wedge(total_derivative(key[i].sigma, comp));
        }
        if (entry.is_zero())
            continue;
        if (twist & 1)
            entry = -entry;
        A.add_entry(beta, alpha, key[p - 2].sigma, entry);
    }
    return A;
}

// spanning family of freezing arguments: constant and polynomial multiples
// of the basis fields up to the operator order plus one
inline std::vector<KappaField> freezing_family(const BundleConfig& cfg, int max_order)
{
    std::vector<KappaField> out;
    auto km = kappa_module(cfg);
    for (int alpha = 0; alpha < km->rank(); ++alpha) {
        auto [j, K] = kappa_decode(cfg, alpha);
        for (const auto& tau : indices_up_to(cfg.n, max_order)) {
            Polynomial mono(Rational(1));
            for (int mu = 1; mu <= cfg.n; ++mu)
                for (int t = 0; t < tau[mu - 1]; ++t)
                    mono *= Polynomial::variable(Var::coord(JetCoord::base(mu)));
            out.push_back(KappaField::component(cfg, j, K, FormExpr(cfg, Coefficient(mono))));
        }
    }
    return out;
}

inline bool in_Lp(const SecondaryForm& T)
{
    if (T.arity() <= 1)
        return true; // L_1 is the whole adjoint module
    const auto& cfg = T.config();
    const int p = T.arity();
    auto family = freezing_family(cfg, T.kernel().max_order() + 1);
    std::vector<int> pick(p - 2, 0);
    while (true) {
        std::vector<KappaField> xi;
        for (int i = 0; i < p - 2; ++i)
            xi.push_back(family[pick[i]]);
        auto A = freeze(T, xi);
        if (!(adjoint(A) == -A))
            return false;
        int i = p - 3;
        while (i >= 0 && pick[i] == static_cast<int>(family.size()) - 1)
            pick[i--] = 0;
        if (i < 0)
            break;
        ++pick[i];
    }
    return true;
}

// ---------------------------------------------------------------------------
// eta: insertion of prolonged fields into slot-k Cartan factors
// ---------------------------------------------------------------------------

namespace detail {

// contraction with a prolonged field: odd-type derivation pairing the
// slot-k Cartan generators
struct Contraction {
    const EvolutionaryDerivation* E;
    int par;

    int parity() const { return par; }
    FormExpr on_coord(const BundleConfig& cfg, int, const MultiIndex&) const
    {
        return FormExpr(cfg);
    }
    FormExpr on_vgen(const BundleConfig& cfg, int j, const MultiIndex& sigma, SlotSet S) const
    {
        if (!S.contains(cfg.k))
            return FormExpr(cfg);
        SlotSet K = S.without(cfg.k);
        FormExpr v = total_derivative(sigma, E->field().component(j, K));
        return (K.parity() & 1) ? -v : v; // d_S^v u = (-1)^{|K|} d_k^v d_K^v u
    }
    FormExpr on_hgen(const BundleConfig& cfg, int, SlotSet) const { return FormExpr(cfg); }
    FormExpr on_base(const BundleConfig& cfg, int) const { return FormExpr(cfg); }
};

} // namespace detail

inline FormExpr contract_prolonged(const KappaField& chi, const FormExpr& w)
{
    auto E = prolong(chi);
    detail::Contraction c{&E, (E.parity() + 1) & 1};
    return detail::apply_derivation_impl(c, w);
}

// drop every monomial containing a slot-k Cartan generator (the class modulo
// the Cartan ideal)
inline FormExpr project_horizontal(const FormExpr& w)
{
    const auto& cfg = w.config();
    FormExpr r(cfg);
    for (const auto& [mono, coeff] : w.terms()) {
        bool cartan = false;
        for (const auto& [g, e] : mono.factors())
            if (g.is_vertical() && g.slots.contains(cfg.k))
                cartan = true;
        if (!cartan)
            r.add_term(mono, coeff);
    }
    return r;
}

// the isomorphism of the zeroth page: p-fold insertion then projection
inline FormExpr eta_value(int p, const FormExpr& omega, const std::vector<KappaField>& chi)
{
    if (static_cast<int>(chi.size()) != p)
        throw std::invalid_argument("eta expects p fields");
    auto wpar = omega.parity();
    if (!wpar)
        throw std::domain_error("eta requires a homogeneous form");
    FormExpr r = omega;
    for (int i = p - 1; i >= 0; --i)
        r = contract_prolonged(chi[i], r);
    r = project_horizontal(r);
    int sum_q = 0;
    for (const auto& c : chi)
        sum_q += detail::kappa_parity_checked(c, "eta");
    int sgn = (*wpar * sum_q + p * (p - 1) / 2) & 1;
    return sgn ? -r : r;
}

// the p-ary horizontal-form-valued operator eta([omega]); the representative
// is checked for the slot-k Cartan degree the class requires
class EtaOperator {
public:
    EtaOperator(int p, FormExpr omega) : p_(p), omega_(std::move(omega))
    {
        const auto& cfg = omega_.config();
        for (const auto& [mono, coeff] : omega_.terms()) {
            int cdeg = 0;
            for (const auto& [g, e] : mono.factors())
                if (g.is_vertical() && g.slots.contains(cfg.k))
                    cdeg += e;
            if (cdeg < p_)
                throw std::domain_error("representative has slot-k Cartan degree below p");
        }
    }

    int arity() const { return p_; }
    const FormExpr& representative() const { return omega_; }

    FormExpr operator()(const std::vector<KappaField>& chi) const
    {
        return eta_value(p_, omega_, chi);
    }

private:
    int p_;
    FormExpr omega_;
};

inline EtaOperator eta(int p, FormExpr omega) { return EtaOperator(p, std::move(omega)); }

// ---------------------------------------------------------------------------
// secondary covariant tensors
// ---------------------------------------------------------------------------

// p_{k-1}: keep the K-empty components' multidegree-zero parts
inline std::map<int, Coefficient> project_kappa(const KappaField& chi)
{
    const auto& cfg = chi.config();
    std::map<int, Coefficient> out;
    for (int j = 1; j <= cfg.m; ++j) {
        auto c = chi.component(j, SlotSet());
        if (c.is_zero())
            continue;
        auto part = c.component(std::vector<int>(cfg.k, 0));
        if (!part.is_zero())
            out[j] = part.as_coefficient();
    }
    return out;
}

struct BaseCovector {
    std::vector<FormExpr> omegas;    // k-1 Cartan one-forms in slot 1
    std::vector<Coefficient> psi;    // rank-m covector over F

    void validate(const BundleConfig& cfg) const
    {
        if (static_cast<int>(omegas.size()) != cfg.k - 1)
            throw std::invalid_argument("expected k-1 one-forms");
        if (static_cast<int>(psi.size()) != cfg.m)
            throw std::invalid_argument("expected a rank-m covector");
        for (const auto& w : omegas) {
            for (const auto& [mono, coeff] : w.terms()) {
                if (mono.factors().size() != 1)
                    throw std::invalid_argument("one-form factors must be single generators");
                const auto& g = mono.factors().front().first;
                if (!g.is_vertical() || !(g.slots == SlotSet::single(1)))
                    throw std::invalid_argument("one-forms must be slot-1 Cartan forms");
            }
        }
    }
};

// i_k: the product omega_1 . kappa_12(omega_2) ... tensored with psi o p_{k-1}
inline SecondaryForm tensor_embed(const BundleConfig& cfg, const BaseCovector& t)
{
    t.validate(cfg);
    FormExpr prod(cfg, Coefficient(1));
    for (int i = 0; i < cfg.k - 1; ++i)
        prod = prod.wedge(kappa(i + 1, t.omegas[i]));
    ModuleElement psi(cfg, dual_module(kappa_module(cfg)));
    for (int j = 1; j <= cfg.m; ++j) {
        auto v = prod.scaled(t.psi[j - 1]);
        if (!v.is_zero())
            psi.set(kappa_index(cfg, j, SlotSet()), v);
    }
    return SecondaryForm::from_covector(psi);
}

// membership in the image of the tensor embedding, decided syntactically:
// only (K = {}, sigma = 0) entries; every entry a single-slot vertical
// product of multidegree (1,..,1,0); the coefficient tensor factors as an
// outer product across the fiber index and the k-1 slots
inline bool is_secondary_tensor(const MultiKernel& T)
{
    if (T.arity() != 1)
        throw std::domain_error("secondary tensors are arity-one covectors");
    const auto& cfg = T.config();
    if (T.is_zero())
        return true;

    // collect the coefficient tensor indexed by (j, slot-1 gen, ..., slot-(k-1) gen)
    std::map<std::vector<Generator>, std::map<int, Coefficient>> table;
    for (const auto& [key, a] : T.entries()) {
        auto [j, K] = kappa_decode(cfg, key[0].alpha);
        if (!K.empty() || !key[0].sigma.is_zero())
            return false; // depends on the kernel of the base projection
        for (const auto& [mono, coeff] : a.terms()) {
            std::vector<Generator> gens(cfg.k - 1);
            std::vector<bool> filled(cfg.k - 1, false);
            int count = 0;
            for (const auto& [g, e] : mono.factors()) {
                if (!g.is_vertical() || g.slots.size() != 1 || e != 1)
                    return false;
                int slot = g.slots.max_slot();
                if (slot > cfg.k - 1 || filled[slot - 1])
                    return false;
                gens[slot - 1] = g;
                filled[slot - 1] = true;
                ++count;
            }
            if (count != cfg.k - 1)
                return false;
            table[gens][j] += coeff;
        }
    }

    // outer-product test: every axis unfolding has rank at most one
    // axis 0: fiber index j; axes 1..k-1: the slot generators
    std::vector<std::pair<std::vector<Generator>, std::map<int, Coefficient>>> rows(
        table.begin(), table.end());
    auto entry = [&](size_t r, int j) -> Coefficient {
        auto it = rows[r].second.find(j);
        return it == rows[r].second.end() ? Coefficient() : it->second;
    };
    // fiber axis
    for (size_t r1 = 0; r1 < rows.size(); ++r1)
        for (size_t r2 = r1 + 1; r2 < rows.size(); ++r2)
            for (int j1 = 1; j1 <= cfg.m; ++j1)
                for (int j2 = j1 + 1; j2 <= cfg.m; ++j2) {
                    auto det = entry(r1, j1) * entry(r2, j2) - entry(r1, j2) * entry(r2, j1);
                    if (!det.is_zero())
                        return false;
                }
    // slot axes: group rows by the generator at one slot and compare
    for (int axis = 0; axis + 1 < cfg.k; ++axis) {
        for (size_t r1 = 0; r1 < rows.size(); ++r1)
            for (size_t r2 = r1 + 1; r2 < rows.size(); ++r2) {
                // rows with swapped axis generators must have proportional data
                auto key1 = rows[r1].first, key2 = rows[r2].first;
                std::swap(key1[axis], key2[axis]);
                auto it1 = table.find(key1);
                auto it2 = table.find(key2);
                for (int j1 = 1; j1 <= cfg.m; ++j1)
                    for (int j2 = 1; j2 <= cfg.m; ++j2) {
                        Coefficient a = entry(r1, j1) * entry(r2, j2);
                        Coefficient b =
                            (it1 == table.end() ? Coefficient()
                                                : (it1->second.count(j1) ? it1->second.at(j1)
                                                                         : Coefficient())) *
                            (it2 == table.end() ? Coefficient()
                                                : (it2->second.count(j2) ? it2->second.at(j2)
                                                                         : Coefficient()));
                        if (!(a - b).is_zero())
                            return false;
                    }
            }
    }
    return true;
}

} // namespace jetforms
