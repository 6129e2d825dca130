#pragma once

#include "derivations.hpp"

#include <memory>
#include <string>

namespace jetforms {

// Descriptor of a finite-rank horizontal module: a basis with parities.
// Duals collapse: dual(dual(P)) is P itself, with compensating signs folded
// into adjoint matrices.
struct HModule {
    std::string label;
    std::vector<int> parities;
    bool is_dual = false;
    std::shared_ptr<const HModule> base;

    int rank() const { return static_cast<int>(parities.size()); }
    int parity(int i) const { return parities[i] & 1; }
};
using HModulePtr = std::shared_ptr<const HModule>;

inline bool same_module(const HModulePtr& a, const HModulePtr& b)
{
    if (a == b)
        return true;
    if (!a || !b)
        return false;
    if (a->label != b->label || a->parities != b->parities || a->is_dual != b->is_dual)
        return false;
    if (a->is_dual)
        return same_module(a->base, b->base);
    return true;
}

inline HModulePtr dual_module(const HModulePtr& p)
{
    if (p->is_dual)
        return p->base;
    auto d = std::make_shared<HModule>();
    d->label = p->label + "^";
    d->parities = p->parities;
    d->is_dual = true;
    d->base = p;
    return d;
}

inline HModulePtr scalar_module(const BundleConfig&)
{
    auto m = std::make_shared<HModule>();
    m->label = "ground";
    m->parities = {0};
    return m;
}

// rank-one module spanned by the top slot-k horizontal form
inline HModulePtr htop_module(const BundleConfig& cfg)
{
    auto m = std::make_shared<HModule>();
    m->label = "htop";
    m->parities = {cfg.n & 1};
    return m;
}

// basis V_j^K of Lambda_{k-1} kappa, ordered by (K mask, j)
inline HModulePtr kappa_module(const BundleConfig& cfg)
{
    auto m = std::make_shared<HModule>();
    m->label = "kappa";
    for (std::uint32_t mask = 0; mask < (1u << (cfg.k - 1)); ++mask)
        for (int j = 1; j <= cfg.m; ++j)
            m->parities.push_back(SlotSet(mask).parity());
    return m;
}

inline int kappa_index(const BundleConfig& cfg, int j, SlotSet K)
{
    return static_cast<int>(K.mask) * cfg.m + (j - 1);
}
inline std::pair<int, SlotSet> kappa_decode(const BundleConfig& cfg, int idx)
{
    return {idx % cfg.m + 1, SlotSet(static_cast<std::uint32_t>(idx / cfg.m))};
}

// Element of a horizontal module: components in Cstar Lambda_{k-1}.
class ModuleElement {
public:
    ModuleElement() = default;
    ModuleElement(BundleConfig cfg, HModulePtr mod)
        : cfg_(cfg), mod_(std::move(mod)), comps_(mod_->rank(), FormExpr(cfg))
    {
    }

    const BundleConfig& config() const { return cfg_; }
    const HModulePtr& module() const { return mod_; }
    const std::vector<FormExpr>& components() const { return comps_; }
    const FormExpr& operator[](int i) const { return comps_[i]; }

    void set(int i, FormExpr v)
    {
        auto cls = classify(v);
        if (!cls.in_Cstar)
            throw std::domain_error("module component must lie in the vertical subalgebra");
        comps_[i] = std::move(v);
    }

    bool is_zero() const
    {
        for (const auto& c : comps_)
            if (!c.is_zero())
                return false;
        return true;
    }

    ModuleElement operator+(const ModuleElement& o) const
    {
        require_compatible(o);
        ModuleElement r = *this;
        for (int i = 0; i < mod_->rank(); ++i)
            r.comps_[i] += o.comps_[i];
        return r;
    }
    ModuleElement operator-() const
    {
        ModuleElement r = *this;
        for (auto& c : r.comps_)
            c = -c;
        return r;
    }
    ModuleElement operator-(const ModuleElement& o) const { return *this + (-o); }
    ModuleElement scaled(const Coefficient& c) const
    {
        ModuleElement r = *this;
        for (auto& v : r.comps_)
            v = v.scaled(c);
        return r;
    }
    // left multiplication by a graded scalar
    ModuleElement scaled(const FormExpr& w) const
    {
        ModuleElement r = *this;
        for (auto& v : r.comps_)
            v = w.wedge(v);
        return r;
    }

    bool operator==(const ModuleElement& o) const
    {
        return cfg_ == o.cfg_ && same_module(mod_, o.mod_) && comps_ == o.comps_;
    }

    // |psi| = |psi^i| + parity(e_i), common over nonzero components
    std::optional<int> parity() const
    {
        std::optional<int> p;
        for (int i = 0; i < mod_->rank(); ++i) {
            if (comps_[i].is_zero())
                continue;
            auto cp = comps_[i].parity();
            if (!cp)
                return std::nullopt;
            int tp = (*cp + mod_->parity(i)) & 1;
            if (!p)
                p = tp;
            else if (*p != tp)
                return std::nullopt;
        }
        return p ? p : std::optional<int>(0);
    }

    std::pair<ModuleElement, ModuleElement> parity_split() const
    {
        ModuleElement even(cfg_, mod_), odd(cfg_, mod_);
        for (int i = 0; i < mod_->rank(); ++i) {
            auto [ce, co] = comps_[i].parity_split();
            if (mod_->parity(i)) {
                even.comps_[i] = co;
                odd.comps_[i] = ce;
            } else {
                even.comps_[i] = ce;
                odd.comps_[i] = co;
            }
        }
        return {even, odd};
    }

    void require_compatible(const ModuleElement& o) const
    {
        check_same_config(cfg_, o.cfg_);
        if (!same_module(mod_, o.mod_))
            throw std::invalid_argument("module mismatch");
    }

private:
    BundleConfig cfg_;
    HModulePtr mod_;
    std::vector<FormExpr> comps_;
};

inline ModuleElement to_element(const KappaField& chi)
{
    const auto& cfg = chi.config();
    ModuleElement e(cfg, kappa_module(cfg));
    for (const auto& [key, v] : chi.components())
        e.set(kappa_index(cfg, key.first, key.second), v);
    return e;
}
inline KappaField to_kappa(const ModuleElement& e)
{
    const auto& cfg = e.config();
    KappaField chi(cfg);
    for (int i = 0; i < e.module()->rank(); ++i) {
        auto [j, K] = kappa_decode(cfg, i);
        if (!e[i].is_zero())
            chi.set(j, K, e[i]);
    }
    return chi;
}

// evolutionary action on a horizontal module, componentwise
inline ModuleElement act_horizontal(const KappaField& chi, const ModuleElement& xi)
{
    auto E = prolong(chi);
    ModuleElement r(xi.config(), xi.module());
    for (int i = 0; i < xi.module()->rank(); ++i) {
        auto v = apply_derivation(E, xi[i]);
        if (!v.is_zero())
            r.set(i, v);
    }
    return r;
}

// Matrix of total-derivative polynomials between horizontal modules.
// Plain left convention: (X p)^i = sum a^i_{alpha,sigma} . D_sigma(p^alpha).
class CDiffOp {
public:
    CDiffOp() = default;
    CDiffOp(BundleConfig cfg, HModulePtr src, HModulePtr dst)
        : cfg_(cfg), src_(std::move(src)), dst_(std::move(dst))
    {
    }

    static CDiffOp identity(const BundleConfig& cfg, const HModulePtr& mod)
    {
        CDiffOp op(cfg, mod, mod);
        for (int i = 0; i < mod->rank(); ++i)
            op.add_entry(i, i, MultiIndex::zero(cfg.n), FormExpr(cfg, Coefficient(1)));
        return op;
    }

    static CDiffOp scalar(const BundleConfig& cfg, const std::map<MultiIndex, FormExpr>& entries)
    {
        auto g = scalar_module(cfg);
        CDiffOp op(cfg, g, g);
        for (const auto& [sigma, a] : entries)
            op.add_entry(0, 0, sigma, a);
        return op;
    }

    const BundleConfig& config() const { return cfg_; }
    const HModulePtr& source() const { return src_; }
    const HModulePtr& target() const { return dst_; }

    using EntryMap = std::map<std::pair<int, int>, std::map<MultiIndex, FormExpr>>;
    const EntryMap& entries() const { return entries_; }

    bool is_zero() const { return entries_.empty(); }

    void add_entry(int i, int alpha, const MultiIndex& sigma, const FormExpr& a)
    {
        if (a.is_zero())
            return;
        if (!classify(a).in_Cstar)
            throw std::domain_error("operator entry must lie in the vertical subalgebra");
        auto& cell = entries_[{i, alpha}];
        auto it = cell.find(sigma);
        if (it == cell.end())
            it = cell.emplace(sigma, FormExpr(cfg_)).first;
        it->second += a;
        if (it->second.is_zero()) {
            cell.erase(it);
            if (cell.empty())
                entries_.erase({i, alpha});
        }
    }

    FormExpr entry(int i, int alpha, const MultiIndex& sigma) const
    {
        auto it = entries_.find({i, alpha});
        if (it == entries_.end())
            return FormExpr(cfg_);
        auto jt = it->second.find(sigma);
        return jt == it->second.end() ? FormExpr(cfg_) : jt->second;
    }

    int order() const
    {
        int r = 0;
        for (const auto& [key, cell] : entries_)
            for (const auto& [sigma, a] : cell)
                r = std::max(r, sigma.length());
        return r;
    }

    CDiffOp operator+(const CDiffOp& o) const
    {
        require_shape(o);
        CDiffOp r = *this;
        for (const auto& [key, cell] : o.entries_)
            for (const auto& [sigma, a] : cell)
                r.add_entry(key.first, key.second, sigma, a);
        return r;
    }
    CDiffOp operator-() const
    {
        CDiffOp r = *this;
        for (auto& [key, cell] : r.entries_)
            for (auto& [sigma, a] : cell)
                a = -a;
        return r;
    }
    CDiffOp operator-(const CDiffOp& o) const { return *this + (-o); }
    CDiffOp scaled(const Coefficient& c) const
    {
        CDiffOp r(cfg_, src_, dst_);
        for (const auto& [key, cell] : entries_)
            for (const auto& [sigma, a] : cell)
                r.add_entry(key.first, key.second, sigma, a.scaled(c));
        return r;
    }

    bool operator==(const CDiffOp& o) const
    {
        return cfg_ == o.cfg_ && same_module(src_, o.src_) && same_module(dst_, o.dst_) &&
               entries_ == o.entries_;
    }

    // entry-parity |a| + s_alpha + t_i, common over nonzero entries
    std::optional<int> parity() const
    {
        std::optional<int> p;
        for (const auto& [key, cell] : entries_)
            for (const auto& [sigma, a] : cell) {
                auto ap = a.parity();
                if (!ap)
                    return std::nullopt;
                int tp = (*ap + src_->parity(key.second) + dst_->parity(key.first)) & 1;
                if (!p)
                    p = tp;
                else if (*p != tp)
                    return std::nullopt;
            }
        return p ? p : std::optional<int>(0);
    }

    void require_shape(const CDiffOp& o) const
    {
        check_same_config(cfg_, o.cfg_);
        if (!same_module(src_, o.src_) || !same_module(dst_, o.dst_))
            throw std::invalid_argument("operator shape mismatch");
    }

private:
    BundleConfig cfg_;
    HModulePtr src_, dst_;
    EntryMap entries_;
};

// Application carries the module-parity twist (-1)^{|p|(s_alpha + t_i)}: the
// sign of moving the component scalar p^alpha past the two basis vectors.
// With it, matrices compose and adjoints are matrices again.
inline ModuleElement apply_op(const CDiffOp& X, const ModuleElement& p)
{
    check_same_config(X.config(), p.config());
    if (!same_module(X.source(), p.module()))
        throw std::invalid_argument("operator applied to element of the wrong module");
    auto pp = p.parity();
    if (!pp) {
        auto [pe, po] = p.parity_split();
        return apply_op(X, pe) + apply_op(X, po);
    }
    ModuleElement r(X.config(), X.target());
    for (const auto& [key, cell] : X.entries()) {
        auto [i, alpha] = key;
        FormExpr sum(X.config());
        for (const auto& [sigma, a] : cell) {
            auto dp = total_derivative(sigma, p[alpha]);
            if (!dp.is_zero())
                sum += a.wedge(dp);
        }
        if (sum.is_zero())
            continue;
        if ((*pp * (X.source()->parity(alpha) + X.target()->parity(i))) & 1)
            sum = -sum;
        r.set(i, r[i] + sum);
    }
    return r;
}

inline CDiffOp compose(const CDiffOp& X, const CDiffOp& Y)
{
    check_same_config(X.config(), Y.config());
    if (!same_module(Y.target(), X.source()))
        throw std::invalid_argument("operators are not composable");
    const auto& cfg = X.config();
    CDiffOp r(cfg, Y.source(), X.target());
    for (const auto& [xkey, xcell] : X.entries()) {
        auto [i, beta] = xkey;
        for (const auto& [ykey, ycell] : Y.entries()) {
            auto [beta2, alpha] = ykey;
            if (beta2 != beta)
                continue;
            for (const auto& [tau, a] : xcell)
                for (const auto& [sigma, b] : ycell) {
                    auto [be, bo] = b.parity_split();
                    for (const auto& part : {be, bo}) {
                        if (part.is_zero())
                            continue;
                        // |Y|-entry twist from threading q = Y p through X
                        int py = (*part.parity() + Y.source()->parity(alpha) +
                                  Y.target()->parity(beta)) &
                                 1;
                        int twist =
                            (py * (Y.target()->parity(beta) + X.target()->parity(i))) & 1;
                        for (const auto& rho : sub_indices(tau)) {
                            Rational c = binomial(tau, rho);
                            if (twist)
                                c = -c;
                            auto db = total_derivative(rho, part);
                            if (db.is_zero())
                                continue;
                            r.add_entry(i, alpha, (tau - rho) + sigma,
                                        a.wedge(db).scaled(c));
                        }
                    }
                }
        }
    }
    return r;
}

// Integration-by-parts adjoint. For X: S -> T the adjoint runs dual(T) ->
// dual(S); double duals collapse back with compensating basis signs, so
// adjoint(adjoint(X)) == X holds on the nose.
inline CDiffOp adjoint(const CDiffOp& X)
{
    const auto& cfg = X.config();
    auto src = X.source();
    auto dst = X.target();
    CDiffOp r(cfg, dual_module(dst), dual_module(src));
    for (const auto& [key, cell] : X.entries()) {
        auto [i, alpha] = key;
        int s = src->parity(alpha);
        int t = dst->parity(i);
        int twist =
            (t * (s + 1) + (src->is_dual ? s : 0) + (dst->is_dual ? t : 0)) & 1;
        for (const auto& [sigma, a] : cell)
            for (const auto& rho : sub_indices(sigma)) {
                auto da = total_derivative(rho, a);
                if (da.is_zero())
                    continue;
                Rational c = binomial(sigma, rho);
                if ((sigma.length() + twist) & 1)
                    c = -c;
                r.add_entry(alpha, i, sigma - rho, da.scaled(c));
            }
    }
    return r;
}

// pairing of a dual element against a module element, valued in the ground
// algebra (the top-form factor of the berezinian module is implicit):
// <psi, q> = sum_i (-1)^{|q| t_i} psi^i . q^i
inline FormExpr pair_dual(const ModuleElement& psi, const ModuleElement& p)
{
    check_same_config(psi.config(), p.config());
    if (!same_module(psi.module(), dual_module(p.module())) &&
        !same_module(dual_module(psi.module()), p.module()))
        throw std::invalid_argument("pairing requires mutually dual modules");
    auto pp = p.parity();
    if (!pp) {
        auto [e, o] = p.parity_split();
        return pair_dual(psi, e) + pair_dual(psi, o);
    }
    const auto& cfg = p.config();
    FormExpr r(cfg);
    for (int i = 0; i < p.module()->rank(); ++i) {
        FormExpr term = psi[i].wedge(p[i]);
        if ((p.module()->parity(i) * *pp) & 1)
            term = -term;
        r += term;
    }
    return r;
}

// top slot-k horizontal volume monomial d_k x^1 ... d_k x^n
inline FormExpr top_horizontal(const BundleConfig& cfg)
{
    FormExpr r(cfg, Coefficient(1));
    for (int mu = 1; mu <= cfg.n; ++mu)
        r = r.wedge(FormExpr::generator(cfg, Generator::horizontal(mu, SlotSet::single(cfg.k))));
    return r;
}

// the same volume with d_k x^mu omitted, signed so that
// d_k^h((-1)^{mu-1} w . top_without(mu)) = D_mu(w) . top
inline FormExpr top_horizontal_without(const BundleConfig& cfg, int mu)
{
    FormExpr r(cfg, Coefficient(1));
    for (int nu = 1; nu <= cfg.n; ++nu) {
        if (nu == mu)
            continue;
        r = r.wedge(FormExpr::generator(cfg, Generator::horizontal(nu, SlotSet::single(cfg.k))));
    }
    return r;
}

// Element of the rank-one berezinian module: scalar tensor the slot-1 volume.
struct BElement {
    BundleConfig cfg;
    FormExpr scalar; // in Cstar Lambda_{k-1}

    bool is_zero() const { return scalar.is_zero(); }
    bool operator==(const BElement& o) const { return cfg == o.cfg && scalar == o.scalar; }
};

// embedding into ker d_k^h: omega tensor vol |-> omega . kappa_1k(vol)
inline FormExpr embed_B(const BElement& b)
{
    return b.scalar.wedge(top_horizontal(b.cfg));
}

// Green witness: pair(psi, X p) - (-1)^{|psi||X|} pair(adjoint(X) psi, p)
// is d_k^h(eta) with eta assembled during the reduction.
struct GreenWitness {
    FormExpr eta;
    bool reduction_ok = false; // term-level bookkeeping closed
    bool adjoint_ok = false;   // residual equals the adjoint pairing
    bool exact_ok = false;     // difference equals d_k^h(eta)
    bool ok() const { return reduction_ok && adjoint_ok && exact_ok; }
};

inline GreenWitness green_witness(const CDiffOp& X, const ModuleElement& p,
                                  const ModuleElement& psi)
{
    const auto& cfg = X.config();
    auto pp = psi.parity();
    auto px = X.parity();
    if (!pp || !px)
        throw std::domain_error("green witness requires homogeneous operator and dual element");

    FormExpr lhs = pair_dual(psi, apply_op(X, p));

    // reduce sum_i (+-) psi^i a^i_{alpha sigma} D_sigma(p^alpha) to order zero
    std::vector<FormExpr> bucket(cfg.n + 1, FormExpr(cfg));
    FormExpr residual(cfg);
    struct Item {
        FormExpr f;
        MultiIndex sigma;
        int alpha;
    };
    std::vector<Item> work;
    auto p_par = p.parity();
    if (!p_par)
        throw std::domain_error("green witness requires a homogeneous argument");
    for (const auto& [key, cell] : X.entries()) {
        auto [i, alpha] = key;
        int t = X.target()->parity(i);
        int s = X.source()->parity(alpha);
        for (const auto& [sigma, a] : cell) {
            FormExpr f = psi[i].wedge(a);
            if ((t * *px + *p_par * s) & 1)
                f = -f;
            if (!f.is_zero())
                work.push_back({f, sigma, alpha});
        }
    }
    while (!work.empty()) {
        Item it = work.back();
        work.pop_back();
        if (it.sigma.is_zero()) {
            residual += it.f.wedge(p[it.alpha]);
            continue;
        }
        int mu = 1;
        while (it.sigma[mu - 1] == 0)
            ++mu;
        MultiIndex sig2 = it.sigma;
        {
            std::vector<int> e = sig2.entries();
            e[mu - 1] -= 1;
            sig2 = MultiIndex(e);
        }
        bucket[mu] += it.f.wedge(total_derivative(sig2, p[it.alpha]));
        work.push_back({-total_derivative(it.f, mu), sig2, it.alpha});
    }

    GreenWitness w;
    FormExpr div(cfg);
    for (int mu = 1; mu <= cfg.n; ++mu)
        div += total_derivative(bucket[mu], mu);
    w.reduction_ok = (lhs == residual + div);

    FormExpr rhs = pair_dual(apply_op(adjoint(X), psi), p);
    if ((*pp * *px) & 1)
        rhs = -rhs;
    w.adjoint_ok = (residual == rhs);

    // d_k^h(w . vol-without-mu) = (-1)^{|w|} D_mu(w) . (-1)^{mu-1} vol, and
    // every bucket term has parity |psi| + |X| + |p|
    int bucket_parity = (*pp + *px + *p_par) & 1;
    FormExpr eta(cfg);
    for (int mu = 1; mu <= cfg.n; ++mu) {
        FormExpr t = bucket[mu].wedge(top_horizontal_without(cfg, mu));
        if ((mu - 1 + bucket_parity) & 1)
            t = -t;
        eta += t;
    }
    w.eta = eta;
    FormExpr diff = (lhs - rhs).wedge(top_horizontal(cfg));
    w.exact_ok = (diff == differential(cfg.k, SlotKind::Horizontal, eta));
    return w;
}

// graded left partials of a form: the coefficients c with
// E_chi(w) = sum D_sigma(chi^j_K) . c^{jK sigma}(w)
inline std::map<std::tuple<int, SlotSet, MultiIndex>, FormExpr> lin_coeffs(const FormExpr& w)
{
    const auto& cfg = w.config();
    std::map<std::tuple<int, SlotSet, MultiIndex>, FormExpr> out;
    auto acc = [&](int j, SlotSet K, const MultiIndex& sigma, const FormExpr& v) {
        auto key = std::make_tuple(j, K, sigma);
        auto it = out.find(key);
        if (it == out.end())
            it = out.emplace(key, FormExpr(cfg)).first;
        it->second += v;
        if (it->second.is_zero())
            out.erase(it);
    };
    for (const auto& [mono, coeff] : w.terms()) {
        for (const auto& v : coeff.mentioned_coords()) {
            if (v.kind != JetCoord::Kind::Fiber)
                continue;
            Coefficient df = coeff.partial(v);
            if (df.is_zero())
                continue;
            FormExpr t(cfg);
            t.add_term(mono, df);
            acc(v.index, SlotSet(), v.sigma, t);
        }
        const auto& fac = mono.factors();
        int prefix_parity = 0;
        for (size_t i = 0; i < fac.size(); ++i) {
            const auto& [g, e] = fac[i];
            if (!g.is_vertical())
                throw std::domain_error("linearization input must be vertical");
            Monomial red;
            for (size_t l = 0; l < fac.size(); ++l) {
                int exp = (l == i) ? fac[l].second - 1 : fac[l].second;
                if (exp == 0)
                    continue;
                red = Monomial::merge(red, power_monomial(fac[l].first, exp))->second;
            }
            FormExpr t(cfg);
            Rational c(e);
            if ((g.slots.parity() * prefix_parity) & 1)
                c = -c;
            t.add_term(red, coeff * c);
            acc(g.index, g.slots, g.sigma, t);
            prefix_parity += e * g.parity();
        }
    }
    return out;
}

// universal linearization of a horizontal module element:
// apply_op(linearization(xi), chi) = (-1)^{|xi||chi|} E_chi(xi), componentwise
inline CDiffOp linearization(const ModuleElement& xi)
{
    const auto& cfg = xi.config();
    CDiffOp op(cfg, kappa_module(cfg), xi.module());
    for (int a = 0; a < xi.module()->rank(); ++a) {
        if (xi[a].is_zero())
            continue;
        auto [even_part, odd_part] = xi[a].parity_split();
        for (const auto& part : {even_part, odd_part}) {
            if (part.is_zero())
                continue;
            int pxi = *part.parity();
            for (const auto& [key, c] : lin_coeffs(part)) {
                auto [j, K, sigma] = key;
                FormExpr entry = c;
                if ((K.parity() * ((pxi + 1) & 1)) & 1)
                    entry = -entry;
                op.add_entry(a, kappa_index(cfg, j, K), sigma, entry);
            }
        }
    }
    return op;
}

} // namespace jetforms
