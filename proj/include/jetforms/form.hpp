#pragma once

#include "coefficient.hpp"
#include "generators.hpp"

#include <map>
#include <optional>
#include <vector>

namespace jetforms {

// Ordered power product of generators; odd generators appear with exponent 1.
class Monomial {
public:
    using Factors = std::vector<std::pair<Generator, int>>;

    Monomial() = default;
    explicit Monomial(Generator g) { factors_.emplace_back(std::move(g), 1); }

    const Factors& factors() const { return factors_; }
    bool is_unit() const { return factors_.empty(); }

    int parity() const
    {
        int p = 0;
        for (const auto& [g, e] : factors_)
            p += e * g.parity();
        return p & 1;
    }

    std::vector<int> multidegree(int k) const
    {
        std::vector<int> d(k, 0);
        for (const auto& [g, e] : factors_)
            for (int slot : g.slots.slots())
                d[slot - 1] += e;
        return d;
    }

    int degree_in_slot(int s) const
    {
        int d = 0;
        for (const auto& [g, e] : factors_)
            if (g.slots.contains(s))
                d += e;
        return d;
    }

    int total_degree() const
    {
        int d = 0;
        for (const auto& [g, e] : factors_)
            d += e * g.slots.size();
        return d;
    }

    int max_slot() const
    {
        int s = 0;
        for (const auto& [g, e] : factors_)
            s = std::max(s, g.slots.max_slot());
        return s;
    }

    bool vertical_only() const
    {
        for (const auto& [g, e] : factors_)
            if (!g.is_vertical())
                return false;
        return true;
    }
    bool horizontal_only() const
    {
        for (const auto& [g, e] : factors_)
            if (g.is_vertical())
                return false;
        return true;
    }

    // graded product; nullopt if an odd generator squares to zero.
    // sign: Koszul sign of interleaving the two ordered factor lists.
    static std::optional<std::pair<int, Monomial>> merge(const Monomial& a, const Monomial& b)
    {
        Monomial r;
        int sign = 1;
        size_t i = 0, j = 0;
        // parity of the tail a[i..]
        auto tail_parity = [&](size_t from) {
            int p = 0;
            for (size_t l = from; l < a.factors_.size(); ++l)
                p += a.factors_[l].second * a.factors_[l].first.parity();
            return p & 1;
        };
        while (i < a.factors_.size() && j < b.factors_.size()) {
            const auto& fa = a.factors_[i];
            const auto& fb = b.factors_[j];
            if (fa.first == fb.first) {
                if (fa.first.parity())
                    return std::nullopt; // odd square
                r.factors_.emplace_back(fa.first, fa.second + fb.second);
                ++i;
                ++j;
            } else if (fa.first < fb.first) {
                r.factors_.push_back(fa);
                ++i;
            } else {
                if (fb.first.parity() && tail_parity(i))
                    sign = -sign;
                r.factors_.push_back(fb);
                ++j;
            }
        }
        for (; i < a.factors_.size(); ++i)
            r.factors_.push_back(a.factors_[i]);
        for (; j < b.factors_.size(); ++j)
            r.factors_.push_back(b.factors_[j]);
        return std::make_pair(sign, std::move(r));
    }

    auto operator<=>(const Monomial&) const = default;

private:
    Factors factors_;
};

// Canonical iterated differential form: sum of coefficient * monomial terms.
class FormExpr {
public:
    using Terms = std::map<Monomial, Coefficient>;

    FormExpr() = default;
    explicit FormExpr(BundleConfig cfg) : cfg_(cfg) {}
    FormExpr(BundleConfig cfg, const Coefficient& c) : cfg_(cfg)
    {
        if (!c.is_zero())
            terms_[Monomial()] = c;
    }

    static FormExpr scalar(BundleConfig cfg, const Coefficient& c) { return FormExpr(cfg, c); }
    static FormExpr generator(BundleConfig cfg, Generator g)
    {
        g.validate(cfg);
        FormExpr f(cfg);
        f.terms_[Monomial(std::move(g))] = Coefficient(1);
        return f;
    }
    static FormExpr coordinate(BundleConfig cfg, JetCoord c)
    {
        if (c.kind == JetCoord::Kind::Base)
            cfg.check_base(c.index);
        else {
            cfg.check_fiber(c.index);
            if (c.sigma.size() != cfg.n)
                throw std::domain_error("multi-index arity mismatch");
        }
        return FormExpr(cfg, Coefficient::coordinate(std::move(c)));
    }

    const BundleConfig& config() const { return cfg_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Monomial& m, const Coefficient& c)
    {
        if (c.is_zero())
            return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_[m] = c;
        } else {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    FormExpr operator+(const FormExpr& o) const
    {
        check_same_config(cfg_, o.cfg_);
        FormExpr r = *this;
        for (const auto& [m, c] : o.terms_)
            r.add_term(m, c);
        return r;
    }
    FormExpr operator-() const
    {
        FormExpr r = *this;
        for (auto& [m, c] : r.terms_)
            c = -c;
        return r;
    }
    FormExpr operator-(const FormExpr& o) const { return *this + (-o); }
    FormExpr& operator+=(const FormExpr& o) { return *this = *this + o; }
    FormExpr& operator-=(const FormExpr& o) { return *this = *this - o; }

    FormExpr scaled(const Coefficient& c) const
    {
        FormExpr r(cfg_);
        for (const auto& [m, k] : terms_)
            r.add_term(m, k * c);
        return r;
    }
    FormExpr scaled(const Rational& c) const { return scaled(Coefficient(c)); }

    bool operator==(const FormExpr& o) const { return cfg_ == o.cfg_ && terms_ == o.terms_; }

    // graded-commutative wedge product
    FormExpr wedge(const FormExpr& o) const
    {
        check_same_config(cfg_, o.cfg_);
        FormExpr r(cfg_);
        for (const auto& [ma, ca] : terms_)
            for (const auto& [mb, cb] : o.terms_) {
                auto merged = Monomial::merge(ma, mb);
                if (!merged)
                    continue;
                Coefficient c = ca * cb;
                if (merged->first < 0)
                    c = -c;
                r.add_term(merged->second, c);
            }
        return r;
    }

    // split into homogeneous multi-degree parts, ascending in multidegree
    std::vector<std::pair<std::vector<int>, FormExpr>> components() const
    {
        std::map<std::vector<int>, FormExpr> acc;
        for (const auto& [m, c] : terms_) {
            auto d = m.multidegree(cfg_.k);
            auto it = acc.find(d);
            if (it == acc.end()) {
                FormExpr f(cfg_);
                f.add_term(m, c);
                acc.emplace(std::move(d), std::move(f));
            } else {
                it->second.add_term(m, c);
            }
        }
        std::vector<std::pair<std::vector<int>, FormExpr>> out;
        out.reserve(acc.size());
        for (auto& [d, f] : acc)
            out.emplace_back(d, std::move(f));
        return out;
    }

    FormExpr component(const std::vector<int>& degree) const
    {
        FormExpr r(cfg_);
        for (const auto& [m, c] : terms_)
            if (m.multidegree(cfg_.k) == degree)
                r.add_term(m, c);
        return r;
    }

    bool is_homogeneous() const
    {
        std::optional<std::vector<int>> d;
        for (const auto& [m, c] : terms_) {
            auto md = m.multidegree(cfg_.k);
            if (!d)
                d = md;
            else if (*d != md)
                return false;
        }
        return true;
    }

    // total-degree parity; requires parity-homogeneity
    std::optional<int> parity() const
    {
        std::optional<int> p;
        for (const auto& [m, c] : terms_) {
            int mp = m.parity();
            if (!p)
                p = mp;
            else if (*p != mp)
                return std::nullopt;
        }
        return p ? p : std::optional<int>(0);
    }

    std::pair<FormExpr, FormExpr> parity_split() const // (even, odd)
    {
        FormExpr even(cfg_), odd(cfg_);
        for (const auto& [m, c] : terms_)
            (m.parity() ? odd : even).add_term(m, c);
        return {even, odd};
    }

    // the coefficient of a given monomial (zero if absent)
    Coefficient coefficient_of(const Monomial& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? Coefficient() : it->second;
    }

    bool is_coefficient() const
    {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
    }
    Coefficient as_coefficient() const
    {
        if (terms_.empty())
            return Coefficient();
        if (!is_coefficient())
            throw std::domain_error("form has generator factors, not a pure coefficient");
        return terms_.begin()->second;
    }

    int max_jet_order() const
    {
        int r = 0;
        for (const auto& [m, c] : terms_) {
            r = std::max(r, c.max_jet_order());
            for (const auto& [g, e] : m.factors())
                if (g.is_vertical())
                    r = std::max(r, g.sigma.length());
        }
        return r;
    }

private:
    BundleConfig cfg_;
    Terms terms_;
};

inline FormExpr wedge(const FormExpr& a, const FormExpr& b) { return a.wedge(b); }

} // namespace jetforms
