#pragma once

#include "calculus.hpp"

#include <random>

namespace jetforms {

// Deterministic RNG wrapper. mt19937_64 output is standardized; avoid
// std::uniform_int_distribution so streams are identical across libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    int uniform(int lo, int hi) // inclusive
    {
        if (hi <= lo)
            return lo;
        return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(int percent) { return uniform(1, 100) <= percent; }
    Rational small_rational(int max_abs = 3)
    {
        int n = uniform(-max_abs, max_abs);
        if (n == 0)
            n = 1;
        int d = uniform(1, 2);
        return Rational(n, d);
    }
    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

struct RandomOptions {
    int max_jet = 2;
    int max_deg = 2;     // polynomial degree of coefficients
    int max_terms = 3;   // additive terms in a form
    int max_factors = 2; // generator factors per monomial
    int max_slot = 0;    // 0 means all slots 1..k
    bool vertical_only = false;
    bool coeffs_on_xu = false;
};

inline MultiIndex random_multiindex(const BundleConfig& cfg, Rng& rng, int max_len)
{
    std::vector<int> e(cfg.n, 0);
    int len = rng.uniform(0, max_len);
    for (int i = 0; i < len; ++i)
        e[rng.uniform(0, cfg.n - 1)] += 1;
    return MultiIndex(e);
}

inline Coefficient random_coefficient(const BundleConfig& cfg, Rng& rng,
                                      const RandomOptions& o = {})
{
    Polynomial p;
    int terms = rng.uniform(1, 2);
    for (int t = 0; t < terms; ++t) {
        Polynomial mono(rng.small_rational());
        int deg = rng.uniform(0, o.max_deg);
        for (int d = 0; d < deg; ++d) {
            JetCoord c;
            if (rng.chance(40))
                c = JetCoord::base(rng.uniform(1, cfg.n));
            else
                c = JetCoord::fiber(rng.uniform(1, cfg.m),
                                    random_multiindex(cfg, rng, o.coeffs_on_xu ? 0 : o.max_jet));
            mono *= Polynomial::variable(Var::coord(c));
        }
        p += mono;
    }
    return Coefficient(p);
}

inline Generator random_generator(const BundleConfig& cfg, Rng& rng, const RandomOptions& o = {})
{
    int kmax = o.max_slot > 0 ? o.max_slot : cfg.k;
    SlotSet s;
    int size = rng.uniform(1, std::min(2, kmax));
    while (s.size() < size)
        s = s.with(rng.uniform(1, kmax));
    bool vertical = o.vertical_only || rng.chance(60);
    if (vertical)
        return Generator::vertical(rng.uniform(1, cfg.m), random_multiindex(cfg, rng, o.max_jet),
                                   s);
    return Generator::horizontal(rng.uniform(1, cfg.n), s);
}

inline FormExpr random_form(const BundleConfig& cfg, Rng& rng, const RandomOptions& o = {})
{
    FormExpr f(cfg);
    int terms = rng.uniform(1, o.max_terms);
    for (int t = 0; t < terms; ++t) {
        FormExpr term(cfg, random_coefficient(cfg, rng, o));
        int nf = rng.uniform(0, o.max_factors);
        for (int i = 0; i < nf; ++i)
            term = term.wedge(FormExpr::generator(cfg, random_generator(cfg, rng, o)));
        f += term;
    }
    return f;
}

// homogeneous vertical form with slots in 1..k-1 and the requested parity
inline FormExpr random_cstar_homogeneous(const BundleConfig& cfg, Rng& rng, int parity,
                                         const RandomOptions& o = {})
{
    RandomOptions opts = o;
    opts.vertical_only = true;
    opts.max_slot = cfg.k - 1;
    FormExpr f(cfg);
    if (cfg.k == 1)
        return parity == 0 ? FormExpr(cfg, random_coefficient(cfg, rng, opts)) : f;
    int terms = rng.uniform(1, std::max(1, o.max_terms - 1));
    for (int t = 0; t < terms; ++t) {
        FormExpr term(cfg, random_coefficient(cfg, rng, opts));
        for (int tries = 0; tries < 8; ++tries) {
            auto p = term.parity();
            if (p && *p == parity)
                break;
            term = term.wedge(FormExpr::generator(cfg, random_generator(cfg, rng, opts)));
        }
        auto p = term.parity();
        if (p && *p == parity)
            f += term;
    }
    return f;
}

} // namespace jetforms
