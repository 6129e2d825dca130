#pragma once

#include "cdiff.hpp"
#include "randomgen.hpp"

#include <iostream>
#include <string>
#include <vector>

namespace jetforms {

struct SuiteResult {
    int checked = 0;
    int failed = 0;
    bool ok() const { return failed == 0 && checked > 0; }
};

// d_m^2 = 0, pairwise anticommutation, involution and conjugation of the
// slot swap, graded commutativity of the product
inline SuiteResult axiom_suite(int samples_per_config, std::uint64_t seed,
                               int max_n = 2, int max_k = 3, std::ostream* log = nullptr)
{
    SuiteResult res;
    Rng rng(seed);
    std::vector<SlotKind> kinds{SlotKind::Vertical, SlotKind::Horizontal, SlotKind::Full};
    for (int n = 1; n <= max_n; ++n)
        for (int m = 1; m <= 2; ++m)
            for (int k = 1; k <= max_k; ++k) {
                BundleConfig cfg(n, m, k);
                RandomOptions o;
                o.max_jet = 3;
                o.max_deg = 3;
                for (int rep = 0; rep < samples_per_config; ++rep) {
                    auto w = random_form(cfg, rng, o);
                    auto a = random_form(cfg, rng, o);
                    bool good = true;
                    for (int s = 1; s <= k && good; ++s) {
                        for (auto kind : kinds)
                            if (!differential(s, kind, differential(s, kind, w)).is_zero())
                                good = false;
                        auto vh = differential(s, SlotKind::Vertical,
                                               differential(s, SlotKind::Horizontal, w)) +
                                  differential(s, SlotKind::Horizontal,
                                               differential(s, SlotKind::Vertical, w));
                        if (!vh.is_zero())
                            good = false;
                        for (int l = s + 1; l <= k && good; ++l)
                            for (auto k1 : kinds)
                                for (auto k2 : kinds) {
                                    auto anti = differential(s, k1, differential(l, k2, w)) +
                                                differential(l, k2, differential(s, k1, w));
                                    if (!anti.is_zero())
                                        good = false;
                                }
                        if (!(kappa(s, kappa(s, w)) == w))
                            good = false;
                        if (!(kappa(s, differential(1, SlotKind::Vertical, w)) ==
                              differential(s, SlotKind::Vertical, kappa(s, w))))
                            good = false;
                        if (!(kappa(s, differential(1, SlotKind::Horizontal, w)) ==
                              differential(s, SlotKind::Horizontal, kappa(s, w))))
                            good = false;
                    }
                    auto [we, wo] = w.parity_split();
                    auto [ae, ao] = a.parity_split();
                    if (!(we.wedge(ae) == ae.wedge(we)) || !(we.wedge(ao) == ao.wedge(we)) ||
                        !(wo.wedge(ao) == -ao.wedge(wo)))
                        good = false;
                    ++res.checked;
                    if (!good) {
                        ++res.failed;
                        if (log)
                            *log << "axiom failure at n=" << n << " m=" << m << " k=" << k
                                 << " rep=" << rep << "\n";
                    }
                }
            }
    return res;
}

inline KappaField random_kappa_field(const BundleConfig& cfg, Rng& rng, int parity,
                                     const RandomOptions& o = {})
{
    KappaField chi(cfg);
    for (int j = 1; j <= cfg.m; ++j)
        for (std::uint32_t mask = 0; mask < (1u << (cfg.k - 1)); ++mask) {
            if (!rng.chance(70))
                continue;
            SlotSet K(mask);
            auto v = random_cstar_homogeneous(cfg, rng, (parity + K.parity()) & 1, o);
            if (!v.is_zero())
                chi.set(j, K, v);
        }
    return chi;
}

// restrict(prolong) = id and commutation with total derivatives
inline SuiteResult prolongation_suite(int samples, std::uint64_t seed,
                                      std::ostream* log = nullptr)
{
    SuiteResult res;
    Rng rng(seed);
    for (int i = 0; i < samples; ++i) {
        int k = 1 + i % 3;
        BundleConfig cfg(1 + (i % 2), 1 + (i % 2), k);
        auto chi = random_kappa_field(cfg, rng, i & 1);
        bool good = restrict_derivation(prolong(chi)) == chi;
        auto E = prolong(chi);
        RandomOptions o;
        o.vertical_only = true;
        o.max_slot = cfg.k - 1;
        auto w =
            k == 1 ? FormExpr(cfg, random_coefficient(cfg, rng)) : random_form(cfg, rng, o);
        for (int mu = 1; mu <= cfg.n && good; ++mu)
            if (!(apply_derivation(E, total_derivative(w, mu)) ==
                  total_derivative(apply_derivation(E, w), mu)))
                good = false;
        ++res.checked;
        if (!good) {
            ++res.failed;
            if (log)
                *log << "prolongation failure at sample " << i << "\n";
        }
    }
    return res;
}

// adjoint involutivity and composition reversal on random operators
inline SuiteResult adjoint_suite(int samples, std::uint64_t seed, int max_order = 3,
                                 std::ostream* log = nullptr)
{
    SuiteResult res;
    Rng rng(seed);
    for (int i = 0; i < samples; ++i) {
        int k = 1 + i % 3;
        BundleConfig cfg(1, 1, k);
        auto km = kappa_module(cfg);
        auto gm = scalar_module(cfg);
        RandomOptions o;
        o.max_jet = 2;
        o.max_deg = 2;
        o.vertical_only = true;
        o.max_slot = cfg.k - 1;

        auto rand_op = [&](const HModulePtr& s, const HModulePtr& t, int parity) {
            CDiffOp op(cfg, s, t);
            for (int ii = 0; ii < t->rank(); ++ii)
                for (int a = 0; a < s->rank(); ++a) {
                    if (!rng.chance(60))
                        continue;
                    auto sigma = random_multiindex(cfg, rng, max_order);
                    int want = (parity + s->parity(a) + t->parity(ii)) & 1;
                    auto e = random_cstar_homogeneous(cfg, rng, want, o);
                    if (!e.is_zero())
                        op.add_entry(ii, a, sigma, e);
                }
            return op;
        };

        int px = (k > 1) ? i & 1 : 0;
        int py = (k > 1) ? (i >> 1) & 1 : 0;
        auto X = rand_op(km, gm, px);
        auto Y = rand_op(gm, km, py);
        bool good = adjoint(adjoint(X)) == X && adjoint(adjoint(Y)) == Y;
        auto lhs = adjoint(compose(X, Y));
        auto rhs = compose(adjoint(Y), adjoint(X));
        if (px && py)
            rhs = -rhs;
        if (!(lhs == rhs))
            good = false;
        ++res.checked;
        if (!good) {
            ++res.failed;
            if (log)
                *log << "adjoint failure at sample " << i << "\n";
        }
    }
    return res;
}

// quick end-to-end self test used by the command line tool
inline bool run_selfcheck(bool quick, std::uint64_t seed, std::ostream& out)
{
    int n = quick ? 3 : 10;
    bool ok = true;
    auto report = [&](const char* name, const SuiteResult& r) {
        out << (r.ok() ? "[ok]   " : "[FAIL] ") << name << " (" << r.checked << " samples)\n";
        ok = ok && r.ok();
    };
    report("differential axioms", axiom_suite(n, seed, 2, quick ? 2 : 3, &out));
    report("prolongation", prolongation_suite(4 * n, seed + 1, &out));
    report("adjoint calculus", adjoint_suite(4 * n, seed + 2, quick ? 2 : 3, &out));
    return ok;
}

} // namespace jetforms
