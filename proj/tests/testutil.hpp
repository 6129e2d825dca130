#pragma once

#include "jetforms/cdiff.hpp"
#include "jetforms/randomgen.hpp"

namespace jetforms::testutil {

inline KappaField random_kappa(const BundleConfig& cfg, Rng& rng, int parity,
                               RandomOptions o = {})
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

inline CDiffOp random_cdiff(const BundleConfig& cfg, Rng& rng, const HModulePtr& src,
                            const HModulePtr& dst, int max_ord, int parity,
                            RandomOptions o = {})
{
    CDiffOp op(cfg, src, dst);
    bool nonempty = false;
    for (int tries = 0; tries < 3 && !nonempty; ++tries) {
        for (int i = 0; i < dst->rank(); ++i)
            for (int a = 0; a < src->rank(); ++a) {
                if (!rng.chance(60))
                    continue;
                int cnt = rng.uniform(1, 2);
                for (int c = 0; c < cnt; ++c) {
                    auto sigma = random_multiindex(cfg, rng, max_ord);
                    int want = (parity + src->parity(a) + dst->parity(i)) & 1;
                    auto entry = random_cstar_homogeneous(cfg, rng, want, o);
                    if (!entry.is_zero()) {
                        op.add_entry(i, a, sigma, entry);
                        nonempty = true;
                    }
                }
            }
    }
    return op;
}

inline ModuleElement random_element(const BundleConfig& cfg, Rng& rng, const HModulePtr& mod,
                                    int parity, RandomOptions o = {})
{
    ModuleElement e(cfg, mod);
    for (int i = 0; i < mod->rank(); ++i) {
        auto v = random_cstar_homogeneous(cfg, rng, (parity + mod->parity(i)) & 1, o);
        if (!v.is_zero())
            e.set(i, v);
    }
    return e;
}

} // namespace jetforms::testutil
