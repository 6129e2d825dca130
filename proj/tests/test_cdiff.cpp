#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace jetforms;
using namespace jetforms::testutil;

namespace {

FormExpr fc(const BundleConfig& cfg, int j, std::vector<int> sigma)
{
    return FormExpr::coordinate(cfg, JetCoord::fiber(j, MultiIndex(std::move(sigma))));
}

ModuleElement ground_element(const BundleConfig& cfg, const FormExpr& v)
{
    ModuleElement e(cfg, scalar_module(cfg));
    e.set(0, v);
    return e;
}

CDiffOp Dop(const BundleConfig& cfg, std::vector<int> sigma)
{
    std::map<MultiIndex, FormExpr> entries;
    entries[MultiIndex(std::move(sigma))] = FormExpr(cfg, Coefficient(1));
    return CDiffOp::scalar(cfg, entries);
}

CDiffOp mult_op(const BundleConfig& cfg, const FormExpr& a)
{
    std::map<MultiIndex, FormExpr> entries;
    entries[MultiIndex::zero(cfg.n)] = a;
    return CDiffOp::scalar(cfg, entries);
}

} // namespace

TEST_CASE("apply examples")
{
    BundleConfig cfg(1, 1, 1);
    auto u = fc(cfg, 1, {0});

    // D_1 applied to u gives u_(1)
    REQUIRE(apply_op(Dop(cfg, {1}), ground_element(cfg, u)) ==
            ground_element(cfg, fc(cfg, 1, {1})));

    // zeroth order multiplication
    REQUIRE(apply_op(mult_op(cfg, u), ground_element(cfg, fc(cfg, 1, {2}))) ==
            ground_element(cfg, u.wedge(fc(cfg, 1, {2}))));

    // (u D_1 + u_1) applied to u^2 = 3 u^2 u_1
    auto op = compose(mult_op(cfg, u), Dop(cfg, {1})) + mult_op(cfg, fc(cfg, 1, {1}));
    auto val = apply_op(op, ground_element(cfg, u.wedge(u)));
    auto expect = u.wedge(u).wedge(fc(cfg, 1, {1})).scaled(Rational(3));
    REQUIRE(val == ground_element(cfg, expect));
}

TEST_CASE("compose is Leibniz expansion and matches application")
{
    BundleConfig cfg(1, 1, 1);
    auto u = fc(cfg, 1, {0});
    auto u1 = fc(cfg, 1, {1});

    // D_1 after multiplication by u
    auto c = compose(Dop(cfg, {1}), mult_op(cfg, u));
    auto expect = compose(mult_op(cfg, u), Dop(cfg, {1})) + mult_op(cfg, u1);
    REQUIRE(c == expect);

    auto id = CDiffOp::identity(cfg, scalar_module(cfg));
    REQUIRE(compose(id, c) == c);
    REQUIRE(compose(c, id) == c);

    Rng rng(606);
    for (int k = 1; k <= 2; ++k) {
        BundleConfig cf(1, 1, k);
        auto km = kappa_module(cf);
        auto gm = scalar_module(cf);
        for (int rep = 0; rep < 6; ++rep) {
            auto X = random_cdiff(cf, rng, km, gm, 2, rep & 1);
            auto Y = random_cdiff(cf, rng, gm, km, 2, (rep >> 1) & 1);
            auto Z = random_cdiff(cf, rng, gm, gm, 1, 0);
            // associativity
            REQUIRE(compose(compose(X, Y), Z) == compose(X, compose(Y, Z)));
            // application consistency
            auto p = random_element(cf, rng, gm, rep & 1);
            REQUIRE(apply_op(compose(X, Y), p) == apply_op(X, apply_op(Y, p)));
        }
    }
}

TEST_CASE("adjoint closed forms")
{
    BundleConfig cfg(1, 1, 1);
    auto u = fc(cfg, 1, {0});
    auto u1 = fc(cfg, 1, {1});

    auto adjD = adjoint(Dop(cfg, {1}));
    // adjoint(D) = -D as a matrix over the dual pair
    REQUIRE(adjD.entry(0, 0, MultiIndex({1})) == -FormExpr(cfg, Coefficient(1)));
    REQUIRE(adjD.entry(0, 0, MultiIndex({0})).is_zero());

    // even zeroth-order operators are self-adjoint
    auto adjM = adjoint(mult_op(cfg, u));
    REQUIRE(adjM.entry(0, 0, MultiIndex({0})) == u);

    // adjoint(u D_1) = -u D_1 - u_1
    auto adjUD = adjoint(compose(mult_op(cfg, u), Dop(cfg, {1})));
    REQUIRE(adjUD.entry(0, 0, MultiIndex({1})) == -u);
    REQUIRE(adjUD.entry(0, 0, MultiIndex({0})) == -u1);
}

TEST_CASE("adjoint involutivity and reversal")
{
    Rng rng(909);
    for (int k = 1; k <= 3; ++k) {
        BundleConfig cfg(1, 1, k);
        auto km = kappa_module(cfg);
        auto gm = scalar_module(cfg);
        auto ht = htop_module(cfg);
        std::vector<std::pair<HModulePtr, HModulePtr>> shapes = {
            {gm, gm}, {km, gm}, {km, ht}, {km, km}};
        for (int rep = 0; rep < 8; ++rep) {
            auto& [src, dst] = shapes[rep % shapes.size()];
            int parity = (k > 1) ? rep & 1 : 0;
            auto X = random_cdiff(cfg, rng, src, dst, 3, parity);
            if (X.is_zero())
                continue;
            REQUIRE(adjoint(adjoint(X)) == X);
        }
        // reversal with the Koszul sign
        for (int rep = 0; rep < 6; ++rep) {
            int px = (k > 1) ? rep & 1 : 0;
            int py = (k > 1) ? (rep >> 1) & 1 : 0;
            auto X = random_cdiff(cfg, rng, km, gm, 2, px);
            auto Y = random_cdiff(cfg, rng, gm, km, 2, py);
            auto lhs = adjoint(compose(X, Y));
            auto rhs = compose(adjoint(Y), adjoint(X));
            if (px && py)
                rhs = -rhs;
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("green witness")
{
    Rng rng(111);
    int checked = 0;
    for (int k = 1; k <= 2; ++k) {
        BundleConfig cfg(1, 1, k);
        auto km = kappa_module(cfg);
        auto gm = scalar_module(cfg);
        for (int rep = 0; rep < 8; ++rep) {
            int px = (k > 1) ? rep & 1 : 0;
            auto X = random_cdiff(cfg, rng, km, gm, 2, px);
            if (X.is_zero() || !X.parity())
                continue;
            auto p = random_element(cfg, rng, km, rng.uniform(0, k - 1));
            auto psi = random_element(cfg, rng, dual_module(gm), rng.uniform(0, k - 1));
            if (!p.parity() || !psi.parity())
                continue;
            auto w = green_witness(X, p, psi);
            REQUIRE(w.reduction_ok);
            REQUIRE(w.adjoint_ok);
            REQUIRE(w.exact_ok);
            ++checked;
        }
    }
    REQUIRE(checked >= 10);

    // two base dimensions exercise the divergence assembly
    BundleConfig cfg(2, 1, 1);
    auto gm = scalar_module(cfg);
    for (int rep = 0; rep < 5; ++rep) {
        auto X = random_cdiff(cfg, rng, gm, gm, 2, 0);
        if (X.is_zero())
            continue;
        auto p = random_element(cfg, rng, gm, 0);
        auto psi = random_element(cfg, rng, dual_module(gm), 0);
        auto w = green_witness(X, p, psi);
        REQUIRE(w.ok());
    }
}

TEST_CASE("linearization")
{
    BundleConfig cfg(1, 1, 1);
    auto u = fc(cfg, 1, {0});
    auto u1 = fc(cfg, 1, {1});
    auto u2 = fc(cfg, 1, {2});

    // l_{u u1} = u1 + u D_1
    {
        ModuleElement xi = ground_element(cfg, u.wedge(u1));
        auto L = linearization(xi);
        REQUIRE(L.entry(0, 0, MultiIndex({0})) == u1);
        REQUIRE(L.entry(0, 0, MultiIndex({1})) == u);
    }
    // l_{u2} = D_1^2
    {
        ModuleElement xi = ground_element(cfg, u2);
        auto L = linearization(xi);
        REQUIRE(L.entry(0, 0, MultiIndex({2})) == FormExpr(cfg, Coefficient(1)));
        REQUIRE(L.entry(0, 0, MultiIndex({0})).is_zero());
    }
    // constants have zero linearization
    {
        ModuleElement xi = ground_element(
            cfg, FormExpr::coordinate(cfg, JetCoord::base(1)).scaled(Rational(5)));
        REQUIRE(linearization(xi).is_zero());
    }

    // apply(lin(xi), chi) = (-1)^{|xi||chi|} E_chi(xi) on random data
    Rng rng(2024);
    for (int k = 1; k <= 2; ++k) {
        BundleConfig cf(1, 2, k);
        auto km = kappa_module(cf);
        for (int rep = 0; rep < 8; ++rep) {
            int pxi = (k > 1) ? rep & 1 : 0;
            int pchi = (k > 1) ? (rep >> 1) & 1 : 0;
            auto xi = random_element(cf, rng, km, pxi);
            auto chi = random_kappa(cf, rng, pchi);
            if (chi.is_zero())
                continue;
            auto lhs = apply_op(linearization(xi), to_element(chi));
            auto rhs = act_horizontal(chi, xi);
            if (pxi && pchi)
                rhs = -rhs;
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("horizontal action is well-defined on decompositions")
{
    BundleConfig cfg(1, 1, 2);
    Rng rng(42);
    auto km = kappa_module(cfg);
    auto chi = random_kappa(cfg, rng, 1);
    // f in C^inf(M): E_chi(f . w) = f . E_chi(w)
    auto f = Coefficient::coordinate(JetCoord::base(1));
    auto xi = random_element(cfg, rng, km, 0);
    REQUIRE(act_horizontal(chi, xi.scaled(f)) == act_horizontal(chi, xi).scaled(f));
    // E_chi(1 tensor xi0) = 0 for constant components
    ModuleElement unit(cfg, km);
    unit.set(0, FormExpr(cfg, Coefficient(1)));
    REQUIRE(act_horizontal(chi, unit).is_zero());
}

TEST_CASE("berezinian embedding")
{
    for (int n = 1; n <= 2; ++n)
        for (int k = 1; k <= 2; ++k) {
            BundleConfig cfg(n, 1, k);
            BElement one{cfg, FormExpr(cfg, Coefficient(1))};
            REQUIRE(embed_B(one) == top_horizontal(cfg));
            // embedded elements are d_k^h closed
            Rng rng(n * 10 + k);
            for (int rep = 0; rep < 5; ++rep) {
                RandomOptions o;
                o.vertical_only = true;
                o.max_slot = cfg.k - 1;
                auto w = k == 1 ? FormExpr(cfg, random_coefficient(cfg, rng))
                                : random_form(cfg, rng, o);
                BElement b{cfg, w};
                REQUIRE(differential(cfg.k, SlotKind::Horizontal, embed_B(b)).is_zero());
                // injectivity: embed(b) = 0 iff scalar = 0
                REQUIRE(embed_B(b).is_zero() == w.is_zero());
            }
        }
}

TEST_CASE("kappa module indexing")
{
    BundleConfig cfg(1, 2, 3);
    auto km = kappa_module(cfg);
    for (int idx = 0; idx < km->rank(); ++idx) {
        auto [j, K] = kappa_decode(cfg, idx);
        REQUIRE(kappa_index(cfg, j, K) == idx);
        REQUIRE(km->parity(idx) == K.parity());
    }
    REQUIRE(km->rank() == cfg.m * 4);

    // kappa field round trip through module elements
    Rng rng(3);
    auto chi = random_kappa(cfg, rng, 1);
    REQUIRE(to_kappa(to_element(chi)) == chi);
}

TEST_CASE("w composed with itself vanishes on applications")
{
    BundleConfig cfg(1, 1, 2);
    Rng rng(55);
    auto km = kappa_module(cfg);
    for (int rep = 0; rep < 5; ++rep) {
        auto X = random_cdiff(cfg, rng, km, scalar_module(cfg), 2, rep & 1);
        auto p = random_element(cfg, rng, km, 0);
        auto v = apply_op(X, p)[0].wedge(top_horizontal_without(cfg, 1));
        auto w1 = differential(cfg.k, SlotKind::Horizontal, v);
        REQUIRE(differential(cfg.k, SlotKind::Horizontal, w1).is_zero());
    }
}
