#include "jetforms/randomgen.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace jetforms;

namespace {

FormExpr theta(const BundleConfig& cfg, int j, std::vector<int> sigma, std::initializer_list<int> S)
{
    return FormExpr::generator(
        cfg, Generator::vertical(j, MultiIndex(std::move(sigma)), SlotSet::of(S)));
}
FormExpr dx(const BundleConfig& cfg, int mu, std::initializer_list<int> S)
{
    return FormExpr::generator(cfg, Generator::horizontal(mu, SlotSet::of(S)));
}

} // namespace

TEST_CASE("odd generators square to zero and anticommute")
{
    BundleConfig cfg(1, 1, 1);
    auto th = theta(cfg, 1, {0}, {1});
    REQUIRE(th.wedge(th).is_zero());

    auto th2 = theta(cfg, 1, {1}, {1});
    REQUIRE((th.wedge(th2) + th2.wedge(th)).is_zero());

    // dx ^ dx = 0 with k=1
    auto d = dx(cfg, 1, {1});
    REQUIRE(d.wedge(d).is_zero());
}

TEST_CASE("even-parity generators commute with themselves")
{
    BundleConfig cfg(1, 1, 2);
    auto g = dx(cfg, 1, {1, 2}); // |S| = 2, even
    auto sq = g.wedge(g);
    REQUIRE_FALSE(sq.is_zero());
    REQUIRE(sq.terms().size() == 1);
    REQUIRE(sq.terms().begin()->first.factors().front().second == 2);
}

TEST_CASE("wedge unit and mixed-coefficient reordering")
{
    BundleConfig cfg(1, 1, 1);
    auto u = FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({0})));
    auto th = theta(cfg, 1, {0}, {1});
    auto d = dx(cfg, 1, {1});

    REQUIRE(FormExpr(cfg, Coefficient(1)).wedge(d) == d);

    // theta and dx are both odd: swapping them flips the sign
    auto lhs = u.wedge(d).wedge(th);
    auto rhs = u.wedge(th).wedge(d);
    REQUIRE(lhs == -rhs);
}

TEST_CASE("graded commutativity and associativity on random forms")
{
    Rng rng(20250809);
    for (int n = 1; n <= 2; ++n)
        for (int k = 1; k <= 3; ++k) {
            BundleConfig cfg(n, 2, k);
            for (int rep = 0; rep < 12; ++rep) {
                auto a = random_form(cfg, rng);
                auto b = random_form(cfg, rng);
                auto c = random_form(cfg, rng);
                REQUIRE(a.wedge(b).wedge(c) == a.wedge(b.wedge(c)));
                auto [ae, ao] = a.parity_split();
                auto [be, bo] = b.parity_split();
                REQUIRE(ae.wedge(be) == be.wedge(ae));
                REQUIRE(ae.wedge(bo) == bo.wedge(ae));
                REQUIRE(ao.wedge(bo) == -bo.wedge(ao));
            }
        }
}

TEST_CASE("multidegree is additive under wedge")
{
    Rng rng(7);
    for (int k = 1; k <= 3; ++k) {
        BundleConfig cfg(2, 2, k);
        for (int rep = 0; rep < 20; ++rep) {
            auto g1 = FormExpr::generator(cfg, random_generator(cfg, rng));
            auto g2 = FormExpr::generator(cfg, random_generator(cfg, rng));
            auto w = g1.wedge(g2);
            if (w.is_zero())
                continue;
            auto d1 = g1.terms().begin()->first.multidegree(k);
            auto d2 = g2.terms().begin()->first.multidegree(k);
            for (auto& [deg, part] : w.components())
                for (int s = 0; s < k; ++s)
                    REQUIRE(deg[s] == d1[s] + d2[s]);
        }
    }
}

TEST_CASE("components recombine and zero form has none")
{
    BundleConfig cfg(1, 1, 1);
    REQUIRE(FormExpr(cfg).components().empty());

    auto u = FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({0})));
    auto d = dx(cfg, 1, {1});
    auto a = u + u.wedge(d);
    auto comps = a.components();
    REQUIRE(comps.size() == 2);
    REQUIRE(comps[0].first == std::vector<int>{0});
    REQUIRE(comps[0].second == u);
    REQUIRE(comps[1].first == std::vector<int>{1});
    REQUIRE(comps[1].second == u.wedge(d));

    Rng rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        BundleConfig c2(2, 2, 2);
        auto f = random_form(c2, rng);
        FormExpr sum(c2);
        for (auto& [deg, part] : f.components()) {
            REQUIRE(part.is_homogeneous());
            sum += part;
        }
        REQUIRE(sum == f);
    }
}

TEST_CASE("mixed bundle configs are rejected")
{
    BundleConfig a(1, 1, 1), b(2, 1, 1);
    auto fa = FormExpr::coordinate(a, JetCoord::fiber(1, MultiIndex({0})));
    auto fb = FormExpr::coordinate(b, JetCoord::fiber(1, MultiIndex({0, 0})));
    REQUIRE_THROWS_AS(fa.wedge(fb), std::invalid_argument);
    REQUIRE_THROWS_AS(fa + fb, std::invalid_argument);
}

TEST_CASE("slot bounds are enforced")
{
    BundleConfig cfg(1, 1, 2);
    REQUIRE_THROWS_AS(
        FormExpr::generator(cfg, Generator::vertical(1, MultiIndex({0}), SlotSet::of({3}))),
        std::domain_error);
}
