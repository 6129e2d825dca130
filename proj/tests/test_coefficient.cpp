#include "jetforms/calculus.hpp"
#include "jetforms/coefficient.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>

using namespace jetforms;

namespace {

Coefficient u(int j = 1, std::vector<int> sigma = {0})
{
    return Coefficient::coordinate(JetCoord::fiber(j, MultiIndex(std::move(sigma))));
}
Coefficient x(int mu = 1) { return Coefficient::coordinate(JetCoord::base(mu)); }

} // namespace

TEST_CASE("polynomial arithmetic and canonical form")
{
    auto p = u() * u() + Coefficient(2) * x();
    auto q = Coefficient(2) * x() + u() * u();
    REQUIRE(p == q);
    REQUIRE((p - q).is_zero());
    REQUIRE((p * Coefficient(0)).is_zero());

    auto r = (u() + x()) * (u() - x());
    REQUIRE(r == u() * u() - x() * x());
}

TEST_CASE("partial derivatives")
{
    BundleConfig cfg(1, 1, 1);
    auto u1 = Coefficient::coordinate(JetCoord::fiber(1, MultiIndex({1})));

    // d(u1^2/2)/du1 = u1
    auto f = u1 * u1 * Coefficient(Rational(1, 2));
    REQUIRE(f.partial(JetCoord::fiber(1, MultiIndex({1}))) == u1);

    // dx/du = 0
    REQUIRE(x().partial(JetCoord::fiber(1, MultiIndex({0}))).is_zero());

    // product rule
    auto g = u() * u1;
    auto dg = g.partial(JetCoord::fiber(1, MultiIndex({0})));
    REQUIRE(dg == u1);
}

TEST_CASE("opaque symbols carry formal partials")
{
    auto& reg = SymbolRegistry::instance();
    int id = reg.register_symbol(
        "f", {JetCoord::base(1), JetCoord::fiber(1, MultiIndex({0}))});
    auto f = Coefficient::variable(Var::opaque(id, {0, 0}));
    auto fu = f.partial(JetCoord::fiber(1, MultiIndex({0})));
    REQUIRE(fu == Coefficient::variable(Var::opaque(id, {0, 1})));
    REQUIRE(fu.partial(JetCoord::base(1)) ==
            Coefficient::variable(Var::opaque(id, {1, 1})));
    REQUIRE(f.partial(JetCoord::fiber(1, MultiIndex({1}))).is_zero());

    // chain rule through the total derivative: D_x f(x,u) = f_x + u_(1) f_u
    BundleConfig cfg(1, 1, 1);
    auto u1 = Coefficient::coordinate(JetCoord::fiber(1, MultiIndex({1})));
    auto Df = total_derivative(cfg, f, 1);
    REQUIRE(Df == Coefficient::variable(Var::opaque(id, {1, 0})) +
                      u1 * Coefficient::variable(Var::opaque(id, {0, 1})));
}

TEST_CASE("rational function normalization")
{
    auto num = u() * u() - x() * x();
    auto den = u() - x();
    Coefficient q(num.num(), den.num());
    REQUIRE(q == u() + x());

    Coefficient half(Rational(1, 2));
    REQUIRE((half + half) == Coefficient(1));

    // cross-multiplied equality after reduction
    Coefficient a(u().num(), (u() * u()).num());
    Coefficient b(Coefficient(1).num(), u().num());
    REQUIRE(a == b);

    // quotient rule: d(1/u)/du = -1/u^2
    auto inv = Coefficient(Coefficient(1).num(), u().num());
    auto dinv = inv.partial(JetCoord::fiber(1, MultiIndex({0})));
    REQUIRE(dinv == Coefficient((-Coefficient(1)).num(), (u() * u()).num()));
}

TEST_CASE("symbol registry is safe under concurrent use")
{
    auto& reg = SymbolRegistry::instance();
    std::vector<std::thread> workers;
    std::atomic<bool> ok{true};
    for (int w = 0; w < 8; ++w)
        workers.emplace_back([&, w] {
            BundleConfig cfg(1, 1, 1);
            for (int i = 0; i < 50; ++i) {
                int id = reg.register_symbol("shared" + std::to_string(i % 5),
                                             {JetCoord::base(1)});
                auto f = Coefficient::variable(Var::opaque(id, {0}));
                auto d = total_derivative(cfg, f, 1);
                if (d != Coefficient::variable(Var::opaque(id, {1})))
                    ok = false;
                (void)w;
            }
        });
    for (auto& t : workers)
        t.join();
    REQUIRE(ok);
    REQUIRE_THROWS_AS(reg.register_symbol("shared0", {JetCoord::fiber(1, MultiIndex({0}))}),
                      std::invalid_argument);
}

TEST_CASE("total derivative on coefficients")
{
    BundleConfig cfg(2, 1, 1);
    // D_1 u = u_(1,0)
    auto uu = Coefficient::coordinate(JetCoord::fiber(1, MultiIndex({0, 0})));
    REQUIRE(total_derivative(cfg, uu, 1) ==
            Coefficient::coordinate(JetCoord::fiber(1, MultiIndex({1, 0}))));
    // D_2 x1 = 0
    auto x1 = Coefficient::coordinate(JetCoord::base(1));
    REQUIRE(total_derivative(cfg, x1, 2).is_zero());
    REQUIRE(total_derivative(cfg, x1, 1) == Coefficient(1));
}
