#include "jetforms/parser.hpp"
#include "jetforms/printer.hpp"
#include "jetforms/randomgen.hpp"
#include "jetforms/serialize.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace jetforms;

TEST_CASE("parser recognizes the grammar")
{
    BundleConfig cfg(1, 1, 1);

    // Cartan generator
    auto th = parse_form(cfg, "dv[1](u1)");
    REQUIRE(th ==
            FormExpr::generator(cfg, Generator::vertical(1, MultiIndex({0}), SlotSet::of({1}))));

    // the worked product
    BundleConfig c2(2, 1, 1);
    auto f = parse_form(c2, "1/2 * u1_(2,0)^2 * d[1](x1) ^ d[1](x2)");
    auto u20 = FormExpr::coordinate(c2, JetCoord::fiber(1, MultiIndex({2, 0})));
    auto expect = u20.wedge(u20)
                      .scaled(Rational(1, 2))
                      .wedge(FormExpr::generator(c2, Generator::horizontal(1, SlotSet::of({1}))))
                      .wedge(FormExpr::generator(c2, Generator::horizontal(2, SlotSet::of({1}))));
    REQUIRE(f == expect);

    // differentials evaluate during parsing
    REQUIRE(parse_form(cfg, "d[1](u1) - dv[1](u1) - dh[1](u1)").is_zero());
    BundleConfig ck(1, 1, 2);
    REQUIRE(parse_form(ck, "kappa[2](d[1](x1))") ==
            FormExpr::generator(ck, Generator::horizontal(1, SlotSet::of({2}))));

    // unary minus, powers, parentheses
    REQUIRE(parse_form(cfg, "-u1 + u1").is_zero());
    REQUIRE(parse_form(cfg, "(u1 + x1)^2") ==
            parse_form(cfg, "u1^2 + 2*u1*x1 + x1^2"));
}

TEST_CASE("parser reports errors with positions")
{
    BundleConfig cfg(1, 1, 2);
    REQUIRE_THROWS_AS(parse_form(cfg, "dv[3](u1)"), ParseError);
    REQUIRE_THROWS_AS(parse_form(cfg, "u2"), ParseError);
    REQUIRE_THROWS_AS(parse_form(cfg, "u1_(1,2)"), ParseError);
    REQUIRE_THROWS_AS(parse_form(cfg, "u1 +"), ParseError);
    REQUIRE_THROWS_AS(parse_form(cfg, "q"), ParseError);
    try {
        parse_form(cfg, "dv[3](u1)");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 1);
        REQUIRE(std::string(e.what()).find("slot 3 exceeds k=2") != std::string::npos);
    }
}

TEST_CASE("print and parse are mutually inverse on random forms")
{
    Rng rng(13579);
    for (int n = 1; n <= 2; ++n)
        for (int k = 1; k <= 2; ++k) {
            BundleConfig cfg(n, 2, k);
            for (int rep = 0; rep < 15; ++rep) {
                auto f = random_form(cfg, rng);
                auto txt = print_text(f);
                auto g = parse_form(cfg, txt);
                REQUIRE(g == f);
                REQUIRE(print_text(g) == txt);
            }
        }
}

TEST_CASE("operator grammar")
{
    BundleConfig cfg(1, 1, 1);
    auto op = parse_operator(cfg, "u1*D(1) + u1_(1)");
    REQUIRE(op.entry(0, 0, MultiIndex({1})) ==
            FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({0}))));
    REQUIRE(op.entry(0, 0, MultiIndex({0})) ==
            FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({1}))));
    REQUIRE(print_operator(op) == "u1_(1) + u1*D(1)");

    BundleConfig c2(2, 1, 1);
    auto op2 = parse_operator(c2, "D(2,0) - 3/2*x2*D(0,1)");
    REQUIRE(op2.entry(0, 0, MultiIndex({2, 0})) == FormExpr(c2, Coefficient(1)));
}

TEST_CASE("golden corpus round trips")
{
    namespace fs = std::filesystem;
    fs::path dir = JETFORMS_GOLDEN_DIR;
    int count = 0;
    for (auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".txt")
            continue;
        std::ifstream in(entry.path());
        int n, m, k;
        in >> n >> m >> k;
        std::string line, input, expect;
        std::getline(in, line);
        std::getline(in, input);
        std::getline(in, expect);
        BundleConfig cfg(n, m, k);
        auto f = parse_form(cfg, input);
        REQUIRE(print_text(f) == expect);
        // idempotence on the canonical print
        auto g = parse_form(cfg, expect);
        REQUIRE(g == f);
        REQUIRE(print_text(g) == expect);
        ++count;
    }
    REQUIRE(count == 100);
}

TEST_CASE("structured serialization round trips")
{
    Rng rng(24680);
    for (int k = 1; k <= 2; ++k) {
        BundleConfig cfg(2, 1, k);
        for (int rep = 0; rep < 8; ++rep) {
            auto f = random_form(cfg, rng);
            auto j = to_json(f);
            REQUIRE(form_from_json(j) == f);
            // byte stability of the document itself
            REQUIRE(to_json(form_from_json(j)).dump() == j.dump());
        }
    }

    // opaque symbols survive the round trip
    auto& reg = SymbolRegistry::instance();
    int id = reg.register_symbol("flux", {JetCoord::base(1), JetCoord::fiber(1, MultiIndex({0}))});
    BundleConfig cfg(1, 1, 1);
    auto f = FormExpr(cfg, Coefficient::variable(Var::opaque(id, {1, 0})));
    REQUIRE(form_from_json(to_json(f)) == f);
}

TEST_CASE("latex output is balanced and nonempty")
{
    Rng rng(1122);
    BundleConfig cfg(2, 2, 2);
    for (int rep = 0; rep < 10; ++rep) {
        auto f = random_form(cfg, rng);
        auto tex = print_latex(f);
        REQUIRE_FALSE(tex.empty());
        int depth = 0;
        for (char c : tex) {
            if (c == '{')
                ++depth;
            if (c == '}')
                --depth;
            REQUIRE(depth >= 0);
        }
        REQUIRE(depth == 0);
        auto doc = latex_document(tex);
        REQUIRE(doc.find("\\documentclass") == 0);
        REQUIRE(doc.find("\\end{document}") != std::string::npos);
    }
    REQUIRE(print_latex(FormExpr(cfg)) == "0");
}

TEST_CASE("kappa field grammar")
{
    BundleConfig cfg(1, 2, 1);
    auto chi = parse_kappa_field(cfg, "u1_(1); u2*u1");
    REQUIRE(chi.component(1, SlotSet()) ==
            FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({1}))));
    REQUIRE(chi.component(2, SlotSet()) ==
            FormExpr::coordinate(cfg, JetCoord::fiber(2, MultiIndex({0})))
                .wedge(FormExpr::coordinate(cfg, JetCoord::fiber(1, MultiIndex({0})))));
    REQUIRE_THROWS_AS(parse_kappa_field(cfg, "u1; u1; u1"), ParseError);
}
