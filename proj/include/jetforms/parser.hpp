#pragma once

#include "calculus.hpp"
#include "cdiff.hpp"
#include "derivations.hpp"

#include <cctype>
#include <string>

namespace jetforms {

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error("parse error at " + std::to_string(l) + ":" + std::to_string(c) +
                             ": " + msg),
          line(l), column(c)
    {
    }
};

// Grammar:
//   form   := term (('+'|'-') term)*
//   term   := factor (('*'|'^') factor)*       both products normalize the same;
//                                              '^' before an integer is a power
//   factor := rational | coord | diff | '(' form ')'
//   diff   := ('d'|'dv'|'dh') '[' int ']' '(' form ')'
//           | 'kappa' '[' int ']' '(' form ')'
//   coord  := 'x' int | 'u' int ('_' '(' int (',' int)* ')')?
class Parser {
public:
    Parser(BundleConfig cfg, std::string text) : cfg_(cfg), text_(std::move(text)) {}

    FormExpr parse_form()
    {
        auto f = form();
        skip_ws();
        if (pos_ < text_.size())
            fail("trailing input");
        return f;
    }

    // sum of optional-coefficient D(sigma) terms over the ground module
    CDiffOp parse_operator()
    {
        CDiffOp op(cfg_, scalar_module(cfg_), scalar_module(cfg_));
        bool negate = false;
        skip_ws();
        if (peek() == '-') {
            ++pos_;
            negate = true;
        }
        while (true) {
            auto [sigma, coeff] = op_term();
            op.add_entry(0, 0, sigma, negate ? -coeff : coeff);
            skip_ws();
            char c = peek();
            if (c == '+' || c == '-') {
                negate = (c == '-');
                ++pos_;
            } else {
                break;
            }
        }
        skip_ws();
        if (pos_ < text_.size())
            fail("trailing input");
        return op;
    }

private:
    std::pair<MultiIndex, FormExpr> op_term()
    {
        // collect wedge factors; a trailing D(...) closes the term
        FormExpr coeff(cfg_, Coefficient(1));
        MultiIndex sigma = MultiIndex::zero(cfg_.n);
        bool seen_d = false;
        while (true) {
            skip_ws();
            if (peek() == 'D' && pos_ + 1 < text_.size() &&
                (text_[pos_ + 1] == '(' || text_[pos_ + 1] == '_')) {
                ++pos_;
                if (peek() == '_')
                    ++pos_;
                expect('(');
                std::vector<int> e;
                e.push_back(integer());
                while (peek() == ',') {
                    ++pos_;
                    e.push_back(integer());
                }
                expect(')');
                if (static_cast<int>(e.size()) != cfg_.n)
                    fail("multi-index arity mismatch");
                sigma = MultiIndex(e);
                seen_d = true;
            } else {
                coeff = coeff.wedge(factor());
            }
            skip_ws();
            if (peek() == '*' || peek() == '^') {
                if (seen_d)
                    fail("derivative symbol must close the term");
                ++pos_;
                continue;
            }
            break;
        }
        return {sigma, coeff};
    }

    FormExpr form()
    {
        skip_ws();
        bool neg = false;
        if (peek() == '-') {
            ++pos_;
            neg = true;
        } else if (peek() == '+') {
            ++pos_;
        }
        FormExpr acc = term();
        if (neg)
            acc = -acc;
        while (true) {
            skip_ws();
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                auto t = term();
                acc = (c == '+') ? acc + t : acc - t;
            } else {
                break;
            }
        }
        return acc;
    }

    FormExpr term()
    {
        FormExpr acc = powered_factor();
        while (true) {
            skip_ws();
            char c = peek();
            if (c != '*' && c != '^')
                break;
            ++pos_;
            acc = acc.wedge(powered_factor());
        }
        return acc;
    }

    // a factor with an optional integer power, which binds to the factor alone
    FormExpr powered_factor()
    {
        FormExpr f = factor();
        skip_ws();
        if (peek() == '^') {
            size_t save = pos_;
            ++pos_;
            skip_ws();
            if (std::isdigit(peek())) {
                int e = integer();
                if (e == 0)
                    return FormExpr(cfg_, Coefficient(1));
                FormExpr base = f;
                for (int i = 1; i < e; ++i)
                    f = f.wedge(base);
                return f;
            }
            pos_ = save;
        }
        return f;
    }

    FormExpr factor()
    {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            auto f = form();
            expect(')');
            return f;
        }
        if (std::isdigit(c))
            return FormExpr(cfg_, Coefficient(rational()));
        if (c == 'x')
            return base_coord();
        if (c == 'u')
            return fiber_coord();
        if (c == 'd' || c == 'k')
            return diff();
        fail("expected a factor");
        return FormExpr(cfg_);
    }

    FormExpr diff()
    {
        size_t start = pos_;
        std::string word;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
            word += text_[pos_++];
        int slot = 0;
        auto bracket_slot = [&]() {
            expect('[');
            slot = integer();
            expect(']');
            if (slot < 1 || slot > cfg_.k)
                fail("slot " + std::to_string(slot) + " exceeds k=" + std::to_string(cfg_.k));
        };
        if (word == "d" || word == "dv" || word == "dh") {
            bracket_slot();
            expect('(');
            auto f = form();
            expect(')');
            SlotKind kind = word == "d"    ? SlotKind::Full
                            : word == "dv" ? SlotKind::Vertical
                                           : SlotKind::Horizontal;
            return differential(slot, kind, f);
        }
        if (word == "kappa") {
            bracket_slot();
            expect('(');
            auto f = form();
            expect(')');
            return kappa(slot, f);
        }
        pos_ = start;
        fail("unknown operator '" + word + "'");
        return FormExpr(cfg_);
    }

    FormExpr base_coord()
    {
        expect('x');
        int mu = integer();
        if (mu < 1 || mu > cfg_.n)
            fail("coordinate x" + std::to_string(mu) + " out of range");
        return FormExpr::coordinate(cfg_, JetCoord::base(mu));
    }

    FormExpr fiber_coord()
    {
        expect('u');
        int j = integer();
        if (j < 1 || j > cfg_.m)
            fail("coordinate u" + std::to_string(j) + " out of range");
        MultiIndex sigma = MultiIndex::zero(cfg_.n);
        if (peek() == '_') {
            ++pos_;
            expect('(');
            std::vector<int> e;
            e.push_back(integer());
            while (peek() == ',') {
                ++pos_;
                e.push_back(integer());
            }
            expect(')');
            if (static_cast<int>(e.size()) != cfg_.n)
                fail("multi-index arity mismatch");
            sigma = MultiIndex(e);
        }
        return FormExpr::coordinate(cfg_, JetCoord::fiber(j, sigma));
    }

    Rational rational()
    {
        Integer num(digits());
        if (peek() == '/') {
            size_t save = pos_;
            ++pos_;
            if (!std::isdigit(peek())) {
                pos_ = save;
                return Rational(num);
            }
            Integer den(digits());
            if (den == 0)
                fail("zero denominator");
            return Rational(num, den);
        }
        return Rational(num);
    }

    int integer()
    {
        skip_ws();
        if (!std::isdigit(peek()))
            fail("expected an integer");
        return std::stoi(digits());
    }

    std::string digits()
    {
        skip_ws();
        std::string s;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            s += text_[pos_++];
        if (s.empty())
            fail("expected digits");
        return s;
    }

    void expect(char c)
    {
        skip_ws();
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws()
    {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        int line = 1, col = 1;
        for (size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(line, col, msg);
    }

    BundleConfig cfg_;
    std::string text_;
    size_t pos_ = 0;
};

inline FormExpr parse_form(const BundleConfig& cfg, const std::string& text)
{
    return Parser(cfg, text).parse_form();
}

inline CDiffOp parse_operator(const BundleConfig& cfg, const std::string& text)
{
    return Parser(cfg, text).parse_operator();
}

// semicolon-separated fiber components (K = {}) of a field
inline KappaField parse_kappa_field(const BundleConfig& cfg, const std::string& text)
{
    KappaField chi(cfg);
    size_t start = 0;
    int j = 1;
    while (start <= text.size()) {
        size_t stop = text.find(';', start);
        std::string comp = text.substr(start, stop == std::string::npos ? stop : stop - start);
        if (j > cfg.m)
            throw ParseError(1, 1, "too many field components");
        auto f = parse_form(cfg, comp.empty() ? "0" : comp);
        if (!f.is_zero())
            chi.set(j, SlotSet(), f);
        ++j;
        if (stop == std::string::npos)
            break;
        start = stop + 1;
    }
    return chi;
}

} // namespace jetforms
