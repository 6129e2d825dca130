#pragma once

#include "polynomial.hpp"

namespace jetforms {

// Rational function num/den over the jet coordinate ring with opaque symbols.
// Canonical: gcd(num, den) = 1, den has positive leading coefficient and
// content 1; constant denominators are folded to 1.
class Coefficient {
public:
    Coefficient() = default;
    Coefficient(const Rational& c) : num_(c) {}
    Coefficient(long c) : num_(Rational(c)) {}
    Coefficient(Polynomial p) : num_(std::move(p)) {}
    Coefficient(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den))
    {
        normalize();
    }

    static Coefficient variable(Var v) { return Coefficient(Polynomial::variable(std::move(v))); }
    static Coefficient coordinate(JetCoord c)
    {
        return Coefficient(Polynomial::variable(Var::coord(std::move(c))));
    }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }
    bool has_denominator() const { return !den_.is_constant(); }

    Coefficient operator+(const Coefficient& o) const
    {
        if (den_ == o.den_)
            return Coefficient(num_ + o.num_, den_);
        return Coefficient(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    Coefficient operator-() const
    {
        Coefficient r = *this;
        r.num_ = -r.num_;
        return r;
    }
    Coefficient operator-(const Coefficient& o) const { return *this + (-o); }
    Coefficient operator*(const Coefficient& o) const
    {
        return Coefficient(num_ * o.num_, den_ * o.den_);
    }
    Coefficient operator/(const Coefficient& o) const
    {
        if (o.is_zero())
            throw std::domain_error("division by zero coefficient");
        return Coefficient(num_ * o.den_, den_ * o.num_);
    }
    Coefficient& operator+=(const Coefficient& o) { return *this = *this + o; }
    Coefficient& operator-=(const Coefficient& o) { return *this = *this - o; }
    Coefficient& operator*=(const Coefficient& o) { return *this = *this * o; }

    bool operator==(const Coefficient& o) const { return num_ == o.num_ && den_ == o.den_; }

    // exact partial derivative w.r.t. a jet coordinate (quotient rule)
    Coefficient partial(const JetCoord& v) const
    {
        if (den_.is_constant())
            return Coefficient(num_.partial(v), den_);
        return Coefficient(num_.partial(v) * den_ - num_ * den_.partial(v), den_ * den_);
    }

    std::set<JetCoord> mentioned_coords() const
    {
        auto s = num_.mentioned_coords();
        for (auto& c : den_.mentioned_coords())
            s.insert(c);
        return s;
    }

    bool depends_only_on_base() const
    {
        for (auto& c : mentioned_coords())
            if (c.kind == JetCoord::Kind::Fiber)
                return false;
        return true;
    }

    int max_jet_order() const { return std::max(num_.max_jet_order(), den_.max_jet_order()); }

    std::string str() const
    {
        if (den_.is_constant() && den_.constant_value() == 1)
            return num_.str();
        return "(" + num_.str() + ")/(" + den_.str() + ")";
    }

private:
    void normalize()
    {
        if (den_.is_zero())
            throw std::domain_error("zero denominator");
        if (num_.is_zero()) {
            den_ = Polynomial(1);
            return;
        }
        if (!den_.is_constant()) {
            Polynomial g = gcd(num_, den_);
            if (!g.is_constant() || g.constant_value() != 1) {
                num_ = div_exact(num_, g);
                den_ = div_exact(den_, g);
            }
        }
        if (den_.is_constant()) {
            Rational d = den_.constant_value();
            num_ = num_ * (Rational(1) / d);
            den_ = Polynomial(1);
        } else {
            Rational lc = den_.leading_coefficient();
            num_ = num_ * (Rational(1) / lc);
            den_ = den_ * (Rational(1) / lc);
        }
    }

    Polynomial num_ = Polynomial();
    Polynomial den_ = Polynomial(Rational(1));
};

inline Coefficient operator*(const Rational& c, const Coefficient& f)
{
    return Coefficient(Rational(c)) * f;
}

} // namespace jetforms
