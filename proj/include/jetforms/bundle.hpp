#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace jetforms {

// Trivial bundle R^{n+m} -> R^n with k iterated de Rham slots.
struct BundleConfig {
    int n = 1; // base dimension, coordinates x^1..x^n
    int m = 1; // fiber dimension, coordinates u^1..u^m
    int k = 1; // iteration depth, slots 1..k

    BundleConfig() = default;
    BundleConfig(int n_, int m_, int k_) : n(n_), m(m_), k(k_)
    {
        if (n < 1 || m < 1 || k < 1)
            throw std::invalid_argument("bundle config requires n, m, k >= 1");
    }

    auto operator<=>(const BundleConfig&) const = default;

    void check_slot(int s) const
    {
        if (s < 1 || s > k)
            throw std::domain_error("slot " + std::to_string(s) + " exceeds k=" + std::to_string(k));
    }
    void check_base(int mu) const
    {
        if (mu < 1 || mu > n)
            throw std::domain_error("base index " + std::to_string(mu) + " out of range");
    }
    void check_fiber(int j) const
    {
        if (j < 1 || j > m)
            throw std::domain_error("fiber index " + std::to_string(j) + " out of range");
    }

    std::string str() const
    {
        return "(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ",k=" + std::to_string(k) + ")";
    }
};

inline void check_same_config(const BundleConfig& a, const BundleConfig& b)
{
    if (!(a == b))
        throw std::invalid_argument("mixed bundle configurations " + a.str() + " vs " + b.str());
}

} // namespace jetforms
