#pragma once

#include "rational.hpp"

#include <compare>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace jetforms {

// Multi-index sigma = (sigma_1,...,sigma_n), one entry per base coordinate.
class MultiIndex {
public:
    MultiIndex() = default;
    static MultiIndex zero(int n) { return MultiIndex(std::vector<int>(n, 0)); }
    explicit MultiIndex(std::vector<int> e) : entries_(std::move(e))
    {
        for (int v : entries_)
            if (v < 0)
                throw std::invalid_argument("multi-index entry must be nonnegative");
    }

    int size() const { return static_cast<int>(entries_.size()); }
    int operator[](int i) const { return entries_[i]; }
    int length() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }
    bool is_zero() const { return length() == 0; }
    const std::vector<int>& entries() const { return entries_; }

    MultiIndex bump(int mu) const // sigma + 1_mu, mu is 0-based here
    {
        MultiIndex r = *this;
        r.entries_[mu] += 1;
        return r;
    }

    MultiIndex operator+(const MultiIndex& o) const
    {
        MultiIndex r = *this;
        for (int i = 0; i < size(); ++i)
            r.entries_[i] += o.entries_[i];
        return r;
    }

    // componentwise difference; throws if not >= o
    MultiIndex operator-(const MultiIndex& o) const
    {
        MultiIndex r = *this;
        for (int i = 0; i < size(); ++i) {
            r.entries_[i] -= o.entries_[i];
            if (r.entries_[i] < 0)
                throw std::domain_error("multi-index subtraction went negative");
        }
        return r;
    }

    bool contains(const MultiIndex& o) const
    {
        for (int i = 0; i < size(); ++i)
            if (entries_[i] < o.entries_[i])
                return false;
        return true;
    }

    auto operator<=>(const MultiIndex&) const = default;

    std::string str() const
    {
        std::string s = "(";
        for (int i = 0; i < size(); ++i) {
            if (i)
                s += ",";
            s += std::to_string(entries_[i]);
        }
        return s + ")";
    }

private:
    std::vector<int> entries_;
};

// product over i of binom(sigma_i, rho_i)
inline Rational binomial(const MultiIndex& sigma, const MultiIndex& rho)
{
    Rational b = 1;
    for (int i = 0; i < sigma.size(); ++i)
        b *= binomial(sigma[i], rho[i]);
    return b;
}

// all rho with rho <= sigma componentwise, lexicographically ordered
inline std::vector<MultiIndex> sub_indices(const MultiIndex& sigma)
{
    std::vector<MultiIndex> out;
    std::vector<int> cur(sigma.size(), 0);
    while (true) {
        out.emplace_back(cur);
        int i = sigma.size() - 1;
        while (i >= 0) {
            if (cur[i] < sigma[i]) {
                ++cur[i];
                break;
            }
            cur[i] = 0;
            --i;
        }
        if (i < 0)
            break;
    }
    return out;
}

// all sigma with |sigma| == len over n slots
inline void indices_of_length(int n, int len, std::vector<MultiIndex>& out)
{
    std::vector<int> cur(n, 0);
    // iterate compositions of len into n parts
    std::function<void(int, int)> rec = [&](int pos, int rem) {
        if (pos == n - 1) {
            cur[pos] = rem;
            out.emplace_back(cur);
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            cur[pos] = v;
            rec(pos + 1, rem - v);
        }
    };
    if (n == 0) {
        if (len == 0)
            out.emplace_back(std::vector<int>{});
        return;
    }
    rec(0, len);
}

inline std::vector<MultiIndex> indices_up_to(int n, int max_len)
{
    std::vector<MultiIndex> out;
    for (int l = 0; l <= max_len; ++l)
        indices_of_length(n, l, out);
    return out;
}

} // namespace jetforms
