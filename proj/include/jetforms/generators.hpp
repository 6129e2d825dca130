#pragma once

#include "bundle.hpp"
#include "multiindex.hpp"

#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace jetforms {

// Subset of the slot set {1,...,k} as a bitmask (bit s-1 <-> slot s).
struct SlotSet {
    std::uint32_t mask = 0;

    SlotSet() = default;
    explicit SlotSet(std::uint32_t m) : mask(m) {}
    static SlotSet single(int s) { return SlotSet(1u << (s - 1)); }
    static SlotSet of(std::initializer_list<int> slots)
    {
        SlotSet r;
        for (int s : slots)
            r.mask |= 1u << (s - 1);
        return r;
    }

    bool contains(int s) const { return mask & (1u << (s - 1)); }
    bool empty() const { return mask == 0; }
    int size() const { return std::popcount(mask); }
    int parity() const { return size() & 1; }
    int count_below(int s) const { return std::popcount(mask & ((1u << (s - 1)) - 1)); }

    SlotSet with(int s) const { return SlotSet(mask | (1u << (s - 1))); }
    SlotSet without(int s) const { return SlotSet(mask & ~(1u << (s - 1))); }
    int max_slot() const { return mask == 0 ? 0 : 32 - std::countl_zero(mask); }

    std::vector<int> slots() const
    {
        std::vector<int> out;
        for (int s = 1; s <= 32; ++s)
            if (contains(s))
                out.push_back(s);
        return out;
    }

    // swap slots a and b in the set; the permutation sign of re-sorting the
    // slot sequence after the swap
    SlotSet swapped(int a, int b) const
    {
        SlotSet r = *this;
        bool ha = contains(a), hb = contains(b);
        if (ha != hb) {
            r = ha ? r.without(a).with(b) : r.without(b).with(a);
        }
        return r;
    }
    int swap_sign(int a, int b) const
    {
        auto seq = slots();
        for (auto& s : seq) {
            if (s == a)
                s = b;
            else if (s == b)
                s = a;
        }
        int inv = 0;
        for (size_t i = 0; i < seq.size(); ++i)
            for (size_t j = i + 1; j < seq.size(); ++j)
                if (seq[i] > seq[j])
                    ++inv;
        return (inv & 1) ? -1 : 1;
    }

    auto operator<=>(const SlotSet&) const = default;

    std::string str() const
    {
        std::string s = "{";
        bool first = true;
        for (int x : slots()) {
            if (!first)
                s += ",";
            s += std::to_string(x);
            first = false;
        }
        return s + "}";
    }
};

// One algebra generator: d_S x^mu (horizontal) or d_S^v u^j_sigma (vertical),
// S nonempty. Total order: kind, then S as integer, then mu resp. (j, sigma).
struct Generator {
    enum class Kind { Vertical = 0, Horizontal = 1 };

    Kind kind = Kind::Vertical;
    SlotSet slots;
    int index = 1;    // j for vertical, mu for horizontal
    MultiIndex sigma; // vertical only

    static Generator vertical(int j, MultiIndex sigma, SlotSet s)
    {
        return {Kind::Vertical, s, j, std::move(sigma)};
    }
    static Generator horizontal(int mu, SlotSet s) { return {Kind::Horizontal, s, mu, MultiIndex()}; }

    int parity() const { return slots.parity(); }
    bool is_vertical() const { return kind == Kind::Vertical; }

    void validate(const BundleConfig& cfg) const
    {
        if (slots.empty())
            throw std::domain_error("generator with empty slot set");
        if (slots.max_slot() > cfg.k)
            throw std::domain_error("slot " + std::to_string(slots.max_slot()) +
                                    " exceeds k=" + std::to_string(cfg.k));
        if (kind == Kind::Vertical) {
            cfg.check_fiber(index);
            if (sigma.size() != cfg.n)
                throw std::domain_error("multi-index arity mismatch");
        } else {
            cfg.check_base(index);
        }
    }

    auto operator<=>(const Generator&) const = default;

    std::string str() const
    {
        std::string core;
        if (kind == Kind::Vertical) {
            core = "u" + std::to_string(index);
            if (!sigma.is_zero())
                core += "_" + sigma.str();
        } else {
            core = "x" + std::to_string(index);
        }
        auto ss = slots.slots();
        for (auto it = ss.rbegin(); it != ss.rend(); ++it)
            core = (kind == Kind::Vertical ? "dv[" : "d[") + std::to_string(*it) + "](" + core + ")";
        return core;
    }
};

inline std::vector<int> slot_multidegree(const SlotSet& s, int k)
{
    std::vector<int> d(k, 0);
    for (int slot : s.slots())
        d[slot - 1] = 1;
    return d;
}

} // namespace jetforms
