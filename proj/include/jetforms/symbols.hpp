#pragma once

#include "multiindex.hpp"

#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace jetforms {

// A jet coordinate: base x^mu or fiber u^j_sigma. Indices are 1-based as printed.
struct JetCoord {
    enum class Kind { Base, Fiber };
    Kind kind = Kind::Base;
    int index = 1;     // mu for base, j for fiber
    MultiIndex sigma;  // empty for base coordinates

    static JetCoord base(int mu) { return {Kind::Base, mu, MultiIndex()}; }
    static JetCoord fiber(int j, MultiIndex s) { return {Kind::Fiber, j, std::move(s)}; }

    auto operator<=>(const JetCoord&) const = default;

    std::string str() const
    {
        if (kind == Kind::Base)
            return "x" + std::to_string(index);
        std::string s = "u" + std::to_string(index);
        if (!sigma.is_zero())
            s += "_" + sigma.str();
        return s;
    }
};

// Registry of opaque smooth-function symbols. Append-only; ids are stable.
// Reads are lock-free after acquisition of a shared lock; writes serialized.
class SymbolRegistry {
public:
    struct Entry {
        std::string name;
        std::vector<JetCoord> args;
    };

    static SymbolRegistry& instance()
    {
        static SymbolRegistry reg;
        return reg;
    }

    int register_symbol(const std::string& name, std::vector<JetCoord> args)
    {
        {
            std::shared_lock lock(mu_);
            for (size_t i = 0; i < entries_.size(); ++i)
                if (entries_[i].name == name) {
                    if (entries_[i].args != args)
                        throw std::invalid_argument("symbol '" + name +
                                                    "' already registered with different arguments");
                    return static_cast<int>(i);
                }
        }
        std::unique_lock lock(mu_);
        for (size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].name == name) {
                if (entries_[i].args != args)
                    throw std::invalid_argument("symbol '" + name +
                                                "' already registered with different arguments");
                return static_cast<int>(i);
            }
        entries_.push_back({name, std::move(args)});
        return static_cast<int>(entries_.size() - 1);
    }

    Entry lookup(int id) const
    {
        std::shared_lock lock(mu_);
        if (id < 0 || id >= static_cast<int>(entries_.size()))
            throw std::out_of_range("unknown symbol id");
        return entries_[id];
    }

private:
    SymbolRegistry() = default;
    mutable std::shared_mutex mu_;
    std::vector<Entry> entries_;
};

} // namespace jetforms
