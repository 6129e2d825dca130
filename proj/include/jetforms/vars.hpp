#pragma once

#include "symbols.hpp"

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace jetforms {

// A commuting polynomial variable: a jet coordinate or a formal partial
// derivative of a registered opaque symbol.
class Var {
public:
    enum class Kind { Coord, Opaque };

    static Var coord(JetCoord c)
    {
        Var v;
        v.kind_ = Kind::Coord;
        v.coord_ = std::move(c);
        return v;
    }

    // derivs[i] = how many times the symbol was differentiated in its i-th argument
    static Var opaque(int sym_id, std::vector<int> derivs)
    {
        Var v;
        v.kind_ = Kind::Opaque;
        v.sym_ = sym_id;
        v.derivs_ = std::move(derivs);
        return v;
    }

    Kind kind() const { return kind_; }
    const JetCoord& coord() const { return coord_; }
    int symbol_id() const { return sym_; }
    const std::vector<int>& derivs() const { return derivs_; }

    bool is_coord() const { return kind_ == Kind::Coord; }

    // partial derivative of this variable w.r.t. a jet coordinate:
    // 1 for the coordinate itself, a bumped opaque symbol, or nothing (zero)
    std::optional<Var> partial(const JetCoord& v) const
    {
        if (kind_ == Kind::Coord)
            return std::nullopt; // handled by the caller (derivative is 0 or 1)
        auto entry = SymbolRegistry::instance().lookup(sym_);
        for (size_t i = 0; i < entry.args.size(); ++i)
            if (entry.args[i] == v) {
                std::vector<int> d = derivs_;
                d[i] += 1;
                return Var::opaque(sym_, std::move(d));
            }
        return std::nullopt;
    }

    // jet coordinates this variable depends on
    std::vector<JetCoord> mentioned_coords() const
    {
        if (kind_ == Kind::Coord)
            return {coord_};
        return SymbolRegistry::instance().lookup(sym_).args;
    }

    auto operator<=>(const Var&) const = default;

    std::string str() const
    {
        if (kind_ == Kind::Coord)
            return coord_.str();
        auto entry = SymbolRegistry::instance().lookup(sym_);
        std::string s = entry.name;
        bool any = false;
        for (size_t i = 0; i < derivs_.size(); ++i)
            for (int r = 0; r < derivs_[i]; ++r) {
                s += any ? "," : "_{";
                s += entry.args[i].str();
                any = true;
            }
        if (any)
            s += "}";
        s += "(";
        for (size_t i = 0; i < entry.args.size(); ++i) {
            if (i)
                s += ",";
            s += entry.args[i].str();
        }
        return s + ")";
    }

private:
    Kind kind_ = Kind::Coord;
    JetCoord coord_;
    int sym_ = -1;
    std::vector<int> derivs_;
};

} // namespace jetforms
