#pragma once

#include "calculus.hpp"

#include <json.hpp>

#include <functional>
#include <optional>

namespace jetforms {

// exact dense linear algebra over the rationals
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, Rational(0))
    {
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& at(int r, int c) { return data_[r * cols_ + c]; }
    const Rational& at(int r, int c) const { return data_[r * cols_ + c]; }

    int rank() const
    {
        RationalMatrix m = *this;
        return m.forward_eliminate().size();
    }

    // exact solve A x = b; nullopt if inconsistent
    std::optional<std::vector<Rational>> solve(const std::vector<Rational>& b) const
    {
        RationalMatrix m(rows_, cols_ + 1);
        for (int r = 0; r < rows_; ++r) {
            for (int c = 0; c < cols_; ++c)
                m.at(r, c) = at(r, c);
            m.at(r, cols_) = b[r];
        }
        auto pivots = m.forward_eliminate();
        for (const auto& [r, c] : pivots)
            if (c == cols_)
                return std::nullopt; // pivot in the constant column
        std::vector<Rational> x(cols_, Rational(0));
        for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
            auto [r, c] = *it;
            Rational v = m.at(r, cols_);
            for (int cc = c + 1; cc < cols_; ++cc)
                v -= m.at(r, cc) * x[cc];
            x[c] = v / m.at(r, c);
        }
        return x;
    }

    // solvability of A x = b for many right-hand sides with one elimination
    std::vector<bool> consistent_many(const std::vector<std::vector<Rational>>& rhs) const
    {
        const int extra = static_cast<int>(rhs.size());
        RationalMatrix m(rows_, cols_ + extra);
        for (int r = 0; r < rows_; ++r) {
            for (int c = 0; c < cols_; ++c)
                m.at(r, c) = at(r, c);
            for (int e = 0; e < extra; ++e)
                m.at(r, cols_ + e) = rhs[e][r];
        }
        // eliminate with pivots restricted to the matrix columns
        int row = 0;
        for (int c = 0; c < cols_ && row < rows_; ++c) {
            int pr = -1;
            for (int i = row; i < rows_; ++i)
                if (m.at(i, c) != 0) {
                    pr = i;
                    break;
                }
            if (pr < 0)
                continue;
            if (pr != row)
                for (int cc = 0; cc < m.cols(); ++cc)
                    std::swap(m.at(pr, cc), m.at(row, cc));
            for (int i = row + 1; i < rows_; ++i) {
                if (m.at(i, c) == 0)
                    continue;
                Rational f = m.at(i, c) / m.at(row, c);
                for (int cc = c; cc < m.cols(); ++cc)
                    m.at(i, cc) -= f * m.at(row, cc);
            }
            ++row;
        }
        std::vector<bool> ok(extra, true);
        for (int r = row; r < rows_; ++r)
            for (int e = 0; e < extra; ++e)
                if (m.at(r, cols_ + e) != 0)
                    ok[e] = false;
        return ok;
    }

    std::vector<std::vector<Rational>> kernel_basis() const
    {
        RationalMatrix m = *this;
        auto pivots = m.forward_eliminate();
        std::vector<bool> is_pivot(cols_, false);
        for (const auto& [r, c] : pivots)
            is_pivot[c] = true;
        std::vector<std::vector<Rational>> out;
        for (int fc = 0; fc < cols_; ++fc) {
            if (is_pivot[fc])
                continue;
            std::vector<Rational> v(cols_, Rational(0));
            v[fc] = 1;
            for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
                auto [r, c] = *it;
                Rational s = 0;
                for (int cc = c + 1; cc < cols_; ++cc)
                    s += m.at(r, cc) * v[cc];
                v[c] = -s / m.at(r, c);
            }
            out.push_back(std::move(v));
        }
        return out;
    }

private:
    // row echelon; returns (row, col) pivots
    std::vector<std::pair<int, int>> forward_eliminate()
    {
        std::vector<std::pair<int, int>> pivots;
        int r = 0;
        for (int c = 0; c < cols_ && r < rows_; ++c) {
            int pr = -1;
            for (int i = r; i < rows_; ++i)
                if (at(i, c) != 0) {
                    pr = i;
                    break;
                }
            if (pr < 0)
                continue;
            if (pr != r)
                for (int cc = 0; cc < cols_; ++cc)
                    std::swap(at(pr, cc), at(r, cc));
            for (int i = r + 1; i < rows_; ++i) {
                if (at(i, c) == 0)
                    continue;
                Rational f = at(i, c) / at(r, c);
                for (int cc = c; cc < cols_; ++cc)
                    at(i, cc) -= f * at(r, cc);
            }
            pivots.emplace_back(r, c);
            ++r;
        }
        return pivots;
    }

    int rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

// finite-dimensional slice bounds
struct TruncationSpec {
    int max_jet = 1; // jet order bound for coefficients and generator indices
    int max_deg = 1; // total polynomial degree bound for coefficients

    TruncationSpec enlarged(int steps = 1) const { return {max_jet + steps, max_deg + steps}; }

    nlohmann::json to_json() const { return {{"max_jet", max_jet}, {"max_deg", max_deg}}; }
};

// ordered basis of a truncated graded slice
struct SliceBasis {
    BundleConfig cfg;
    std::vector<std::pair<PolyMonomial, Monomial>> elems;
    std::map<std::pair<PolyMonomial, Monomial>, int> index;

    int size() const { return static_cast<int>(elems.size()); }

    void add(const PolyMonomial& pm, const Monomial& m)
    {
        auto key = std::make_pair(pm, m);
        if (index.count(key))
            return;
        index[key] = static_cast<int>(elems.size());
        elems.push_back(key);
    }

    FormExpr element(int i) const
    {
        Polynomial p;
        p.add_term(elems[i].first, Rational(1));
        FormExpr f(cfg);
        f.add_term(elems[i].second, Coefficient(p));
        return f;
    }

    // exact coordinates; nullopt if the form leaves the slice
    std::optional<std::vector<Rational>> expand(const FormExpr& f) const
    {
        std::vector<Rational> v(elems.size(), Rational(0));
        for (const auto& [mono, coeff] : f.terms()) {
            if (coeff.has_denominator())
                return std::nullopt;
            for (const auto& [pm, c] : coeff.num().terms()) {
                auto it = index.find({pm, mono});
                if (it == index.end())
                    return std::nullopt;
                v[it->second] += c;
            }
        }
        return v;
    }

    FormExpr assemble(const std::vector<Rational>& v) const
    {
        FormExpr f(cfg);
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0)
                continue;
            Polynomial p;
            p.add_term(elems[i].first, v[i]);
            f.add_term(elems[i].second, Coefficient(p));
        }
        return f;
    }
};

namespace detail {

inline std::vector<PolyMonomial> coefficient_monomials(const BundleConfig& cfg,
                                                       const TruncationSpec& spec)
{
    std::vector<Var> vars;
    for (int mu = 1; mu <= cfg.n; ++mu)
        vars.push_back(Var::coord(JetCoord::base(mu)));
    for (int j = 1; j <= cfg.m; ++j)
        for (const auto& sigma : indices_up_to(cfg.n, spec.max_jet))
            vars.push_back(Var::coord(JetCoord::fiber(j, sigma)));
    std::sort(vars.begin(), vars.end());

    std::vector<PolyMonomial> out;
    PolyMonomial cur;
    std::function<void(size_t, int)> walk = [&](size_t i, int deg_left) {
        if (i == vars.size()) {
            out.push_back(cur);
            return;
        }
        walk(i + 1, deg_left);
        for (int e = 1; e <= deg_left; ++e) {
            cur.emplace_back(vars[i], e);
            walk(i + 1, deg_left - e);
            cur.pop_back();
        }
    };
    walk(0, spec.max_deg);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Generator> slice_generators(const BundleConfig& cfg, const TruncationSpec& spec)
{
    std::vector<Generator> out;
    for (std::uint32_t mask = 1; mask < (1u << cfg.k); ++mask) {
        SlotSet S(mask);
        for (int mu = 1; mu <= cfg.n; ++mu)
            out.push_back(Generator::horizontal(mu, S));
        for (int j = 1; j <= cfg.m; ++j)
            for (const auto& sigma : indices_up_to(cfg.n, spec.max_jet))
                out.push_back(Generator::vertical(j, sigma, S));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline void monomials_of_grade(const BundleConfig& cfg, const std::vector<Generator>& gens,
                               const std::vector<int>& grade, size_t i, Monomial& cur,
                               std::vector<Monomial>& out)
{
    bool done = true;
    for (int g : grade)
        if (g != 0)
            done = false;
    if (done) {
        out.push_back(cur);
        return;
    }
    if (i == gens.size())
        return;
    monomials_of_grade(cfg, gens, grade, i + 1, cur, out);
    const auto& g = gens[i];
    auto gd = slot_multidegree(g.slots, cfg.k);
    int max_e = g.parity() ? 1 : 1000;
    std::vector<int> rem = grade;
    for (int e = 1; e <= max_e; ++e) {
        bool fits = true;
        for (int s = 0; s < cfg.k; ++s) {
            rem[s] -= gd[s];
            if (rem[s] < 0)
                fits = false;
        }
        if (!fits)
            break;
        Monomial next = Monomial::merge(cur, power_monomial(g, e))->second;
        std::swap(cur, next);
        monomials_of_grade(cfg, gens, rem, i + 1, cur, out);
        std::swap(cur, next);
    }
}

} // namespace detail

// complete enumeration of the slice of a given multidegree
inline SliceBasis slice_basis(const BundleConfig& cfg, const TruncationSpec& spec,
                              const std::vector<int>& grade)
{
    if (static_cast<int>(grade.size()) != cfg.k)
        throw std::invalid_argument("grade arity mismatch");
    SliceBasis b;
    b.cfg = cfg;
    auto coeffs = detail::coefficient_monomials(cfg, spec);
    auto gens = detail::slice_generators(cfg, spec);
    std::vector<Monomial> monos;
    Monomial cur;
    detail::monomials_of_grade(cfg, gens, grade, 0, cur, monos);
    std::sort(monos.begin(), monos.end());
    for (const auto& m : monos)
        for (const auto& pm : coeffs)
            b.add(pm, m);
    return b;
}

using LinearMap = std::function<FormExpr(const FormExpr&)>;

// matrix of L on a slice; the target basis is derived from the images, so the
// expansion is always exact
struct OperatorMatrix {
    RationalMatrix matrix;
    SliceBasis target;
};

inline OperatorMatrix operator_matrix(const LinearMap& L, const SliceBasis& domain)
{
    std::vector<FormExpr> images;
    images.reserve(domain.size());
    SliceBasis target;
    target.cfg = domain.cfg;
    for (int i = 0; i < domain.size(); ++i) {
        images.push_back(L(domain.element(i)));
        for (const auto& [mono, coeff] : images.back().terms()) {
            if (coeff.has_denominator())
                throw std::domain_error("operator image leaves the polynomial slice");
            for (const auto& [pm, c] : coeff.num().terms())
                target.add(pm, mono);
        }
    }
    OperatorMatrix out;
    out.target = std::move(target);
    out.matrix = RationalMatrix(out.target.size(), domain.size());
    for (int i = 0; i < domain.size(); ++i) {
        auto v = out.target.expand(images[i]);
        for (int r = 0; r < out.target.size(); ++r)
            out.matrix.at(r, i) = (*v)[r];
    }
    return out;
}

struct PreimageReport {
    bool found = false;
    FormExpr witness;
    int enlargements = 0;
    std::string verdict; // "witness" or "none-within-bounds"

    nlohmann::json to_json(const TruncationSpec& spec, const std::string& op_name) const
    {
        return {{"operator", op_name},
                {"spec", spec.to_json()},
                {"dims", nullptr},
                {"witnesses", found ? 1 : 0},
                {"enlargements", enlargements},
                {"verdict", verdict}};
    }
};

// search L(eta) = target over the slice, enlarging the bounds a limited
// number of times; a negative answer is only a statement within the bounds
inline PreimageReport solve_preimage(const LinearMap& L, const BundleConfig& cfg,
                                     const TruncationSpec& spec, const std::vector<int>& grade,
                                     const FormExpr& target, int max_enlarge = 2)
{
    PreimageReport rep;
    rep.witness = FormExpr(cfg);
    for (int step = 0; step <= max_enlarge; ++step) {
        TruncationSpec s = spec.enlarged(step);
        auto domain = slice_basis(cfg, s, grade);
        auto om = operator_matrix(L, domain);
        // extend the row space by the target's support
        SliceBasis rows = om.target;
        for (const auto& [mono, coeff] : target.terms())
            for (const auto& [pm, c] : coeff.num().terms())
                rows.add(pm, mono);
        if (rows.size() != om.target.size()) {
            RationalMatrix m(rows.size(), domain.size());
            for (int i = 0; i < domain.size(); ++i) {
                auto img = rows.expand(L(domain.element(i)));
                for (int r = 0; r < rows.size(); ++r)
                    m.at(r, i) = (*img)[r];
            }
            om.matrix = std::move(m);
            om.target = std::move(rows);
        }
        auto t = om.target.expand(target);
        if (!t)
            continue;
        auto x = om.matrix.solve(*t);
        if (x) {
            rep.found = true;
            rep.witness = domain.assemble(*x);
            rep.enlargements = step;
            rep.verdict = "witness";
            return rep;
        }
        rep.enlargements = step;
    }
    rep.verdict = "none-within-bounds";
    return rep;
}

struct CohomologyReport {
    int dim_kernel = 0;
    int dim_image = 0;
    int dim = 0;
    int boundary_escapes = 0; // incoming images that left the middle slice
    std::string verdict;

    nlohmann::json to_json(const TruncationSpec& spec, const std::string& op_name) const
    {
        return {{"operator", op_name},
                {"spec", spec.to_json()},
                {"dims",
                 {{"kernel", dim_kernel}, {"image", dim_image}, {"cohomology", dim}}},
                {"witnesses", nullptr},
                {"boundary_escapes", boundary_escapes},
                {"verdict", verdict}};
    }
};

// dim ker(L_out) - dim im(L_in) on the middle slice; pass a null L_in for the
// first spot of a complex
inline CohomologyReport cohomology_dim(const LinearMap* L_in, const SliceBasis* in_domain,
                                       const LinearMap& L_out, const SliceBasis& mid)
{
    CohomologyReport rep;
    auto om = operator_matrix(L_out, mid);
    rep.dim_kernel = mid.size() - om.matrix.rank();

    if (L_in && in_domain) {
        // composite must vanish where the image stays in the slice
        RationalMatrix img(mid.size(), in_domain->size());
        int cols = 0;
        for (int i = 0; i < in_domain->size(); ++i) {
            FormExpr f = (*L_in)(in_domain->element(i));
            auto v = mid.expand(f);
            if (!v) {
                ++rep.boundary_escapes;
                continue;
            }
            if (!L_out(f).is_zero())
                throw std::domain_error("maps do not compose to zero");
            for (int r = 0; r < mid.size(); ++r)
                img.at(r, cols) = (*v)[r];
            ++cols;
        }
        RationalMatrix used(mid.size(), cols);
        for (int r = 0; r < mid.size(); ++r)
            for (int c = 0; c < cols; ++c)
                used.at(r, c) = img.at(r, c);
        rep.dim_image = used.rank();
    }
    rep.dim = rep.dim_kernel - rep.dim_image;
    rep.verdict = "within-bounds";
    return rep;
}

// ---------------------------------------------------------------------------
// the operator complex CDiff(kappa, HLambda^q) with w = d_k^h composition
// ---------------------------------------------------------------------------

// basis element of the truncated operator slice: coefficient monomial times a
// horizontal q-form in slot k, attached to one total-derivative entry
struct OpElem {
    PolyMonomial coeff;
    Monomial hform; // product of slot-k horizontal generators
    int alpha = 0;  // kappa-module basis index
    MultiIndex sigma;

    auto operator<=>(const OpElem&) const = default;
};

struct OpSliceBasis {
    BundleConfig cfg;
    std::vector<OpElem> elems;
    std::map<OpElem, int> index;

    int size() const { return static_cast<int>(elems.size()); }
    void add(const OpElem& e)
    {
        if (index.count(e))
            return;
        index[e] = static_cast<int>(elems.size());
        elems.push_back(e);
    }
};

inline int kappa_rank(const BundleConfig& cfg) { return cfg.m * (1 << (cfg.k - 1)); }
inline std::pair<int, SlotSet> kappa_slot_decode(const BundleConfig& cfg, int idx)
{
    return {idx % cfg.m + 1, SlotSet(static_cast<std::uint32_t>(idx / cfg.m))};
}

inline OpSliceBasis op_slice_basis(const BundleConfig& cfg, const TruncationSpec& spec, int q)
{
    OpSliceBasis b;
    b.cfg = cfg;
    // horizontal q-forms of multidegree (0,..,0,q): products of d_k x^mu
    std::vector<Monomial> hmonos;
    std::vector<int> pick;
    std::function<void(int)> rec = [&](int mu) {
        if (static_cast<int>(pick.size()) == q) {
            Monomial m;
            for (int p : pick)
                m = Monomial::merge(m, Monomial(Generator::horizontal(p, SlotSet::single(cfg.k))))
                        ->second;
            hmonos.push_back(m);
            return;
        }
        if (mu > cfg.n)
            return;
        rec(mu + 1);
        pick.push_back(mu);
        rec(mu + 1);
        pick.pop_back();
    };
    rec(1);
    auto coeffs = detail::coefficient_monomials(cfg, spec);
    auto km = kappa_rank(cfg);
    for (const auto& hm : hmonos)
        for (int alpha = 0; alpha < km; ++alpha)
            for (const auto& sigma : indices_up_to(cfg.n, spec.max_jet))
                for (const auto& pm : coeffs)
                    b.add(OpElem{pm, hm, alpha, sigma});
    return b;
}

// w = d_k^h after the operator, on even arguments:
// w(a tensor e_{alpha,sigma}) = d_k^h(a) tensor e_{alpha,sigma}
//   + (-1)^{|a| + |K_alpha|} sum_mu (a . d_k x^mu) tensor e_{alpha,sigma+1_mu}
struct OpImage {
    std::map<OpElem, Rational> terms;

    void add(const OpElem& e, const Rational& c)
    {
        if (c == 0)
            return;
        auto it = terms.find(e);
        if (it == terms.end())
            terms[e] = c;
        else {
            it->second += c;
            if (it->second == 0)
                terms.erase(it);
        }
    }
};

inline OpImage w_image(const BundleConfig& cfg, const OpElem& e)
{
    OpImage out;
    Polynomial p;
    p.add_term(e.coeff, Rational(1));
    FormExpr a(cfg);
    a.add_term(e.hform, Coefficient(p));
    // d_k^h of the scalar-times-form part
    FormExpr da = differential(cfg.k, SlotKind::Horizontal, a);
    for (const auto& [mono, coeff] : da.terms())
        for (const auto& [pm, c] : coeff.num().terms())
            out.add(OpElem{pm, mono, e.alpha, e.sigma}, c);
    // the derivative falling on the argument
    auto [j, K] = kappa_slot_decode(cfg, e.alpha);
    int par = 0;
    for (const auto& [g, ex] : e.hform.factors())
        par += ex * g.parity();
    par += K.parity();
    for (int mu = 1; mu <= cfg.n; ++mu) {
        FormExpr am =
            a.wedge(FormExpr::generator(cfg, Generator::horizontal(mu, SlotSet::single(cfg.k))));
        for (const auto& [mono, coeff] : am.terms())
            for (const auto& [pm, c] : coeff.num().terms())
                out.add(OpElem{pm, mono, e.alpha, e.sigma.bump(mu - 1)},
                        (par & 1) ? -c : c);
    }
    return out;
}

struct OpMatrix {
    RationalMatrix matrix;
    OpSliceBasis target;
};

inline OpMatrix w_matrix(const BundleConfig& cfg, const OpSliceBasis& domain)
{
    std::vector<OpImage> images;
    images.reserve(domain.size());
    OpSliceBasis target;
    target.cfg = cfg;
    for (int i = 0; i < domain.size(); ++i) {
        images.push_back(w_image(cfg, domain.elems[i]));
        for (const auto& [e, c] : images.back().terms)
            target.add(e);
    }
    OpMatrix out;
    out.target = std::move(target);
    out.matrix = RationalMatrix(out.target.size(), domain.size());
    for (int i = 0; i < domain.size(); ++i)
        for (const auto& [e, c] : images[i].terms)
            out.matrix.at(out.target.index.at(e), i) = c;
    return out;
}

} // namespace jetforms
