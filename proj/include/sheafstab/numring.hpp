#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "detail/linear.hpp"
#include "errors.hpp"
#include "rational.hpp"

namespace sheafstab {

class VarietyModel;
using ModelPtr = std::shared_ptr<const VarietyModel>;

/// Element of the graded numerical ring of a model variety: one rational
/// coordinate vector per codimension 0..n, in the model's fixed basis.
class GradedClass {
public:
    GradedClass(ModelPtr model, std::vector<std::vector<Rational>> components);

    static GradedClass zero(ModelPtr model);
    static GradedClass basis_element(ModelPtr model, int codim, std::size_t index);
    static GradedClass unit(ModelPtr model);

    const ModelPtr& model() const { return model_; }
    const std::vector<Rational>& component(int codim) const { return comps_.at(static_cast<std::size_t>(codim)); }
    const Rational& coeff(int codim, std::size_t index) const { return component(codim).at(index); }

    bool is_zero() const {
        for (const auto& c : comps_)
            for (const auto& x : c)
                if (!x.is_zero())
                    return false;
        return true;
    }

    /// Codimension of a nonzero class concentrated in one degree, if any.
    std::optional<int> pure_codim() const {
        std::optional<int> found;
        for (std::size_t p = 0; p < comps_.size(); ++p) {
            for (const auto& x : comps_[p]) {
                if (!x.is_zero()) {
                    if (found && *found != static_cast<int>(p))
                        return std::nullopt;
                    found = static_cast<int>(p);
                    break;
                }
            }
        }
        return found;
    }

    /// Lowest codimension carrying a nonzero coordinate; nullopt for zero.
    std::optional<int> lowest_nonzero_codim() const {
        for (std::size_t p = 0; p < comps_.size(); ++p)
            for (const auto& x : comps_[p])
                if (!x.is_zero())
                    return static_cast<int>(p);
        return std::nullopt;
    }

    GradedClass& operator+=(const GradedClass& o) {
        require_same_model(o);
        for (std::size_t p = 0; p < comps_.size(); ++p)
            for (std::size_t i = 0; i < comps_[p].size(); ++i)
                comps_[p][i] += o.comps_[p][i];
        return *this;
    }
    GradedClass& operator-=(const GradedClass& o) {
        require_same_model(o);
        for (std::size_t p = 0; p < comps_.size(); ++p)
            for (std::size_t i = 0; i < comps_[p].size(); ++i)
                comps_[p][i] -= o.comps_[p][i];
        return *this;
    }
    friend GradedClass operator+(GradedClass a, const GradedClass& b) { a += b; return a; }
    friend GradedClass operator-(GradedClass a, const GradedClass& b) { a -= b; return a; }
    GradedClass operator-() const {
        GradedClass out = *this;
        for (auto& c : out.comps_)
            for (auto& x : c)
                x = -x;
        return out;
    }
    friend GradedClass operator*(const Rational& k, GradedClass a) {
        for (auto& c : a.comps_)
            for (auto& x : c)
                x *= k;
        return a;
    }

    friend bool operator==(const GradedClass& a, const GradedClass& b) {
        a.require_same_model(b);
        return a.comps_ == b.comps_;
    }
    friend bool operator!=(const GradedClass& a, const GradedClass& b) { return !(a == b); }

    void require_same_model(const GradedClass& o) const {
        if (model_.get() != o.model_.get())
            throw ValidationError("graded classes reference different variety models");
    }

private:
    ModelPtr model_;
    std::vector<std::vector<Rational>> comps_;
};

/// Immutable intersection-theory data of a model variety.  Construction
/// validates the structure constants; a corrupt table never produces a
/// usable object.
class VarietyModel : public std::enable_shared_from_this<VarietyModel> {
public:
    struct ProductEntry {
        int p = 0, q = 0;
        std::size_t i = 0, j = 0;
        std::vector<Rational> coeffs; // coordinates in codim p+q
    };

    struct Data {
        std::string name;
        int dimension = 0;
        std::vector<std::size_t> ranks;                      // size n+1
        std::vector<std::vector<std::string>> basis;         // labels per codim
        std::vector<ProductEntry> products;                  // entries with p, q >= 1
        std::vector<Rational> integration;                   // functional on codim n
        std::vector<std::vector<Rational>> todd;             // coordinates per codim
        Rational euler_char;
        std::vector<std::vector<std::vector<Rational>>> nef_facets; // per codim, list of functionals
        std::optional<std::vector<Rational>> polarization;   // optional ample 1-class
    };

    static ModelPtr create(Data data);

    const std::string& name() const { return data_.name; }
    int dimension() const { return data_.dimension; }
    std::size_t rank(int codim) const { return data_.ranks.at(static_cast<std::size_t>(codim)); }
    const std::string& basis_label(int codim, std::size_t i) const {
        return data_.basis.at(static_cast<std::size_t>(codim)).at(i);
    }
    const std::vector<Rational>& integration_vector() const { return data_.integration; }
    const Rational& euler_char() const { return data_.euler_char; }
    const std::vector<std::vector<Rational>>& nef_facets(int codim) const {
        return data_.nef_facets.at(static_cast<std::size_t>(codim));
    }
    const Data& data() const { return data_; }

    GradedClass todd_class() const {
        return GradedClass(shared_from_this(), data_.todd);
    }
    std::optional<GradedClass> polarization_class() const {
        if (!data_.polarization)
            return std::nullopt;
        auto comps = zero_components();
        comps[1] = *data_.polarization;
        return GradedClass(shared_from_this(), std::move(comps));
    }

    std::vector<std::vector<Rational>> zero_components() const {
        std::vector<std::vector<Rational>> comps(static_cast<std::size_t>(data_.dimension) + 1);
        for (int p = 0; p <= data_.dimension; ++p)
            comps[static_cast<std::size_t>(p)].assign(rank(p), Rational(0));
        return comps;
    }

    /// Structure constants of e_{p,i} * e_{q,j}, as coordinates in codim p+q.
    /// Zero vector when the product vanishes or lands above codim n.
    const std::vector<Rational>& product(int p, std::size_t i, int q, std::size_t j) const {
        static const std::vector<Rational> kEmpty;
        if (p + q > data_.dimension)
            return kEmpty;
        return table_[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)][i][j];
    }

private:
    explicit VarietyModel(Data data) : data_(std::move(data)) {}
    void build_table();
    void validate(const ModelPtr& self) const;

    Data data_;
    // table_[p][q][i][j] = coordinates of e_{p,i} * e_{q,j} in codim p+q.
    std::vector<std::vector<std::vector<std::vector<std::vector<Rational>>>>> table_;
};

inline GradedClass::GradedClass(ModelPtr model, std::vector<std::vector<Rational>> components)
    : model_(std::move(model)), comps_(std::move(components)) {
    if (!model_)
        throw ValidationError("graded class without a variety model");
    const int n = model_->dimension();
    if (comps_.size() != static_cast<std::size_t>(n) + 1)
        throw ValidationError("graded class has wrong number of graded components");
    for (int p = 0; p <= n; ++p)
        if (comps_[static_cast<std::size_t>(p)].size() != model_->rank(p))
            throw ValidationError("graded class component in codim " + std::to_string(p) +
                                  " has wrong length");
}

inline GradedClass GradedClass::zero(ModelPtr model) {
    auto comps = model->zero_components();
    return GradedClass(std::move(model), std::move(comps));
}

inline GradedClass GradedClass::basis_element(ModelPtr model, int codim, std::size_t index) {
    auto comps = model->zero_components();
    comps.at(static_cast<std::size_t>(codim)).at(index) = Rational(1);
    return GradedClass(std::move(model), std::move(comps));
}

inline GradedClass GradedClass::unit(ModelPtr model) {
    return basis_element(std::move(model), 0, 0);
}

/// Graded ring product; components above codim n vanish by convention.
inline GradedClass multiply(const GradedClass& a, const GradedClass& b) {
    a.require_same_model(b);
    const auto& model = *a.model();
    const int n = model.dimension();
    auto out = model.zero_components();
    for (int p = 0; p <= n; ++p) {
        for (int q = 0; p + q <= n; ++q) {
            for (std::size_t i = 0; i < model.rank(p); ++i) {
                const Rational& ai = a.coeff(p, i);
                if (ai.is_zero())
                    continue;
                for (std::size_t j = 0; j < model.rank(q); ++j) {
                    const Rational& bj = b.coeff(q, j);
                    if (bj.is_zero())
                        continue;
                    const auto& sc = model.product(p, i, q, j);
                    if (sc.empty())
                        continue;
                    const Rational scale = ai * bj;
                    auto& target = out[static_cast<std::size_t>(p + q)];
                    for (std::size_t k = 0; k < sc.size(); ++k)
                        if (!sc[k].is_zero())
                            target[k] += scale * sc[k];
                }
            }
        }
    }
    return GradedClass(a.model(), std::move(out));
}

/// Applies the integration functional to the top-codimension component.
inline Rational integrate(const GradedClass& a) {
    const auto& model = *a.model();
    const int n = model.dimension();
    const auto& top = a.component(n);
    const auto& w = model.integration_vector();
    Rational out(0);
    for (std::size_t k = 0; k < top.size(); ++k)
        out += w[k] * top[k];
    return out;
}

inline void VarietyModel::build_table() {
    const int n = data_.dimension;
    const auto np = static_cast<std::size_t>(n) + 1;
    table_.assign(np, {});
    for (int p = 0; p <= n; ++p) {
        table_[static_cast<std::size_t>(p)].resize(np);
        for (int q = 0; p + q <= n; ++q) {
            auto& pq = table_[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
            pq.assign(rank(p), std::vector<std::vector<Rational>>(
                                   rank(q), std::vector<Rational>(rank(p + q), Rational(0))));
        }
    }
    // The unit of the ring: e_{0,0} * e_{q,j} = e_{q,j}.
    for (int q = 0; q <= n; ++q)
        for (std::size_t j = 0; j < rank(q); ++j) {
            table_[0][static_cast<std::size_t>(q)][0][j][j] = Rational(1);
            table_[static_cast<std::size_t>(q)][0][j][0][j] = Rational(1);
        }

    std::map<std::tuple<int, int, std::size_t, std::size_t>, bool> seen;
    for (const auto& e : data_.products) {
        if (e.p < 0 || e.q < 0 || e.p > n || e.q > n)
            throw ValidationError("product entry with codimension out of range in model '" + data_.name + "'");
        if (e.p + e.q > n)
            throw ValidationError("product entry lands above the top codimension in model '" + data_.name + "'");
        if (e.i >= rank(e.p) || e.j >= rank(e.q))
            throw ValidationError("product entry with basis index out of range in model '" + data_.name + "'");
        if (e.coeffs.size() != rank(e.p + e.q))
            throw ValidationError("product entry with wrong coefficient length in model '" + data_.name + "'");
        if (e.p == 0 || e.q == 0) {
            // Unit products are implied; tolerate explicit entries only if consistent.
            const auto& expected = table_[static_cast<std::size_t>(e.p)][static_cast<std::size_t>(e.q)][e.i][e.j];
            if (e.coeffs != expected)
                throw ValidationError("product entry contradicts the ring unit in model '" + data_.name + "'");
            continue;
        }
        if (seen.count({e.p, e.q, e.i, e.j}))
            throw ValidationError("duplicate product entry in model '" + data_.name + "'");
        seen[{e.p, e.q, e.i, e.j}] = true;
        table_[static_cast<std::size_t>(e.p)][static_cast<std::size_t>(e.q)][e.i][e.j] = e.coeffs;
    }
    // Symmetrize.  Entries given on both sides must agree (commutativity).
    for (const auto& [key, unused] : seen) {
        (void)unused;
        const auto [p, q, i, j] = key;
        auto& forward = table_[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)][i][j];
        auto& backward = table_[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)][j][i];
        if (seen.count({q, p, j, i})) {
            if (forward != backward)
                throw ValidationError("product table is not commutative in model '" + data_.name + "'");
        } else {
            backward = forward;
        }
    }
}

inline void VarietyModel::validate(const ModelPtr& self) const {
    const int n = data_.dimension;
    // Associativity on all basis triples, with truncation above codim n.
    for (int p = 0; p <= n; ++p)
        for (std::size_t i = 0; i < rank(p); ++i) {
            const auto ei = GradedClass::basis_element(self, p, i);
            for (int q = 0; p + q <= n; ++q)
                for (std::size_t j = 0; j < rank(q); ++j) {
                    const auto ej = GradedClass::basis_element(self, q, j);
                    const auto eij = multiply(ei, ej);
                    for (int s = 0; s <= n; ++s)
                        for (std::size_t k = 0; k < rank(s); ++k) {
                            const auto ek = GradedClass::basis_element(self, s, k);
                            if (multiply(eij, ek) != multiply(ei, multiply(ej, ek)))
                                throw ValidationError("product table is not associative in model '" +
                                                      data_.name + "'");
                        }
                }
        }
    // Todd class shape and the Euler characteristic consistency check.
    if (data_.todd.size() != static_cast<std::size_t>(n) + 1)
        throw ValidationError("todd class has wrong number of components in model '" + data_.name + "'");
    for (int p = 0; p <= n; ++p)
        if (data_.todd[static_cast<std::size_t>(p)].size() != rank(p))
            throw ValidationError("todd component in codim " + std::to_string(p) +
                                  " has wrong length in model '" + data_.name + "'");
    if (data_.todd[0][0] != Rational(1))
        throw ValidationError("todd class must start with the unit in model '" + data_.name + "'");
    const GradedClass td(self, data_.todd);
    if (integrate(td) != data_.euler_char)
        throw ValidationError("integral of the top Todd component disagrees with the declared "
                              "Euler characteristic in model '" + data_.name + "'");
    // Nef data: one nonempty facet list per codim, full-dimensional interior.
    if (data_.nef_facets.size() != static_cast<std::size_t>(n) + 1)
        throw ValidationError("nef facet data missing some codimension in model '" + data_.name + "'");
    for (int p = 0; p <= n; ++p) {
        const auto& facets = data_.nef_facets[static_cast<std::size_t>(p)];
        if (facets.empty())
            throw ValidationError("empty nef facet list in codim " + std::to_string(p) +
                                  " in model '" + data_.name + "'");
        std::vector<detail::LinearGe> rows;
        for (const auto& f : facets) {
            if (f.size() != rank(p))
                throw ValidationError("nef facet functional with wrong length in codim " +
                                      std::to_string(p) + " in model '" + data_.name + "'");
            rows.push_back({f, Rational(1)});
        }
        if (!detail::feasible(std::move(rows), rank(p)))
            throw ValidationError("nef cone has empty interior in codim " + std::to_string(p) +
                                  " in model '" + data_.name + "'");
    }
}

/// Nef / ample cone membership for a pure-codimension class.
inline bool cone_test(const GradedClass& alpha, bool strict) {
    const auto p = alpha.pure_codim();
    if (!p)
        throw ValidationError("cone test requires a nonzero pure-codimension class");
    const auto& comp = alpha.component(*p);
    for (const auto& facet : alpha.model()->nef_facets(*p)) {
        Rational v(0);
        for (std::size_t k = 0; k < comp.size(); ++k)
            v += facet[k] * comp[k];
        if (strict ? v.sign() <= 0 : v.sign() < 0)
            return false;
    }
    return true;
}

/// Numerical class of a coherent sheaf: a Chern character plus the declared
/// support dimension.  A d-dimensional class has no component below codim n-d.
struct SheafClass {
    GradedClass ch;
    int dim;

    SheafClass(GradedClass c, int d) : ch(std::move(c)), dim(d) {
        const int n = ch.model()->dimension();
        if (dim < 0 || dim > n)
            throw ValidationError("sheaf class with dimension outside 0..n");
        for (int p = 0; p < n - dim; ++p)
            for (const auto& x : ch.component(p))
                if (!x.is_zero())
                    throw ValidationError("sheaf class of dimension " + std::to_string(dim) +
                                          " has a nonzero component in codim " + std::to_string(p));
    }

    bool is_zero() const { return ch.is_zero(); }

    /// Largest dimension compatible with the character: n minus the lowest
    /// nonzero codimension.  nullopt for the zero class.
    static std::optional<int> natural_dim(const GradedClass& ch) {
        const auto low = ch.lowest_nonzero_codim();
        if (!low)
            return std::nullopt;
        return ch.model()->dimension() - *low;
    }
};

/// deg_alpha(gamma) = integral of ch(gamma) . alpha . Todd.
inline Rational degree(const SheafClass& gamma, const GradedClass& alpha) {
    gamma.ch.require_same_model(alpha);
    if (!alpha.pure_codim())
        throw ValidationError("degree requires a nonzero pure-codimension class");
    return integrate(multiply(multiply(gamma.ch, alpha), gamma.ch.model()->todd_class()));
}

/// Coordinatewise intervals bounding the compact dual polytope
/// {b : b_j >= c_j, sum a_j b_j <= c}; "empty" when some interval inverts.
struct DualPolytopeBounds {
    bool empty = false;
    std::vector<std::pair<Rational, Rational>> intervals; // [lo_j, hi_j]
};

inline DualPolytopeBounds bound_dual_polytope(const std::vector<Rational>& a,
                                              const std::vector<Rational>& lower,
                                              const Rational& upper) {
    if (a.size() != lower.size())
        throw ValidationError("dual polytope bound: weight and lower-bound lists differ in length");
    if (a.empty())
        throw ValidationError("dual polytope bound: empty coordinate list");
    for (const auto& aj : a)
        if (aj.sign() <= 0)
            throw ValidationError("dual polytope bound: weights must be strictly positive");
    Rational total(0);
    for (std::size_t i = 0; i < a.size(); ++i)
        total += a[i] * lower[i];
    DualPolytopeBounds out;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const Rational hi = (upper - (total - a[j] * lower[j])) / a[j];
        if (lower[j] > hi)
            out.empty = true;
        out.intervals.emplace_back(lower[j], hi);
    }
    if (out.empty)
        out.intervals.clear();
    return out;
}

inline ModelPtr VarietyModel::create(Data data) {
    if (data.dimension < 1)
        throw ValidationError("variety dimension must be at least 1");
    const auto n = static_cast<std::size_t>(data.dimension);
    if (data.ranks.size() != n + 1)
        throw ValidationError("rank list must have dimension+1 entries in model '" + data.name + "'");
    for (auto r : data.ranks)
        if (r == 0)
            throw ValidationError("every graded piece must have positive rank in model '" + data.name + "'");
    if (data.ranks[0] != 1)
        throw ValidationError("codim 0 must have rank 1 in model '" + data.name + "'");
    if (data.basis.size() != n + 1)
        throw ValidationError("basis label table must have dimension+1 rows in model '" + data.name + "'");
    for (std::size_t p = 0; p <= n; ++p)
        if (data.basis[p].size() != data.ranks[p])
            throw ValidationError("basis label row length mismatch in codim " + std::to_string(p) +
                                  " in model '" + data.name + "'");
    if (data.integration.size() != data.ranks[n])
        throw ValidationError("integration vector has wrong length in model '" + data.name + "'");
    if (data.polarization && data.polarization->size() != data.ranks[1])
        throw ValidationError("polarization class has wrong length in model '" + data.name + "'");

    std::shared_ptr<VarietyModel> model(new VarietyModel(std::move(data)));
    model->build_table();
    model->validate(model);
    if (model->data_.polarization) {
        auto comps = model->zero_components();
        comps[1] = *model->data_.polarization;
        if (!cone_test(GradedClass(model, std::move(comps)), true))
            throw ValidationError("declared polarization is not ample in model '" + model->data_.name + "'");
    }
    return model;
}

} // namespace sheafstab
