#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stability.hpp"

namespace sheafstab {

/// Finite lattice of subobject classes: a DAG of inclusions with a zero
/// node below everything and a root (the full object) above everything.
/// A finite lattice stands in for the subsheaf quantifier of the theory;
/// the library never checks that the classes are realized by sheaves.
class SubobjectLattice {
public:
    struct Node {
        std::string id;
        SheafClass cls;
    };

    SubobjectLattice(std::vector<Node> nodes,
                     std::vector<std::pair<std::string, std::string>> edges,
                     const std::string& zero_id, const std::string& root_id)
        : nodes_(std::move(nodes)) {
        if (nodes_.empty())
            throw ValidationError("empty lattice");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].id.empty())
                throw ValidationError("lattice node with empty id");
            if (!index_.emplace(nodes_[i].id, i).second)
                throw ValidationError("duplicate lattice node id '" + nodes_[i].id + "'");
            nodes_[i].cls.ch.require_same_model(nodes_.front().cls.ch);
        }
        zero_ = checked_index(zero_id);
        root_ = checked_index(root_id);
        if (!nodes_[zero_].cls.is_zero())
            throw ValidationError("zero node '" + zero_id + "' has a nonzero class");
        up_.assign(nodes_.size(), {});
        down_.assign(nodes_.size(), {});
        for (const auto& [child, parent] : edges) {
            const std::size_t a = checked_index(child);
            const std::size_t b = checked_index(parent);
            if (a == b)
                throw ValidationError("lattice edge from '" + child + "' to itself");
            up_[a].push_back(b);
            down_[b].push_back(a);
            const GradedClass diff = nodes_[b].cls.ch - nodes_[a].cls.ch;
            const auto nat = SheafClass::natural_dim(diff);
            if (nat && *nat > nodes_[b].cls.dim)
                throw ValidationError("edge ('" + child + "', '" + parent +
                                      "') has an ill-formed quotient class");
        }
        check_acyclic();
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!reaches(zero_, i))
                throw ValidationError("node '" + nodes_[i].id + "' is not above the zero node");
            if (!reaches(i, root_))
                throw ValidationError("node '" + nodes_[i].id + "' is not below the root");
        }
    }

    std::size_t size() const { return nodes_.size(); }
    const Node& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t index_of(const std::string& id) const { return checked_index(id); }
    bool has_node(const std::string& id) const { return index_.count(id) != 0; }
    std::size_t zero_index() const { return zero_; }
    std::size_t root_index() const { return root_; }

    /// Indices reachable from i along inclusion edges, including i itself.
    std::set<std::size_t> above(std::size_t i) const {
        std::set<std::size_t> seen{i};
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            for (std::size_t next : up_[cur])
                if (seen.insert(next).second)
                    stack.push_back(next);
        }
        return seen;
    }

    bool reaches(std::size_t a, std::size_t b) const { return above(a).count(b) != 0; }

private:
    std::size_t checked_index(const std::string& id) const {
        const auto it = index_.find(id);
        if (it == index_.end())
            throw ValidationError("unknown lattice node id '" + id + "'");
        return it->second;
    }

    void check_acyclic() const {
        // Kahn's algorithm; leftovers mean a cycle.
        std::vector<std::size_t> indeg(nodes_.size(), 0);
        for (const auto& ups : up_)
            for (std::size_t parent : ups)
                ++indeg[parent];
        std::vector<std::size_t> queue;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (indeg[i] == 0)
                queue.push_back(i);
        std::size_t visited = 0;
        while (!queue.empty()) {
            const std::size_t cur = queue.back();
            queue.pop_back();
            ++visited;
            for (std::size_t parent : up_[cur])
                if (--indeg[parent] == 0)
                    queue.push_back(parent);
        }
        if (visited != nodes_.size())
            throw ValidationError("lattice contains an inclusion cycle");
    }

    std::vector<Node> nodes_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> up_, down_;
    std::size_t zero_ = 0, root_ = 0;
};

struct HNChain {
    std::vector<std::string> node_ids;  // zero first, root last
    std::vector<SheafClass> factors;    // one per step
};

namespace detail {

/// Best node among `pool` by reduced polynomial, ties broken by largest
/// top degree; a residual class is supplied per pool entry.
inline std::size_t select_mds(const SubobjectLattice& lattice, const DegreeSystem& sys,
                              const std::vector<std::pair<std::size_t, SheafClass>>& pool) {
    if (pool.empty())
        throw ValidationError("lattice has no nonzero subobject to select from");
    std::vector<HilbertPoly> reduced;
    reduced.reserve(pool.size());
    for (const auto& [idx, cls] : pool) {
        try {
            reduced.push_back(reduced_hilbert(cls, sys));
        } catch (const ValidationError& e) {
            throw ValidationError("node '" + lattice.node(idx).id +
                                  "' has no reduced polynomial: " + e.what());
        }
    }
    std::vector<std::size_t> best{0};
    for (std::size_t k = 1; k < pool.size(); ++k) {
        const Comparison cmp = compare_asymptotic(reduced[k], reduced[best.front()]);
        if (cmp == Comparison::Greater)
            best = {k};
        else if (cmp == Comparison::Equal)
            best.push_back(k);
    }
    if (best.size() > 1) {
        const int d = sys.d();
        Rational top_max;
        bool first = true;
        for (std::size_t k : best) {
            const Rational t = degree(pool[k].second, sys.alpha(d));
            if (first || t > top_max) {
                top_max = t;
                first = false;
            }
        }
        std::vector<std::size_t> winners;
        for (std::size_t k : best)
            if (degree(pool[k].second, sys.alpha(d)) == top_max)
                winners.push_back(k);
        best = std::move(winners);
    }
    if (best.size() > 1) {
        std::string ids;
        for (std::size_t k : best)
            ids += (ids.empty() ? "" : ", ") + ("'" + lattice.node(pool[k].first).id + "'");
        throw AmbiguousMdsError("ambiguous-MDS: nodes " + ids +
                                " share the maximal reduced polynomial and top degree");
    }
    return pool[best.front()].first;
}

/// Residual pool above `base`: every strictly larger node with a nonzero
/// class difference.  Throws when a difference has no reduced polynomial
/// window (dimension-degenerate residual).
inline std::vector<std::pair<std::size_t, SheafClass>>
residual_pool(const SubobjectLattice& lattice, std::size_t base) {
    std::vector<std::pair<std::size_t, SheafClass>> pool;
    for (std::size_t idx : lattice.above(base)) {
        if (idx == base)
            continue;
        GradedClass diff = lattice.node(idx).cls.ch - lattice.node(base).cls.ch;
        const auto nat = SheafClass::natural_dim(diff);
        if (!nat)
            continue; // numerically equal to base; not a step
        pool.emplace_back(idx, SheafClass(std::move(diff), *nat));
    }
    return pool;
}

} // namespace detail

/// The maximal destabilizing node of the whole lattice: maximal reduced
/// polynomial among nonzero nodes, ties broken by largest deg_{alpha_d}.
inline std::string maximal_destabilizing(const SubobjectLattice& lattice, const DegreeSystem& sys) {
    std::vector<std::pair<std::size_t, SheafClass>> pool;
    for (std::size_t i = 0; i < lattice.size(); ++i)
        if (!lattice.node(i).cls.is_zero())
            pool.emplace_back(i, lattice.node(i).cls);
    const std::size_t pick = detail::select_mds(lattice, sys, pool);
    return lattice.node(pick).id;
}

/// Iterated maximal-destabilizing recursion on residual lattices.  The
/// returned chain has strictly decreasing factor reduced polynomials;
/// a lattice violating that is rejected.
inline HNChain hn_filtration(const SubobjectLattice& lattice, const DegreeSystem& sys) {
    HNChain chain;
    std::size_t current = lattice.zero_index();
    chain.node_ids.push_back(lattice.node(current).id);
    while (current != lattice.root_index()) {
        auto pool = detail::residual_pool(lattice, current);
        std::size_t pick;
        try {
            pick = detail::select_mds(lattice, sys, pool);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("no admissible step above node '") +
                                  lattice.node(current).id + "': " + e.what());
        }
        for (const auto& [idx, cls] : pool)
            if (idx == pick)
                chain.factors.push_back(cls);
        chain.node_ids.push_back(lattice.node(pick).id);
        current = pick;
        if (chain.node_ids.size() > lattice.size() + 1)
            throw ValidationError("lattice recursion failed to terminate");
    }
    for (std::size_t i = 0; i + 1 < chain.factors.size(); ++i) {
        const HilbertPoly a = reduced_hilbert(chain.factors[i], sys);
        const HilbertPoly b = reduced_hilbert(chain.factors[i + 1], sys);
        if (compare_asymptotic(b, a) != Comparison::Less)
            throw ValidationError("lattice admits no Harder-Narasimhan chain: factor polynomials "
                                  "do not strictly decrease");
    }
    return chain;
}

struct HnReport {
    bool ok = true;
    std::vector<std::string> failures;

    void fail(std::string msg) {
        ok = false;
        failures.push_back(std::move(msg));
    }
};

/// Checks a user-supplied chain: endpoints, reachability, strictly
/// decreasing factor polynomials, and semistability of every factor
/// against the nodes lying between consecutive chain entries.
inline HnReport verify_hn(const SubobjectLattice& lattice, const DegreeSystem& sys, const HNChain& chain) {
    HnReport report;
    if (chain.node_ids.size() < 2) {
        report.fail("chain must contain at least the zero node and the root");
        return report;
    }
    for (const auto& id : chain.node_ids)
        if (!lattice.has_node(id)) {
            report.fail("chain node '" + id + "' is not in the lattice");
            return report;
        }
    if (lattice.index_of(chain.node_ids.front()) != lattice.zero_index())
        report.fail("chain does not start at the zero node");
    if (lattice.index_of(chain.node_ids.back()) != lattice.root_index())
        report.fail("chain does not end at the root");
    if (chain.factors.size() + 1 != chain.node_ids.size())
        report.fail("chain has " + std::to_string(chain.factors.size()) + " factors for " +
                    std::to_string(chain.node_ids.size()) + " nodes");

    std::vector<HilbertPoly> reduced;
    for (std::size_t i = 0; i + 1 < chain.node_ids.size(); ++i) {
        const std::size_t a = lattice.index_of(chain.node_ids[i]);
        const std::size_t b = lattice.index_of(chain.node_ids[i + 1]);
        if (a == b || !lattice.reaches(a, b)) {
            report.fail("chain step '" + chain.node_ids[i] + "' -> '" + chain.node_ids[i + 1] +
                        "' does not follow lattice inclusions");
            continue;
        }
        GradedClass diff = lattice.node(b).cls.ch - lattice.node(a).cls.ch;
        const auto nat = SheafClass::natural_dim(diff);
        if (!nat) {
            report.fail("chain step '" + chain.node_ids[i] + "' -> '" + chain.node_ids[i + 1] +
                        "' has a zero factor");
            continue;
        }
        const SheafClass factor(std::move(diff), *nat);
        if (i < chain.factors.size() && !(factor.ch == chain.factors[i].ch))
            report.fail("stored factor " + std::to_string(i) + " disagrees with the node classes");
        try {
            reduced.push_back(reduced_hilbert(factor, sys));
        } catch (const ValidationError& e) {
            report.fail("factor " + std::to_string(i) + " has no reduced polynomial: " + e.what());
            continue;
        }
        // Factor semistability relative to the nodes between a and b.
        std::vector<SheafClass> candidates;
        const auto reach_a = lattice.above(a);
        for (std::size_t mid : reach_a) {
            if (mid == a || !lattice.reaches(mid, b))
                continue;
            GradedClass sub = lattice.node(mid).cls.ch - lattice.node(a).cls.ch;
            const auto nat_mid = SheafClass::natural_dim(sub);
            if (!nat_mid)
                continue;
            candidates.emplace_back(std::move(sub), *nat_mid);
        }
        try {
            const Verdict v = is_semistable(factor, sys, candidates, CandidateMode::Sub, sys.r());
            if (v.status == StabilityStatus::Unstable)
                report.fail("factor " + std::to_string(i) + " ('" + chain.node_ids[i] + "' -> '" +
                            chain.node_ids[i + 1] + "') is destabilized inside its own step");
        } catch (const ValidationError& e) {
            report.fail("factor " + std::to_string(i) + " not testable: " + e.what());
        }
    }
    for (std::size_t i = 0; i + 1 < reduced.size(); ++i)
        if (compare_asymptotic(reduced[i + 1], reduced[i]) != Comparison::Less)
            report.fail("factor polynomials do not strictly decrease at step " + std::to_string(i + 1));
    return report;
}

} // namespace sheafstab
