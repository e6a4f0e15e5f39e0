#pragma once

#include "cpn/error.hpp"
#include "cpn/scalar.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cpn {

enum class Sort { Place, Transition };

inline const char* to_string(Sort s) { return s == Sort::Place ? "place" : "transition"; }

/// Which of the two Petri topologies a basis or openness test refers to.
/// In the P-topology the open sets are the place-bordered subnets; the
/// T-topology is its dual (its opens are the P-closed sets).
enum class Topology { P, T };

/// Finite bipartite node set with undirected place-transition adjacency.
class PetriSpace {
public:
    PetriSpace();
    /// Adjacency pairs are given by node index; each pair must join a place and a transition.
    PetriSpace(std::vector<std::string> names, std::vector<Sort> sorts,
               const std::vector<std::pair<Index, Index>>& adjacency);

    Index size() const { return static_cast<Index>(names_.size()); }
    const std::string& name(Index i) const { return names_[check(i)]; }
    Sort sort(Index i) const { return sorts_[check(i)]; }
    bool is_place(Index i) const { return sort(i) == Sort::Place; }
    bool is_transition(Index i) const { return sort(i) == Sort::Transition; }
    /// Index of a node by name; throws StructuralError if absent.
    Index index_of(const std::string& name) const;
    bool has_node(const std::string& name) const { return by_name_.count(name) != 0; }

    /// Adjacent nodes of the opposite sort, in declaration order.
    const std::vector<Index>& neighbours(Index i) const { return adj_[check(i)]; }
    bool adjacent(Index a, Index b) const;
    std::vector<std::pair<Index, Index>> adjacency_pairs() const;

    std::vector<Index> places() const;
    std::vector<Index> transitions() const;

    /// Identity of this space; copies share it, separately built spaces never do.
    std::uint64_t id() const { return id_; }

private:
    std::size_t check(Index i) const;

    std::vector<std::string> names_;
    std::vector<Sort> sorts_;
    std::vector<std::vector<Index>> adj_;
    std::unordered_map<std::string, Index> by_name_;
    std::uint64_t id_;
};

/// Subset of the nodes of one particular space.
class NodeSet {
public:
    NodeSet() = default;
    explicit NodeSet(const PetriSpace& space);
    NodeSet(const PetriSpace& space, const std::vector<Index>& members);
    static NodeSet all(const PetriSpace& space);
    static NodeSet of_sort(const PetriSpace& space, Sort s);

    std::uint64_t space_id() const { return space_id_; }
    Index universe() const { return static_cast<Index>(bits_.size()); }
    bool contains(Index i) const;
    void insert(Index i);
    void erase(Index i);
    bool empty() const;
    Index count() const;
    /// Members in declaration order.
    std::vector<Index> members() const;
    std::vector<Index> places(const PetriSpace& space) const;
    std::vector<Index> transitions(const PetriSpace& space) const;

    NodeSet operator|(const NodeSet& o) const;
    NodeSet operator&(const NodeSet& o) const;
    NodeSet operator-(const NodeSet& o) const;
    NodeSet complement() const;
    bool subset_of(const NodeSet& o) const;

    friend bool operator==(const NodeSet& a, const NodeSet& b)
    {
        return a.space_id_ == b.space_id_ && a.bits_ == b.bits_;
    }
    friend bool operator!=(const NodeSet& a, const NodeSet& b) { return !(a == b); }
    friend bool operator<(const NodeSet& a, const NodeSet& b) { return a.bits_ < b.bits_; }

private:
    void same_space(const NodeSet& o) const;

    std::uint64_t space_id_ = 0;
    std::vector<bool> bits_;
};

/// Throws StructuralError unless s belongs to space.
void require_member(const PetriSpace& space, const NodeSet& s);

bool is_open(const PetriSpace& space, const NodeSet& s, Topology topo = Topology::P);
bool is_closed(const PetriSpace& space, const NodeSet& s, Topology topo = Topology::P);

/// Minimal P-open neighbourhood of a transition: t with its pre- and postset.
NodeSet basic_open(const PetriSpace& space, Index t);
/// Minimal P-closed superset of a place: p with its pre- and posttransitions.
NodeSet basic_closed(const PetriSpace& space, Index p);
/// Minimal P-open neighbourhood of any node ({p} for a place).
NodeSet minimal_open(const PetriSpace& space, Index x);
/// Minimal P-closed superset of any node ({t} for a transition).
NodeSet minimal_closed(const PetriSpace& space, Index x);
/// Smallest P-open superset, resp. P-closed superset, of s.
NodeSet open_hull(const PetriSpace& space, const NodeSet& s);
NodeSet closed_hull(const PetriSpace& space, const NodeSet& s);

/// {p} for every place and the basic open of every transition (P-topology),
/// or {t} and the basic closed set of every place (T-topology); points first, each group in declaration order.
std::vector<NodeSet> canonical_basis(const PetriSpace& space, Topology topo = Topology::P);

/// Total function between node sets. No sort constraint.
class SpaceMap {
public:
    SpaceMap() = default;
    SpaceMap(PetriSpace source, PetriSpace target, std::vector<Index> assignment);
    static SpaceMap identity(const PetriSpace& space);

    const PetriSpace& source() const { return source_; }
    const PetriSpace& target() const { return target_; }
    Index operator()(Index x) const { return assignment_.at(static_cast<std::size_t>(x)); }
    const std::vector<Index>& assignment() const { return assignment_; }

    NodeSet fibre(Index y) const;
    NodeSet preimage(const NodeSet& q) const;
    NodeSet image(const NodeSet& s) const;
    NodeSet image() const;

    bool is_injective() const;
    bool is_surjective() const;

private:
    PetriSpace source_;
    PetriSpace target_;
    std::vector<Index> assignment_;
};

/// g after f.
SpaceMap compose(const SpaceMap& g, const SpaceMap& f);

/// Preimage of every canonical-basis open of the target is open.
bool check_continuous(const SpaceMap& m);
/// Places to places and transitions to transitions.
bool is_discrete(const SpaceMap& m);
/// Image of every open set is open.
bool is_open_map(const SpaceMap& m);
/// Injective, continuous, and a homeomorphism onto its image (subspace topology).
bool is_topological_embedding(const SpaceMap& m);

/// Subspace on the given nodes (declaration order kept) with its inclusion.
std::pair<PetriSpace, SpaceMap> subspace(const PetriSpace& space, const NodeSet& s);

/// Quotient by the equivalence generated by same-sort pairs. The class
/// representative is its first member in declaration order and lends its name.
std::pair<PetriSpace, SpaceMap> quotient(const PetriSpace& space,
                                         const std::vector<std::pair<Index, Index>>& pairs);

std::string format_nodes(const PetriSpace& space, const NodeSet& s);

} // namespace cpn
