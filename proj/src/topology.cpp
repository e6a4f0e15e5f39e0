#include "cpn/topology.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <sstream>

namespace cpn {

namespace {

std::uint64_t next_space_id()
{
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

} // namespace

PetriSpace::PetriSpace()
    : id_(next_space_id())
{
}

PetriSpace::PetriSpace(std::vector<std::string> names, std::vector<Sort> sorts,
                       const std::vector<std::pair<Index, Index>>& adjacency)
    : names_(std::move(names)), sorts_(std::move(sorts)), id_(next_space_id())
{
    if (names_.size() != sorts_.size())
        throw StructuralError("petri space: " + std::to_string(names_.size()) + " names but "
                              + std::to_string(sorts_.size()) + " sorts");
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (!by_name_.emplace(names_[i], static_cast<Index>(i)).second)
            throw StructuralError("petri space: duplicate node '" + names_[i] + "'");
    adj_.resize(names_.size());
    for (auto [a, b] : adjacency) {
        check(a);
        check(b);
        if (sorts_[static_cast<std::size_t>(a)] == sorts_[static_cast<std::size_t>(b)])
            throw SortError("adjacency must join a place and a transition: '" + names_[static_cast<std::size_t>(a)]
                            + "' and '" + names_[static_cast<std::size_t>(b)] + "'");
        adj_[static_cast<std::size_t>(a)].push_back(b);
        adj_[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& row : adj_) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
}

std::size_t PetriSpace::check(Index i) const
{
    if (i < 0 || i >= size())
        throw StructuralError("node index " + std::to_string(i) + " out of range");
    return static_cast<std::size_t>(i);
}

Index PetriSpace::index_of(const std::string& name) const
{
    auto it = by_name_.find(name);
    if (it == by_name_.end())
        throw StructuralError("unknown node '" + name + "'");
    return it->second;
}

bool PetriSpace::adjacent(Index a, Index b) const
{
    const auto& row = neighbours(a);
    return std::binary_search(row.begin(), row.end(), b);
}

std::vector<std::pair<Index, Index>> PetriSpace::adjacency_pairs() const
{
    std::vector<std::pair<Index, Index>> out;
    for (Index p : places())
        for (Index t : neighbours(p))
            out.emplace_back(p, t);
    return out;
}

std::vector<Index> PetriSpace::places() const
{
    std::vector<Index> out;
    for (Index i = 0; i < size(); ++i)
        if (is_place(i))
            out.push_back(i);
    return out;
}

std::vector<Index> PetriSpace::transitions() const
{
    std::vector<Index> out;
    for (Index i = 0; i < size(); ++i)
        if (is_transition(i))
            out.push_back(i);
    return out;
}

// --- NodeSet --------------------------------------------------------------------

NodeSet::NodeSet(const PetriSpace& space)
    : space_id_(space.id()), bits_(static_cast<std::size_t>(space.size()), false)
{
}

NodeSet::NodeSet(const PetriSpace& space, const std::vector<Index>& members)
    : NodeSet(space)
{
    for (Index i : members)
        insert(i);
}

NodeSet NodeSet::all(const PetriSpace& space)
{
    NodeSet s(space);
    s.bits_.assign(s.bits_.size(), true);
    return s;
}

NodeSet NodeSet::of_sort(const PetriSpace& space, Sort sort)
{
    NodeSet s(space);
    for (Index i = 0; i < space.size(); ++i)
        if (space.sort(i) == sort)
            s.insert(i);
    return s;
}

bool NodeSet::contains(Index i) const
{
    return i >= 0 && i < universe() && bits_[static_cast<std::size_t>(i)];
}

void NodeSet::insert(Index i)
{
    if (i < 0 || i >= universe())
        throw StructuralError("node index " + std::to_string(i) + " outside its space");
    bits_[static_cast<std::size_t>(i)] = true;
}

void NodeSet::erase(Index i)
{
    if (i >= 0 && i < universe())
        bits_[static_cast<std::size_t>(i)] = false;
}

bool NodeSet::empty() const
{
    return std::none_of(bits_.begin(), bits_.end(), [](bool b) { return b; });
}

Index NodeSet::count() const
{
    return static_cast<Index>(std::count(bits_.begin(), bits_.end(), true));
}

std::vector<Index> NodeSet::members() const
{
    std::vector<Index> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i])
            out.push_back(static_cast<Index>(i));
    return out;
}

std::vector<Index> NodeSet::places(const PetriSpace& space) const
{
    require_member(space, *this);
    std::vector<Index> out;
    for (Index i : members())
        if (space.is_place(i))
            out.push_back(i);
    return out;
}

std::vector<Index> NodeSet::transitions(const PetriSpace& space) const
{
    require_member(space, *this);
    std::vector<Index> out;
    for (Index i : members())
        if (space.is_transition(i))
            out.push_back(i);
    return out;
}

void NodeSet::same_space(const NodeSet& o) const
{
    if (space_id_ != o.space_id_ || bits_.size() != o.bits_.size())
        throw StructuralError("node sets belong to different spaces");
}

NodeSet NodeSet::operator|(const NodeSet& o) const
{
    same_space(o);
    NodeSet r = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        r.bits_[i] = bits_[i] || o.bits_[i];
    return r;
}

NodeSet NodeSet::operator&(const NodeSet& o) const
{
    same_space(o);
    NodeSet r = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        r.bits_[i] = bits_[i] && o.bits_[i];
    return r;
}

NodeSet NodeSet::operator-(const NodeSet& o) const
{
    same_space(o);
    NodeSet r = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        r.bits_[i] = bits_[i] && !o.bits_[i];
    return r;
}

NodeSet NodeSet::complement() const
{
    NodeSet r = *this;
    r.bits_.flip();
    return r;
}

bool NodeSet::subset_of(const NodeSet& o) const
{
    same_space(o);
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] && !o.bits_[i])
            return false;
    return true;
}

void require_member(const PetriSpace& space, const NodeSet& s)
{
    if (s.space_id() != space.id() || s.universe() != space.size())
        throw StructuralError("node set does not belong to this space");
}

// --- topology ---------------------------------------------------------------------

bool is_open(const PetriSpace& space, const NodeSet& s, Topology topo)
{
    require_member(space, s);
    const Sort border = topo == Topology::P ? Sort::Transition : Sort::Place;
    for (Index x : s.members())
        if (space.sort(x) == border)
            for (Index y : space.neighbours(x))
                if (!s.contains(y))
                    return false;
    return true;
}

bool is_closed(const PetriSpace& space, const NodeSet& s, Topology topo)
{
    require_member(space, s);
    return is_open(space, s.complement(), topo);
}

NodeSet basic_open(const PetriSpace& space, Index t)
{
    if (!space.is_transition(t))
        throw SortError("basic open set requested for place '" + space.name(t) + "'");
    NodeSet s(space, space.neighbours(t));
    s.insert(t);
    return s;
}

NodeSet basic_closed(const PetriSpace& space, Index p)
{
    if (!space.is_place(p))
        throw SortError("basic closed set requested for transition '" + space.name(p) + "'");
    NodeSet s(space, space.neighbours(p));
    s.insert(p);
    return s;
}

NodeSet minimal_open(const PetriSpace& space, Index x)
{
    return space.is_transition(x) ? basic_open(space, x) : NodeSet(space, {x});
}

NodeSet minimal_closed(const PetriSpace& space, Index x)
{
    return space.is_place(x) ? basic_closed(space, x) : NodeSet(space, {x});
}

NodeSet open_hull(const PetriSpace& space, const NodeSet& s)
{
    require_member(space, s);
    NodeSet r = s;
    for (Index x : s.members())
        if (space.is_transition(x))
            for (Index p : space.neighbours(x))
                r.insert(p);
    return r;
}

NodeSet closed_hull(const PetriSpace& space, const NodeSet& s)
{
    require_member(space, s);
    NodeSet r = s;
    for (Index x : s.members())
        if (space.is_place(x))
            for (Index t : space.neighbours(x))
                r.insert(t);
    return r;
}

std::vector<NodeSet> canonical_basis(const PetriSpace& space, Topology topo)
{
    std::vector<NodeSet> out;
    const Sort point = topo == Topology::P ? Sort::Place : Sort::Transition;
    for (Index x : (point == Sort::Place ? space.places() : space.transitions()))
        out.emplace_back(space, std::vector<Index>{x});
    for (Index x : (point == Sort::Place ? space.transitions() : space.places()))
        out.push_back(topo == Topology::P ? basic_open(space, x) : basic_closed(space, x));
    return out;
}

// --- maps ------------------------------------------------------------------------

SpaceMap::SpaceMap(PetriSpace source, PetriSpace target, std::vector<Index> assignment)
    : source_(std::move(source)), target_(std::move(target)), assignment_(std::move(assignment))
{
    if (static_cast<Index>(assignment_.size()) != source_.size())
        throw StructuralError("space map is not total: " + std::to_string(assignment_.size()) + " of "
                              + std::to_string(source_.size()) + " nodes assigned");
    for (Index y : assignment_)
        if (y < 0 || y >= target_.size())
            throw StructuralError("space map assigns a node outside the target");
}

SpaceMap SpaceMap::identity(const PetriSpace& space)
{
    std::vector<Index> a(static_cast<std::size_t>(space.size()));
    std::iota(a.begin(), a.end(), Index{0});
    return SpaceMap(space, space, std::move(a));
}

NodeSet SpaceMap::fibre(Index y) const
{
    NodeSet s(source_);
    for (Index x = 0; x < source_.size(); ++x)
        if (assignment_[static_cast<std::size_t>(x)] == y)
            s.insert(x);
    return s;
}

NodeSet SpaceMap::preimage(const NodeSet& q) const
{
    require_member(target_, q);
    NodeSet s(source_);
    for (Index x = 0; x < source_.size(); ++x)
        if (q.contains(assignment_[static_cast<std::size_t>(x)]))
            s.insert(x);
    return s;
}

NodeSet SpaceMap::image(const NodeSet& s) const
{
    require_member(source_, s);
    NodeSet r(target_);
    for (Index x : s.members())
        r.insert(assignment_[static_cast<std::size_t>(x)]);
    return r;
}

NodeSet SpaceMap::image() const
{
    return image(NodeSet::all(source_));
}

bool SpaceMap::is_injective() const
{
    std::vector<Index> a = assignment_;
    std::sort(a.begin(), a.end());
    return std::adjacent_find(a.begin(), a.end()) == a.end();
}

bool SpaceMap::is_surjective() const
{
    return image().count() == target_.size();
}

SpaceMap compose(const SpaceMap& g, const SpaceMap& f)
{
    if (f.target().id() != g.source().id())
        throw StructuralError("cannot compose space maps: target and source differ");
    std::vector<Index> a;
    for (Index x = 0; x < f.source().size(); ++x)
        a.push_back(g(f(x)));
    return SpaceMap(f.source(), g.target(), std::move(a));
}

bool check_continuous(const SpaceMap& m)
{
    for (const auto& open : canonical_basis(m.target(), Topology::P))
        if (!is_open(m.source(), m.preimage(open)))
            return false;
    return true;
}

bool is_discrete(const SpaceMap& m)
{
    for (Index x = 0; x < m.source().size(); ++x)
        if (m.source().sort(x) != m.target().sort(m(x)))
            return false;
    return true;
}

bool is_open_map(const SpaceMap& m)
{
    for (Index x = 0; x < m.source().size(); ++x)
        if (!is_open(m.target(), m.image(minimal_open(m.source(), x))))
            return false;
    return true;
}

bool is_topological_embedding(const SpaceMap& m)
{
    if (!m.is_injective())
        return false;
    const PetriSpace& X = m.source();
    const PetriSpace& Y = m.target();
    for (Index x = 0; x < X.size(); ++x) {
        const NodeSet ux = minimal_open(X, x);
        const NodeSet ufx = minimal_open(Y, m(x));
        for (Index y = 0; y < X.size(); ++y)
            if (ux.contains(y) != ufx.contains(m(y)))
                return false;
    }
    return true;
}

std::pair<PetriSpace, SpaceMap> subspace(const PetriSpace& space, const NodeSet& s)
{
    require_member(space, s);
    const auto members = s.members();
    std::vector<Index> local(static_cast<std::size_t>(space.size()), -1);
    std::vector<std::string> names;
    std::vector<Sort> sorts;
    for (std::size_t k = 0; k < members.size(); ++k) {
        local[static_cast<std::size_t>(members[k])] = static_cast<Index>(k);
        names.push_back(space.name(members[k]));
        sorts.push_back(space.sort(members[k]));
    }
    std::vector<std::pair<Index, Index>> adj;
    for (auto [p, t] : space.adjacency_pairs())
        if (s.contains(p) && s.contains(t))
            adj.emplace_back(local[static_cast<std::size_t>(p)], local[static_cast<std::size_t>(t)]);
    PetriSpace sub(std::move(names), std::move(sorts), adj);
    SpaceMap inclusion(sub, space, members);
    return {std::move(sub), std::move(inclusion)};
}

std::pair<PetriSpace, SpaceMap> quotient(const PetriSpace& space,
                                         const std::vector<std::pair<Index, Index>>& pairs)
{
    std::vector<Index> parent(static_cast<std::size_t>(space.size()));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& px = parent[static_cast<std::size_t>(x)];
            px = parent[static_cast<std::size_t>(px)];
            x = px;
        }
        return x;
    };
    for (auto [a, b] : pairs) {
        if (space.sort(a) != space.sort(b))
            throw SortError("quotient pair joins place and transition: '" + space.name(a) + "' ~ '"
                            + space.name(b) + "'");
        Index ra = find(a), rb = find(b);
        if (ra != rb) {
            // least index stays the root so it becomes the representative
            if (rb < ra)
                std::swap(ra, rb);
            parent[static_cast<std::size_t>(rb)] = ra;
        }
    }
    std::vector<Index> cls(static_cast<std::size_t>(space.size()), -1);
    std::vector<std::string> names;
    std::vector<Sort> sorts;
    for (Index x = 0; x < space.size(); ++x)
        if (find(x) == x) {
            cls[static_cast<std::size_t>(x)] = static_cast<Index>(names.size());
            names.push_back(space.name(x));
            sorts.push_back(space.sort(x));
        }
    std::vector<Index> assignment;
    for (Index x = 0; x < space.size(); ++x)
        assignment.push_back(cls[static_cast<std::size_t>(find(x))]);
    std::vector<std::pair<Index, Index>> adj;
    for (auto [p, t] : space.adjacency_pairs())
        adj.emplace_back(assignment[static_cast<std::size_t>(p)], assignment[static_cast<std::size_t>(t)]);
    PetriSpace q(std::move(names), std::move(sorts), adj);
    SpaceMap proj(space, q, std::move(assignment));
    if (!check_continuous(proj) || !is_discrete(proj) || !is_open_map(proj))
        throw StructuralError("quotient projection is not continuous, open and discrete; merged transitions must have equal neighbourhoods");
    return {std::move(q), std::move(proj)};
}

std::string format_nodes(const PetriSpace& space, const NodeSet& s)
{
    require_member(space, s);
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (Index x : s.members()) {
        if (!first)
            os << ", ";
        first = false;
        os << space.name(x);
    }
    os << '}';
    return os.str();
}

} // namespace cpn
