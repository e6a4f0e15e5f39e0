#include "catch_amalgamated.hpp"

#include "cpn/topology.hpp"
#include "nets.hpp"
#include "oracles.hpp"

#include <random>

using namespace cpn;

namespace {

NodeSet named(const PetriSpace& s, std::initializer_list<const char*> names)
{
    NodeSet out(s);
    for (const char* n : names)
        out.insert(s.index_of(n));
    return out;
}

NodeSet from_mask(const PetriSpace& s, std::uint64_t mask)
{
    NodeSet out(s);
    for (Index i = 0; i < s.size(); ++i)
        if (mask >> i & 1U)
            out.insert(i);
    return out;
}

oracle::Space to_oracle(const PetriSpace& s)
{
    oracle::Space o;
    for (Index i = 0; i < s.size(); ++i)
        o.is_place.push_back(s.is_place(i));
    for (auto [p, t] : s.adjacency_pairs())
        o.adjacency.emplace_back(static_cast<std::size_t>(p), static_cast<std::size_t>(t));
    return o;
}

PetriSpace random_space(std::mt19937& rng, int max_nodes)
{
    std::uniform_int_distribution<int> nn(1, max_nodes), coin(0, 1);
    const int n = nn(rng);
    std::vector<std::string> names;
    std::vector<Sort> sorts;
    for (int i = 0; i < n; ++i) {
        names.push_back("n" + std::to_string(i));
        sorts.push_back(coin(rng) ? Sort::Place : Sort::Transition);
    }
    std::vector<std::pair<Index, Index>> adj;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (sorts[i] == Sort::Place && sorts[j] == Sort::Transition && coin(rng))
                adj.emplace_back(i, j);
    return PetriSpace(names, sorts, adj);
}

} // namespace

TEST_CASE("open and closed sets of the running example", "[topology]")
{
    const auto x = testnets::run_x().space();
    CHECK(is_open(x, named(x, {"p3", "p4", "t5", "t6"})));
    CHECK(is_open(x, NodeSet(x)));
    CHECK(is_closed(x, NodeSet(x)));
    const auto fa = named(x, {"p1", "p2", "t1", "t2", "t3", "t4"});
    CHECK_FALSE(is_open(x, fa));
    CHECK(is_closed(x, fa));
    CHECK(is_open(x, fa, Topology::T));
}

TEST_CASE("foreign node sets are rejected", "[topology]")
{
    const auto x = testnets::run_x().space();
    const auto y = testnets::run_y().space();
    CHECK_THROWS_AS(is_open(x, NodeSet(y)), StructuralError);
}

TEST_CASE("basic sets and canonical basis", "[topology]")
{
    const auto x = testnets::run_x().space();
    const auto y = testnets::run_y().space();
    CHECK(basic_open(y, y.index_of("a")) == named(y, {"a", "u"}));
    CHECK(basic_closed(x, x.index_of("p3")) == named(x, {"p3", "t1", "t2", "t3", "t5", "t6"}));
    CHECK_THROWS_AS(basic_open(y, y.index_of("u")), SortError);
    CHECK_THROWS_AS(basic_closed(y, y.index_of("a")), SortError);

    const auto by = canonical_basis(y);
    REQUIRE(by.size() == 2);
    CHECK(by[0] == named(y, {"u"}));
    CHECK(by[1] == named(y, {"a", "u"}));
    CHECK(canonical_basis(x).size() == 10);

    PetriSpace lone({"t"}, {Sort::Transition}, {});
    CHECK(basic_open(lone, 0) == named(lone, {"t"}));
    PetriSpace only_places({"p", "q"}, {Sort::Place, Sort::Place}, {});
    for (const auto& b : canonical_basis(only_places))
        CHECK(b.count() == 1);
}

TEST_CASE("mixed-sort adjacency is rejected", "[topology]")
{
    CHECK_THROWS_AS(PetriSpace({"p", "q"}, {Sort::Place, Sort::Place}, {{0, 1}}), SortError);
}

TEST_CASE("duality and intersections on random spaces", "[topology]")
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const auto s = random_space(rng, 10);
        const auto o = to_oracle(s);
        const std::uint64_t n = static_cast<std::uint64_t>(s.size());
        std::vector<NodeSet> opens;
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            const auto set = from_mask(s, mask);
            const bool open = is_open(s, set);
            REQUIRE(open == oracle::p_open(o, mask));
            REQUIRE(is_closed(s, set.complement()) == open);
            REQUIRE(is_open(s, set.complement(), Topology::T) == open);
            if (open)
                opens.push_back(set);
        }
        std::uniform_int_distribution<std::size_t> pick(0, opens.size() - 1);
        for (int k = 0; k < 20; ++k) {
            NodeSet acc = NodeSet::all(s);
            for (int j = 0; j < 3; ++j)
                acc = acc & opens[pick(rng)];
            CHECK(is_open(s, acc));
        }
        for (Index t : s.transitions()) {
            NodeSet best = NodeSet::all(s);
            for (const auto& u : opens)
                if (u.contains(t) && u.count() < best.count())
                    best = u;
            CHECK(basic_open(s, t) == best);
            CHECK(minimal_open(s, t) == best);
        }
    }
}

TEST_CASE("continuity agrees with preimages of all opens", "[topology]")
{
    std::mt19937 rng(5);
    int continuous = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_space(rng, 6);
        const auto y = random_space(rng, 4);
        std::uniform_int_distribution<Index> target(0, y.size() - 1);
        std::vector<Index> f;
        std::vector<std::size_t> fo;
        for (Index i = 0; i < x.size(); ++i) {
            f.push_back(target(rng));
            fo.push_back(static_cast<std::size_t>(f.back()));
        }
        const SpaceMap m(x, y, f);
        const bool expected = oracle::continuous(to_oracle(x), to_oracle(y), fo);
        REQUIRE(check_continuous(m) == expected);
        if (expected) {
            ++continuous;
            for (Index v = 0; v < y.size(); ++v) {
                if (y.is_transition(v))
                    CHECK(is_closed(x, m.fibre(v)));
                else
                    CHECK(is_open(x, m.fibre(v)));
            }
        }
    }
    CHECK(continuous > 10);
}

TEST_CASE("fibres of the running map", "[topology]")
{
    const auto x = testnets::run_x().space();
    const auto y = testnets::run_y().space();
    std::vector<Index> f(static_cast<std::size_t>(x.size()));
    for (Index i = 0; i < x.size(); ++i) {
        const auto& n = x.name(i);
        const bool to_a = n == "p1" || n == "p2" || n == "t1" || n == "t2" || n == "t3" || n == "t4";
        f[static_cast<std::size_t>(i)] = y.index_of(to_a ? "a" : "u");
    }
    const SpaceMap m(x, y, f);
    CHECK(check_continuous(m));
    CHECK_FALSE(is_discrete(m));
    CHECK(m.fibre(y.index_of("a")) == named(x, {"p1", "p2", "t1", "t2", "t3", "t4"}));
    CHECK(m.preimage(named(y, {"u"})) == named(x, {"p3", "p4", "t5", "t6"}));
    CHECK(is_discrete(SpaceMap::identity(x)));
    CHECK(check_continuous(SpaceMap::identity(x)));

    auto broken = f;
    broken[static_cast<std::size_t>(x.index_of("p3"))] = y.index_of("a");
    CHECK_FALSE(check_continuous(SpaceMap(x, y, broken)));

    std::vector<Index> only_u(static_cast<std::size_t>(x.size()), y.index_of("u"));
    CHECK(SpaceMap(x, y, only_u).fibre(y.index_of("a")).empty());
}

TEST_CASE("embeddings and open maps", "[topology]")
{
    const auto y = testnets::run_y().space();
    const auto [sub, inc] = subspace(y, named(y, {"u"}));
    CHECK(sub.size() == 1);
    CHECK(is_topological_embedding(inc));
    CHECK(is_open_map(SpaceMap::identity(y)));
}

TEST_CASE("quotients", "[topology]")
{
    PetriSpace s({"t", "y1", "y2"}, {Sort::Transition, Sort::Place, Sort::Place}, {{1, 0}, {2, 0}});
    const auto [q0, id] = quotient(s, {});
    CHECK(q0.size() == 3);
    CHECK(id.is_injective());

    const auto [q, pi] = quotient(s, {{1, 2}});
    CHECK(q.size() == 2);
    CHECK(q.name(pi(1)) == "y1");
    CHECK(pi(1) == pi(2));
    CHECK(q.adjacent(pi(1), pi(0)));
    CHECK(check_continuous(pi));
    CHECK(is_open_map(pi));
    CHECK(is_discrete(pi));
    CHECK_THROWS_AS(quotient(s, {{0, 1}}), SortError);
}
