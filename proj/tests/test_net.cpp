#include "catch_amalgamated.hpp"

#include "cpn/net.hpp"
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

IntVector vec(std::initializer_list<long> vs)
{
    IntVector v(static_cast<Index>(vs.size()));
    Index i = 0;
    for (long x : vs)
        v(i++) = x;
    return v;
}

} // namespace

TEST_CASE("net construction is validated", "[net]")
{
    const auto y = testnets::run_y();
    CHECK(y.token_count() == 1);
    CHECK(y.binding_count() == 2);
    CHECK(y.incidence() == IntMatrix::Zero(1, 2));

    NetBuilder neg("neg");
    neg.add_transition("t", {"b"});
    neg.add_place("p", {"c"});
    CHECK_THROWS_AS(neg.set_weight(Arc::Minus, "t", "b", "p", "c", -1), StructuralError);

    // strict: adjacency without weight
    NetBuilder loose("loose");
    loose.add_transition("t", {"b"});
    loose.add_place("p", {"c"});
    loose.add_place("q", {"c"});
    loose.set_weight(Arc::Minus, "t", "b", "p", "c", 1);
    loose.add_adjacency("q", "t");
    CHECK_THROWS_AS(loose.build(), StructuralError);
    NetOptions relaxed;
    relaxed.strict = false;
    const auto r = loose.build(relaxed);
    CHECK_FALSE(r.space().adjacent(r.space().index_of("p"), r.space().index_of("t")));
    CHECK(r.space().adjacent(r.space().index_of("q"), r.space().index_of("t")));

    NetBuilder empty("empty");
    empty.add_place("p", {"c"});
    CHECK_THROWS_AS(empty.build(), StructuralError);
}

TEST_CASE("sections and incidence matrices", "[net]")
{
    const auto y = testnets::run_y();
    const auto& Y = y.space();
    const auto bs = sections_bindings(y, named(Y, {"a"}));
    CHECK(bs.labels == std::vector<std::string>{"a.b1", "a.b2"});
    CHECK(sections_tokens(y, NodeSet(Y)).dim() == 0);
    CHECK_THROWS_AS(sections_tokens(y, named(Y, {"a"})), StructuralError);
    IntMatrix two(1, 2);
    two << 2, 2;
    CHECK(incidence_matrix(y, named(Y, {"u"}), named(Y, {"a"}), Arc::Minus) == two);
    CHECK(incidence_matrix(y, NodeSet(Y), named(Y, {"a"})).rows() == 0);

    const auto x = testnets::run_x();
    const auto& X = x.space();
    const auto ts = sections_tokens(x, named(X, {"p3", "p4", "t5", "t6"}));
    CHECK(ts.labels == std::vector<std::string>{"p3.c", "p4.c"});
    const IntMatrix w = incidence_matrix(x, NodeSet::all(X), NodeSet::all(X));
    IntMatrix expected(4, 6);
    expected << -1, 1, 1, 0, 0, 0, -1, 0, 1, 1, 0, 0, 1, -1, -1, 0, -1, 1, 1, 0, -1, -1, 1, -1;
    CHECK(w == expected);
}

TEST_CASE("flows of the running example", "[net]")
{
    const auto x = testnets::run_x();
    const auto& X = x.space();
    const auto fa = flows(x, named(X, {"p1", "p2", "t1", "t2", "t3", "t4"}));
    CHECK(fa.rank() == 2);
    IntMatrix taus(4, 2);
    taus << 1, 1, 0, 1, 1, 0, 0, 1;
    CHECK(fa.lattice == Lattice(taus));

    const auto all = flows(x, NodeSet::all(X));
    CHECK(all.rank() == 3);
    CHECK(all.lattice.contains(vec({0, 0, 0, 0, 1, 1})));

    const auto single = flows(x, named(X, {"t1"}));
    CHECK(single.lattice == Lattice::full(1));
    CHECK_THROWS_AS(flows(x, named(X, {"p1"})), StructuralError);

    // restriction of tau2 = t1+t2+t4 from X to the fibre
    const IntVector tau2 = vec({1, 1, 0, 1, 0, 0});
    CHECK(all.lattice.contains(tau2));
    CHECK(restrict_flow(x, NodeSet::all(X), named(X, {"p1", "p2", "t1", "t2", "t3", "t4"}), tau2)
          == vec({1, 1, 0, 1}));
    CHECK(restrict_flow(x, NodeSet::all(X), NodeSet(X), tau2).size() == 0);
}

TEST_CASE("marking classes of the running example", "[net]")
{
    const auto x = testnets::run_x();
    const auto& X = x.space();
    const auto u1 = named(X, {"p3", "p4", "t5", "t6"});
    const auto mu = marking_classes(x, u1);
    CHECK(mu.quotient.free_rank() == 1);
    CHECK(mu.quotient.torsion().empty());
    CHECK(mu.quotient.class_equal(vec({1, 0}), vec({0, 1})));

    const auto mx = marking_classes(x, NodeSet::all(X));
    CHECK(mx.quotient.free_rank() == 1);
    CHECK(mx.quotient.torsion().empty());
    for (int i = 0; i < 4; ++i) {
        IntVector e = IntVector::Zero(4);
        e(i) = 1;
        CHECK(mx.quotient.class_equal(e, vec({0, 0, 1, 0})));
    }
    CHECK(mx.quotient.class_equal(extend_class(x, u1, NodeSet::all(X), vec({1, 0})), vec({0, 0, 1, 0})));

    const auto single = marking_classes(x, named(X, {"p2"}));
    CHECK(single.quotient.free_rank() == 1);
    CHECK(single.quotient.relations().rank() == 0);

    // w- of tau1 = t1+t3 into M(U1): t3 consumes p3 and p4
    const auto fa = named(X, {"p1", "p2", "t1", "t2", "t3", "t4"});
    const auto cls = flow_to_class(x, fa, named(X, {"p3", "p4", "t5", "t6"}), Arc::Minus, vec({1, 0, 1, 0}));
    CHECK(mu.quotient.class_equal(cls, vec({2, 0})));

    const auto y = testnets::run_y();
    const auto& Y = y.space();
    IntVector b1(2);
    b1 << 1, 0;
    CHECK(flow_to_class(y, named(Y, {"a"}), named(Y, {"u"}), Arc::Minus, b1) == vec({2}));
}

TEST_CASE("sheaf axioms on the running example", "[net]")
{
    const auto x = testnets::run_x();
    const auto r = verify_all_basic_coverings(x);
    INFO((r.first_problem() ? r.first_problem()->detail : std::string()));
    CHECK(r.passed());

    const auto all = NodeSet::all(x.space());
    CHECK(verify_sheaf_axioms(x, all, {all}).passed());
    CHECK(verify_sheaf_axioms(x, all, canonical_basis(x.space())).passed());
}

TEST_CASE("corrupted restriction is caught", "[net]")
{
    const auto x = testnets::run_x();
    const auto all = NodeSet::all(x.space());
    auto seq = sheaf_sequence(x, SheafKind::Tokens, all, canonical_basis(x.space()));
    seq.map.setZero();
    const auto r = check_exactness(seq, "sheaf.tokens");
    REQUIRE(r.first_problem() != nullptr);
    CHECK(r.first_problem()->id == "sheaf.tokens.injective");

    auto cs = sheaf_sequence(x, SheafKind::MarkingClasses, all, canonical_basis(x.space()));
    cs.map.setZero();
    CHECK_FALSE(check_exactness(cs, "cosheaf.marking-classes").passed());
}

TEST_CASE("sheaf axioms on random strict nets", "[net]")
{
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = testnets::random_net(rng);
        const auto r = verify_all_basic_coverings(n);
        INFO((r.first_problem() ? r.first_problem()->id + ": " + r.first_problem()->detail : std::string()));
        REQUIRE(r.passed());
    }
}

TEST_CASE("flow functoriality and singleton modules", "[net]")
{
    std::mt19937 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const auto n = testnets::random_net(rng, 3, 3);
        const auto& X = n.space();
        const auto N = static_cast<std::uint64_t>(X.size());
        std::vector<NodeSet> closeds;
        for (std::uint64_t mask = 0; mask < (1ULL << N); ++mask) {
            NodeSet s(X);
            for (Index i = 0; i < X.size(); ++i)
                if (mask >> i & 1U)
                    s.insert(i);
            if (is_closed(X, s))
                closeds.push_back(s);
        }
        for (const auto& big : closeds) {
            const auto fb = flows(n, big);
            for (const auto& small : closeds) {
                if (!small.subset_of(big))
                    continue;
                const auto fs = flows(n, small);
                for (Index j = 0; j < fb.rank(); ++j) {
                    const IntVector r = restrict_flow(n, big, small, IntVector(fb.basis().col(j)));
                    CHECK(fs.lattice.contains(r));
                }
            }
        }
        for (Index t : X.transitions())
            CHECK(flows(n, NodeSet(X, {t})).lattice == Lattice::full(n.colour_count(t)));
        for (Index p : X.places()) {
            const auto m = marking_classes(n, NodeSet(X, {p}));
            CHECK(m.quotient.free_rank() == n.colour_count(p));
        }
        // injectivity/surjectivity between global sections and nodes
        const auto all = NodeSet::all(X);
        CHECK(flows(n, all).lattice.rank() <= n.binding_count());
        // P-flows annihilate every relation of M(X)
        const IntMatrix w = n.incidence();
        const Lattice pflows = kernel(IntMatrix(w.transpose()));
        const auto mx = marking_classes(n, all);
        for (Index j = 0; j < pflows.rank(); ++j)
            for (Index k = 0; k < mx.quotient.relations().rank(); ++k)
                CHECK(pflows.basis().col(j).dot(mx.quotient.relations().basis().col(k)) == 0);
    }
}

TEST_CASE("flows agree with enumerated kernel vectors", "[net]")
{
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = testnets::random_net(rng, 3, 3, 1);
        const auto all = NodeSet::all(n.space());
        const auto f = flows(n, all);
        const auto w = oracle::from_eigen(IntMatrix(n.incidence()));
        const auto cols = static_cast<std::size_t>(n.binding_count());
        for (const auto& v : oracle::kernel_vectors(w, cols, 2))
            CHECK(f.lattice.contains(oracle::to_eigen(v)));
        CHECK(static_cast<std::size_t>(f.rank()) == cols - oracle::rank_q(w));
    }
}
