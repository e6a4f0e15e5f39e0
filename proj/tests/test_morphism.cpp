#include "catch_amalgamated.hpp"

#include "cpn/morphism.hpp"
#include "nets.hpp"

using namespace cpn;
using testnets::rmat;

namespace {

std::string problem(const Report& r)
{
    const auto* c = r.first_problem();
    return c ? c->id + ": " + c->detail : std::string();
}

// p/t net with one place x and transitions beta1, beta2 each consuming and producing 2 tokens
ColouredNet unfolding_net(const std::string& name = "U", long marking = -1)
{
    NetBuilder b(name);
    b.add_transition("beta1", {"b"});
    b.add_transition("beta2", {"b"});
    b.add_place("x", {"c"});
    for (const char* t : {"beta1", "beta2"}) {
        b.set_weight(Arc::Minus, t, "b", "x", "c", 2);
        b.set_weight(Arc::Plus, t, "b", "x", "c", 2);
    }
    if (marking >= 0)
        b.set_marking("x", "c", marking);
    return b.build();
}

NetMorphism unfolding_morphism()
{
    auto u = unfolding_net();
    auto y = testnets::run_y();
    const Index a = y.space().index_of("a");
    const Index uu = y.space().index_of("u");
    NetMorphism m("unfold", u, y, {a, a, uu});
    m.set_flow_map(a, rmat({{1, 0}, {0, 1}}), rmat({{1, 0}, {0, 1}}));
    m.set_mark_map(uu, rmat({{1}}));
    return m;
}

} // namespace

TEST_CASE("running morphism verifies", "[morphism]")
{
    const auto m = testnets::run_morphism();
    const auto r = verify_morphism(m);
    INFO(problem(r.report));
    REQUIRE(r.passed());
    std::vector<std::string> ids;
    for (const auto& c : r.report.clauses())
        ids.push_back(c.id);
    CHECK(ids.front() == "morphism.continuity");
    CHECK(ids.back() == "morphism.incidence-plus");

    REQUIRE(r.squares.size() == 2);
    const auto& sq = r.squares.front();
    CHECK(sq.target_incidence == rmat({{2, 2}}));
    CHECK(sq.flow_images == rmat({{1, 0}, {0, 1}}));
    CHECK(sq.class_map == rmat({{1}}));
    CHECK(sq.source_classes == rmat({{2, 2}}));
    CHECK(sq.equation() == "(2 2)·(1 0 / 0 1) = (1)·(2 2)");

    const auto c = classify(m);
    CHECK(c.abstraction);
    CHECK_FALSE(c.discrete);
    CHECK_FALSE(c.embedding);
    CHECK_FALSE(c.modification);
}

TEST_CASE("class map is resolved from one generator", "[morphism]")
{
    const auto m = testnets::run_morphism();
    const Index u = m.target().space().index_of("u");
    CHECK(m.mark_map(u).matrix == rmat({{1, 1}}));
    const auto y = m.transition_fibre_marks(m.target().space().index_of("a"));
    REQUIRE(y);
    CHECK(*y == rmat({{1, 1}}));
    // induced map on the whole target: every place of the source lands on c
    CHECK(m.mark_matrix_over(NodeSet::all(m.target().space())) == rmat({{1, 1, 1, 1}}));
}

TEST_CASE("negative flow image fails signedness", "[morphism]")
{
    const auto m = testnets::run_morphism(1);
    const auto r = verify_morphism(m);
    REQUIRE_FALSE(r.passed());
    CHECK(r.report.first_problem()->id == "morphism.signed-flows");
}

TEST_CASE("violations are attributed to their clause", "[morphism]")
{
    SECTION("discontinuous node map")
    {
        auto base = testnets::run_morphism();
        auto f = base.map().assignment();
        f[static_cast<std::size_t>(base.source().space().index_of("p3"))] = base.target().space().index_of("a");
        NetMorphism m("bad", base.source(), base.target(), f);
        CHECK(verify_morphism(m).report.first_problem()->id == "morphism.continuity");
    }
    SECTION("flow basis of too small a lattice")
    {
        auto m = testnets::run_morphism();
        const Index a = m.target().space().index_of("a");
        m.set_flow_map(a, rmat({{2, 1}, {0, 1}, {2, 0}, {0, 1}}), rmat({{1, 0}, {0, 1}}));
        CHECK(verify_morphism(m).report.first_problem()->id == "morphism.flow-basis");
    }
    SECTION("class map that does not kill relations")
    {
        auto m = testnets::run_morphism();
        m.set_mark_map(m.target().space().index_of("u"), rmat({{1, 2}}));
        CHECK(verify_morphism(m).report.first_problem()->id == "morphism.class-map");
    }
    SECTION("incidence square that does not commute")
    {
        auto m = testnets::run_morphism();
        m.set_mark_map(m.target().space().index_of("u"), rmat({{2, 2}}));
        const auto r = verify_morphism(m);
        REQUIRE(r.report.first_problem());
        CHECK(r.report.first_problem()->id == "morphism.incidence-minus");
    }
}

TEST_CASE("identity morphisms", "[morphism]")
{
    for (const auto& net : {testnets::run_x(), testnets::run_y()}) {
        const auto id = identity_morphism(net);
        const auto r = verify_morphism(id);
        INFO(problem(r.report));
        CHECK(r.passed());
        const auto c = classify(id);
        CHECK(c.abstraction);
        CHECK(c.embedding);
        CHECK(c.discrete);
        CHECK(c.modification);
        CHECK(c.isomorphism);
    }
}

TEST_CASE("composition with identities", "[morphism]")
{
    const auto m = testnets::run_morphism();
    const auto left = compose(identity_morphism(m.target()), m);
    const auto right = compose(m, identity_morphism(m.source()));
    CHECK(verify_morphism(left).passed());
    CHECK(verify_morphism(right).passed());
    CHECK(same_morphism(left, m));
    CHECK(same_morphism(right, m));
    CHECK_THROWS_AS(compose(m, m), CategoryError);
}

TEST_CASE("unfolding is a modification and stacks", "[morphism]")
{
    const auto m = unfolding_morphism();
    const auto r = verify_morphism(m);
    INFO(problem(r.report));
    REQUIRE(r.passed());
    const auto c = classify(m);
    CHECK(c.modification);
    CHECK(c.discrete);
    CHECK(c.transition_modification);
    CHECK_FALSE(c.place_modification);

    // a second unfolding: x duplicated into x1, x2 each carrying one token-element class
    NetBuilder b("U2");
    b.add_transition("beta1", {"b"});
    b.add_transition("beta2", {"b"});
    b.add_place("x", {"c"});
    for (const char* t : {"beta1", "beta2"}) {
        b.set_weight(Arc::Minus, t, "b", "x", "c", 2);
        b.set_weight(Arc::Plus, t, "b", "x", "c", 2);
    }
    const auto u2 = b.build();
    NetMorphism iso("relabel", u2, m.source(), {0, 1, 2});
    iso.set_flow_map(0, rmat({{1}}), rmat({{1}}));
    iso.set_flow_map(1, rmat({{1}}), rmat({{1}}));
    iso.set_mark_map(2, rmat({{1}}));
    REQUIRE(verify_morphism(iso).passed());
    const auto both = compose(m, iso);
    const auto rb = verify_morphism(both);
    INFO(problem(rb.report));
    CHECK(rb.passed());
    CHECK(classify(both).modification);
}

TEST_CASE("composition is associative on the running maps", "[morphism]")
{
    const auto m = testnets::run_morphism();
    const auto idx = identity_morphism(m.source());
    const auto idy = identity_morphism(m.target());
    const auto a = compose(idy, compose(m, idx));
    const auto b = compose(compose(idy, m), idx);
    CHECK(same_morphism(a, b));
    // unfolding after the identity, then into RUN_Y
    const auto u = unfolding_morphism();
    const auto c = compose(identity_morphism(u.target()), compose(u, identity_morphism(u.source())));
    CHECK(same_morphism(c, u));
}

TEST_CASE("non-negative representatives", "[morphism]")
{
    IntMatrix rel(2, 1);
    rel << 1, -1;
    const QuotientModule q(rel);
    IntVector v(2);
    v << -1, 2;
    CHECK(has_nonnegative_representative(q, v) == std::optional<bool>(true));
    v << -1, 0;
    CHECK(has_nonnegative_representative(q, v) == std::optional<bool>(false));
    IntMatrix none(2, 0);
    CHECK(has_nonnegative_representative(QuotientModule(none), v) == std::optional<bool>(false));
}

TEST_CASE("winskel conversion", "[morphism]")
{
    NetBuilder xs("Xw");
    xs.add_transition("t", {"b"});
    xs.add_place("x", {"c"});
    xs.set_weight(Arc::Minus, "t", "b", "x", "c", 1);
    xs.set_weight(Arc::Plus, "t", "b", "x", "c", 1);
    NetBuilder ys("Yw");
    ys.add_transition("s", {"b"});
    ys.add_place("y1", {"c"});
    ys.add_place("y2", {"c"});
    for (const char* p : {"y1", "y2"}) {
        ys.set_weight(Arc::Minus, "s", "b", p, "c", 1);
        ys.set_weight(Arc::Plus, "s", "b", p, "c", 1);
    }
    WinskelMorphism w;
    w.name = "W";
    w.source = xs.build();
    w.target = ys.build();
    const auto& X = w.source.space();
    const auto& Y = w.target.space();
    w.beta[X.index_of("x")] = {{Y.index_of("y1"), 1}, {Y.index_of("y2"), 1}};
    w.eta[X.index_of("t")] = Y.index_of("s");
    CHECK(check_winskel(w).passed());

    const auto conv = from_winskel(w);
    INFO(problem(conv.report));
    CHECK(conv.report.passed());
    CHECK(conv.quotient_net.space().size() == 2);
    const Index yhat = conv.quotient_net.space().index_of("y1");
    CHECK(conv.quotient_net.colour_count(yhat) == 2);
    const Index s = conv.quotient_net.space().index_of("s");
    CHECK(conv.quotient_net.w_minus().col(conv.quotient_net.offset(s)) == IntMatrix::Ones(2, 1));
    CHECK(classify(conv.pi).place_modification);
    CHECK(classify(conv.g).discrete);
    CHECK(conv.g.flow_map(s).images == rmat({{1}}));

    // eta(t) = s but beta(x) = y1 only: pre-set not preserved
    WinskelMorphism bad = w;
    bad.beta[X.index_of("x")] = {{Y.index_of("y1"), 1}};
    CHECK_FALSE(check_winskel(bad).passed());
    CHECK_THROWS_AS(from_winskel(bad), StructuralError);

    WinskelMorphism empty = w;
    empty.beta.clear();
    empty.eta.clear();
    CHECK_THROWS_AS(from_winskel(empty), StructuralError);
}
