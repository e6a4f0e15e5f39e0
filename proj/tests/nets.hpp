#pragma once

// Small nets built in code for the unit tests (the .pnet fixtures are read in
// the io and acceptance tests).

#include "cpn/morphism.hpp"
#include "oracles.hpp"

#include <random>
#include <string>

namespace testnets {

// Running example source net: four places, six transitions, unit weights.
inline cpn::ColouredNet run_x()
{
    cpn::NetBuilder b("RUN_X");
    for (int i = 1; i <= 6; ++i)
        b.add_transition("t" + std::to_string(i), {"b"});
    for (int i = 1; i <= 4; ++i)
        b.add_place("p" + std::to_string(i), {"c"});
    // columns t1..t6 over rows p1..p4
    const int w[4][6] = {{-1, 1, 1, 0, 0, 0},
                         {-1, 0, 1, 1, 0, 0},
                         {1, -1, -1, 0, -1, 1},
                         {1, 0, -1, -1, 1, -1}};
    for (int p = 0; p < 4; ++p)
        for (int t = 0; t < 6; ++t) {
            const int v = w[p][t];
            if (v == 0)
                continue;
            b.set_weight(v < 0 ? cpn::Arc::Minus : cpn::Arc::Plus, "t" + std::to_string(t + 1), "b",
                         "p" + std::to_string(p + 1), "c", v < 0 ? -v : v);
        }
    return b.build();
}

// Running example target: transition a with two bindings, place u with one token.
inline cpn::ColouredNet run_y(long marking = -1)
{
    cpn::NetBuilder b("RUN_Y");
    b.add_transition("a", {"b1", "b2"});
    b.add_place("u", {"c"});
    for (const char* bb : {"b1", "b2"}) {
        b.set_weight(cpn::Arc::Minus, "a", bb, "u", "c", 2);
        b.set_weight(cpn::Arc::Plus, "a", bb, "u", "c", 2);
    }
    if (marking >= 0)
        b.set_marking("u", "c", marking);
    return b.build();
}

/// Random strict net: between 1 and max_places places, 1..max_trans transitions,
/// colour counts in 1..2, weights in 0..2 on a random adjacency.
inline cpn::ColouredNet random_net(std::mt19937& rng, int max_places = 4, int max_trans = 4, int max_colours = 2)
{
    std::uniform_int_distribution<int> np(1, max_places), nt(1, max_trans), nc(1, max_colours), w(0, 2),
        coin(0, 2);
    const int P = np(rng), T = nt(rng);
    cpn::NetBuilder b("random");
    std::vector<int> pc(P), tc(T);
    for (int t = 0; t < T; ++t) {
        tc[t] = nc(rng);
        std::vector<std::string> cs;
        for (int k = 0; k < tc[t]; ++k)
            cs.push_back("b" + std::to_string(k));
        b.add_transition("t" + std::to_string(t), cs);
    }
    for (int p = 0; p < P; ++p) {
        pc[p] = nc(rng);
        std::vector<std::string> cs;
        for (int k = 0; k < pc[p]; ++k)
            cs.push_back("c" + std::to_string(k));
        b.add_place("p" + std::to_string(p), cs);
    }
    for (int t = 0; t < T; ++t)
        for (int p = 0; p < P; ++p) {
            if (coin(rng) != 0)
                continue;
            bool any = false;
            for (int bb = 0; bb < tc[t]; ++bb)
                for (int c = 0; c < pc[p]; ++c)
                    for (auto arc : {cpn::Arc::Minus, cpn::Arc::Plus}) {
                        const int v = w(rng);
                        if (v) {
                            any = true;
                            b.set_weight(arc, "t" + std::to_string(t), "b" + std::to_string(bb),
                                         "p" + std::to_string(p), "c" + std::to_string(c), v);
                        }
                    }
            if (!any)
                b.set_weight(cpn::Arc::Minus, "t" + std::to_string(t), "b0", "p" + std::to_string(p), "c0", 1);
        }
    return b.build();
}

} // namespace testnets

#include "cpn/morphism.hpp"

namespace testnets {

inline cpn::RatMatrix rmat(std::initializer_list<std::initializer_list<long>> rows)
{
    const auto r = static_cast<cpn::Index>(rows.size());
    const auto c = r ? static_cast<cpn::Index>(rows.begin()->size()) : 0;
    cpn::RatMatrix m(r, c);
    cpn::Index i = 0;
    for (auto& row : rows) {
        cpn::Index j = 0;
        for (long v : row)
            m(i, j++) = v;
        ++i;
    }
    return m;
}

/// Running morphism: tau1 = t1+t3 -> b1, tau2 = t1+t2+t4 -> b2, [p3] -> c.
inline cpn::NetMorphism run_morphism(long tau1_minus_b2 = 0)
{
    auto x = run_x();
    auto y = run_y();
    std::vector<cpn::Index> f;
    for (cpn::Index i = 0; i < x.space().size(); ++i) {
        const auto& n = x.space().name(i);
        const bool to_a = n == "p1" || n == "p2" || n == "t1" || n == "t2" || n == "t3" || n == "t4";
        f.push_back(y.space().index_of(to_a ? "a" : "u"));
    }
    cpn::NetMorphism m("RUN_f", x, y, f);
    // fibre bindings in declaration order: t1 t2 t3 t4
    m.set_flow_map(y.space().index_of("a"), rmat({{1, 1}, {0, 1}, {1, 0}, {0, 1}}),
                   rmat({{1, 0}, {-tau1_minus_b2, 1}}), {"tau1", "tau2"});
    cpn::RatVector c(1);
    c << 1;
    m.set_mark_generators(y.space().index_of("u"), {{x.offset(x.space().index_of("p3")), c}});
    return m;
}

struct Arcs {
    std::string transition, place;
    long minus, plus;
};

/// Ordinary net: one binding "e" per transition, one token "d" per place.
inline cpn::ColouredNet ordinary(const std::string& name, const std::vector<std::string>& places,
                                 const std::vector<std::string>& transitions, const std::vector<Arcs>& arcs,
                                 cpn::NetOptions opts = {})
{
    cpn::NetBuilder b(name);
    for (const auto& t : transitions)
        b.add_transition(t, {"e"});
    for (const auto& p : places)
        b.add_place(p, {"d"});
    for (const auto& a : arcs) {
        if (a.minus)
            b.set_weight(cpn::Arc::Minus, a.transition, "e", a.place, "d", a.minus);
        if (a.plus)
            b.set_weight(cpn::Arc::Plus, a.transition, "e", a.place, "d", a.plus);
    }
    return b.build(opts);
}

/// p/t unfolding of RUN_Y: beta1, beta2 both consume and produce 2 tokens on x.
inline cpn::ColouredNet unfolding_net()
{
    cpn::NetBuilder b("U");
    b.add_transition("beta1", {"b"});
    b.add_transition("beta2", {"b"});
    b.add_place("x", {"c"});
    for (const char* t : {"beta1", "beta2"}) {
        b.set_weight(cpn::Arc::Minus, t, "b", "x", "c", 2);
        b.set_weight(cpn::Arc::Plus, t, "b", "x", "c", 2);
    }
    return b.build();
}

/// beta_i -> a with b -> b_i, x.c -> c. `mark` overrides the class map.
inline cpn::NetMorphism unfolding(const cpn::ColouredNet& y, cpn::RatMatrix mark = rmat({{1}}), bool swap = false)
{
    const cpn::Index a = y.space().index_of("a");
    const cpn::Index u = y.space().index_of("u");
    cpn::NetMorphism m(swap ? "unfold'" : "unfold", unfolding_net(), y, {a, a, u});
    m.set_flow_map(a, rmat({{1, 0}, {0, 1}}), swap ? rmat({{0, 1}, {1, 0}}) : rmat({{1, 0}, {0, 1}}));
    m.set_mark_map(u, mark);
    return m;
}

/// The net read as a plain place/transition net over its token and binding bases.
inline oracle::PTNet to_pt(const cpn::ColouredNet& n)
{
    oracle::PTNet o;
    o.places = static_cast<std::size_t>(n.token_count());
    for (cpn::Index j = 0; j < n.binding_count(); ++j) {
        oracle::Vec pre, post;
        for (cpn::Index i = 0; i < n.token_count(); ++i) {
            pre.push_back(static_cast<std::int64_t>(n.w_minus()(i, j)));
            post.push_back(static_cast<std::int64_t>(n.w_plus()(i, j)));
        }
        o.pre.push_back(pre);
        o.post.push_back(post);
    }
    return o;
}

} // namespace testnets
