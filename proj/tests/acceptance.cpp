// Acceptance run: one line per criterion, exit status 0 iff all pass.
// Tolerances are pinned: every comparison is exact, and the two timed
// criteria have fixed wall-clock limits (1 s and 10 s).

#include "cpn/io.hpp"
#include "cpn/product.hpp"
#include "nets.hpp"
#include "oracles.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace cpn;
using testnets::rmat;

namespace {

constexpr double flows_seconds = 1.0;
constexpr double linalg_seconds = 10.0;
constexpr int linalg_trials = 1000;
constexpr int random_axiom_nets = 100;
constexpr std::size_t behaviour_length = 6;
constexpr std::size_t modification_depth = 6;
constexpr std::size_t product_depth = 5;
constexpr std::int64_t hilbert_box = 5;

const std::string fixtures = CPN_FIXTURE_DIR;

std::string fixture(const std::string& name) { return fixtures + "/" + name; }

// Collects failed requirements of one criterion.
struct Check {
    std::vector<std::string> failures;
    std::string note;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
            failures.push_back(what);
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IntVector ivec(std::initializer_list<long> vs)
{
    IntVector v(static_cast<Index>(vs.size()));
    Index i = 0;
    for (long x : vs)
        v(i++) = x;
    return v;
}

IntVector unit(Index n, Index i)
{
    IntVector e = IntVector::Zero(n);
    e(i) = 1;
    return e;
}

std::string problem(const Report& r)
{
    const auto* c = r.first_problem();
    return c ? c->id + ": " + c->detail : std::string();
}

// Fraction-free elimination, written out here rather than taken from the library.
Integer bareiss_det(IntMatrix a)
{
    const Index n = a.rows();
    Integer sign = 1, prev = 1;
    for (Index k = 0; k < n; ++k) {
        Index piv = k;
        while (piv < n && a(piv, k) == 0)
            ++piv;
        if (piv == n)
            return 0;
        if (piv != k) {
            a.row(k).swap(a.row(piv));
            sign = -sign;
        }
        for (Index i = k + 1; i < n; ++i)
            for (Index j = k + 1; j < n; ++j)
                a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

oracle::Space oracle_space(const PetriSpace& s)
{
    oracle::Space o;
    for (Index x = 0; x < s.size(); ++x)
        o.is_place.push_back(s.is_place(x));
    for (const auto& [p, t] : s.adjacency_pairs())
        o.adjacency.emplace_back(static_cast<std::size_t>(p), static_cast<std::size_t>(t));
    return o;
}

std::uint64_t mask(const NodeSet& s)
{
    std::uint64_t m = 0;
    for (Index x : s.members())
        m |= std::uint64_t{1} << x;
    return m;
}

// Incidence restricted to the given places (rows) and transitions (columns), as oracle data.
oracle::Mat restricted_incidence(const ColouredNet& n, const std::vector<Index>& rows, const std::vector<Index>& cols)
{
    const IntMatrix w = n.incidence();
    oracle::Mat out;
    for (Index r : rows) {
        oracle::Vec row;
        for (Index c : cols)
            row.push_back(static_cast<std::int64_t>(w(r, c)));
        out.push_back(row);
    }
    return out;
}

// --- criteria -----------------------------------------------------------------------

void running_flows(Check& c)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = read_morphism(fixture("run.pmor"));
    const ColouredNet& x = m.source();
    const Index a = m.target().space().index_of("a");
    const FlowModule fa = flows(x, m.fibre(a));
    const FlowModule all = flows(x, NodeSet::all(x.space()));
    const double took = seconds_since(t0);

    // coordinates of the fibre are t1 t2 t3 t4
    IntMatrix taus(4, 2);
    taus.col(0) = ivec({1, 0, 1, 0});
    taus.col(1) = ivec({1, 1, 0, 1});
    c.require(fa.rank() == 2, "fibre of a has rank 2");
    c.require(fa.lattice == Lattice(taus), "fibre lattice is span{t1+t3, t1+t2+t4}");
    c.require(all.rank() == 3, "flows over X have rank 3");
    c.require(all.lattice.contains(ivec({0, 0, 0, 0, 1, 1})), "t5+t6 is a flow of X");

    // every small kernel vector found by enumeration lies in the lattice
    const auto places = x.token_indices(NodeSet::of_sort(x.space(), Sort::Place));
    const auto ker = oracle::kernel_vectors(restricted_incidence(x, places, all.columns), all.columns.size(), 2);
    std::size_t inside = 0;
    for (const auto& v : ker)
        inside += all.lattice.contains(oracle::to_eigen(v));
    c.require(inside == ker.size(), "enumerated kernel vectors are flows");
    c.require(!all.lattice.contains(ivec({1, 0, 0, 0, 0, 0})), "t1 alone is no flow");
    c.require(took < flows_seconds, "computed within 1 s");
    std::ostringstream os;
    os << "rank 2 and 3, " << ker.size() << " enumerated kernel vectors, " << took << " s";
    c.note = os.str();
}

void running_classes(Check& c)
{
    const auto m = read_morphism(fixture("run.pmor"));
    const ColouredNet& x = m.source();
    const Index u = m.target().space().index_of("u");
    const auto fu = marking_classes(x, m.fibre(u)); // rows p3 p4
    c.require(fu.quotient.free_rank() == 1 && fu.quotient.torsion().empty(), "classes over the fibre of u are Z");
    c.require(fu.quotient.class_equal(unit(2, 0), unit(2, 1)), "[p3] = [p4] over the fibre of u");

    const auto mx = marking_classes(x, NodeSet::all(x.space())); // rows p1..p4
    c.require(mx.quotient.free_rank() == 1 && mx.quotient.torsion().empty(), "classes over X are Z");
    const IntVector g = mx.quotient.coordinates(unit(4, 2));
    c.require(g.size() == 1 && (g(0) == 1 || g(0) == -1), "[p3] generates the classes over X");
    for (Index i = 0; i < 4; ++i)
        c.require(mx.quotient.class_equal(unit(4, i), unit(4, 2)),
                  "unit class of " + x.token_label(mx.rows[static_cast<std::size_t>(i)]) + " equals [p3]");
    c.note = "Z over the fibre of u and over X, all unit classes equal";
}

void running_morphism(Check& c)
{
    const auto m = read_morphism(fixture("run.pmor"));
    const auto r = verify_morphism(m);
    c.require(r.passed(), "verification passes " + problem(r.report));
    const Index a = m.target().space().index_of("a");
    const Index u = m.target().space().index_of("u");
    std::size_t found = 0;
    for (const auto& sq : r.squares) {
        if (sq.transition != a || sq.place != u)
            continue;
        ++found;
        const bool shape = sq.target_incidence == rmat({{2, 2}}) && sq.flow_images == rmat({{1, 0}, {0, 1}})
            && sq.class_map == rmat({{1}}) && sq.source_classes == rmat({{2, 2}});
        c.require(shape, "square " + sq.equation() + " is (2 2)·I2 = 1·(2 2)");
        c.require(sq.commutes, "square commutes");
        if (found == 1)
            c.note = sq.equation();
    }
    c.require(found == 2, "both incidence squares over (a, u) are reported");
    const auto cl = classify(m);
    c.require(cl.abstraction, "abstraction = yes");
    c.require(!cl.discrete, "discrete = no");
    c.note += cl.abstraction && !cl.discrete ? "; abstraction=yes discrete=no" : "";
}

void integer_linear_algebra(Check& c)
{
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> rows(1, 6), cols(1, 8), entry(-4, 4);
    const auto t0 = std::chrono::steady_clock::now();
    int bad = 0;
    for (int trial = 0; trial < linalg_trials && bad < 5; ++trial) {
        IntMatrix m(rows(rng), cols(rng));
        for (Index i = 0; i < m.rows(); ++i)
            for (Index j = 0; j < m.cols(); ++j)
                m(i, j) = entry(rng);
        const auto s = snf(m);
        bool ok = s.S == IntMatrix(s.U * m * s.V);
        ok = ok && abs(bareiss_det(s.U)) == 1 && abs(bareiss_det(s.V)) == 1;
        for (Index i = 0; i < s.S.rows(); ++i)
            for (Index j = 0; j < s.S.cols(); ++j)
                ok = ok && (i == j || s.S(i, j) == 0);
        for (Index i = 0; i + 1 < s.rank; ++i)
            ok = ok && s.S(i + 1, i + 1) % s.S(i, i) == 0;
        for (Index i = s.rank; i < std::min(s.S.rows(), s.S.cols()); ++i)
            ok = ok && s.S(i, i) == 0;
        const Lattice k = kernel(m);
        ok = ok && is_zero(IntMatrix(m * k.basis()));
        const auto rank = static_cast<Index>(oracle::rank_q(oracle::from_eigen(m)));
        ok = ok && s.rank == rank && hnf(m).rank == rank && k.rank() == m.cols() - rank;
        bad += !ok;
        if (!ok)
            c.require(false, "trial " + std::to_string(trial));
    }
    const double took = seconds_since(t0);
    c.require(took < linalg_seconds, "1000 trials within 10 s");
    std::ostringstream os;
    os << linalg_trials << " matrices, " << took << " s";
    c.note = os.str();
}

void sheaf_axioms(Check& c)
{
    const auto x = read_net(fixture("RUN_X.pnet"));
    const auto r = verify_all_basic_coverings(x);
    c.require(r.passed(), "RUN_X " + problem(r));
    std::mt19937 rng(2024);
    std::size_t clauses = r.clauses().size();
    for (int k = 0; k < random_axiom_nets; ++k) {
        const auto n = testnets::random_net(rng, 4, 4);
        c.require(n.space().size() <= 8, "random net has at most 8 nodes");
        const auto rn = verify_all_basic_coverings(n);
        clauses += rn.clauses().size();
        c.require(rn.passed(), "random net " + std::to_string(k) + " " + problem(rn));
    }
    c.note = "RUN_X and " + std::to_string(random_axiom_nets) + " random nets, " + std::to_string(clauses)
        + " clauses over all basic coverings";
}

void behaviour_mapping(Check& c)
{
    const auto m = read_morphism(fixture("run.pmor"));
    const ColouredNet& x = m.source();
    const ColouredNet& y = m.target();
    const Marking m0 = parse_marking(x, "p1.c=1, p2.c=1");
    const oracle::PTNet ty = testnets::to_pt(y);
    std::size_t total = 0, saturated = 0;
    for_each_activated_sequence(x, m0, behaviour_length, [&](const OccurrenceSequence& s) {
        ++total;
        const Saturation sat = saturate(m, s);
        if (!sat.saturated)
            return;
        ++saturated;
        const auto r = check_behaviour_mapping(m, m0, s);
        c.require(r.passed(), format_sequence(x, s) + " " + problem(r));

        // replay independently: every unit class maps to c, so the image marking is the token total
        const Marking post = fire_sequence(x, m0, s);
        oracle::Vec mu{static_cast<std::int64_t>(m0.sum())};
        for (const auto& step : map_sequence(m, sat)) {
            for (Index b = 0; b < step.combination.size(); ++b) {
                const auto col = static_cast<std::size_t>(y.global_index(step.transition, b));
                const auto k = static_cast<std::int64_t>(step.combination(b));
                if (k == 0)
                    continue;
                c.require(mu[0] >= k * ty.pre[col][0], "image step enabled");
                mu[0] += k * (ty.post[col][0] - ty.pre[col][0]);
            }
        }
        c.require(mu[0] == static_cast<std::int64_t>(post.sum()), "post-markings agree");
    });
    c.require(saturated > 0, "some saturated sequences");
    c.note = std::to_string(saturated) + " saturated of " + std::to_string(total) + " activated sequences";
}

void modification_invariance(Check& c)
{
    const auto u = read_morphism(fixture("unfold.pmor"));
    ReachOptions o;
    o.depth = modification_depth;
    std::ostringstream os;
    for (long n : {2, 4}) {
        const Marking mx = ivec({n}), my = ivec({n});
        const auto r = check_modification_invariance(u, mx, my, o);
        c.require(r.passed(), "marking " + std::to_string(n) + "c: " + problem(r));
        const auto sx = oracle::reach(testnets::to_pt(u.source()), oracle::from_eigen(mx), modification_depth);
        const auto sy = oracle::reach(testnets::to_pt(u.target()), oracle::from_eigen(my), modification_depth);
        c.require(sx.size() == sy.size(), "reachable sets have equal size");
        os << n << "c: " << sx.size() << " <-> " << sy.size() << "; ";
    }
    c.note = os.str() + "depth " + std::to_string(modification_depth);
}

void product_reachability(Check& c)
{
    ReachOptions o;
    o.depth = product_depth;
    std::ostringstream os;
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"RUN_Y.pnet", "RUN_Y.pnet"}, {"CYCLE.pnet", "CYCLE2.pnet"}, {"DRAIN.pnet", "CYCLE.pnet"}};
    for (const auto& [f1, f2] : pairs) {
        const auto n1 = read_net(fixture(f1));
        const auto n2 = read_net(fixture(f2));
        c.require(n1.space().places().size() <= 2 && n1.space().transitions().size() <= 2, f1 + " is small");
        c.require(n2.space().places().size() <= 2 && n2.space().transitions().size() <= 2, f2 + " is small");
        const Marking m1 = *n1.initial_marking(), m2 = *n2.initial_marking();
        const auto pn = kronecker(n1, n2);
        const auto r = check_reachability_correspondence(pn, m1, m2, o);
        c.require(r.passed(), f1 + " x " + f2 + ": " + problem(r));
        for (const char* id : {"product.reach.bijection", "product.reach.integral"}) {
            bool seen = false;
            for (const auto& cl : r.clauses())
                seen = seen || (cl.id == id && cl.status == Status::Pass);
            c.require(seen, std::string(id) + " passes");
        }
        // sizes from the brute-force search on each net
        const auto r1 = oracle::reach(testnets::to_pt(n1), oracle::from_eigen(m1), product_depth);
        const auto r2 = oracle::reach(testnets::to_pt(n2), oracle::from_eigen(m2), product_depth);
        const auto rp = product_reachable(pn, product_marking(pn, m1, m2), o);
        c.require(rp.markings.size() == r1.size() * r2.size(), "|reach(product)| = |reach(N1)| * |reach(N2)|");
        // the product net alone, fired one binding-element at a time with twice the depth
        const auto rpo = oracle::reach(testnets::to_pt(pn.net), oracle::from_eigen(IntVector(product_marking(pn, m1, m2))),
                                       2 * product_depth);
        c.require(rpo.size() == rp.markings.size(), "product search agrees with the brute-force search");
        os << (os.tellp() > 0 ? "; " : "") << n1.name() << "*" << n2.name() << ": " << rp.markings.size() << " = "
           << r1.size() << "*" << r2.size();
    }
    c.note = os.str();
}

void diagonal_and_fibre_product(Check& c)
{
    const auto y = read_net(fixture("RUN_Y.pnet"));
    const Diagonal d = diagonal(y);
    c.require(d.report.passed(), "diagonal report " + problem(d.report));
    c.require(verify_morphism(d.delta).passed(), "delta verifies");
    c.require(classify(d.delta).isomorphism, "delta is an isomorphism");

    const auto id = identity_morphism(y);
    const FibreProduct fp = fibre_product(id, id);
    c.require(fp.report.passed(), "fibre product report " + problem(fp.report));
    c.require(classify(fp.base).isomorphism, "fibre product of id, id is isomorphic to RUN_Y");
    c.require(classify(fp.first).isomorphism && classify(fp.second).isomorphism, "both legs are isomorphisms");

    // mediating morphisms: (id, id) and the two unfoldings
    const auto u1 = read_morphism(fixture("unfold.pmor"));
    // the second unfolding shares the nets of the first
    const auto u2 = parse_morphism(read_file(fixture("unfold_swap.pmor")), [&](const std::string& ref) {
        return ref == "UNFOLD.pnet" ? u1.source() : u1.target();
    });
    std::size_t checked = 0;
    for (const auto& [f1, f2] : std::vector<std::pair<NetMorphism, NetMorphism>>{{id, id}, {u1, u2}, {u1, u1}}) {
        const auto pn = kronecker(f1.target(), f2.target());
        const auto m = mediate(pn, f1, f2);
        c.require(verify_morphism(m).passed(), "mediate(" + f1.name() + ", " + f2.name() + ") verifies");
        c.require(same_flow_maps(compose(projection(pn, 1), m), f1), "p1 o m = f1 on flows");
        c.require(same_flow_maps(compose(projection(pn, 2), m), f2), "p2 o m = f2 on flows");
        ++checked;
    }
    c.note = "delta isomorphism, fibre product of id,id isomorphic, " + std::to_string(checked) + " mediating pairs";
}

void winskel_conversion(Check& c)
{
    const auto w = read_winskel(fixture("WINSKEL.wsk"));
    const auto conv = from_winskel(w);
    c.require(conv.report.passed(), "conversion report " + problem(conv.report));
    const auto pi = classify(conv.pi);
    const auto g = classify(conv.g);
    c.require(pi.place_modification, "pi is a place-modification");
    c.require(g.discrete, "g is discrete");
    c.require(check_continuous(conv.g.map()), "g is continuous");
    c.require(verify_morphism(conv.g).passed(), "g verifies");

    // closed and open by the brute-force definitions
    const auto xs = oracle_space(w.source.space());
    const auto ys = oracle_space(w.target.space());
    c.require(oracle::p_closed(xs, mask(conv.domain)), "domain is closed");
    c.require(oracle::p_open(ys, mask(conv.codomain)), "codomain is open");
    std::vector<std::size_t> f;
    for (Index x = 0; x < conv.g.source().space().size(); ++x)
        f.push_back(static_cast<std::size_t>(conv.g(x)));
    c.require(oracle::continuous(oracle_space(conv.g.source().space()), oracle_space(conv.g.target().space()), f),
              "g is continuous by preimages of opens");
    c.note = "place-modification pi, discrete g, domain " + format_nodes(w.source.space(), conv.domain) + ", codomain "
        + format_nodes(w.target.space(), conv.codomain);
}

void hilbert_signedness(Check& c)
{
    const auto m = read_morphism(fixture("run.pmor"));
    const ColouredNet& x = m.source();
    const NodeSet fibre = m.fibre(m.target().space().index_of("a"));
    const FlowModule fa = flows(x, fibre);
    std::set<oracle::Vec> got;
    for (const auto& v : hilbert_basis(fa.lattice))
        got.insert(oracle::from_eigen(v));
    const std::set<oracle::Vec> taus{{1, 0, 1, 0}, {1, 1, 0, 1}};
    c.require(got == taus, "generators are exactly tau1, tau2");

    const auto rows = x.token_indices(fibre);
    const auto minimal =
        oracle::minimal_nonneg_kernel(restricted_incidence(x, rows, fa.columns), fa.columns.size(), hilbert_box);
    c.require(minimal == taus, "exhaustive minimal non-negative kernel vectors (box 5) agree");
    c.note = std::to_string(got.size()) + " generators, " + std::to_string(minimal.size()) + " minimal vectors in the box";
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"running-example flows", running_flows},
        {"running-example marking classes", running_classes},
        {"running morphism verifies and classifies", running_morphism},
        {"integer linear algebra on random matrices", integer_linear_algebra},
        {"sheaf and cosheaf axioms", sheaf_axioms},
        {"behaviour mapping", behaviour_mapping},
        {"modification invariance", modification_invariance},
        {"product reachability", product_reachability},
        {"diagonal and fibre product", diagonal_and_fibre_product},
        {"Winskel conversion", winskel_conversion},
        {"Hilbert basis signedness", hilbert_signedness},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Check c;
        try {
            run(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        const bool ok = c.failures.empty();
        failed += !ok;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << index << "  " << name;
        if (ok)
            std::cout << "  (" << c.note << ")";
        else
            std::cout << "  " << c.failures.front() << (c.failures.size() > 1 ? " (+" + std::to_string(c.failures.size() - 1) + " more)" : "");
        std::cout << "\n";
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass\n";
    return failed == 0 ? 0 : 1;
}
