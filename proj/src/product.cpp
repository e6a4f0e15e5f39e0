#include "cpn/product.hpp"

#include "cpn/error.hpp"

#include <algorithm>
#include <set>

namespace cpn {

namespace {

Index position(const std::vector<Index>& v, Index x)
{
    auto it = std::find(v.begin(), v.end(), x);
    if (it == v.end())
        throw StructuralError("index not in the expected list");
    return static_cast<Index>(it - v.begin());
}

RatVector unit(Index n, Index i)
{
    RatVector e = RatVector::Zero(n);
    e(i) = 1;
    return e;
}

void require_discrete(const NetMorphism& m)
{
    if (!is_discrete(m.map()))
        throw CategoryError("'" + m.name() + "' is not discrete");
}

bool same_space(const ColouredNet& a, const ColouredNet& b) { return a.space().id() == b.space().id(); }

Index place_count(const ColouredNet& n) { return static_cast<Index>(n.space().places().size()); }

Index fibre_places(const NetMorphism& g, Index u)
{
    return static_cast<Index>(g.fibre(u).places(g.source().space()).size());
}

std::string problem_of(const Report& r)
{
    const Clause* c = r.first_problem();
    return c ? c->id + ": " + c->detail : std::string();
}

void add_result(Report& into, const std::string& id, const std::string& description, const Report& from)
{
    if (from.passed())
        into.pass(id, description);
    else
        into.add(id, description, from.status(), problem_of(from));
}

void set_ring_from(NetMorphism& m)
{
    bool integral = true;
    for (const auto& [a, d] : m.flow_maps())
        integral = integral && is_integral(d.images) && is_integral(d.basis);
    for (const auto& [u, d] : m.mark_maps())
        integral = integral && is_integral(d.matrix);
    if (!integral)
        m.set_ring(Ring::Q);
}

// Flow image of one binding-element (global column col) of the fibre over a.
RatVector binding_image(const NetMorphism& g, Index a, Index col)
{
    const auto cols = g.source().binding_indices(g.fibre(a));
    auto img = g.flow_image(a, unit(static_cast<Index>(cols.size()), position(cols, col)));
    if (!img)
        throw CategoryError("'" + g.name() + "' has no flow image for binding-element "
                            + g.source().binding_label(col));
    return *img;
}

// Class image of one token-element (global row) of the fibre over u.
RatVector token_image(const NetMorphism& g, Index u, Index row)
{
    const auto rows = g.source().token_indices(g.fibre(u));
    return g.mark_map(u).matrix.col(position(rows, row));
}

bool lex_greater(const IntVector& a, const IntVector& b) { return lex_less(b, a); }

// Integral v with f(v) in the image of j, with a non-negative basis when the
// cone of the lattice is generated by one.
IntMatrix colour_lattice(const RatMatrix& f, const RatMatrix& j)
{
    const Index n = f.cols();
    Integer d = 1;
    for (const RatMatrix* m : {&f, &j})
        for (Index c = 0; c < m->cols(); ++c)
            for (Index r = 0; r < m->rows(); ++r)
                d = boost::multiprecision::lcm(d, denominator((*m)(r, c)));
    const IntMatrix fi = integral_part(RatMatrix(f * Rational(d)));
    const IntMatrix ji = integral_part(RatMatrix(j * Rational(d)));
    const Lattice k = kernel(hstack<Integer>(fi, IntMatrix(-ji)));
    const Lattice l = column_lattice(IntMatrix(k.basis().topRows(n)));
    if (l.rank() == 0)
        return IntMatrix(n, 0);
    try {
        auto hb = hilbert_basis(l, 2000);
        if (static_cast<Index>(hb.size()) == l.rank()) {
            std::sort(hb.begin(), hb.end(), lex_greater);
            const IntMatrix m = columns_of(hb, n);
            if (column_lattice(m) == l)
                return m;
        }
    } catch (const ResourceError&) {
    }
    return l.basis();
}

std::string combination_name(const std::vector<std::string>& names, const IntVector& v)
{
    Index nonzero = 0, last = -1;
    for (Index i = 0; i < v.size(); ++i)
        if (v(i) != 0) {
            ++nonzero;
            last = i;
        }
    if (nonzero == 1 && v(last) == 1)
        return names[static_cast<std::size_t>(last)];
    std::string s;
    for (Index i = 0; i < v.size(); ++i) {
        if (v(i) == 0)
            continue;
        Integer c = v(i);
        if (c < 0) {
            s += "-";
            c = -c;
        } else if (!s.empty()) {
            s += "+";
        }
        if (c != 1)
            s += c.str() + "*";
        s += names[static_cast<std::size_t>(i)];
    }
    return s;
}

} // namespace

// --- Kronecker product --------------------------------------------------------------

Index ProductNet::node(Index x1, Index x2) const
{
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].first == x1 && pairs[i].second == x2)
            return static_cast<Index>(i);
    return -1;
}

const ColouredNet& ProductNet::factor(int i) const
{
    if (i == 1)
        return first;
    if (i == 2)
        return second;
    throw StructuralError("a product has factors 1 and 2");
}

ProductNet kronecker(const ColouredNet& n1, const ColouredNet& n2)
{
    ProductNet pn;
    pn.first = n1;
    pn.second = n2;
    const PetriSpace& s1 = n1.space();
    const PetriSpace& s2 = n2.space();
    std::vector<std::string> names;
    std::vector<Sort> sorts;
    std::vector<std::vector<std::string>> colours;
    for (Index x1 = 0; x1 < s1.size(); ++x1)
        for (Index x2 = 0; x2 < s2.size(); ++x2) {
            if (s1.sort(x1) != s2.sort(x2))
                continue;
            pn.pairs.emplace_back(x1, x2);
            names.push_back("(" + s1.name(x1) + "," + s2.name(x2) + ")");
            sorts.push_back(s1.sort(x1));
            std::vector<std::string> cs;
            for (const auto& c : n1.colours(x1))
                cs.push_back("1:" + c);
            for (const auto& c : n2.colours(x2))
                cs.push_back("2:" + c);
            colours.push_back(std::move(cs));
            auto& origin = s1.is_place(x1) ? pn.token_origin : pn.binding_origin;
            for (Index c = 0; c < n1.colour_count(x1); ++c)
                origin.emplace_back(1, n1.global_index(x1, c));
            for (Index c = 0; c < n2.colour_count(x2); ++c)
                origin.emplace_back(2, n2.global_index(x2, c));
        }
    std::vector<std::pair<Index, Index>> adjacency;
    for (std::size_t i = 0; i < pn.pairs.size(); ++i) {
        const auto [p1, p2] = pn.pairs[i];
        if (!s1.is_place(p1))
            continue;
        for (std::size_t j = 0; j < pn.pairs.size(); ++j) {
            const auto [t1, t2] = pn.pairs[j];
            if (s1.is_transition(t1) && s1.adjacent(p1, t1) && s2.adjacent(p2, t2))
                adjacency.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
        }
    }
    const Index rows = static_cast<Index>(pn.token_origin.size());
    const Index cols = static_cast<Index>(pn.binding_origin.size());
    IntMatrix wm = IntMatrix::Zero(rows, cols), wp = IntMatrix::Zero(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) {
            const auto [fr, rr] = pn.token_origin[static_cast<std::size_t>(r)];
            const auto [fc, cc] = pn.binding_origin[static_cast<std::size_t>(c)];
            if (fr != fc)
                continue;
            const ColouredNet& n = fr == 1 ? n1 : n2;
            wm(r, c) = n.w_minus()(rr, cc);
            wp(r, c) = n.w_plus()(rr, cc);
        }
    NetOptions o;
    o.strict = false;
    o.allow_empty = true;
    pn.net = ColouredNet(n1.name() + "*" + n2.name(), PetriSpace(names, sorts, adjacency), colours, wm, wp, o);
    if (n1.initial_marking() && n2.initial_marking())
        pn.net.set_initial_marking(product_marking(pn, *n1.initial_marking(), *n2.initial_marking()));
    return pn;
}

NetMorphism projection(const ProductNet& pn, int i)
{
    const ColouredNet& target = pn.factor(i);
    const Index others = place_count(pn.factor(3 - i));
    std::vector<Index> map;
    for (const auto& [x1, x2] : pn.pairs)
        map.push_back(i == 1 ? x1 : x2);
    NetMorphism m("p" + std::to_string(i), pn.net, target, map, Ring::Q);
    for (Index a : m.image_transitions()) {
        const auto cols = pn.net.binding_indices(m.fibre(a));
        const Index k = static_cast<Index>(cols.size());
        RatMatrix images = RatMatrix::Zero(target.colour_count(a), k);
        for (Index j = 0; j < k; ++j) {
            const auto [f, c] = pn.binding_origin[static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])];
            if (f == i)
                images(c - target.offset(a), j) = 1;
        }
        m.set_flow_map(a, RatMatrix::Identity(k, k), images);
    }
    for (Index u : m.image_places()) {
        const auto rows = pn.net.token_indices(m.fibre(u));
        RatMatrix mat = RatMatrix::Zero(target.colour_count(u), static_cast<Index>(rows.size()));
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const auto [f, r] = pn.token_origin[static_cast<std::size_t>(rows[j])];
            if (f == i)
                mat(r - target.offset(u), static_cast<Index>(j)) = Rational(1) / Rational(others);
        }
        m.set_mark_map(u, mat);
    }
    return m;
}

IntVector trace_flow(const ProductNet& pn, int i, const IntVector& bindings)
{
    if (bindings.size() != pn.net.binding_count())
        throw StructuralError("binding vector has the wrong length for the product");
    IntVector out = IntVector::Zero(pn.factor(i).binding_count());
    for (Index c = 0; c < bindings.size(); ++c) {
        const auto [f, fc] = pn.binding_origin[static_cast<std::size_t>(c)];
        if (f == i)
            out(fc) += bindings(c);
    }
    return out;
}

RatVector trace_marking(const ProductNet& pn, int i, const Marking& m)
{
    if (m.size() != pn.net.token_count())
        throw StructuralError("marking has the wrong length for the product");
    const Index others = place_count(pn.factor(3 - i));
    if (others == 0)
        throw HypothesisError("marking traces need places in both factors");
    RatVector out = RatVector::Zero(pn.factor(i).token_count());
    for (Index r = 0; r < m.size(); ++r) {
        const auto [f, fr] = pn.token_origin[static_cast<std::size_t>(r)];
        if (f == i)
            out(fr) += Rational(m(r));
    }
    return out / Rational(others);
}

Marking product_marking(const ProductNet& pn, const Marking& m1, const Marking& m2)
{
    if (m1.size() != pn.first.token_count() || m2.size() != pn.second.token_count())
        throw StructuralError("factor markings have the wrong length");
    Marking out(pn.net.token_count());
    for (Index r = 0; r < out.size(); ++r) {
        const auto [f, fr] = pn.token_origin[static_cast<std::size_t>(r)];
        out(r) = f == 1 ? m1(fr) : m2(fr);
    }
    return out;
}

bool is_saturated_marking(const ProductNet& pn, const Marking& m)
{
    const RatVector t1 = trace_marking(pn, 1, m);
    const RatVector t2 = trace_marking(pn, 2, m);
    for (Index r = 0; r < m.size(); ++r) {
        const auto [f, fr] = pn.token_origin[static_cast<std::size_t>(r)];
        if (Rational(m(r)) != (f == 1 ? t1(fr) : t2(fr)))
            return false;
    }
    return true;
}

// --- universal property -------------------------------------------------------------

NetMorphism mediate(const ProductNet& pn, const NetMorphism& f1, const NetMorphism& f2)
{
    require_discrete(f1);
    require_discrete(f2);
    if (!same_space(f1.source(), f2.source()))
        throw CategoryError("'" + f1.name() + "' and '" + f2.name() + "' have different sources");
    if (!same_space(f1.target(), pn.first) || !same_space(f2.target(), pn.second))
        throw CategoryError("morphisms do not end in the factors of '" + pn.net.name() + "'");
    const ColouredNet& Y = f1.source();
    std::vector<Index> map;
    for (Index y = 0; y < Y.space().size(); ++y) {
        const Index n = pn.node(f1(y), f2(y));
        if (n < 0)
            throw CategoryError("node '" + Y.space().name(y) + "' is sent to nodes of different sorts");
        map.push_back(n);
    }
    const Ring ring = f1.ring() == Ring::Q || f2.ring() == Ring::Q ? Ring::Q : Ring::Z;
    NetMorphism m("<" + f1.name() + "," + f2.name() + ">", Y, pn.net, map, ring);
    for (Index a : m.image_transitions()) {
        const auto [a1, a2] = pn.pairs[static_cast<std::size_t>(a)];
        const Index n1 = pn.first.colour_count(a1);
        const auto cols = Y.binding_indices(m.fibre(a));
        const Index k = static_cast<Index>(cols.size());
        RatMatrix images(pn.net.colour_count(a), k);
        for (Index j = 0; j < k; ++j) {
            const Index col = cols[static_cast<std::size_t>(j)];
            images.block(0, j, n1, 1) = binding_image(f1, a1, col);
            images.block(n1, j, images.rows() - n1, 1) = binding_image(f2, a2, col);
        }
        m.set_flow_map(a, RatMatrix::Identity(k, k), images);
    }
    for (Index u : m.image_places()) {
        const auto [u1, u2] = pn.pairs[static_cast<std::size_t>(u)];
        const Index n1 = pn.first.colour_count(u1);
        const auto rows = Y.token_indices(m.fibre(u));
        RatMatrix mat(pn.net.colour_count(u), static_cast<Index>(rows.size()));
        for (std::size_t j = 0; j < rows.size(); ++j) {
            mat.block(0, static_cast<Index>(j), n1, 1) = token_image(f1, u1, rows[j]);
            mat.block(n1, static_cast<Index>(j), mat.rows() - n1, 1) = token_image(f2, u2, rows[j]);
        }
        m.set_mark_map(u, mat);
    }
    return m;
}

NetMorphism product_morphism(const NetMorphism& g1, const NetMorphism& g2, const ProductNet& source,
                             const ProductNet& target)
{
    require_discrete(g1);
    require_discrete(g2);
    if (!same_space(g1.source(), source.first) || !same_space(g2.source(), source.second)
        || !same_space(g1.target(), target.first) || !same_space(g2.target(), target.second))
        throw CategoryError("morphisms do not match the factors of the two products");
    std::vector<Index> map;
    for (const auto& [x1, x2] : source.pairs) {
        const Index n = target.node(g1(x1), g2(x2));
        if (n < 0)
            throw CategoryError("product node sent to nodes of different sorts");
        map.push_back(n);
    }
    NetMorphism m(g1.name() + "*" + g2.name(), source.net, target.net, map, Ring::Q);
    const NetMorphism* gs[] = {&g1, &g2};
    for (Index a : m.image_transitions()) {
        const auto [a1, a2] = target.pairs[static_cast<std::size_t>(a)];
        const Index ai[] = {a1, a2};
        const Index n1 = target.first.colour_count(a1);
        const auto cols = source.net.binding_indices(m.fibre(a));
        const Index k = static_cast<Index>(cols.size());
        RatMatrix images = RatMatrix::Zero(target.net.colour_count(a), k);
        for (Index j = 0; j < k; ++j) {
            const auto [f, fc] = source.binding_origin[static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])];
            const RatVector img = binding_image(*gs[f - 1], ai[f - 1], fc);
            images.block(f == 1 ? 0 : n1, j, img.size(), 1) = img;
        }
        m.set_flow_map(a, RatMatrix::Identity(k, k), images);
    }
    for (Index u : m.image_places()) {
        const auto [u1, u2] = target.pairs[static_cast<std::size_t>(u)];
        const Index ui[] = {u1, u2};
        const Index n1 = target.first.colour_count(u1);
        const Rational scale[] = {Rational(1) / Rational(fibre_places(g2, u2)),
                                  Rational(1) / Rational(fibre_places(g1, u1))};
        const auto rows = source.net.token_indices(m.fibre(u));
        RatMatrix mat = RatMatrix::Zero(target.net.colour_count(u), static_cast<Index>(rows.size()));
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const auto [f, fr] = source.token_origin[static_cast<std::size_t>(rows[j])];
            const RatVector img = token_image(*gs[f - 1], ui[f - 1], fr) * scale[f - 1];
            mat.block(f == 1 ? 0 : n1, static_cast<Index>(j), img.size(), 1) = img;
        }
        m.set_mark_map(u, mat);
    }
    set_ring_from(m);
    return m;
}

// --- diagonal --------------------------------------------------------------------------

Diagonal diagonal(const ColouredNet& n)
{
    Diagonal d;
    d.square = kronecker(n, n);
    const PetriSpace& s = n.space();
    std::vector<std::string> names;
    std::vector<Sort> sorts;
    std::vector<std::vector<std::string>> colours;
    for (Index x = 0; x < s.size(); ++x) {
        names.push_back("(" + s.name(x) + "," + s.name(x) + ")");
        sorts.push_back(s.sort(x));
        colours.push_back(n.colours(x));
    }
    NetOptions o = n.options();
    o.allow_empty = true;
    d.net = ColouredNet("Delta(" + n.name() + ")", PetriSpace(names, sorts, s.adjacency_pairs()), colours,
                        n.w_minus(), n.w_plus(), o);

    std::vector<Index> into, same;
    for (Index x = 0; x < s.size(); ++x) {
        into.push_back(d.square.node(x, x));
        same.push_back(x);
    }
    d.embedding = NetMorphism("j", d.net, d.square.net, into);
    d.delta = NetMorphism("delta", n, d.net, same);
    d.delta_inverse = NetMorphism("delta^-1", d.net, n, same);
    for (Index x = 0; x < s.size(); ++x) {
        const Index k = n.colour_count(x);
        RatMatrix doubled(2 * k, k);
        doubled << RatMatrix::Identity(k, k), RatMatrix::Identity(k, k);
        const RatMatrix id = RatMatrix::Identity(k, k);
        if (s.is_transition(x)) {
            d.embedding.set_flow_map(into[static_cast<std::size_t>(x)], id, doubled);
            d.delta.set_flow_map(x, id, id);
            d.delta_inverse.set_flow_map(x, id, id);
        } else {
            d.embedding.set_mark_map(into[static_cast<std::size_t>(x)], doubled);
            d.delta.set_mark_map(x, id);
            d.delta_inverse.set_mark_map(x, id);
        }
    }

    d.report = Report("diagonal of " + n.name());
    const auto vj = verify_morphism(d.embedding);
    add_result(d.report, "diagonal.embedding-verified", "the inclusion of the diagonal is a morphism", vj.report);
    if (vj.passed()) {
        const auto c = classify(d.embedding);
        if (c.embedding)
            d.report.pass("diagonal.embedding", "the inclusion is an embedding");
        else
            d.report.fail("diagonal.embedding", "the inclusion is an embedding", format_classification(c));
    }
    const auto vd = verify_morphism(d.delta);
    add_result(d.report, "diagonal.delta-verified", "delta is a morphism", vd.report);
    if (vd.passed()) {
        const auto c = classify(d.delta);
        if (c.isomorphism)
            d.report.pass("diagonal.isomorphism", "delta is an isomorphism");
        else
            d.report.fail("diagonal.isomorphism", "delta is an isomorphism", format_classification(c));
    }
    const NetMorphism id = identity_morphism(n);
    if (same_morphism(compose(d.embedding, d.delta), mediate(d.square, id, id)))
        d.report.pass("diagonal.factorization", "id*id equals the inclusion after delta");
    else
        d.report.fail("diagonal.factorization", "id*id equals the inclusion after delta",
                      "the mediating morphism of (id, id) differs from j o delta");
    return d;
}

// --- inverse images ------------------------------------------------------------------

std::optional<NetMorphism> lift_through(const NetMorphism& j, const NetMorphism& g)
{
    if (!same_space(j.target(), g.target()))
        throw CategoryError("'" + g.name() + "' and '" + j.name() + "' have different targets");
    if (!j.map().is_injective())
        throw CategoryError("'" + j.name() + "' is not injective");
    const ColouredNet& V = j.source();
    const ColouredNet& W = g.source();
    std::vector<Index> inv(static_cast<std::size_t>(j.target().space().size()), -1);
    for (Index v = 0; v < V.space().size(); ++v)
        inv[static_cast<std::size_t>(j(v))] = v;
    std::vector<Index> map;
    for (Index w = 0; w < W.space().size(); ++w) {
        const Index v = inv[static_cast<std::size_t>(g(w))];
        if (v < 0)
            return std::nullopt;
        map.push_back(v);
    }
    const Ring ring = g.ring() == Ring::Q || j.ring() == Ring::Q ? Ring::Q : Ring::Z;
    NetMorphism k(g.name() + "|" + V.name(), W, V, map, ring);
    for (Index v : k.image_transitions()) {
        const Index x = j(v);
        const Index nv = V.colour_count(v);
        RatMatrix jm(j.target().colour_count(x), nv);
        for (Index i = 0; i < nv; ++i) {
            auto c = j.flow_image(x, unit(nv, i));
            if (!c)
                return std::nullopt;
            jm.col(i) = *c;
        }
        const FlowModule fm = flows(W, k.fibre(v));
        const RatMatrix basis = rationalize(fm.basis());
        RatMatrix images(nv, basis.cols());
        for (Index c = 0; c < basis.cols(); ++c) {
            auto y = g.flow_image(x, RatVector(basis.col(c)));
            if (!y)
                return std::nullopt;
            auto sol = solve_linear<Rational>(jm, *y);
            if (!sol)
                return std::nullopt;
            images.col(c) = *sol;
        }
        k.set_flow_map(v, basis, images);
    }
    for (Index v : k.image_places()) {
        const Index x = j(v);
        auto sol = solve_linear<Rational>(j.mark_map(x).matrix, g.mark_map(x).matrix);
        if (!sol)
            return std::nullopt;
        k.set_mark_map(v, *sol);
    }
    set_ring_from(k);
    return k;
}

InverseImage inverse_image(const NetMorphism& f, const NetMorphism& sub)
{
    require_discrete(f);
    if (!same_space(f.target(), sub.target()))
        throw CategoryError("'" + sub.name() + "' is not a subnet of the target of '" + f.name() + "'");
    if (!sub.map().is_injective())
        throw CategoryError("'" + sub.name() + "' is not injective");
    const ColouredNet& X = f.source();
    const ColouredNet& Z = sub.source();
    const PetriSpace& SX = X.space();
    std::vector<Index> inv(static_cast<std::size_t>(f.target().space().size()), -1);
    for (Index z = 0; z < Z.space().size(); ++z)
        inv[static_cast<std::size_t>(sub(z))] = z;
    const std::vector<Index> members = f.map().preimage(sub.map().image()).members();

    // per member: images in the target of f, images of the subnet, chosen basis
    std::vector<RatMatrix> fimg, jimg;
    std::vector<IntMatrix> basis;
    std::vector<std::string> names;
    std::vector<Sort> sorts;
    std::vector<std::vector<std::string>> colours;
    for (Index x : members) {
        const Index y = f(x);
        const Index z = inv[static_cast<std::size_t>(y)];
        const Index n = X.colour_count(x);
        RatMatrix fm(f.target().colour_count(y), n);
        RatMatrix jm;
        if (SX.is_transition(x)) {
            for (Index b = 0; b < n; ++b)
                fm.col(b) = binding_image(f, y, X.global_index(x, b));
            const Index nz = Z.colour_count(z);
            jm.resize(fm.rows(), nz);
            for (Index i = 0; i < nz; ++i) {
                auto c = sub.flow_image(y, unit(nz, i));
                if (!c)
                    throw CategoryError("'" + sub.name() + "' has no flow image over '" + Z.space().name(z) + "'");
                jm.col(i) = *c;
            }
        } else {
            for (Index c = 0; c < n; ++c)
                fm.col(c) = token_image(f, y, X.global_index(x, c));
            jm = sub.mark_map(y).matrix;
        }
        IntMatrix b = colour_lattice(fm, jm);
        std::vector<std::string> cs;
        for (Index c = 0; c < b.cols(); ++c)
            cs.push_back(combination_name(X.colours(x), IntVector(b.col(c))));
        names.push_back(SX.name(x));
        sorts.push_back(SX.sort(x));
        colours.push_back(std::move(cs));
        fimg.push_back(fm);
        jimg.push_back(jm);
        basis.push_back(std::move(b));
    }

    std::vector<Index> offset(members.size());
    Index tokens = 0, bindings = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        Index& counter = SX.is_place(members[i]) ? tokens : bindings;
        offset[i] = counter;
        counter += basis[i].cols();
    }
    IntMatrix wm = IntMatrix::Zero(tokens, bindings), wp = IntMatrix::Zero(tokens, bindings);
    std::vector<std::pair<Index, Index>> adjacency;
    bool strict = X.strict();
    for (std::size_t i = 0; i < members.size(); ++i) {
        const Index p = members[i];
        if (!SX.is_place(p))
            continue;
        const auto prow = X.token_indices(NodeSet(SX, {p}));
        for (std::size_t j = 0; j < members.size(); ++j) {
            const Index t = members[j];
            if (!SX.is_transition(t))
                continue;
            const bool adj = SX.adjacent(p, t);
            if (adj)
                adjacency.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
            const auto tcol = X.binding_indices(NodeSet(SX, {t}));
            bool weight = false;
            for (Arc which : {Arc::Minus, Arc::Plus}) {
                const IntMatrix block = select<Integer>(X.matrix(which), prow, tcol) * basis[j];
                auto sol = solve_integer(basis[i], block);
                if (!sol)
                    throw CategoryError("inverse image: the incidence between '" + SX.name(p) + "' and '"
                                        + SX.name(t) + "' leaves the token lattice");
                if (!is_nonnegative(*sol))
                    throw CategoryError("inverse image: the incidence between '" + SX.name(p) + "' and '"
                                        + SX.name(t) + "' is not non-negative in the chosen basis");
                (which == Arc::Minus ? wm : wp).block(offset[i], offset[j], sol->rows(), sol->cols()) = *sol;
                weight = weight || !is_zero(*sol);
            }
            if (adj != weight)
                strict = false;
        }
    }
    NetOptions o;
    o.strict = strict;
    o.allow_empty = true;
    InverseImage out;
    out.net = ColouredNet(f.name() + "^-1(" + Z.name() + ")", PetriSpace(names, sorts, adjacency), colours, wm, wp,
                          o);
    const ColouredNet& V = out.net;

    out.inclusion = NetMorphism("j_" + X.name(), V, X, members);
    std::vector<Index> down;
    for (Index x : members)
        down.push_back(inv[static_cast<std::size_t>(f(x))]);
    const Ring ring = f.ring() == Ring::Q || sub.ring() == Ring::Q ? Ring::Q : Ring::Z;
    out.restriction = NetMorphism(f.name() + "_" + Z.name(), V, Z, down, ring);
    for (std::size_t i = 0; i < members.size(); ++i) {
        const Index r = basis[i].cols();
        if (SX.is_transition(members[i]))
            out.inclusion.set_flow_map(members[i], RatMatrix::Identity(r, r), rationalize(basis[i]));
        else
            out.inclusion.set_mark_map(members[i], rationalize(basis[i]));
    }
    for (Index z : out.restriction.image_transitions()) {
        const auto cols = V.binding_indices(out.restriction.fibre(z));
        const Index k = static_cast<Index>(cols.size());
        RatMatrix images(Z.colour_count(z), k);
        for (Index c = 0; c < k; ++c) {
            const auto [v, b] = V.binding_at(cols[static_cast<std::size_t>(c)]);
            const auto vi = static_cast<std::size_t>(v);
            auto sol = solve_linear<Rational>(jimg[vi], RatVector(fimg[vi] * rationalize(IntVector(basis[vi].col(b)))));
            if (!sol)
                throw CategoryError("inverse image: a binding-element has no image in the subnet");
            images.col(c) = *sol;
        }
        out.restriction.set_flow_map(z, RatMatrix::Identity(k, k), images);
    }
    for (Index z : out.restriction.image_places()) {
        const auto rows = V.token_indices(out.restriction.fibre(z));
        RatMatrix mat(Z.colour_count(z), static_cast<Index>(rows.size()));
        for (std::size_t c = 0; c < rows.size(); ++c) {
            const auto [v, col] = V.token_at(rows[c]);
            const auto vi = static_cast<std::size_t>(v);
            auto sol =
                solve_linear<Rational>(jimg[vi], RatVector(fimg[vi] * rationalize(IntVector(basis[vi].col(col)))));
            if (!sol)
                throw CategoryError("inverse image: a token-element has no image in the subnet");
            mat.col(static_cast<Index>(c)) = *sol;
        }
        out.restriction.set_mark_map(z, mat);
    }
    set_ring_from(out.restriction);

    out.report = Report("inverse image " + V.name());
    add_result(out.report, "inverse-image.inclusion", "the inclusion is a morphism",
               verify_morphism(out.inclusion).report);
    add_result(out.report, "inverse-image.restriction", "the restriction of f is a morphism",
               verify_morphism(out.restriction).report);
    if (same_morphism(compose(f, out.inclusion), compose(sub, out.restriction)))
        out.report.pass("inverse-image.commutes", "f o inclusion = subnet o restriction");
    else
        out.report.fail("inverse-image.commutes", "f o inclusion = subnet o restriction",
                        "the square does not commute");
    return out;
}

Report check_cartesian(const InverseImage& v, const NetMorphism& f, const NetMorphism& sub,
                       const std::vector<std::pair<NetMorphism, NetMorphism>>& cones)
{
    Report r("cartesian square over " + v.net.name());
    const char* what = "the cone factors through the inverse image";
    for (std::size_t i = 0; i < cones.size(); ++i) {
        const auto& [g, h] = cones[i];
        const std::string tag = "cone " + std::to_string(i + 1);
        if (!same_space(g.source(), h.source()) || !same_space(g.target(), f.source())
            || !same_space(h.target(), sub.source())) {
            r.fail("cartesian.cone", what, tag + " does not end in the square");
            continue;
        }
        if (!same_morphism(compose(f, g), compose(sub, h))) {
            r.fail("cartesian.cone", what, tag + " does not commute");
            continue;
        }
        auto k = lift_through(v.inclusion, g);
        if (!k) {
            r.fail("cartesian.factorization", what, tag + ": no lift through the inclusion");
            continue;
        }
        const auto vk = verify_morphism(*k);
        if (!vk.passed()) {
            r.fail("cartesian.factorization", what, tag + ": the lift is no morphism (" + problem_of(vk.report) + ")");
            continue;
        }
        if (!same_morphism(compose(v.restriction, *k), h)) {
            r.fail("cartesian.factorization", what, tag + ": the lift does not reproduce the second leg");
            continue;
        }
        r.pass("cartesian.factorization", what, tag + ": unique lift, the inclusion being injective");
    }
    return r;
}

// --- fibre products ------------------------------------------------------------------

FibreProduct fibre_product(const NetMorphism& g1, const NetMorphism& g2)
{
    require_discrete(g1);
    require_discrete(g2);
    if (!same_space(g1.target(), g2.target()))
        throw CategoryError("'" + g1.name() + "' and '" + g2.name() + "' have different targets");
    FibreProduct fp;
    fp.g1 = g1;
    fp.g2 = g2;
    fp.product = kronecker(g1.source(), g2.source());
    fp.diag = diagonal(g1.target());
    fp.product_map = product_morphism(g1, g2, fp.product, fp.diag.square);
    fp.image = inverse_image(fp.product_map, fp.diag.embedding);
    fp.first = compose(projection(fp.product, 1), fp.image.inclusion);
    fp.second = compose(projection(fp.product, 2), fp.image.inclusion);
    fp.base = compose(fp.diag.delta_inverse, fp.image.restriction);
    fp.first.set_name("q1");
    fp.second.set_name("q2");
    fp.base.set_name("base");

    Report& r = fp.report;
    r = Report("fibre product " + fp.image.net.name());
    r.append(fp.image.report);
    add_result(r, "fibre-product.first", "the first projection is a morphism", verify_morphism(fp.first).report);
    add_result(r, "fibre-product.second", "the second projection is a morphism", verify_morphism(fp.second).report);
    add_result(r, "fibre-product.base", "the basis morphism is a morphism", verify_morphism(fp.base).report);
    const NetMorphism l = compose(g1, fp.first);
    const NetMorphism rr = compose(g2, fp.second);
    if (same_flow_maps(l, rr) && same_flow_maps(l, fp.base))
        r.pass("fibre-product.square-flows", "g1 o q1 = g2 o q2 = base on flows");
    else
        r.fail("fibre-product.square-flows", "g1 o q1 = g2 o q2 = base on flows", "flow maps differ");
    if (same_class_maps(l, rr) && same_class_maps(l, fp.base))
        r.pass("fibre-product.square-classes", "g1 o q1 = g2 o q2 = base on marking classes");
    else
        r.fail("fibre-product.square-classes", "g1 o q1 = g2 o q2 = base on marking classes",
               "class maps differ (trace normalization by the place counts of the factors)");
    return fp;
}

Report check_fibre_cone(const FibreProduct& fp, const NetMorphism& h1, const NetMorphism& h2)
{
    Report r("cone (" + h1.name() + ", " + h2.name() + ") over " + fp.image.net.name());
    const char* what = "the cone factors through the fibre product";
    if (!same_morphism(compose(fp.g1, h1), compose(fp.g2, h2))) {
        r.fail("fibre-cone.commutes", what, "g1 o h1 differs from g2 o h2");
        return r;
    }
    const NetMorphism m = mediate(fp.product, h1, h2);
    auto k = lift_through(fp.image.inclusion, m);
    if (!k) {
        r.fail("fibre-cone.factorization", what, "<h1,h2> does not lift through the fibre product");
        return r;
    }
    add_result(r, "fibre-cone.morphism", "the factorization is a morphism", verify_morphism(*k).report);
    const NetMorphism q1 = compose(fp.first, *k);
    const NetMorphism q2 = compose(fp.second, *k);
    if (same_flow_maps(q1, h1) && same_flow_maps(q2, h2))
        r.pass("fibre-cone.flows", "q_i o k = h_i on flows");
    else
        r.fail("fibre-cone.flows", "q_i o k = h_i on flows", "flow maps differ");
    if (same_class_maps(q1, h1) && same_class_maps(q2, h2))
        r.pass("fibre-cone.classes", "q_i o k = h_i on marking classes");
    else
        r.fail("fibre-cone.classes", "q_i o k = h_i on marking classes",
               "class maps differ (trace normalization by the place counts of the factors)");
    return r;
}

// --- reachability ------------------------------------------------------------------------

ReachGraph product_reachable(const ProductNet& pn, const Marking& m0, const ReachOptions& opts)
{
    std::vector<Step> steps;
    for (Index t : pn.net.space().transitions()) {
        const auto [t1, t2] = pn.pairs[static_cast<std::size_t>(t)];
        const Index k1 = pn.first.colour_count(t1);
        const Index k = pn.net.colour_count(t);
        for (Index b = 0; b < k; ++b) {
            IntVector c = IntVector::Zero(k);
            c(b) = 1;
            steps.push_back(Step{t, c});
        }
        for (Index b1 = 0; b1 < k1; ++b1)
            for (Index b2 = k1; b2 < k; ++b2) {
                IntVector c = IntVector::Zero(k);
                c(b1) = 1;
                c(b2) = 1;
                steps.push_back(Step{t, c});
            }
    }
    return reachable_steps(pn.net, m0, steps, opts);
}

Report check_reachability_correspondence(const ProductNet& pn, const Marking& m1, const Marking& m2,
                                         const ReachOptions& opts)
{
    if (place_count(pn.first) == 0 || place_count(pn.second) == 0)
        throw HypothesisError("marking traces need places in both factors");
    Report r("reachability in " + pn.net.name());
    const ReachGraph g = product_reachable(pn, product_marking(pn, m1, m2), opts);
    const ReachGraph g1 = reachable(pn.first, m1, opts);
    const ReachGraph g2 = reachable(pn.second, m2, opts);

    std::size_t unsaturated = 0, fractional = 0, outside = 0;
    std::set<std::pair<std::size_t, std::size_t>> hit;
    for (const auto& m : g.markings) {
        if (!is_saturated_marking(pn, m))
            ++unsaturated;
        const RatVector t1 = trace_marking(pn, 1, m);
        const RatVector t2 = trace_marking(pn, 2, m);
        if (!is_integral(t1) || !is_integral(t2)) {
            ++fractional;
            continue;
        }
        auto i1 = g1.index_of(integral_part(t1));
        auto i2 = g2.index_of(integral_part(t2));
        if (!i1 || !i2) {
            ++outside;
            continue;
        }
        hit.emplace(*i1, *i2);
    }
    const std::string counts = std::to_string(g.markings.size()) + " product markings, "
        + std::to_string(g1.markings.size()) + " x " + std::to_string(g2.markings.size()) + " factor markings";
    if (unsaturated == 0)
        r.pass("product.reach.saturated", "reachable product markings are saturated");
    else
        r.fail("product.reach.saturated", "reachable product markings are saturated",
               std::to_string(unsaturated) + " unsaturated markings");
    if (fractional == 0)
        r.pass("product.reach.integral", "traces of reachable markings are integral");
    else
        r.fail("product.reach.integral", "traces of reachable markings are integral",
               std::to_string(fractional) + " markings with fractional traces");
    if (outside == 0)
        r.pass("product.reach.image", "traces are pairs of reachable factor markings");
    else
        r.fail("product.reach.image", "traces are pairs of reachable factor markings",
               std::to_string(outside) + " markings trace outside the factor sets");
    const bool injective = hit.size() + fractional + outside == g.markings.size();
    const bool bijective = injective && outside == 0 && fractional == 0
        && hit.size() == g1.markings.size() * g2.markings.size();
    if (bijective)
        r.pass("product.reach.bijection", "the trace pair is a bijection", counts);
    else
        r.fail("product.reach.bijection", "the trace pair is a bijection", counts);
    if (g.truncated || g1.truncated || g2.truncated) {
        std::string which = g.truncated ? g.truncation : g1.truncated ? g1.truncation : g2.truncation;
        r.add("product.reach.bounds", "exploration complete", Status::Inconclusive, which);
    }
    return r;
}

} // namespace cpn
