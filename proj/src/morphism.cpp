#include "cpn/morphism.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace cpn {

namespace {

Index position(const std::vector<Index>& v, Index x)
{
    auto it = std::find(v.begin(), v.end(), x);
    if (it == v.end())
        throw StructuralError("internal: index " + std::to_string(x) + " missing from a section basis");
    return static_cast<Index>(it - v.begin());
}

/// Re-index v (given on global indices `from`) onto `to`, dropping the rest.
RatVector pick(const std::vector<Index>& from, const RatVector& v, const std::vector<Index>& to)
{
    RatVector out(static_cast<Index>(to.size()));
    for (std::size_t i = 0; i < to.size(); ++i)
        out(static_cast<Index>(i)) = v(position(from, to[i]));
    return out;
}

std::optional<RatVector> coordinates_in(const RatMatrix& basis, const RatVector& v)
{
    if (basis.cols() == 0)
        return is_zero(v) ? std::optional<RatVector>(RatVector(0)) : std::nullopt;
    auto x = solve_linear<Rational>(basis, v);
    if (!x || RatVector(basis * *x) != v)
        return std::nullopt;
    return x;
}

bool all_integral(const RatMatrix& m) { return is_integral(m); }

std::string fmt_rational(const Rational& r)
{
    std::ostringstream os;
    os << r;
    return os.str();
}

/// "(2 2)", "(1 0 / 0 1)"
std::string fmt_block(const RatMatrix& m)
{
    std::string s = "(";
    for (Index i = 0; i < m.rows(); ++i) {
        if (i)
            s += " / ";
        for (Index j = 0; j < m.cols(); ++j) {
            if (j)
                s += " ";
            s += fmt_rational(m(i, j));
        }
    }
    return s + ")";
}

} // namespace

// --- NetMorphism ------------------------------------------------------------------------

NetMorphism::NetMorphism(std::string name, ColouredNet source, ColouredNet target, std::vector<Index> node_map,
                         Ring ring)
    : name_(std::move(name)), source_(std::move(source)), target_(std::move(target)),
      f_(source_.space(), target_.space(), std::move(node_map)), ring_(ring)
{
    if (ring_ == Ring::N)
        throw StructuralError("morphism coefficients are integers or rationals");
}

std::vector<Index> NetMorphism::image_transitions() const
{
    std::vector<Index> out;
    for (Index a : target_.space().transitions())
        if (!fibre(a).empty())
            out.push_back(a);
    return out;
}

std::vector<Index> NetMorphism::image_places() const
{
    std::vector<Index> out;
    for (Index u : target_.space().places())
        if (!fibre(u).empty())
            out.push_back(u);
    return out;
}

void NetMorphism::set_flow_map(Index a, RatMatrix basis, RatMatrix images, std::vector<std::string> names)
{
    if (!target_.space().is_transition(a))
        throw SortError("flow map given for place '" + target_.space().name(a) + "'");
    const auto cols = source_.binding_indices(fibre(a));
    if (basis.rows() != static_cast<Index>(cols.size()))
        throw StructuralError("flow basis over '" + target_.space().name(a) + "' has " + std::to_string(basis.rows())
                              + " coordinates, the fibre has " + std::to_string(cols.size()) + " binding-elements");
    if (images.rows() != target_.colour_count(a) || images.cols() != basis.cols())
        throw StructuralError("flow images over '" + target_.space().name(a) + "' have the wrong shape");
    if (!names.empty() && static_cast<Index>(names.size()) != basis.cols())
        throw StructuralError("flow basis names do not match the basis");
    flow_maps_[a] = FlowMapData{std::move(basis), std::move(images), std::move(names)};
}

void NetMorphism::set_mark_map(Index u, RatMatrix matrix)
{
    if (!target_.space().is_place(u))
        throw SortError("class map given for transition '" + target_.space().name(u) + "'");
    const auto rows = source_.token_indices(fibre(u));
    if (matrix.rows() != target_.colour_count(u) || matrix.cols() != static_cast<Index>(rows.size()))
        throw StructuralError("class map over '" + target_.space().name(u) + "' has the wrong shape");
    mark_maps_[u] = MarkMapData{std::move(matrix), {}};
}

void NetMorphism::set_mark_generators(Index u, std::vector<std::pair<Index, RatVector>> generators)
{
    if (!target_.space().is_place(u))
        throw SortError("class map given for transition '" + target_.space().name(u) + "'");
    const NodeSet fib = fibre(u);
    if (!is_open(source_.space(), fib))
        throw StructuralError("fibre over '" + target_.space().name(u) + "' is not open");
    const auto rows = source_.token_indices(fib);
    const Index n = static_cast<Index>(rows.size());
    const Index c = target_.colour_count(u);
    const auto classes = marking_classes(source_, fib);
    const IntMatrix& rel = classes.quotient.relations().basis();

    IntMatrix gen = IntMatrix::Zero(n, static_cast<Index>(generators.size()));
    for (std::size_t k = 0; k < generators.size(); ++k) {
        const auto& [row, img] = generators[k];
        if (std::find(rows.begin(), rows.end(), row) == rows.end())
            throw StructuralError("token-element '" + source_.token_label(row) + "' is not in the fibre over '"
                                  + target_.space().name(u) + "'");
        if (img.size() != c)
            throw StructuralError("image of '" + source_.token_label(row) + "' has the wrong length");
        gen(position(rows, row), static_cast<Index>(k)) = 1;
    }
    const IntMatrix sys = hstack(gen, rel);
    RatMatrix m = RatMatrix::Zero(c, n);
    for (Index j = 0; j < n; ++j) {
        bool direct = false;
        for (const auto& [row, img] : generators)
            if (rows[static_cast<std::size_t>(j)] == row) {
                m.col(j) = img;
                direct = true;
                break;
            }
        if (direct)
            continue;
        IntVector e = IntVector::Zero(n);
        e(j) = 1;
        std::optional<RatVector> x;
        if (ring_ == Ring::Z) {
            if (auto xi = solve_integer(sys, e))
                x = rationalize(*xi);
        } else {
            x = solve_linear<Rational>(rationalize(sys), rationalize(e));
        }
        if (!x)
            throw StructuralError("class of token-element '" + source_.token_label(rows[static_cast<std::size_t>(j)])
                                  + "' is not determined by the given images");
        for (std::size_t k = 0; k < generators.size(); ++k)
            m.col(j) += (*x)(static_cast<Index>(k)) * generators[k].second;
    }
    mark_maps_[u] = MarkMapData{std::move(m), std::move(generators)};
}

const FlowMapData& NetMorphism::flow_map(Index a) const
{
    auto it = flow_maps_.find(a);
    if (it == flow_maps_.end())
        throw StructuralError("no flow map over '" + target_.space().name(a) + "'");
    return it->second;
}

const MarkMapData& NetMorphism::mark_map(Index u) const
{
    auto it = mark_maps_.find(u);
    if (it == mark_maps_.end())
        throw StructuralError("no class map over '" + target_.space().name(u) + "'");
    return it->second;
}

std::optional<RatVector> NetMorphism::flow_image(Index a, const RatVector& flow) const
{
    auto it = flow_maps_.find(a);
    if (it == flow_maps_.end()) {
        // a fibre without flows needs no data
        if (is_zero(flow))
            return RatVector(RatVector::Zero(target_.colour_count(a)));
        return std::nullopt;
    }
    auto x = coordinates_in(it->second.basis, flow);
    if (!x)
        return std::nullopt;
    return RatVector(it->second.images * *x);
}

std::optional<RatVector> NetMorphism::flow_image_over(const NodeSet& closed, const RatVector& flow) const
{
    const auto from = source_.binding_indices(f_.preimage(closed));
    const auto to = target_.binding_indices(closed);
    if (flow.size() != static_cast<Index>(from.size()))
        throw StructuralError("flow has the wrong length for the preimage");
    RatVector out = RatVector::Zero(static_cast<Index>(to.size()));
    for (Index a : closed.transitions(target_.space())) {
        const NodeSet fib = fibre(a);
        if (fib.empty())
            continue;
        auto img = flow_image(a, pick(from, flow, source_.binding_indices(fib)));
        if (!img)
            return std::nullopt;
        const Index off = position(to, target_.offset(a));
        out.segment(off, img->size()) = *img;
    }
    return out;
}

std::optional<RatMatrix> NetMorphism::transition_fibre_marks(Index a) const
{
    const PetriSpace& Y = target_.space();
    const NodeSet fib = fibre(a);
    const NodeSet around = basic_open(Y, a);
    const auto rows = target_.token_indices(around);
    const auto unknown_tokens = source_.token_indices(fib);
    const auto cols = source_.binding_indices(fib);
    const Index r = static_cast<Index>(rows.size());
    const Index q = static_cast<Index>(unknown_tokens.size());
    const Index nb = static_cast<Index>(cols.size());
    const Index m = target_.colour_count(a);

    // known part: class maps of the neighbouring place fibres applied to the relations
    RatMatrix known = RatMatrix::Zero(r, nb);
    for (Index u : around.places(Y)) {
        const NodeSet fu = fibre(u);
        if (fu.empty())
            continue;
        auto it = mark_maps_.find(u);
        if (it == mark_maps_.end())
            return std::nullopt;
        const RatMatrix w = rationalize(select(source_.incidence(), source_.token_indices(fu), cols));
        known.middleRows(position(rows, target_.offset(u)), target_.colour_count(u)) += it->second.matrix * w;
    }
    const RatMatrix v = rationalize(select(source_.incidence(), unknown_tokens, cols));
    const RatMatrix wy = rationalize(select(target_.incidence(), rows, target_.binding_indices(NodeSet(Y, {a}))));

    // unknowns: Y (r x q, row-major) then S (m x nb, column by column); Y v - wy S = -known
    const Index nvar = r * q + m * nb;
    RatMatrix sys = RatMatrix::Zero(r * nb, nvar);
    RatVector rhs(r * nb);
    for (Index b = 0; b < nb; ++b)
        for (Index i = 0; i < r; ++i) {
            const Index eq = b * r + i;
            for (Index j = 0; j < q; ++j)
                sys(eq, i * q + j) = v(j, b);
            for (Index k = 0; k < m; ++k)
                sys(eq, r * q + b * m + k) = -wy(i, k);
            rhs(eq) = -known(i, b);
        }
    std::optional<RatVector> z;
    if (ring_ == Ring::Z && all_integral(sys) && all_integral(RatMatrix(rhs))) {
        if (auto zi = solve_integer(integral_part(sys), integral_part(rhs)))
            z = rationalize(*zi);
    } else if (ring_ == Ring::Q) {
        z = solve_linear<Rational>(sys, rhs);
    }
    if (!z)
        return std::nullopt;
    RatMatrix y(r, q);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < q; ++j)
            y(i, j) = (*z)(i * q + j);
    if (ring_ == Ring::Z && r > 0) {
        const QuotientModule target_classes(select(target_.incidence(), rows,
                                                   target_.binding_indices(NodeSet(Y, {a}))));
        for (Index j = 0; j < q; ++j)
            y.col(j) = rationalize(target_classes.canonical_rep(integral_part(RatVector(y.col(j)))));
    }
    return y;
}

RatMatrix NetMorphism::mark_matrix_over(const NodeSet& open) const
{
    const PetriSpace& Y = target_.space();
    require_member(Y, open);
    if (!is_open(Y, open))
        throw StructuralError("induced class map requested over a set that is not open: " + format_nodes(Y, open));
    const auto rows = target_.token_indices(open);
    const auto cols = source_.token_indices(f_.preimage(open));
    RatMatrix out = RatMatrix::Zero(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (Index y : open.members()) {
        const NodeSet fib = fibre(y);
        const auto fib_tokens = source_.token_indices(fib);
        if (fib_tokens.empty())
            continue;
        RatMatrix block;
        std::vector<Index> block_rows;
        if (Y.is_place(y)) {
            block = mark_map(y).matrix;
            block_rows = target_.token_indices(NodeSet(Y, {y}));
        } else {
            auto tm = transition_fibre_marks(y);
            if (!tm)
                throw StructuralError("places over transition '" + Y.name(y) + "' admit no class images");
            block = *tm;
            block_rows = target_.token_indices(basic_open(Y, y));
        }
        for (std::size_t j = 0; j < fib_tokens.size(); ++j) {
            const Index cj = position(cols, fib_tokens[j]);
            for (std::size_t i = 0; i < block_rows.size(); ++i)
                out(position(rows, block_rows[i]), cj) += block(static_cast<Index>(i), static_cast<Index>(j));
        }
    }
    return out;
}

NetMorphism identity_morphism(const ColouredNet& net)
{
    std::vector<Index> id(static_cast<std::size_t>(net.space().size()));
    for (Index i = 0; i < net.space().size(); ++i)
        id[static_cast<std::size_t>(i)] = i;
    NetMorphism m("id_" + net.name(), net, net, id, Ring::Z);
    for (Index t : net.space().transitions()) {
        const Index k = net.colour_count(t);
        m.set_flow_map(t, RatMatrix::Identity(k, k), RatMatrix::Identity(k, k));
    }
    for (Index p : net.space().places()) {
        const Index k = net.colour_count(p);
        m.set_mark_map(p, RatMatrix::Identity(k, k));
    }
    return m;
}

// --- signedness helpers ---------------------------------------------------------------

namespace {

/// Fourier-Motzkin feasibility of { x : a x >= b } over Q; nullopt once the
/// system grows beyond the guard.
std::optional<bool> rational_feasible(RatMatrix a, RatVector b, std::size_t guard = 4000)
{
    while (a.cols() > 0) {
        const Index last = a.cols() - 1;
        std::vector<Index> pos, neg, zero;
        for (Index i = 0; i < a.rows(); ++i) {
            if (a(i, last) > 0)
                pos.push_back(i);
            else if (a(i, last) < 0)
                neg.push_back(i);
            else
                zero.push_back(i);
        }
        const std::size_t count = zero.size() + pos.size() * neg.size();
        if (count > guard)
            return std::nullopt;
        RatMatrix na(static_cast<Index>(count), last);
        RatVector nb(static_cast<Index>(count));
        Index row = 0;
        for (Index i : zero) {
            na.row(row) = a.row(i).head(last);
            nb(row++) = b(i);
        }
        for (Index i : pos)
            for (Index j : neg) {
                const Rational cp = a(i, last), cn = -a(j, last);
                na.row(row) = cn * a.row(i).head(last) + cp * a.row(j).head(last);
                nb(row++) = cn * b(i) + cp * b(j);
            }
        a = std::move(na);
        b = std::move(nb);
    }
    for (Index i = 0; i < b.size(); ++i)
        if (b(i) > 0)
            return false;
    return true;
}

} // namespace

std::optional<bool> has_nonnegative_representative(const QuotientModule& q, const IntVector& v, std::size_t budget)
{
    const IntVector rep = q.canonical_rep(v);
    if (is_nonnegative(rep))
        return true;
    const IntMatrix& rel = q.relations().basis();
    const Index k = rel.cols();
    if (k == 0)
        return false;
    // v + rel x >= 0 has no rational solution -> certainly none
    auto feasible = rational_feasible(rationalize(rel), rationalize(IntVector(-rep)));
    if (feasible && !*feasible)
        return false;
    // bounded integer search over growing boxes
    std::size_t visited = 0;
    for (long radius = 1;; ++radius) {
        std::vector<long> x(static_cast<std::size_t>(k), -radius);
        while (true) {
            bool on_shell = false;
            for (long xi : x)
                on_shell = on_shell || xi == radius || xi == -radius;
            if (on_shell) {
                if (++visited > budget)
                    return std::nullopt;
                IntVector cand = rep;
                for (Index j = 0; j < k; ++j)
                    cand += Integer(x[static_cast<std::size_t>(j)]) * rel.col(j);
                if (is_nonnegative(cand))
                    return true;
            }
            std::size_t d = 0;
            while (d < x.size() && x[d] == radius)
                x[d++] = -radius;
            if (d == x.size())
                break;
            ++x[d];
        }
    }
}

namespace {

/// Class has a non-negative representative over Q (decided exactly up to the FM guard).
std::optional<bool> has_nonnegative_rational_rep(const RatMatrix& relations, const RatVector& v)
{
    if (is_nonnegative(v))
        return true;
    if (relations.cols() == 0)
        return false;
    return rational_feasible(relations, RatVector(-v));
}

} // namespace

// --- verification ------------------------------------------------------------------------

std::string IncidenceSquare::equation() const
{
    return fmt_block(target_incidence) + "·" + fmt_block(flow_images) + " = " + fmt_block(class_map) + "·"
        + fmt_block(source_classes);
}

MorphismReport verify_morphism(const NetMorphism& m, const VerifyOptions& opts)
{
    MorphismReport out;
    Report& r = out.report;
    r = Report("morphism " + m.name());
    const ColouredNet& X = m.source();
    const ColouredNet& Yn = m.target();
    const PetriSpace& XS = X.space();
    const PetriSpace& YS = Yn.space();
    const bool integral = m.ring() == Ring::Z;

    // (1) continuity
    if (!check_continuous(m.map())) {
        std::string detail;
        for (const auto& open : canonical_basis(YS))
            if (!is_open(XS, m.map().preimage(open))) {
                detail = "preimage of " + format_nodes(YS, open) + " is " + format_nodes(XS, m.map().preimage(open))
                    + ", not open";
                break;
            }
        r.fail("morphism.continuity", "node map is continuous", detail);
        return out;
    }
    r.pass("morphism.continuity", "node map is continuous");

    const auto image_t = m.image_transitions();
    const auto image_p = m.image_places();

    // (2) flow bases
    {
        std::string problem;
        for (Index a : image_t) {
            const NodeSet fib = m.fibre(a);
            const FlowModule fm = flows(X, fib);
            auto it = m.flow_maps().find(a);
            if (it == m.flow_maps().end()) {
                if (fm.rank() != 0) {
                    problem = "no flow basis over '" + YS.name(a) + "' although its fibre has flows of rank "
                        + std::to_string(fm.rank());
                    break;
                }
                continue;
            }
            const RatMatrix& basis = it->second.basis;
            if (rank_of(basis) != basis.cols()) {
                problem = "flow basis over '" + YS.name(a) + "' is linearly dependent";
                break;
            }
            if (integral) {
                if (!is_integral(basis) || Lattice(integral_part(basis)) != fm.lattice) {
                    problem = "flow basis over '" + YS.name(a) + "' does not span the flows of "
                        + format_nodes(XS, fib) + " (rank " + std::to_string(fm.rank()) + ")";
                    break;
                }
                if (!is_integral(it->second.images)) {
                    problem = "flow images over '" + YS.name(a) + "' are not integral";
                    break;
                }
            } else {
                const RatMatrix span = rationalize(fm.lattice);
                if (basis.cols() != span.cols() || rank_of(RatMatrix(hstack(span, basis))) != span.cols()) {
                    problem = "flow basis over '" + YS.name(a) + "' does not span the rational flows of "
                        + format_nodes(XS, fib);
                    break;
                }
            }
        }
        if (!problem.empty()) {
            r.fail("morphism.flow-basis", "flow bases span the flows of the transition fibres", problem);
            return out;
        }
        r.pass("morphism.flow-basis", "flow bases span the flows of the transition fibres");
    }

    // (3) induced flow maps over the basic closed sets of image places
    {
        std::string problem;
        for (Index u : image_p) {
            const NodeSet around = basic_closed(YS, u);
            const NodeSet pre = m.map().preimage(around);
            const FlowModule fm = flows(X, pre);
            const IntMatrix wu = incidence_matrix(Yn, NodeSet(YS, {u}), around);
            for (Index j = 0; j < fm.rank() && problem.empty(); ++j) {
                const RatVector phi = rationalize(IntVector(fm.basis().col(j)));
                auto img = m.flow_image_over(around, phi);
                if (!img) {
                    problem = "a flow over " + format_nodes(XS, pre) + " restricts outside the flow bases";
                    break;
                }
                if (!is_zero(RatVector(rationalize(wu) * *img)))
                    problem = "flow " + format_section(X, fm.columns, ColourKind::Binding, phi) + " maps to "
                        + format_section(Yn, Yn.binding_indices(around), ColourKind::Binding, *img)
                        + ", which violates the flow condition at '" + YS.name(u) + "'";
            }
            if (!problem.empty())
                break;
        }
        if (!problem.empty()) {
            r.fail("morphism.flow-condition", "induced flow maps land in the flows of the target", problem);
            return out;
        }
        r.pass("morphism.flow-condition", "induced flow maps land in the flows of the target");
    }

    // (4) class maps: well defined over place fibres and over transition neighbourhoods
    {
        std::string problem;
        for (Index u : image_p) {
            const NodeSet fib = m.fibre(u);
            auto it = m.mark_maps().find(u);
            const auto tokens = X.token_indices(fib);
            if (it == m.mark_maps().end()) {
                if (!tokens.empty()) {
                    problem = "no class map over '" + YS.name(u) + "'";
                    break;
                }
                continue;
            }
            const RatMatrix& mu = it->second.matrix;
            if (integral && !is_integral(mu)) {
                problem = "class map over '" + YS.name(u) + "' is not integral";
                break;
            }
            const auto classes = marking_classes(X, fib);
            const RatMatrix killed = mu * rationalize(classes.quotient.relations().basis());
            if (!is_zero(killed)) {
                problem = "class map over '" + YS.name(u) + "' does not vanish on the relations of "
                    + format_nodes(XS, fib);
                break;
            }
            for (const auto& [row, img] : it->second.generators)
                if (RatVector(mu.col(position(tokens, row))) != img) {
                    problem = "class map over '" + YS.name(u) + "' disagrees with the image given for "
                        + X.token_label(row);
                    break;
                }
            if (!problem.empty())
                break;
        }
        if (!problem.empty()) {
            r.fail("morphism.class-map", "class maps are well defined on the place fibres", problem);
            return out;
        }
        r.pass("morphism.class-map", "class maps are well defined on the place fibres");

        for (Index a : image_t)
            if (!m.transition_fibre_marks(a)) {
                problem = "no class map over " + format_nodes(YS, basic_open(YS, a))
                    + " is compatible with the relations of its preimage";
                break;
            }
        if (!problem.empty()) {
            r.fail("morphism.transition-neighbourhood",
                   "class maps extend over the neighbourhoods of image transitions", problem);
            return out;
        }
        r.pass("morphism.transition-neighbourhood", "class maps extend over the neighbourhoods of image transitions");
    }

    // (5) signedness
    {
        Status st = Status::Pass;
        std::string detail;
        for (Index a : image_t) {
            const FlowModule fm = flows(X, m.fibre(a));
            if (fm.rank() == 0)
                continue;
            std::vector<IntVector> gens;
            try {
                gens = hilbert_basis(fm.lattice, opts.hilbert_guard);
            } catch (const ResourceError& e) {
                st = Status::Inconclusive;
                detail = "Hilbert basis over '" + YS.name(a) + "' exceeds the guard (" + e.what() + ")";
                continue;
            }
            for (const auto& h : gens) {
                auto img = m.flow_image(a, rationalize(h));
                if (!img || !is_nonnegative(*img)) {
                    st = Status::Fail;
                    detail = "non-negative flow " + format_section(X, fm.columns, ColourKind::Binding, h)
                        + " maps to " + (img ? format_section(Yn, Yn.binding_indices(NodeSet(YS, {a})),
                                                              ColourKind::Binding, *img)
                                             : std::string("nothing"));
                    break;
                }
            }
            if (st == Status::Fail)
                break;
        }
        if (st == Status::Fail) {
            r.fail("morphism.signed-flows", "non-negative flows map to non-negative bindings", detail);
            return out;
        }
        r.add("morphism.signed-flows", "non-negative flows map to non-negative bindings", st, detail);

        st = Status::Pass;
        detail.clear();
        for (const auto& [u, data] : m.mark_maps())
            if (!is_nonnegative(data.matrix)) {
                st = Status::Fail;
                detail = "class map over '" + YS.name(u) + "' sends a token-element to a negative vector";
                break;
            }
        if (st == Status::Pass)
            for (Index a : image_t) {
                const RatMatrix y = *m.transition_fibre_marks(a);
                const NodeSet around = basic_open(YS, a);
                const auto rows = Yn.token_indices(around);
                const IntMatrix rel = select(Yn.incidence(), rows, Yn.binding_indices(NodeSet(YS, {a})));
                const auto src = X.token_indices(m.fibre(a));
                for (Index j = 0; j < y.cols(); ++j) {
                    std::optional<bool> ok;
                    if (integral)
                        ok = has_nonnegative_representative(QuotientModule(rel), integral_part(RatVector(y.col(j))));
                    else
                        ok = has_nonnegative_rational_rep(rationalize(rel), RatVector(y.col(j)));
                    if (!ok) {
                        st = Status::Inconclusive;
                        detail = "could not decide the sign of the image of " + X.token_label(src[static_cast<std::size_t>(j)]);
                    } else if (!*ok) {
                        st = Status::Fail;
                        detail = "token-element " + X.token_label(src[static_cast<std::size_t>(j)])
                            + " has no non-negative class image over " + format_nodes(YS, around);
                        break;
                    }
                }
                if (st == Status::Fail)
                    break;
            }
        if (st == Status::Fail) {
            r.fail("morphism.signed-classes", "token-elements map to non-negative classes", detail);
            return out;
        }
        r.add("morphism.signed-classes", "token-elements map to non-negative classes", st, detail);
    }

    // (6) incidence diagrams
    for (Arc which : {Arc::Minus, Arc::Plus}) {
        const char* id = which == Arc::Minus ? "morphism.incidence-minus" : "morphism.incidence-plus";
        std::string problem;
        for (Index a : image_t) {
            auto it = m.flow_maps().find(a);
            if (it == m.flow_maps().end())
                continue;
            const FlowMapData& fd = it->second;
            const NodeSet fa = m.fibre(a);
            for (Index u : basic_open(YS, a).places(YS)) {
                if (m.fibre(u).empty())
                    continue;
                const NodeSet fu = m.fibre(u);
                const RatMatrix& mu = m.mark_map(u).matrix;
                const RatMatrix wx = rationalize(incidence_matrix(X, fu, fa, which));
                const RatMatrix wy = rationalize(incidence_matrix(Yn, NodeSet(YS, {u}), NodeSet(YS, {a}), which));
                const RatMatrix lhs = mu * wx * fd.basis;
                const RatMatrix rhs = wy * fd.images;
                IncidenceSquare sq;
                sq.transition = a;
                sq.place = u;
                sq.which = which;
                sq.target_incidence = wy;
                sq.flow_images = fd.images;
                sq.commutes = lhs == rhs;
                const RatMatrix src = wx * fd.basis;
                const auto classes = marking_classes(X, fu);
                if (is_integral(src)) {
                    const IntMatrix isrc = integral_part(src);
                    const Index cc = classes.quotient.coordinate_count();
                    sq.class_map = mu * rationalize(classes.quotient.generators());
                    sq.source_classes = RatMatrix(cc, src.cols());
                    for (Index j = 0; j < src.cols(); ++j)
                        sq.source_classes.col(j) = rationalize(classes.quotient.coordinates(IntVector(isrc.col(j))));
                } else {
                    sq.class_map = mu;
                    sq.source_classes = src;
                }
                if (!sq.commutes && problem.empty())
                    problem = std::string(which == Arc::Minus ? "w-" : "w+") + " square over ('" + YS.name(a)
                        + "', '" + YS.name(u) + "') does not commute: " + fmt_block(rhs) + " against "
                        + fmt_block(lhs);
                out.squares.push_back(std::move(sq));
            }
        }
        if (!problem.empty()) {
            r.fail(id, "class map and flow images commute with the incidence", problem);
            return out;
        }
        r.pass(id, "class map and flow images commute with the incidence");
    }
    return out;
}

// --- classification ---------------------------------------------------------------------

namespace {

bool flow_surjective(const NetMorphism& m, Index a)
{
    const Index n = m.target().colour_count(a);
    auto it = m.flow_maps().find(a);
    if (it == m.flow_maps().end())
        return n == 0;
    const RatMatrix& img = it->second.images;
    if (m.ring() == Ring::Q)
        return rank_of(img) == n;
    return is_integral(img) && Lattice(integral_part(img)) == Lattice::full(n);
}

bool flow_injective(const NetMorphism& m, Index a)
{
    auto it = m.flow_maps().find(a);
    if (it == m.flow_maps().end())
        return true;
    return rank_of(it->second.images) == it->second.images.cols();
}

bool mark_surjective(const NetMorphism& m, Index u)
{
    const Index n = m.target().colour_count(u);
    auto it = m.mark_maps().find(u);
    if (it == m.mark_maps().end())
        return n == 0;
    const RatMatrix& mu = it->second.matrix;
    if (m.ring() == Ring::Q)
        return rank_of(mu) == n;
    return is_integral(mu) && Lattice(integral_part(mu)) == Lattice::full(n);
}

bool mark_injective(const NetMorphism& m, Index u)
{
    const auto classes = marking_classes(m.source(), m.fibre(u));
    auto it = m.mark_maps().find(u);
    const Index n = static_cast<Index>(classes.rows.size());
    if (it == m.mark_maps().end())
        return classes.quotient.relations().rank() == n;
    const RatMatrix& mu = it->second.matrix;
    if (m.ring() == Ring::Q || !is_integral(mu))
        return n - rank_of(mu) == classes.quotient.relations().rank();
    return kernel(integral_part(mu)) == classes.quotient.relations();
}

} // namespace

Classification classify(const NetMorphism& m, const VerifyOptions& opts)
{
    (void)opts;
    Classification c;
    const SpaceMap& f = m.map();
    const auto image_t = m.image_transitions();
    const auto image_p = m.image_places();
    const bool integral = m.ring() == Ring::Z;

    bool f_surj = true, f_inj = true, m_surj = true, m_inj = true;
    for (Index a : image_t) {
        f_surj = f_surj && flow_surjective(m, a);
        f_inj = f_inj && flow_injective(m, a);
    }
    for (Index u : image_p) {
        m_surj = m_surj && mark_surjective(m, u);
        m_inj = m_inj && mark_injective(m, u);
    }
    c.discrete = is_discrete(f);
    c.abstraction = f.is_surjective() && f_surj && m_surj;
    c.embedding = is_topological_embedding(f) && f_inj && m_inj;

    bool bijective = f.is_surjective() && c.discrete && f_surj && f_inj && m_surj && m_inj;
    bool inverse_signed = true;
    if (bijective) {
        for (Index a : image_t) {
            auto it = m.flow_maps().find(a);
            if (it == m.flow_maps().end())
                continue;
            const RatMatrix& img = it->second.images;
            for (Index b = 0; b < img.rows() && inverse_signed; ++b) {
                RatVector e = RatVector::Zero(img.rows());
                e(b) = 1;
                auto x = solve_linear<Rational>(img, e);
                if (!x || !is_nonnegative(RatVector(it->second.basis * *x))) {
                    inverse_signed = false;
                    c.note = "preimage of binding " + m.target().binding_label(m.target().offset(a) + b)
                        + " is not a non-negative flow";
                }
            }
        }
        for (Index u : image_p) {
            if (!inverse_signed)
                break;
            auto it = m.mark_maps().find(u);
            if (it == m.mark_maps().end())
                continue;
            const RatMatrix& mu = it->second.matrix;
            const auto classes = marking_classes(m.source(), m.fibre(u));
            for (Index k = 0; k < mu.rows() && inverse_signed; ++k) {
                RatVector e = RatVector::Zero(mu.rows());
                e(k) = 1;
                std::optional<bool> ok;
                if (integral && is_integral(mu)) {
                    auto x = solve_integer(integral_part(mu), integral_part(e));
                    ok = x ? has_nonnegative_representative(classes.quotient, *x) : std::optional<bool>(false);
                } else {
                    auto x = solve_linear<Rational>(mu, e);
                    ok = x ? has_nonnegative_rational_rep(rationalize(classes.quotient.relations().basis()), *x)
                           : std::optional<bool>(false);
                }
                if (!ok) {
                    c.inconclusive = true;
                    c.note = "sign of the preimage of " + m.target().token_label(m.target().offset(u) + k)
                        + " undecided";
                } else if (!*ok) {
                    inverse_signed = false;
                    c.note = "preimage of " + m.target().token_label(m.target().offset(u) + k)
                        + " has no non-negative representative";
                }
            }
        }
    }
    c.modification = bijective && inverse_signed && !c.inconclusive;
    if (c.modification) {
        bool t_single = true, p_single = true;
        for (Index a : image_t)
            t_single = t_single && m.fibre(a).count() == 1;
        for (Index u : image_p)
            p_single = p_single && m.fibre(u).count() == 1;
        c.place_modification = t_single;
        c.transition_modification = p_single;
        c.isomorphism = t_single && p_single;
    }
    return c;
}

std::string format_classification(const Classification& c)
{
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    std::ostringstream os;
    os << "abstraction=" << yn(c.abstraction) << " embedding=" << yn(c.embedding) << " discrete=" << yn(c.discrete)
       << " modification=" << yn(c.modification) << " place_modification=" << yn(c.place_modification)
       << " transition_modification=" << yn(c.transition_modification) << " isomorphism=" << yn(c.isomorphism);
    if (c.inconclusive)
        os << " (inconclusive: " << c.note << ")";
    return os.str();
}

// --- composition ------------------------------------------------------------------------

NetMorphism compose(const NetMorphism& g, const NetMorphism& f)
{
    if (f.target().space().id() != g.source().space().id() || f.target().token_count() != g.source().token_count()
        || f.target().binding_count() != g.source().binding_count())
        throw CategoryError("cannot compose '" + g.name() + "' after '" + f.name() + "': nets differ");
    const SpaceMap gf = compose(g.map(), f.map());
    const Ring ring = f.ring() == Ring::Q || g.ring() == Ring::Q ? Ring::Q : Ring::Z;
    NetMorphism out(g.name() + " o " + f.name(), f.source(), g.target(), gf.assignment(), ring);
    const PetriSpace& Z = g.target().space();
    const ColouredNet& X = f.source();

    for (Index a : out.image_transitions()) {
        const NodeSet mid = g.fibre(a);
        const NodeSet fib = out.fibre(a);
        const FlowModule fm = flows(X, fib);
        const RatMatrix basis = rationalize(fm.basis());
        RatMatrix images(g.target().colour_count(a), basis.cols());
        for (Index j = 0; j < basis.cols(); ++j) {
            auto psi = f.flow_image_over(mid, RatVector(basis.col(j)));
            if (!psi)
                throw CategoryError("composite: a flow over " + format_nodes(X.space(), fib)
                                    + " has no image under '" + f.name() + "'");
            auto img = g.flow_image(a, *psi);
            if (!img)
                throw CategoryError("composite: image flow leaves the flow basis of '" + g.name() + "' over '"
                                    + Z.name(a) + "'");
            images.col(j) = *img;
        }
        out.set_flow_map(a, basis, images);
    }
    for (Index u : out.image_places()) {
        const NodeSet mid = g.fibre(u);
        const RatMatrix inner = f.mark_matrix_over(mid);
        out.set_mark_map(u, g.mark_map(u).matrix * inner);
    }
    return out;
}

namespace {

bool same_frame(const NetMorphism& a, const NetMorphism& b)
{
    return a.source().space().id() == b.source().space().id() && a.target().space().id() == b.target().space().id()
        && a.map().assignment() == b.map().assignment();
}

} // namespace

bool same_flow_maps(const NetMorphism& a, const NetMorphism& b)
{
    if (!same_frame(a, b))
        return false;
    for (Index t : a.image_transitions()) {
        const FlowModule fm = flows(a.source(), a.fibre(t));
        for (Index j = 0; j < fm.rank(); ++j) {
            const RatVector phi = rationalize(IntVector(fm.basis().col(j)));
            auto x = a.flow_image(t, phi);
            auto y = b.flow_image(t, phi);
            if (!x || !y || *x != *y)
                return false;
        }
    }
    return true;
}

bool same_class_maps(const NetMorphism& a, const NetMorphism& b)
{
    if (!same_frame(a, b))
        return false;
    for (Index u : a.image_places()) {
        auto ia = a.mark_maps().find(u);
        auto ib = b.mark_maps().find(u);
        const bool ha = ia != a.mark_maps().end(), hb = ib != b.mark_maps().end();
        if (ha != hb)
            return false;
        if (ha && ia->second.matrix != ib->second.matrix)
            return false;
    }
    return true;
}

bool same_morphism(const NetMorphism& a, const NetMorphism& b)
{
    return same_flow_maps(a, b) && same_class_maps(a, b);
}

// --- Winskel ------------------------------------------------------------------------------

namespace {

void require_pt(const ColouredNet& n)
{
    for (Index x = 0; x < n.space().size(); ++x)
        if (n.colour_count(x) != 1)
            throw StructuralError("net '" + n.name() + "' is not a p/t net: node '" + n.space().name(x) + "' has "
                                  + std::to_string(n.colour_count(x)) + " colours");
}

IntVector beta_image(const WinskelMorphism& w, const IntVector& over_source_places)
{
    IntVector out = IntVector::Zero(w.target.token_count());
    for (Index row = 0; row < over_source_places.size(); ++row) {
        if (over_source_places(row) == 0)
            continue;
        const Index p = w.source.token_at(row).first;
        auto it = w.beta.find(p);
        if (it == w.beta.end())
            continue;
        for (const auto& [y, k] : it->second)
            out(w.target.offset(y)) += over_source_places(row) * k;
    }
    return out;
}

} // namespace

Report check_winskel(const WinskelMorphism& w)
{
    require_pt(w.source);
    require_pt(w.target);
    Report r("winskel " + w.name);
    std::string problem;
    for (const auto& [x, ys] : w.beta) {
        if (!w.source.space().is_place(x))
            throw SortError("multirelation given on transition '" + w.source.space().name(x) + "'");
        for (const auto& [y, k] : ys) {
            if (!w.target.space().is_place(y))
                throw SortError("multirelation relates '" + w.source.space().name(x) + "' to transition '"
                                + w.target.space().name(y) + "'");
            if (k <= 0)
                throw StructuralError("multirelation multiplicities must be positive");
        }
    }
    for (const auto& [t, s] : w.eta) {
        if (!w.source.space().is_transition(t) || !w.target.space().is_transition(s))
            throw SortError("partial function on transitions relates a place");
        for (Arc which : {Arc::Minus, Arc::Plus}) {
            const IntVector mapped = beta_image(w, IntVector(w.source.matrix(which).col(w.source.offset(t))));
            const IntVector expected = w.target.matrix(which).col(w.target.offset(s));
            if (mapped != expected && problem.empty())
                problem = std::string(which == Arc::Minus ? "pre" : "post") + "-set of '" + w.source.space().name(t)
                    + "' maps to " + format_vector(mapped) + ", '" + w.target.space().name(s) + "' has "
                    + format_vector(expected);
        }
    }
    if (problem.empty())
        r.pass("winskel.multisets", "pre- and post-sets are preserved");
    else
        r.fail("winskel.multisets", "pre- and post-sets are preserved", problem);
    return r;
}

WinskelConversion from_winskel(const WinskelMorphism& w, const VerifyOptions& opts)
{
    WinskelConversion out;
    out.report = check_winskel(w);
    if (!out.report.passed())
        throw StructuralError("not a Winskel-morphism: " + out.report.first_problem()->detail);
    const PetriSpace& XS = w.source.space();
    const PetriSpace& YS = w.target.space();

    out.domain = NodeSet(XS);
    for (const auto& [x, ys] : w.beta) {
        if (ys.empty())
            throw StructuralError("place '" + XS.name(x) + "' is related to nothing");
        out.domain.insert(x);
    }
    for (const auto& [t, s] : w.eta)
        out.domain.insert(t);
    if (out.domain.empty())
        throw StructuralError("Winskel-morphism '" + w.name + "' has an empty domain");
    out.codomain = NodeSet(YS);
    for (const auto& [x, ys] : w.beta)
        for (const auto& [y, k] : ys)
            out.codomain.insert(y);
    for (const auto& [t, s] : w.eta)
        out.codomain.insert(s);
    const bool closed = is_closed(XS, out.domain);
    const bool open = is_open(YS, out.codomain);
    out.report.add("winskel.domain-closed", "domain is closed", closed ? Status::Pass : Status::Fail,
                   closed ? "" : format_nodes(XS, out.domain) + " is not closed");
    out.report.add("winskel.codomain-open", "codomain is open", open ? Status::Pass : Status::Fail,
                   open ? "" : format_nodes(YS, out.codomain) + " is not open");
    if (!closed || !open)
        throw StructuralError("Winskel-morphism '" + w.name + "': " + out.report.first_problem()->detail);

    out.domain_net = subnet(w.source, out.domain, w.source.name() + "|dom").first;

    // contract places related to a common source place
    std::vector<std::pair<Index, Index>> pairs;
    for (const auto& [x, ys] : w.beta)
        for (std::size_t k = 1; k < ys.size(); ++k)
            pairs.emplace_back(ys[0].first, ys[k].first);
    auto [qspace, proj] = quotient(YS, pairs);
    const Index qn = qspace.size();
    std::vector<std::vector<Index>> members(static_cast<std::size_t>(qn));
    for (Index y = 0; y < YS.size(); ++y)
        members[static_cast<std::size_t>(proj(y))].push_back(y);
    std::vector<std::vector<std::string>> colours(static_cast<std::size_t>(qn));
    std::vector<Index> row_order; // quotient token row -> target token row
    for (Index q = 0; q < qn; ++q) {
        const auto& ms = members[static_cast<std::size_t>(q)];
        for (Index y : ms) {
            for (const auto& c : w.target.colours(y))
                colours[static_cast<std::size_t>(q)].push_back(ms.size() == 1 ? c : YS.name(y));
            if (YS.is_place(y))
                row_order.push_back(w.target.offset(y));
        }
    }
    std::vector<Index> col_order;
    for (Index q = 0; q < qn; ++q)
        for (Index y : members[static_cast<std::size_t>(q)])
            if (YS.is_transition(y))
                col_order.push_back(w.target.offset(y));
    out.quotient_net = ColouredNet(w.target.name() + "/~", qspace, colours, select(w.target.w_minus(), row_order, col_order),
                                   select(w.target.w_plus(), row_order, col_order), w.target.options());
    if (w.target.initial_marking())
        out.quotient_net.set_initial_marking(select(*w.target.initial_marking(), row_order));

    // pi: the contraction, identity on colours
    out.pi = NetMorphism("pi", w.target, out.quotient_net, proj.assignment(), Ring::Z);
    for (Index q = 0; q < qn; ++q) {
        const Index k = out.quotient_net.colour_count(q);
        if (qspace.is_transition(q))
            out.pi.set_flow_map(q, RatMatrix::Identity(k, k), RatMatrix::Identity(k, k));
        else
            out.pi.set_mark_map(q, RatMatrix::Identity(k, k));
    }

    // g: domain -> quotient
    const PetriSpace& DS = out.domain_net.space();
    std::vector<Index> assign(static_cast<std::size_t>(DS.size()));
    for (Index d = 0; d < DS.size(); ++d) {
        const Index x = XS.index_of(DS.name(d));
        assign[static_cast<std::size_t>(d)] = DS.is_place(d) ? proj(w.beta.at(x).front().first) : proj(w.eta.at(x));
    }
    out.g = NetMorphism("g", out.domain_net, out.quotient_net, assign, Ring::Z);
    for (Index a : out.g.image_transitions()) {
        const auto ts = out.g.fibre(a).transitions(DS);
        const Index k = static_cast<Index>(ts.size());
        out.g.set_flow_map(a, RatMatrix::Identity(k, k), RatMatrix::Constant(1, k, Rational(1)));
    }
    for (Index u : out.g.image_places()) {
        const auto ps = out.g.fibre(u).places(DS);
        const auto qrows = out.quotient_net.token_indices(NodeSet(qspace, {u}));
        RatMatrix mm = RatMatrix::Zero(static_cast<Index>(qrows.size()), static_cast<Index>(ps.size()));
        for (std::size_t j = 0; j < ps.size(); ++j) {
            const Index x = XS.index_of(DS.name(ps[j]));
            for (const auto& [y, k] : w.beta.at(x)) {
                const Index qrow = position(row_order, w.target.offset(y));
                mm(position(qrows, qrow), static_cast<Index>(j)) += Rational(k);
            }
        }
        out.g.set_mark_map(u, mm);
    }

    const auto rp = verify_morphism(out.pi, opts);
    const auto rg = verify_morphism(out.g, opts);
    for (const auto& c : rp.report.clauses())
        out.report.add("winskel.pi." + c.id, c.description, c.status, c.detail);
    for (const auto& c : rg.report.clauses())
        out.report.add("winskel.g." + c.id, c.description, c.status, c.detail);
    const auto cp = classify(out.pi, opts);
    out.report.add("winskel.pi.place-modification", "contraction is a place-modification",
                   cp.place_modification ? Status::Pass : Status::Fail, format_classification(cp));
    const bool disc = is_discrete(out.g.map()) && check_continuous(out.g.map());
    out.report.add("winskel.g.discrete", "representing map is continuous and discrete",
                   disc ? Status::Pass : Status::Fail);
    return out;
}

} // namespace cpn
