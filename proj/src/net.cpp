#include "cpn/net.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cpn {

ColouredNet::ColouredNet(std::string name, PetriSpace space, std::vector<std::vector<std::string>> colours,
                         IntMatrix w_minus, IntMatrix w_plus, NetOptions options)
    : name_(std::move(name)), space_(std::move(space)), colours_(std::move(colours)),
      w_minus_(std::move(w_minus)), w_plus_(std::move(w_plus)), options_(options)
{
    if (static_cast<Index>(colours_.size()) != space_.size())
        throw StructuralError("net '" + name_ + "': colour lists do not match the node count");
    if (!options_.allow_empty) {
        if (space_.places().empty())
            throw StructuralError("net '" + name_ + "' has no places");
        if (space_.transitions().empty())
            throw StructuralError("net '" + name_ + "' has no transitions");
    }
    Index tokens = 0, bindings = 0;
    offsets_.resize(colours_.size());
    for (Index x = 0; x < space_.size(); ++x) {
        const auto& cs = colours_[static_cast<std::size_t>(x)];
        if (cs.empty() && !options_.allow_empty)
            throw StructuralError("node '" + space_.name(x) + "' has no "
                                  + (space_.is_place(x) ? "token-elements" : "binding-elements"));
        std::set<std::string> seen;
        for (const auto& c : cs)
            if (!seen.insert(c).second)
                throw StructuralError("node '" + space_.name(x) + "' declares colour '" + c + "' twice");
        Index& counter = space_.is_place(x) ? tokens : bindings;
        offsets_[static_cast<std::size_t>(x)] = counter;
        for (std::size_t k = 0; k < cs.size(); ++k)
            (space_.is_place(x) ? token_owner_ : binding_owner_).push_back(x);
        counter += static_cast<Index>(cs.size());
    }
    for (const IntMatrix* w : {&w_minus_, &w_plus_}) {
        if (w->rows() != tokens || w->cols() != bindings)
            throw StructuralError("net '" + name_ + "': incidence matrix is " + std::to_string(w->rows()) + "x"
                                  + std::to_string(w->cols()) + ", expected " + std::to_string(tokens) + "x"
                                  + std::to_string(bindings));
        if (!is_nonnegative(*w))
            throw StructuralError("net '" + name_ + "': negative incidence weight");
    }
    if (options_.strict) {
        for (Index t : space_.transitions())
            for (Index p : space_.places()) {
                const bool arc = has_arc(t, p);
                if (arc && !space_.adjacent(p, t))
                    throw StructuralError("net '" + name_ + "': weight between '" + space_.name(t) + "' and '"
                                          + space_.name(p) + "' outside the adjacency");
                if (!arc && space_.adjacent(p, t))
                    throw StructuralError("net '" + name_ + "': adjacent pair '" + space_.name(p) + "', '"
                                          + space_.name(t) + "' carries no weight");
            }
    }
}

const std::vector<std::string>& ColouredNet::colours(Index x) const
{
    if (x < 0 || x >= space_.size())
        throw StructuralError("node index out of range");
    return colours_[static_cast<std::size_t>(x)];
}

Index ColouredNet::colour_index(Index x, const std::string& colour) const
{
    const auto& cs = colours(x);
    auto it = std::find(cs.begin(), cs.end(), colour);
    if (it == cs.end())
        throw StructuralError("node '" + space_.name(x) + "' has no colour '" + colour + "'");
    return static_cast<Index>(it - cs.begin());
}

Index ColouredNet::offset(Index x) const
{
    colours(x);
    return offsets_[static_cast<std::size_t>(x)];
}

const IntMatrix& ColouredNet::matrix(Arc which) const
{
    if (which == Arc::Difference)
        throw StructuralError("difference incidence has no stored matrix; use incidence()");
    return which == Arc::Minus ? w_minus_ : w_plus_;
}

std::vector<Index> ColouredNet::token_indices(const NodeSet& s) const
{
    std::vector<Index> out;
    for (Index p : s.places(space_))
        for (Index k = 0; k < colour_count(p); ++k)
            out.push_back(offset(p) + k);
    return out;
}

std::vector<Index> ColouredNet::binding_indices(const NodeSet& s) const
{
    std::vector<Index> out;
    for (Index t : s.transitions(space_))
        for (Index k = 0; k < colour_count(t); ++k)
            out.push_back(offset(t) + k);
    return out;
}

std::pair<Index, Index> ColouredNet::token_at(Index row) const
{
    Index p = token_owner_.at(static_cast<std::size_t>(row));
    return {p, row - offset(p)};
}

std::pair<Index, Index> ColouredNet::binding_at(Index col) const
{
    Index t = binding_owner_.at(static_cast<std::size_t>(col));
    return {t, col - offset(t)};
}

std::string ColouredNet::token_label(Index row) const
{
    auto [p, c] = token_at(row);
    return space_.name(p) + "." + colours(p)[static_cast<std::size_t>(c)];
}

std::string ColouredNet::binding_label(Index col) const
{
    auto [t, b] = binding_at(col);
    return space_.name(t) + "." + colours(t)[static_cast<std::size_t>(b)];
}

bool ColouredNet::has_arc(Index t, Index p) const
{
    for (Index c = 0; c < colour_count(p); ++c)
        for (Index b = 0; b < colour_count(t); ++b)
            if (w_minus_(offset(p) + c, offset(t) + b) != 0 || w_plus_(offset(p) + c, offset(t) + b) != 0)
                return true;
    return false;
}

void ColouredNet::set_initial_marking(IntVector m)
{
    if (m.size() != token_count())
        throw StructuralError("marking has " + std::to_string(m.size()) + " entries, net has "
                              + std::to_string(token_count()) + " token-elements");
    if (!is_nonnegative(m))
        throw StructuralError("marking with a negative entry");
    initial_ = std::move(m);
}

// --- NetBuilder -----------------------------------------------------------------------

void NetBuilder::add_transition(const std::string& name, std::vector<std::string> bindings)
{
    if (nodes_.count(name))
        throw StructuralError("duplicate node '" + name + "'");
    nodes_.emplace(name, Node{static_cast<Index>(order_.size()), Sort::Transition, std::move(bindings)});
    order_.push_back(name);
}

void NetBuilder::add_place(const std::string& name, std::vector<std::string> tokens)
{
    if (nodes_.count(name))
        throw StructuralError("duplicate node '" + name + "'");
    nodes_.emplace(name, Node{static_cast<Index>(order_.size()), Sort::Place, std::move(tokens)});
    order_.push_back(name);
}

bool NetBuilder::is_transition(const std::string& name) const
{
    auto it = nodes_.find(name);
    return it != nodes_.end() && it->second.sort == Sort::Transition;
}

bool NetBuilder::has_colour(const std::string& node, const std::string& colour) const
{
    auto it = nodes_.find(node);
    if (it == nodes_.end())
        return false;
    const auto& cs = it->second.colours;
    return std::find(cs.begin(), cs.end(), colour) != cs.end();
}

void NetBuilder::set_weight(Arc which, const std::string& t, const std::string& b, const std::string& p,
                            const std::string& c, const Integer& w)
{
    if (which == Arc::Difference)
        throw StructuralError("arc weights are given for w- or w+ only");
    if (!is_transition(t))
        throw StructuralError("'" + t + "' is not a declared transition");
    if (!has_node(p) || is_transition(p))
        throw StructuralError("'" + p + "' is not a declared place");
    if (!has_colour(t, b))
        throw StructuralError("transition '" + t + "' has no binding-element '" + b + "'");
    if (!has_colour(p, c))
        throw StructuralError("place '" + p + "' has no token-element '" + c + "'");
    if (w < 0)
        throw StructuralError("negative weight on arc " + t + "." + b + " " + p + "." + c);
    (which == Arc::Minus ? minus_ : plus_)[{t, b, p, c}] = w;
}

void NetBuilder::add_adjacency(const std::string& p, const std::string& t)
{
    if (!has_node(p) || is_transition(p) || !is_transition(t))
        throw SortError("adjacency must join a declared place and a declared transition");
    adjacency_.emplace_back(p, t);
}

void NetBuilder::set_marking(const std::string& p, const std::string& c, const Integer& n)
{
    if (!has_node(p) || is_transition(p))
        throw StructuralError("'" + p + "' is not a declared place");
    if (!has_colour(p, c))
        throw StructuralError("place '" + p + "' has no token-element '" + c + "'");
    if (n < 0)
        throw StructuralError("negative marking at " + p + "." + c);
    marking_[{p, c}] = n;
}

ColouredNet NetBuilder::build(NetOptions options) const
{
    std::vector<std::string> names = order_;
    std::vector<Sort> sorts;
    std::vector<std::vector<std::string>> colours;
    std::map<std::string, Index> offset;
    Index tokens = 0, bindings = 0;
    for (const auto& n : order_) {
        const Node& node = nodes_.at(n);
        sorts.push_back(node.sort);
        colours.push_back(node.colours);
        Index& counter = node.sort == Sort::Place ? tokens : bindings;
        offset[n] = counter;
        counter += static_cast<Index>(node.colours.size());
    }
    auto colour_pos = [&](const std::string& node, const std::string& c) {
        const auto& cs = nodes_.at(node).colours;
        return offset.at(node) + static_cast<Index>(std::find(cs.begin(), cs.end(), c) - cs.begin());
    };
    IntMatrix wm = IntMatrix::Zero(tokens, bindings);
    IntMatrix wp = IntMatrix::Zero(tokens, bindings);
    std::set<std::pair<Index, Index>> support;
    for (const auto* table : {&minus_, &plus_})
        for (const auto& [key, w] : *table) {
            const auto& [t, b, p, c] = key;
            (table == &minus_ ? wm : wp)(colour_pos(p, c), colour_pos(t, b)) = w;
            if (w != 0)
                support.emplace(nodes_.at(p).order, nodes_.at(t).order);
        }
    std::vector<std::pair<Index, Index>> adj;
    if (!options.strict && !adjacency_.empty()) {
        for (const auto& [p, t] : adjacency_)
            adj.emplace_back(nodes_.at(p).order, nodes_.at(t).order);
    } else {
        adj.assign(support.begin(), support.end());
        for (const auto& [p, t] : adjacency_)
            adj.emplace_back(nodes_.at(p).order, nodes_.at(t).order);
    }
    PetriSpace space(std::move(names), std::move(sorts), adj);
    ColouredNet net(name_, std::move(space), std::move(colours), std::move(wm), std::move(wp), options);
    if (!marking_.empty()) {
        IntVector m = IntVector::Zero(tokens);
        for (const auto& [key, n] : marking_)
            m(colour_pos(key.first, key.second)) = n;
        net.set_initial_marking(std::move(m));
    }
    return net;
}

std::pair<ColouredNet, SpaceMap> subnet(const ColouredNet& net, const NodeSet& s, const std::string& name)
{
    auto [space, inclusion] = subspace(net.space(), s);
    std::vector<std::vector<std::string>> colours;
    for (Index x : s.members())
        colours.push_back(net.colours(x));
    const auto rows = net.token_indices(s);
    const auto cols = net.binding_indices(s);
    NetOptions opts = net.options();
    opts.allow_empty = true;
    ColouredNet sub(name, std::move(space), std::move(colours), select(net.w_minus(), rows, cols),
                    select(net.w_plus(), rows, cols), opts);
    if (net.initial_marking())
        sub.set_initial_marking(select(*net.initial_marking(), rows));
    return {std::move(sub), std::move(inclusion)};
}

// --- sections -------------------------------------------------------------------------

namespace {

SectionSpace make_sections(const ColouredNet& net, const NodeSet& region, ColourKind kind, Ring ring)
{
    SectionSpace s;
    s.region = region;
    s.kind = kind;
    s.ring = ring;
    s.indices = kind == ColourKind::Token ? net.token_indices(region) : net.binding_indices(region);
    for (Index i : s.indices) {
        s.basis.push_back(kind == ColourKind::Token ? net.token_at(i) : net.binding_at(i));
        s.labels.push_back(kind == ColourKind::Token ? net.token_label(i) : net.binding_label(i));
    }
    return s;
}

void require_closed(const ColouredNet& net, const NodeSet& s, const char* what)
{
    require_member(net.space(), s);
    if (!is_closed(net.space(), s))
        throw StructuralError(std::string(what) + ": region " + format_nodes(net.space(), s) + " is not closed");
}

void require_open(const ColouredNet& net, const NodeSet& s, const char* what)
{
    require_member(net.space(), s);
    if (!is_open(net.space(), s))
        throw StructuralError(std::string(what) + ": region " + format_nodes(net.space(), s) + " is not open");
}

} // namespace

SectionSpace sections_bindings(const ColouredNet& net, const NodeSet& closed, Ring ring)
{
    require_closed(net, closed, "binding sections");
    return make_sections(net, closed, ColourKind::Binding, ring);
}

SectionSpace sections_tokens(const ColouredNet& net, const NodeSet& open, Ring ring)
{
    require_open(net, open, "token sections");
    return make_sections(net, open, ColourKind::Token, ring);
}

IntMatrix incidence_matrix(const ColouredNet& net, const NodeSet& rows, const NodeSet& cols, Arc which)
{
    require_member(net.space(), rows);
    require_member(net.space(), cols);
    const auto r = net.token_indices(rows);
    const auto c = net.binding_indices(cols);
    if (which == Arc::Difference)
        return IntMatrix(select(net.w_plus(), r, c) - select(net.w_minus(), r, c));
    return select(net.matrix(which), r, c);
}

FlowModule flows(const ColouredNet& net, const NodeSet& closed)
{
    require_closed(net, closed, "flows");
    FlowModule f;
    f.region = closed;
    f.columns = net.binding_indices(closed);
    f.lattice = kernel(incidence_matrix(net, closed, closed));
    return f;
}

MarkingClassModule marking_classes(const ColouredNet& net, const NodeSet& open)
{
    require_open(net, open, "marking classes");
    MarkingClassModule m;
    m.region = open;
    m.rows = net.token_indices(open);
    m.quotient = QuotientModule(incidence_matrix(net, open, open));
    return m;
}

IntVector transport(const std::vector<Index>& from, const IntVector& v, const std::vector<Index>& to)
{
    if (static_cast<Index>(from.size()) != v.size())
        throw StructuralError("section has " + std::to_string(v.size()) + " coordinates, region has "
                              + std::to_string(from.size()));
    IntVector out = IntVector::Zero(static_cast<Index>(to.size()));
    for (std::size_t i = 0; i < from.size(); ++i) {
        auto it = std::find(to.begin(), to.end(), from[i]);
        if (it == to.end()) {
            if (v(static_cast<Index>(i)) != 0)
                throw StructuralError("section has support outside the target region");
            continue;
        }
        out(static_cast<Index>(it - to.begin())) = v(static_cast<Index>(i));
    }
    return out;
}

IntVector restrict_flow(const ColouredNet& net, const NodeSet& big, const NodeSet& small, const IntVector& flow)
{
    require_closed(net, big, "flow restriction");
    require_closed(net, small, "flow restriction");
    if (!small.subset_of(big))
        throw StructuralError("flow restriction: " + format_nodes(net.space(), small) + " is not inside "
                              + format_nodes(net.space(), big));
    const auto from = net.binding_indices(big);
    const auto to = net.binding_indices(small);
    if (static_cast<Index>(from.size()) != flow.size())
        throw StructuralError("flow restriction: wrong section length");
    IntVector out(static_cast<Index>(to.size()));
    for (std::size_t i = 0; i < to.size(); ++i)
        out(static_cast<Index>(i)) = flow(static_cast<Index>(std::find(from.begin(), from.end(), to[i]) - from.begin()));
    return out;
}

IntVector extend_class(const ColouredNet& net, const NodeSet& small, const NodeSet& big, const IntVector& rep)
{
    require_open(net, small, "class extension");
    require_open(net, big, "class extension");
    if (!small.subset_of(big))
        throw StructuralError("class extension: " + format_nodes(net.space(), small) + " is not inside "
                              + format_nodes(net.space(), big));
    auto target = marking_classes(net, big);
    return target.quotient.canonical_rep(transport(net.token_indices(small), rep, target.rows));
}

IntVector flow_to_class(const ColouredNet& net, const NodeSet& closed, const NodeSet& open, Arc which,
                        const IntVector& flow)
{
    require_closed(net, closed, "flow to class");
    auto classes = marking_classes(net, open);
    IntMatrix w = incidence_matrix(net, open, closed, which);
    if (w.cols() != flow.size())
        throw StructuralError("flow to class: wrong section length");
    return classes.quotient.canonical_rep(IntVector(w * flow));
}

// --- sheaf axioms ------------------------------------------------------------------------

Report check_exactness(const SheafSequence& seq, const std::string& prefix)
{
    Report r(prefix);
    if (!seq.cosheaf) {
        const IntMatrix image = seq.map * seq.total;
        const Lattice pieces(seq.pieces);
        bool lands = true;
        for (Index j = 0; j < image.cols(); ++j)
            lands = lands && pieces.contains(IntVector(image.col(j)));
        r.add(prefix + ".restriction", "restriction sends sections into sections of the pieces",
              lands ? Status::Pass : Status::Fail, lands ? "" : "a restricted section is not a section");
        const Index img_rank = hnf(image).rank;
        const bool inj = img_rank == Lattice(seq.total).rank();
        r.add(prefix + ".injective", "sections are determined by their restrictions",
              inj ? Status::Pass : Status::Fail,
              inj ? "" : "restriction has a kernel of rank " + std::to_string(Lattice(seq.total).rank() - img_rank));
        const bool complex = is_zero(IntMatrix(seq.overlaps * image));
        r.add(prefix + ".complex", "restricted sections agree on overlaps", complex ? Status::Pass : Status::Fail,
              complex ? "" : "restrictions differ on an overlap");
        const bool exact = intersect(pieces, kernel(seq.overlaps)) == Lattice(image);
        r.add(prefix + ".exact", "compatible families glue to a unique section", exact ? Status::Pass : Status::Fail,
              exact ? "" : "a compatible family does not glue");
    } else {
        const IntMatrix image = seq.map * seq.pieces;
        const Lattice rel(seq.total);
        const Index n = seq.map.rows();
        bool lands = true;
        for (Index j = 0; j < image.cols(); ++j)
            lands = lands && rel.contains(IntVector(image.col(j)));
        r.add(prefix + ".extension", "extension is well defined on classes", lands ? Status::Pass : Status::Fail,
              lands ? "" : "a relation of a piece does not extend to a relation");
        const bool surj = Lattice(hstack(seq.map, seq.total)) == Lattice::full(n);
        r.add(prefix + ".surjective", "extensions of the pieces generate", surj ? Status::Pass : Status::Fail,
              surj ? "" : "some class is not a sum of extended classes");
        const IntMatrix comp = seq.map * seq.overlaps;
        bool complex = true;
        for (Index j = 0; j < comp.cols(); ++j)
            complex = complex && rel.contains(IntVector(comp.col(j)));
        r.add(prefix + ".complex", "overlap differences extend to zero", complex ? Status::Pass : Status::Fail,
              complex ? "" : "an overlap difference survives extension");
        const bool exact = preimage(seq.map, rel) == Lattice(hstack(seq.overlaps, seq.pieces));
        r.add(prefix + ".exact", "families extending to zero come from overlaps", exact ? Status::Pass : Status::Fail,
              exact ? "" : "kernel of the extension exceeds the overlap image");
    }
    return r;
}

const char* to_string(SheafKind k)
{
    switch (k) {
    case SheafKind::Tokens: return "tokens";
    case SheafKind::Bindings: return "bindings";
    case SheafKind::Flows: return "flows";
    case SheafKind::MarkingClasses: return "marking-classes";
    }
    return "?";
}

namespace {

IntMatrix block_diag(const std::vector<IntMatrix>& blocks)
{
    Index r = 0, c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    IntMatrix out = IntMatrix::Zero(r, c);
    r = c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

Index position(const std::vector<Index>& v, Index x)
{
    return static_cast<Index>(std::find(v.begin(), v.end(), x) - v.begin());
}

} // namespace

SheafSequence sheaf_sequence(const ColouredNet& net, SheafKind kind, const NodeSet& region,
                             const std::vector<NodeSet>& covering)
{
    const PetriSpace& X = net.space();
    require_member(X, region);
    const bool on_opens = kind == SheafKind::Tokens || kind == SheafKind::MarkingClasses;
    auto check_region = [&](const NodeSet& s) {
        require_member(X, s);
        if (on_opens ? !is_open(X, s) : !is_closed(X, s))
            throw StructuralError(std::string("covering member ") + format_nodes(X, s) + " is not "
                                  + (on_opens ? "open" : "closed"));
    };
    check_region(region);
    NodeSet uni(X);
    for (const auto& s : covering) {
        check_region(s);
        if (!s.subset_of(region))
            throw StructuralError("covering member " + format_nodes(X, s) + " leaves the region");
        uni = uni | s;
    }
    if (uni != region)
        throw StructuralError("covering does not exhaust " + format_nodes(X, region));

    auto indices = [&](const NodeSet& s) {
        return on_opens ? net.token_indices(s) : net.binding_indices(s);
    };
    const auto total_idx = indices(region);
    const Index n = static_cast<Index>(total_idx.size());
    std::vector<std::vector<Index>> piece_idx;
    std::vector<Index> piece_off;
    Index m = 0;
    for (const auto& s : covering) {
        piece_idx.push_back(indices(s));
        piece_off.push_back(m);
        m += static_cast<Index>(piece_idx.back().size());
    }
    // inclusion of pieces into the region
    IntMatrix incl = IntMatrix::Zero(n, m);
    for (std::size_t i = 0; i < covering.size(); ++i)
        for (std::size_t k = 0; k < piece_idx[i].size(); ++k)
            incl(position(total_idx, piece_idx[i][k]), piece_off[i] + static_cast<Index>(k)) = 1;
    // differences over pairwise overlaps: columns e_j - e_k
    std::vector<IntVector> diffs;
    std::vector<IntMatrix> overlap_relations;
    for (std::size_t j = 0; j < covering.size(); ++j)
        for (std::size_t k = j + 1; k < covering.size(); ++k) {
            const NodeSet ov = covering[j] & covering[k];
            const auto ov_idx = indices(ov);
            for (Index g : ov_idx) {
                IntVector d = IntVector::Zero(m);
                d(piece_off[j] + position(piece_idx[j], g)) = 1;
                d(piece_off[k] + position(piece_idx[k], g)) = -1;
                diffs.push_back(d);
            }
        }
    IntMatrix diff = columns_of(diffs, m);

    SheafSequence seq;
    seq.cosheaf = kind == SheafKind::Bindings || kind == SheafKind::MarkingClasses;
    if (seq.cosheaf) {
        seq.map = incl;
        seq.overlaps = diff;
    } else {
        seq.map = incl.transpose();
        seq.overlaps = diff.transpose();
    }
    switch (kind) {
    case SheafKind::Tokens:
        seq.total = IntMatrix::Identity(n, n);
        seq.pieces = IntMatrix::Identity(m, m);
        break;
    case SheafKind::Bindings:
        seq.total = IntMatrix(n, 0);
        seq.pieces = IntMatrix(m, 0);
        break;
    case SheafKind::Flows: {
        seq.total = flows(net, region).basis();
        std::vector<IntMatrix> blocks;
        for (const auto& s : covering)
            blocks.push_back(flows(net, s).basis());
        seq.pieces = block_diag(blocks);
        break;
    }
    case SheafKind::MarkingClasses: {
        seq.total = marking_classes(net, region).quotient.relations().basis();
        std::vector<IntMatrix> blocks;
        for (const auto& s : covering)
            blocks.push_back(marking_classes(net, s).quotient.relations().basis());
        seq.pieces = block_diag(blocks);
        break;
    }
    }
    return seq;
}

Report verify_sheaf_axioms(const ColouredNet& net, const NodeSet& region, const std::vector<NodeSet>& covering)
{
    const PetriSpace& X = net.space();
    require_member(X, region);
    bool all_open = is_open(X, region), all_closed = is_closed(X, region);
    for (const auto& s : covering) {
        require_member(X, s);
        all_open = all_open && is_open(X, s);
        all_closed = all_closed && is_closed(X, s);
    }
    if (!all_open && !all_closed)
        throw StructuralError("covering of " + format_nodes(X, region) + " is neither by open nor by closed sets");
    Report r("sheaf axioms over " + format_nodes(X, region));
    if (all_open) {
        r.append(check_exactness(sheaf_sequence(net, SheafKind::Tokens, region, covering), "sheaf.tokens"));
        r.append(check_exactness(sheaf_sequence(net, SheafKind::MarkingClasses, region, covering),
                                 "cosheaf.marking-classes"));
    }
    if (all_closed) {
        r.append(check_exactness(sheaf_sequence(net, SheafKind::Bindings, region, covering), "cosheaf.bindings"));
        r.append(check_exactness(sheaf_sequence(net, SheafKind::Flows, region, covering), "sheaf.flows"));
    }
    return r;
}

Report verify_all_basic_coverings(const ColouredNet& net)
{
    const PetriSpace& X = net.space();
    Report total("sheaf axioms of " + net.name());
    std::size_t coverings = 0;
    for (Topology topo : {Topology::P, Topology::T}) {
        const auto basis = canonical_basis(X, topo);
        for (const auto& b : basis) {
            std::vector<NodeSet> inside;
            for (const auto& c : basis)
                if (c.subset_of(b))
                    inside.push_back(c);
            if (inside.size() > 20)
                throw ResourceError("too many basis members inside one basic set", inside.size());
            for (std::uint64_t mask = 1; mask < (1ULL << inside.size()); ++mask) {
                std::vector<NodeSet> fam;
                NodeSet uni(X);
                for (std::size_t i = 0; i < inside.size(); ++i)
                    if (mask >> i & 1U) {
                        fam.push_back(inside[i]);
                        uni = uni | inside[i];
                    }
                if (uni != b)
                    continue;
                ++coverings;
                Report r = verify_sheaf_axioms(net, b, fam);
                if (!r.passed()) {
                    for (const auto& c : r.clauses())
                        if (c.status != Status::Pass) {
                            Clause cc = c;
                            cc.detail += " (covering of " + format_nodes(X, b) + ")";
                            total.add(cc.id, cc.description, cc.status, cc.detail);
                        }
                }
            }
        }
        ++coverings;
        Report whole = verify_sheaf_axioms(net, NodeSet::all(X), basis);
        for (const auto& c : whole.clauses())
            if (c.status != Status::Pass)
                total.add(c.id, c.description, c.status, c.detail + " (canonical covering of the space)");
    }
    if (total.clauses().empty())
        total.pass("sheaf.coverings", "exactness over all basic coverings",
                   std::to_string(coverings) + " coverings checked");
    return total;
}

namespace {

template <typename V>
std::string format_terms(const ColouredNet& net, const std::vector<Index>& indices, ColourKind kind, const V& v)
{
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto& c = v(static_cast<Index>(i));
        if (c == 0)
            continue;
        const std::string label =
            kind == ColourKind::Token ? net.token_label(indices[i]) : net.binding_label(indices[i]);
        auto mag = c < 0 ? decltype(c)(-c) : c;
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        first = false;
        if (mag != 1)
            os << mag.str() << '*';
        os << label;
    }
    return first ? "0" : os.str();
}

} // namespace

std::string format_section(const ColouredNet& net, const std::vector<Index>& indices, ColourKind kind,
                           const IntVector& v)
{
    return format_terms(net, indices, kind, v);
}

std::string format_section(const ColouredNet& net, const std::vector<Index>& indices, ColourKind kind,
                           const RatVector& v)
{
    return format_terms(net, indices, kind, v);
}

} // namespace cpn
