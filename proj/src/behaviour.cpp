#include "cpn/behaviour.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace cpn {

namespace {

std::vector<Index> iota_indices(Index n)
{
    std::vector<Index> v(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = i;
    return v;
}

void require_marking(const ColouredNet& net, const Marking& m)
{
    if (m.size() != net.token_count())
        throw StructuralError("marking has " + std::to_string(m.size()) + " entries, net '" + net.name() + "' has "
                              + std::to_string(net.token_count()) + " token-elements");
}

void require_binding(const ColouredNet& net, Index t, Index b)
{
    if (t < 0 || t >= net.space().size() || !net.space().is_transition(t))
        throw SortError("event does not name a transition");
    if (b < 0 || b >= net.colour_count(t))
        throw StructuralError("transition '" + net.space().name(t) + "' has no binding number " + std::to_string(b));
}

IntVector combined(const IntMatrix& w, const ColouredNet& net, Index t, const IntVector& combination)
{
    return w.middleCols(net.offset(t), net.colour_count(t)) * combination;
}

std::vector<Integer> key_of(const Marking& m)
{
    return std::vector<Integer>(m.data(), m.data() + m.size());
}

bool lex_less_marking(const Marking& a, const Marking& b)
{
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

} // namespace

std::string format_marking(const ColouredNet& net, const Marking& m)
{
    return format_section(net, iota_indices(net.token_count()), ColourKind::Token, m);
}

std::string format_sequence(const ColouredNet& net, const OccurrenceSequence& s)
{
    std::string out;
    for (const auto& e : s) {
        if (!out.empty())
            out += ' ';
        out += net.binding_label(net.global_index(e.transition, e.binding));
    }
    return out.empty() ? "<empty>" : out;
}

std::string format_step(const ColouredNet& net, const Step& s)
{
    std::vector<Index> cols;
    for (Index k = 0; k < net.colour_count(s.transition); ++k)
        cols.push_back(net.global_index(s.transition, k));
    return format_section(net, cols, ColourKind::Binding, s.combination);
}

bool enabled(const ColouredNet& net, const Marking& m, Index t, Index b)
{
    require_marking(net, m);
    require_binding(net, t, b);
    return is_nonnegative(IntVector(m - net.w_minus().col(net.global_index(t, b))));
}

Marking fire(const ColouredNet& net, const Marking& m, Index t, Index b)
{
    if (!enabled(net, m, t, b))
        throw BehaviourError("binding " + net.binding_label(net.global_index(t, b)) + " is not enabled at "
                             + format_marking(net, m));
    const Index col = net.global_index(t, b);
    return m - net.w_minus().col(col) + net.w_plus().col(col);
}

bool enabled_combination(const ColouredNet& net, const Marking& m, Index t, const IntVector& combination)
{
    require_marking(net, m);
    require_binding(net, t, 0);
    if (combination.size() != net.colour_count(t) || !is_nonnegative(combination))
        throw StructuralError("binding combination for '" + net.space().name(t) + "' must be a non-negative vector of length "
                              + std::to_string(net.colour_count(t)));
    return is_nonnegative(IntVector(m - combined(net.w_minus(), net, t, combination)));
}

Marking fire_combination(const ColouredNet& net, const Marking& m, Index t, const IntVector& combination)
{
    if (!enabled_combination(net, m, t, combination))
        throw BehaviourError("step " + format_step(net, Step{t, combination}) + " is not enabled at "
                             + format_marking(net, m));
    return m - combined(net.w_minus(), net, t, combination) + combined(net.w_plus(), net, t, combination);
}

Marking fire_sequence(const ColouredNet& net, const Marking& m, const OccurrenceSequence& s)
{
    Marking cur = m;
    for (const auto& e : s)
        cur = fire(net, cur, e.transition, e.binding);
    return cur;
}

bool activated(const ColouredNet& net, const Marking& m, const OccurrenceSequence& s)
{
    Marking cur = m;
    for (const auto& e : s) {
        if (!enabled(net, cur, e.transition, e.binding))
            return false;
        cur = fire(net, cur, e.transition, e.binding);
    }
    return true;
}

IntVector parikh(const ColouredNet& net, const OccurrenceSequence& s)
{
    IntVector p = IntVector::Zero(net.binding_count());
    for (const auto& e : s) {
        require_binding(net, e.transition, e.binding);
        p(net.global_index(e.transition, e.binding)) += 1;
    }
    return p;
}

// --- saturation ----------------------------------------------------------------------------

Saturation saturate(const NetMorphism& m, const OccurrenceSequence& s)
{
    const ColouredNet& X = m.source();
    const PetriSpace& YS = m.target().space();
    Saturation sat;
    std::map<Index, FlowModule> fibre_flows;
    std::map<Index, std::vector<Index>> fibre_cols;
    bool open_run = false; // last run is a transition run whose Parikh vector is no flow yet

    auto fail_open = [&](const std::string& why) {
        sat.saturated = false;
        sat.failed_run = static_cast<Index>(sat.runs.size()) - 1;
        const Run& r = sat.runs.back();
        sat.reason = "run " + std::to_string(sat.failed_run + 1) + " over '" + YS.name(r.target) + "' ("
            + format_sequence(X, r.events) + ") " + why + "; its Parikh vector "
            + format_section(X, fibre_cols[r.target], ColourKind::Binding, r.parikh) + " is not a flow";
    };

    for (const auto& e : s) {
        require_binding(X, e.transition, e.binding);
        const Index y = m(e.transition);
        const bool over_t = YS.is_transition(y);
        if (over_t) {
            if (!fibre_flows.count(y)) {
                fibre_flows.emplace(y, flows(X, m.fibre(y)));
                fibre_cols.emplace(y, X.binding_indices(m.fibre(y)));
            }
            if (open_run && sat.runs.back().target != y) {
                fail_open("is interrupted by " + X.binding_label(X.global_index(e.transition, e.binding)));
                return sat;
            }
            if (!open_run) {
                Run r;
                r.over_transition = true;
                r.target = y;
                r.parikh = IntVector::Zero(static_cast<Index>(fibre_cols[y].size()));
                sat.runs.push_back(std::move(r));
                open_run = true;
            }
            Run& r = sat.runs.back();
            r.events.push_back(e);
            const auto& cols = fibre_cols[y];
            const Index pos = static_cast<Index>(
                std::find(cols.begin(), cols.end(), X.global_index(e.transition, e.binding)) - cols.begin());
            r.parikh(pos) += 1;
            if (fibre_flows.at(y).lattice.contains(r.parikh))
                open_run = false;
        } else {
            if (open_run) {
                fail_open("is interrupted by " + X.binding_label(X.global_index(e.transition, e.binding)));
                return sat;
            }
            if (sat.runs.empty() || sat.runs.back().over_transition || sat.runs.back().target != y) {
                Run r;
                r.over_transition = false;
                r.target = y;
                sat.runs.push_back(std::move(r));
            }
            Run& r = sat.runs.back();
            r.events.push_back(e);
        }
    }
    if (open_run)
        fail_open("ends the sequence");
    for (auto& r : sat.runs)
        if (!r.over_transition) {
            const auto cols = X.binding_indices(m.fibre(r.target));
            r.parikh = IntVector::Zero(static_cast<Index>(cols.size()));
            for (const auto& e : r.events)
                r.parikh(static_cast<Index>(std::find(cols.begin(), cols.end(), X.global_index(e.transition, e.binding))
                                            - cols.begin())) += 1;
        }
    return sat;
}

std::vector<Step> map_sequence(const NetMorphism& m, const Saturation& sat)
{
    if (!sat.saturated)
        throw HypothesisError("only saturated sequences are mapped: " + sat.reason);
    std::vector<Step> out;
    for (const auto& r : sat.runs) {
        if (!r.over_transition)
            continue;
        auto img = m.flow_image(r.target, rationalize(r.parikh));
        if (!img)
            throw StructuralError("flow of a run has no image; the morphism does not verify");
        if (!is_integral(*img) || !is_nonnegative(*img))
            throw BehaviourError("image " + format_vector(*img) + " of a run over '"
                                 + m.target().space().name(r.target) + "' is not a non-negative integer step");
        IntVector c = integral_part(*img);
        if (!is_zero(c))
            out.push_back(Step{r.target, c});
    }
    return out;
}

RatVector map_marking(const NetMorphism& m, const Marking& marking)
{
    require_marking(m.source(), marking);
    const RatMatrix a = m.mark_matrix_over(NodeSet::all(m.target().space()));
    return a * rationalize(marking);
}

Marking map_marking_integral(const NetMorphism& m, const Marking& marking)
{
    const RatVector v = map_marking(m, marking);
    if (!is_integral(v) || !is_nonnegative(v))
        throw BehaviourError("image " + format_vector(v) + " of marking " + format_marking(m.source(), marking)
                             + " is not a marking");
    return integral_part(v);
}

namespace {

void replay(const NetMorphism& m, const Marking& m0, const OccurrenceSequence& s, Report& r)
{
    const ColouredNet& X = m.source();
    const ColouredNet& Y = m.target();
    if (!activated(X, m0, s))
        throw BehaviourError("sequence " + format_sequence(X, s) + " is not activated at " + format_marking(X, m0));
    const Saturation sat = saturate(m, s);
    if (!sat.saturated) {
        r.fail("behaviour.saturated", "sequence is saturated", sat.reason);
        return;
    }
    r.pass("behaviour.saturated", "sequence is saturated", std::to_string(sat.runs.size()) + " runs");
    Marking xm = m0;
    Marking ym = map_marking_integral(m, m0);
    std::vector<Step> image;
    for (std::size_t i = 0; i < sat.runs.size(); ++i) {
        const Run& run = sat.runs[i];
        xm = fire_sequence(X, xm, run.events);
        if (run.over_transition) {
            Saturation one;
            one.runs.push_back(run);
            for (const auto& st : map_sequence(m, one)) {
                if (!enabled_combination(Y, ym, st.transition, st.combination)) {
                    r.fail("behaviour.image-activated", "image sequence is activated",
                           "step " + format_step(Y, st) + " (image of run " + std::to_string(i + 1)
                               + ") is not enabled at " + format_marking(Y, ym));
                    return;
                }
                ym = fire_combination(Y, ym, st.transition, st.combination);
                image.push_back(st);
            }
        }
        const RatVector mapped = map_marking(m, xm);
        if (mapped != rationalize(ym)) {
            r.fail("behaviour.post-marking", "markings correspond after every run",
                   "after run " + std::to_string(i + 1) + " the source marking " + format_marking(X, xm) + " maps to "
                       + format_vector(mapped) + ", the image sequence reaches " + format_marking(Y, ym));
            return;
        }
    }
    std::string steps;
    for (const auto& st : image)
        steps += (steps.empty() ? "" : ", ") + format_step(Y, st);
    r.pass("behaviour.image-activated", "image sequence is activated", steps.empty() ? "<empty>" : steps);
    r.pass("behaviour.post-marking", "markings correspond after every run", format_marking(Y, ym));
}

} // namespace

Report check_behaviour_mapping(const NetMorphism& m, const Marking& m0, const OccurrenceSequence& s)
{
    const PetriSpace& YS = m.target().space();
    const NodeSet image = m.map().image();
    if (!is_open(YS, image))
        throw HypothesisError("image " + format_nodes(YS, image) + " of '" + m.name() + "' is not open");
    Report r("behaviour of " + format_sequence(m.source(), s));
    replay(m, m0, s, r);
    return r;
}

Report verify_petri_morphism(const NetMorphism& m, const Marking& mx, const Marking& my,
                             const std::vector<OccurrenceSequence>& witnesses)
{
    Report r("petri morphism " + m.name());
    const RatVector mapped = map_marking(m, mx);
    if (mapped != rationalize(my)) {
        r.fail("petri.initial-marking", "initial marking maps to the initial marking",
               format_marking(m.source(), mx) + " maps to " + format_vector(mapped) + ", expected "
                   + format_marking(m.target(), my));
        return r;
    }
    r.pass("petri.initial-marking", "initial marking maps to the initial marking", format_marking(m.target(), my));
    const bool open_image = is_open(m.target().space(), m.map().image());
    const bool certified = open_image || m.map().is_surjective();
    std::string note = certified ? (m.map().is_surjective() ? "surjective node map" : "open image")
                                 : "checked on " + std::to_string(witnesses.size()) + " witnesses only";
    if (is_discrete(m.map()))
        note += "; discrete, so every sequence is saturated";
    for (const auto& w : witnesses) {
        Report one;
        replay(m, mx, w, one);
        if (!one.passed()) {
            const Clause* c = one.first_problem();
            r.fail("petri.sequences", "activated saturated sequences map to activated sequences",
                   "witness " + format_sequence(m.source(), w) + ": " + c->detail);
            return r;
        }
    }
    r.pass("petri.sequences", "activated saturated sequences map to activated sequences", note);
    return r;
}

void for_each_activated_sequence(const ColouredNet& net, const Marking& m0, std::size_t max_length,
                                 const std::function<void(const OccurrenceSequence&)>& f)
{
    OccurrenceSequence cur;
    std::function<void(const Marking&)> go = [&](const Marking& mk) {
        f(cur);
        if (cur.size() == max_length)
            return;
        for (Index t : net.space().transitions())
            for (Index b = 0; b < net.colour_count(t); ++b)
                if (enabled(net, mk, t, b)) {
                    cur.push_back(Event{t, b});
                    go(fire(net, mk, t, b));
                    cur.pop_back();
                }
    };
    require_marking(net, m0);
    go(m0);
}

// --- reachability ------------------------------------------------------------------------------

std::optional<std::size_t> ReachGraph::index_of(const Marking& m) const
{
    auto it = std::lower_bound(markings.begin(), markings.end(), m, lex_less_marking);
    if (it == markings.end() || *it != m)
        return std::nullopt;
    return static_cast<std::size_t>(it - markings.begin());
}

namespace {

struct Move {
    Index transition;
    Index binding; // -1 for a combination
    IntVector combination;
};

ReachGraph explore(const ColouredNet& net, const Marking& m0, const std::vector<Move>& moves, const ReachOptions& opts)
{
    require_marking(net, m0);
    if (!is_nonnegative(m0))
        throw StructuralError("initial marking has a negative entry");
    std::map<std::vector<Integer>, std::size_t> seen;
    std::vector<Marking> found;
    std::vector<std::size_t> depth;
    std::vector<std::pair<ReachEdge, std::size_t>> edges;
    std::deque<std::size_t> queue;
    ReachGraph g;

    seen.emplace(key_of(m0), 0);
    found.push_back(m0);
    depth.push_back(0);
    queue.push_back(0);
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        const Marking mk = found[cur];
        for (std::size_t mi = 0; mi < moves.size(); ++mi) {
            const Move& mv = moves[mi];
            Marking next;
            if (mv.binding >= 0) {
                if (!enabled(net, mk, mv.transition, mv.binding))
                    continue;
                next = fire(net, mk, mv.transition, mv.binding);
            } else {
                if (!enabled_combination(net, mk, mv.transition, mv.combination))
                    continue;
                next = fire_combination(net, mk, mv.transition, mv.combination);
            }
            auto it = seen.find(key_of(next));
            if (depth[cur] >= opts.depth) {
                if (it == seen.end() && !g.truncated) {
                    g.truncated = true;
                    g.truncation = "depth bound " + std::to_string(opts.depth);
                }
                continue;
            }
            std::size_t idx;
            if (it == seen.end()) {
                if (found.size() >= opts.max_markings) {
                    if (!g.truncated) {
                        g.truncated = true;
                        g.truncation = "marking bound " + std::to_string(opts.max_markings);
                    }
                    continue;
                }
                idx = found.size();
                seen.emplace(key_of(next), idx);
                found.push_back(next);
                depth.push_back(depth[cur] + 1);
                queue.push_back(idx);
            } else {
                idx = it->second;
            }
            ReachEdge e{cur, idx, Event{mv.transition, mv.binding}, {}};
            if (mv.binding < 0)
                e.combination = mv.combination;
            edges.emplace_back(e, mi);
        }
    }
    std::vector<std::size_t> order(found.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lex_less_marking(found[a], found[b]); });
    std::vector<std::size_t> rank(found.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[order[i]] = i;
        g.markings.push_back(found[order[i]]);
    }
    for (auto& e : edges) {
        e.first.from = rank[e.first.from];
        e.first.to = rank[e.first.to];
    }
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.from, a.first.to, a.second) < std::tie(b.first.from, b.first.to, b.second);
    });
    for (auto& e : edges)
        g.edges.push_back(std::move(e.first));
    g.initial = rank[0];
    return g;
}

} // namespace

ReachGraph reachable(const ColouredNet& net, const Marking& m0, const ReachOptions& opts)
{
    std::vector<Move> moves;
    for (Index t : net.space().transitions())
        for (Index b = 0; b < net.colour_count(t); ++b)
            moves.push_back(Move{t, b, {}});
    return explore(net, m0, moves, opts);
}

ReachGraph reachable_steps(const ColouredNet& net, const Marking& m0, const std::vector<Step>& steps,
                           const ReachOptions& opts)
{
    std::vector<Move> moves;
    for (const auto& s : steps) {
        if (!net.space().is_transition(s.transition) || s.combination.size() != net.colour_count(s.transition))
            throw StructuralError("step does not match a transition of '" + net.name() + "'");
        Index single = -1, nonzero = 0;
        for (Index b = 0; b < s.combination.size(); ++b)
            if (s.combination(b) != 0) {
                ++nonzero;
                single = s.combination(b) == 1 ? b : -1;
            }
        if (nonzero == 1 && single >= 0)
            moves.push_back(Move{s.transition, single, {}});
        else
            moves.push_back(Move{s.transition, -1, s.combination});
    }
    return explore(net, m0, moves, opts);
}

Report check_modification_invariance(const NetMorphism& m, const Marking& mx, const std::optional<Marking>& my,
                                     const ReachOptions& opts)
{
    const ColouredNet& X = m.source();
    const ColouredNet& Y = m.target();
    Report r("modification invariance of " + m.name());
    const Marking mapped0 = map_marking_integral(m, mx);
    if (my && *my != mapped0) {
        r.fail("modification.initial", "initial markings correspond",
               format_marking(X, mx) + " maps to " + format_marking(Y, mapped0) + ", expected "
                   + format_marking(Y, *my));
        return r;
    }
    r.pass("modification.initial", "initial markings correspond", format_marking(Y, mapped0));
    const Marking y0 = my ? *my : mapped0;
    const ReachGraph gx = reachable(X, mx, opts);
    const ReachGraph gy = reachable(Y, y0, opts);
    const bool truncated = gx.truncated || gy.truncated;

    std::vector<Marking> phi;
    std::string problem;
    std::map<std::vector<Integer>, std::size_t> preimage;
    for (std::size_t i = 0; i < gx.markings.size(); ++i) {
        Marking im;
        try {
            im = map_marking_integral(m, gx.markings[i]);
        } catch (const BehaviourError& e) {
            problem = e.what();
            break;
        }
        phi.push_back(im);
        auto [it, fresh] = preimage.emplace(key_of(im), i);
        if (!fresh && problem.empty())
            problem = "markings " + format_marking(X, gx.markings[it->second]) + " and "
                + format_marking(X, gx.markings[i]) + " both map to " + format_marking(Y, im);
        if (!gy.index_of(im) && problem.empty() && !truncated)
            problem = "image " + format_marking(Y, im) + " of reachable " + format_marking(X, gx.markings[i])
                + " is not reachable in the target";
    }
    if (problem.empty() && !truncated)
        for (const auto& ym : gy.markings)
            if (!preimage.count(key_of(ym))) {
                problem = "reachable target marking " + format_marking(Y, ym) + " has no reachable preimage";
                break;
            }
    if (!problem.empty()) {
        r.fail("modification.bijection", "marking map is a bijection of reachable sets", problem);
        return r;
    }
    r.add("modification.bijection", "marking map is a bijection of reachable sets",
          truncated ? Status::Inconclusive : Status::Pass,
          std::to_string(gx.markings.size()) + " markings on each side"
              + (truncated ? "; exploration truncated (" + (gx.truncated ? gx.truncation : gy.truncation) + ")" : ""));

    // firing commutes: every source edge maps to a target step and every target edge lifts
    for (const auto& e : gx.edges) {
        const Index y = m(e.event.transition);
        const Marking& from = phi[e.from];
        const Marking& to = phi[e.to];
        if (m.target().space().is_place(y)) {
            if (from != to)
                problem = "event " + format_sequence(X, {e.event}) + " inside a place fibre changes the image marking";
        } else {
            const auto cols = X.binding_indices(m.fibre(y));
            RatVector unit = RatVector::Zero(static_cast<Index>(cols.size()));
            unit(static_cast<Index>(std::find(cols.begin(), cols.end(), X.global_index(e.event.transition, e.event.binding))
                                    - cols.begin())) = 1;
            auto img = m.flow_image(y, unit);
            if (!img || !is_integral(*img) || !is_nonnegative(*img)) {
                problem = "event " + format_sequence(X, {e.event}) + " has no non-negative image step";
            } else {
                const IntVector c = integral_part(*img);
                if (!enabled_combination(Y, from, y, c) || fire_combination(Y, from, y, c) != to)
                    problem = "event " + format_sequence(X, {e.event}) + " from " + format_marking(X, gx.markings[e.from])
                        + " does not commute with its image step " + format_step(Y, Step{y, c});
            }
        }
        if (!problem.empty())
            break;
    }
    if (problem.empty())
        for (const auto& e : gy.edges) {
            auto src = preimage.find(key_of(gy.markings[e.from]));
            if (src == preimage.end())
                continue; // only when truncated
            const Index a = e.event.transition;
            const NodeSet fib = m.fibre(a);
            auto it = m.flow_maps().find(a);
            if (fib.empty() || it == m.flow_maps().end()) {
                problem = "target event " + format_sequence(Y, {e.event}) + " has no preimage transition";
                break;
            }
            RatVector unit = RatVector::Zero(Y.colour_count(a));
            unit(e.event.binding) = 1;
            auto coeff = solve_linear<Rational>(it->second.images, unit);
            const RatVector lift = coeff ? RatVector(it->second.basis * *coeff) : RatVector();
            if (!coeff || !is_integral(lift) || !is_nonnegative(lift)) {
                problem = "target event " + format_sequence(Y, {e.event}) + " has no non-negative preimage flow";
                break;
            }
            const auto cols = X.binding_indices(fib);
            const IntVector l = integral_part(lift);
            IntVector pre = IntVector::Zero(X.token_count()), post = pre;
            for (std::size_t k = 0; k < cols.size(); ++k) {
                pre += l(static_cast<Index>(k)) * X.w_minus().col(cols[k]);
                post += l(static_cast<Index>(k)) * X.w_plus().col(cols[k]);
            }
            const Marking& xm = gx.markings[src->second];
            const IntVector after = xm - pre;
            if (!is_nonnegative(after)) {
                problem = "target event " + format_sequence(Y, {e.event}) + " at " + format_marking(Y, gy.markings[e.from])
                    + " lifts to a step that is not enabled at " + format_marking(X, xm);
                break;
            }
            if (map_marking_integral(m, Marking(after + post)) != gy.markings[e.to]) {
                problem = "target event " + format_sequence(Y, {e.event}) + " does not commute with its lift";
                break;
            }
        }
    if (!problem.empty()) {
        r.fail("modification.firing", "firing commutes with the marking map", problem);
        return r;
    }
    r.add("modification.firing", "firing commutes with the marking map", truncated ? Status::Inconclusive : Status::Pass,
          std::to_string(gx.edges.size()) + " source and " + std::to_string(gy.edges.size()) + " target edges");
    return r;
}

// --- text forms ----------------------------------------------------------------------------------

namespace {

std::vector<std::string> split_items(const std::string& text)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '+') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

std::pair<Index, Index> node_colour(const ColouredNet& net, const std::string& item, Sort sort)
{
    const auto dot = item.find('.');
    const std::string node = item.substr(0, dot);
    if (!net.space().has_node(node))
        throw ParseError("unknown node '" + node + "'", 1, 1);
    const Index x = net.space().index_of(node);
    if (net.space().sort(x) != sort)
        throw ParseError("'" + node + "' is not a " + to_string(sort), 1, 1);
    if (dot == std::string::npos) {
        if (net.colour_count(x) != 1)
            throw ParseError("'" + node + "' has several colours; write " + node + ".<colour>", 1, 1);
        return {x, 0};
    }
    const std::string colour = item.substr(dot + 1);
    return {x, net.colour_index(x, colour)};
}

} // namespace

Marking parse_marking(const ColouredNet& net, const std::string& text)
{
    Marking m = Marking::Zero(net.token_count());
    for (const auto& item : split_items(text)) {
        std::string lhs = item;
        Integer n = 1;
        const auto eq = item.find('=');
        if (eq != std::string::npos) {
            lhs = item.substr(0, eq);
            try {
                n = Integer(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw ParseError("bad count in '" + item + "'", 1, 1);
            }
        } else if (const auto star = item.find('*'); star != std::string::npos) {
            try {
                n = Integer(item.substr(0, star));
            } catch (const std::exception&) {
                throw ParseError("bad count in '" + item + "'", 1, 1);
            }
            lhs = item.substr(star + 1);
        }
        if (n < 0)
            throw ParseError("negative count in '" + item + "'", 1, 1);
        const auto [p, c] = node_colour(net, lhs, Sort::Place);
        m(net.global_index(p, c)) += n;
    }
    return m;
}

OccurrenceSequence parse_sequence(const ColouredNet& net, const std::string& text)
{
    OccurrenceSequence s;
    for (const auto& item : split_items(text)) {
        const auto [t, b] = node_colour(net, item, Sort::Transition);
        s.push_back(Event{t, b});
    }
    return s;
}

} // namespace cpn
