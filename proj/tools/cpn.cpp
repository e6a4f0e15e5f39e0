#include "cpn/error.hpp"
#include "cpn/io.hpp"
#include "cpn/product.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace cpn;
using json = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, failed = 1, usage = 2, inconclusive = 3 };

struct Globals {
    std::string ring = "z";
    bool json = false;
    bool strict = false;
    bool relaxed = false;
    unsigned seed = 1;
    std::size_t hilbert_guard = 10000;

    ReadOptions read() const
    {
        ReadOptions r;
        if (strict)
            r.strict = true;
        if (relaxed)
            r.strict = false;
        return r;
    }
};

Globals g;

// Human-readable text and the JSON document of one command.
struct Output {
    std::ostringstream text;
    json doc = json::object();
};

int exit_for(Status s)
{
    switch (s) {
    case Status::Pass: return ok;
    case Status::Fail: return failed;
    case Status::Inconclusive: return inconclusive;
    }
    return failed;
}

json report_json(const Report& r)
{
    json clauses = json::array();
    for (const auto& c : r.clauses())
        clauses.push_back({{"id", c.id}, {"description", c.description}, {"status", to_string(c.status)},
                           {"detail", c.detail}});
    return {{"subject", r.subject()}, {"status", to_string(r.status())}, {"clauses", clauses}};
}

void print_report(std::ostream& os, const Report& r)
{
    if (!r.subject().empty())
        os << r.subject() << "\n";
    for (const auto& c : r.clauses()) {
        os << "  " << to_string(c.status) << "  " << c.id << "  " << c.description;
        if (!c.detail.empty())
            os << " (" << c.detail << ")";
        os << "\n";
    }
    os << "status: " << to_string(r.status()) << "\n";
}

// Nets are cached by path so that morphisms read from several files share them.
class Files {
public:
    const ColouredNet& net(const std::string& path)
    {
        const std::string key = std::filesystem::weakly_canonical(path).string();
        auto it = nets_.find(key);
        if (it == nets_.end())
            it = nets_.emplace(key, read_net(path, g.read())).first;
        return it->second;
    }
    NetMorphism morphism(const std::string& path)
    {
        return wrap(path, [&](const std::string& text) { return parse_morphism(text, loader(path)); });
    }
    WinskelMorphism winskel(const std::string& path)
    {
        return wrap(path, [&](const std::string& text) { return parse_winskel(text, loader(path)); });
    }

private:
    NetLoader loader(const std::string& path)
    {
        const auto dir = std::filesystem::path(path).parent_path();
        return [this, dir](const std::string& ref) { return net((dir / ref).string()); };
    }
    template <typename F>
    std::invoke_result_t<F, const std::string&> wrap(const std::string& path, F parse)
    {
        const std::string text = read_file(path);
        try {
            return parse(text);
        } catch (const ParseError& e) {
            throw ParseError(path + ": " + e.reason(), e.line(), e.column());
        }
    }
    std::map<std::string, ColouredNet> nets_;
};

Files files;

bool is_morphism_file(const std::string& path)
{
    return std::filesystem::path(path).extension() == ".pmor";
}

// all | places | transitions | nodes:a,b | fibre:y (needs a morphism)
NodeSet parse_region(const ColouredNet& net, const std::string& text, const NetMorphism* m)
{
    const PetriSpace& s = net.space();
    if (text == "all")
        return NodeSet::all(s);
    if (text == "places")
        return NodeSet::of_sort(s, Sort::Place);
    if (text == "transitions")
        return NodeSet::of_sort(s, Sort::Transition);
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon), rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "nodes") {
        NodeSet out(s);
        std::istringstream in(rest);
        std::string name;
        while (std::getline(in, name, ','))
            if (!name.empty())
                out.insert(s.index_of(name));
        return out;
    }
    if (kind == "fibre") {
        if (!m)
            throw StructuralError("region 'fibre:" + rest + "' needs a morphism (--morphism FILE or a .pmor argument)");
        return m->fibre(m->target().space().index_of(rest));
    }
    throw StructuralError("unknown region '" + text + "' (all, places, transitions, nodes:a,b, fibre:y)");
}

// A .pnet file, or the source net of a .pmor file (which then provides fibres).
struct Subject {
    ColouredNet net;
    std::optional<NetMorphism> morphism;
};

Subject load_subject(const std::string& path, const std::string& morphism_path)
{
    Subject s;
    if (is_morphism_file(path)) {
        s.morphism = files.morphism(path);
        s.net = s.morphism->source();
    } else {
        s.net = files.net(path);
        if (!morphism_path.empty()) {
            s.morphism = files.morphism(morphism_path);
            if (s.morphism->source().space().id() != s.net.space().id())
                throw StructuralError("morphism '" + s.morphism->name() + "' does not start at '" + path + "'");
        }
    }
    return s;
}

std::string terms(const std::vector<std::string>& labels, const IntVector& v)
{
    std::string s;
    for (Index i = 0; i < v.size(); ++i) {
        if (v(i) == 0)
            continue;
        if (s.empty())
            s = v(i).str() + "*" + labels[static_cast<std::size_t>(i)];
        else if (v(i) < 0)
            s += " - " + Integer(-v(i)).str() + "*" + labels[static_cast<std::size_t>(i)];
        else
            s += " + " + v(i).str() + "*" + labels[static_cast<std::size_t>(i)];
    }
    return s.empty() ? "0" : s;
}

json vector_json(const IntVector& v)
{
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i)
        a.push_back(v(i).str());
    return a;
}

json marking_json(const ColouredNet& net, const Marking& m)
{
    json o = json::object();
    for (Index i = 0; i < m.size(); ++i)
        if (m(i) != 0)
            o[net.token_label(i)] = m(i).str();
    return o;
}

Marking marking_of(const ColouredNet& net, const std::string& text)
{
    if (!text.empty())
        return parse_marking(net, text);
    if (net.initial_marking())
        return *net.initial_marking();
    return IntVector::Zero(net.token_count());
}

json nodes_json(const PetriSpace& s, const NodeSet& set)
{
    json a = json::array();
    for (Index x : set.members())
        a.push_back(s.name(x));
    return a;
}

// --- commands ---------------------------------------------------------------------

int cmd_show(Output& out, const std::string& path)
{
    const ColouredNet& net = files.net(path);
    const PetriSpace& s = net.space();
    out.text << "net " << net.name() << " (" << (net.strict() ? "strict" : "relaxed") << ")\n";
    json nodes = json::array();
    for (Index x = 0; x < s.size(); ++x) {
        out.text << "  " << to_string(s.sort(x)) << " " << s.name(x) << ":";
        for (const auto& c : net.colours(x))
            out.text << " " << c;
        out.text << "\n";
        nodes.push_back({{"name", s.name(x)}, {"sort", to_string(s.sort(x))}, {"colours", net.colours(x)}});
    }
    json adjacency = json::array();
    out.text << "adjacency:";
    for (const auto& [p, t] : s.adjacency_pairs()) {
        out.text << " " << s.name(p) << "-" << s.name(t);
        adjacency.push_back({s.name(p), s.name(t)});
    }
    out.text << "\ncanonical basis:\n";
    json basis = json::array();
    for (const auto& b : canonical_basis(s)) {
        out.text << "  " << format_nodes(s, b) << "\n";
        basis.push_back(nodes_json(s, b));
    }
    out.doc = {{"net", net.name()},       {"strict", net.strict()}, {"nodes", nodes},
               {"adjacency", adjacency}, {"canonical_basis", basis}};
    return ok;
}

int cmd_flows(Output& out, const std::string& path, const std::string& region_text, const std::string& mor)
{
    const Subject subj = load_subject(path, mor);
    const ColouredNet& net = subj.net;
    const NodeSet region = parse_region(net, region_text, subj.morphism ? &*subj.morphism : nullptr);
    if (!is_closed(net.space(), region))
        throw StructuralError("flows live on closed regions; " + format_nodes(net.space(), region) + " is not closed");
    const FlowModule fm = flows(net, region);
    std::vector<std::string> labels;
    for (Index c : fm.columns)
        labels.push_back(net.binding_label(c));
    out.text << "region " << format_nodes(net.space(), region) << "\n";
    out.text << "rank " << fm.rank() << "\n";
    out.doc = {{"net", net.name()}, {"region", nodes_json(net.space(), region)}, {"ring", g.ring},
               {"coordinates", labels}, {"rank", fm.rank()}};
    json basis = json::array();
    out.text << "basis (hermite normal form):\n";
    for (Index j = 0; j < fm.rank(); ++j) {
        const IntVector v = fm.basis().col(j);
        out.text << "  " << terms(labels, v) << "\n";
        basis.push_back(vector_json(v));
    }
    out.doc["basis"] = basis;
    if (g.ring == "n") {
        const auto hb = hilbert_basis(fm.lattice, g.hilbert_guard);
        json h = json::array();
        out.text << "non-negative generators (" << hb.size() << "):\n";
        for (const auto& v : hb) {
            out.text << "  " << terms(labels, v) << "\n";
            h.push_back(vector_json(v));
        }
        out.doc["nonnegative_generators"] = h;
    }
    return ok;
}

int cmd_classes(Output& out, const std::string& path, const std::string& region_text, const std::string& mor)
{
    const Subject subj = load_subject(path, mor);
    const ColouredNet& net = subj.net;
    const NodeSet region = parse_region(net, region_text, subj.morphism ? &*subj.morphism : nullptr);
    if (!is_open(net.space(), region))
        throw StructuralError("marking classes live on open regions; " + format_nodes(net.space(), region)
                              + " is not open");
    const MarkingClassModule mc = marking_classes(net, region);
    const QuotientModule& q = mc.quotient;
    std::vector<std::string> labels;
    for (Index r : mc.rows)
        labels.push_back(net.token_label(r));
    json torsion = json::array();
    for (const auto& d : q.torsion())
        torsion.push_back(d.str());
    out.text << "region " << format_nodes(net.space(), region) << "\n";
    if (g.ring == "q") {
        out.text << "dimension " << q.free_rank() << "\n";
    } else {
        out.text << "free rank " << q.free_rank() << "\n";
        out.text << "invariant factors:";
        for (const auto& d : q.torsion())
            out.text << " " << d.str();
        out.text << (q.torsion().empty() ? " none\n" : "\n");
    }
    out.doc = {{"net", net.name()}, {"region", nodes_json(net.space(), region)}, {"ring", g.ring},
               {"coordinates", labels}, {"free_rank", q.free_rank()}, {"invariant_factors", torsion}};
    json gens = json::array();
    out.text << "generators:\n";
    for (Index k = 0; k < q.generators().cols(); ++k) {
        const IntVector rep = q.canonical_rep(q.generators().col(k));
        out.text << "  [" << terms(labels, rep) << "]\n";
        gens.push_back(vector_json(rep));
    }
    out.doc["generators"] = gens;
    json units = json::object();
    out.text << "unit classes (coordinates):\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        IntVector e = IntVector::Zero(static_cast<Index>(labels.size()));
        e(static_cast<Index>(i)) = 1;
        const IntVector c = q.coordinates(e);
        out.text << "  " << labels[i] << " ->";
        for (Index k = 0; k < c.size(); ++k)
            out.text << " " << c(k).str();
        out.text << "\n";
        units[labels[i]] = vector_json(c);
    }
    out.doc["unit_classes"] = units;
    return ok;
}

// Random open regions covered by merged minimal opens, and the dual for closed regions.
std::vector<std::pair<NodeSet, std::vector<NodeSet>>> random_coverings(const PetriSpace& s, std::size_t n,
                                                                       std::mt19937& rng)
{
    std::vector<std::pair<NodeSet, std::vector<NodeSet>>> out;
    std::bernoulli_distribution coin(0.5);
    for (std::size_t k = 0; k < n; ++k) {
        const bool open = k % 2 == 0;
        NodeSet seed(s);
        for (Index x = 0; x < s.size(); ++x)
            if (coin(rng))
                seed.insert(x);
        if (seed.empty())
            seed.insert(0);
        const NodeSet region = open ? open_hull(s, seed) : closed_hull(s, seed);
        std::vector<NodeSet> cover;
        for (Index x : region.members()) {
            const NodeSet piece = open ? minimal_open(s, x) : minimal_closed(s, x);
            if (!cover.empty() && coin(rng))
                cover.back() = cover.back() | piece;
            else
                cover.push_back(piece);
        }
        out.emplace_back(region, std::move(cover));
    }
    return out;
}

int cmd_axioms(Output& out, const std::string& path, std::size_t samples)
{
    const ColouredNet& net = files.net(path);
    Report r = verify_all_basic_coverings(net);
    std::mt19937 rng(g.seed);
    for (const auto& [region, cover] : random_coverings(net.space(), samples, rng)) {
        const Report extra = verify_sheaf_axioms(net, region, cover);
        for (const auto& c : extra.clauses())
            r.add(c.id, c.description + " over " + format_nodes(net.space(), region), c.status, c.detail);
    }
    print_report(out.text, r);
    out.doc = {{"net", net.name()}, {"seed", g.seed}, {"samples", samples}, {"report", report_json(r)}};
    return exit_for(r.status());
}

json classification_json(const Classification& c)
{
    return {{"abstraction", c.abstraction},
            {"embedding", c.embedding},
            {"discrete", c.discrete},
            {"modification", c.modification},
            {"place_modification", c.place_modification},
            {"transition_modification", c.transition_modification},
            {"isomorphism", c.isomorphism},
            {"inconclusive", c.inconclusive}};
}

void print_classification(std::ostream& os, const Classification& c)
{
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    os << "abstraction: " << yn(c.abstraction) << "; embedding: " << yn(c.embedding)
       << "; discrete: " << yn(c.discrete) << "\n";
    os << "modification: " << yn(c.modification) << "; place-modification: " << yn(c.place_modification)
       << "; transition-modification: " << yn(c.transition_modification) << "; isomorphism: " << yn(c.isomorphism)
       << "\n";
    if (c.inconclusive)
        os << "inconclusive: " << c.note << "\n";
}

int cmd_check_morphism(Output& out, const std::string& path)
{
    const NetMorphism m = files.morphism(path);
    VerifyOptions vo;
    vo.hilbert_guard = g.hilbert_guard;
    const MorphismReport r = verify_morphism(m, vo);
    print_report(out.text, r.report);
    out.doc = {{"morphism", m.name()}, {"report", report_json(r.report)}};
    if (r.status() == Status::Fail)
        return failed;
    const Classification c = classify(m, vo);
    print_classification(out.text, c);
    out.doc["classification"] = classification_json(c);
    return c.inconclusive ? inconclusive : exit_for(r.status());
}

int cmd_compose(Output& out, const std::string& first, const std::string& second)
{
    const NetMorphism f = files.morphism(first);
    const NetMorphism h = files.morphism(second);
    const NetMorphism gf = compose(h, f);
    const MorphismReport r = verify_morphism(gf);
    const std::string text = serialize_morphism(gf, f.source().name() + ".pnet", h.target().name() + ".pnet");
    out.text << text;
    print_report(out.text, r.report);
    out.doc = {{"morphism", gf.name()}, {"document", text}, {"report", report_json(r.report)}};
    return exit_for(r.status());
}

std::vector<std::string> provenance(const ProductNet& pn)
{
    std::vector<std::string> lines{"product of " + pn.first.name() + " and " + pn.second.name()};
    for (Index x = 0; x < pn.net.space().size(); ++x) {
        const auto [x1, x2] = pn.pairs[static_cast<std::size_t>(x)];
        lines.push_back(pn.net.space().name(x) + " <- " + pn.first.name() + "." + pn.first.space().name(x1) + " x "
                        + pn.second.name() + "." + pn.second.space().name(x2));
    }
    return lines;
}

int cmd_product(Output& out, const std::string& p1, const std::string& p2, bool marked, const std::string& file)
{
    const ColouredNet& n1 = files.net(p1);
    const ColouredNet& n2 = files.net(p2);
    ProductNet pn = kronecker(n1, n2);
    if (marked)
        pn.net.set_initial_marking(product_marking(pn, marking_of(n1, ""), marking_of(n2, "")));
    const std::string text = serialize_net(pn.net, provenance(pn));
    if (!file.empty())
        write_file(file, text);
    else
        out.text << text;
    out.doc = {{"net", pn.net.name()}, {"document", text}};
    return ok;
}

int cmd_fibre_product(Output& out, const std::string& p1, const std::string& p2, const std::vector<std::string>& cones)
{
    const NetMorphism g1 = files.morphism(p1);
    const NetMorphism g2 = files.morphism(p2);
    const FibreProduct fp = fibre_product(g1, g2);
    Report r = fp.report;
    if (!cones.empty()) {
        if (cones.size() != 2)
            throw StructuralError("--cone takes two morphism files");
        r.append(check_fibre_cone(fp, files.morphism(cones[0]), files.morphism(cones[1])));
    }
    const std::string text = serialize_net(fp.image.net, {"fibre product of " + g1.name() + " and " + g2.name()});
    out.text << text;
    print_report(out.text, r);
    out.doc = {{"net", fp.image.net.name()}, {"document", text}, {"report", report_json(r)}};
    return exit_for(r.status());
}

int cmd_diagonal(Output& out, const std::string& path)
{
    const Diagonal d = diagonal(files.net(path));
    const std::string text = serialize_net(d.net, {"diagonal of " + d.square.first.name()});
    out.text << text;
    print_report(out.text, d.report);
    out.doc = {{"net", d.net.name()}, {"document", text}, {"report", report_json(d.report)}};
    return exit_for(d.report.status());
}

int cmd_simulate(Output& out, const std::string& path, const std::string& marking, const std::string& sequence)
{
    const ColouredNet& net = files.net(path);
    Marking m = marking_of(net, marking);
    const OccurrenceSequence s = parse_sequence(net, sequence);
    json steps = json::array();
    out.text << "initial: " << format_marking(net, m) << "\n";
    for (const auto& e : s) {
        const std::string label = net.binding_label(net.global_index(e.transition, e.binding));
        if (!enabled(net, m, e.transition, e.binding)) {
            out.text << label << ": not enabled\n";
            out.doc = {{"net", net.name()}, {"steps", steps}, {"disabled", label}};
            return failed;
        }
        m = fire(net, m, e.transition, e.binding);
        out.text << label << ": " << format_marking(net, m) << "\n";
        steps.push_back({{"event", label}, {"marking", marking_json(net, m)}});
    }
    out.doc = {{"net", net.name()}, {"steps", steps}, {"final", marking_json(net, m)}};
    return ok;
}

int cmd_reach(Output& out, const std::string& path, const std::string& marking, ReachOptions opts)
{
    const ColouredNet& net = files.net(path);
    const ReachGraph rg = reachable(net, marking_of(net, marking), opts);
    out.text << rg.markings.size() << (rg.markings.size() == 1 ? " marking" : " markings") << ", "
             << rg.edges.size() << " edges\n";
    json ms = json::array();
    for (const auto& m : rg.markings) {
        out.text << "  " << format_marking(net, m) << "\n";
        ms.push_back(marking_json(net, m));
    }
    if (rg.truncated)
        out.text << "truncated: " << rg.truncation << "\n";
    out.doc = {{"net", net.name()},          {"markings", ms},
               {"edges", rg.edges.size()},   {"truncated", rg.truncated},
               {"truncation", rg.truncation}};
    return rg.truncated ? inconclusive : ok;
}

int cmd_map_behaviour(Output& out, const std::string& path, const std::string& marking, const std::string& sequence)
{
    const NetMorphism m = files.morphism(path);
    const Marking m0 = marking_of(m.source(), marking);
    const OccurrenceSequence s = parse_sequence(m.source(), sequence);
    const Saturation sat = saturate(m, s);
    json image = json::array();
    if (sat.saturated)
        for (const auto& step : map_sequence(m, sat)) {
            out.text << "image step: " << format_step(m.target(), step) << "\n";
            image.push_back(format_step(m.target(), step));
        }
    const Report r = check_behaviour_mapping(m, m0, s);
    print_report(out.text, r);
    out.doc = {{"morphism", m.name()}, {"image", image}, {"report", report_json(r)}};
    return exit_for(r.status());
}

int cmd_winskel(Output& out, const std::string& path)
{
    const WinskelMorphism w = files.winskel(path);
    Report r = check_winskel(w);
    out.doc = {{"winskel", w.name}};
    if (r.passed()) {
        VerifyOptions vo;
        vo.hilbert_guard = g.hilbert_guard;
        const WinskelConversion conv = from_winskel(w, vo);
        r.append(conv.report);
        out.text << "domain " << format_nodes(w.source.space(), conv.domain) << "\n";
        out.text << "codomain " << format_nodes(w.target.space(), conv.codomain) << "\n";
        out.text << serialize_net(conv.quotient_net);
        out.doc["domain"] = nodes_json(w.source.space(), conv.domain);
        out.doc["codomain"] = nodes_json(w.target.space(), conv.codomain);
        out.doc["quotient"] = serialize_net(conv.quotient_net);
    }
    print_report(out.text, r);
    out.doc["report"] = report_json(r);
    return exit_for(r.status());
}

int cmd_product_reach(Output& out, const std::string& p1, const std::string& p2, const std::string& markings,
                      ReachOptions opts)
{
    const ColouredNet& n1 = files.net(p1);
    const ColouredNet& n2 = files.net(p2);
    std::string m1, m2;
    if (!markings.empty()) {
        const auto semi = markings.find(';');
        if (semi == std::string::npos)
            throw StructuralError("--markings takes 'M1;M2'");
        m1 = markings.substr(0, semi);
        m2 = markings.substr(semi + 1);
    }
    const ProductNet pn = kronecker(n1, n2);
    const Marking a = marking_of(n1, m1), b = marking_of(n2, m2);
    const Report r = check_reachability_correspondence(pn, a, b, opts);
    const auto rp = product_reachable(pn, product_marking(pn, a, b), opts);
    out.text << "product markings: " << rp.markings.size() << "\n";
    print_report(out.text, r);
    out.doc = {{"product", pn.net.name()}, {"markings", rp.markings.size()}, {"report", report_json(r)}};
    return exit_for(r.status());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coloured Petri nets as sheaves: flows, marking classes, morphisms and products"};
    app.require_subcommand(1);
    app.add_option("--ring", g.ring, "coefficients: n (non-negative cone), z or q")
        ->check(CLI::IsMember({"n", "z", "q"}));
    app.add_flag("--json", g.json, "print a JSON document instead of text");
    auto* strict = app.add_flag("--strict", g.strict, "require incidence support = adjacency");
    app.add_flag("--relaxed", g.relaxed, "allow incidence support beyond the adjacency")->excludes(strict);
    app.add_option("--seed", g.seed, "seed for randomized sweeps");
    app.add_option("--hilbert-guard", g.hilbert_guard, "bound on intermediate vectors of the Hilbert basis completion");

    std::function<int(Output&)> run;
    std::string net, net2, mor, region = "all", marking, sequence, file, markings;
    std::vector<std::string> cones;
    bool marked = false;
    std::size_t samples = 0;
    ReachOptions ropts;

    auto* show = app.add_subcommand("show", "topology and canonical basis of a net");
    show->add_option("NET", net)->required();
    show->callback([&] { run = [&](Output& o) { return cmd_show(o, net); }; });

    auto* fl = app.add_subcommand("flows", "flow lattice over a closed region");
    fl->add_option("NET", net, ".pnet file, or .pmor file for its source net")->required();
    fl->add_option("--region", region, "all | places | transitions | nodes:a,b | fibre:y");
    fl->add_option("--morphism", mor, "morphism providing fibre regions");
    fl->callback([&] { run = [&](Output& o) { return cmd_flows(o, net, region, mor); }; });

    auto* cl = app.add_subcommand("classes", "marking classes over an open region");
    cl->add_option("NET", net, ".pnet file, or .pmor file for its source net")->required();
    cl->add_option("--region", region, "all | places | transitions | nodes:a,b | fibre:y");
    cl->add_option("--morphism", mor, "morphism providing fibre regions");
    cl->callback([&] { run = [&](Output& o) { return cmd_classes(o, net, region, mor); }; });

    auto* ax = app.add_subcommand("axioms", "sheaf and cosheaf exactness over all basic coverings");
    ax->add_option("NET", net)->required();
    ax->add_option("--samples", samples, "additional random coverings (uses --seed)");
    ax->callback([&] { run = [&](Output& o) { return cmd_axioms(o, net, samples); }; });

    auto* cm = app.add_subcommand("check-morphism", "verify and classify a morphism");
    cm->add_option("MOR", mor)->required();
    cm->callback([&] { run = [&](Output& o) { return cmd_check_morphism(o, mor); }; });

    auto* co = app.add_subcommand("compose", "M2 after M1");
    co->add_option("M1", net)->required();
    co->add_option("M2", net2)->required();
    co->callback([&] { run = [&](Output& o) { return cmd_compose(o, net, net2); }; });

    auto* pr = app.add_subcommand("product", "Kronecker product of two nets");
    pr->add_option("N1", net)->required();
    pr->add_option("N2", net2)->required();
    pr->add_flag("--marked", marked, "include the product of the initial markings");
    pr->add_option("-o,--output", file, "write the net to a file");
    pr->callback([&] { run = [&](Output& o) { return cmd_product(o, net, net2, marked, file); }; });

    auto* fp = app.add_subcommand("fibre-product", "fibre product of two discrete morphisms with a common target");
    fp->add_option("M1", net)->required();
    fp->add_option("M2", net2)->required();
    fp->add_option("--cone", cones, "two morphisms H1 H2 to factor through the fibre product")->expected(2);
    fp->callback([&] { run = [&](Output& o) { return cmd_fibre_product(o, net, net2, cones); }; });

    auto* dg = app.add_subcommand("diagonal", "diagonal of a net in its square");
    dg->add_option("NET", net)->required();
    dg->callback([&] { run = [&](Output& o) { return cmd_diagonal(o, net); }; });

    auto* sim = app.add_subcommand("simulate", "fire an occurrence sequence");
    sim->add_option("NET", net)->required();
    sim->add_option("--marking", marking, "e.g. 'p1.c=1, p2.c=1' (default: the initial marking)");
    sim->add_option("--sequence", sequence, "e.g. 't1 t3' or 'a.b1'")->required();
    sim->callback([&] { run = [&](Output& o) { return cmd_simulate(o, net, marking, sequence); }; });

    auto* re = app.add_subcommand("reach", "bounded reachable markings");
    re->add_option("NET", net)->required();
    re->add_option("--marking", marking, "initial marking (default: the one in the file)");
    re->add_option("--depth", ropts.depth, "maximal sequence length");
    re->add_option("--max-markings", ropts.max_markings, "bound on distinct markings");
    re->callback([&] { run = [&](Output& o) { return cmd_reach(o, net, marking, ropts); }; });

    auto* mb = app.add_subcommand("map-behaviour", "map a saturated sequence along a morphism and replay it");
    mb->add_option("MOR", mor)->required();
    mb->add_option("--marking", marking, "source marking (default: the one in the source file)");
    mb->add_option("--sequence", sequence, "source occurrence sequence")->required();
    mb->callback([&] { run = [&](Output& o) { return cmd_map_behaviour(o, mor, marking, sequence); }; });

    auto* wk = app.add_subcommand("winskel", "convert a Winskel morphism");
    wk->add_option("FILE", file)->required();
    wk->callback([&] { run = [&](Output& o) { return cmd_winskel(o, file); }; });

    for (const char* name : {"check-prop67", "product-reachability"}) {
        auto* pc = app.add_subcommand(name, "reachable markings of a product against pairs of factor markings");
        pc->add_option("N1", net)->required();
        pc->add_option("N2", net2)->required();
        pc->add_option("--markings", markings, "'M1;M2' (default: the initial markings)");
        pc->add_option("--depth", ropts.depth, "maximal sequence length in each net");
        pc->add_option("--max-markings", ropts.max_markings, "bound on distinct markings");
        pc->callback([&] { run = [&](Output& o) { return cmd_product_reach(o, net, net2, markings, ropts); }; });
    }

    // global flags may follow the subcommand
    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    Output out;
    int code = ok;
    try {
        code = run(out);
    } catch (const ResourceError& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        out.doc = {{"status", "inconclusive"}, {"error", e.what()}};
        code = inconclusive;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis not met: " << e.what() << "\n";
        out.doc = {{"status", "fail"}, {"error", e.what()}};
        code = failed;
    } catch (const BehaviourError& e) {
        std::cerr << "behaviour: " << e.what() << "\n";
        out.doc = {{"status", "fail"}, {"error", e.what()}};
        code = failed;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!g.json)
            return usage;
        out.doc = {{"status", "error"}, {"error", e.what()}};
        code = usage;
    }
    if (g.json) {
        out.doc["exit"] = code;
        std::cout << out.doc.dump(2) << "\n";
    } else {
        std::cout << out.text.str();
    }
    return code;
}
