#include "cpn/io.hpp"

#include "cpn/error.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace cpn {

namespace {

struct Word {
    std::string text;
    std::size_t column = 0; // 1-based
};

struct Line {
    std::size_t number = 0;
    std::vector<Word> words;

    [[noreturn]] void fail(const std::string& what, std::size_t word = 0) const
    {
        const std::size_t col = word < words.size() ? words[word].column : 1;
        throw ParseError(what, number, col);
    }
    const std::string& at(std::size_t i) const
    {
        if (i >= words.size())
            throw ParseError("unexpected end of line", number,
                             words.empty() ? 1 : words.back().column + words.back().text.size());
        return words[i].text;
    }
    void expect(std::size_t i, const std::string& s) const
    {
        if (at(i) != s)
            fail("expected '" + s + "', found '" + words[i].text + "'", i);
    }
    void expect_size(std::size_t n) const
    {
        if (words.size() != n)
            fail(words.size() < n ? "too few fields" : "unexpected '" + words[n].text + "'",
                 words.size() < n ? words.size() : n);
    }
};

std::vector<Line> split_lines(const std::string& text)
{
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            if (std::isspace(static_cast<unsigned char>(raw[i]))) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j])))
                ++j;
            line.words.push_back({raw.substr(i, j - i), i + 1});
            i = j;
        }
        if (!line.words.empty())
            out.push_back(std::move(line));
    }
    return out;
}

bool is_digits(const std::string& s, std::size_t from = 0)
{
    if (from >= s.size())
        return false;
    for (std::size_t i = from; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return false;
    return true;
}

std::optional<Rational> parse_rational(const std::string& s)
{
    std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (!is_digits(s, start))
            return std::nullopt;
        return Rational(Integer(s));
    }
    const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_digits(num, start) || !is_digits(den) || Integer(den) == 0)
        return std::nullopt;
    return Rational(Integer(num), Integer(den));
}

Integer parse_count(const Line& line, std::size_t i)
{
    const std::string& s = line.at(i);
    if (!is_digits(s))
        line.fail("expected a non-negative integer, found '" + s + "'", i);
    return Integer(s);
}

std::pair<std::string, std::string> split_dot(const Line& line, std::size_t i)
{
    const std::string& s = line.at(i);
    const auto dot = s.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
        line.fail("expected NODE.COLOUR, found '" + s + "'", i);
    return {s.substr(0, dot), s.substr(dot + 1)};
}

struct Term {
    Rational coefficient;
    std::string ref;
    std::size_t word;
};

// Linear combination in words [from, end): "k*X + k*Y - Z", or a lone "0".
std::vector<Term> parse_terms(const Line& line, std::size_t from)
{
    std::vector<Term> out;
    if (from >= line.words.size())
        line.fail("expected a linear combination", from);
    if (line.words.size() == from + 1 && line.words[from].text == "0")
        return out;
    bool expect_term = true;
    Rational sign = 1;
    for (std::size_t i = from; i < line.words.size(); ++i) {
        const std::string& w = line.words[i].text;
        if (!expect_term) {
            if (w != "+" && w != "-")
                line.fail("expected '+' or '-', found '" + w + "'", i);
            sign = w == "-" ? -1 : 1;
            expect_term = true;
            continue;
        }
        Rational k = 1;
        std::string ref = w;
        if (auto star = w.find('*'); star != std::string::npos) {
            if (auto c = parse_rational(w.substr(0, star))) {
                k = *c;
                ref = w.substr(star + 1);
            }
        }
        if (ref.empty())
            line.fail("missing identifier after coefficient", i);
        out.push_back({sign * k, ref, i});
        expect_term = false;
        sign = 1;
    }
    if (expect_term)
        line.fail("dangling operator", line.words.size() - 1);
    return out;
}

std::string format_terms(const std::vector<std::pair<Rational, std::string>>& terms)
{
    std::string s;
    for (const auto& [k, ref] : terms) {
        if (k == 0)
            continue;
        if (s.empty())
            s = k.str() + "*" + ref;
        else if (k < 0)
            s += " - " + Rational(-k).str() + "*" + ref;
        else
            s += " + " + k.str() + "*" + ref;
    }
    return s.empty() ? "0" : s;
}

Index find_node(const Line& line, const PetriSpace& space, const std::string& name, std::size_t word,
                const std::string& what)
{
    if (!space.has_node(name))
        line.fail("undeclared " + what + " '" + name + "'", word);
    return space.index_of(name);
}

Index find_colour(const Line& line, const ColouredNet& net, Index x, const std::string& c, std::size_t word)
{
    const auto& cs = net.colours(x);
    auto it = std::find(cs.begin(), cs.end(), c);
    if (it == cs.end())
        line.fail("undeclared colour '" + c + "' of '" + net.space().name(x) + "'", word);
    return static_cast<Index>(it - cs.begin());
}

// Header `KEYWORD NAME` on the first line.
std::string header(const std::vector<Line>& lines, const std::string& keyword)
{
    if (lines.empty() || lines.front().words.front().text != keyword)
        throw ParseError("missing " + keyword + " header", lines.empty() ? 1 : lines.front().number, 1);
    lines.front().expect_size(2);
    return lines.front().words[1].text;
}

// `source FILE` / `target FILE` lines shared by morphism and winskel files.
struct Frame {
    std::optional<ColouredNet> source, target;
};

bool read_frame_line(const Line& line, Frame& frame, const NetLoader& load)
{
    const std::string& key = line.at(0);
    if (key != "source" && key != "target")
        return false;
    line.expect_size(2);
    auto& slot = key == "source" ? frame.source : frame.target;
    if (slot)
        line.fail("duplicate declaration of the " + key + " net", 0);
    try {
        slot = load(line.words[1].text);
    } catch (const Error& e) {
        line.fail(std::string("cannot load net: ") + e.what(), 1);
    }
    return true;
}

void require_frame(const Line& line, const Frame& frame)
{
    if (!frame.source || !frame.target)
        line.fail("source and target must be declared first", 0);
}

} // namespace

// --- nets -------------------------------------------------------------------------

ColouredNet parse_net(const std::string& text, const ReadOptions& opts)
{
    const auto lines = split_lines(text);
    NetBuilder b(header(lines, "net"));
    NetOptions options;
    bool mode_seen = false;
    std::set<std::tuple<std::string, std::string, std::string, std::string, std::string>> arcs;
    std::set<std::pair<std::string, std::string>> marked;

    auto node_colour = [&](const Line& line, std::size_t i, bool transition) {
        auto [node, colour] = split_dot(line, i);
        if (!b.has_node(node))
            line.fail("undeclared " + std::string(transition ? "transition" : "place") + " '" + node + "'", i);
        if (b.is_transition(node) != transition)
            line.fail("'" + node + "' is not a " + (transition ? "transition" : "place"), i);
        if (!b.has_colour(node, colour))
            line.fail("undeclared colour '" + colour + "' of '" + node + "'", i);
        return std::pair{node, colour};
    };

    for (std::size_t k = 1; k < lines.size(); ++k) {
        const Line& line = lines[k];
        const std::string& key = line.at(0);
        if (key == "mode") {
            if (line.words.size() < 2 || line.words.size() > 3)
                line.expect_size(2);
            if (mode_seen)
                line.fail("duplicate mode declaration", 0);
            if (line.words[1].text != "strict" && line.words[1].text != "relaxed")
                line.fail("mode is 'strict' or 'relaxed'", 1);
            options.strict = line.words[1].text == "strict";
            if (line.words.size() == 3) {
                line.expect(2, "empty");
                options.allow_empty = true;
            }
            mode_seen = true;
        } else if (key == "transition" || key == "place") {
            const bool transition = key == "transition";
            line.expect(2, transition ? "bindings" : "tokens");
            const std::string& name = line.words[1].text;
            if (b.has_node(name))
                line.fail("duplicate declaration of '" + name + "'", 1);
            if (name.find('.') != std::string::npos)
                line.fail("node names may not contain '.'", 1);
            std::vector<std::string> colours;
            for (std::size_t i = 3; i < line.words.size(); ++i) {
                const std::string& c = line.words[i].text;
                if (std::find(colours.begin(), colours.end(), c) != colours.end())
                    line.fail("duplicate declaration of colour '" + c + "'", i);
                colours.push_back(c);
            }
            if (transition)
                b.add_transition(name, std::move(colours));
            else
                b.add_place(name, std::move(colours));
        } else if (key == "adjacent") {
            line.expect_size(3);
            const std::string &p = line.words[1].text, &t = line.words[2].text;
            if (!b.has_node(p) || b.is_transition(p))
                line.fail(b.has_node(p) ? "'" + p + "' is not a place" : "undeclared place '" + p + "'", 1);
            if (!b.has_node(t) || !b.is_transition(t))
                line.fail(b.has_node(t) ? "'" + t + "' is not a transition" : "undeclared transition '" + t + "'", 2);
            b.add_adjacency(p, t);
        } else if (key == "arc") {
            line.expect_size(5);
            const std::string& dir = line.words[1].text;
            if (dir != "-" && dir != "+")
                line.fail("arc direction is '-' or '+'", 1);
            auto [t, bb] = node_colour(line, 2, true);
            auto [p, c] = node_colour(line, 3, false);
            const Integer w = parse_count(line, 4);
            if (!arcs.emplace(dir, t, bb, p, c).second)
                line.fail("duplicate declaration of arc " + dir + " " + t + "." + bb + " " + p + "." + c, 1);
            b.set_weight(dir == "-" ? Arc::Minus : Arc::Plus, t, bb, p, c, w);
        } else if (key == "marking") {
            line.expect_size(3);
            auto [p, c] = node_colour(line, 1, false);
            if (!marked.emplace(p, c).second)
                line.fail("duplicate marking of " + p + "." + c, 1);
            b.set_marking(p, c, parse_count(line, 2));
        } else if (key == "net") {
            line.fail("second net header", 0);
        } else {
            line.fail("unknown statement '" + key + "'", 0);
        }
    }
    if (opts.strict)
        options.strict = *opts.strict;
    try {
        return b.build(options);
    } catch (const Error& e) {
        throw ParseError(e.what(), lines.front().number, 1);
    }
}

std::string serialize_net(const ColouredNet& net, const std::vector<std::string>& comments)
{
    std::ostringstream out;
    for (const auto& c : comments)
        out << "# " << c << "\n";
    const PetriSpace& s = net.space();
    out << "net " << net.name() << "\n";
    out << "mode " << (net.strict() ? "strict" : "relaxed") << (net.options().allow_empty ? " empty" : "") << "\n";
    for (Index x = 0; x < s.size(); ++x) {
        out << (s.is_transition(x) ? "transition " : "place ") << s.name(x)
            << (s.is_transition(x) ? " bindings" : " tokens");
        for (const auto& c : net.colours(x))
            out << " " << c;
        out << "\n";
    }
    if (!net.strict())
        for (const auto& [p, t] : s.adjacency_pairs())
            out << "adjacent " << s.name(p) << " " << s.name(t) << "\n";
    for (Index col = 0; col < net.binding_count(); ++col)
        for (Index row = 0; row < net.token_count(); ++row)
            for (Arc a : {Arc::Minus, Arc::Plus}) {
                const Integer& w = net.matrix(a)(row, col);
                if (w != 0)
                    out << "arc " << (a == Arc::Minus ? "-" : "+") << " " << net.binding_label(col) << " "
                        << net.token_label(row) << " " << w.str() << "\n";
            }
    if (const auto& m = net.initial_marking())
        for (Index row = 0; row < m->size(); ++row)
            if ((*m)(row) != 0)
                out << "marking " << net.token_label(row) << " " << (*m)(row).str() << "\n";
    return out.str();
}

bool same_net_data(const ColouredNet& a, const ColouredNet& b)
{
    const PetriSpace &sa = a.space(), &sb = b.space();
    if (a.name() != b.name() || a.strict() != b.strict() || sa.size() != sb.size())
        return false;
    for (Index x = 0; x < sa.size(); ++x)
        if (sa.name(x) != sb.name(x) || sa.sort(x) != sb.sort(x) || a.colours(x) != b.colours(x))
            return false;
    if (sa.adjacency_pairs() != sb.adjacency_pairs())
        return false;
    if (a.w_minus() != b.w_minus() || a.w_plus() != b.w_plus())
        return false;
    const auto &ma = a.initial_marking(), &mb = b.initial_marking();
    auto zero = [](const std::optional<IntVector>& m) { return !m || is_zero(*m); };
    if (zero(ma) || zero(mb))
        return zero(ma) && zero(mb);
    return *ma == *mb;
}

// --- morphisms --------------------------------------------------------------------

NetMorphism parse_morphism(const std::string& text, const NetLoader& load)
{
    const auto lines = split_lines(text);
    const std::string name = header(lines, "morphism");
    Frame frame;
    Ring ring = Ring::Z;
    bool ring_seen = false;
    std::map<Index, Index> node_map;

    struct Basis {
        std::size_t line;
        std::vector<std::string> names;
        std::vector<RatVector> vectors;
        std::map<std::string, RatVector> images;
    };
    std::map<Index, Basis> bases;
    struct Generators {
        std::size_t line;
        std::vector<std::pair<Index, RatVector>> images;
    };
    std::map<Index, Generators> marks;

    // "A:" with the colon attached
    auto target_node = [&](const Line& line, Sort sort) {
        std::string a = line.at(1);
        if (a.size() < 2 || a.back() != ':')
            line.fail("expected 'NODE:'", 1);
        a.pop_back();
        const Index y = find_node(line, frame.target->space(), a, 1, "target node");
        if (frame.target->space().sort(y) != sort)
            line.fail("'" + a + "' is not a " + to_string(sort) + " of the target", 1);
        return y;
    };
    auto fibre_of = [&](Index y) {
        std::vector<Index> members;
        for (const auto& [x, fx] : node_map)
            if (fx == y)
                members.push_back(x);
        return NodeSet(frame.source->space(), members);
    };

    for (std::size_t k = 1; k < lines.size(); ++k) {
        const Line& line = lines[k];
        const std::string& key = line.at(0);
        if (read_frame_line(line, frame, load))
            continue;
        if (key == "ring") {
            line.expect_size(2);
            if (ring_seen)
                line.fail("duplicate ring declaration", 0);
            const std::string& r = line.words[1].text;
            if (r != "z" && r != "q")
                line.fail("ring is 'z' or 'q'", 1);
            ring = r == "z" ? Ring::Z : Ring::Q;
            ring_seen = true;
            continue;
        }
        require_frame(line, frame);
        const PetriSpace &SX = frame.source->space(), &SY = frame.target->space();
        if (key == "node") {
            line.expect_size(4);
            line.expect(2, "->");
            const Index x = find_node(line, SX, line.words[1].text, 1, "source node");
            const Index y = find_node(line, SY, line.words[3].text, 3, "target node");
            if (!node_map.emplace(x, y).second)
                line.fail("duplicate declaration of the image of '" + SX.name(x) + "'", 1);
        } else if (key == "flowbasis") {
            const Index a = target_node(line, Sort::Transition);
            line.expect(3, "=");
            const std::string& fname = line.at(2);
            const auto cols = frame.source->binding_indices(fibre_of(a));
            auto& basis = bases.try_emplace(a, Basis{line.number, {}, {}, {}}).first->second;
            if (std::find(basis.names.begin(), basis.names.end(), fname) != basis.names.end())
                line.fail("duplicate declaration of flow '" + fname + "'", 2);
            RatVector v = RatVector::Zero(static_cast<Index>(cols.size()));
            for (const auto& term : parse_terms(line, 4)) {
                const auto dot = term.ref.rfind('.');
                if (dot == std::string::npos)
                    line.fail("expected T.B, found '" + term.ref + "'", term.word);
                const Index t = find_node(line, SX, term.ref.substr(0, dot), term.word, "source node");
                if (!SX.is_transition(t) || !node_map.count(t) || node_map.at(t) != a)
                    line.fail("'" + SX.name(t) + "' is not a transition over '" + SY.name(a) + "'", term.word);
                const Index col =
                    frame.source->global_index(t, find_colour(line, *frame.source, t, term.ref.substr(dot + 1),
                                                              term.word));
                v(static_cast<Index>(std::find(cols.begin(), cols.end(), col) - cols.begin())) += term.coefficient;
            }
            basis.names.push_back(fname);
            basis.vectors.push_back(std::move(v));
        } else if (key == "flowmap") {
            const Index a = target_node(line, Sort::Transition);
            line.expect(3, "->");
            const std::string& fname = line.at(2);
            auto it = bases.find(a);
            if (it == bases.end()
                || std::find(it->second.names.begin(), it->second.names.end(), fname) == it->second.names.end())
                line.fail("undeclared flow '" + fname + "' over '" + SY.name(a) + "'", 2);
            if (it->second.images.count(fname))
                line.fail("duplicate declaration of the image of '" + fname + "'", 2);
            RatVector v = RatVector::Zero(frame.target->colour_count(a));
            for (const auto& term : parse_terms(line, 4))
                v(find_colour(line, *frame.target, a, term.ref, term.word)) += term.coefficient;
            it->second.images.emplace(fname, std::move(v));
        } else if (key == "markmap") {
            const Index u = target_node(line, Sort::Place);
            line.expect(3, "->");
            auto [xn, c] = split_dot(line, 2);
            const Index x = find_node(line, SX, xn, 2, "source node");
            if (!SX.is_place(x) || !node_map.count(x) || node_map.at(x) != u)
                line.fail("'" + xn + "' is not a place over '" + SY.name(u) + "'", 2);
            const Index row = frame.source->global_index(x, find_colour(line, *frame.source, x, c, 2));
            auto& gens = marks.try_emplace(u, Generators{line.number, {}}).first->second;
            for (const auto& [r, img] : gens.images)
                if (r == row)
                    line.fail("duplicate declaration of the image of '" + xn + "." + c + "'", 2);
            RatVector v = RatVector::Zero(frame.target->colour_count(u));
            for (const auto& term : parse_terms(line, 4))
                v(find_colour(line, *frame.target, u, term.ref, term.word)) += term.coefficient;
            gens.images.emplace_back(row, std::move(v));
        } else {
            line.fail("unknown statement '" + key + "'", 0);
        }
    }
    if (!frame.source || !frame.target)
        throw ParseError("source and target nets must be declared", lines.front().number, 1);

    const PetriSpace& SX = frame.source->space();
    std::vector<Index> f(static_cast<std::size_t>(SX.size()));
    for (Index x = 0; x < SX.size(); ++x) {
        auto it = node_map.find(x);
        if (it == node_map.end())
            throw ParseError("no image given for source node '" + SX.name(x) + "'", lines.back().number, 1);
        f[static_cast<std::size_t>(x)] = it->second;
    }
    auto build_error = [](std::size_t line, const Error& e) { return ParseError(e.what(), line, 1); };
    std::optional<NetMorphism> m;
    try {
        m.emplace(name, *frame.source, *frame.target, std::move(f), ring);
    } catch (const Error& e) {
        throw build_error(lines.front().number, e);
    }
    for (Index a : m->image_transitions()) {
        const Index rows = static_cast<Index>(m->source().binding_indices(m->fibre(a)).size());
        auto it = bases.find(a);
        if (it == bases.end()) {
            m->set_flow_map(a, RatMatrix(rows, 0), RatMatrix(m->target().colour_count(a), 0));
            continue;
        }
        const Basis& basis = it->second;
        const auto k = static_cast<Index>(basis.vectors.size());
        RatMatrix B(rows, k), I(m->target().colour_count(a), k);
        for (Index j = 0; j < k; ++j) {
            const std::string& n = basis.names[static_cast<std::size_t>(j)];
            auto img = basis.images.find(n);
            if (img == basis.images.end())
                throw ParseError("no image given for flow '" + n + "'", basis.line, 1);
            B.col(j) = basis.vectors[static_cast<std::size_t>(j)];
            I.col(j) = img->second;
        }
        try {
            m->set_flow_map(a, std::move(B), std::move(I), basis.names);
        } catch (const Error& e) {
            throw build_error(basis.line, e);
        }
    }
    for (auto& [u, gens] : marks) {
        const auto rows = m->source().token_indices(m->fibre(u));
        try {
            if (gens.images.size() == rows.size()) {
                RatMatrix M(m->target().colour_count(u), static_cast<Index>(rows.size()));
                for (const auto& [row, img] : gens.images)
                    M.col(static_cast<Index>(std::find(rows.begin(), rows.end(), row) - rows.begin())) = img;
                m->set_mark_map(u, std::move(M));
            } else {
                m->set_mark_generators(u, gens.images);
            }
        } catch (const Error& e) {
            throw build_error(gens.line, e);
        }
    }
    return *m;
}

std::string serialize_morphism(const NetMorphism& m, const std::string& source_ref, const std::string& target_ref)
{
    std::ostringstream out;
    const ColouredNet &X = m.source(), &Y = m.target();
    out << "morphism " << m.name() << "\n";
    out << "source " << source_ref << "\n";
    out << "target " << target_ref << "\n";
    out << "ring " << to_string(m.ring()) << "\n";
    for (Index x = 0; x < X.space().size(); ++x)
        out << "node " << X.space().name(x) << " -> " << Y.space().name(m(x)) << "\n";
    for (const auto& [a, fm] : m.flow_maps()) {
        const auto cols = X.binding_indices(m.fibre(a));
        const std::string an = Y.space().name(a);
        for (Index j = 0; j < fm.basis.cols(); ++j) {
            const std::string name = fm.names.empty() ? "f" + std::to_string(j + 1)
                                                      : fm.names[static_cast<std::size_t>(j)];
            std::vector<std::pair<Rational, std::string>> terms;
            for (std::size_t i = 0; i < cols.size(); ++i)
                terms.emplace_back(fm.basis(static_cast<Index>(i), j), X.binding_label(cols[i]));
            out << "flowbasis " << an << ": " << name << " = " << format_terms(terms) << "\n";
            terms.clear();
            for (Index b = 0; b < fm.images.rows(); ++b)
                terms.emplace_back(fm.images(b, j), Y.colours(a)[static_cast<std::size_t>(b)]);
            out << "flowmap " << an << ": " << name << " -> " << format_terms(terms) << "\n";
        }
    }
    for (const auto& [u, mm] : m.mark_maps()) {
        const std::string un = Y.space().name(u);
        auto line = [&](Index row, const RatVector& img) {
            std::vector<std::pair<Rational, std::string>> terms;
            for (Index c = 0; c < img.size(); ++c)
                terms.emplace_back(img(c), Y.colours(u)[static_cast<std::size_t>(c)]);
            out << "markmap " << un << ": " << X.token_label(row) << " -> " << format_terms(terms) << "\n";
        };
        if (!mm.generators.empty()) {
            for (const auto& [row, img] : mm.generators)
                line(row, img);
        } else {
            const auto rows = X.token_indices(m.fibre(u));
            for (std::size_t i = 0; i < rows.size(); ++i)
                line(rows[i], mm.matrix.col(static_cast<Index>(i)));
        }
    }
    return out.str();
}

// --- Winskel morphisms ------------------------------------------------------------

WinskelMorphism parse_winskel(const std::string& text, const NetLoader& load)
{
    const auto lines = split_lines(text);
    WinskelMorphism w;
    w.name = header(lines, "winskel");
    Frame frame;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const Line& line = lines[k];
        if (read_frame_line(line, frame, load))
            continue;
        require_frame(line, frame);
        const PetriSpace &SX = frame.source->space(), &SY = frame.target->space();
        const std::string& key = line.at(0);
        if (key == "beta") {
            line.expect(2, "->");
            const Index p = find_node(line, SX, line.at(1), 1, "source place");
            if (!SX.is_place(p))
                line.fail("'" + SX.name(p) + "' is not a place", 1);
            if (w.beta.count(p))
                line.fail("duplicate declaration of beta(" + SX.name(p) + ")", 1);
            std::map<Index, Integer> image;
            for (const auto& term : parse_terms(line, 3)) {
                const Index q = find_node(line, SY, term.ref, term.word, "target place");
                if (!SY.is_place(q))
                    line.fail("'" + term.ref + "' is not a place", term.word);
                if (!is_integral(term.coefficient) || term.coefficient < 0)
                    line.fail("multiplicities are non-negative integers", term.word);
                image[q] += numerator(term.coefficient);
            }
            auto& out = w.beta[p];
            for (const auto& [q, n] : image)
                if (n != 0)
                    out.emplace_back(q, n);
        } else if (key == "eta") {
            line.expect_size(4);
            line.expect(2, "->");
            const Index t = find_node(line, SX, line.words[1].text, 1, "source transition");
            const Index u = find_node(line, SY, line.words[3].text, 3, "target transition");
            if (!SX.is_transition(t))
                line.fail("'" + SX.name(t) + "' is not a transition", 1);
            if (!SY.is_transition(u))
                line.fail("'" + SY.name(u) + "' is not a transition", 3);
            if (!w.eta.emplace(t, u).second)
                line.fail("duplicate declaration of eta(" + SX.name(t) + ")", 1);
        } else {
            line.fail("unknown statement '" + key + "'", 0);
        }
    }
    if (!frame.source || !frame.target)
        throw ParseError("source and target nets must be declared", lines.front().number, 1);
    w.source = *frame.source;
    w.target = *frame.target;
    return w;
}

std::string serialize_winskel(const WinskelMorphism& w, const std::string& source_ref, const std::string& target_ref)
{
    std::ostringstream out;
    out << "winskel " << w.name << "\n";
    out << "source " << source_ref << "\n";
    out << "target " << target_ref << "\n";
    for (const auto& [p, image] : w.beta) {
        std::vector<std::pair<Rational, std::string>> terms;
        for (const auto& [q, n] : image)
            terms.emplace_back(Rational(n), w.target.space().name(q));
        out << "beta " << w.source.space().name(p) << " -> " << format_terms(terms) << "\n";
    }
    for (const auto& [t, u] : w.eta)
        out << "eta " << w.source.space().name(t) << " -> " << w.target.space().name(u) << "\n";
    return out.str();
}

// --- files ------------------------------------------------------------------------

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw StructuralError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw StructuralError("cannot write '" + path + "'");
}

ColouredNet read_net(const std::string& path, const ReadOptions& opts)
{
    const std::string text = read_file(path);
    try {
        return parse_net(text, opts);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.reason(), e.line(), e.column());
    }
}

namespace {

NetLoader relative_loader(const std::string& path, const ReadOptions& opts)
{
    const auto dir = std::filesystem::path(path).parent_path();
    auto cache = std::make_shared<std::map<std::string, ColouredNet>>();
    return [dir, opts, cache](const std::string& ref) {
        const std::string full = (dir / ref).lexically_normal().string();
        auto it = cache->find(full);
        if (it == cache->end())
            it = cache->emplace(full, read_net(full, opts)).first;
        return it->second;
    };
}

} // namespace

NetMorphism read_morphism(const std::string& path, const ReadOptions& opts)
{
    const std::string text = read_file(path);
    try {
        return parse_morphism(text, relative_loader(path, opts));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.reason(), e.line(), e.column());
    }
}

WinskelMorphism read_winskel(const std::string& path, const ReadOptions& opts)
{
    const std::string text = read_file(path);
    try {
        return parse_winskel(text, relative_loader(path, opts));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.reason(), e.line(), e.column());
    }
}

} // namespace cpn
