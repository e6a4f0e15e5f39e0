#pragma once

#include "cpn/intlinalg.hpp"
#include "cpn/report.hpp"
#include "cpn/topology.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cpn {

enum class Arc { Minus, Plus, Difference };

struct NetOptions {
    /// Incidence support must coincide with adjacency.
    bool strict = true;
    /// Permit nets without places/transitions and nodes without colours
    /// (derived subnets such as inverse images may be degenerate).
    bool allow_empty = false;
};

/// Coloured net in sheaf-cosheaf form: a Petri space, colour bases per node
/// (binding-elements for transitions, token-elements for places) and the two
/// incidence matrices over the global token x binding bases.
class ColouredNet {
public:
    ColouredNet() = default;
    /// w_minus/w_plus are (total tokens) x (total bindings), indexed place-major
    /// (resp. transition-major) in declaration order.
    ColouredNet(std::string name, PetriSpace space, std::vector<std::vector<std::string>> colours,
                IntMatrix w_minus, IntMatrix w_plus, NetOptions options = {});

    const std::string& name() const { return name_; }
    const PetriSpace& space() const { return space_; }
    const NetOptions& options() const { return options_; }
    bool strict() const { return options_.strict; }

    /// Binding names of a transition or token names of a place.
    const std::vector<std::string>& colours(Index x) const;
    Index colour_count(Index x) const { return static_cast<Index>(colours(x).size()); }
    Index colour_index(Index x, const std::string& colour) const;
    /// Global row (place) or column (transition) of the first colour of x.
    Index offset(Index x) const;
    /// Global row of token c at place p, or column of binding b at transition t.
    Index global_index(Index x, Index colour) const { return offset(x) + colour; }

    Index token_count() const { return w_minus_.rows(); }
    Index binding_count() const { return w_minus_.cols(); }

    const IntMatrix& w_minus() const { return w_minus_; }
    const IntMatrix& w_plus() const { return w_plus_; }
    IntMatrix incidence() const { return w_plus_ - w_minus_; }
    const IntMatrix& matrix(Arc which) const;

    /// Global token rows of the places in s (declaration order), global binding
    /// columns of the transitions in s.
    std::vector<Index> token_indices(const NodeSet& s) const;
    std::vector<Index> binding_indices(const NodeSet& s) const;
    /// (node, colour) for a global token row / binding column.
    std::pair<Index, Index> token_at(Index row) const;
    std::pair<Index, Index> binding_at(Index col) const;
    std::string token_label(Index row) const;
    std::string binding_label(Index col) const;

    /// True if some weight between the colours of t and p is nonzero.
    bool has_arc(Index t, Index p) const;

    const std::optional<IntVector>& initial_marking() const { return initial_; }
    void set_initial_marking(IntVector m);

private:
    std::string name_;
    PetriSpace space_;
    std::vector<std::vector<std::string>> colours_;
    std::vector<Index> offsets_;
    IntMatrix w_minus_;
    IntMatrix w_plus_;
    NetOptions options_;
    std::optional<IntVector> initial_;
    std::vector<Index> token_owner_;
    std::vector<Index> binding_owner_;
};

/// Incremental construction by name. Node declaration order is kept.
class NetBuilder {
public:
    explicit NetBuilder(std::string name) : name_(std::move(name)) {}

    void add_transition(const std::string& name, std::vector<std::string> bindings);
    void add_place(const std::string& name, std::vector<std::string> tokens);
    bool has_node(const std::string& name) const { return nodes_.count(name) != 0; }
    bool is_transition(const std::string& name) const;
    bool has_colour(const std::string& node, const std::string& colour) const;
    void set_weight(Arc which, const std::string& t, const std::string& b, const std::string& p,
                    const std::string& c, const Integer& w);
    /// Explicit adjacency; when any is given for a relaxed net it replaces the
    /// support-derived adjacency.
    void add_adjacency(const std::string& p, const std::string& t);
    void set_marking(const std::string& p, const std::string& c, const Integer& n);

    ColouredNet build(NetOptions options = {}) const;

private:
    struct Node {
        Index order;
        Sort sort;
        std::vector<std::string> colours;
    };
    std::string name_;
    std::map<std::string, Node> nodes_;
    std::vector<std::string> order_;
    std::map<std::tuple<std::string, std::string, std::string, std::string>, Integer> minus_, plus_;
    std::vector<std::pair<std::string, std::string>> adjacency_;
    std::map<std::pair<std::string, std::string>, Integer> marking_;
};

/// Subnet on the nodes of s with the restricted incidence, and its inclusion.
/// Strictness is inherited; degenerate results are allowed.
std::pair<ColouredNet, SpaceMap> subnet(const ColouredNet& net, const NodeSet& s, const std::string& name);

// --- sections -------------------------------------------------------------------

enum class ColourKind { Binding, Token };

/// Ordered basis of the sections over a region: bindings of its transitions or
/// tokens of its places.
struct SectionSpace {
    NodeSet region;
    ColourKind kind = ColourKind::Token;
    Ring ring = Ring::Z;
    std::vector<Index> indices;                  // global rows/columns
    std::vector<std::pair<Index, Index>> basis;  // (node, colour)
    std::vector<std::string> labels;             // "node.colour"
    Index dim() const { return static_cast<Index>(indices.size()); }
};

SectionSpace sections_bindings(const ColouredNet& net, const NodeSet& closed, Ring ring = Ring::Z);
SectionSpace sections_tokens(const ColouredNet& net, const NodeSet& open, Ring ring = Ring::Z);

/// Matrix of w over tokens of the places of `rows` and bindings of the
/// transitions of `cols`; pairs without weight contribute 0.
IntMatrix incidence_matrix(const ColouredNet& net, const NodeSet& rows, const NodeSet& cols,
                           Arc which = Arc::Difference);

struct FlowModule {
    NodeSet region;
    std::vector<Index> columns; // global binding columns, the coordinates of flows
    Lattice lattice;
    Index rank() const { return lattice.rank(); }
    const IntMatrix& basis() const { return lattice.basis(); }
};

struct MarkingClassModule {
    NodeSet region;
    std::vector<Index> rows; // global token rows, the coordinates of representatives
    QuotientModule quotient;
};

/// Flows over a closed set: binding vectors satisfying the flow condition at
/// every place of the set.
FlowModule flows(const ColouredNet& net, const NodeSet& closed);
/// Marking classes over an open set: tokens modulo the incidence of its transitions.
MarkingClassModule marking_classes(const ColouredNet& net, const NodeSet& open);

/// Coordinate projection of a flow of `big` onto the bindings of `small`.
IntVector restrict_flow(const ColouredNet& net, const NodeSet& big, const NodeSet& small, const IntVector& flow);
/// Zero extension of a representative over `small` to `big`, as the canonical representative there.
IntVector extend_class(const ColouredNet& net, const NodeSet& small, const NodeSet& big, const IntVector& rep);
/// Image of a flow of A under w^{which}_{U,A}, as the canonical class representative in M(U).
IntVector flow_to_class(const ColouredNet& net, const NodeSet& closed, const NodeSet& open, Arc which,
                        const IntVector& flow);

/// Re-index a vector given on `from` global indices into `to` global indices
/// (entries of `to` missing from `from` become zero; extra entries must be zero).
IntVector transport(const std::vector<Index>& from, const IntVector& v, const std::vector<Index>& to);

// --- sheaf axioms ---------------------------------------------------------------

/// Coordinates of the sequence 0 -> S(U) -> prod S(U_i) -> prod S(U_j ∩ U_k)
/// for a sheaf whose sections are sublattices, or of the dual cosheaf sequence
/// sum S(U_j ∩ U_k) -> sum S(U_i) -> S(U) -> 0 for quotient-valued cosheaves.
struct SheafSequence {
    bool cosheaf = false;
    IntMatrix total;     // sheaf: lattice basis of S(U); cosheaf: relation basis of S(U)
    IntMatrix pieces;    // sheaf: lattice basis of prod S(U_i); cosheaf: relation basis of sum S(U_i)
    IntMatrix map;       // sheaf: restriction Z^n -> Z^m; cosheaf: extension Z^m -> Z^n
    IntMatrix overlaps;  // sheaf: differences Z^m -> Z^k; cosheaf: differences Z^k -> Z^m
};

/// Checks each arrow of the sequence; clause ids name the failing arrow
/// (".injective", ".surjective", ".complex", ".exact").
Report check_exactness(const SheafSequence& seq, const std::string& prefix);

enum class SheafKind { Tokens, Bindings, Flows, MarkingClasses };
const char* to_string(SheafKind k);

/// Sequence of the given sheaf or cosheaf over a covering of `region`. Tokens
/// and marking classes live on P-open sets, bindings and flows on P-closed sets.
SheafSequence sheaf_sequence(const ColouredNet& net, SheafKind kind, const NodeSet& region,
                             const std::vector<NodeSet>& covering);

/// Exactness of all four (co)sheaves over the covering, where each kind is
/// applicable (opens for tokens/marking classes, closeds for bindings/flows).
Report verify_sheaf_axioms(const ColouredNet& net, const NodeSet& region, const std::vector<NodeSet>& covering);

/// Every basic set covered by every family of canonical-basis members inside it
/// (in the matching topology), plus the whole space covered by the full basis.
Report verify_all_basic_coverings(const ColouredNet& net);

std::string format_section(const ColouredNet& net, const std::vector<Index>& indices, ColourKind kind,
                           const IntVector& v);
std::string format_section(const ColouredNet& net, const std::vector<Index>& indices, ColourKind kind,
                           const RatVector& v);

} // namespace cpn
