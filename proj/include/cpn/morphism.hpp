#pragma once

#include "cpn/net.hpp"
#include "cpn/report.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cpn {

/// Flow map over one image transition a: a basis of the flows of the fibre
/// X_a (columns over the fibre's bindings) and the images of the basis
/// vectors in the bindings of a.
struct FlowMapData {
    RatMatrix basis;   // |bindings of X_a| x k
    RatMatrix images;  // |B(a)| x k
    std::vector<std::string> names;
};

/// Marking-class map over one image place u, as a matrix on the tokens of the
/// fibre X_u (it must vanish on the relations of that fibre).
struct MarkMapData {
    RatMatrix matrix; // |C(u)| x |tokens of X_u|
    /// Images as supplied, by global source token row; empty if given as a full matrix.
    std::vector<std::pair<Index, RatVector>> generators;
};

/// (f, f_F, f_M) between two coloured nets, given on the canonical basis:
/// one flow map per image transition and one class map per image place.
class NetMorphism {
public:
    NetMorphism() = default;
    NetMorphism(std::string name, ColouredNet source, ColouredNet target, std::vector<Index> node_map,
                Ring ring = Ring::Z);

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    const ColouredNet& source() const { return source_; }
    const ColouredNet& target() const { return target_; }
    const SpaceMap& map() const { return f_; }
    Ring ring() const { return ring_; }
    Index operator()(Index x) const { return f_(x); }

    NodeSet fibre(Index y) const { return f_.fibre(y); }
    /// Image transitions / places in declaration order.
    std::vector<Index> image_transitions() const;
    std::vector<Index> image_places() const;

    void set_flow_map(Index a, RatMatrix basis, RatMatrix images, std::vector<std::string> names = {});
    void set_mark_map(Index u, RatMatrix matrix);
    /// Class map from images of some token-elements of the fibre; the images of the
    /// remaining token-elements follow from the class relations. Throws if some
    /// token-element is not determined.
    void set_mark_generators(Index u, std::vector<std::pair<Index, RatVector>> generators);

    const std::map<Index, FlowMapData>& flow_maps() const { return flow_maps_; }
    const std::map<Index, MarkMapData>& mark_maps() const { return mark_maps_; }
    const FlowMapData& flow_map(Index a) const;
    const MarkMapData& mark_map(Index u) const;

    /// f_F on one image transition: image of a flow of X_a (given over the fibre's
    /// bindings); empty if the vector is not in the span of the flow basis.
    std::optional<RatVector> flow_image(Index a, const RatVector& flow) const;
    /// Induced map on a closed set A of the target: a flow of f^-1(A) (over its
    /// bindings) to a binding vector over A. Transitions of X in place fibres are dropped.
    std::optional<RatVector> flow_image_over(const NodeSet& closed, const RatVector& flow) const;

    /// Images of the tokens of places of the transition fibre X_a, as a matrix
    /// from those tokens into the tokens of the basic open set of a; representatives
    /// chosen so that every relation of f^-1(basic open of a) maps to a relation
    /// there. Empty if no such choice exists.
    std::optional<RatMatrix> transition_fibre_marks(Index a) const;
    /// Induced map on an open set V of the target: tokens of f^-1(V) to tokens of V.
    /// Throws if V is not open or a transition fibre admits no images.
    RatMatrix mark_matrix_over(const NodeSet& open) const;

    /// Turn integral rational data into the same morphism marked as integral
    /// (or just relabel the ring to Q).
    void set_ring(Ring r) { ring_ = r; }

private:
    std::string name_;
    ColouredNet source_;
    ColouredNet target_;
    SpaceMap f_;
    Ring ring_ = Ring::Z;
    std::map<Index, FlowMapData> flow_maps_;
    std::map<Index, MarkMapData> mark_maps_;
};

NetMorphism identity_morphism(const ColouredNet& net);

/// One commuting square over (a, u): target incidence times flow images
/// against the class map times the source incidence in class coordinates.
struct IncidenceSquare {
    Index transition = -1;
    Index place = -1;
    Arc which = Arc::Minus;
    RatMatrix target_incidence; // |C(u)| x |B(a)|
    RatMatrix flow_images;      // |B(a)| x k
    RatMatrix class_map;        // |C(u)| x (class coordinates of X_u)
    RatMatrix source_classes;   // (class coordinates) x k
    bool commutes = false;
    std::string equation() const;
};

struct MorphismReport {
    Report report;
    std::vector<IncidenceSquare> squares;
    bool passed() const { return report.passed(); }
    Status status() const { return report.status(); }
};

struct VerifyOptions {
    std::size_t hilbert_guard = 10000;
};

/// Checks continuity, flow bases, induced flow and class maps, signedness and
/// the two incidence diagrams, in that order, and stops at the first failed
/// clause. Undecided signedness is reported as inconclusive and does not stop.
MorphismReport verify_morphism(const NetMorphism& m, const VerifyOptions& opts = {});

struct Classification {
    bool abstraction = false;
    bool embedding = false;
    bool discrete = false;
    bool modification = false;
    bool place_modification = false;
    bool transition_modification = false;
    bool isomorphism = false;
    /// Set when a signedness question could not be decided within the guards.
    bool inconclusive = false;
    std::string note;
};

Classification classify(const NetMorphism& m, const VerifyOptions& opts = {});
std::string format_classification(const Classification& c);

/// g after f, through direct images.
NetMorphism compose(const NetMorphism& g, const NetMorphism& f);

/// Same node map and the same linear maps on flows and marking classes.
bool same_morphism(const NetMorphism& a, const NetMorphism& b);
/// The two halves of same_morphism: node maps plus flow maps, node maps plus class maps.
bool same_flow_maps(const NetMorphism& a, const NetMorphism& b);
bool same_class_maps(const NetMorphism& a, const NetMorphism& b);

/// True if the class of v (tokens of a region with relation lattice `relations`)
/// has a non-negative representative; nullopt if the bounded search is inconclusive.
std::optional<bool> has_nonnegative_representative(const QuotientModule& q, const IntVector& v,
                                                   std::size_t budget = 200000);

// --- Winskel morphisms -----------------------------------------------------------------

/// Multirelation on places plus partial function on transitions between two
/// place/transition nets (single binding and token per node).
struct WinskelMorphism {
    std::string name;
    ColouredNet source;
    ColouredNet target;
    /// beta: source place -> list of (target place, multiplicity)
    std::map<Index, std::vector<std::pair<Index, Integer>>> beta;
    /// eta: source transition -> target transition
    std::map<Index, Index> eta;
};

/// Pre/post multiset preservation for every transition in dom(eta).
Report check_winskel(const WinskelMorphism& w);

struct WinskelConversion {
    NodeSet domain;     // closed in the source
    NodeSet codomain;   // open in the target
    ColouredNet domain_net;
    ColouredNet quotient_net;
    NetMorphism pi;     // target -> quotient, a place-modification
    NetMorphism g;      // domain net -> quotient, discrete
    Report report;
};

WinskelConversion from_winskel(const WinskelMorphism& w, const VerifyOptions& opts = {});

} // namespace cpn
