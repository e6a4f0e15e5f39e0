#pragma once

#include "cpn/morphism.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cpn {

/// Markings are non-negative vectors over the global token rows of a net.
using Marking = IntVector;

struct Event {
    Index transition = -1;
    Index binding = 0; // colour index within the transition
    friend bool operator==(const Event& a, const Event& b)
    {
        return a.transition == b.transition && a.binding == b.binding;
    }
};

using OccurrenceSequence = std::vector<Event>;

/// Several binding-elements of one transition fired at once.
struct Step {
    Index transition = -1;
    IntVector combination; // over the bindings of the transition, non-negative
};

std::string format_marking(const ColouredNet& net, const Marking& m);
std::string format_sequence(const ColouredNet& net, const OccurrenceSequence& s);
std::string format_step(const ColouredNet& net, const Step& s);

bool enabled(const ColouredNet& net, const Marking& m, Index t, Index b);
Marking fire(const ColouredNet& net, const Marking& m, Index t, Index b);
bool enabled_combination(const ColouredNet& net, const Marking& m, Index t, const IntVector& combination);
Marking fire_combination(const ColouredNet& net, const Marking& m, Index t, const IntVector& combination);
/// Fires the events in order; throws BehaviourError at the first disabled one.
Marking fire_sequence(const ColouredNet& net, const Marking& m, const OccurrenceSequence& s);
bool activated(const ColouredNet& net, const Marking& m, const OccurrenceSequence& s);
/// Parikh vector over all binding columns of the net.
IntVector parikh(const ColouredNet& net, const OccurrenceSequence& s);

/// Run of consecutive events over one fibre of the morphism.
struct Run {
    bool over_transition = true;
    Index target = -1;           // image transition a_i or image place u_i
    OccurrenceSequence events;
    IntVector parikh;            // over the bindings of the fibre
};

struct Saturation {
    bool saturated = true;
    std::vector<Run> runs;
    Index failed_run = -1;
    std::string reason;
};

/// Cuts the sequence into runs over single fibres. Runs over a transition fibre
/// are cut as soon as their Parikh vector is a flow of the fibre, so each of
/// them is as short as possible; the sequence is saturated iff no transition
/// run is left over.
Saturation saturate(const NetMorphism& m, const OccurrenceSequence& s);

/// Image steps of the transition runs; runs inside place fibres map to nothing.
std::vector<Step> map_sequence(const NetMorphism& m, const Saturation& sat);

/// Image marking: the class of the marking in the source, sent through the
/// induced map on all places of the target (places in transition fibres included).
RatVector map_marking(const NetMorphism& m, const Marking& marking);
/// As above, required integral and non-negative.
Marking map_marking_integral(const NetMorphism& m, const Marking& marking);

/// Fires s from m0, fires the image steps from the mapped marking, and compares
/// the markings at every run boundary. The image of the node map must be open.
Report check_behaviour_mapping(const NetMorphism& m, const Marking& m0, const OccurrenceSequence& s);

/// Initial markings correspond and each witness maps to an activated sequence.
Report verify_petri_morphism(const NetMorphism& m, const Marking& mx, const Marking& my,
                             const std::vector<OccurrenceSequence>& witnesses);

/// Calls f on every sequence of length <= max_length activated at m0 (the empty one included).
void for_each_activated_sequence(const ColouredNet& net, const Marking& m0, std::size_t max_length,
                                 const std::function<void(const OccurrenceSequence&)>& f);

struct ReachEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    Event event; // binding -1 for a combined step
    std::optional<IntVector> combination;
};

struct ReachGraph {
    std::vector<Marking> markings; // sorted lexicographically
    std::vector<ReachEdge> edges;  // between explored markings
    std::size_t initial = 0;
    bool truncated = false;
    std::string truncation; // which bound was hit
    std::optional<std::size_t> index_of(const Marking& m) const;
};

struct ReachOptions {
    std::size_t depth = 10000;
    std::size_t max_markings = 1000000;
};

/// Breadth-first exploration from m0. Markings at the depth bound are kept but
/// not expanded; the result is flagged truncated if that hides a new marking.
ReachGraph reachable(const ColouredNet& net, const Marking& m0, const ReachOptions& opts = {});
/// Same exploration with a fixed list of steps as the moves; edges keep the step order.
ReachGraph reachable_steps(const ColouredNet& net, const Marking& m0, const std::vector<Step>& steps,
                           const ReachOptions& opts = {});

/// Bijection between the bounded reachable sets of source and target that
/// commutes with firing. When my is given it must be the image of mx.
Report check_modification_invariance(const NetMorphism& m, const Marking& mx, const std::optional<Marking>& my = {},
                                     const ReachOptions& opts = {});

/// Parses "p.c=2, q.d=1" (missing token-elements are zero).
Marking parse_marking(const ColouredNet& net, const std::string& text);
/// Parses "t1 t3 a.b1" (a bare transition name fires its only binding).
OccurrenceSequence parse_sequence(const ColouredNet& net, const std::string& text);

} // namespace cpn
