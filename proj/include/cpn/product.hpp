#pragma once

#include "cpn/behaviour.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cpn {

/// Kronecker product N1 * N2 on the sort-respecting node pairs. Colours of a
/// pair are those of the first factor ("1:c") followed by those of the second
/// ("2:c"); the incidence is block diagonal for every place/transition pair,
/// so the net is built relaxed (its support exceeds the subspace adjacency).
struct ProductNet {
    ColouredNet net;
    ColouredNet first;
    ColouredNet second;
    std::vector<std::pair<Index, Index>> pairs;        // product node -> (x1, x2)
    std::vector<std::pair<int, Index>> token_origin;   // product token row -> (factor, factor row)
    std::vector<std::pair<int, Index>> binding_origin; // product binding column -> (factor, factor column)

    /// Product node of (x1, x2); -1 if the sorts differ.
    Index node(Index x1, Index x2) const;
    const ColouredNet& factor(int i) const;
};

ProductNet kronecker(const ColouredNet& n1, const ColouredNet& n2);

/// Trace morphism onto factor i (1 or 2), over Q: flows are summed over the
/// fibre, token-elements are divided by the place count of the other factor.
NetMorphism projection(const ProductNet& pn, int i);

/// Trace of a binding vector of the product (all columns) in factor i.
IntVector trace_flow(const ProductNet& pn, int i, const IntVector& bindings);
/// Trace of a product marking in factor i.
RatVector trace_marking(const ProductNet& pn, int i, const Marking& m);

Marking product_marking(const ProductNet& pn, const Marking& m1, const Marking& m2);
/// m equals the product of its two traces.
bool is_saturated_marking(const ProductNet& pn, const Marking& m);

/// The morphism N_Y -> N1 * N2 induced by two discrete morphisms into the
/// factors: y -> (f1(y), f2(y)), flows and token-elements mapped componentwise.
NetMorphism mediate(const ProductNet& pn, const NetMorphism& f1, const NetMorphism& f2);

/// g1 * g2 : X1 * X2 -> Y1 * Y2 for discrete g1, g2. Token-elements of the
/// first factor are divided by the size of the place fibre of the second
/// factor (and vice versa) so that the incidence diagrams commute.
NetMorphism product_morphism(const NetMorphism& g1, const NetMorphism& g2, const ProductNet& source,
                             const ProductNet& target);

struct Diagonal {
    ProductNet square;      // N * N
    ColouredNet net;        // the diagonal subnet
    NetMorphism embedding;  // diagonal -> N * N
    NetMorphism delta;      // N -> diagonal
    NetMorphism delta_inverse;
    Report report;
};

Diagonal diagonal(const ColouredNet& n);

/// The unique k with j o k = g for an embedding j, if g factors through it.
std::optional<NetMorphism> lift_through(const NetMorphism& j, const NetMorphism& g);

struct InverseImage {
    ColouredNet net;
    NetMorphism inclusion;   // into the source of f
    NetMorphism restriction; // into the source of the subnet embedding
    Report report;
};

/// Inverse image of a subnet (given by its embedding into the target of f)
/// under a discrete morphism f. Colours are the lattices of source colours
/// whose images lie in the subnet, with a non-negative basis when one exists.
InverseImage inverse_image(const NetMorphism& f, const NetMorphism& sub);

/// Universal property of the square on the given cones (g into the source of
/// f, h into the subnet, with f o g = sub o h).
Report check_cartesian(const InverseImage& v, const NetMorphism& f, const NetMorphism& sub,
                       const std::vector<std::pair<NetMorphism, NetMorphism>>& cones);

struct FibreProduct {
    NetMorphism g1;
    NetMorphism g2;
    ProductNet product;
    Diagonal diag;
    NetMorphism product_map; // g1 * g2
    InverseImage image;
    NetMorphism first;
    NetMorphism second;
    NetMorphism base;        // onto the common target, through the diagonal
    Report report;
};

FibreProduct fibre_product(const NetMorphism& g1, const NetMorphism& g2);

/// Factorization of a cone (h1, h2) over (g1, g2) through the fibre product.
Report check_fibre_cone(const FibreProduct& fp, const NetMorphism& h1, const NetMorphism& h2);

/// Exploration of the product with single binding-elements and synchronized
/// pairs (one binding-element of each factor at the same product transition).
ReachGraph product_reachable(const ProductNet& pn, const Marking& m0, const ReachOptions& opts = {});

/// Traces of the reachable product markings against pairs of reachable factor markings.
Report check_reachability_correspondence(const ProductNet& pn, const Marking& m1, const Marking& m2,
                                         const ReachOptions& opts = {});

} // namespace cpn
