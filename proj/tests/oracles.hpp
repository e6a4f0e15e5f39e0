#pragma once

// Brute-force reference implementations used to cross-check the library.
// They work on plain int64 data and share no code with src/.

#include "cpn/scalar.hpp"

#include <cstdint>
#include <functional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<std::int64_t>;
using Mat = std::vector<Vec>; // row-major

Mat from_eigen(const cpn::IntMatrix& m);
Vec from_eigen(const cpn::IntVector& v);
cpn::IntVector to_eigen(const Vec& v);

Vec apply(const Mat& m, const Vec& x);
bool all_zero(const Vec& v);

/// Cofactor expansion; fine for the small sizes used in tests.
std::int64_t det_laplace(const Mat& m);

/// Calls f on every vector of length n with entries in [lo, hi].
void for_each_box(std::size_t n, std::int64_t lo, std::int64_t hi, const std::function<void(const Vec&)>& f);

/// All kernel vectors of m with entries in [-bound, bound].
std::vector<Vec> kernel_vectors(const Mat& m, std::size_t cols, std::int64_t bound);

/// Minimal nonzero non-negative kernel vectors among entries in [0, bound]:
/// those that are not the sum of two nonzero non-negative kernel vectors.
std::set<Vec> minimal_nonneg_kernel(const Mat& m, std::size_t cols, std::int64_t bound);

/// Rank over Q by fraction-free elimination on doubles-free int128 arithmetic.
std::size_t rank_q(Mat m);

// --- topology ------------------------------------------------------------------

struct Space {
    std::vector<bool> is_place;
    std::vector<std::pair<std::size_t, std::size_t>> adjacency; // (place, transition)
};

/// P-open by definition: no transition in s has an adjacent place outside s.
bool p_open(const Space& x, std::uint64_t s);
/// Closed: complement is P-open.
bool p_closed(const Space& x, std::uint64_t s);
std::vector<std::uint64_t> all_opens(const Space& x);
/// Preimage-of-every-open definition of continuity.
bool continuous(const Space& x, const Space& y, const std::vector<std::size_t>& f);

// --- nets ------------------------------------------------------------------------

/// Plain place/transition net with per-transition pre/post vectors over places.
struct PTNet {
    std::size_t places = 0;
    std::vector<Vec> pre;  // per transition
    std::vector<Vec> post; // per transition
};

/// Breadth-first reachable markings up to depth, as a sorted set.
std::set<Vec> reach(const PTNet& n, const Vec& m0, std::size_t depth);

} // namespace oracle
