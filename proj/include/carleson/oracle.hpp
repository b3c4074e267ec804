#pragma once
// Brute-force reference implementations for small trees.
//
// Nothing here calls into the extrapolation module or uses the tree's
// preorder/subtree-sum machinery: descendants are found by walking parent
// links and sums are taken over explicit node lists. That keeps the oracle an
// independent check on the main construction.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "carleson/extrapolation.hpp"
#include "carleson/measures.hpp"
#include "carleson/tree.hpp"

namespace carleson::oracle {

/// Exhaustive modes refuse subtrees larger than this.
inline constexpr std::size_t kNodeCap = 31;

/// Every antichain of strict descendants of q, each once, ordered by size
/// and then lexicographically. Throws SizeError past the node cap.
std::vector<StoppingFamily> enumerate_families(const WeightedTree& tree, NodeId q);

/// Antichain count from the recursion b(v) = 1 + prod over children b(c),
/// with the strict-descendant count prod over children of q of b(c).
std::uint64_t count_families_recursive(const WeightedTree& tree, NodeId q);

/// Antichain count by filtering every subset of strict descendants.
/// Throws SizeError past 24 strict descendants.
std::uint64_t count_families_bitmask(const WeightedTree& tree, NodeId q);

/// Double loop over nodes and their descendants.
ExtremalRatio naive_carleson_constant(const TreeMeasure& m);
ExtremalRatio naive_top_constant(const TreeMeasure& m);
/// Sum of mass over descendants of qp outside every member box, over sigma(qp).
Rational naive_local_excess(const TreeMeasure& mu, NodeId qp, const StoppingFamily& family);
/// Checks local excess <= delta for every node under family.scope.
bool naive_smallness(const TreeMeasure& mu, const StoppingFamily& family, const Rational& delta);

struct MinimalityVerdict {
  bool ok = true;
  std::string reason;
};

/// True iff the family satisfies smallness, contains every uncovered bad
/// cube at each level, and no non-bad member can be deleted from its level's
/// selection while the extended family stays small.
MinimalityVerdict brute_force_minimal_check(const TreeMeasure& mu, NodeId q, const Rational& delta,
                                            const StoppingFamily& family);

struct HypothesisVerdict {
  bool holds = true;
  std::size_t pairs_checked = 0;
  std::optional<StoppingFamily> counterexample;
};

/// Checks nu(Q* minus the boxes of F) <= C sigma(Q) for every node Q and every
/// antichain F under Q satisfying smallness for mu and delta. Whole tree must
/// fit the node cap.
HypothesisVerdict exhaustive_hypothesis_check(const TreeMeasure& mu, const TreeMeasure& nu, const Rational& delta,
                                              const Rational& C);

}  // namespace carleson::oracle
