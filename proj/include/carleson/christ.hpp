#pragma once
// Christ-type hierarchical partitions of a finite metric measure space.
//
// Level j works at scale r_j = 2^{-Nj}. Centers form nested greedy nets: the
// level-j centers are the level-(j-1) centers plus farthest-point additions
// while some point is at least r_j from all current centers. Each point then
// joins the nearest level-j center inside its parent cell.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "carleson/rational.hpp"
#include "carleson/tree.hpp"

namespace carleson {

struct MetricSpace {
  std::vector<std::string> ids;
  std::vector<std::vector<Rational>> dist;
  std::vector<Rational> weights;

  std::size_t size() const { return ids.size(); }
  /// Throws DomainError unless dist is a metric (symmetric, zero diagonal,
  /// positive off the diagonal, triangle inequality) and the weights are
  /// nonnegative with total 1.
  void validate() const;
  Rational diameter() const;
};

struct ChristCell {
  std::vector<std::size_t> points;  // sorted point indices
  std::size_t center = 0;
  std::size_t parent = 0;           // index into the previous level
};

struct ChristTree {
  int N = 1;
  std::vector<std::vector<ChristCell>> levels;

  Rational scale(int j) const { return pow2_neg(static_cast<unsigned>(N * j)); }
  /// The weighted tree of cells with unary chains collapsed onto their top
  /// cell; sigma is the point weight, theta the largest child/parent ratio.
  /// Throws DomainError if a cell has zero weight.
  WeightedTree to_weighted_tree(const MetricSpace& space) const;
};

/// Throws DomainError on an empty space or on N < 1.
ChristTree build_christ_tree(const MetricSpace& space, int N, int max_depth);

struct ChristAudit {
  bool partition_ok = true;   // every level partitions the points
  bool nesting_ok = true;     // every cell lies inside its parent
  bool separation_ok = true;  // level-j centers pairwise >= r_j apart
  std::vector<Rational> diameter_ratio_by_level;  // max diam(Q) / r_j
  Rational diameter_ratio;                         // max over levels
  /// Largest c0 with B(x_Q, c0 r_j) inside Q for all cells; empty when no
  /// cell has points outside it.
  std::optional<Rational> interior_ball_constant;
  /// Smallest c2 with l^d / c2 <= sigma(Q) <= c2 l^d; empty if a cell has
  /// zero weight.
  std::optional<Rational> regularity_constant;
  /// Smallest c1 with R^d / c1 <= sigma(B(x, R)) <= c1 R^d over x in X and
  /// R among the positive distances from x (closed balls). 1 when no radius
  /// is available (single point); empty if a ball has zero weight.
  std::optional<Rational> ahlfors_constant;
  std::vector<std::string> failures;
};

/// Never throws on a well-formed tree; reports what it measures.
ChristAudit audit_christ_properties(const ChristTree& tree, const MetricSpace& space, int d);

}  // namespace carleson
