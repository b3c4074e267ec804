#pragma once
// Discrete measures on tree nodes, atomic measures on the upper half-space,
// and the two Carleson-type constants.
//
// A TreeMeasure assigns each node Q a nonnegative mass, the mass of the top
// layer Q x (l(Q)/2, l(Q)]. Subtree sums then realize the mass of the Carleson
// box Q x (0, l(Q)].

#include <cstddef>
#include <vector>

#include "carleson/rational.hpp"
#include "carleson/tree.hpp"

namespace carleson {

class TreeMeasure {
 public:
  /// Throws DomainError on negative or missing masses.
  TreeMeasure(TreePtr tree, std::vector<Rational> mass);
  static TreeMeasure zero(TreePtr tree);

  const WeightedTree& tree() const { return *tree_; }
  const TreePtr& tree_ptr() const { return tree_; }
  const Rational& mass(NodeId n) const;
  /// Mass of the whole subtree of n. Precomputed in one bottom-up pass.
  const Rational& subtree_mass(NodeId n) const;
  const Rational& total() const { return subtree_[0]; }
  const std::vector<Rational>& masses() const { return mass_; }

  TreeMeasure scaled(const Rational& factor) const;

 private:
  TreePtr tree_;
  std::vector<Rational> mass_;
  std::vector<Rational> subtree_;
};

struct Atom {
  std::vector<Rational> x;  // in [0,1)^d
  Rational t;               // height, in (0,1]
  Rational w;               // weight, >= 0
};

struct AtomicMeasure {
  int dimension = 1;
  std::vector<Atom> atoms;

  Rational total() const;
  /// Throws DomainError if an atom breaks the coordinate, height, or weight ranges.
  void validate() const;
};

/// Bins atoms into top layers: each atom of the root box lands on the node Q
/// with x in Q and l(Q)/2 < t <= l(Q). `tree` must be dyadic. Atoms outside
/// the root box are ignored; atoms below the deepest top layer raise
/// DepthError.
TreeMeasure tree_measure_from_atoms(const AtomicMeasure& m, TreePtr tree);
/// Same, on the full dyadic tree of [0,1)^d with the given depth.
TreeMeasure tree_measure_from_atoms(const AtomicMeasure& m, int depth);

/// Atomic mass of the Carleson box q x (0, l(q)].
Rational atomic_box_mass(const AtomicMeasure& m, const CubeId& q);

struct ExtremalRatio {
  Rational value;
  NodeId argmax = 0;  // shallowest, then lexicographic, among ties
};

/// sup over nodes of subtree_mass(Q) / sigma(Q).
ExtremalRatio carleson_constant(const TreeMeasure& m);
/// sup over nodes of mass(Q) / sigma(Q).
ExtremalRatio top_constant(const TreeMeasure& m);

}  // namespace carleson
