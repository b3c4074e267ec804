#pragma once
// Dyadic cubes in [0,1)^d and the finite weighted trees the stopping-time
// construction runs on.
//
// Cubes are half-open in every coordinate, so each point of [0,1)^d lies in
// exactly one cube per level and cube boundaries never carry mass.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carleson/rational.hpp"

namespace carleson {

/// Address of the dyadic cube prod_k [j_k 2^-n, (j_k+1) 2^-n).
struct CubeId {
  int level = 0;
  std::vector<std::int64_t> index;

  int dimension() const { return static_cast<int>(index.size()); }
  Rational side() const { return pow2_neg(static_cast<unsigned>(level)); }
  Rational volume() const { return pow2_neg(static_cast<unsigned>(level * dimension())); }
  /// Lower corner coordinate along axis k.
  Rational lower(int k) const;
  /// Upper (excluded) corner coordinate along axis k.
  Rational upper(int k) const;

  std::string to_string() const;

  friend bool operator==(const CubeId&, const CubeId&) = default;
  friend std::strong_ordering operator<=>(const CubeId& a, const CubeId& b) {
    if (auto c = a.level <=> b.level; c != 0) return c;
    return a.index <=> b.index;
  }
};

/// The unit cube [0,1)^d.
CubeId unit_cube(int d);

/// The 2^d children of q in lexicographic index order.
std::vector<CubeId> child_cubes(const CubeId& q);

/// True iff inner is contained in outer (reflexive).
bool is_subcube(const CubeId& inner, const CubeId& outer);

/// True iff x lies in the half-open cube q.
bool cube_contains(const CubeId& q, std::span<const Rational> x);

/// The level-n cube containing x. Throws DomainError unless x is in [0,1)^d.
CubeId locate(std::span<const Rational> x, int level);

using NodeId = std::uint32_t;

/// Finite rooted tree with positive node weights sigma. Children of every
/// internal node partition it, so sigma(children) sums to sigma(parent).
///
/// Node ids run in canonical order: by depth, then lexicographically (cube
/// index for dyadic trees, construction order otherwise). Parents always have
/// smaller ids than their children. Immutable after construction.
class WeightedTree {
 public:
  /// Full dyadic tree below `root` down to `depth` further levels.
  /// sigma = Lebesgue volume, theta = 2^-d.
  static WeightedTree dyadic(int d, int depth);
  static WeightedTree dyadic(const CubeId& root, int depth);

  /// Generic tree from parent links (parents[0] is ignored; the root is 0).
  /// Ids must already be canonical: parents[i] < i and depths nondecreasing.
  /// theta defaults to the largest child/parent sigma ratio; a tree with no
  /// edges gets 1/2.
  static WeightedTree from_parents(std::vector<NodeId> parents, std::vector<Rational> sigma,
                                   std::vector<std::string> labels,
                                   std::optional<Rational> theta = std::nullopt);

  std::size_t size() const { return parent_.size(); }
  static constexpr NodeId root() { return 0; }
  NodeId parent(NodeId n) const { return parent_.at(n); }
  std::span<const NodeId> children(NodeId n) const;
  bool is_leaf(NodeId n) const { return children(n).empty(); }
  /// Distance from the root.
  int depth(NodeId n) const { return depth_.at(n); }
  int max_depth() const { return max_depth_; }
  const Rational& sigma(NodeId n) const { return sigma_.at(n); }
  const Rational& theta() const { return theta_; }

  /// a is an ancestor of b or equal to it. O(1).
  bool contains(NodeId a, NodeId b) const { return tin_[a] <= tin_[b] && tout_[b] <= tout_[a]; }
  /// Nodes of the subtree of n in preorder (n first).
  std::span<const NodeId> subtree(NodeId n) const;
  std::size_t subtree_size(NodeId n) const { return tout_.at(n) - tin_.at(n); }
  /// Position of n in the preorder; subtree(m) covers positions
  /// [preorder_index(m), preorder_index(m) + subtree_size(m)).
  std::size_t preorder_index(NodeId n) const { return tin_.at(n); }
  /// Largest depth below n, relative to n.
  int height(NodeId n) const { return height_.at(n); }
  /// Nodes of the subtree of n at relative depth k, ascending.
  std::vector<NodeId> descendants_at(NodeId n, int k) const;

  bool is_dyadic() const { return !cubes_.empty(); }
  int dimension() const { return dimension_; }
  /// Cube of a dyadic node. Throws DomainError on non-dyadic trees.
  const CubeId& cube(NodeId n) const;
  /// Node of a dyadic cube, if it belongs to the tree.
  std::optional<NodeId> find(const CubeId& q) const;
  std::string label(NodeId n) const;

  void check_node(NodeId n) const;

 private:
  WeightedTree() = default;
  void finalize();

  std::vector<NodeId> parent_;
  std::vector<std::size_t> child_begin_;
  std::vector<NodeId> child_list_;
  std::vector<int> depth_;
  std::vector<int> height_;
  std::vector<Rational> sigma_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> tin_;
  std::vector<std::size_t> tout_;
  std::vector<NodeId> preorder_;
  std::vector<CubeId> cubes_;
  Rational theta_;
  int max_depth_ = 0;
  int dimension_ = 0;
};

using TreePtr = std::shared_ptr<const WeightedTree>;

}  // namespace carleson
