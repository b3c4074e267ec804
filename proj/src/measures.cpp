#include "carleson/measures.hpp"

#include <string>

#include "carleson/errors.hpp"

namespace carleson {

TreeMeasure::TreeMeasure(TreePtr tree, std::vector<Rational> mass) : tree_(std::move(tree)), mass_(std::move(mass)) {
  if (!tree_) throw DomainError("measure needs a tree");
  if (mass_.size() != tree_->size()) {
    throw DomainError("measure has " + std::to_string(mass_.size()) + " masses for " +
                      std::to_string(tree_->size()) + " nodes");
  }
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (mass_[i] < 0) throw DomainError("negative mass at node " + tree_->label(static_cast<NodeId>(i)));
  }
  subtree_ = mass_;
  for (std::size_t i = subtree_.size(); i-- > 1;) subtree_[tree_->parent(static_cast<NodeId>(i))] += subtree_[i];
}

TreeMeasure TreeMeasure::zero(TreePtr tree) {
  const std::size_t n = tree->size();
  return TreeMeasure(std::move(tree), std::vector<Rational>(n, Rational(0)));
}

const Rational& TreeMeasure::mass(NodeId n) const {
  tree_->check_node(n);
  return mass_[n];
}

const Rational& TreeMeasure::subtree_mass(NodeId n) const {
  tree_->check_node(n);
  return subtree_[n];
}

TreeMeasure TreeMeasure::scaled(const Rational& factor) const {
  std::vector<Rational> m = mass_;
  for (auto& v : m) v *= factor;
  return TreeMeasure(tree_, std::move(m));
}

Rational AtomicMeasure::total() const {
  Rational s(0);
  for (const auto& a : atoms) s += a.w;
  return s;
}

void AtomicMeasure::validate() const {
  if (dimension < 1) throw DomainError("atomic measure dimension must be >= 1");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    const std::string who = "atom " + std::to_string(i);
    if (static_cast<int>(a.x.size()) != dimension) throw DomainError(who + ": wrong number of coordinates");
    for (const auto& c : a.x) {
      if (c < 0 || c >= 1) throw DomainError(who + ": coordinate outside [0,1)");
    }
    if (!(a.t > 0) || a.t > 1) throw DomainError(who + ": height outside (0,1]");
    if (a.w < 0) throw DomainError(who + ": negative weight");
  }
}

TreeMeasure tree_measure_from_atoms(const AtomicMeasure& m, TreePtr tree) {
  m.validate();
  if (!tree->is_dyadic()) throw DomainError("atoms can only be binned on a dyadic tree");
  if (tree->dimension() != m.dimension) throw DomainError("atom dimension does not match the tree");
  const CubeId& root = tree->cube(WeightedTree::root());
  const int deepest = root.level + tree->max_depth();
  const Rational floor_height = pow2_neg(static_cast<unsigned>(deepest + 1));
  const Rational root_side = root.side();

  std::vector<Rational> mass(tree->size(), Rational(0));
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    const Atom& a = m.atoms[i];
    if (!cube_contains(root, a.x) || a.t > root_side) continue;
    if (a.t <= floor_height) {
      throw DepthError("atom " + std::to_string(i) + " at height " + to_string(a.t) + " lies below the level-" +
                       std::to_string(deepest) + " top layer (needs t > " + to_string(floor_height) + ")");
    }
    // Level n with 2^{-n-1} < t <= 2^{-n}.
    int level = root.level;
    Rational side = root_side;
    while (!(a.t > side / 2)) {
      side /= 2;
      ++level;
    }
    auto node = tree->find(locate(a.x, level));
    if (!node) throw InvariantError("binned atom " + std::to_string(i) + " has no node");
    mass[*node] += a.w;
  }
  return TreeMeasure(std::move(tree), std::move(mass));
}

TreeMeasure tree_measure_from_atoms(const AtomicMeasure& m, int depth) {
  return tree_measure_from_atoms(m, std::make_shared<const WeightedTree>(WeightedTree::dyadic(m.dimension, depth)));
}

Rational atomic_box_mass(const AtomicMeasure& m, const CubeId& q) {
  Rational s(0);
  const Rational side = q.side();
  for (const auto& a : m.atoms) {
    if (a.t > 0 && a.t <= side && cube_contains(q, a.x)) s += a.w;
  }
  return s;
}

namespace {

template <typename Numerator>
ExtremalRatio best_ratio(const TreeMeasure& m, Numerator numerator) {
  const WeightedTree& tree = m.tree();
  ExtremalRatio best{Rational(0), WeightedTree::root()};
  bool first = true;
  for (NodeId n = 0; n < tree.size(); ++n) {
    Rational r = numerator(n) / tree.sigma(n);
    // Ids are canonical, so keeping the first strict maximum breaks ties correctly.
    if (first || r > best.value) {
      best.value = r;
      best.argmax = n;
      first = false;
    }
  }
  return best;
}

}  // namespace

ExtremalRatio carleson_constant(const TreeMeasure& m) {
  return best_ratio(m, [&](NodeId n) -> const Rational& { return m.subtree_mass(n); });
}

ExtremalRatio top_constant(const TreeMeasure& m) {
  return best_ratio(m, [&](NodeId n) -> const Rational& { return m.mass(n); });
}

}  // namespace carleson
