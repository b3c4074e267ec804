#pragma once
// Tents, sawtooth regions and the reduction of atomic half-space measures to
// tree measures.
//
// Distances are sup-norm, so every quantity stays rational. For a half-open
// cube Q = prod [a_k, b_k), dist(x, complement of Q) = min_k min(x_k - a_k, b_k - x_k).

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "carleson/extrapolation.hpp"
#include "carleson/measures.hpp"
#include "carleson/tree.hpp"

namespace carleson {

/// Sup-norm distance from x to the complement of q; zero when x is not in q.
Rational distance_to_complement(const CubeId& q, std::span<const Rational> x);

/// (x, t) in the closed tent over q: x in q and 0 <= t <= dist(x, complement of q).
bool tent_contains(const CubeId& q, std::span<const Rational> x, const Rational& t);

/// (x, t) in the Carleson box q x (0, l(q)].
bool box_contains(const CubeId& q, std::span<const Rational> x, const Rational& t);

/// psi(x) = dist(x, boundary of Q_j) on each family cube Q_j, zero elsewhere.
/// 1-Lipschitz in the sup norm.
class SawtoothFunction {
 public:
  /// Throws DomainError unless the cubes are pairwise disjoint subcubes of base.
  SawtoothFunction(CubeId base, std::vector<CubeId> family);
  /// Cubes of a stopping family on a dyadic tree.
  static SawtoothFunction from_family(const WeightedTree& tree, const StoppingFamily& family);

  const CubeId& base() const { return base_; }
  const std::vector<CubeId>& family() const { return family_; }
  Rational value(std::span<const Rational> x) const;
  /// The family cube containing x, if any.
  const CubeId* cube_of(std::span<const Rational> x) const;

 private:
  CubeId base_;
  std::vector<CubeId> family_;
};

inline Rational sawtooth_value(const SawtoothFunction& psi, std::span<const Rational> x) { return psi.value(x); }

/// t >= psi(x).
bool region_contains(const SawtoothFunction& psi, std::span<const Rational> x, const Rational& t);

struct SetIdentityReport {
  bool holds = true;
  std::size_t atoms_checked = 0;
  std::vector<std::size_t> disagreements;  // atom indices
  /// Disagreeing atoms with t == psi(x) > 0, where the closed region and the
  /// closed tents overlap.
  std::size_t frontier_disagreements = 0;
};

/// Compares, atom by atom, membership in Q* intersected with the region above
/// psi against membership in (Q* minus the family boxes) union the family
/// boxes with their tents removed.
SetIdentityReport verify_set_identity(const SawtoothFunction& psi, const AtomicMeasure& m);

struct Truncation {
  AtomicMeasure kept;
  Rational dropped_mass;
  /// sup over dyadic Q' in Q of nu(T(Q')) / |Q'| for the input measure.
  Rational top_layer_constant;
  /// (top_layer_constant + d) |Q|; `within_bound` records whether the dropped
  /// mass respects it. Audited, never assumed.
  Rational bound;
  bool within_bound = true;
};

/// Drops the atoms of q* outside the tent over q; atoms outside q* are kept.
Truncation truncate_outside_tent(const AtomicMeasure& m, const CubeId& q);

struct DyadicReduction {
  TreePtr tree;
  TreeMeasure mu;
  TreeMeasure nu;
  Truncation nu_truncation;
};

/// Truncates nu outside the tent over q, then bins both measures on the
/// dyadic tree below q. Throws TheoremViolation if some node's subtree mass
/// differs from the atomic mass of its Carleson box.
DyadicReduction reduce_to_dyadic(const AtomicMeasure& mu_atoms, const AtomicMeasure& nu_atoms, const CubeId& q,
                                 int depth);

}  // namespace carleson
