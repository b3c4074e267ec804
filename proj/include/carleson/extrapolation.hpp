#pragma once
// Stopping-time construction for Carleson-measure extrapolation.
//
// For a measure mu, a threshold delta and a node Q, the construction picks a
// stopping family F(Q): an antichain of strict descendants of Q, grown level
// by level, such that every Q' below Q sees at most delta * sigma(Q') of
// mu-mass outside the boxes of F(Q) ("smallness"). At each level the newly
// added non-bad cubes form an inclusion-minimal feasible set. Iterating
// F(.) from the root produces generations whose sawtooth regions partition
// the Carleson box, and the audit checks every inequality of the argument
// that bounds the Carleson constant of nu.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carleson/measures.hpp"
#include "carleson/rational.hpp"
#include "carleson/tree.hpp"

namespace carleson {

/// Antichain of strict descendants of `scope`, sorted by node id.
struct StoppingFamily {
  NodeId scope = 0;
  std::vector<NodeId> cubes;

  bool contains(NodeId n) const;
  /// Throws InvariantError unless members are sorted, strictly below scope,
  /// and pairwise incomparable.
  void validate(const WeightedTree& tree) const;
};

/// Sorted list of bad nodes: mass(Q) >= delta * sigma(Q).
std::vector<NodeId> bad_set(const TreeMeasure& mu, const Rational& delta);

/// mu(Qp* minus the boxes of F) / sigma(Qp). Zero when Qp lies inside a member.
Rational local_excess(const TreeMeasure& mu, NodeId qp, const StoppingFamily& family);

struct SmallnessResult {
  bool holds = true;
  /// Shallowest, then lexicographically first, node with excess > delta.
  std::optional<NodeId> violator;
  Rational violator_excess;
};

/// local_excess(mu, Q', F) <= delta for every Q' in the subtree of F.scope.
SmallnessResult smallness_holds(const TreeMeasure& mu, const StoppingFamily& family, const Rational& delta);

/// One level of growth of a stopping family.
struct AugmentationStep {
  NodeId scope = 0;
  int level = 0;                   // relative level n+1 of the remainder
  std::size_t remainder = 0;       // |R_{n+1}|
  std::size_t bad_in_remainder = 0;
  std::vector<NodeId> selected;    // the minimal S
  /// For every kept member of S: the node whose excess would exceed delta
  /// if that member were dropped.
  std::vector<std::pair<NodeId, NodeId>> certificates;
};

/// Grows F_n(Q) (members at relative levels <= n) into F_{n+1}(Q).
///
/// Candidates are the uncovered non-bad cubes at relative level n+1; all
/// uncovered bad cubes at that level join unconditionally. Starting from the
/// full candidate set, each candidate is dropped once, in id order, whenever
/// smallness for the extended family survives. Feasibility is monotone in
/// S, so the result is inclusion-minimal.
///
/// Throws PreconditionError if Q is bad and InvariantError if smallness fails
/// for the extended family of F_n(Q).
StoppingFamily minimal_augmentation(const TreeMeasure& mu, const StoppingFamily& current, int n,
                                    const Rational& delta, AugmentationStep* step = nullptr);

/// Runs the augmentation from F_0 = {} until the family covers Q or the tree
/// ends. Throws PreconditionError if Q is bad.
StoppingFamily build_stopping_family(const TreeMeasure& mu, NodeId q, const Rational& delta,
                                     std::vector<AugmentationStep>* trace = nullptr);

/// Memoizes bad-set membership and stopping families for one (mu, delta).
class StoppingConstruction {
 public:
  StoppingConstruction(const TreeMeasure& mu, Rational delta, bool keep_trace = false);

  const TreeMeasure& mu() const { return mu_; }
  const Rational& delta() const { return delta_; }
  bool is_bad(NodeId n) const { return bad_.at(n); }
  const StoppingFamily& family(NodeId q);
  /// Augmentation steps of family(q); empty unless keep_trace was set.
  const std::vector<AugmentationStep>& trace(NodeId q);

 private:
  const TreeMeasure& mu_;
  Rational delta_;
  bool keep_trace_;
  std::vector<bool> bad_;
  std::map<NodeId, StoppingFamily> families_;
  std::map<NodeId, std::vector<AugmentationStep>> traces_;
};

struct Decomposition {
  NodeId root = 0;
  std::vector<NodeId> bad;                              // bad nodes of the subtree of root
  std::map<NodeId, StoppingFamily> families;            // non-bad processed nodes
  std::vector<std::vector<NodeId>> generations;         // G_0 = {root}, G_1, ...
  std::map<NodeId, Rational> region_mass;               // nu(U(Q')) per processed node
  std::map<NodeId, NodeId> witnesses;                   // non-bad stopping cube -> witness

  bool processed(NodeId n) const { return region_mass.count(n) != 0; }
};

/// Builds generations from q to the bottom of the tree and asserts that the
/// region masses add up to nu(q*). Witnesses are filled in.
Decomposition build_decomposition(const TreeMeasure& mu, const TreeMeasure& nu, NodeId q, const Rational& delta);
Decomposition build_decomposition(StoppingConstruction& construction, const TreeMeasure& nu, NodeId q);

/// For every non-bad member Q' of a family F(Q'') in the decomposition, the
/// first node on the path from Q' up to Q'' whose excess with respect to
/// F(Q'') is at least (1 - theta) * delta. Throws TheoremViolation if a
/// member has none.
std::map<NodeId, NodeId> lemma_witnesses(const TreeMeasure& mu, const Decomposition& dec, const Rational& delta);

/// Maximal nodes of the subtree of family.scope that contain a non-bad member
/// and have excess >= (1 - theta) * delta. Pairwise disjoint.
std::vector<NodeId> maximal_witness_cover(const TreeMeasure& mu, const StoppingFamily& family,
                                          const Rational& delta);

struct AuditReport {
  Rational delta;
  Rational C;
  Rational theta;
  Rational C1_mu;
  Rational C2_nu;
  // Root decomposition figures.
  Rational bad_part;            // sum of nu(U) over bad processed nodes
  Rational good_part;           // sum of nu(U) over non-bad processed nodes
  Rational witness_cover_mass;  // sum of sigma over the maximal witness covers
  Rational predicted_bound;     // (C2 + C / (1 - theta)) * C1_mu / delta
  Rational root_term_bound;     // predicted_bound + C; also charges nu(U(Q)) of a good Q
  Rational measured_C1_nu;
  std::optional<NodeId> hypothesis_violation;  // non-bad Q' with nu(U(Q')) > C sigma(Q')
  bool partition_ok = true;       // region masses sum to nu(Q*) at every root
  bool bad_part_ok = true;        // bad-part inequality at every root
  bool witness_cover_ok = true;   // witness-cover inequality at every non-bad node
  bool good_part_ok = true;       // good-part inequality at every root
  bool bound_ok = true;           // measured_C1_nu <= predicted_bound
  bool root_term_bound_ok = true; // measured_C1_nu <= root_term_bound
  std::vector<std::string> failures;
  bool pass = false;
};

/// Runs the construction rooted at every node of the tree and checks the
/// bad-part, witness-cover, good-part and final inequalities exactly.
/// The hypothesis nu(U(Q')) <= C sigma(Q') is checked on every constructed
/// family; a violation is reported rather than thrown.
AuditReport audit_bound(const TreeMeasure& mu, const TreeMeasure& nu, const Rational& delta, const Rational& C);

}  // namespace carleson
