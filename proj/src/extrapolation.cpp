#include "carleson/extrapolation.hpp"

#include <algorithm>

#include "carleson/errors.hpp"

namespace carleson {

namespace {

bool node_is_bad(const TreeMeasure& mu, NodeId n, const Rational& delta) {
  return mu.mass(n) >= delta * mu.tree().sigma(n);
}

// Uncovered mu-mass below every node of a subtree, for a family optionally
// extended by everything uncovered at relative level `cut` (the cubes the
// extended family adds). Nodes are addressed through their preorder position.
class UncoveredMass {
 public:
  UncoveredMass(const TreeMeasure& mu, const StoppingFamily& family, std::optional<int> cut = std::nullopt)
      : tree_(mu.tree()), scope_(family.scope), base_(tree_.preorder_index(family.scope)) {
    const auto nodes = tree_.subtree(scope_);
    const std::size_t m = nodes.size();
    covered_.assign(m, 0);
    remaining_.assign(m, Rational(0));
    for (NodeId f : family.cubes) covered_[local(f)] = 1;
    const int top = tree_.depth(scope_);
    for (std::size_t i = 1; i < m; ++i) {
      const NodeId v = nodes[i];
      if (covered_[local(tree_.parent(v))]) covered_[i] = 1;
      if (cut && !covered_[i] && tree_.depth(v) - top >= *cut) covered_[i] = 1;
    }
    for (std::size_t i = m; i-- > 0;) {
      const NodeId v = nodes[i];
      if (!covered_[i]) remaining_[i] += mu.mass(v);
      if (i > 0) remaining_[local(tree_.parent(v))] += remaining_[i];
    }
  }

  bool covered(NodeId n) const { return covered_[local(n)] != 0; }
  const Rational& remaining(NodeId n) const { return remaining_[local(n)]; }
  Rational& remaining(NodeId n) { return remaining_[local(n)]; }

  /// Smallest-id uncovered node with remaining > delta * sigma.
  std::optional<NodeId> first_violator(const Rational& delta) const {
    std::optional<NodeId> worst;
    const auto nodes = tree_.subtree(scope_);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (covered_[i]) continue;
      if (remaining_[i] > delta * tree_.sigma(nodes[i]) && (!worst || nodes[i] < *worst)) worst = nodes[i];
    }
    return worst;
  }

 private:
  std::size_t local(NodeId n) const {
    const std::size_t p = tree_.preorder_index(n);
    if (p < base_ || p >= base_ + covered_.size()) {
      throw DomainError("node " + tree_.label(n) + " is outside the subtree of " + tree_.label(scope_));
    }
    return p - base_;
  }

  const WeightedTree& tree_;
  NodeId scope_;
  std::size_t base_;
  std::vector<char> covered_;
  std::vector<Rational> remaining_;
};

Rational family_sigma(const WeightedTree& tree, const std::vector<NodeId>& nodes) {
  Rational s(0);
  for (NodeId n : nodes) s += tree.sigma(n);
  return s;
}

}  // namespace

bool StoppingFamily::contains(NodeId n) const { return std::binary_search(cubes.begin(), cubes.end(), n); }

void StoppingFamily::validate(const WeightedTree& tree) const {
  tree.check_node(scope);
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    tree.check_node(cubes[i]);
    if (i > 0 && cubes[i - 1] >= cubes[i]) throw InvariantError("stopping family is not sorted and duplicate-free");
    if (cubes[i] == scope || !tree.contains(scope, cubes[i])) {
      throw InvariantError("member " + tree.label(cubes[i]) + " is not a strict descendant of " + tree.label(scope));
    }
  }
  // Sorted by id means ancestors come first; walk each member's ancestor chain.
  for (NodeId c : cubes) {
    for (NodeId a = tree.parent(c); a != scope; a = tree.parent(a)) {
      if (contains(a)) throw InvariantError("members " + tree.label(a) + " and " + tree.label(c) + " are nested");
    }
  }
}

std::vector<NodeId> bad_set(const TreeMeasure& mu, const Rational& delta) {
  if (!(delta > 0)) throw PreconditionError("delta must be positive");
  std::vector<NodeId> out;
  for (NodeId n = 0; n < mu.tree().size(); ++n) {
    if (node_is_bad(mu, n, delta)) out.push_back(n);
  }
  return out;
}

Rational local_excess(const TreeMeasure& mu, NodeId qp, const StoppingFamily& family) {
  const WeightedTree& tree = mu.tree();
  if (!tree.contains(family.scope, qp)) {
    throw DomainError("node " + tree.label(qp) + " is outside the scope " + tree.label(family.scope));
  }
  Rational outside = mu.subtree_mass(qp);
  for (NodeId f : family.cubes) {
    if (tree.contains(f, qp)) return Rational(0);
    if (tree.contains(qp, f)) outside -= mu.subtree_mass(f);
  }
  return outside / tree.sigma(qp);
}

SmallnessResult smallness_holds(const TreeMeasure& mu, const StoppingFamily& family, const Rational& delta) {
  UncoveredMass uncovered(mu, family);
  SmallnessResult result;
  if (auto v = uncovered.first_violator(delta)) {
    result.holds = false;
    result.violator = *v;
    result.violator_excess = uncovered.remaining(*v) / mu.tree().sigma(*v);
  }
  return result;
}

StoppingFamily minimal_augmentation(const TreeMeasure& mu, const StoppingFamily& current, int n,
                                    const Rational& delta, AugmentationStep* step) {
  const WeightedTree& tree = mu.tree();
  const NodeId q = current.scope;
  if (!(delta > 0)) throw PreconditionError("delta must be positive");
  if (node_is_bad(mu, q, delta)) throw PreconditionError("stopping family requested for bad node " + tree.label(q));
  if (n < 0) throw PreconditionError("level must be nonnegative");
  current.validate(tree);
  const int top = tree.depth(q);
  for (NodeId f : current.cubes) {
    if (tree.depth(f) - top > n) throw PreconditionError("F_n has a member below relative level n");
  }

  // Extended family of F_n: everything uncovered at level n+1 is cut off.
  UncoveredMass uncovered(mu, current, n + 1);
  if (auto v = uncovered.first_violator(delta)) {
    throw InvariantError("smallness fails for the extended family at " + tree.label(*v) + " (scope " +
                         tree.label(q) + ", n = " + std::to_string(n) + ")");
  }

  std::vector<NodeId> bad_remainder;
  std::vector<NodeId> candidates;
  UncoveredMass plain(mu, current);
  for (NodeId r : tree.descendants_at(q, n + 1)) {
    if (plain.covered(r)) continue;
    (node_is_bad(mu, r, delta) ? bad_remainder : candidates).push_back(r);
  }

  AugmentationStep local;
  local.scope = q;
  local.level = n + 1;
  local.remainder = bad_remainder.size() + candidates.size();
  local.bad_in_remainder = bad_remainder.size();

  // Dropping x from S uncovers exactly T(x): its mass joins every ancestor.
  std::vector<NodeId> kept;
  for (NodeId x : candidates) {
    const Rational& mx = mu.mass(x);
    std::optional<NodeId> blocker;
    if (mx > 0) {
      for (NodeId a = x;;) {
        const Rational after = (a == x) ? mx : uncovered.remaining(a) + mx;
        if (after > delta * tree.sigma(a)) {
          blocker = a;
          break;
        }
        if (a == q) break;
        a = tree.parent(a);
      }
    }
    if (blocker) {
      kept.push_back(x);
      local.certificates.emplace_back(x, *blocker);
      continue;
    }
    if (mx > 0) {
      for (NodeId a = tree.parent(x);; a = tree.parent(a)) {
        uncovered.remaining(a) += mx;
        if (a == q) break;
      }
    }
  }
  local.selected = kept;

  StoppingFamily next{q, current.cubes};
  next.cubes.insert(next.cubes.end(), bad_remainder.begin(), bad_remainder.end());
  next.cubes.insert(next.cubes.end(), kept.begin(), kept.end());
  std::sort(next.cubes.begin(), next.cubes.end());
  next.validate(tree);
  if (step) *step = std::move(local);
  return next;
}

StoppingFamily build_stopping_family(const TreeMeasure& mu, NodeId q, const Rational& delta,
                                     std::vector<AugmentationStep>* trace) {
  const WeightedTree& tree = mu.tree();
  tree.check_node(q);
  if (!(delta > 0)) throw PreconditionError("delta must be positive");
  if (node_is_bad(mu, q, delta)) throw PreconditionError("stopping family requested for bad node " + tree.label(q));

  StoppingFamily family{q, {}};
  const int height = tree.height(q);
  for (int n = 0; n < height; ++n) {
    if (family_sigma(tree, family.cubes) == tree.sigma(q)) break;
    AugmentationStep step;
    StoppingFamily next = minimal_augmentation(mu, family, n, delta, &step);
    if (!std::includes(next.cubes.begin(), next.cubes.end(), family.cubes.begin(), family.cubes.end())) {
      throw InvariantError("stopping family shrank at level " + std::to_string(n + 1));
    }
    family = std::move(next);
    if (trace) trace->push_back(std::move(step));
  }
  auto check = smallness_holds(mu, family, delta);
  if (!check.holds) {
    throw InvariantError("constructed family for " + tree.label(q) + " fails smallness at " +
                         tree.label(*check.violator));
  }
  return family;
}

StoppingConstruction::StoppingConstruction(const TreeMeasure& mu, Rational delta, bool keep_trace)
    : mu_(mu), delta_(std::move(delta)), keep_trace_(keep_trace) {
  if (!(delta_ > 0)) throw PreconditionError("delta must be positive");
  bad_.assign(mu_.tree().size(), false);
  for (NodeId n : bad_set(mu_, delta_)) bad_[n] = true;
}

const StoppingFamily& StoppingConstruction::family(NodeId q) {
  auto it = families_.find(q);
  if (it != families_.end()) return it->second;
  std::vector<AugmentationStep> steps;
  StoppingFamily f = build_stopping_family(mu_, q, delta_, keep_trace_ ? &steps : nullptr);
  if (keep_trace_) traces_[q] = std::move(steps);
  return families_.emplace(q, std::move(f)).first->second;
}

const std::vector<AugmentationStep>& StoppingConstruction::trace(NodeId q) {
  family(q);
  static const std::vector<AugmentationStep> empty;
  auto it = traces_.find(q);
  return it == traces_.end() ? empty : it->second;
}

Decomposition build_decomposition(const TreeMeasure& mu, const TreeMeasure& nu, NodeId q, const Rational& delta) {
  StoppingConstruction construction(mu, delta);
  return build_decomposition(construction, nu, q);
}

Decomposition build_decomposition(StoppingConstruction& construction, const TreeMeasure& nu, NodeId q) {
  const TreeMeasure& mu = construction.mu();
  const WeightedTree& tree = mu.tree();
  if (&nu.tree() != &tree) throw DomainError("mu and nu live on different trees");
  tree.check_node(q);

  Decomposition dec;
  dec.root = q;
  for (NodeId n : tree.subtree(q)) {
    if (construction.is_bad(n)) dec.bad.push_back(n);
  }
  std::sort(dec.bad.begin(), dec.bad.end());

  std::vector<NodeId> generation{q};
  while (!generation.empty()) {
    std::vector<NodeId> next;
    for (NodeId g : generation) {
      if (construction.is_bad(g)) {
        dec.region_mass[g] = nu.mass(g);
        auto kids = tree.children(g);
        next.insert(next.end(), kids.begin(), kids.end());
      } else {
        const StoppingFamily& f = construction.family(g);
        Rational region = nu.subtree_mass(g);
        for (NodeId c : f.cubes) region -= nu.subtree_mass(c);
        dec.region_mass[g] = region;
        dec.families.emplace(g, f);
        next.insert(next.end(), f.cubes.begin(), f.cubes.end());
      }
    }
    std::sort(next.begin(), next.end());
    dec.generations.push_back(std::move(generation));
    generation = std::move(next);
  }

  Rational total(0);
  for (const auto& [node, m] : dec.region_mass) total += m;
  if (total != nu.subtree_mass(q)) {
    throw TheoremViolation("region masses sum to " + to_string(total) + " but nu(Q*) = " +
                           to_string(nu.subtree_mass(q)));
  }
  dec.witnesses = lemma_witnesses(mu, dec, construction.delta());
  return dec;
}

std::map<NodeId, NodeId> lemma_witnesses(const TreeMeasure& mu, const Decomposition& dec, const Rational& delta) {
  const WeightedTree& tree = mu.tree();
  const Rational threshold = (1 - tree.theta()) * delta;
  std::map<NodeId, NodeId> out;
  for (const auto& [scope, family] : dec.families) {
    UncoveredMass uncovered(mu, family);
    for (NodeId member : family.cubes) {
      if (node_is_bad(mu, member, delta)) continue;
      std::optional<NodeId> witness;
      for (NodeId a = member;; a = tree.parent(a)) {
        if (!uncovered.covered(a) && uncovered.remaining(a) >= threshold * tree.sigma(a)) {
          witness = a;
          break;
        }
        if (a == scope) break;
      }
      if (!witness) {
        throw TheoremViolation("no witness for stopping cube " + tree.label(member) + " of " + tree.label(scope));
      }
      out.emplace(member, *witness);
    }
  }
  return out;
}

std::vector<NodeId> maximal_witness_cover(const TreeMeasure& mu, const StoppingFamily& family,
                                          const Rational& delta) {
  const WeightedTree& tree = mu.tree();
  const Rational threshold = (1 - tree.theta()) * delta;
  UncoveredMass uncovered(mu, family);
  std::vector<NodeId> cover;
  for (NodeId member : family.cubes) {
    if (node_is_bad(mu, member, delta)) continue;
    std::optional<NodeId> top;
    for (NodeId a = tree.parent(member);; a = tree.parent(a)) {
      if (uncovered.remaining(a) >= threshold * tree.sigma(a)) top = a;
      if (a == family.scope) break;
    }
    if (top) cover.push_back(*top);
  }
  std::sort(cover.begin(), cover.end());
  cover.erase(std::unique(cover.begin(), cover.end()), cover.end());
  return cover;
}

AuditReport audit_bound(const TreeMeasure& mu, const TreeMeasure& nu, const Rational& delta, const Rational& C) {
  const WeightedTree& tree = mu.tree();
  if (&nu.tree() != &tree) throw DomainError("mu and nu live on different trees");
  if (!(delta > 0)) throw PreconditionError("delta must be positive");

  AuditReport r;
  r.delta = delta;
  r.C = C;
  r.theta = tree.theta();
  r.C1_mu = carleson_constant(mu).value;
  r.C2_nu = top_constant(nu).value;
  r.measured_C1_nu = carleson_constant(nu).value;
  const Rational one_minus_theta = 1 - r.theta;
  r.predicted_bound = (r.C2_nu + C / one_minus_theta) * r.C1_mu / delta;
  r.root_term_bound = r.predicted_bound + C;

  StoppingConstruction construction(mu, delta);
  const std::size_t n = tree.size();

  // Sums over the decomposition rooted at P, assembled bottom-up along the
  // G_1 links (every G_1 member has a larger id than its parent in the chain).
  std::vector<Rational> bad_nu(n), good_nu(n), good_sigma(n), cover_sigma(n), bad_mu_below(n);
  std::vector<Rational> tail_nu(n), tail_sigma(n);
  std::vector<Rational> bad_mu_masked(n);
  for (NodeId p = 0; p < n; ++p) bad_mu_masked[p] = construction.is_bad(p) ? mu.mass(p) : Rational(0);
  const TreeMeasure bad_mu(mu.tree_ptr(), std::move(bad_mu_masked));

  auto fail = [&](bool& flag, std::string message) {
    flag = false;
    if (r.failures.size() < 50) r.failures.push_back(std::move(message));
  };

  for (NodeId p = static_cast<NodeId>(n); p-- > 0;) {
    std::vector<NodeId> g1;
    Rational region;
    if (construction.is_bad(p)) {
      auto kids = tree.children(p);
      g1.assign(kids.begin(), kids.end());
      region = nu.mass(p);
      bad_nu[p] = region;
    } else {
      const StoppingFamily& f = construction.family(p);
      g1 = f.cubes;
      region = nu.subtree_mass(p);
      Rational mu_region = mu.subtree_mass(p);
      for (NodeId c : f.cubes) {
        region -= nu.subtree_mass(c);
        mu_region -= mu.subtree_mass(c);
      }
      if (region > C * tree.sigma(p)) r.hypothesis_violation = p;  // keeps the smallest id
      good_nu[p] = region;
      good_sigma[p] = tree.sigma(p);

      // Witness cover: sum over F \ B <= sum over H <= mu(U) / ((1 - theta) delta).
      Rational members(0);
      for (NodeId c : f.cubes) {
        if (!construction.is_bad(c)) members += tree.sigma(c);
      }
      const Rational cover = family_sigma(tree, maximal_witness_cover(mu, f, delta));
      cover_sigma[p] = cover;
      if (members > cover) {
        fail(r.witness_cover_ok, "witness cover smaller than stopping cubes at " + tree.label(p));
      }
      if (cover * one_minus_theta * delta > mu_region) {
        fail(r.witness_cover_ok, "witness cover exceeds mu(U)/((1-theta) delta) at " + tree.label(p));
      }
    }
    for (NodeId c : g1) {
      bad_nu[p] += bad_nu[c];
      tail_nu[p] += good_nu[c];
      tail_sigma[p] += good_sigma[c];
      cover_sigma[p] += cover_sigma[c];
    }
    good_nu[p] += tail_nu[p];
    good_sigma[p] += tail_sigma[p];

    if (bad_nu[p] + good_nu[p] != nu.subtree_mass(p)) {
      fail(r.partition_ok, "region masses do not sum to nu(Q*) at " + tree.label(p));
    }
    const Rational bad_mu_sum = bad_mu.subtree_mass(p);
    if (bad_nu[p] * delta > r.C2_nu * bad_mu_sum ||
        r.C2_nu * bad_mu_sum > r.C2_nu * r.C1_mu * tree.sigma(p)) {
      fail(r.bad_part_ok, "bad-part inequality fails at " + tree.label(p));
    }
    // Good part beyond generation 0: sigma sum <= mu(Q*) / ((1-theta) delta),
    // hence nu sum <= C C1 sigma(Q) / ((1-theta) delta).
    if (tail_sigma[p] * one_minus_theta * delta > mu.subtree_mass(p)) {
      fail(r.good_part_ok, "good-part sigma sum exceeds mu(Q*)/((1-theta) delta) at " + tree.label(p));
    }
    if (good_nu[p] > C * good_sigma[p]) {
      fail(r.good_part_ok, "good-part mass exceeds C * sigma sum at " + tree.label(p));
    }
    if (tail_nu[p] * one_minus_theta * delta > C * r.C1_mu * tree.sigma(p)) {
      fail(r.good_part_ok, "good-part tail exceeds C C1 sigma/((1-theta) delta) at " + tree.label(p));
    }
  }

  r.bad_part = bad_nu[0];
  r.good_part = good_nu[0];
  r.witness_cover_mass = cover_sigma[0];
  r.bound_ok = r.measured_C1_nu <= r.predicted_bound;
  r.root_term_bound_ok = r.measured_C1_nu <= r.root_term_bound;
  if (r.hypothesis_violation) {
    r.failures.insert(r.failures.begin(), "hypothesis fails: nu(U) > C sigma at " + tree.label(*r.hypothesis_violation));
  }
  if (!r.bound_ok) r.failures.push_back("measured C1(nu) exceeds the predicted bound");
  r.pass = !r.hypothesis_violation && r.partition_ok && r.bad_part_ok && r.witness_cover_ok && r.good_part_ok &&
           r.bound_ok;
  return r;
}

}  // namespace carleson
