#include "carleson/oracle.hpp"

#include <algorithm>

#include "carleson/errors.hpp"

namespace carleson::oracle {

namespace {

bool is_descendant(const WeightedTree& tree, NodeId v, NodeId ancestor) {
  for (NodeId a = v;; a = tree.parent(a)) {
    if (a == ancestor) return true;
    if (a == WeightedTree::root()) return false;
  }
}

int relative_depth(const WeightedTree& tree, NodeId v, NodeId ancestor) {
  int k = 0;
  for (NodeId a = v; a != ancestor; a = tree.parent(a)) ++k;
  return k;
}

// Subtree of q listed by scanning all ids; ascending id, so parents first.
std::vector<NodeId> nodes_under(const WeightedTree& tree, NodeId q) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < tree.size(); ++v) {
    if (is_descendant(tree, v, q)) out.push_back(v);
  }
  return out;
}

void check_cap(const WeightedTree& tree, NodeId q) {
  const std::size_t n = nodes_under(tree, q).size();
  if (n > kNodeCap) {
    throw SizeError("subtree of " + tree.label(q) + " has " + std::to_string(n) + " nodes; oracle cap is " +
                    std::to_string(kNodeCap));
  }
}

bool under_family(const WeightedTree& tree, NodeId v, const std::vector<NodeId>& family) {
  for (NodeId f : family) {
    if (is_descendant(tree, v, f)) return true;
  }
  return false;
}

bool small_for(const TreeMeasure& mu, NodeId q, const std::vector<NodeId>& family, const Rational& delta) {
  const WeightedTree& tree = mu.tree();
  const auto nodes = nodes_under(tree, q);
  for (NodeId qp : nodes) {
    Rational outside(0);
    for (NodeId v : nodes) {
      if (is_descendant(tree, v, qp) && !under_family(tree, v, family)) outside += mu.mass(v);
    }
    if (outside > delta * tree.sigma(qp)) return false;
  }
  return true;
}

// All antichains inside the subtree of v (v itself allowed).
std::vector<std::vector<NodeId>> antichains_with_root(const WeightedTree& tree, NodeId v);

std::vector<std::vector<NodeId>> antichains_below(const WeightedTree& tree, NodeId v) {
  std::vector<std::vector<NodeId>> acc{{}};
  for (NodeId c : tree.children(v)) {
    const auto options = antichains_with_root(tree, c);
    std::vector<std::vector<NodeId>> next;
    next.reserve(acc.size() * options.size());
    for (const auto& a : acc) {
      for (const auto& o : options) {
        std::vector<NodeId> merged = a;
        merged.insert(merged.end(), o.begin(), o.end());
        next.push_back(std::move(merged));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

std::vector<std::vector<NodeId>> antichains_with_root(const WeightedTree& tree, NodeId v) {
  auto out = antichains_below(tree, v);
  out.push_back({v});
  return out;
}

}  // namespace

std::vector<StoppingFamily> enumerate_families(const WeightedTree& tree, NodeId q) {
  tree.check_node(q);
  check_cap(tree, q);
  auto raw = antichains_below(tree, q);
  for (auto& f : raw) std::sort(f.begin(), f.end());
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  std::vector<StoppingFamily> out;
  out.reserve(raw.size());
  for (auto& f : raw) out.push_back(StoppingFamily{q, std::move(f)});
  return out;
}

std::uint64_t count_families_recursive(const WeightedTree& tree, NodeId q) {
  // b(v) = 1 + prod b(children); leaves give 2.
  auto closed = [&](auto&& self, NodeId v) -> std::uint64_t {
    std::uint64_t prod = 1;
    for (NodeId c : tree.children(v)) prod *= self(self, c);
    return 1 + prod;
  };
  std::uint64_t prod = 1;
  for (NodeId c : tree.children(q)) prod *= closed(closed, c);
  return prod;
}

std::uint64_t count_families_bitmask(const WeightedTree& tree, NodeId q) {
  auto nodes = nodes_under(tree, q);
  nodes.erase(std::find(nodes.begin(), nodes.end(), q));
  const std::size_t k = nodes.size();
  if (k > 24) throw SizeError("bitmask count limited to 24 strict descendants");
  std::vector<std::vector<bool>> comparable(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      comparable[i][j] = i != j && (is_descendant(tree, nodes[i], nodes[j]) || is_descendant(tree, nodes[j], nodes[i]));
    }
  }
  std::uint64_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      for (std::size_t j = i + 1; j < k; ++j) {
        if ((mask >> j & 1) && comparable[i][j]) {
          ok = false;
          break;
        }
      }
    }
    if (ok) ++count;
  }
  return count;
}

ExtremalRatio naive_carleson_constant(const TreeMeasure& m) {
  const WeightedTree& tree = m.tree();
  ExtremalRatio best{Rational(-1), 0};
  for (NodeId q = 0; q < tree.size(); ++q) {
    Rational box(0);
    for (NodeId v = 0; v < tree.size(); ++v) {
      if (is_descendant(tree, v, q)) box += m.mass(v);
    }
    Rational ratio = box / tree.sigma(q);
    if (ratio > best.value) best = {ratio, q};
  }
  return best;
}

ExtremalRatio naive_top_constant(const TreeMeasure& m) {
  const WeightedTree& tree = m.tree();
  ExtremalRatio best{Rational(-1), 0};
  for (NodeId q = 0; q < tree.size(); ++q) {
    Rational ratio = m.mass(q) / tree.sigma(q);
    if (ratio > best.value) best = {ratio, q};
  }
  return best;
}

Rational naive_local_excess(const TreeMeasure& mu, NodeId qp, const StoppingFamily& family) {
  const WeightedTree& tree = mu.tree();
  Rational outside(0);
  for (NodeId v = 0; v < tree.size(); ++v) {
    if (is_descendant(tree, v, qp) && !under_family(tree, v, family.cubes)) outside += mu.mass(v);
  }
  return outside / tree.sigma(qp);
}

bool naive_smallness(const TreeMeasure& mu, const StoppingFamily& family, const Rational& delta) {
  return small_for(mu, family.scope, family.cubes, delta);
}

MinimalityVerdict brute_force_minimal_check(const TreeMeasure& mu, NodeId q, const Rational& delta,
                                            const StoppingFamily& family) {
  const WeightedTree& tree = mu.tree();
  check_cap(tree, q);
  const auto& f = family.cubes;
  const auto nodes = nodes_under(tree, q);
  auto bad = [&](NodeId v) { return mu.mass(v) >= delta * tree.sigma(v); };

  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == q || !is_descendant(tree, f[i], q)) return {false, tree.label(f[i]) + " is not a strict descendant"};
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (i != j && is_descendant(tree, f[i], f[j])) return {false, "family is not an antichain"};
    }
  }
  if (!small_for(mu, q, f, delta)) return {false, "family fails smallness"};

  int deepest = 0;
  for (NodeId v : nodes) deepest = std::max(deepest, relative_depth(tree, v, q));

  for (int k = 1; k <= deepest; ++k) {
    std::vector<NodeId> up_to_previous;
    for (NodeId m : f) {
      if (relative_depth(tree, m, q) < k) up_to_previous.push_back(m);
    }
    // Once the family covers q nothing is added below.
    Rational covered(0);
    for (NodeId m : up_to_previous) covered += tree.sigma(m);
    if (covered == tree.sigma(q)) break;
    for (NodeId v : nodes) {
      if (relative_depth(tree, v, q) == k && bad(v) && !under_family(tree, v, up_to_previous) &&
          std::find(f.begin(), f.end(), v) == f.end()) {
        return {false, "uncovered bad cube " + tree.label(v) + " missing from the family"};
      }
    }
  }

  for (NodeId x : f) {
    if (bad(x)) continue;
    const int k = relative_depth(tree, x, q);
    std::vector<NodeId> reduced;
    for (NodeId m : f) {
      if (m != x && relative_depth(tree, m, q) <= k) reduced.push_back(m);
    }
    std::vector<NodeId> extended = reduced;
    for (NodeId v : nodes) {
      if (relative_depth(tree, v, q) == k + 1 && !under_family(tree, v, reduced)) extended.push_back(v);
    }
    if (small_for(mu, q, extended, delta)) return {false, "member " + tree.label(x) + " can be deleted"};
  }
  return {true, {}};
}

HypothesisVerdict exhaustive_hypothesis_check(const TreeMeasure& mu, const TreeMeasure& nu, const Rational& delta,
                                              const Rational& C) {
  const WeightedTree& tree = mu.tree();
  check_cap(tree, WeightedTree::root());
  HypothesisVerdict verdict;
  for (NodeId q = 0; q < tree.size(); ++q) {
    const auto nodes = nodes_under(tree, q);
    const std::size_t k = nodes.size();
    std::vector<std::uint32_t> below(k, 0);  // bitmask of local descendants (inclusive)
    std::vector<std::size_t> local_parent(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (is_descendant(tree, nodes[j], nodes[i])) below[i] |= std::uint32_t{1} << j;
      }
      if (i > 0) {
        local_parent[i] = static_cast<std::size_t>(
            std::find(nodes.begin(), nodes.end(), tree.parent(nodes[i])) - nodes.begin());
      }
    }
    std::vector<Rational> mu_rem(k), nu_rem(k);
    for (const auto& family : enumerate_families(tree, q)) {
      std::uint32_t covered = 0;
      for (NodeId f : family.cubes) {
        const auto i = static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), f) - nodes.begin());
        covered |= below[i];
      }
      for (std::size_t i = 0; i < k; ++i) {
        const bool out = !(covered >> i & 1);
        mu_rem[i] = out ? mu.mass(nodes[i]) : Rational(0);
        nu_rem[i] = out ? nu.mass(nodes[i]) : Rational(0);
      }
      // Ids ascend with depth, so a reverse sweep accumulates children first.
      bool admissible = true;
      for (std::size_t i = k; i-- > 0;) {
        if (!(covered >> i & 1) && mu_rem[i] > delta * tree.sigma(nodes[i])) admissible = false;
        if (i > 0) {
          mu_rem[local_parent[i]] += mu_rem[i];
          nu_rem[local_parent[i]] += nu_rem[i];
        }
      }
      if (!admissible) continue;
      ++verdict.pairs_checked;
      if (nu_rem[0] > C * tree.sigma(q)) {
        verdict.holds = false;
        verdict.counterexample = family;
        return verdict;
      }
    }
  }
  return verdict;
}

}  // namespace carleson::oracle
