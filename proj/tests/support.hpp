#pragma once
// Fixtures and seeded random instances shared by the unit and acceptance tests.

#include <algorithm>
#include <map>
#include <memory>
#include <vector>

#include "carleson/christ.hpp"
#include "carleson/extrapolation.hpp"
#include "carleson/generate.hpp"
#include "carleson/measures.hpp"
#include "carleson/sawtooth.hpp"
#include "carleson/tree.hpp"

namespace fixture {

using carleson::AtomicMeasure;
using carleson::CubeId;
using carleson::NodeId;
using carleson::Rational;
using carleson::ratio;
using carleson::TreeMeasure;
using carleson::TreePtr;
using carleson::WeightedTree;

inline Rational q(long p, long d = 1) { return ratio(p, d); }

inline TreePtr dyadic(int d, int depth) { return std::make_shared<const WeightedTree>(WeightedTree::dyadic(d, depth)); }

inline CubeId cube(int level, std::vector<std::int64_t> index) { return CubeId{level, std::move(index)}; }

inline NodeId node(const TreePtr& tree, const CubeId& c) { return tree->find(c).value(); }

/// Measure with the listed cube masses, zero elsewhere.
inline TreeMeasure measure(const TreePtr& tree, const std::vector<std::pair<CubeId, Rational>>& masses) {
  std::vector<Rational> m(tree->size(), Rational(0));
  for (const auto& [c, v] : masses) m[node(tree, c)] += v;
  return TreeMeasure(tree, std::move(m));
}

/// mass(Q) = factor * sigma(Q) everywhere.
inline TreeMeasure proportional(const TreePtr& tree, const Rational& factor) {
  std::vector<Rational> m(tree->size());
  for (NodeId n = 0; n < tree->size(); ++n) m[n] = factor * tree->sigma(n);
  return TreeMeasure(tree, std::move(m));
}

/// Product-style draws: mass(Q) = u sigma(Q), u in {0, 1/8, ..., 1}, zero with
/// probability 3/8.
inline TreeMeasure random_measure(const TreePtr& tree, carleson::gen::Random& rng) {
  std::vector<Rational> m(tree->size(), Rational(0));
  for (NodeId n = 0; n < tree->size(); ++n) {
    if (rng.chance(3, 8)) continue;
    m[n] = rng.grid(8) * tree->sigma(n);
  }
  return TreeMeasure(tree, std::move(m));
}

/// delta = C1(mu) * k / 8 with k in 1..8 (1 for the zero measure). Spreads
/// bad sets from "almost everything" to "only the heaviest top layers".
inline Rational random_delta(const TreeMeasure& mu, carleson::gen::Random& rng) {
  Rational c1 = carleson::carleson_constant(mu).value;
  if (c1 == 0) return 1;
  return c1 * ratio(static_cast<long>(1 + rng.below(8)), 8);
}

/// Random finite tree with canonical ids: each internal node gets 2..4
/// children with positive integer weights, down to `depth` levels.
inline TreePtr random_tree(carleson::gen::Random& rng, int depth, std::size_t max_nodes) {
  std::vector<NodeId> parents{0};
  std::vector<Rational> sigma{Rational(1)};
  std::vector<int> level{0};
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (level[i] >= depth || (i != 0 && rng.chance(1, 4))) continue;
    const std::size_t k = 2 + rng.below(3);
    if (parents.size() + k > max_nodes) continue;
    std::vector<long> w(k);
    long total = 0;
    for (auto& x : w) total += (x = 1 + static_cast<long>(rng.below(6)));
    for (std::size_t c = 0; c < k; ++c) {
      parents.push_back(static_cast<NodeId>(i));
      sigma.push_back(sigma[i] * ratio(w[c], total));
      level.push_back(level[i] + 1);
    }
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < parents.size(); ++i) labels.push_back("n" + std::to_string(i));
  return std::make_shared<const WeightedTree>(
      WeightedTree::from_parents(std::move(parents), std::move(sigma), std::move(labels)));
}

/// Points with coordinates k/256 in [0,1)^dim, pairwise distinct, sup-norm
/// distances, random positive weights normalized to 1.
inline carleson::MetricSpace random_space(carleson::gen::Random& rng, std::size_t n, int dim) {
  std::vector<std::vector<long>> pts;
  while (pts.size() < n) {
    std::vector<long> p(static_cast<std::size_t>(dim));
    for (auto& c : p) c = static_cast<long>(rng.below(256));
    if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(std::move(p));
  }
  carleson::MetricSpace s;
  long total = 0;
  std::vector<long> w(n);
  for (auto& x : w) total += (x = 1 + static_cast<long>(rng.below(4)));
  s.dist.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    s.ids.push_back("p" + std::to_string(i));
    s.weights.push_back(ratio(w[i], total));
    for (std::size_t j = 0; j < n; ++j) {
      long m = 0;
      for (int k = 0; k < dim; ++k) m = std::max(m, std::abs(pts[i][static_cast<std::size_t>(k)] - pts[j][static_cast<std::size_t>(k)]));
      s.dist[i][j] = ratio(m, 256);
    }
  }
  return s;
}

/// 2^m equally spaced points {k / 2^m} with uniform weights.
inline carleson::MetricSpace uniform_grid(std::size_t n) {
  carleson::MetricSpace s;
  s.dist.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    s.ids.push_back("x" + std::to_string(i));
    s.weights.push_back(ratio(1, static_cast<long>(n)));
    for (std::size_t j = 0; j < n; ++j) {
      s.dist[i][j] = ratio(std::abs(static_cast<long>(i) - static_cast<long>(j)), static_cast<long>(n));
    }
  }
  return s;
}

/// Atoms with dyadic x (denominator 2^(depth+3)) and heights t = k / (3 * 2^(depth+1)),
/// k > 3 and not a multiple of 3, so no height ever equals a dyadic quantity; weights in {1/4, ..., 1}.
inline AtomicMeasure random_atoms(carleson::gen::Random& rng, std::size_t count, int d, int depth) {
  AtomicMeasure m;
  m.dimension = d;
  const long xden = 1L << (depth + 3);
  const long tden = 3L << (depth + 1);
  for (std::size_t i = 0; i < count; ++i) {
    carleson::Atom a;
    for (int k = 0; k < d; ++k) a.x.push_back(ratio(static_cast<long>(rng.below(static_cast<std::uint64_t>(xden))), xden));
    // t in (2^-(depth+1), 1]: the numerator ranges over (3, tden].
    long num = 0;
    do {
      num = 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(tden)));
    } while (num % 3 == 0 || num <= 3);
    a.t = ratio(num, tden);
    a.w = ratio(1 + static_cast<long>(rng.below(4)), 4);
    m.atoms.push_back(std::move(a));
  }
  return m;
}

/// Random antichain of dyadic cubes below the unit cube down to `depth`.
inline std::vector<CubeId> random_family(carleson::gen::Random& rng, int d, int depth) {
  std::vector<CubeId> out;
  auto visit = [&](auto&& self, const CubeId& c) -> void {
    if (c.level > 0 && rng.chance(1, 3)) {
      out.push_back(c);
      return;
    }
    if (c.level == depth) return;
    for (const auto& k : carleson::child_cubes(c)) self(self, k);
  };
  visit(visit, carleson::unit_cube(d));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fixture
