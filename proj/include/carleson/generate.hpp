#pragma once
// Seeded test-corpus generators for tree measures.
//
// All randomness comes from std::mt19937_64 seeded with the 64-bit seed; an
// integer draw below k is `engine() % k`. Both are fully specified, so a
// (kind, tree, seed) triple yields the same measure everywhere.

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "carleson/measures.hpp"
#include "carleson/tree.hpp"

namespace carleson::gen {

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform-ish integer in [0, k); k > 0.
  std::uint64_t below(std::uint64_t k) { return engine_() % k; }
  /// i / den with i uniform in [0, den].
  Rational grid(std::uint64_t den) { return ratio(static_cast<long>(below(den + 1)), static_cast<long>(den)); }
  bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

 private:
  std::mt19937_64 engine_;
};

enum class Kind { product, subtree_singular, cascade };

Kind kind_from_string(const std::string& name);
std::string to_string(Kind kind);

struct Params {
  Kind kind = Kind::product;
  std::uint64_t seed = 0;
  /// product: the Carleson constant the masses are scaled to (0 keeps raw draws).
  Rational target = 1;
  /// product: a node gets zero mass with probability zero_num / 8.
  int zero_num = 2;
  /// subtree-singular: the node whose subtree receives all mass; defaults to
  /// the first child of the root.
  std::optional<NodeId> focus;
  /// cascade: split evenly among children instead of randomly.
  bool symmetric = false;
};

/// product: mass(Q) = u_Q sigma(Q) with u_Q in {0, 1/16, ..., 1}, zero with
///   the configured probability, then rescaled so C1 equals `target`.
/// subtree-singular: product draws restricted to the focus subtree.
/// cascade: unit mass split from the root down with random positive integer
///   proportions (1..16 each); only leaves carry mass.
TreeMeasure generate(const Params& params, TreePtr tree);

}  // namespace carleson::gen
