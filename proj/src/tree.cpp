#include "carleson/tree.hpp"

#include <algorithm>
#include <sstream>

#include "carleson/errors.hpp"

namespace carleson {

Rational CubeId::lower(int k) const {
  return Rational(mpz_class(static_cast<long>(index.at(static_cast<std::size_t>(k))))) * side();
}

Rational CubeId::upper(int k) const {
  return Rational(mpz_class(static_cast<long>(index.at(static_cast<std::size_t>(k)) + 1))) * side();
}

std::string CubeId::to_string() const {
  std::ostringstream out;
  out << "L" << level << "[";
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (k) out << ",";
    out << index[k];
  }
  out << "]";
  return out.str();
}

CubeId unit_cube(int d) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  return CubeId{0, std::vector<std::int64_t>(static_cast<std::size_t>(d), 0)};
}

std::vector<CubeId> child_cubes(const CubeId& q) {
  const int d = q.dimension();
  std::vector<CubeId> out;
  out.reserve(std::size_t{1} << d);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
    CubeId c{q.level + 1, q.index};
    for (int k = 0; k < d; ++k) {
      // First coordinate is the most significant bit, giving lexicographic order.
      std::int64_t b = static_cast<std::int64_t>((bits >> (d - 1 - k)) & 1u);
      c.index[static_cast<std::size_t>(k)] = 2 * q.index[static_cast<std::size_t>(k)] + b;
    }
    out.push_back(std::move(c));
  }
  return out;
}

bool is_subcube(const CubeId& inner, const CubeId& outer) {
  if (inner.dimension() != outer.dimension()) return false;
  if (inner.level < outer.level) return false;
  const int shift = inner.level - outer.level;
  for (std::size_t k = 0; k < inner.index.size(); ++k) {
    if ((inner.index[k] >> shift) != outer.index[k]) return false;
  }
  return true;
}

bool cube_contains(const CubeId& q, std::span<const Rational> x) {
  if (static_cast<int>(x.size()) != q.dimension()) return false;
  for (int k = 0; k < q.dimension(); ++k) {
    const Rational& xk = x[static_cast<std::size_t>(k)];
    if (xk < q.lower(k) || !(xk < q.upper(k))) return false;
  }
  return true;
}

CubeId locate(std::span<const Rational> x, int level) {
  if (x.empty()) throw DomainError("locate: empty point");
  if (level < 0 || level > 62) throw DomainError("locate: level out of range");
  CubeId q{level, std::vector<std::int64_t>(x.size(), 0)};
  const Rational scale(mpz_class(1) << level);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] < 0 || x[k] >= 1) {
      throw DomainError("locate: coordinate " + std::to_string(k) + " = " + carleson::to_string(x[k]) +
                        " outside [0,1)");
    }
    Rational scaled = x[k] * scale;
    q.index[k] = floor_to_int(scaled);
  }
  return q;
}

std::span<const NodeId> WeightedTree::children(NodeId n) const {
  check_node(n);
  return {child_list_.data() + child_begin_[n], child_list_.data() + child_begin_[n + 1]};
}

std::span<const NodeId> WeightedTree::subtree(NodeId n) const {
  check_node(n);
  return {preorder_.data() + tin_[n], preorder_.data() + tout_[n]};
}

std::vector<NodeId> WeightedTree::descendants_at(NodeId n, int k) const {
  std::vector<NodeId> out;
  const int target = depth(n) + k;
  for (NodeId v : subtree(n)) {
    if (depth_[v] == target) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const CubeId& WeightedTree::cube(NodeId n) const {
  if (!is_dyadic()) throw DomainError("tree is not dyadic");
  check_node(n);
  return cubes_[n];
}

std::optional<NodeId> WeightedTree::find(const CubeId& q) const {
  if (!is_dyadic()) return std::nullopt;
  const CubeId& root_cube = cubes_[0];
  if (q.dimension() != dimension_ || !is_subcube(q, root_cube)) return std::nullopt;
  const int k = q.level - root_cube.level;
  if (k > max_depth_) return std::nullopt;
  std::size_t offset = 0;
  for (int j = 0; j < k; ++j) offset += std::size_t{1} << (j * dimension_);
  std::size_t linear = 0;
  for (int a = 0; a < dimension_; ++a) {
    const auto rel = static_cast<std::size_t>(q.index[static_cast<std::size_t>(a)] -
                                              (root_cube.index[static_cast<std::size_t>(a)] << k));
    linear = (linear << k) | rel;
  }
  return static_cast<NodeId>(offset + linear);
}

std::string WeightedTree::label(NodeId n) const {
  check_node(n);
  if (is_dyadic()) return cubes_[n].to_string();
  return labels_.empty() ? "n" + std::to_string(n) : labels_[n];
}

void WeightedTree::check_node(NodeId n) const {
  if (n >= parent_.size()) throw DomainError("unknown node " + std::to_string(n));
}

WeightedTree WeightedTree::dyadic(int d, int depth) { return dyadic(unit_cube(d), depth); }

WeightedTree WeightedTree::dyadic(const CubeId& root, int depth) {
  const int d = root.dimension();
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (depth < 0) throw DomainError("depth must be >= 0");
  if (depth * d > 26) throw DomainError("dyadic tree too large (depth * d > 26)");

  WeightedTree t;
  t.dimension_ = d;
  std::vector<CubeId> level_cubes{root};
  t.cubes_.push_back(root);
  t.parent_.push_back(0);
  t.depth_.push_back(0);
  t.sigma_.push_back(root.volume());
  std::size_t level_start = 0;
  for (int k = 1; k <= depth; ++k) {
    std::vector<std::pair<CubeId, NodeId>> next;
    for (std::size_t i = 0; i < level_cubes.size(); ++i) {
      for (auto& c : child_cubes(level_cubes[i])) {
        next.emplace_back(std::move(c), static_cast<NodeId>(level_start + i));
      }
    }
    std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    level_start = t.cubes_.size();
    level_cubes.clear();
    const Rational vol = root.volume() * pow2_neg(static_cast<unsigned>(k * d));
    for (auto& [c, p] : next) {
      t.cubes_.push_back(c);
      t.parent_.push_back(p);
      t.depth_.push_back(k);
      t.sigma_.push_back(vol);
      level_cubes.push_back(std::move(c));
    }
  }
  t.theta_ = pow2_neg(static_cast<unsigned>(d));
  t.finalize();
  return t;
}

WeightedTree WeightedTree::from_parents(std::vector<NodeId> parents, std::vector<Rational> sigma,
                                        std::vector<std::string> labels, std::optional<Rational> theta) {
  if (parents.empty()) throw DomainError("tree must have a root");
  if (sigma.size() != parents.size()) throw DomainError("sigma size does not match node count");
  if (!labels.empty() && labels.size() != parents.size()) throw DomainError("label count does not match node count");
  WeightedTree t;
  t.parent_ = std::move(parents);
  t.parent_[0] = 0;
  t.sigma_ = std::move(sigma);
  t.labels_ = std::move(labels);
  t.depth_.assign(t.parent_.size(), 0);
  for (std::size_t i = 1; i < t.parent_.size(); ++i) {
    if (t.parent_[i] >= i) throw DomainError("node " + std::to_string(i) + " does not follow its parent");
    t.depth_[i] = t.depth_[t.parent_[i]] + 1;
    if (t.depth_[i] < t.depth_[i - 1]) throw DomainError("node ids are not ordered by depth");
  }
  if (theta) {
    t.theta_ = *theta;
  } else {
    Rational worst(0);
    for (std::size_t i = 1; i < t.parent_.size(); ++i) {
      if (t.sigma_[t.parent_[i]] > 0) worst = max(worst, t.sigma_[i] / t.sigma_[t.parent_[i]]);
    }
    t.theta_ = t.parent_.size() == 1 ? ratio(1, 2) : worst;
  }
  t.finalize();
  return t;
}

void WeightedTree::finalize() {
  const std::size_t n = parent_.size();
  if (!(theta_ > 0 && theta_ < 1)) throw DomainError("theta must lie in (0,1), got " + carleson::to_string(theta_));

  std::vector<std::size_t> counts(n + 1, 0);
  for (std::size_t i = 1; i < n; ++i) ++counts[parent_[i] + 1];
  child_begin_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) child_begin_[i + 1] = child_begin_[i] + counts[i + 1];
  child_list_.assign(n == 0 ? 0 : n - 1, 0);
  std::vector<std::size_t> fill(child_begin_.begin(), child_begin_.end() - 1);
  for (std::size_t i = 1; i < n; ++i) child_list_[fill[parent_[i]]++] = static_cast<NodeId>(i);

  // Preorder with explicit stack; children visited in ascending id order.
  tin_.assign(n, 0);
  tout_.assign(n, 0);
  preorder_.clear();
  preorder_.reserve(n);
  std::vector<std::pair<NodeId, std::size_t>> stack{{0, 0}};
  tin_[0] = 0;
  preorder_.push_back(0);
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const std::size_t begin = child_begin_[v];
    const std::size_t end = child_begin_[v + 1];
    if (begin + next < end) {
      NodeId c = child_list_[begin + next];
      ++next;
      tin_[c] = preorder_.size();
      preorder_.push_back(c);
      stack.emplace_back(c, 0);
    } else {
      tout_[v] = preorder_.size();
      stack.pop_back();
    }
  }

  height_.assign(n, 0);
  max_depth_ = 0;
  for (std::size_t i = n; i-- > 1;) {
    height_[parent_[i]] = std::max(height_[parent_[i]], height_[i] + 1);
  }
  for (std::size_t i = 0; i < n; ++i) max_depth_ = std::max(max_depth_, depth_[i]);

  for (std::size_t i = 0; i < n; ++i) {
    if (!(sigma_[i] > 0)) throw DomainError("sigma of node " + std::to_string(i) + " must be positive");
    if (child_begin_[i] == child_begin_[i + 1]) continue;
    Rational total(0);
    for (std::size_t c = child_begin_[i]; c < child_begin_[i + 1]; ++c) {
      const Rational& sc = sigma_[child_list_[c]];
      if (sc > theta_ * sigma_[i]) {
        throw DomainError("child " + std::to_string(child_list_[c]) + " exceeds theta * sigma(parent)");
      }
      total += sc;
    }
    if (total != sigma_[i]) throw DomainError("children of node " + std::to_string(i) + " do not partition it");
  }
}

}  // namespace carleson
