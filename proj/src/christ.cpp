#include "carleson/christ.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "carleson/errors.hpp"

namespace carleson {

void MetricSpace::validate() const {
  const std::size_t n = size();
  if (n == 0) throw DomainError("metric space has no points");
  if (dist.size() != n || weights.size() != n) throw DomainError("metric space tables do not match the point count");
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i].size() != n) throw DomainError("distance row " + std::to_string(i) + " has the wrong length");
  }
  Rational total(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0) throw DomainError("negative weight at point " + ids[i]);
    total += weights[i];
    if (dist[i][i] != 0) throw DomainError("nonzero self-distance at point " + ids[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (dist[i][j] != dist[j][i]) throw DomainError("distance matrix is not symmetric at " + ids[i] + ", " + ids[j]);
      if (i != j && !(dist[i][j] > 0)) throw DomainError("points " + ids[i] + " and " + ids[j] + " coincide");
    }
  }
  if (total != 1) throw DomainError("point weights sum to " + to_string(total) + ", expected 1");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (dist[i][k] > dist[i][j] + dist[j][k]) {
          throw DomainError("triangle inequality fails for " + ids[i] + ", " + ids[j] + ", " + ids[k]);
        }
      }
    }
  }
}

Rational MetricSpace::diameter() const {
  Rational d(0);
  for (const auto& row : dist) {
    for (const auto& v : row) d = max(d, v);
  }
  return d;
}

ChristTree build_christ_tree(const MetricSpace& space, int N, int max_depth) {
  const std::size_t n = space.size();
  if (n == 0) throw DomainError("cannot partition an empty point set");
  if (N < 1) throw DomainError("scale ratio N must be >= 1");
  if (max_depth < 0) throw DomainError("max depth must be >= 0");
  for (const auto& row : space.dist) {
    for (const auto& v : row) {
      if (v > 1) throw DomainError("distances must be normalized to at most 1");
    }
  }

  ChristTree tree;
  tree.N = N;
  ChristCell root;
  root.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) root.points[i] = i;
  root.center = 0;
  tree.levels.push_back({root});

  std::vector<std::size_t> centers{0};
  std::vector<char> is_center(n, 0);
  is_center[0] = 1;
  std::vector<Rational> nearest(n);
  for (std::size_t p = 0; p < n; ++p) nearest[p] = space.dist[p][0];
  std::vector<std::size_t> cell_of(n, 0);

  for (int j = 1; j <= max_depth; ++j) {
    const auto& previous = tree.levels.back();
    if (std::all_of(previous.begin(), previous.end(), [](const ChristCell& c) { return c.points.size() == 1; })) {
      break;
    }
    const Rational r = tree.scale(j);

    // Farthest-point additions; the strict comparison keeps the smallest index on ties.
    for (;;) {
      std::optional<std::size_t> far;
      for (std::size_t p = 0; p < n; ++p) {
        if (is_center[p]) continue;
        if (!far || nearest[p] > nearest[*far]) far = p;
      }
      if (!far || nearest[*far] < r) break;
      centers.push_back(*far);
      is_center[*far] = 1;
      for (std::size_t p = 0; p < n; ++p) nearest[p] = min(nearest[p], space.dist[p][*far]);
    }

    std::vector<std::vector<std::size_t>> centers_in(previous.size());
    for (std::size_t c : centers) centers_in[cell_of[c]].push_back(c);
    for (auto& list : centers_in) std::sort(list.begin(), list.end());

    std::vector<std::size_t> assigned(n);
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t parent = cell_of[p];
      std::optional<std::size_t> best;
      for (std::size_t c : centers_in[parent]) {
        if (!best || space.dist[p][c] < space.dist[p][*best]) best = c;
      }
      assigned[p] = (best && space.dist[p][*best] < r) ? *best : previous[parent].center;
    }

    std::map<std::pair<std::size_t, std::size_t>, ChristCell> cells;  // (parent, center)
    for (std::size_t p = 0; p < n; ++p) {
      ChristCell& cell = cells[{cell_of[p], assigned[p]}];
      cell.center = assigned[p];
      cell.parent = cell_of[p];
      cell.points.push_back(p);
    }
    std::vector<ChristCell> level;
    level.reserve(cells.size());
    for (auto& [key, cell] : cells) {
      for (std::size_t p : cell.points) cell_of[p] = level.size();
      level.push_back(std::move(cell));
    }
    tree.levels.push_back(std::move(level));
  }
  return tree;
}

WeightedTree ChristTree::to_weighted_tree(const MetricSpace& space) const {
  // children[j][k]: indices of level-(j+1) cells under cell (j, k).
  std::vector<std::vector<std::vector<std::size_t>>> children(levels.size());
  for (std::size_t j = 0; j < levels.size(); ++j) children[j].resize(levels[j].size());
  for (std::size_t j = 1; j < levels.size(); ++j) {
    for (std::size_t k = 0; k < levels[j].size(); ++k) children[j - 1][levels[j][k].parent].push_back(k);
  }

  std::vector<NodeId> parents;
  std::vector<Rational> sigma;
  std::vector<std::string> labels;
  struct Pending {
    std::size_t level, cell;
    NodeId parent;
  };
  std::deque<Pending> queue{{0, 0, 0}};
  while (!queue.empty()) {
    Pending item = queue.front();
    queue.pop_front();
    const NodeId id = static_cast<NodeId>(parents.size());
    parents.push_back(item.parent);
    Rational s(0);
    for (std::size_t p : levels[item.level][item.cell].points) s += space.weights[p];
    sigma.push_back(s);
    labels.push_back("C" + std::to_string(item.level) + "." + std::to_string(item.cell));
    std::size_t j = item.level;
    std::size_t k = item.cell;
    while (j + 1 < levels.size() && children[j][k].size() == 1) {
      k = children[j][k][0];
      ++j;
    }
    if (j + 1 < levels.size()) {
      for (std::size_t c : children[j][k]) queue.push_back({j + 1, c, id});
    }
  }
  return WeightedTree::from_parents(std::move(parents), std::move(sigma), std::move(labels));
}

ChristAudit audit_christ_properties(const ChristTree& tree, const MetricSpace& space, int d) {
  ChristAudit audit;
  const std::size_t n = space.size();
  auto note = [&](bool& flag, std::string message) {
    flag = false;
    if (audit.failures.size() < 50) audit.failures.push_back(std::move(message));
  };

  audit.diameter_ratio = 0;
  audit.regularity_constant = Rational(0);
  for (std::size_t j = 0; j < tree.levels.size(); ++j) {
    const auto& level = tree.levels[j];
    const Rational r = tree.scale(static_cast<int>(j));
    const Rational ld = pow(r, static_cast<unsigned>(d));
    std::vector<int> hits(n, 0);
    Rational level_ratio(0);
    for (std::size_t k = 0; k < level.size(); ++k) {
      const ChristCell& cell = level[k];
      for (std::size_t p : cell.points) {
        if (p < n) ++hits[p];
      }
      if (j > 0) {
        const auto& parent = tree.levels[j - 1].at(cell.parent).points;
        if (!std::includes(parent.begin(), parent.end(), cell.points.begin(), cell.points.end())) {
          note(audit.nesting_ok, "cell " + std::to_string(j) + "." + std::to_string(k) + " leaves its parent");
        }
      }
      Rational diam(0);
      for (std::size_t a : cell.points) {
        for (std::size_t b : cell.points) diam = max(diam, space.dist[a][b]);
      }
      level_ratio = max(level_ratio, diam / r);

      std::vector<char> inside(n, 0);
      for (std::size_t p : cell.points) inside[p] = 1;
      std::optional<Rational> gap;
      for (std::size_t y = 0; y < n; ++y) {
        if (!inside[y] && (!gap || space.dist[cell.center][y] < *gap)) gap = space.dist[cell.center][y];
      }
      if (gap) {
        Rational c0 = *gap / r;
        if (!audit.interior_ball_constant || c0 < *audit.interior_ball_constant) audit.interior_ball_constant = c0;
      }

      Rational s(0);
      for (std::size_t p : cell.points) s += space.weights[p];
      if (audit.regularity_constant) {
        if (s == 0) {
          audit.regularity_constant.reset();
        } else {
          audit.regularity_constant = max(*audit.regularity_constant, max(s / ld, ld / s));
        }
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      if (hits[p] != 1) {
        note(audit.partition_ok, "point " + space.ids[p] + " is in " + std::to_string(hits[p]) + " cells at level " +
                                     std::to_string(j));
      }
    }
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        if (space.dist[level[a].center][level[b].center] < r) {
          note(audit.separation_ok, "centers of cells " + std::to_string(a) + " and " + std::to_string(b) +
                                        " at level " + std::to_string(j) + " are closer than r_j");
        }
      }
    }
    audit.diameter_ratio_by_level.push_back(level_ratio);
    audit.diameter_ratio = max(audit.diameter_ratio, level_ratio);
  }

  // Ahlfors regularity over closed balls centred at points, radii = distances.
  audit.ahlfors_constant = Rational(1);
  for (std::size_t x = 0; x < n && audit.ahlfors_constant; ++x) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return space.dist[x][a] < space.dist[x][b]; });
    Rational ball(0);
    for (std::size_t i = 0; i < n; ++i) {
      ball += space.weights[order[i]];
      const Rational& radius = space.dist[x][order[i]];
      if (radius == 0) continue;
      if (i + 1 < n && space.dist[x][order[i + 1]] == radius) continue;
      if (ball == 0) {
        audit.ahlfors_constant.reset();
        break;
      }
      const Rational rd = pow(radius, static_cast<unsigned>(d));
      audit.ahlfors_constant = max(*audit.ahlfors_constant, max(ball / rd, rd / ball));
    }
  }
  return audit;
}

}  // namespace carleson
