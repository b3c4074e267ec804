#include "carleson/sawtooth.hpp"

#include <algorithm>
#include <map>

#include "carleson/errors.hpp"

namespace carleson {

Rational distance_to_complement(const CubeId& q, std::span<const Rational> x) {
  if (!cube_contains(q, x)) return Rational(0);
  Rational best = q.side();
  for (int k = 0; k < q.dimension(); ++k) {
    const Rational& xk = x[static_cast<std::size_t>(k)];
    best = min(best, min(xk - q.lower(k), q.upper(k) - xk));
  }
  return best;
}

bool tent_contains(const CubeId& q, std::span<const Rational> x, const Rational& t) {
  return cube_contains(q, x) && t >= 0 && t <= distance_to_complement(q, x);
}

bool box_contains(const CubeId& q, std::span<const Rational> x, const Rational& t) {
  return cube_contains(q, x) && t > 0 && t <= q.side();
}

SawtoothFunction::SawtoothFunction(CubeId base, std::vector<CubeId> family)
    : base_(std::move(base)), family_(std::move(family)) {
  std::sort(family_.begin(), family_.end());
  for (std::size_t i = 0; i < family_.size(); ++i) {
    if (family_[i].dimension() != base_.dimension() || !is_subcube(family_[i], base_)) {
      throw DomainError("sawtooth cube " + family_[i].to_string() + " is not inside " + base_.to_string());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (is_subcube(family_[i], family_[j]) || is_subcube(family_[j], family_[i])) {
        throw DomainError("sawtooth cubes " + family_[j].to_string() + " and " + family_[i].to_string() +
                          " overlap");
      }
    }
  }
}

SawtoothFunction SawtoothFunction::from_family(const WeightedTree& tree, const StoppingFamily& family) {
  std::vector<CubeId> cubes;
  cubes.reserve(family.cubes.size());
  for (NodeId n : family.cubes) cubes.push_back(tree.cube(n));
  return SawtoothFunction(tree.cube(family.scope), std::move(cubes));
}

const CubeId* SawtoothFunction::cube_of(std::span<const Rational> x) const {
  for (const auto& c : family_) {
    if (cube_contains(c, x)) return &c;
  }
  return nullptr;
}

Rational SawtoothFunction::value(std::span<const Rational> x) const {
  const CubeId* c = cube_of(x);
  return c ? distance_to_complement(*c, x) : Rational(0);
}

bool region_contains(const SawtoothFunction& psi, std::span<const Rational> x, const Rational& t) {
  return t >= psi.value(x);
}

SetIdentityReport verify_set_identity(const SawtoothFunction& psi, const AtomicMeasure& m) {
  SetIdentityReport report;
  const CubeId& q = psi.base();
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    const Atom& a = m.atoms[i];
    ++report.atoms_checked;
    const bool in_box = box_contains(q, a.x, a.t);
    const bool left = in_box && region_contains(psi, a.x, a.t);

    bool in_family_box = false;
    bool in_box_outside_tent = false;
    for (const auto& c : psi.family()) {
      if (box_contains(c, a.x, a.t)) {
        in_family_box = true;
        if (!tent_contains(c, a.x, a.t)) in_box_outside_tent = true;
      }
    }
    const bool right = (in_box && !in_family_box) || in_box_outside_tent;
    if (left != right) {
      report.holds = false;
      report.disagreements.push_back(i);
      const Rational v = psi.value(a.x);
      if (v > 0 && a.t == v) ++report.frontier_disagreements;
    }
  }
  return report;
}

Truncation truncate_outside_tent(const AtomicMeasure& m, const CubeId& q) {
  Truncation out;
  out.kept.dimension = m.dimension;
  out.dropped_mass = 0;
  std::map<CubeId, Rational> top_layers;
  for (const auto& a : m.atoms) {
    if (!box_contains(q, a.x, a.t)) {
      out.kept.atoms.push_back(a);
      continue;
    }
    // Top layer of the dyadic subcube of q whose height band holds t.
    int level = q.level;
    Rational side = q.side();
    while (!(a.t > side / 2)) {
      side /= 2;
      ++level;
    }
    top_layers[locate(a.x, level)] += a.w;
    if (tent_contains(q, a.x, a.t)) {
      out.kept.atoms.push_back(a);
    } else {
      out.dropped_mass += a.w;
    }
  }
  out.top_layer_constant = 0;
  for (const auto& [cube, mass] : top_layers) out.top_layer_constant = max(out.top_layer_constant, mass / cube.volume());
  out.bound = (out.top_layer_constant + m.dimension) * q.volume();
  out.within_bound = out.dropped_mass <= out.bound;
  return out;
}

DyadicReduction reduce_to_dyadic(const AtomicMeasure& mu_atoms, const AtomicMeasure& nu_atoms, const CubeId& q,
                                 int depth) {
  if (mu_atoms.dimension != q.dimension() || nu_atoms.dimension != q.dimension()) {
    throw DomainError("atom dimension does not match the base cube");
  }
  Truncation truncation = truncate_outside_tent(nu_atoms, q);
  auto tree = std::make_shared<const WeightedTree>(WeightedTree::dyadic(q, depth));
  TreeMeasure mu = tree_measure_from_atoms(mu_atoms, tree);
  TreeMeasure nu = tree_measure_from_atoms(truncation.kept, tree);
  for (NodeId n = 0; n < tree->size(); ++n) {
    const CubeId& c = tree->cube(n);
    if (mu.subtree_mass(n) != atomic_box_mass(mu_atoms, c) || nu.subtree_mass(n) != atomic_box_mass(truncation.kept, c)) {
      throw TheoremViolation("box mass mismatch after discretization at " + c.to_string());
    }
  }
  return DyadicReduction{tree, std::move(mu), std::move(nu), std::move(truncation)};
}

}  // namespace carleson
