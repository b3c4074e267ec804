#include "carleson/generate.hpp"

#include "carleson/errors.hpp"

namespace carleson::gen {

Kind kind_from_string(const std::string& name) {
  if (name == "product") return Kind::product;
  if (name == "subtree-singular") return Kind::subtree_singular;
  if (name == "cascade") return Kind::cascade;
  throw ParseError("unknown generator kind '" + name + "' (product, subtree-singular, cascade)");
}

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::product:
      return "product";
    case Kind::subtree_singular:
      return "subtree-singular";
    case Kind::cascade:
      return "cascade";
  }
  return "?";
}

namespace {

std::vector<Rational> product_draws(const WeightedTree& tree, Random& rng, int zero_num) {
  std::vector<Rational> mass(tree.size(), Rational(0));
  for (NodeId n = 0; n < tree.size(); ++n) {
    const bool zero = rng.chance(static_cast<std::uint64_t>(zero_num), 8);
    const Rational u = rng.grid(16);
    if (!zero) mass[n] = u * tree.sigma(n);
  }
  return mass;
}

}  // namespace

TreeMeasure generate(const Params& params, TreePtr tree) {
  Random rng(params.seed);
  const WeightedTree& t = *tree;
  switch (params.kind) {
    case Kind::product: {
      if (params.zero_num < 0 || params.zero_num > 8) throw DomainError("zero probability must be in [0, 8]/8");
      TreeMeasure raw(tree, product_draws(t, rng, params.zero_num));
      const Rational c1 = carleson_constant(raw).value;
      if (params.target == 0 || c1 == 0) return raw;
      return raw.scaled(params.target / c1);
    }
    case Kind::subtree_singular: {
      NodeId focus = params.focus.value_or(t.is_leaf(0) ? 0 : t.children(0).front());
      t.check_node(focus);
      auto draws = product_draws(t, rng, params.zero_num);
      for (NodeId n = 0; n < t.size(); ++n) {
        if (!t.contains(focus, n)) draws[n] = 0;
      }
      return TreeMeasure(tree, std::move(draws));
    }
    case Kind::cascade: {
      std::vector<Rational> flow(t.size(), Rational(0));
      flow[0] = 1;
      for (NodeId n = 0; n < t.size(); ++n) {
        auto kids = t.children(n);
        if (kids.empty()) continue;
        std::vector<Rational> w(kids.size(), Rational(1));
        if (!params.symmetric) {
          for (auto& x : w) x = Rational(static_cast<long>(1 + rng.below(16)));
        }
        Rational total(0);
        for (const auto& x : w) total += x;
        for (std::size_t i = 0; i < kids.size(); ++i) flow[kids[i]] = flow[n] * w[i] / total;
        flow[n] = 0;
      }
      return TreeMeasure(tree, std::move(flow));
    }
  }
  throw DomainError("unknown generator kind");
}

}  // namespace carleson::gen
