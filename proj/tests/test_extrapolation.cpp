#include <doctest.h>

#include "carleson/errors.hpp"
#include "carleson/oracle.hpp"
#include "support.hpp"

using namespace carleson;
using fixture::cube;
using fixture::q;

namespace {

StoppingFamily family(const fixture::TreePtr& tree, NodeId scope, std::vector<CubeId> cubes) {
  StoppingFamily f{scope, {}};
  for (const auto& c : cubes) f.cubes.push_back(fixture::node(tree, c));
  std::sort(f.cubes.begin(), f.cubes.end());
  return f;
}

// d=1, D=1, mu = 1/4 on L.
struct BadL {
  fixture::TreePtr tree = fixture::dyadic(1, 1);
  TreeMeasure mu = fixture::measure(tree, {{cube(1, {0}), q(1, 4)}});
};

}  // namespace

TEST_CASE("bad set") {
  auto tree = fixture::dyadic(1, 2);
  CHECK(bad_set(TreeMeasure::zero(tree), q(1, 3)).empty());
  BadL f;
  CHECK(bad_set(f.mu, q(1, 2)) == std::vector<NodeId>{1});
  CHECK(bad_set(fixture::proportional(tree, q(1)), q(1)).size() == tree->size());
}

TEST_CASE("local excess") {
  auto tree = fixture::dyadic(1, 2);
  TreeMeasure mu = fixture::measure(tree, {{cube(0, {0}), q(1, 8)}, {cube(2, {0}), q(1, 8)}});
  SUBCASE("a member covering Qp removes everything") {
    StoppingFamily f = family(tree, 0, {cube(1, {0})});
    CHECK(local_excess(mu, 1, f) == 0);
    CHECK(local_excess(mu, fixture::node(tree, cube(2, {0})), f) == 0);
  }
  SUBCASE("empty family leaves the whole box") {
    StoppingFamily f{0, {}};
    CHECK(local_excess(mu, 0, f) == q(1, 4));
    CHECK(local_excess(mu, 1, f) == q(1, 4));
  }
  SUBCASE("covered subtree sums are subtracted") {
    CHECK(local_excess(mu, 0, family(tree, 0, {cube(1, {0})})) == q(1, 8));
  }
}

TEST_CASE("smallness") {
  auto tree = fixture::dyadic(1, 2);
  CHECK(smallness_holds(TreeMeasure::zero(tree), StoppingFamily{0, {}}, q(1, 100)).holds);
  TreeMeasure heavy_kids = fixture::measure(tree, {{cube(1, {0}), q(1)}, {cube(1, {1}), q(1)}});
  CHECK(smallness_holds(heavy_kids, family(tree, 0, {cube(1, {0}), cube(1, {1})}), q(1, 100)).holds);

  BadL f;
  SmallnessResult r = smallness_holds(f.mu, StoppingFamily{0, {}}, q(1, 4));
  CHECK_FALSE(r.holds);
  REQUIRE(r.violator.has_value());
  CHECK(*r.violator == 1);
  CHECK(r.violator_excess == q(1, 2));
}

TEST_CASE("minimal augmentation") {
  SUBCASE("zero measure selects nothing") {
    auto tree = fixture::dyadic(1, 3);
    TreeMeasure mu = TreeMeasure::zero(tree);
    StoppingFamily f{0, {}};
    for (int n = 0; n < 3; ++n) {
      AugmentationStep step;
      f = minimal_augmentation(mu, f, n, q(1, 2), &step);
      CHECK(step.selected.empty());
    }
    CHECK(f.cubes.empty());
  }
  SUBCASE("bad L joins with S empty") {
    auto tree = fixture::dyadic(1, 2);
    TreeMeasure mu = fixture::measure(tree, {{cube(1, {0}), q(1, 2)}});
    AugmentationStep step;
    StoppingFamily f1 = minimal_augmentation(mu, StoppingFamily{0, {}}, 0, q(1, 4), &step);
    CHECK(f1.cubes == std::vector<NodeId>{1});
    CHECK(step.selected.empty());
    CHECK(step.bad_in_remainder == 1);
    CHECK(step.remainder == 2);
  }
  SUBCASE("four bad leaves arrive at level 2") {
    auto tree = fixture::dyadic(1, 2);
    TreeMeasure mu = fixture::measure(
        tree, {{cube(2, {0}), q(1, 16)}, {cube(2, {1}), q(1, 16)}, {cube(2, {2}), q(1, 16)}, {cube(2, {3}), q(1, 16)}});
    CHECK(bad_set(mu, q(1, 8)).size() == 4);
    StoppingFamily f1 = minimal_augmentation(mu, StoppingFamily{0, {}}, 0, q(1, 8));
    CHECK(f1.cubes.empty());
    AugmentationStep step;
    StoppingFamily f2 = minimal_augmentation(mu, f1, 1, q(1, 8), &step);
    CHECK(f2.cubes == std::vector<NodeId>{3, 4, 5, 6});
    CHECK(step.selected.empty());
  }
  SUBCASE("a bad scope is refused") {
    BadL f;
    CHECK_THROWS_AS(minimal_augmentation(f.mu, StoppingFamily{1, {}}, 0, q(1, 2)), PreconditionError);
  }
}

TEST_CASE("stopping family") {
  SUBCASE("zero measure") {
    auto tree = fixture::dyadic(2, 2);
    CHECK(build_stopping_family(TreeMeasure::zero(tree), 0, q(1)).cubes.empty());
  }
  SUBCASE("bad L") {
    auto tree = fixture::dyadic(1, 2);
    TreeMeasure mu = fixture::measure(tree, {{cube(1, {0}), q(1, 2)}});
    CHECK(build_stopping_family(mu, 0, q(1, 4)).cubes == std::vector<NodeId>{1});
    auto families = oracle::enumerate_families(*tree, 0);
    bool listed = false;
    for (const auto& f : families) listed = listed || f.cubes == std::vector<NodeId>{1};
    CHECK(listed);
  }
  SUBCASE("half-threshold uniform measure needs a nonempty S") {
    auto tree = fixture::dyadic(1, 3);
    const Rational delta = q(1, 2);
    TreeMeasure mu = fixture::proportional(tree, delta / 2);
    CHECK(bad_set(mu, delta).empty());
    std::vector<AugmentationStep> trace;
    StoppingFamily f = build_stopping_family(mu, 0, delta, &trace);
    CHECK_FALSE(f.cubes.empty());
    CHECK(smallness_holds(mu, f, delta).holds);
    CHECK(oracle::naive_smallness(mu, f, delta));
    auto verdict = oracle::brute_force_minimal_check(mu, 0, delta, f);
    CHECK_MESSAGE(verdict.ok, verdict.reason);
    CHECK_FALSE(trace.empty());
  }
}

TEST_CASE("decomposition") {
  SUBCASE("nu = 0") {
    auto tree = fixture::dyadic(1, 2);
    gen::Random rng(3);
    TreeMeasure mu = fixture::random_measure(tree, rng);
    Decomposition dec = build_decomposition(mu, TreeMeasure::zero(tree), 0, q(1, 4));
    for (const auto& [n, mass] : dec.region_mass) CHECK(mass == 0);
  }
  SUBCASE("mu = 0 gives one region") {
    auto tree = fixture::dyadic(1, 2);
    TreeMeasure nu = fixture::proportional(tree, q(1));
    Decomposition dec = build_decomposition(TreeMeasure::zero(tree), nu, 0, q(1, 2));
    REQUIRE(dec.generations.size() == 1);
    CHECK(dec.region_mass.size() == 1);
    CHECK(dec.region_mass.at(0) == nu.total());
    CHECK(dec.families.at(0).cubes.empty());
    CHECK(dec.witnesses.empty());
  }
  SUBCASE("bad L with uniform nu") {
    BadL f;
    TreeMeasure nu = fixture::proportional(f.tree, q(1));
    Decomposition dec = build_decomposition(f.mu, nu, 0, q(1, 2));
    REQUIRE(dec.generations.size() == 2);
    CHECK(dec.generations[0] == std::vector<NodeId>{0});
    CHECK(dec.generations[1] == std::vector<NodeId>{1});
    CHECK(dec.region_mass.at(0) == q(3, 2));
    CHECK(dec.region_mass.at(1) == q(1, 2));
    CHECK(dec.bad == std::vector<NodeId>{1});
    CHECK(dec.witnesses.empty());
  }
}

TEST_CASE("partition, smallness and witnesses on random instances") {
  gen::Random rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    auto tree = trial % 3 == 2 ? fixture::random_tree(rng, 4, 50) : fixture::dyadic(1 + trial % 2, trial % 2 ? 2 : 4);
    TreeMeasure mu = fixture::random_measure(tree, rng);
    TreeMeasure nu = fixture::random_measure(tree, rng);
    const Rational delta = fixture::random_delta(mu, rng);
    Decomposition dec = build_decomposition(mu, nu, 0, delta);
    Rational sum(0);
    for (const auto& [n, mass] : dec.region_mass) sum += mass;
    CHECK(sum == nu.total());

    const Rational floor = (1 - tree->theta()) * delta;
    for (const auto& [scope, f] : dec.families) {
      CHECK(smallness_holds(mu, f, delta).holds);
      for (NodeId m : f.cubes) {
        if (mu.mass(m) >= delta * tree->sigma(m)) continue;
        REQUIRE(dec.witnesses.count(m) == 1);
        NodeId w = dec.witnesses.at(m);
        CHECK(tree->contains(scope, w));
        CHECK(tree->contains(w, m));
        CHECK(local_excess(mu, w, f) >= floor);
      }
      auto cover = maximal_witness_cover(mu, f, delta);
      for (std::size_t i = 0; i < cover.size(); ++i) {
        for (std::size_t j = i + 1; j < cover.size(); ++j) {
          CHECK_FALSE(tree->contains(cover[i], cover[j]));
          CHECK_FALSE(tree->contains(cover[j], cover[i]));
        }
      }
    }
  }
}

TEST_CASE("audit formula") {
  // C2 = 1, C = 1, theta = 1/2, C1(mu) = 1, delta = 1/2.
  auto tree = fixture::dyadic(1, 1);
  TreeMeasure mu = fixture::measure(tree, {{cube(0, {0}), q(1, 2)}, {cube(1, {0}), q(1, 2)}});
  REQUIRE(carleson_constant(mu).value == 1);
  TreeMeasure nu = fixture::measure(tree, {{cube(1, {0}), q(1, 2)}});
  REQUIRE(top_constant(nu).value == 1);
  AuditReport r = audit_bound(mu, nu, q(1, 2), q(1));
  CHECK(r.predicted_bound == 6);
  CHECK(r.root_term_bound == 7);
}

TEST_CASE("audit of nu = 0 passes") {
  gen::Random rng(4);
  auto tree = fixture::dyadic(1, 3);
  TreeMeasure mu = fixture::random_measure(tree, rng);
  AuditReport r = audit_bound(mu, TreeMeasure::zero(tree), q(1, 3), q(1));
  CHECK(r.pass);
  CHECK(r.measured_C1_nu == 0);
}

TEST_CASE("audit passes for nu = c mu with delta below C1(mu)") {
  gen::Random rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    auto tree = fixture::dyadic(1, 1 + trial % 5);
    TreeMeasure mu = fixture::random_measure(tree, rng);
    if (mu.total() == 0) continue;
    const Rational c(static_cast<long>(1 + rng.below(4)), 2);
    TreeMeasure nu = mu.scaled(c);
    const Rational delta = fixture::random_delta(mu, rng);
    AuditReport r = audit_bound(mu, nu, delta, c * carleson_constant(mu).value);
    CHECK_MESSAGE(r.pass, (r.failures.empty() ? std::string() : r.failures.front()));
  }
}

TEST_CASE("the bound without the root term fails when mu carries no mass") {
  // Every family is empty, so nu itself must satisfy the hypothesis with C = C1(nu);
  // the bound that drops the root term predicts 0.
  auto tree = fixture::dyadic(1, 2);
  TreeMeasure nu = fixture::proportional(tree, q(1));
  const Rational C = carleson_constant(nu).value;
  AuditReport r = audit_bound(TreeMeasure::zero(tree), nu, q(1, 2), C);
  CHECK_FALSE(r.hypothesis_violation.has_value());
  CHECK(r.partition_ok);
  CHECK(r.bad_part_ok);
  CHECK(r.witness_cover_ok);
  CHECK(r.good_part_ok);
  CHECK(r.predicted_bound == 0);
  CHECK_FALSE(r.bound_ok);
  CHECK(r.root_term_bound_ok);
  CHECK_FALSE(r.pass);
}

TEST_CASE("audit reports hypothesis violations") {
  auto tree = fixture::dyadic(1, 2);
  TreeMeasure nu = fixture::proportional(tree, q(1));
  AuditReport r = audit_bound(TreeMeasure::zero(tree), nu, q(1, 2), q(1, 10));
  CHECK(r.hypothesis_violation.has_value());
  CHECK_FALSE(r.pass);
}
