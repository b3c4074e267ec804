#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "carleson/cli.hpp"
#include "carleson/errors.hpp"
#include "carleson/generate.hpp"
#include "carleson/io.hpp"
#include "support.hpp"

using namespace carleson;
using fixture::cube;
using fixture::q;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / "carleson-tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const cli::RunConfig& cfg) {
  std::ostringstream out, err;
  int code = cli::run(cfg, out, err);
  return {code, out.str(), err.str()};
}

io::Json parse(const std::string& text) { return io::Json::parse(text); }

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/6") == q(1, 2));
  CHECK(parse_rational("-0.125") == q(-1, 8));
  CHECK(parse_rational("3.5e-2") == q(7, 200));
  CHECK(parse_rational("4") == 4);
  CHECK(to_string(q(0)) == "0/1");
  CHECK(to_string(q(6, 4)) == "3/2");
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK_THROWS_AS(parse_rational(""), ParseError);
}

TEST_CASE("measure files round-trip") {
  gen::Random rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    io::TreeSpec spec;
    spec.d = 1 + trial % 2;
    spec.depth = 2 + trial % 2;
    auto tree = io::build_tree(spec, ".");
    TreeMeasure m = fixture::random_measure(tree, rng);
    const std::string text = io::dump(io::measure_to_json(m, spec));
    io::Json doc = io::Json::parse(text);
    CHECK(io::tree_spec_from_json(doc) == spec);
    TreeMeasure back = io::measure_from_json(doc, tree);
    CHECK(back.masses() == m.masses());
    CHECK(io::dump(io::measure_to_json(back, spec)) == text);
  }
}

TEST_CASE("malformed measure files name the field") {
  auto tree = fixture::dyadic(1, 2);
  auto message = [&](const std::string& text) -> std::string {
    try {
      io::measure_from_json(io::Json::parse(text), tree);
    } catch (const ParseError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message(R"({"masses":[{"level":1,"index":[0],"mass":"x"}]})").find("masses[0].mass") != std::string::npos);
  CHECK(message(R"({"masses":[{"level":3,"index":[0],"mass":"1"}]})").find("masses[0]") != std::string::npos);
  CHECK(message(R"({"masses":[{"level":1,"index":[5],"mass":"1"}]})").find("masses[0].index") != std::string::npos);
  CHECK(message(R"({"masses":[{"level":1,"index":[0],"mass":"-1"}]})").find("nonnegative") != std::string::npos);
  CHECK(message(R"({"nothing":1})").find("masses") != std::string::npos);

  fs::path broken = write("broken.json", "{\n  \"tree\": \"dyadic\",\n  oops\n}\n");
  try {
    io::read_json_file(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("generators") {
  SUBCASE("symmetric cascade gives uniform leaves") {
    for (int d = 1; d <= 2; ++d) {
      auto tree = fixture::dyadic(d, 3);
      gen::Params p;
      p.kind = gen::Kind::cascade;
      p.symmetric = true;
      TreeMeasure m = gen::generate(p, tree);
      for (NodeId n = 0; n < tree->size(); ++n) {
        CHECK(m.mass(n) == (tree->is_leaf(n) ? pow2_neg(static_cast<unsigned>(3 * d)) : Rational(0)));
      }
    }
  }
  SUBCASE("random cascade keeps unit mass") {
    auto tree = fixture::dyadic(1, 4);
    gen::Params p;
    p.kind = gen::Kind::cascade;
    p.seed = 77;
    CHECK(gen::generate(p, tree).total() == 1);
  }
  SUBCASE("product is scaled to its target") {
    auto tree = fixture::dyadic(2, 2);
    gen::Params p;
    p.seed = 5;
    p.target = q(3, 7);
    CHECK(carleson_constant(gen::generate(p, tree)).value == q(3, 7));
  }
  SUBCASE("subtree-singular puts C1 inside the focus subtree") {
    auto tree = fixture::dyadic(1, 3);
    gen::Params p;
    p.kind = gen::Kind::subtree_singular;
    p.focus = fixture::node(tree, cube(1, {0}));
    p.zero_num = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      p.seed = seed;
      TreeMeasure m = gen::generate(p, tree);
      if (m.total() == 0) continue;
      CHECK(tree->contains(*p.focus, carleson_constant(m).argmax));
    }
  }
  SUBCASE("fixed seed, identical output") {
    auto tree = fixture::dyadic(1, 4);
    for (auto kind : {gen::Kind::product, gen::Kind::subtree_singular, gen::Kind::cascade}) {
      gen::Params p;
      p.kind = kind;
      p.seed = 1234;
      io::TreeSpec spec;
      spec.depth = 4;
      CHECK(io::dump(io::measure_to_json(gen::generate(p, tree), spec)) ==
            io::dump(io::measure_to_json(gen::generate(p, tree), spec)));
    }
  }
}

TEST_CASE("cli analyze") {
  fs::path zero = write("zero.json", R"({"tree":"dyadic","d":1,"depth":2,"masses":[]})");
  cli::RunConfig cfg;
  cfg.mode = cli::Mode::analyze;
  cfg.mu = zero.string();
  Result r = run(cfg);
  CHECK(r.code == cli::kPass);
  io::Json doc = parse(r.out);
  CHECK(doc["C1"] == "0/1");
  CHECK(doc["C2"] == "0/1");

  cfg.mu = (scratch() / "missing.json").string();
  CHECK(run(cfg).code == cli::kInputError);
}

TEST_CASE("cli extrapolate") {
  fs::path mu = write("badL_mu.json", R"({"tree":"dyadic","d":1,"depth":1,"masses":[{"level":1,"index":[0],"mass":"1/4"}]})");
  fs::path nu = write("badL_nu.json", R"({"tree":"dyadic","d":1,"depth":1,"masses":[{"level":1,"index":[0],"mass":"1/8"}]})");
  cli::RunConfig cfg;
  cfg.mode = cli::Mode::extrapolate;
  cfg.mu = mu.string();
  cfg.nu = nu.string();
  cfg.delta = q(1, 2);
  cfg.C = q(1);
  cfg.trace = true;
  Result r = run(cfg);
  CHECK(r.code == cli::kPass);
  io::Json doc = parse(r.out);
  CHECK(doc["decomposition"]["generations"] == io::Json::parse(R"([["L0[0]"],["L1[0]"]])"));
  CHECK(doc["audit"]["pass"] == true);
  CHECK(doc["trace"].size() == 1);
  CHECK(run(cfg).out == r.out);

  fs::path heavy = write("badL_nu_root.json",
                         R"({"tree":"dyadic","d":1,"depth":1,"masses":[{"level":0,"index":[0],"mass":"1/8"}]})");
  cfg.nu = heavy.string();
  cfg.C = q(1, 100);
  CHECK(run(cfg).code == cli::kHypothesisViolation);

  fs::path other = write("other_tree.json", R"({"tree":"dyadic","d":1,"depth":2,"masses":[]})");
  cfg.nu = other.string();
  CHECK(run(cfg).code == cli::kInputError);

  cfg.nu = nu.string();
  cfg.delta.reset();
  CHECK(run(cfg).code == cli::kInputError);
}

TEST_CASE("cli oracle") {
  fs::path mu = write("d2_mu.json", R"({"tree":"dyadic","d":1,"depth":2,"masses":[{"level":1,"index":[0],"mass":"1/2"}]})");
  cli::RunConfig cfg;
  cfg.mode = cli::Mode::oracle;
  cfg.mu = mu.string();
  cfg.nu = mu.string();
  cfg.delta = q(1, 4);
  cfg.C = q(1);
  Result r = run(cfg);
  CHECK(r.code == cli::kPass);
  io::Json doc = parse(r.out);
  CHECK(doc["counts"]["strict_antichains"] == 25);
  CHECK(doc["counts"]["antichains_with_root"] == 26);

  fs::path big = write("d5.json", R"({"tree":"dyadic","d":1,"depth":5,"masses":[]})");
  cfg.mu = cfg.nu = big.string();
  Result too_big = run(cfg);
  CHECK(too_big.code == cli::kInputError);
  CHECK(too_big.err.find("size error") != std::string::npos);
}

TEST_CASE("cli christ and sawtooth") {
  fs::path space = write("line.json", R"({"points":["a","b","c","d"],
    "dist":[["0","3/10","6/10","9/10"],["3/10","0","3/10","6/10"],["6/10","3/10","0","3/10"],["9/10","6/10","3/10","0"]],
    "weights":["1/4","1/4","1/4","1/4"]})");
  cli::RunConfig cfg;
  cfg.mode = cli::Mode::christ;
  cfg.space = space.string();
  cfg.depth = 6;
  Result r = run(cfg);
  CHECK_MESSAGE(r.code == cli::kPass, r.err);
  if (r.code == cli::kPass) CHECK(parse(r.out)["levels"].size() == 3);

  fs::path mu_atoms = write("mu_atoms.json", R"({"d":1,"atoms":[{"x":["1/3"],"t":"2/3","w":"1"}]})");
  fs::path nu_atoms = write("nu_atoms.json", R"({"d":1,"atoms":[{"x":["1/4"],"t":"3/16","w":"1"},{"x":["0.9"],"t":"0.5","w":"1"}]})");
  fs::path family = write("family.json", R"({"cubes":[{"level":1,"index":[0]}]})");
  cli::RunConfig saw;
  saw.mode = cli::Mode::sawtooth;
  saw.mu_atoms = mu_atoms.string();
  saw.nu_atoms = nu_atoms.string();
  saw.family = family.string();
  saw.depth = 3;
  Result s = run(saw);
  CHECK_MESSAGE(s.code == cli::kPass, s.err);
  if (s.code == cli::kPass) {
    io::Json doc = parse(s.out);
    CHECK(doc["reduction"]["nu_truncation"]["dropped_mass"] == "1/1");
  }
}

TEST_CASE("cli generate is deterministic") {
  cli::RunConfig cfg;
  cfg.mode = cli::Mode::generate;
  cfg.d = 1;
  cfg.depth = 3;
  cfg.kind = "subtree-singular";
  cfg.focus = "1:0";
  cfg.seed = 99;
  Result a = run(cfg), b = run(cfg);
  CHECK(a.code == cli::kPass);
  CHECK(a.out == b.out);
  cfg.kind = "nonsense";
  CHECK(run(cfg).code == cli::kInputError);
}
