#include <iostream>

#include <CLI11.hpp>

#include "carleson/cli.hpp"
#include "carleson/errors.hpp"

namespace {

carleson::Rational to_rational(const std::string& text, const char* flag) {
  try {
    return carleson::parse_rational(text);
  } catch (const carleson::ParseError& e) {
    throw CLI::ValidationError(flag, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  using carleson::cli::Mode;
  CLI::App app{"Stopping-time constructions and exact audits for Carleson measures"};
  app.require_subcommand(1);

  carleson::cli::RunConfig cfg;
  std::string delta, capc, target;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--d", cfg.d, "dimension");
    sub->add_option("--depth", cfg.depth, "tree depth below the root");
    sub->add_option("--out", cfg.out, "report path (default: stdout)");
  };
  auto thresholds = [&](CLI::App* sub) {
    sub->add_option("--delta", delta, "smallness threshold p/q");
    sub->add_option("--capc", capc, "hypothesis constant C, p/q");
  };

  auto* analyze = app.add_subcommand("analyze", "C1, C2 and their argmax cubes of a measure file");
  common(analyze);
  analyze->add_option("measure", cfg.mu, "measure file")->required();

  auto* extrapolate = app.add_subcommand("extrapolate", "decomposition and exact audit of the bound");
  common(extrapolate);
  thresholds(extrapolate);
  extrapolate->add_option("--mu", cfg.mu, "mu measure file")->required();
  extrapolate->add_option("--nu", cfg.nu, "nu measure file")->required();
  extrapolate->add_flag("--trace", cfg.trace, "one line per augmentation step");

  auto* sawtooth = app.add_subcommand("sawtooth", "set identity and dyadic reduction of atomic measures");
  common(sawtooth);
  thresholds(sawtooth);
  sawtooth->add_option("--mu-atoms", cfg.mu_atoms, "mu atoms file")->required();
  sawtooth->add_option("--nu-atoms", cfg.nu_atoms, "nu atoms file")->required();
  sawtooth->add_option("--family", cfg.family, "cube family file");

  auto* christ = app.add_subcommand("christ", "Christ cubes of a finite metric space");
  common(christ);
  christ->add_option("--space", cfg.space, "metric space file")->required();
  christ->add_option("--N", cfg.N, "scale exponent: r_j = 2^-Nj");

  auto* oracle = app.add_subcommand("oracle", "exhaustive checks on trees with at most 31 nodes");
  common(oracle);
  thresholds(oracle);
  oracle->add_option("--mu", cfg.mu, "mu measure file")->required();
  oracle->add_option("--nu", cfg.nu, "nu measure file")->required();

  auto* generate = app.add_subcommand("generate", "seeded measure generator");
  common(generate);
  generate->add_option("--kind", cfg.kind, "product | subtree-singular | cascade");
  generate->add_option("--seed", cfg.seed, "64-bit seed");
  generate->add_option("--target", target, "product: target C1, p/q");
  generate->add_option("--focus", cfg.focus, "subtree-singular: node id or level:j1,...");
  generate->add_flag("--symmetric", cfg.symmetric, "cascade: even splits");
  generate->add_option("--space", cfg.space, "build on the Christ tree of this metric space");
  generate->add_option("--N", cfg.N, "scale exponent for --space");

  try {
    app.parse(argc, argv);
    if (!delta.empty()) cfg.delta = to_rational(delta, "--delta");
    if (!capc.empty()) cfg.C = to_rational(capc, "--capc");
    if (!target.empty()) cfg.target = to_rational(target, "--target");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : carleson::cli::kInputError;
  }

  cfg.mode = carleson::cli::mode_from_string(app.get_subcommands().front()->get_name());
  return carleson::cli::run(cfg, std::cout, std::cerr);
}
