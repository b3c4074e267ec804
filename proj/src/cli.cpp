#include "carleson/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "carleson/errors.hpp"
#include "carleson/extrapolation.hpp"
#include "carleson/generate.hpp"
#include "carleson/io.hpp"
#include "carleson/oracle.hpp"
#include "carleson/sawtooth.hpp"

namespace carleson::cli {

using io::Json;
namespace fs = std::filesystem;

Mode mode_from_string(const std::string& name) {
  if (name == "analyze") return Mode::analyze;
  if (name == "extrapolate") return Mode::extrapolate;
  if (name == "sawtooth") return Mode::sawtooth;
  if (name == "christ") return Mode::christ;
  if (name == "oracle") return Mode::oracle;
  if (name == "generate") return Mode::generate;
  throw ParseError("unknown mode '" + name + "'");
}

namespace {

struct Loaded {
  io::TreeSpec spec;
  TreePtr tree;
  TreeMeasure measure;
};

const std::string& need(const std::string& path, const char* what) {
  if (path.empty()) throw ParseError(std::string("missing input: ") + what);
  return path;
}

const Rational& need(const std::optional<Rational>& value, const char* what) {
  if (!value) throw ParseError(std::string("missing ") + what);
  return *value;
}

Loaded load_measure(const std::string& path, const TreePtr& shared = nullptr,
                    const io::TreeSpec* shared_spec = nullptr) {
  Json doc = io::read_json_file(path);
  io::TreeSpec spec = io::tree_spec_from_json(doc);
  TreePtr tree;
  if (shared) {
    if (!(spec == *shared_spec)) throw ParseError(path + ": tree differs from the first measure's tree");
    tree = shared;
  } else {
    tree = io::build_tree(spec, fs::path(path).parent_path());
  }
  TreeMeasure m = io::measure_from_json(doc, tree);
  return Loaded{spec, tree, std::move(m)};
}

std::string label_list(const WeightedTree& tree, const std::vector<NodeId>& nodes) {
  std::string s = "{";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) s += ", ";
    s += tree.label(nodes[i]);
  }
  return s + "}";
}

std::string trace_line(const WeightedTree& tree, const AugmentationStep& step) {
  std::ostringstream os;
  os << "Q=" << tree.label(step.scope) << " level=" << step.level << " remainder=" << step.remainder
     << " bad=" << step.bad_in_remainder << " S=" << label_list(tree, step.selected);
  for (const auto& [kept, witness] : step.certificates) {
    os << " keep(" << tree.label(kept) << " by " << tree.label(witness) << ")";
  }
  return os.str();
}

Json constants_json(const TreeMeasure& m) {
  const WeightedTree& tree = m.tree();
  ExtremalRatio c1 = carleson_constant(m);
  ExtremalRatio c2 = top_constant(m);
  Json out;
  out["C1"] = io::rational_to_json(c1.value);
  out["C1_argmax"] = tree.label(c1.argmax);
  out["C2"] = io::rational_to_json(c2.value);
  out["C2_argmax"] = tree.label(c2.argmax);
  return out;
}

int run_analyze(const RunConfig& cfg, Json& report) {
  Loaded mu = load_measure(need(cfg.mu, "measure"));
  report = constants_json(mu.measure);
  report["nodes"] = mu.tree->size();
  report["total"] = io::rational_to_json(mu.measure.total());
  return kPass;
}

int audit_exit(const AuditReport& audit) {
  if (audit.hypothesis_violation) return kHypothesisViolation;
  return audit.pass ? kPass : kAuditFailure;
}

int run_extrapolate(const RunConfig& cfg, Json& report) {
  const Rational& delta = need(cfg.delta, "--delta");
  const Rational& C = need(cfg.C, "--capc");
  if (delta <= 0) throw DomainError("delta must be positive");
  Loaded mu = load_measure(need(cfg.mu, "--mu"));
  Loaded nu = load_measure(need(cfg.nu, "--nu"), mu.tree, &mu.spec);
  const WeightedTree& tree = *mu.tree;

  StoppingConstruction construction(mu.measure, delta, cfg.trace);
  Decomposition dec = build_decomposition(construction, nu.measure, WeightedTree::root());
  AuditReport audit = audit_bound(mu.measure, nu.measure, delta, C);

  report["decomposition"] = io::decomposition_to_json(tree, dec);
  report["audit"] = io::audit_to_json(tree, audit);
  if (cfg.trace) {
    Json lines = Json::array();
    for (const auto& [q, family] : dec.families) {
      (void)family;
      for (const auto& step : construction.trace(q)) lines.push_back(trace_line(tree, step));
    }
    report["trace"] = std::move(lines);
  }
  return audit_exit(audit);
}

Json identity_json(const SetIdentityReport& r) {
  Json out;
  out["holds"] = r.holds;
  out["atoms_checked"] = r.atoms_checked;
  out["disagreements"] = r.disagreements;
  out["frontier_disagreements"] = r.frontier_disagreements;
  return out;
}

int run_sawtooth(const RunConfig& cfg, Json& report) {
  AtomicMeasure mu = io::atoms_from_json(io::read_json_file(need(cfg.mu_atoms, "--mu-atoms")));
  AtomicMeasure nu = io::atoms_from_json(io::read_json_file(need(cfg.nu_atoms, "--nu-atoms")));
  if (mu.dimension != nu.dimension) throw ParseError("atom files disagree on the dimension");
  std::vector<CubeId> cubes;
  if (!cfg.family.empty()) cubes = io::cubes_from_json(io::read_json_file(cfg.family));
  const CubeId base = unit_cube(mu.dimension);
  SawtoothFunction psi(base, cubes);

  SetIdentityReport id_mu = verify_set_identity(psi, mu);
  SetIdentityReport id_nu = verify_set_identity(psi, nu);
  report["set_identity"] = {{"mu", identity_json(id_mu)}, {"nu", identity_json(id_nu)}};

  DyadicReduction red = reduce_to_dyadic(mu, nu, base, cfg.depth);
  Json trunc;
  trunc["kept_atoms"] = red.nu_truncation.kept.atoms.size();
  trunc["dropped_mass"] = io::rational_to_json(red.nu_truncation.dropped_mass);
  trunc["top_layer_constant"] = io::rational_to_json(red.nu_truncation.top_layer_constant);
  trunc["bound"] = io::rational_to_json(red.nu_truncation.bound);
  trunc["within_bound"] = red.nu_truncation.within_bound;
  report["reduction"] = {{"box_masses_match", true},
                         {"mu", constants_json(red.mu)},
                         {"nu", constants_json(red.nu)},
                         {"nu_truncation", std::move(trunc)}};

  int code = id_mu.holds && id_nu.holds ? kPass : kAuditFailure;
  if (cfg.delta && cfg.C) {
    AuditReport audit = audit_bound(red.mu, red.nu, *cfg.delta, *cfg.C);
    report["audit"] = io::audit_to_json(*red.tree, audit);
    if (code == kPass) code = audit_exit(audit);
  }
  return code;
}

int run_christ(const RunConfig& cfg, Json& report) {
  MetricSpace space = io::metric_from_json(io::read_json_file(need(cfg.space, "--space")));
  ChristTree tree = build_christ_tree(space, cfg.N, cfg.depth);
  Json levels = Json::array();
  for (std::size_t j = 0; j < tree.levels.size(); ++j) {
    Json cells = Json::array();
    for (const auto& cell : tree.levels[j]) {
      Json ids = Json::array();
      for (auto p : cell.points) ids.push_back(space.ids[p]);
      cells.push_back({{"center", space.ids[cell.center]}, {"parent", cell.parent}, {"points", std::move(ids)}});
    }
    levels.push_back({{"scale", io::rational_to_json(tree.scale(static_cast<int>(j)))}, {"cells", std::move(cells)}});
  }
  report["N"] = tree.N;
  report["levels"] = std::move(levels);
  WeightedTree weighted = tree.to_weighted_tree(space);
  report["weighted_tree"] = {{"nodes", weighted.size()}, {"theta", io::rational_to_json(weighted.theta())}};
  ChristAudit audit = audit_christ_properties(tree, space, cfg.d);
  report["audit"] = io::christ_audit_to_json(audit);
  return audit.partition_ok && audit.nesting_ok && audit.separation_ok ? kPass : kAuditFailure;
}

int run_oracle(const RunConfig& cfg, Json& report) {
  const Rational& delta = need(cfg.delta, "--delta");
  const Rational& C = need(cfg.C, "--capc");
  if (delta <= 0) throw DomainError("delta must be positive");
  Loaded mu = load_measure(need(cfg.mu, "--mu"));
  Loaded nu = load_measure(need(cfg.nu, "--nu"), mu.tree, &mu.spec);
  const WeightedTree& tree = *mu.tree;
  const NodeId root = WeightedTree::root();
  int code = kPass;

  const auto families = oracle::enumerate_families(tree, root);
  Json counts;
  counts["strict_antichains"] = families.size();
  counts["antichains_with_root"] = families.size() + 1;
  counts["recursive"] = oracle::count_families_recursive(tree, root);
  if (tree.size() - 1 <= 24) counts["bitmask"] = oracle::count_families_bitmask(tree, root);
  report["counts"] = counts;
  if (counts["recursive"].get<std::size_t>() != families.size()) code = kAuditFailure;

  const ExtremalRatio c1 = carleson_constant(mu.measure), c1n = oracle::naive_carleson_constant(mu.measure);
  const ExtremalRatio c2 = top_constant(mu.measure), c2n = oracle::naive_top_constant(mu.measure);
  const bool constants_agree = c1.value == c1n.value && c2.value == c2n.value && c1.argmax == c1n.argmax &&
                               c2.argmax == c2n.argmax;
  report["constants_agree"] = constants_agree;
  if (!constants_agree) code = kAuditFailure;

  StoppingConstruction construction(mu.measure, delta);
  Json minimality = Json::array();
  for (NodeId q = 0; q < tree.size(); ++q) {
    if (construction.is_bad(q)) continue;
    const StoppingFamily& f = construction.family(q);
    auto verdict = oracle::brute_force_minimal_check(mu.measure, q, delta, f);
    Json entry{{"node", tree.label(q)}, {"family", io::family_to_json(tree, f)}, {"minimal", verdict.ok}};
    if (!verdict.ok) {
      entry["reason"] = verdict.reason;
      code = kAuditFailure;
    }
    minimality.push_back(std::move(entry));
  }
  report["minimality"] = std::move(minimality);

  auto hyp = oracle::exhaustive_hypothesis_check(mu.measure, nu.measure, delta, C);
  Json h{{"holds", hyp.holds}, {"pairs_checked", hyp.pairs_checked}};
  if (hyp.counterexample) h["counterexample"] = io::family_to_json(tree, *hyp.counterexample);
  report["hypothesis"] = std::move(h);
  if (!hyp.holds) code = kHypothesisViolation;
  return code;
}

std::optional<NodeId> parse_focus(const std::string& text, const WeightedTree& tree) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || v >= tree.size()) throw ParseError("--focus: expected a node id or level:j1,j2,...");
    return static_cast<NodeId>(v);
  }
  CubeId q;
  try {
    q.level = std::stoi(text.substr(0, colon));
    std::stringstream rest(text.substr(colon + 1));
    std::string part;
    while (std::getline(rest, part, ',')) q.index.push_back(std::stoll(part));
  } catch (const std::exception&) {
    throw ParseError("--focus: expected level:j1,j2,...");
  }
  auto node = tree.find(q);
  if (!node) throw ParseError("--focus: cube " + q.to_string() + " is not in the tree");
  return node;
}

int run_generate(const RunConfig& cfg, Json& report) {
  io::TreeSpec spec;
  spec.d = cfg.d;
  spec.depth = cfg.depth;
  if (!cfg.space.empty()) {
    spec.kind = "christ-ref";
    spec.space = cfg.space;
    spec.N = cfg.N;
  }
  TreePtr tree = io::build_tree(spec, fs::current_path());
  gen::Params params;
  params.kind = gen::kind_from_string(cfg.kind);
  params.seed = cfg.seed;
  params.target = cfg.target;
  params.symmetric = cfg.symmetric;
  if (cfg.focus) params.focus = parse_focus(*cfg.focus, *tree);
  report = io::measure_to_json(gen::generate(params, tree), spec);
  return kPass;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Json report;
  int code = kPass;
  try {
    if (config.depth < 1 && config.mode != Mode::christ) throw DomainError("depth must be >= 1");
    switch (config.mode) {
      case Mode::analyze:
        code = run_analyze(config, report);
        break;
      case Mode::extrapolate:
        code = run_extrapolate(config, report);
        break;
      case Mode::sawtooth:
        code = run_sawtooth(config, report);
        break;
      case Mode::christ:
        code = run_christ(config, report);
        break;
      case Mode::oracle:
        code = run_oracle(config, report);
        break;
      case Mode::generate:
        code = run_generate(config, report);
        break;
    }
  } catch (const TheoremViolation& e) {
    err << "theorem violation: " << e.what() << "\n";
    return kAuditFailure;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kAuditFailure;
  } catch (const SizeError& e) {
    err << "size error: " << e.what() << "\n";
    return kInputError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  const std::string text = io::dump(report);
  if (config.out.empty()) {
    out << text;
  } else {
    std::ofstream file(config.out, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << config.out << "\n";
      return kInputError;
    }
    file << text;
  }
  return code;
}

}  // namespace carleson::cli
