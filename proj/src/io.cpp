#include "carleson/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "carleson/errors.hpp"

namespace carleson::io {

namespace {

const Json& require(const Json& doc, const char* key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return doc.at(key);
}

int int_from_json(const Json& value, const std::string& field) {
  if (!value.is_number_integer()) throw ParseError(field + ": expected an integer");
  return value.get<int>();
}

}  // namespace

Rational rational_from_json(const Json& value, const std::string& field) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) {
      return value.is_number_unsigned() ? parse_rational(std::to_string(value.get<std::uint64_t>()))
                                        : parse_rational(std::to_string(value.get<std::int64_t>()));
    }
    if (value.is_number_float()) {
      // Shortest round-trip decimal, which is the literal written in the file.
      char buffer[64];
      auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value.get<double>());
      if (ec != std::errc()) throw ParseError(field + ": unreadable number");
      return parse_rational(std::string_view(buffer, static_cast<std::size_t>(end - buffer)));
    }
  } catch (const ParseError& e) {
    throw ParseError(field + ": " + e.what());
  }
  throw ParseError(field + ": expected a rational (\"p/q\" string or number)");
}

Json rational_to_json(const Rational& value) { return to_string(value); }

Json cube_to_json(const CubeId& q) {
  Json out;
  out["level"] = q.level;
  out["index"] = q.index;
  return out;
}

CubeId cube_from_json(const Json& value, const std::string& field) {
  CubeId q;
  q.level = int_from_json(require(value, "level", field), field + ".level");
  const Json& index = require(value, "index", field);
  if (!index.is_array() || index.empty()) throw ParseError(field + ".index: expected a nonempty array");
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (!index[k].is_number_integer()) throw ParseError(field + ".index[" + std::to_string(k) + "]: expected an integer");
    q.index.push_back(index[k].get<std::int64_t>());
  }
  if (q.level < 0) throw ParseError(field + ".level: must be >= 0");
  for (auto j : q.index) {
    if (j < 0 || (q.level < 62 && j >= (std::int64_t{1} << q.level))) {
      throw ParseError(field + ".index: entry out of range for level " + std::to_string(q.level));
    }
  }
  return q;
}

TreeSpec tree_spec_from_json(const Json& doc) {
  TreeSpec spec;
  const Json& kind = require(doc, "tree", "measure");
  if (!kind.is_string()) throw ParseError("measure.tree: expected a string");
  spec.kind = kind.get<std::string>();
  spec.depth = int_from_json(require(doc, "depth", "measure"), "measure.depth");
  if (spec.kind == "dyadic") {
    spec.d = int_from_json(require(doc, "d", "measure"), "measure.d");
  } else if (spec.kind == "christ-ref") {
    const Json& space = require(doc, "space", "measure");
    if (!space.is_string()) throw ParseError("measure.space: expected a path string");
    spec.space = space.get<std::string>();
    spec.N = int_from_json(require(doc, "N", "measure"), "measure.N");
    if (doc.contains("d")) spec.d = int_from_json(doc.at("d"), "measure.d");
  } else {
    throw ParseError("measure.tree: expected \"dyadic\" or \"christ-ref\"");
  }
  return spec;
}

TreePtr build_tree(const TreeSpec& spec, const std::filesystem::path& base_dir) {
  if (spec.kind == "dyadic") return std::make_shared<const WeightedTree>(WeightedTree::dyadic(spec.d, spec.depth));
  std::filesystem::path path = spec.space;
  if (path.is_relative()) path = base_dir / path;
  MetricSpace space = metric_from_json(read_json_file(path));
  ChristTree christ = build_christ_tree(space, spec.N, spec.depth);
  return std::make_shared<const WeightedTree>(christ.to_weighted_tree(space));
}

TreeMeasure measure_from_json(const Json& doc, const TreePtr& tree) {
  const Json& masses = require(doc, "masses", "measure");
  if (!masses.is_array()) throw ParseError("measure.masses: expected an array");
  std::vector<Rational> mass(tree->size(), Rational(0));
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const std::string where = "measure.masses[" + std::to_string(i) + "]";
    const Json& entry = masses[i];
    NodeId node = 0;
    if (entry.is_object() && entry.contains("node")) {
      const int raw = int_from_json(entry.at("node"), where + ".node");
      if (raw < 0 || static_cast<std::size_t>(raw) >= tree->size()) throw ParseError(where + ".node: unknown node");
      node = static_cast<NodeId>(raw);
    } else {
      CubeId q = cube_from_json(entry, where);
      auto found = tree->find(q);
      if (!found) throw ParseError(where + ": cube " + q.to_string() + " is not in the tree");
      node = *found;
    }
    Rational m = rational_from_json(require(entry, "mass", where), where + ".mass");
    if (m < 0) throw ParseError(where + ".mass: must be nonnegative");
    mass[node] += m;
  }
  return TreeMeasure(tree, std::move(mass));
}

Json measure_to_json(const TreeMeasure& m, const TreeSpec& spec) {
  Json out;
  out["tree"] = spec.kind;
  if (spec.kind == "christ-ref") {
    out["space"] = spec.space;
    out["N"] = spec.N;
  } else {
    out["d"] = spec.d;
  }
  out["depth"] = spec.depth;
  Json masses = Json::array();
  const WeightedTree& tree = m.tree();
  for (NodeId n = 0; n < tree.size(); ++n) {
    if (m.mass(n) == 0) continue;
    Json entry;
    if (tree.is_dyadic()) {
      entry = cube_to_json(tree.cube(n));
    } else {
      entry["node"] = n;
    }
    entry["mass"] = rational_to_json(m.mass(n));
    masses.push_back(std::move(entry));
  }
  out["masses"] = std::move(masses);
  return out;
}

AtomicMeasure atoms_from_json(const Json& doc) {
  const Json& atoms = require(doc, "atoms", "atoms file");
  if (!atoms.is_array()) throw ParseError("atoms: expected an array");
  AtomicMeasure m;
  m.dimension = doc.contains("d") ? int_from_json(doc.at("d"), "d") : 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string where = "atoms[" + std::to_string(i) + "]";
    const Json& x = require(atoms[i], "x", where);
    if (!x.is_array() || x.empty()) throw ParseError(where + ".x: expected a nonempty array");
    Atom a;
    for (std::size_t k = 0; k < x.size(); ++k) a.x.push_back(rational_from_json(x[k], where + ".x[" + std::to_string(k) + "]"));
    a.t = rational_from_json(require(atoms[i], "t", where), where + ".t");
    a.w = rational_from_json(require(atoms[i], "w", where), where + ".w");
    if (m.dimension == 0) m.dimension = static_cast<int>(a.x.size());
    m.atoms.push_back(std::move(a));
  }
  if (m.dimension == 0) m.dimension = 1;
  try {
    m.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("atoms: ") + e.what());
  }
  return m;
}

Json atoms_to_json(const AtomicMeasure& m) {
  Json out;
  out["d"] = m.dimension;
  Json atoms = Json::array();
  for (const auto& a : m.atoms) {
    Json entry;
    Json x = Json::array();
    for (const auto& c : a.x) x.push_back(rational_to_json(c));
    entry["x"] = std::move(x);
    entry["t"] = rational_to_json(a.t);
    entry["w"] = rational_to_json(a.w);
    atoms.push_back(std::move(entry));
  }
  out["atoms"] = std::move(atoms);
  return out;
}

MetricSpace metric_from_json(const Json& doc) {
  MetricSpace space;
  const Json& points = require(doc, "points", "metric space");
  const Json& dist = require(doc, "dist", "metric space");
  const Json& weights = require(doc, "weights", "metric space");
  if (!points.is_array() || !dist.is_array() || !weights.is_array()) {
    throw ParseError("metric space: points, dist and weights must be arrays");
  }
  for (const auto& p : points) space.ids.push_back(p.is_string() ? p.get<std::string>() : p.dump());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!dist[i].is_array()) throw ParseError("dist[" + std::to_string(i) + "]: expected an array");
    std::vector<Rational> row;
    for (std::size_t j = 0; j < dist[i].size(); ++j) {
      row.push_back(rational_from_json(dist[i][j], "dist[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
    }
    space.dist.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    space.weights.push_back(rational_from_json(weights[i], "weights[" + std::to_string(i) + "]"));
  }
  try {
    space.validate();
  } catch (const DomainError& e) {
    throw ParseError(std::string("metric space: ") + e.what());
  }
  return space;
}

Json metric_to_json(const MetricSpace& space) {
  Json out;
  out["points"] = space.ids;
  Json dist = Json::array();
  for (const auto& row : space.dist) {
    Json r = Json::array();
    for (const auto& v : row) r.push_back(rational_to_json(v));
    dist.push_back(std::move(r));
  }
  out["dist"] = std::move(dist);
  Json weights = Json::array();
  for (const auto& w : space.weights) weights.push_back(rational_to_json(w));
  out["weights"] = std::move(weights);
  return out;
}

std::vector<CubeId> cubes_from_json(const Json& doc) {
  const Json& list = doc.is_object() ? require(doc, "cubes", "family") : doc;
  if (!list.is_array()) throw ParseError("family: expected an array of cubes");
  std::vector<CubeId> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(cube_from_json(list[i], "family[" + std::to_string(i) + "]"));
  return out;
}

Json family_to_json(const WeightedTree& tree, const StoppingFamily& family) {
  Json out = Json::array();
  for (NodeId n : family.cubes) out.push_back(tree.label(n));
  return out;
}

Json decomposition_to_json(const WeightedTree& tree, const Decomposition& dec) {
  auto labels = [&](const std::vector<NodeId>& nodes) {
    Json arr = Json::array();
    for (NodeId n : nodes) arr.push_back(tree.label(n));
    return arr;
  };
  Json out;
  out["root"] = tree.label(dec.root);
  out["bad"] = labels(dec.bad);
  Json generations = Json::array();
  for (const auto& g : dec.generations) generations.push_back(labels(g));
  out["generations"] = std::move(generations);
  Json families = Json::array();
  for (const auto& [node, family] : dec.families) {
    Json entry;
    entry["node"] = tree.label(node);
    entry["family"] = family_to_json(tree, family);
    families.push_back(std::move(entry));
  }
  out["families"] = std::move(families);
  Json regions = Json::array();
  for (const auto& [node, mass] : dec.region_mass) {
    Json entry;
    entry["node"] = tree.label(node);
    entry["nu_region"] = rational_to_json(mass);
    regions.push_back(std::move(entry));
  }
  out["regions"] = std::move(regions);
  Json witnesses = Json::array();
  for (const auto& [member, witness] : dec.witnesses) {
    Json entry;
    entry["cube"] = tree.label(member);
    entry["witness"] = tree.label(witness);
    witnesses.push_back(std::move(entry));
  }
  out["witnesses"] = std::move(witnesses);
  return out;
}

Json audit_to_json(const WeightedTree& tree, const AuditReport& r) {
  Json out;
  out["delta"] = rational_to_json(r.delta);
  out["C"] = rational_to_json(r.C);
  out["theta"] = rational_to_json(r.theta);
  out["C1_mu"] = rational_to_json(r.C1_mu);
  out["C2_nu"] = rational_to_json(r.C2_nu);
  out["bad_part"] = rational_to_json(r.bad_part);
  out["good_part"] = rational_to_json(r.good_part);
  out["witness_cover_mass"] = rational_to_json(r.witness_cover_mass);
  out["predicted_bound"] = rational_to_json(r.predicted_bound);
  out["root_term_bound"] = rational_to_json(r.root_term_bound);
  out["measured_C1_nu"] = rational_to_json(r.measured_C1_nu);
  out["hypothesis_violation"] = r.hypothesis_violation ? Json(tree.label(*r.hypothesis_violation)) : Json(nullptr);
  Json checks;
  checks["partition"] = r.partition_ok;
  checks["bad_part"] = r.bad_part_ok;
  checks["witness_cover"] = r.witness_cover_ok;
  checks["good_part"] = r.good_part_ok;
  checks["bound"] = r.bound_ok;
  checks["root_term_bound"] = r.root_term_bound_ok;
  out["checks"] = std::move(checks);
  out["failures"] = r.failures;
  out["pass"] = r.pass;
  return out;
}

Json christ_audit_to_json(const ChristAudit& a) {
  auto opt = [](const std::optional<Rational>& v) { return v ? rational_to_json(*v) : Json(nullptr); };
  Json out;
  out["partition"] = a.partition_ok;
  out["nesting"] = a.nesting_ok;
  out["separation"] = a.separation_ok;
  Json by_level = Json::array();
  for (const auto& v : a.diameter_ratio_by_level) by_level.push_back(rational_to_json(v));
  out["diameter_ratio_by_level"] = std::move(by_level);
  out["diameter_ratio"] = rational_to_json(a.diameter_ratio);
  out["c0_interior_ball"] = opt(a.interior_ball_constant);
  out["c2_regularity"] = opt(a.regularity_constant);
  out["c1_ahlfors"] = opt(a.ahlfors_constant);
  out["conventions"] =
      "null c0: no cell has points outside it; c1 = 1 when no positive radius exists; null c1/c2: a zero-weight ball "
      "or cell";
  out["failures"] = a.failures;
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace carleson::io
