#pragma once
// Text exchange formats (JSON) for measures, atoms, metric spaces, cube
// families and reports. Rationals are written as "p/q" strings; on input,
// strings, integers and decimals are accepted and converted exactly.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "carleson/christ.hpp"
#include "carleson/extrapolation.hpp"
#include "carleson/measures.hpp"
#include "carleson/sawtooth.hpp"
#include "carleson/tree.hpp"

namespace carleson::io {

using Json = nlohmann::ordered_json;

/// How to rebuild the tree a measure file refers to.
struct TreeSpec {
  std::string kind = "dyadic";  // "dyadic" | "christ-ref"
  int d = 1;
  int depth = 1;
  // christ-ref only: metric space file (relative to the measure file) and scale ratio.
  std::string space;
  int N = 1;

  friend bool operator==(const TreeSpec&, const TreeSpec&) = default;
};

Rational rational_from_json(const Json& value, const std::string& field);
Json rational_to_json(const Rational& value);

Json cube_to_json(const CubeId& q);
CubeId cube_from_json(const Json& value, const std::string& field);

TreeSpec tree_spec_from_json(const Json& doc);
/// Builds the tree; relative space paths resolve against base_dir.
TreePtr build_tree(const TreeSpec& spec, const std::filesystem::path& base_dir);

/// Masses of a measure document bound to an already-built tree. Throws
/// ParseError naming the bad field.
TreeMeasure measure_from_json(const Json& doc, const TreePtr& tree);
/// Nonzero masses only, in node order.
Json measure_to_json(const TreeMeasure& m, const TreeSpec& spec);

AtomicMeasure atoms_from_json(const Json& doc);
Json atoms_to_json(const AtomicMeasure& m);

MetricSpace metric_from_json(const Json& doc);
Json metric_to_json(const MetricSpace& space);

std::vector<CubeId> cubes_from_json(const Json& doc);

Json family_to_json(const WeightedTree& tree, const StoppingFamily& family);
Json decomposition_to_json(const WeightedTree& tree, const Decomposition& dec);
Json audit_to_json(const WeightedTree& tree, const AuditReport& report);
Json christ_audit_to_json(const ChristAudit& audit);

/// Reads a whole JSON file; parse errors carry the path and byte offset.
Json read_json_file(const std::filesystem::path& path);
/// Deterministic text: two-space indent, trailing newline.
std::string dump(const Json& doc);

}  // namespace carleson::io
