#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fxp/index_set.hpp"
#include "fxp/rational.hpp"

namespace fxp {

// A discrete domain value: an integer (ordinal) or a named category.
using DomainValue = std::variant<std::int64_t, std::string>;

std::string to_string(const DomainValue& value);

struct FeatureDecl {
  std::size_t id;  // 1-based, as printed in reports
  std::string name;
  std::vector<DomainValue> domain;  // ordered, nonempty, duplicate-free, homogeneous
  bool numeric;                     // true iff the domain holds integers
};

class FeatureSpace {
 public:
  explicit FeatureSpace(std::vector<FeatureDecl> features);

  std::size_t size() const { return features_.size(); }
  const FeatureDecl& feature(std::size_t idx) const { return features_[idx]; }
  const std::vector<FeatureDecl>& features() const { return features_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::optional<std::size_t> value_index(std::size_t feature, const DomainValue& value) const;

  // Total number of points, exact.
  BigInt point_count() const;

 private:
  std::vector<FeatureDecl> features_;
};

// A point in feature space, stored as one domain-value index per feature.
using Point = std::vector<std::size_t>;

struct RegressionTask {};
struct ClassificationTask {
  std::vector<std::string> classes;  // ordinal: class k maps to output k
};
using Task = std::variant<RegressionTask, ClassificationTask>;

struct Edge {
  IndexSet values;  // subset of the tested feature's domain, by value index
  int child;
};

struct InternalNode {
  std::size_t feature;  // 0-based feature index
  std::vector<Edge> edges;
};

struct LeafNode {
  // Regression value, or the 0-based ordinal index of the class.
  Rat output;
};

struct Node {
  int id;
  std::variant<InternalNode, LeafNode> body;
};

// One root-to-leaf branch: per-feature admissible value sets (intersection of
// the edge sets met along the branch), the leaf output, and the node ids
// walked from the root.
struct Path {
  std::vector<std::optional<IndexSet>> literals;  // size m; nullopt = untested
  Rat output;
  std::vector<int> node_ids;

  // Number of points consistent with the literals.
  BigInt point_count(const FeatureSpace& space) const;
};

// Decision/regression tree over a discrete feature space. Immutable after
// construction; all invariants are established by the constructor.
class TreeModel {
 public:
  TreeModel(FeatureSpace space, Task task, std::vector<Node> nodes, int root_id);

  const FeatureSpace& space() const { return space_; }
  const Task& task() const { return task_; }
  bool is_regression() const { return std::holds_alternative<RegressionTask>(task_); }
  std::size_t node_count() const { return nodes_.size(); }
  int root_id() const { return root_id_; }

  Rat evaluate(const Point& x) const;

  // All root-to-leaf paths in depth-first order (edges in declaration order).
  // The paths partition feature space.
  const std::vector<Path>& paths() const { return paths_; }

  // Renders an output value: class name for classification, fraction
  // otherwise.
  std::string render_output(const Rat& output) const;

  // Parses an output literal (class name, or integer / "p/q").
  Rat parse_output(const nlohmann::json& value) const;

  nlohmann::json to_json() const;

  // Stable content hash over the serialized model.
  std::uint64_t fingerprint() const;

 private:
  const Node& node(int id) const;
  void validate() const;
  void extract_paths();

  FeatureSpace space_;
  Task task_;
  std::vector<Node> nodes_;
  int root_id_;
  std::vector<Path> paths_;
};

struct Sample {
  Point point;
  Rat output;
};

// The restriction x_S = v_S: features in `fixed` pinned to the anchor's
// values, all other features free.
struct Restriction {
  IndexSet fixed;
  Point anchor;
};

BigInt restricted_point_count(const FeatureSpace& space, const Restriction& restriction);

TreeModel parse_model(std::string_view text);

Sample parse_instance(std::string_view text, const TreeModel& model);

// "(0, 1, 2)" in domain-value terms.
std::string render_point(const FeatureSpace& space, const Point& x);

// {name: value, ...} with native JSON value types.
nlohmann::json point_to_json(const FeatureSpace& space, const Point& x);

}  // namespace fxp
