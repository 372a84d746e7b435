#include "fxp/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fxp/errors.hpp"

namespace fxp {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

DomainValue domain_value_from_json(const json& value, const std::string& where) {
  if (value.is_number_integer()) return DomainValue(value.get<std::int64_t>());
  if (value.is_string()) return DomainValue(value.get<std::string>());
  throw ParseError(where + ": domain values must be integers or strings");
}

json domain_value_to_json(const DomainValue& value) {
  if (const auto* n = std::get_if<std::int64_t>(&value)) return json(*n);
  return json(std::get<std::string>(value));
}

}  // namespace

std::string to_string(const DomainValue& value) {
  if (const auto* n = std::get_if<std::int64_t>(&value)) return std::to_string(*n);
  return std::get<std::string>(value);
}

FeatureSpace::FeatureSpace(std::vector<FeatureDecl> features) : features_(std::move(features)) {
  if (features_.empty()) throw ValidationError("feature space is empty");
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    FeatureDecl& f = features_[i];
    f.id = i + 1;
    if (!names.insert(f.name).second) {
      throw ValidationError("duplicate feature name \"" + f.name + "\"");
    }
    if (f.domain.empty()) {
      throw ValidationError("feature \"" + f.name + "\" has an empty domain");
    }
    f.numeric = std::holds_alternative<std::int64_t>(f.domain.front());
    std::set<std::string> seen;
    for (const DomainValue& v : f.domain) {
      if (std::holds_alternative<std::int64_t>(v) != f.numeric) {
        throw ValidationError("feature \"" + f.name + "\" mixes integer and categorical values");
      }
      if (!seen.insert(to_string(v)).second) {
        throw ValidationError("feature \"" + f.name + "\" repeats domain value " + to_string(v));
      }
    }
  }
}

std::optional<std::size_t> FeatureSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSpace::value_index(std::size_t feature,
                                                     const DomainValue& value) const {
  const auto& dom = features_[feature].domain;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (dom[i] == value) return i;
  }
  return std::nullopt;
}

BigInt FeatureSpace::point_count() const {
  BigInt n = 1;
  for (const FeatureDecl& f : features_) n *= static_cast<unsigned>(f.domain.size());
  return n;
}

BigInt Path::point_count(const FeatureSpace& space) const {
  BigInt n = 1;
  for (std::size_t i = 0; i < literals.size(); ++i) {
    n *= static_cast<unsigned>(literals[i] ? literals[i]->count() : space.feature(i).domain.size());
  }
  return n;
}

TreeModel::TreeModel(FeatureSpace space, Task task, std::vector<Node> nodes, int root_id)
    : space_(std::move(space)), task_(std::move(task)), nodes_(std::move(nodes)), root_id_(root_id) {
  validate();
  extract_paths();
  // Non-constant model: at least two leaves with distinguishable outputs.
  // Every path covers at least one point, so distinct leaf outputs suffice.
  std::set<Rat> outputs;
  for (const Path& p : paths_) outputs.insert(p.output);
  if (outputs.size() < 2) throw ValidationError("constant model");
}

const Node& TreeModel::node(int id) const {
  for (const Node& n : nodes_) {
    if (n.id == id) return n;
  }
  throw ValidationError("unknown node id " + std::to_string(id));
}

void TreeModel::validate() const {
  if (nodes_.empty()) throw ValidationError("model has no nodes");
  std::unordered_map<int, const Node*> by_id;
  for (const Node& n : nodes_) {
    if (!by_id.emplace(n.id, &n).second) {
      throw ValidationError("duplicate node id " + std::to_string(n.id));
    }
  }
  if (!by_id.count(root_id_)) throw ValidationError("root node " + std::to_string(root_id_) + " does not exist");

  // Walk from the root; every node must be reached exactly once (single
  // parent, no cycles, no unreachable nodes).
  std::unordered_map<int, int> parents;
  std::vector<int> stack{root_id_};
  std::unordered_set<int> visited;
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (!visited.insert(id).second) continue;
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("edge to unknown node id " + std::to_string(id));
    const Node& n = *it->second;
    if (const auto* internal = std::get_if<InternalNode>(&n.body)) {
      if (internal->feature >= space_.size()) {
        throw ValidationError("node " + std::to_string(id) + " tests an unknown feature");
      }
      const std::size_t domain_size = space_.feature(internal->feature).domain.size();
      IndexSet covered(domain_size);
      for (const Edge& e : internal->edges) {
        if (e.values.empty()) {
          throw ValidationError("node " + std::to_string(id) + " has an edge with an empty value set");
        }
        if (e.values.intersects(covered)) {
          throw ValidationError("node " + std::to_string(id) + " edges overlap: edges do not partition domain");
        }
        covered = covered.unite(e.values);
        if (parents.count(e.child)) {
          throw ValidationError("node " + std::to_string(e.child) +
                                " has more than one parent (not a tree)");
        }
        parents[e.child] = id;
        stack.push_back(e.child);
      }
      if (covered.count() != domain_size) {
        throw ValidationError("node " + std::to_string(id) + ": edges do not partition domain");
      }
    }
  }
  if (parents.count(root_id_)) throw ValidationError("root node has a parent (cycle)");
  if (visited.size() != nodes_.size()) throw ValidationError("model contains unreachable nodes");
}

void TreeModel::extract_paths() {
  const std::size_t m = space_.size();
  std::vector<std::optional<IndexSet>> literals(m);
  std::vector<int> trail;

  auto walk = [&](auto&& self, int id) -> void {
    trail.push_back(id);
    const Node& n = node(id);
    if (const auto* leaf = std::get_if<LeafNode>(&n.body)) {
      paths_.push_back(Path{literals, leaf->output, trail});
    } else {
      const auto& internal = std::get<InternalNode>(n.body);
      const std::size_t f = internal.feature;
      const std::optional<IndexSet> saved = literals[f];
      for (const Edge& e : internal.edges) {
        IndexSet next = saved ? saved->intersect(e.values) : e.values;
        if (next.empty()) {
          throw ValidationError("dead branch: repeated tests of feature \"" +
                                space_.feature(f).name + "\" have empty intersection");
        }
        literals[f] = std::move(next);
        self(self, e.child);
      }
      literals[f] = saved;
    }
    trail.pop_back();
  };
  walk(walk, root_id_);
}

Rat TreeModel::evaluate(const Point& x) const {
  if (x.size() != space_.size()) throw ValidationError("point arity mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= space_.feature(i).domain.size()) {
      throw ValidationError("coordinate for feature \"" + space_.feature(i).name +
                            "\" is outside its domain");
    }
  }
  int id = root_id_;
  for (;;) {
    const Node& n = node(id);
    if (const auto* leaf = std::get_if<LeafNode>(&n.body)) return leaf->output;
    const auto& internal = std::get<InternalNode>(n.body);
    const Edge* taken = nullptr;
    for (const Edge& e : internal.edges) {
      if (e.values.contains(x[internal.feature])) {
        taken = &e;
        break;
      }
    }
    if (!taken) throw std::logic_error("edge partition invariant broken");
    id = taken->child;
  }
}

std::string TreeModel::render_output(const Rat& output) const {
  if (const auto* c = std::get_if<ClassificationTask>(&task_)) {
    return c->classes[output.convert_to<std::size_t>()];
  }
  return to_fraction(output);
}

Rat TreeModel::parse_output(const json& value) const {
  if (const auto* c = std::get_if<ClassificationTask>(&task_)) {
    if (!value.is_string()) throw ParseError("classification output must be a class name");
    const std::string name = value.get<std::string>();
    const auto it = std::find(c->classes.begin(), c->classes.end(), name);
    if (it == c->classes.end()) throw ParseError("unknown class \"" + name + "\"");
    return Rat(static_cast<unsigned>(it - c->classes.begin()));
  }
  if (value.is_number_integer()) return Rat(value.get<std::int64_t>());
  if (value.is_string()) return parse_rational(value.get<std::string>());
  throw ParseError("regression output must be an integer or a \"p/q\" string");
}

json TreeModel::to_json() const {
  json features = json::array();
  for (const FeatureDecl& f : space_.features()) {
    json domain = json::array();
    for (const DomainValue& v : f.domain) domain.push_back(domain_value_to_json(v));
    features.push_back({{"name", f.name}, {"domain", domain}});
  }
  json nodes = json::array();
  for (const Node& n : nodes_) {
    if (const auto* leaf = std::get_if<LeafNode>(&n.body)) {
      json value;
      if (const auto* c = std::get_if<ClassificationTask>(&task_)) {
        value = c->classes[leaf->output.convert_to<std::size_t>()];
      } else if (denominator(leaf->output) == 1) {
        value = numerator(leaf->output).convert_to<std::int64_t>();
      } else {
        value = to_fraction(leaf->output);
      }
      nodes.push_back({{"id", n.id}, {"leaf", value}});
    } else {
      const auto& internal = std::get<InternalNode>(n.body);
      const FeatureDecl& f = space_.feature(internal.feature);
      json edges = json::array();
      for (const Edge& e : internal.edges) {
        json values = json::array();
        for (std::size_t v : e.values.members()) {
          values.push_back(domain_value_to_json(f.domain[v]));
        }
        edges.push_back({{"values", values}, {"child", e.child}});
      }
      nodes.push_back({{"id", n.id}, {"feature", f.name}, {"edges", edges}});
    }
  }
  json out{{"features", features}, {"root", root_id_}, {"nodes", nodes}};
  if (const auto* c = std::get_if<ClassificationTask>(&task_)) {
    out["task"] = "classification";
    out["classes"] = c->classes;
  } else {
    out["task"] = "regression";
  }
  return out;
}

std::uint64_t TreeModel::fingerprint() const { return fnv1a(to_json().dump()); }

BigInt restricted_point_count(const FeatureSpace& space, const Restriction& restriction) {
  BigInt n = 1;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!restriction.fixed.contains(i)) n *= static_cast<unsigned>(space.feature(i).domain.size());
  }
  return n;
}

TreeModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what(), e.byte);
  }
  try {
    if (!doc.is_object()) throw ParseError("model file: top level must be an object");

    std::vector<FeatureDecl> features;
    for (const json& f : doc.at("features")) {
      FeatureDecl decl;
      decl.name = f.at("name").get<std::string>();
      for (const json& v : f.at("domain")) {
        decl.domain.push_back(domain_value_from_json(v, "feature \"" + decl.name + "\""));
      }
      features.push_back(std::move(decl));
    }
    FeatureSpace space(std::move(features));

    const std::string task_name = doc.at("task").get<std::string>();
    Task task;
    if (task_name == "classification") {
      ClassificationTask c;
      for (const json& k : doc.at("classes")) c.classes.push_back(k.get<std::string>());
      if (c.classes.size() < 2) throw ValidationError("classification model needs at least two classes");
      task = std::move(c);
    } else if (task_name == "regression") {
      task = RegressionTask{};
    } else {
      throw ParseError("unknown task \"" + task_name + "\"");
    }

    // Leaf parsing needs the task; build a throwaway reader.
    auto parse_leaf = [&](const json& value) -> Rat {
      if (const auto* c = std::get_if<ClassificationTask>(&task)) {
        if (!value.is_string()) throw ParseError("leaf of a classification model must be a class name");
        const auto it = std::find(c->classes.begin(), c->classes.end(), value.get<std::string>());
        if (it == c->classes.end()) {
          throw ParseError("leaf names unknown class \"" + value.get<std::string>() + "\"");
        }
        return Rat(static_cast<unsigned>(it - c->classes.begin()));
      }
      if (value.is_number_integer()) return Rat(value.get<std::int64_t>());
      if (value.is_string()) return parse_rational(value.get<std::string>());
      throw ParseError("leaf of a regression model must be an integer or a \"p/q\" string");
    };

    std::vector<Node> nodes;
    for (const json& n : doc.at("nodes")) {
      Node node;
      node.id = n.at("id").get<int>();
      if (n.contains("leaf")) {
        node.body = LeafNode{parse_leaf(n.at("leaf"))};
      } else {
        InternalNode internal;
        const std::string fname = n.at("feature").get<std::string>();
        const auto fidx = space.index_of(fname);
        if (!fidx) throw ValidationError("node tests unknown feature \"" + fname + "\"");
        internal.feature = *fidx;
        const std::size_t domain_size = space.feature(*fidx).domain.size();
        for (const json& e : n.at("edges")) {
          Edge edge;
          edge.values = IndexSet(domain_size);
          for (const json& v : e.at("values")) {
            const DomainValue dv = domain_value_from_json(v, "node " + std::to_string(node.id));
            const auto vidx = space.value_index(*fidx, dv);
            if (!vidx) {
              throw ValidationError("node " + std::to_string(node.id) + ": edge value " +
                                    to_string(dv) + " is not in the domain of \"" + fname + "\"");
            }
            edge.values.insert(*vidx);
          }
          edge.child = e.at("child").get<int>();
          internal.edges.push_back(std::move(edge));
        }
        node.body = std::move(internal);
      }
      nodes.push_back(std::move(node));
    }

    return TreeModel(std::move(space), std::move(task), std::move(nodes),
                     doc.at("root").get<int>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

Sample parse_instance(std::string_view text, const TreeModel& model) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance file: ") + e.what(), e.byte);
  }
  try {
    const json& point_obj = doc.at("point");
    if (!point_obj.is_object()) throw ParseError("instance file: \"point\" must be an object");
    const FeatureSpace& space = model.space();
    Point x(space.size());
    std::vector<bool> given(space.size(), false);
    for (const auto& [name, value] : point_obj.items()) {
      const auto fidx = space.index_of(name);
      if (!fidx) throw ValidationError("instance names unknown feature \"" + name + "\"");
      const DomainValue dv = domain_value_from_json(value, "feature \"" + name + "\"");
      const auto vidx = space.value_index(*fidx, dv);
      if (!vidx) {
        throw ValidationError("value " + to_string(dv) + " is not in the domain of feature \"" +
                              name + "\"");
      }
      x[*fidx] = *vidx;
      given[*fidx] = true;
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (!given[i]) {
        throw ValidationError("instance misses feature \"" + space.feature(i).name + "\"");
      }
    }
    const Rat predicted = model.evaluate(x);
    if (doc.contains("output")) {
      const Rat declared = model.parse_output(doc.at("output"));
      if (declared != predicted) {
        throw ValidationError("declared output " + model.render_output(declared) +
                              " does not match the model prediction " +
                              model.render_output(predicted) + " (stale instance file?)");
      }
    }
    return Sample{std::move(x), predicted};
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance file: ") + e.what());
  }
}

std::string render_point(const FeatureSpace& space, const Point& x) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out << ", ";
    out << to_string(space.feature(i).domain[x[i]]);
  }
  out << ")";
  return out.str();
}

nlohmann::json point_to_json(const FeatureSpace& space, const Point& x) {
  json out = json::object();
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[space.feature(i).name] = domain_value_to_json(space.feature(i).domain[x[i]]);
  }
  return out;
}

}  // namespace fxp
