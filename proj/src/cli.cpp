#include "fxp/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fxp/attribution.hpp"
#include "fxp/enumerate.hpp"
#include "fxp/errors.hpp"
#include "fxp/explain.hpp"
#include "fxp/oracle.hpp"

namespace fxp {

namespace {

using nlohmann::json;

// Flag combinations that are wrong regardless of input content.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string model_path;
  std::string instance_path;
  std::optional<std::string> delta;
  bool strict = false;
  std::optional<std::string> order;
  std::string norm = "0";
  std::string eps = "unbounded";
  std::optional<std::string> fix;
  std::string output = "text";
  std::optional<std::size_t> limit;
  bool ledger = false;
  std::optional<std::string> relevancy_delta;
  bool relevancy_strict = false;
  bool allow_similarity_mismatch = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t brute_cap_from_env() {
  const char* raw = std::getenv("FXP_BRUTE_CAP");
  if (!raw) return kDefaultBruteCap;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || value == 0) {
    throw UsageError("FXP_BRUTE_CAP must be a positive integer, got \"" + std::string(raw) + "\"");
  }
  return value;
}

SimilaritySpec similarity_from_flags(const TreeModel& model, const std::optional<std::string>& delta,
                                     bool strict) {
  if (!model.is_regression()) {
    if (delta || strict) {
      throw UsageError("--delta and --strict apply to regression models only");
    }
    return SimilaritySpec::class_equality();
  }
  const Rat d = delta ? parse_rational(*delta) : Rat(0);
  return SimilaritySpec::regression_threshold(
      d, strict ? Comparison::kStrict : Comparison::kNonStrict);
}

std::vector<std::size_t> parse_id_list(const std::string& text, std::size_t m,
                                       const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long id = 0;
    try {
      id = std::stoul(item, &pos);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": \"" + item + "\" is not a feature id");
    }
    if (pos != item.size()) {
      throw UsageError(std::string(what) + ": \"" + item + "\" is not a feature id");
    }
    if (id < 1 || id > m) {
      throw UsageError(std::string(what) + ": feature id " + item + " is out of range 1.." +
                       std::to_string(m));
    }
    out.push_back(id - 1);
  }
  return out;
}

std::string render_feature_set(const FeatureSpace& space, const IndexSet& set) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i : set.members()) {
    if (!first) out += ", ";
    first = false;
    out += space.feature(i).name;
  }
  return out + "}";
}

std::string render_rational(const Rat& value, bool with_decimal) {
  std::string out = to_fraction(value);
  if (with_decimal) out += " (" + to_decimal(value) + ")";
  return out;
}

json ids_json(const IndexSet& set) {
  json out = json::array();
  for (std::size_t i : set.members()) out.push_back(i + 1);
  return out;
}

std::string render_node_path(const std::vector<int>& node_ids) {
  std::string out = "<";
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(node_ids[i]);
  }
  return out + ">";
}

json trace_json(const DeletionTrace& trace) {
  json rows = json::array();
  for (const DeletionStep& step : trace.steps) {
    json row{{"feature", step.feature + 1}, {"dropped", step.dropped},
             {"resulting", ids_json(step.resulting)}};
    if (step.witness_path) row["witness_path"] = *step.witness_path;
    rows.push_back(std::move(row));
  }
  return rows;
}

void print_trace(std::ostream& out, const FeatureSpace& space, const DeletionTrace& trace) {
  out << "trace:\n";
  for (const DeletionStep& step : trace.steps) {
    out << "  " << space.feature(step.feature).name << ": ";
    if (step.dropped) {
      out << "dropped";
    } else {
      out << "kept";
      if (step.witness_path) {
        out << ", dissimilar path " << render_node_path(*step.witness_path) << " consistent";
      }
    }
    out << "\n";
  }
}

void emit(std::ostream& out, const CliConfig& cli, const json& structured,
          const std::function<void(std::ostream&)>& text) {
  if (cli.output == "json") {
    out << structured.dump(2) << "\n";
  } else {
    text(out);
  }
}

std::string hex_fingerprint(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

ExplanationProblem make_problem(const CliConfig& cli, TreeModel model) {
  Sample sample = parse_instance(read_file(cli.instance_path), model);
  SimilaritySpec similarity = similarity_from_flags(model, cli.delta, cli.strict);
  return ExplanationProblem(std::move(model), std::move(sample), std::move(similarity));
}

std::vector<std::size_t> order_from_flags(const CliConfig& cli, std::size_t m) {
  if (!cli.order) return ascending_order(m);
  return parse_id_list(*cli.order, m, "--order");
}

int cmd_explanation(std::ostream& out, const CliConfig& cli, bool abductive) {
  ExplanationProblem problem = make_problem(cli, parse_model(read_file(cli.model_path)));
  const auto order = order_from_flags(cli, problem.feature_count());
  DeletionTrace trace;
  const Explanation explanation = abductive ? one_axp(problem, order, &trace)
                                            : one_cxp(problem, order, &trace);
  const FeatureSpace& space = problem.model().space();
  json structured{{"command", abductive ? "axp" : "cxp"},
                  {"kind", to_string(explanation.kind)},
                  {"features", ids_json(explanation.features)},
                  {"trace", trace_json(trace)},
                  {"fingerprint", hex_fingerprint(explanation.fingerprint)}};
  emit(out, cli, structured, [&](std::ostream& os) {
    os << to_string(explanation.kind) << ": " << render_feature_set(space, explanation.features)
       << "\n";
    print_trace(os, space, trace);
  });
  return 0;
}

json enumeration_json(const FeatureSpace& space, const EnumerationState& state) {
  json axps = json::array(), cxps = json::array();
  for (const Explanation& x : state.axps) axps.push_back(ids_json(x.features));
  for (const Explanation& x : state.cxps) cxps.push_back(ids_json(x.features));
  IndexSet relevant(space.size());
  IndexSet necessary = IndexSet::full(space.size());
  for (const Explanation& x : state.axps) {
    relevant = relevant.unite(x.features);
    necessary = necessary.intersect(x.features);
  }
  return json{{"axps", axps},
              {"cxps", cxps},
              {"relevant", ids_json(relevant)},
              {"necessary", ids_json(necessary)},
              {"exhausted", state.exhausted}};
}

int cmd_enumerate(std::ostream& out, const CliConfig& cli) {
  ExplanationProblem problem = make_problem(cli, parse_model(read_file(cli.model_path)));
  const EnumerationState state =
      enumerate_explanations(problem, EnumerationOptions{cli.limit});
  const FeatureSpace& space = problem.model().space();
  emit(out, cli, enumeration_json(space, state), [&](std::ostream& os) {
    for (std::size_t i = 0; i < state.axps.size(); ++i) {
      os << "AXp " << i + 1 << ": " << render_feature_set(space, state.axps[i].features) << "\n";
    }
    for (std::size_t i = 0; i < state.cxps.size(); ++i) {
      os << "CXp " << i + 1 << ": " << render_feature_set(space, state.cxps[i].features) << "\n";
    }
    os << "exhausted: " << (state.exhausted ? "yes" : "no") << "\n";
  });
  return 0;
}

int cmd_relevancy(std::ostream& out, const CliConfig& cli) {
  ExplanationProblem problem = make_problem(cli, parse_model(read_file(cli.model_path)));
  const RelevancyReport report = relevant_features(problem, EnumerationOptions{cli.limit});
  const FeatureSpace& space = problem.model().space();
  json structured = enumeration_json(space, report.state);
  structured["irrelevant"] = ids_json(report.irrelevant);
  json witnesses = json::object();
  for (const auto& [feature, axp] : report.witnesses) {
    witnesses[space.feature(feature).name] = ids_json(axp);
  }
  structured["witnesses"] = witnesses;
  emit(out, cli, structured, [&](std::ostream& os) {
    os << "relevant: " << render_feature_set(space, report.relevant) << "\n";
    os << "irrelevant: " << render_feature_set(space, report.irrelevant) << "\n";
    os << "necessary: " << render_feature_set(space, report.necessary) << "\n";
    for (const auto& [feature, axp] : report.witnesses) {
      os << "witness for " << space.feature(feature).name << ": AXp "
         << render_feature_set(space, axp) << "\n";
    }
  });
  return 0;
}

json shap_json(const ExplanationProblem& problem, const ShapReport& report, bool with_ledger) {
  const FeatureSpace& space = problem.model().space();
  json scores = json::object();
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    scores[space.feature(i).name] = to_fraction(report.scores[i]);
  }
  Rat sum = 0;
  for (const Rat& s : report.scores) sum += s;
  json structured{{"scores", scores},
                  {"baseline", to_fraction(report.baseline)},
                  {"full", to_fraction(report.full)},
                  {"sum", to_fraction(sum)},
                  {"efficiency_check", "ok"}};
  if (with_ledger) {
    json ledger = json::object();
    for (std::size_t i = 0; i < report.ledger.size(); ++i) {
      json rows = json::array();
      for (const Contribution& c : report.ledger[i]) {
        rows.push_back(json{{"subset", ids_json(c.subset)},
                            {"weight", to_fraction(c.weight)},
                            {"delta", to_fraction(c.delta)}});
      }
      ledger[space.feature(i).name] = std::move(rows);
    }
    structured["ledger"] = std::move(ledger);
  }
  return structured;
}

void print_shap_text(std::ostream& os, const ExplanationProblem& problem,
                     const ShapReport& report, bool with_ledger) {
  const FeatureSpace& space = problem.model().space();
  os << "baseline (cf of empty set): " << render_rational(report.baseline, true) << "\n";
  os << "model output at v: " << render_rational(report.full, true) << "\n";
  Rat sum = 0;
  for (std::size_t i = 0; i < report.scores.size(); ++i) {
    os << "sv(" << space.feature(i).name << ") = " << render_rational(report.scores[i], true)
       << "\n";
    if (with_ledger) {
      for (const Contribution& c : report.ledger[i]) {
        os << "  S=" << render_feature_set(space, c.subset) << " weight "
           << to_fraction(c.weight) << " delta " << to_fraction(c.delta) << "\n";
      }
    }
    sum += report.scores[i];
  }
  os << "sum: " << render_rational(sum, true) << "\n";
  os << "efficiency: ok\n";
}

int cmd_shap(std::ostream& out, const CliConfig& cli) {
  ExplanationProblem problem = make_problem(cli, parse_model(read_file(cli.model_path)));
  const ShapReport report = shap_all(problem, cli.ledger);
  emit(out, cli, shap_json(problem, report, cli.ledger), [&](std::ostream& os) {
    print_shap_text(os, problem, report, cli.ledger);
  });
  return 0;
}

int cmd_audit(std::ostream& out, const CliConfig& cli) {
  ExplanationProblem problem = make_problem(cli, parse_model(read_file(cli.model_path)));
  std::optional<ExplanationProblem> relevancy_problem;
  if (cli.relevancy_delta || cli.relevancy_strict) {
    if (!cli.allow_similarity_mismatch) {
      throw UsageError(
          "auditing relevancy under a different similarity than the attribution side needs "
          "--allow-similarity-mismatch");
    }
    TreeModel model = parse_model(read_file(cli.model_path));
    Sample sample = parse_instance(read_file(cli.instance_path), model);
    SimilaritySpec similarity =
        similarity_from_flags(model, cli.relevancy_delta, cli.relevancy_strict);
    relevancy_problem.emplace(std::move(model), std::move(sample), std::move(similarity));
  }
  const AuditReport report = audit(problem, EnumerationOptions{cli.limit},
                                   kDefaultShapFeatureCap,
                                   relevancy_problem ? &*relevancy_problem : nullptr);
  const FeatureSpace& space = problem.model().space();
  json structured = shap_json(problem, report.shap, false);
  json rows = json::array();
  for (const AuditFinding& f : report.findings) {
    rows.push_back(json{{"feature", space.feature(f.feature).name},
                        {"relevancy", f.relevant ? "relevant" : "irrelevant"},
                        {"score", to_fraction(f.score)},
                        {"flag", to_string(f.flag)}});
  }
  structured["audit"] = std::move(rows);
  emit(out, cli, structured, [&](std::ostream& os) {
    for (const AuditFinding& f : report.findings) {
      os << space.feature(f.feature).name << ": " << (f.relevant ? "relevant" : "irrelevant")
         << ", sv = " << render_rational(f.score, true) << " -> " << to_string(f.flag) << "\n";
    }
  });
  return 0;
}

int cmd_inflate(std::ostream& out, const CliConfig& cli) {
  ExplanationProblem problem = make_problem(cli, parse_model(read_file(cli.model_path)));
  const auto order = order_from_flags(cli, problem.feature_count());
  const Explanation axp = one_axp(problem, order);
  const InflatedExplanation inflated = inflate(problem, axp);
  const TreeModel& model = problem.model();
  const FeatureSpace& space = model.space();

  json literals = json::object();
  for (std::size_t i = 0; i < inflated.literals.size(); ++i) {
    if (!inflated.literals[i]) continue;
    json values = json::array();
    for (std::size_t u : inflated.literals[i]->members()) {
      const DomainValue& v = space.feature(i).domain[u];
      if (const auto* n = std::get_if<std::int64_t>(&v)) {
        values.push_back(*n);
      } else {
        values.push_back(std::get<std::string>(v));
      }
    }
    literals[space.feature(i).name] = std::move(values);
  }
  json structured{{"command", "inflate"},
                  {"axp", ids_json(axp.features)},
                  {"literals", std::move(literals)},
                  {"rule", inflated.rule(model)},
                  {"removable", ids_json(inflated.removable)},
                  {"consequent", model.render_output(inflated.consequent)}};
  emit(out, cli, structured, [&](std::ostream& os) {
    os << "AXp: " << render_feature_set(space, axp.features) << "\n";
    os << inflated.rule(model) << "\n";
    if (!inflated.removable.empty()) {
      os << "removable (grew to the full domain): "
         << render_feature_set(space, inflated.removable) << "\n";
    }
  });
  return 0;
}

int cmd_robust(std::ostream& out, const CliConfig& cli) {
  ExplanationProblem problem = make_problem(cli, parse_model(read_file(cli.model_path)));
  const std::size_t m = problem.feature_count();

  AdversarialQuery query;
  if (cli.norm == "0") {
    query.norm = Norm::kL0;
  } else if (cli.norm == "1") {
    query.norm = Norm::kL1;
  } else if (cli.norm == "inf") {
    query.norm = Norm::kLInf;
  } else {
    throw UsageError("--norm must be one of 0, 1, inf");
  }
  if (cli.eps != "unbounded") query.epsilon = parse_rational(cli.eps);
  query.fixed = IndexSet(m);
  if (cli.fix) {
    for (std::size_t i : parse_id_list(*cli.fix, m, "--fix")) query.fixed.insert(i);
  }

  const auto witness = find_adversarial_example(problem, query);
  const TreeModel& model = problem.model();
  json structured{{"command", "robust"}, {"witness", nullptr}};
  if (witness) {
    structured["witness"] = json{{"point", point_to_json(model.space(), witness->point)},
                                 {"output", model.render_output(witness->output)},
                                 {"distance", to_fraction(witness->distance)}};
  }
  emit(out, cli, structured, [&](std::ostream& os) {
    if (!witness) {
      os << "no adversarial example\n";
    } else {
      os << "adversarial example: " << render_point(model.space(), witness->point) << "\n";
      os << "output: " << render_rational(witness->output, model.is_regression()) << "\n";
      os << "distance: " << render_rational(witness->distance, true) << " (l" << cli.norm << ")\n";
    }
  });
  return 0;
}

int cmd_validate(std::ostream& out, const CliConfig& cli) {
  const TreeModel model = parse_model(read_file(cli.model_path));
  const std::uint64_t cap = brute_cap_from_env();
  const BigInt points = model.space().point_count();

  std::string exhaustive = "skipped (|F| above the brute-force cap)";
  if (points <= cap) {
    // Every point must hit exactly one path, whose output matches evaluate.
    BigInt covered = 0;
    const Restriction everything{IndexSet(model.space().size()), Point(model.space().size(), 0)};
    for_each_restricted_point(model.space(), everything, cap, [&](const Point& x) {
      const Rat direct = model.evaluate(x);
      std::size_t consistent = 0;
      for (const Path& path : model.paths()) {
        bool inside = true;
        for (std::size_t i = 0; i < x.size() && inside; ++i) {
          if (path.literals[i] && !path.literals[i]->contains(x[i])) inside = false;
        }
        if (inside) {
          ++consistent;
          if (path.output != direct) {
            throw ValidationError("path output disagrees with evaluation at point " +
                                  render_point(model.space(), x));
          }
        }
      }
      if (consistent != 1) {
        throw ValidationError("paths do not partition feature space at point " +
                              render_point(model.space(), x));
      }
      ++covered;
    });
    exhaustive = "passed (" + covered.str() + " points)";
  }

  json structured{{"command", "validate"},
                  {"status", "ok"},
                  {"features", model.space().size()},
                  {"nodes", model.node_count()},
                  {"paths", model.paths().size()},
                  {"points", points.str()},
                  {"exhaustive_check", exhaustive}};
  emit(out, cli, structured, [&](std::ostream& os) {
    os << "ok: " << model.space().size() << " features, " << model.node_count() << " nodes, "
       << model.paths().size() << " paths, |F| = " << points.str() << "\n";
    os << "exhaustive path check: " << exhaustive << "\n";
  });
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"formal explanations, relevancy and exact SHAP scores for decision and "
               "regression trees over discrete features"};
  app.require_subcommand(1);
  CliConfig cli;

  auto add_common = [&](CLI::App* cmd, bool with_instance) {
    cmd->add_option("--model", cli.model_path, "model file (JSON)")->required();
    if (with_instance) {
      cmd->add_option("--instance", cli.instance_path, "instance file (JSON)")->required();
      cmd->add_option("--delta", cli.delta, "similarity threshold p/q (regression; default 0)");
      cmd->add_flag("--strict", cli.strict, "use |change| < delta instead of <=");
    }
    cmd->add_option("--output", cli.output, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
  };

  CLI::App* axp = app.add_subcommand("axp", "one abductive explanation by deletion");
  add_common(axp, true);
  axp->add_option("--order", cli.order, "feature processing order, e.g. 1,2,3");

  CLI::App* cxp = app.add_subcommand("cxp", "one contrastive explanation by deletion");
  add_common(cxp, true);
  cxp->add_option("--order", cli.order, "feature processing order, e.g. 1,2,3");

  CLI::App* enumerate = app.add_subcommand("enumerate", "all AXps and CXps (MARCO dual search)");
  add_common(enumerate, true);
  enumerate->add_option("--limit", cli.limit, "stop after this many explanations");

  CLI::App* relevancy = app.add_subcommand("relevancy", "relevant, irrelevant and necessary features");
  add_common(relevancy, true);
  relevancy->add_option("--limit", cli.limit, "enumeration budget (exceeding it fails)");

  CLI::App* shap = app.add_subcommand("shap", "exact SHAP scores with efficiency check");
  add_common(shap, true);
  shap->add_flag("--ledger", cli.ledger, "dump every (subset, weight, delta) contribution");

  CLI::App* audit_cmd = app.add_subcommand("audit", "join SHAP scores with feature relevancy");
  add_common(audit_cmd, true);
  audit_cmd->add_option("--limit", cli.limit, "enumeration budget for the relevancy side");
  audit_cmd->add_option("--relevancy-delta", cli.relevancy_delta,
                        "relevancy-side delta (needs --allow-similarity-mismatch)");
  audit_cmd->add_flag("--relevancy-strict", cli.relevancy_strict,
                      "relevancy-side strict comparison (needs --allow-similarity-mismatch)");
  audit_cmd->add_flag("--allow-similarity-mismatch", cli.allow_similarity_mismatch,
                      "permit different similarity settings on the two sides");

  CLI::App* inflate_cmd = app.add_subcommand("inflate", "widen an AXp to maximal value sets");
  add_common(inflate_cmd, true);
  inflate_cmd->add_option("--order", cli.order, "feature processing order for the AXp");

  CLI::App* robust = app.add_subcommand("robust", "norm-bounded adversarial example search");
  add_common(robust, true);
  robust->add_option("--norm", cli.norm, "0, 1 or inf")->check(CLI::IsMember({"0", "1", "inf"}));
  robust->add_option("--eps", cli.eps, "ball radius p/q, or unbounded");
  robust->add_option("--fix", cli.fix, "feature ids pinned to the sample, e.g. 1,3");

  CLI::App* validate = app.add_subcommand("validate", "check a model file against all invariants");
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (app.got_subcommand(axp)) return cmd_explanation(out, cli, true);
    if (app.got_subcommand(cxp)) return cmd_explanation(out, cli, false);
    if (app.got_subcommand(enumerate)) return cmd_enumerate(out, cli);
    if (app.got_subcommand(relevancy)) return cmd_relevancy(out, cli);
    if (app.got_subcommand(shap)) return cmd_shap(out, cli);
    if (app.got_subcommand(audit_cmd)) return cmd_audit(out, cli);
    if (app.got_subcommand(inflate_cmd)) return cmd_inflate(out, cli);
    if (app.got_subcommand(robust)) return cmd_robust(out, cli);
    if (app.got_subcommand(validate)) return cmd_validate(out, cli);
    err << "error: unknown command\n";
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const CapExceededError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace fxp
