#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

namespace equivocation::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

JointDistribution load_distribution(const std::string& path) {
  try {
    return parse_distribution(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::size_t read_dimension(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
  const Json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ValidationError(std::string("field \"") + key + "\" must be a positive integer");
  }
  return v.get<std::size_t>();
}

void emit(std::ostream& out, const Json& doc) { out << doc.dump() << '\n'; }

Json probs_of(const JointDistribution& joint) {
  Json rows = Json::array();
  for (const auto& row : joint.rows()) rows.push_back(row);
  return rows;
}


}  // namespace

JointDistribution parse_distribution(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what());
  } catch (const Json::out_of_range& e) {
    // A number literal that does not fit a double.
    throw ValidationError(std::string("probs: not finite: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("top level must be a JSON object");

  const std::size_t nx = read_dimension(doc, "nx");
  const std::size_t ny = read_dimension(doc, "ny");
  if (!doc.contains("probs")) throw ValidationError("missing field \"probs\"");
  const Json& probs = doc.at("probs");
  if (!probs.is_array() || probs.size() != nx) {
    throw ValidationError("probs: expected an array of " + std::to_string(nx) + " rows");
  }

  std::vector<double> values(nx * ny);
  double mass = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const Json& row = probs[i];
    const std::string where = "probs[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != ny) {
      throw ValidationError(where + ": expected an array of " + std::to_string(ny) + " numbers");
    }
    for (std::size_t j = 0; j < ny; ++j) {
      const std::string cell = where + "[" + std::to_string(j) + "]";
      if (!row[j].is_number()) throw ValidationError(cell + ": not a number");
      const double v = row[j].get<double>();
      if (!std::isfinite(v)) throw ValidationError(cell + ": not finite");
      if (v < -kClampTolerance) {
        std::ostringstream msg;
        msg << cell << ": negative probability " << v;
        throw ValidationError(msg.str());
      }
      values[j * nx + i] = v;
      mass += v;
    }
  }
  if (std::abs(mass - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probs: total mass " << mass << " is not 1 (tolerance " << kMassTolerance << ")";
    throw ValidationError(msg.str());
  }
  try {
    return JointDistribution(nx, ny, std::move(values));
  } catch (const std::exception& e) {
    throw ValidationError(std::string("probs: ") + e.what());
  }
}

Json to_json(const JointDistribution& joint) {
  Json doc;
  doc["nx"] = joint.nx();
  doc["ny"] = joint.ny();
  doc["probs"] = probs_of(joint);
  return doc;
}

Json to_json(const DistributionPair& pair) {
  Json doc;
  doc["p"] = to_json(pair.p);
  doc["q"] = to_json(pair.q);
  return doc;
}

Json to_json(const TrialReport& report) {
  Json doc;
  doc["trials"] = report.trials;
  doc["violations"] = report.violations;
  doc["max_gap_over_bound_ratio"] = report.max_gap_over_bound_ratio;
  doc["worst_pair"] = report.worst_pair ? to_json(*report.worst_pair) : Json(nullptr);
  doc["seed"] = report.seed;
  doc["nx"] = report.nx;
  doc["ny"] = report.ny;
  return doc;
}

Json to_json(const WalkStep& step) {
  Json doc;
  doc["label"] = step.label;
  doc["tv"] = step.tv;
  doc["gap"] = step.gap;
  if (step.snapshot) {
    doc["p"] = probs_of(step.snapshot->p);
    doc["q"] = probs_of(step.snapshot->q);
  }
  if (step.transferred) doc["s"] = *step.transferred;
  return doc;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continuity bound for conditional Shannon entropy in total variation"};
  app.name("equivocation");
  app.require_subcommand(1);

  double epsilon = 0.0;
  std::size_t nx = 2;
  std::size_t ny = 1;

  auto* bound = app.add_subcommand("bound", "Evaluate eps*log2(nx-1) + h(eps)");
  bound->add_option("--epsilon", epsilon, "TV radius in [0, 1]")->required();
  bound->add_option("--nx", nx, "size of the X alphabet (>= 2)")->required();

  std::string file_a;
  std::string file_b;
  std::string formula_name = "mixture";
  auto* entropy_cmd = app.add_subcommand("entropy", "Entropies of a distribution file");
  entropy_cmd->add_option("file", file_a, "distribution JSON")->required();
  entropy_cmd->add_option("--formula", formula_name, "conditional entropy route")
      ->check(CLI::IsMember({"mixture", "difference", "direct"}));

  auto* tv = app.add_subcommand("tv", "Total variation distance between two files");
  tv->add_option("p", file_a, "first distribution JSON")->required();
  tv->add_option("q", file_b, "second distribution JSON")->required();

  std::string trace_file;
  std::string snapshots = "phases";
  auto* walk = app.add_subcommand("walk", "Run the invariant-checked walk on a pair");
  walk->add_option("p", file_a, "first distribution JSON")->required();
  walk->add_option("q", file_b, "second distribution JSON")->required();
  walk->add_option("--trace-file", trace_file, "write the JSON-lines trace here");
  walk->add_option("--snapshots", snapshots, "phases|all|none")
      ->check(CLI::IsMember({"phases", "all", "none"}));

  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::optional<double> fixed_eps;
  unsigned threads = 1;
  auto* verify = app.add_subcommand("verify", "Random validity campaign");
  verify->add_option("--nx", nx)->required();
  verify->add_option("--ny", ny)->required();
  verify->add_option("--trials", trials);
  verify->add_option("--seed", seed);
  verify->add_option("--eps", fixed_eps, "fixed TV radius; omit to pair independent samples");
  verify->add_option("--threads", threads);

  auto* extremal = app.add_subcommand("extremal", "Print the saturating pair");
  extremal->add_option("--epsilon", epsilon)->required();
  extremal->add_option("--nx", nx)->required();
  extremal->add_option("--ny", ny);

  std::size_t steps = 20;
  auto* search = app.add_subcommand("search", "Exhaustive grid search for the largest gap");
  search->add_option("--nx", nx)->required();
  search->add_option("--ny", ny)->required();
  search->add_option("--epsilon", epsilon)->required();
  search->add_option("--steps", steps);

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("equivocation");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, err, err);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kUsage;
  }

  try {
    if (bound->parsed()) {
      const auto result = continuity_bound(epsilon, nx);
      Json doc;
      doc["value"] = result.value;
      doc["clamped"] = result.clamped;
      emit(out, doc);
    } else if (entropy_cmd->parsed()) {
      static const std::map<std::string, ConditionalFormula> formulas{
          {"mixture", ConditionalFormula::Mixture},
          {"difference", ConditionalFormula::Difference},
          {"direct", ConditionalFormula::Direct}};
      const auto joint = load_distribution(file_a);
      Json doc;
      doc["H_XY"] = joint_entropy(joint);
      doc["H_X"] = entropy(marginal(joint, Axis::X));
      doc["H_Y"] = entropy(marginal(joint, Axis::Y));
      doc["H_X_given_Y"] = conditional_entropy(joint, formulas.at(formula_name));
      emit(out, doc);
    } else if (tv->parsed()) {
      const auto p = load_distribution(file_a);
      const auto q = load_distribution(file_b);
      Json doc;
      doc["tv"] = tv_distance(p, q);
      emit(out, doc);
    } else if (walk->parsed()) {
      const DistributionPair pair(load_distribution(file_a), load_distribution(file_b));
      const SnapshotMode mode = snapshots == "all"    ? SnapshotMode::All
                                : snapshots == "none" ? SnapshotMode::None
                                                      : SnapshotMode::Phases;
      const WalkTrace trace = run_walk(pair, mode);
      if (!trace_file.empty()) {
        std::ofstream lines(trace_file);
        if (!lines) throw UsageError("cannot write " + trace_file);
        for (const auto& step : trace.steps) lines << to_json(step).dump() << '\n';
      }
      Json doc;
      doc["swapped"] = trace.swapped;
      doc["initial"] = {{"gap", trace.steps.front().gap}, {"tv", trace.steps.front().tv}};
      doc["final"] = {{"gap", trace.steps.back().gap}, {"tv", trace.steps.back().tv}};
      doc["estimate"] = {{"final_gap", trace.estimate.final_gap},
                         {"marginal_bound", trace.estimate.marginal_bound},
                         {"bound_at_initial_tv", trace.estimate.bound_at_initial_tv}};
      Json parts = Json::array();
      for (const auto& part : trace.partitions) {
        Json in = Json::array();
        Json outside = Json::array();
        for (auto i : part.in_set) in.push_back(i + 1);
        for (auto i : part.out_set) outside.push_back(i + 1);
        parts.push_back({{"block", part.block + 1}, {"in", in}, {"out", outside}});
      }
      doc["partitions"] = parts;
      doc["steps"] = trace.steps.size();
      doc["final_pair"] = to_json(trace.final_pair);
      emit(out, doc);
    } else if (verify->parsed()) {
      const EpsMode mode = fixed_eps ? EpsMode::fixed_at(*fixed_eps) : EpsMode::random();
      emit(out, to_json(verify_trials(nx, ny, trials, mode, seed, threads)));
    } else if (extremal->parsed()) {
      emit(out, to_json(extremal_pair(epsilon, nx, ny)));
    } else if (search->parsed()) {
      const auto result = grid_search_max_gap(nx, ny, epsilon, steps);
      Json doc;
      doc["max_gap"] = result.max_gap;
      doc["bound"] = result.bound;
      doc["argmax_pair"] = to_json(result.argmax_pair);
      emit(out, doc);
    }
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const ParseError& e) {
    err << "malformed input: " << e.what() << '\n';
    return kMalformed;
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const ShapeMismatch& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  }
  return kSuccess;
}

}  // namespace equivocation::cli
