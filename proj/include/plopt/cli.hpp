#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plopt/data_io.hpp"
#include "plopt/dataset.hpp"
#include "plopt/learner.hpp"
#include "plopt/metrics.hpp"
#include "plopt/pareto.hpp"
#include "plopt/search.hpp"

namespace plopt::cli {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kReportSchema = "plopt-report/1";
inline constexpr const char* kModelSchema = "plopt-models/1";

namespace detail {

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Collects every file this run creates so a usage error can remove partial
// outputs before exiting.
struct OutputSet {
  std::vector<fs::path> created;

  void write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
    created.push_back(path);
  }

  void remove_all() {
    for (const auto& p : created) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    created.clear();
  }
};

inline MeasureKind parse_measure_kind(const std::string& name) {
  for (MeasureKind k :
       {MeasureKind::binary_f, MeasureKind::macro_f, MeasureKind::micro_multilabel_f,
        MeasureKind::micro_multiclass_f, MeasureKind::binary_jaccard,
        MeasureKind::micro_multilabel_jaccard, MeasureKind::micro_multiclass_jaccard})
    if (name == measure_name(k)) return k;
  throw CLI::ValidationError("--measure", "unknown measure kind '" + name + "'");
}

inline std::vector<double> parse_c_grid(const std::string& text) {
  std::vector<double> out;
  if (text.rfind("pow2:", 0) == 0) {
    int lo = 0, hi = 0;
    if (std::sscanf(text.c_str(), "pow2:%d:%d", &lo, &hi) != 2 || lo > hi)
      throw CLI::ValidationError("--c-grid", "expected pow2:LO:HI");
    for (int e = lo; e <= hi; ++e) out.push_back(std::pow(2.0, e));
    return out;
  }
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--c-grid", "bad value '" + tok + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--c-grid", "empty grid");
  return out;
}

struct CostGridChoice {
  enum class Mode { step, paper, bracket } mode = Mode::step;
  double epsilon0 = 0.1;
};

inline CostGridChoice parse_cost_grid(const std::string& text) {
  CostGridChoice out;
  if (text == "paper") {
    out.mode = CostGridChoice::Mode::paper;
  } else if (text == "bracket") {
    out.mode = CostGridChoice::Mode::bracket;
  } else if (text.rfind("step:", 0) == 0) {
    try {
      out.epsilon0 = std::stod(text.substr(5));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--cost-grid", "bad step value in '" + text + "'");
    }
    if (!(out.epsilon0 > 0.0)) throw CLI::ValidationError("--cost-grid", "step must be positive");
  } else {
    throw CLI::ValidationError("--cost-grid", "expected paper, step:EPS or bracket");
  }
  return out;
}

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json profile_json(const ErrorProfile& e) {
  return json{{"num_labels", e.num_labels}, {"fn", e.fn}, {"fp", e.fp}, {"priors", e.priors}};
}

inline json selection_json(const LabelSelection& s) {
  json j{{"label", s.label}, {"t", s.level}, {"C", s.c},
         {"theta", s.theta}, {"val_value", opt_json(s.val_value)}};
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

inline json eval_json(const EvalReport& rep) {
  json j{{"value", opt_json(rep.value)}, {"profile", profile_json(rep.profile)}};
  if (!rep.per_label.empty()) {
    json per = json::array();
    for (const auto& v : rep.per_label) per.push_back(opt_json(v));
    j["per_label"] = per;
  }
  return j;
}

inline json result_json(const OptResult& res) {
  json sel = json::array();
  for (const auto& s : res.selection) sel.push_back(selection_json(s));
  json j{{"selection", sel}, {"val_objective", opt_json(res.val_objective)}};
  if (res.test) j["test"] = eval_json(*res.test);
  return j;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void append_trace(std::string& out, int replicate, const std::vector<TraceCell>& cells) {
  for (const auto& c : cells) {
    out += std::to_string(replicate);
    out += '\t';
    out += std::to_string(c.label);
    out += '\t';
    out += format_double(c.level);
    out += '\t';
    out += format_double(c.c);
    out += '\t';
    out += c.val_value ? format_double(*c.val_value) : "NA";
    out += '\t';
    out += format_double(c.val_cost);
    out += '\t';
    out += format_double(c.theta);
    out += '\t';
    out += c.chosen ? '1' : '0';
    out += '\n';
  }
}

inline json models_json(const std::vector<LinearModel>& models, const MeasureSpec& spec,
                        const Dataset& sample) {
  json arr = json::array();
  for (const auto& m : models)
    arr.push_back(json{{"weights", m.weights},
                       {"threshold", m.threshold},
                       {"loss", loss_name(m.loss)},
                       {"t", m.cost_level},
                       {"C", m.regularization}});
  return json{{"schema", kModelSchema},
              {"measure", measure_name(spec.kind)},
              {"beta", spec.beta},
              {"num_labels", spec.num_labels},
              {"dim", sample.dim},
              {"bias_index", sample.bias_index},
              {"bias_value", sample.bias_value},
              {"models", arr}};
}

inline std::vector<LinearModel> models_from_json(const json& j, MeasureSpec& spec_out, int& dim,
                                                 int& bias_index, double& bias_value) {
  if (j.value("schema", "") != kModelSchema)
    throw std::runtime_error("model file: unsupported schema");
  MeasureSpec spec;
  spec.kind = parse_measure_kind(j.at("measure").get<std::string>());
  spec.beta = j.at("beta").get<double>();
  spec.num_labels = j.at("num_labels").get<int>();
  spec.validate();
  spec_out = spec;
  dim = j.at("dim").get<int>();
  bias_index = j.at("bias_index").get<int>();
  bias_value = j.at("bias_value").get<double>();
  std::vector<LinearModel> models;
  for (const auto& mj : j.at("models")) {
    LinearModel m;
    m.weights = mj.at("weights").get<std::vector<double>>();
    m.threshold = mj.at("threshold").get<double>();
    m.loss = mj.at("loss").get<std::string>() == "hinge" ? LossKind::hinge : LossKind::log_loss;
    m.cost_level = mj.at("t").get<double>();
    m.regularization = mj.at("C").get<double>();
    if (m.weights.size() != static_cast<std::size_t>(dim))
      throw std::runtime_error("model file: weight dimension mismatch");
    models.push_back(std::move(m));
  }
  if (models.empty()) throw std::runtime_error("model file: no models");
  return models;
}

// Level grid for one replicate. Bracket mode narrows the range with the
// five-point scheme on the replicate's own validation curve, then lays the
// regular step grid over the surviving subinterval.
inline std::vector<double> replicate_levels(const MeasureSpec& spec, const CostGridChoice& choice,
                                            const SearchConfig& scfg, const MeasureSpec& run_spec,
                                            const Dataset& train, const Dataset& val,
                                            bool multilabel_micro) {
  GridSpec grid;
  if (choice.mode == CostGridChoice::Mode::paper) {
    grid.mode = GridSpec::Mode::paper;
    return cost_grid(spec, grid);
  }
  grid.epsilon0 = choice.epsilon0;
  if (choice.mode == CostGridChoice::Mode::step) return cost_grid(spec, grid);

  auto objective_at = [&](double t) -> double {
    try {
      std::vector<double> one{t};
      std::optional<double> v;
      if (multilabel_micro)
        v = optimize_micro_f(train, val, run_spec, one, scfg).cost_min.val_objective;
      else if (run_spec.kind == MeasureKind::macro_f)
        v = optimize_macro_f(train, val, run_spec, one, scfg).val_objective;
      else
        v = optimize_binary_f(train, val, run_spec, one, scfg).val_objective;
      return v ? *v : -std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  double hi = spec.level_max();
  auto br = bracket_interval(objective_at, 0.0, hi, hi / 4.0);
  GridSpec sub;
  sub.epsilon0 = choice.epsilon0;
  sub.t_min = br.lo;
  sub.t_max = br.hi;
  return cost_grid(spec, sub);
}

}  // namespace detail

struct TrainFlags {
  std::string train_path;
  std::string test_path;
  double beta = 1.0;
  std::string loss = "log";
  std::string c_grid = "1";
  std::string cost_grid = "step:0.1";
  std::string threshold = "on";
  std::string selection = "f";
  std::string measure;  // default depends on the subcommand
  std::uint64_t seed = 1;
  int replicates = 5;
  std::string out_dir = ".";
  int workers = 1;
  double bias = 100.0;
  double val_fraction = 1.0 / 3.0;
  double test_fraction = 1.0 / 4.0;
  int max_iterations = 50000;
  double tolerance = 1e-6;
};

namespace detail {

inline void add_train_flags(CLI::App* cmd, TrainFlags& f, const char* default_measure,
                            const std::vector<std::string>& measure_choices) {
  f.measure = default_measure;
  cmd->add_option("--train", f.train_path, "training data (libsvm text)")->required();
  cmd->add_option("--test", f.test_path, "test data; omitted: carve 1/4 from --train");
  cmd->add_option("--beta", f.beta, "F-measure beta");
  cmd->add_option("--loss", f.loss, "surrogate loss")->check(CLI::IsMember({"log", "hinge"}));
  cmd->add_option("--c-grid", f.c_grid, "C values: comma list or pow2:LO:HI");
  cmd->add_option("--cost-grid", f.cost_grid, "level grid: paper, step:EPS or bracket");
  cmd->add_option("--threshold", f.threshold, "tune decision thresholds")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--selection", f.selection, "outer selection rule: f or cost")
      ->check(CLI::IsMember({"f", "cost"}));
  cmd->add_option("--measure", f.measure, "measure kind")->check(CLI::IsMember(measure_choices));
  cmd->add_option("--seed", f.seed, "split seed");
  cmd->add_option("--replicates", f.replicates, "number of random splits")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--workers", f.workers, "parallel grid workers")->check(CLI::PositiveNumber);
  cmd->add_option("--bias", f.bias, "appended bias feature value (0 disables)");
  cmd->add_option("--val-fraction", f.val_fraction, "validation fraction of the training part");
  cmd->add_option("--test-fraction", f.test_fraction, "test fraction when carving from --train");
  cmd->add_option("--max-iterations", f.max_iterations, "solver iteration cap");
  cmd->add_option("--tolerance", f.tolerance, "solver gradient tolerance");
}

inline json config_json(const std::string& command, const TrainFlags& f) {
  return json{{"command", command},
              {"train", f.train_path},
              {"test", f.test_path},
              {"beta", f.beta},
              {"loss", f.loss},
              {"c_grid", f.c_grid},
              {"cost_grid", f.cost_grid},
              {"threshold", f.threshold},
              {"selection", f.selection},
              {"measure", f.measure},
              {"seed", f.seed},
              {"replicates", f.replicates},
              {"out", f.out_dir},
              {"workers", f.workers},
              {"bias", f.bias},
              {"val_fraction", f.val_fraction},
              {"test_fraction", f.test_fraction},
              {"max_iterations", f.max_iterations},
              {"tolerance", f.tolerance}};
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline int run_train(const std::string& command, const TrainFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  OutputSet outputs;
  try {
    MeasureKind kind = parse_measure_kind(flags.measure);
    bool multilabel = kind != MeasureKind::binary_f && kind != MeasureKind::binary_jaccard;
    bool micro = kind == MeasureKind::micro_multilabel_f ||
                 kind == MeasureKind::micro_multilabel_jaccard;

    Dataset full = parse_libsvm(slurp(flags.train_path), multilabel, 0.0);
    std::optional<Dataset> test_file;
    if (!flags.test_path.empty())
      test_file = parse_libsvm(slurp(flags.test_path), multilabel, 0.0);
    int dim = full.dim;
    if (test_file) dim = std::max(dim, test_file->dim);
    full.dim = dim;
    append_bias(full, dim + 1, flags.bias);
    if (test_file) {
      test_file->dim = dim;
      append_bias(*test_file, dim + 1, flags.bias);
    }

    int num_labels = 2;
    if (multilabel) {
      num_labels = 1;
      for (const auto& set : full.label_sets)
        for (int v : set) num_labels = std::max(num_labels, v);
      if (test_file)
        for (const auto& set : test_file->label_sets)
          for (int v : set) num_labels = std::max(num_labels, v);
    }
    MeasureSpec spec;
    spec.kind = kind;
    spec.beta = flags.beta;
    spec.num_labels = num_labels;
    spec.validate();

    SearchConfig scfg;
    scfg.c_grid = parse_c_grid(flags.c_grid);
    scfg.loss = flags.loss == "hinge" ? LossKind::hinge : LossKind::log_loss;
    scfg.tune = flags.threshold == "on";
    scfg.rule = flags.selection == "cost" ? SelectionRule::min_cost : SelectionRule::max_value;
    scfg.max_iterations = flags.max_iterations;
    scfg.gradient_tolerance = flags.tolerance;
    scfg.workers = flags.workers;
    scfg.validate();
    CostGridChoice grid_choice = parse_cost_grid(flags.cost_grid);

    SplitSpec split;
    split.seed = flags.seed;
    split.val_fraction = flags.val_fraction;
    split.test_fraction = flags.test_fraction;
    split.replicates = flags.replicates;

    fs::path out_dir(flags.out_dir);
    json replicate_reports = json::array();
    std::string trace_text = "replicate\tlabel\tt\tC\tval_F\tval_cost\ttheta\tchosen\n";
    std::vector<double> mean_val, mean_test;
    std::vector<double> mean_val_vmax, mean_test_vmax;
    bool all_ok = true;

    for (int r = 0; r < flags.replicates; ++r) {
      json rj{{"replicate", r}};
      try {
        SplitResult parts = split_dataset(full, split, r, !test_file.has_value());
        const Dataset& test = test_file ? *test_file : *parts.test;
        auto levels = replicate_levels(spec, grid_choice, scfg, spec, parts.train, parts.val, micro);
        if (micro) {
          MicroOptResult res = optimize_micro_f(parts.train, parts.val, spec, levels, scfg);
          res.cost_min.test = evaluate_models(res.cost_min.models, test, spec);
          res.value_max.test = evaluate_models(res.value_max.models, test, spec);
          rj["status"] = "ok";
          rj["cost_min"] = result_json(res.cost_min);
          rj["value_max"] = result_json(res.value_max);
          append_trace(trace_text, r, res.trace);
          outputs.write(out_dir / ("models_r" + std::to_string(r) + ".json"),
                        models_json(res.cost_min.models, spec, full).dump(2) + "\n");
          if (res.cost_min.val_objective) mean_val.push_back(*res.cost_min.val_objective);
          if (res.cost_min.test->value) mean_test.push_back(*res.cost_min.test->value);
          if (res.value_max.val_objective) mean_val_vmax.push_back(*res.value_max.val_objective);
          if (res.value_max.test->value) mean_test_vmax.push_back(*res.value_max.test->value);
        } else {
          OptResult res;
          if (kind == MeasureKind::macro_f)
            res = optimize_macro_f(parts.train, parts.val, spec, levels, scfg);
          else
            res = optimize_binary_f(parts.train, parts.val, spec, levels, scfg);
          res.test = evaluate_models(res.models, test, spec);
          rj["status"] = "ok";
          rj["result"] = result_json(res);
          append_trace(trace_text, r, res.trace);
          outputs.write(out_dir / ("models_r" + std::to_string(r) + ".json"),
                        models_json(res.models, spec, full).dump(2) + "\n");
          if (res.val_objective) mean_val.push_back(*res.val_objective);
          if (res.test->value) mean_test.push_back(*res.test->value);
        }
      } catch (const std::exception& ex) {
        all_ok = false;
        rj["status"] = std::string("failed: ") + ex.what();
      }
      replicate_reports.push_back(rj);
    }

    json mean{{"val_objective", mean_of(mean_val)}, {"test_value", mean_of(mean_test)}};
    if (micro) {
      mean["value_max_val_objective"] = mean_of(mean_val_vmax);
      mean["value_max_test_value"] = mean_of(mean_test_vmax);
    }
    outputs.write(out_dir / "trace.tsv", trace_text);
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json report{{"schema", kReportSchema},
                {"command", command},
                {"config", config_json(command, flags)},
                {"num_labels", num_labels},
                {"replicates", replicate_reports},
                {"mean", mean},
                {"trace_file", "trace.tsv"},
                {"wall_time_sec", wall}};
    outputs.write(out_dir / "report.json", report.dump(2) + "\n");
    return all_ok ? 0 : 2;
  } catch (const std::exception& ex) {
    outputs.remove_all();
    std::cerr << command << ": " << ex.what() << "\n";
    return 1;
  }
}

// The bundled three-point binary demonstration distribution.
inline FiniteDistribution default_demo_distribution() {
  FiniteDistribution dist;
  dist.task = TaskKind::binary;
  dist.num_labels = 2;
  dist.points = {{0.65, {0.70}}, {0.30, {0.40}}, {0.05, {0.15}}};
  return dist;
}

inline int run_pareto_demo(const std::string& dist_path, double beta, const std::string& out_dir,
                           double epsilon0, double epsilon1, int samples, std::uint64_t seed) {
  OutputSet outputs;
  try {
    FiniteDistribution dist = dist_path.empty()
                                  ? default_demo_distribution()
                                  : parse_distribution(slurp(dist_path), TaskKind::binary, 2);
    MeasureSpec spec = MeasureSpec::binary_f(beta);
    auto set = enumerate_profiles(dist);
    auto front = pareto_front(set);
    auto hull = hull_candidates(set);
    auto reduction = verify_reduction(dist, spec);
    auto bound = phi_bound_witness(dist, spec, epsilon0, epsilon1, samples, seed);

    std::string profiles = "index\tassignment\tfn\tfp\tF\n";
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
      const auto& e = set.entries[i];
      std::string assign;
      for (int a : e.assignment) assign += std::to_string(a);
      auto v = try_measure_value(spec, e.profile);
      profiles += std::to_string(i) + "\t" + assign + "\t" + format_double(e.profile.fn[0]) + "\t" +
                  format_double(e.profile.fp[0]) + "\t" + (v ? format_double(*v) : "NA") + "\n";
    }
    auto index_tsv = [&](const std::vector<int>& idx) {
      std::string out = "index\tfn\tfp\n";
      for (int i : idx)
        out += std::to_string(i) + "\t" + format_double(set.entries[i].profile.fn[0]) + "\t" +
               format_double(set.entries[i].profile.fp[0]) + "\n";
      return out;
    };
    fs::path dir(out_dir);
    outputs.write(dir / "profiles.tsv", profiles);
    outputs.write(dir / "front.tsv", index_tsv(front));
    outputs.write(dir / "hull.tsv", index_tsv(hull));

    json report{{"schema", "plopt-pareto-demo/1"},
                {"beta", beta},
                {"points", dist.points.size()},
                {"profiles", set.entries.size()},
                {"front", front},
                {"hull", hull},
                {"best_value", reduction.best_value},
                {"best_cost", json{{"costs", reduction.best_cost.costs},
                                   {"offset", reduction.best_cost.offset},
                                   {"t", reduction.best_cost.level}}},
                {"optimal", reduction.optimal},
                {"cost_minimizers", reduction.cost_minimizers},
                {"optimal_cost_check", reduction.passed ? "PASS" : "FAIL"},
                {"violations", reduction.violations},
                {"bound_check",
                 json{{"epsilon0", epsilon0},
                      {"epsilon1", epsilon1},
                      {"samples", bound.samples},
                      {"checked", bound.checked},
                      {"violations", bound.violations},
                      {"max_ratio", bound.max_ratio},
                      {"phi", bound.phi},
                      {"max_norm", bound.max_norm},
                      {"status", bound.passed ? "PASS" : "FAIL"}}}};
    outputs.write(dir / "report.json", report.dump(2) + "\n");
    std::cout << "profiles: " << set.entries.size() << "\n"
              << "pareto front: " << front.size() << " points\n"
              << "hull vertices: " << hull.size() << "\n"
              << "optimal-cost check: " << (reduction.passed ? "PASS" : "FAIL") << "\n"
              << "approximation bound: " << (bound.passed ? "PASS" : "FAIL")
              << " (max ratio " << bound.max_ratio << ")\n";
    return reduction.passed && bound.passed ? 0 : 2;
  } catch (const std::exception& ex) {
    outputs.remove_all();
    std::cerr << "pareto-demo: " << ex.what() << "\n";
    return 1;
  }
}

inline int run_galaxy_gen(int n, std::uint64_t seed, const std::string& out_path) {
  OutputSet outputs;
  try {
    GalaxySpec gspec;
    gspec.n = n;
    gspec.seed = seed;
    GalaxySample sample = generate_galaxy(gspec);
    outputs.write(out_path, serialize_libsvm(sample.data));
    std::string clusters;
    for (int c : sample.clusters) {
      clusters += std::to_string(c);
      clusters += '\n';
    }
    outputs.write(out_path + ".clusters", clusters);
    return 0;
  } catch (const std::exception& ex) {
    outputs.remove_all();
    std::cerr << "galaxy-gen: " << ex.what() << "\n";
    return 1;
  }
}

inline int run_evaluate(const std::string& model_path, const std::string& data_path,
                        const std::string& measure) {
  try {
    json mj = json::parse(slurp(model_path));
    MeasureSpec stored;
    int dim = 0, bias_index = 0;
    double bias_value = 0.0;
    auto models = models_from_json(mj, stored, dim, bias_index, bias_value);
    MeasureSpec spec = stored;
    if (!measure.empty()) {
      spec.kind = parse_measure_kind(measure);
      spec.validate();
    }
    if (spec.task() == TaskKind::multiclass)
      throw std::runtime_error("invalid combination: multiclass evaluation is unsupported");
    if (spec.task() == TaskKind::multilabel &&
        models.size() != static_cast<std::size_t>(spec.num_labels))
      throw std::runtime_error("invalid combination: model count differs from label count");

    Dataset ds = parse_libsvm(slurp(data_path), spec.task() == TaskKind::multilabel, 0.0);
    if (ds.dim >= bias_index && bias_index != 0)
      throw std::runtime_error("data has feature indices past the model's bias column");
    if (bias_index != 0) {
      ds.dim = bias_index - 1;
      append_bias(ds, bias_index, bias_value);
    } else {
      ds.dim = dim;
    }
    auto rep = evaluate_models(models, ds, spec);
    json out{{"schema", "plopt-evaluate/1"},
             {"measure", measure_name(spec.kind)},
             {"beta", spec.beta},
             {"data", data_path},
             {"model", model_path}};
    out.update(eval_json(rep));
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "evaluate: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace detail

inline int run(std::vector<std::string> args) {
  CLI::App app{"pseudo-linear measure optimization by cost-sensitive reduction"};
  app.require_subcommand(1);

  TrainFlags binary_flags, macro_flags, micro_flags;
  auto* train_binary = app.add_subcommand("train-binary", "binary F / Jaccard maximization");
  detail::add_train_flags(train_binary, binary_flags, "binary-f", {"binary-f", "binary-jaccard"});
  auto* train_macro = app.add_subcommand("train-macro", "macro-F via binary relevance");
  detail::add_train_flags(train_macro, macro_flags, "macro-f", {"macro-f"});
  auto* train_micro = app.add_subcommand("train-micro", "multilabel micro-F maximization");
  detail::add_train_flags(train_micro, micro_flags, "micro-f", {"micro-f", "micro-jaccard"});

  std::string eval_model, eval_data, eval_measure;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate stored models on a dataset");
  evaluate->add_option("--model", eval_model, "models JSON written by train-*")->required();
  evaluate->add_option("--data", eval_data, "libsvm data file")->required();
  evaluate->add_option("--measure", eval_measure, "measure kind (default: the model's)");

  std::string demo_dist, demo_out = ".";
  double demo_beta = 1.0, demo_eps0 = 0.05, demo_eps1 = 0.0;
  int demo_samples = 100;
  std::uint64_t demo_seed = 1;
  auto* demo = app.add_subcommand("pareto-demo",
                                  "enumerate a finite distribution and check the theory");
  demo->add_option("--dist", demo_dist, "distribution table (default: bundled 3-point demo)");
  demo->add_option("--beta", demo_beta, "F-measure beta");
  demo->add_option("--out", demo_out, "output directory");
  demo->add_option("--epsilon0", demo_eps0, "cost perturbation radius for the bound check");
  demo->add_option("--epsilon1", demo_eps1, "cost suboptimality for the bound check");
  demo->add_option("--samples", demo_samples, "perturbation sample count");
  demo->add_option("--seed", demo_seed, "perturbation seed");

  int gal_n = 20000;
  std::uint64_t gal_seed = 1;
  std::string gal_out;
  auto* galaxy = app.add_subcommand("galaxy-gen", "generate the synthetic Galaxy sample");
  galaxy->add_option("--n", gal_n, "sample count")->check(CLI::PositiveNumber);
  galaxy->add_option("--seed", gal_seed, "generator seed");
  galaxy->add_option("--out", gal_out, "output libsvm path (sidecar: PATH.clusters)")->required();

  // CLI11 wants argv in reverse order when parsing a vector.
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  if (train_binary->parsed()) return detail::run_train("train-binary", binary_flags);
  if (train_macro->parsed()) return detail::run_train("train-macro", macro_flags);
  if (train_micro->parsed()) return detail::run_train("train-micro", micro_flags);
  if (evaluate->parsed()) return detail::run_evaluate(eval_model, eval_data, eval_measure);
  if (demo->parsed())
    return detail::run_pareto_demo(demo_dist, demo_beta, demo_out, demo_eps0, demo_eps1,
                                   demo_samples, demo_seed);
  if (galaxy->parsed()) return detail::run_galaxy_gen(gal_n, gal_seed, gal_out);
  return 1;
}

inline int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args));
}

}  // namespace plopt::cli
