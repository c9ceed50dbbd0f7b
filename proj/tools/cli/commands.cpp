#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "ingest.hpp"
#include "kst/distributions.hpp"
#include "kst/ecdf.hpp"
#include "kst/error.hpp"
#include "kst/hypothesis.hpp"
#include "kst/parallel.hpp"
#include "kst/rng.hpp"
#include "kst/simulation.hpp"

namespace kst::cli {
namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  unsigned threads = default_threads();
  bool no_timing = false;
};

struct DatasetFlags {
  std::string format = "lines";
  std::optional<std::string> column;
  bool header = false;
  std::string missing = "error";
};

class PhaseTimer {
 public:
  void start() { begin_ = std::chrono::steady_clock::now(); }
  void stop(const char* phase) {
    const auto elapsed = std::chrono::steady_clock::now() - begin_;
    phases_[phase] = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  const Json& phases() const { return phases_; }

 private:
  std::chrono::steady_clock::time_point begin_;
  Json phases_ = Json::object();
};

void add_dataset_flags(CLI::App* app, DatasetFlags& flags) {
  app->add_option("--format", flags.format, "Input format")
      ->check(CLI::IsMember({"lines", "csv"}))
      ->capture_default_str();
  app->add_option("--column", flags.column, "CSV column: header name or 0-based index");
  app->add_flag("--header", flags.header,
                "CSV with a numeric --column: the first row is a header");
  app->add_option("--missing", flags.missing, "Policy for non-numeric cells")
      ->check(CLI::IsMember({"error", "skip", "skip-with-count"}))
      ->capture_default_str();
}

DatasetSpec make_spec(std::vector<std::string> paths, const DatasetFlags& flags) {
  DatasetSpec spec;
  spec.paths = std::move(paths);
  spec.format = flags.format == "csv" ? InputFormat::csv : InputFormat::lines;
  spec.column = flags.column;
  spec.header = flags.header;
  spec.missing = flags.missing == "error" ? MissingPolicy::error : MissingPolicy::skip;
  try {
    spec.validate();
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  return spec;
}

Json dataset_json(const DatasetSpec& spec, const Dataset& data) {
  Json j;
  j["paths"] = spec.paths;
  j["format"] = format_name(spec.format);
  if (spec.column) j["column"] = *spec.column;
  j["missing"] = missing_name(spec.missing);
  j["values"] = data.total_count();
  j["skipped"] = data.total_skipped();
  return j;
}

void add_skip_warnings(Json& warnings, const Dataset& data) {
  for (const auto& p : data.partitions) {
    if (p.skipped > 0) {
      warnings.push_back("skipped " + std::to_string(p.skipped) +
                         " non-numeric value(s) in " + p.partition.provenance);
    }
  }
}

Json verdict_json(const KsResult& r) {
  Json j;
  j["d_stat"] = r.d_stat;
  j["t_stat"] = r.t_stat;
  j["p_value"] = r.p_value;
  j["critical_value"] = r.critical_value;
  j["n_effective"] = r.n_effective;
  j["alpha"] = r.alpha;
  j["reject"] = r.reject;
  return j;
}

Json transform_json(const TransformReport& t) {
  Json j;
  j["m"] = t.m;
  j["n_reference"] = t.n_reference;
  j["ratio"] = t.ratio;
  j["ratio_threshold"] = kRatioWarningThreshold;
  j["ratio_warning"] = t.ratio_warning;
  j["dithered"] = t.dithered;
  j["seed_used"] = t.seed_used ? Json(*t.seed_used) : Json(nullptr);
  return j;
}

std::string ratio_warning_text(const TransformReport& t) {
  return "sample size ratio m/n = " + format_double(t.ratio) +
         " is not below the recommended threshold 0.2; the transform test "
         "is unreliable unless the reference sample is much larger";
}

void emit(std::ostream& out, Json report, const PhaseTimer& timer,
          const GlobalFlags& global) {
  if (!global.no_timing) report["timing_ms"] = timer.phases();
  out << report.dump(2) << '\n';
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::string_view rest(text);
  while (true) {
    const auto comma = rest.find(',');
    const auto value = parse_value(rest.substr(0, comma));
    if (!value) throw UsageError("bad --mu-grid value in '" + text + "'");
    grid.push_back(*value);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return grid;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> methods;
  std::string_view rest(text);
  while (true) {
    const auto comma = rest.find(',');
    try {
      methods.push_back(parse_method(rest.substr(0, comma)));
    } catch (const InvalidInput& e) {
      throw UsageError(e.what());
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return methods;
}

std::uint64_t seed_or_fresh(const std::optional<std::uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  const std::uint64_t fresh = SeededRng::fresh_seed();
  err << "seed: " << fresh << '\n';
  return fresh;
}

// --- ecdf-build -----------------------------------------------------------

struct BuildArgs {
  std::vector<std::string> inputs;
  std::string out;
  DatasetFlags data;
};

int run_ecdf_build(const BuildArgs& args, const GlobalFlags& global, std::ostream& out) {
  const auto spec = make_spec(args.inputs, args.data);
  PhaseTimer timer;

  timer.start();
  const auto data = ingest(spec, global.threads);
  timer.stop("ingest");

  timer.start();
  const auto ecdf = merge_partitions(data.sorted_partitions());
  timer.stop("build");

  timer.start();
  std::ofstream file(args.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open output file '" + args.out + "'", args.out);
  write_ecdf(file, ecdf);
  file.close();
  if (!file) throw IoError("error writing output file '" + args.out + "'", args.out);
  timer.stop("write");

  Json report;
  report["command"] = "ecdf-build";
  report["output"] = args.out;
  report["n"] = ecdf.size();
  report["partitions"] = data.partitions.size();
  report["inputs"] = dataset_json(spec, data);
  Json warnings = Json::array();
  add_skip_warnings(warnings, data);
  report["warnings"] = warnings;
  emit(out, std::move(report), timer, global);
  return kExitAccept;
}

// --- test -------------------------------------------------------------------

struct TestArgs {
  double alpha = kDefaultAlpha;
  DatasetFlags data;
  // one-sample
  std::vector<std::string> sample;
  std::string f0;
  // two-sample
  std::vector<std::string> x;
  std::vector<std::string> y;
  // transform
  std::vector<std::string> reference;
  std::string reference_ecdf;
  std::vector<std::string> comparison;
  std::vector<std::string> windows;
  bool dither = false;
  std::optional<std::uint64_t> seed;
};

int verdict_code(bool reject) { return reject ? kExitReject : kExitAccept; }

int run_one_sample(const TestArgs& args, const GlobalFlags& global, std::ostream& out) {
  ContinuousDist f0 = ContinuousDist::uniform01();
  try {
    f0 = ContinuousDist::parse(args.f0);
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  const auto spec = make_spec(args.sample, args.data);
  PhaseTimer timer;

  timer.start();
  const auto data = ingest(spec, global.threads);
  timer.stop("ingest");

  timer.start();
  const auto ecdf = merge_partitions(data.sorted_partitions());
  timer.stop("build");

  timer.start();
  const auto result = ks_one_sample(ecdf.values(), f0, args.alpha);
  timer.stop("test");

  Json report;
  report["command"] = "test one-sample";
  report["verdict"] = verdict_json(result);
  report["f0"] = f0.describe();
  report["inputs"] = {{"data", dataset_json(spec, data)}};
  report["seed"] = nullptr;
  Json warnings = Json::array();
  add_skip_warnings(warnings, data);
  report["warnings"] = warnings;
  emit(out, std::move(report), timer, global);
  return verdict_code(result.reject);
}

int run_two_sample(const TestArgs& args, const GlobalFlags& global, std::ostream& out) {
  const auto x_spec = make_spec(args.x, args.data);
  const auto y_spec = make_spec(args.y, args.data);
  PhaseTimer timer;

  timer.start();
  const auto x_data = ingest(x_spec, global.threads);
  const auto y_data = ingest(y_spec, global.threads);
  timer.stop("ingest");

  timer.start();
  const auto x_ecdf = merge_partitions(x_data.sorted_partitions());
  const auto y_ecdf = merge_partitions(y_data.sorted_partitions());
  timer.stop("build");

  timer.start();
  const auto result = ks_two_sample(x_ecdf.values(), y_ecdf.values(), args.alpha);
  timer.stop("test");

  Json report;
  report["command"] = "test two-sample";
  report["verdict"] = verdict_json(result);
  report["inputs"] = {{"x", dataset_json(x_spec, x_data)},
                      {"y", dataset_json(y_spec, y_data)}};
  report["seed"] = nullptr;
  Json warnings = Json::array();
  add_skip_warnings(warnings, x_data);
  add_skip_warnings(warnings, y_data);
  report["warnings"] = warnings;
  emit(out, std::move(report), timer, global);
  return verdict_code(result.reject);
}

int run_transform(const TestArgs& args, const GlobalFlags& global, std::ostream& out,
                  std::ostream& err) {
  if (args.reference.empty() == args.reference_ecdf.empty()) {
    throw UsageError("transform needs exactly one of --reference or --reference-ecdf");
  }
  if (args.comparison.empty() == args.windows.empty()) {
    throw UsageError("transform needs exactly one of --comparison or --window");
  }

  std::optional<DatasetSpec> ref_spec;
  if (!args.reference.empty()) ref_spec = make_spec(args.reference, args.data);
  const bool windowed = !args.windows.empty();
  std::vector<DatasetSpec> cmp_specs;
  if (windowed) {
    for (const auto& w : args.windows) cmp_specs.push_back(make_spec({w}, args.data));
  } else {
    cmp_specs.push_back(make_spec(args.comparison, args.data));
  }

  TransformOptions options;
  options.dither = args.dither;
  options.threads = global.threads;
  if (args.dither) options.seed = seed_or_fresh(args.seed, err);

  PhaseTimer timer;
  Json warnings = Json::array();

  timer.start();
  std::optional<Dataset> ref_data;
  std::optional<EmpiricalCdf> reference;
  if (ref_spec) {
    ref_data = ingest(*ref_spec, global.threads);
    add_skip_warnings(warnings, *ref_data);
  } else {
    std::ifstream file(args.reference_ecdf, std::ios::binary);
    if (!file) {
      throw IoError("cannot open ecdf file '" + args.reference_ecdf + "'",
                    args.reference_ecdf);
    }
    reference = read_ecdf(file);
  }
  std::vector<Dataset> cmp_data;
  std::vector<std::vector<double>> comparisons;
  for (const auto& spec : cmp_specs) {
    cmp_data.push_back(ingest(spec, global.threads));
    add_skip_warnings(warnings, cmp_data.back());
    comparisons.push_back(cmp_data.back().concatenated());
  }
  timer.stop("ingest");

  timer.start();
  if (ref_data) reference = merge_partitions(ref_data->sorted_partitions());
  timer.stop("build");

  // Transform and test are fused per window; the split below times them for
  // the single-comparison case.
  std::vector<TransformTestResult> results;
  if (!windowed) {
    timer.start();
    auto report = transform_sample(*reference, comparisons.front(), options);
    timer.stop("transform");
    timer.start();
    auto result = ks_one_sample_uniform(report.transformed, args.alpha);
    result.n_effective = static_cast<double>(report.m);
    timer.stop("test");
    results.push_back({result, std::move(report)});
  } else {
    timer.start();
    results = ks_transform_batch(*reference, comparisons, args.alpha, options,
                                 global.threads);
    timer.stop("transform_and_test");
  }

  Json report;
  report["command"] = "test transform";
  bool any_reject = false;
  bool any_ratio_warning = false;
  for (const auto& r : results) {
    any_reject = any_reject || r.result.reject;
    any_ratio_warning = any_ratio_warning || r.report.ratio_warning;
  }
  if (!windowed) {
    report["verdict"] = verdict_json(results.front().result);
    report["transform"] = transform_json(results.front().report);
  } else {
    Json list = Json::array();
    for (std::size_t w = 0; w < results.size(); ++w) {
      list.push_back({{"window", args.windows[w]},
                      {"verdict", verdict_json(results[w].result)},
                      {"transform", transform_json(results[w].report)}});
    }
    report["reject_any"] = any_reject;
    report["windows"] = list;
  }

  Json inputs;
  if (ref_spec) {
    inputs["reference"] = dataset_json(*ref_spec, *ref_data);
  } else {
    inputs["reference"] = {{"ecdf", args.reference_ecdf}, {"values", reference->size()}};
  }
  if (!windowed) {
    inputs["comparison"] = dataset_json(cmp_specs.front(), cmp_data.front());
  } else {
    Json list = Json::array();
    for (std::size_t w = 0; w < cmp_specs.size(); ++w) {
      list.push_back(dataset_json(cmp_specs[w], cmp_data[w]));
    }
    inputs["windows"] = list;
  }
  report["inputs"] = inputs;
  report["seed"] = options.seed ? Json(*options.seed) : Json(nullptr);

  if (any_ratio_warning) {
    for (const auto& r : results) {
      if (r.report.ratio_warning) {
        warnings.push_back(ratio_warning_text(r.report));
        break;
      }
    }
  }
  report["warnings"] = warnings;
  emit(out, std::move(report), timer, global);
  return verdict_code(any_reject);
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::size_t n = 2000;
  std::size_t m = 200;
  std::size_t reps = 10000;
  double alpha = kDefaultAlpha;
  std::string mu_grid;
  std::string methods = "two_sample,transform";
  std::string null_family = "normal";
  std::optional<std::uint64_t> seed;
  bool dither = false;
  bool shared_reference = false;
  std::string out;
};

int run_simulate(const SimulateArgs& args, const GlobalFlags& global, std::ostream& out,
                 std::ostream& err) {
  SimulationConfig config;
  config.n_reference = args.n;
  config.m_comparison = args.m;
  config.replications = args.reps;
  config.alpha = args.alpha;
  config.methods = parse_methods(args.methods);
  config.dither = args.dither;
  config.shared_reference = args.shared_reference;
  try {
    config.null_family = ContinuousDist::parse(args.null_family);
    if (!args.mu_grid.empty()) {
      config.mu_grid = parse_grid(args.mu_grid);
    } else if (std::holds_alternative<Exponential>(config.null_family.family())) {
      config.mu_grid = default_rate_grid();
    }
    config.validate();
  } catch (const InvalidInput& e) {
    throw UsageError(e.what());
  }
  config.master_seed = seed_or_fresh(args.seed, err);

  const auto curves = estimate_power(config, global.threads);

  std::ostream& summary = args.out.empty() ? err : out;
  if (args.out.empty()) {
    write_power_csv(out, curves);
  } else {
    std::ofstream file(args.out, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open output file '" + args.out + "'", args.out);
    write_power_csv(file, curves);
    file.close();
    if (!file) throw IoError("error writing output file '" + args.out + "'", args.out);
  }
  for (const auto& curve : curves) {
    double lo = 1.0;
    double hi = 0.0;
    for (const auto& p : curve.points) {
      lo = std::min(lo, p.rejection_rate);
      hi = std::max(hi, p.rejection_rate);
    }
    summary << method_name(curve.method) << ": " << curve.points.size()
            << " grid point(s), n=" << config.n_reference << " m=" << config.m_comparison
            << " reps=" << config.replications << " seed=" << config.master_seed
            << ", rejection rate in [" << format_double(lo) << ", " << format_double(hi)
            << "]\n";
  }
  return kExitAccept;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kolmogorov-Smirnov testing on partitioned data via the ecdf transform",
               "kst"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags global;
  app.add_option("--threads", global.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--no-timing", global.no_timing, "Leave wall-clock timings out of reports");

  std::function<int()> action;

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("ecdf-build", "Merge partition files into an ecdf");
  build_cmd->add_option("inputs", build.inputs, "Partition files")->required();
  build_cmd->add_option("-o,--out", build.out, "Output ecdf file")->required();
  add_dataset_flags(build_cmd, build.data);
  build_cmd->callback([&] { action = [&] { return run_ecdf_build(build, global, out); }; });

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "Run a Kolmogorov-Smirnov test");
  test_cmd->require_subcommand(1);
  test_cmd->fallthrough();
  test_cmd->add_option("--alpha", test.alpha, "Significance level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_dataset_flags(test_cmd, test.data);

  auto* one_cmd = test_cmd->add_subcommand("one-sample", "Sample vs a specified CDF");
  one_cmd->add_option("--data", test.sample, "Sample partition files")->required();
  one_cmd->add_option("--f0", test.f0,
                      "uniform | normal[:MU,SIGMA] | exponential[:RATE]")
      ->required();
  one_cmd->callback([&] { action = [&] { return run_one_sample(test, global, out); }; });

  auto* two_cmd = test_cmd->add_subcommand("two-sample", "Classic two-sample test");
  two_cmd->add_option("--x", test.x, "First sample partition files")->required();
  two_cmd->add_option("--y", test.y, "Second sample partition files")->required();
  two_cmd->callback([&] { action = [&] { return run_two_sample(test, global, out); }; });

  auto* tr_cmd = test_cmd->add_subcommand(
      "transform", "Comparison sample through the reference ecdf, then a uniformity test");
  tr_cmd->add_option("--reference", test.reference, "Reference partition files");
  tr_cmd->add_option("--reference-ecdf", test.reference_ecdf, "Persisted ecdf file");
  tr_cmd->add_option("--comparison", test.comparison, "Comparison partition files");
  tr_cmd->add_option("--window", test.windows,
                     "Comparison window file; repeat to test several windows");
  tr_cmd->add_flag("--dither", test.dither, "Break ties with noise inside each ecdf step");
  tr_cmd->add_option("--seed", test.seed, "Seed for dithering");
  tr_cmd->callback(
      [&] { action = [&] { return run_transform(test, global, out, err); }; });

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo power curves as CSV");
  sim_cmd->add_option("--n", sim.n, "Reference sample size")->capture_default_str();
  sim_cmd->add_option("--m", sim.m, "Comparison sample size")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Replications per grid point")
      ->capture_default_str();
  sim_cmd->add_option("--alpha", sim.alpha, "Significance level")->capture_default_str();
  sim_cmd->add_option("--mu-grid", sim.mu_grid,
                      "Comma-separated mean shifts (normal) or rate multipliers");
  sim_cmd->add_option("--methods", sim.methods, "two_sample,transform")
      ->capture_default_str();
  sim_cmd->add_option("--null", sim.null_family, "normal | exponential")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Master seed");
  sim_cmd->add_flag("--dither", sim.dither, "Dither the transform method");
  sim_cmd->add_flag("--shared-reference", sim.shared_reference,
                    "One reference sample per grid point instead of per trial");
  sim_cmd->add_option("-o,--out", sim.out, "CSV output file (default: stdout)");
  sim_cmd->callback(
      [&] { action = [&] { return run_simulate(sim, global, out, err); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();

  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitAccept : kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const kst::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitData;
  } catch (const InvalidData& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const EmptySample& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace kst::cli
