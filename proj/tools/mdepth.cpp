// mdepth: command-line front end for metric depths, deepest objects,
// location simulations and permutation tests.

#include "mdepth/deepest.hpp"
#include "mdepth/depths.hpp"
#include "mdepth/errors.hpp"
#include "mdepth/format.hpp"
#include "mdepth/inference.hpp"
#include "mdepth/io.hpp"
#include "mdepth/kernels.hpp"
#include "mdepth/metric_core.hpp"
#include "mdepth/metric_spaces.hpp"
#include "mdepth/parallel.hpp"
#include "mdepth/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace mdepth;

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct Globals {
  std::size_t threads = 0;
  std::string format = "json";
  std::string isa = "auto";
  bool timing = false;
};

struct Options {
  std::string in;
  std::string dm;
  std::string out;
  std::string metric;
  std::string method = "MOD3";
  std::string methods = "MOD3,MOD2,MLD,MSD,MHD";
  std::uint64_t seed = 0;

  // deepest / out-of-sample
  bool out_of_sample = false;
  double tsh = 0.9;
  std::string optimizer = "simplex";
  std::size_t starts = 5;
  double halfwidth = 0.05;
  std::size_t max_evals = 0;

  // simulations
  std::size_t p = 3;
  std::size_t n = 60;
  double eps = 0.05;
  std::size_t reps = 50;
  double nu_bulk = 0.0;
  double nu_out = 3.0;
  double lambda_bulk = 5.0;
  double lambda_out = -1.0;
  bool baseline = false;

  // inference
  std::size_t B = 500;
  bool pvalue_corrected = false;
  std::size_t k = 0;
  std::size_t repeats = 10;

  // gen-hist
  std::size_t n1 = 20;
  std::size_t n2 = 20;
  double shift = 0.0;
  std::size_t bins = 20;
  std::size_t draws = 200;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
}

Dataset load_dataset(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    return read_histogram_csv(in);
  }
  return parse_dataset_json(read_file(path));
}

DistanceMatrix load_distance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  return read_distance_matrix_csv(in);
}

json base_config(const std::string& command, const Globals& g) {
  return {{"command", command},
          {"format", g.format},
          {"timing", g.timing},
          {"isa", kernels::isa_name(kernels::active_isa())}};
}

OptimizerConfig optimizer_config(const Options& o) {
  OptimizerConfig cfg;
  cfg.algorithm = parse_optimizer(o.optimizer);
  cfg.half_width = o.halfwidth;
  cfg.starts = o.starts;
  cfg.max_evaluations = o.max_evals;
  if (!(cfg.half_width > 0.0)) throw InvalidArgument("--halfwidth must be positive");
  if (cfg.starts < 1) throw InvalidArgument("--starts must be at least 1");
  if (!(o.tsh > 0.0 && o.tsh <= 1.0)) throw InvalidArgument("--tsh must lie in (0, 1]");
  return cfg;
}

void add_optimizer_config(json& cfg, const Options& o) {
  cfg["tsh"] = o.tsh;
  cfg["optimizer"] = o.optimizer;
  cfg["starts"] = o.starts;
  cfg["halfwidth"] = o.halfwidth;
  cfg["max_evals"] = o.max_evals;
}

void require_json(const Globals& g, const char* command) {
  if (g.format != "json") {
    throw InvalidArgument(std::string(command) + " writes JSON only");
  }
}

// --- commands -------------------------------------------------------------------

void cmd_dist(const Options& o, const Globals&) {
  const Dataset data = load_dataset(o.in);
  const DistanceMatrix dm = distance_matrix(data.objects, parse_metric(o.metric));
  std::ostringstream out;
  write_distance_matrix_csv(out, dm);
  write_output(o.out, out.str());
}

void cmd_depth(const Options& o, const Globals& g) {
  const DepthMethod method = parse_method(o.method);
  json cfg = base_config("depth", g);
  cfg["method"] = o.method;
  DistanceMatrix dm;
  if (!o.dm.empty()) {
    if (!o.in.empty()) throw InvalidArgument("give either --dm or --in, not both");
    dm = load_distance_csv(o.dm);
    cfg["dm"] = o.dm;
  } else {
    if (o.in.empty()) throw InvalidArgument("depth needs --dm or --in");
    if (o.metric.empty()) throw InvalidArgument("--in requires --metric");
    dm = distance_matrix(load_dataset(o.in).objects, parse_metric(o.metric));
    cfg["in"] = o.in;
    cfg["metric"] = o.metric;
  }
  const DepthReport report = depth_all_sample(dm, method);
  if (g.format == "csv") {
    write_output(o.out, depth_report_csv(report, g.timing));
  } else {
    write_output(o.out, report_document("depth", cfg, to_json(report, g.timing)));
  }
}

void cmd_deepest(const Options& o, const Globals& g) {
  const Metric metric = parse_metric(o.metric);
  const DepthMethod method = parse_method(o.method);
  if (o.out_of_sample && metric != Metric::Spd) {
    throw InvalidArgument("out-of-sample supports metric spd only");
  }
  const OptimizerConfig opt = optimizer_config(o);
  const Dataset data = load_dataset(o.in);
  const DistanceMatrix dm = distance_matrix(data.objects, metric);

  json cfg = base_config("deepest", g);
  cfg["in"] = o.in;
  cfg["metric"] = o.metric;
  cfg["method"] = o.method;
  cfg["out_of_sample"] = o.out_of_sample;
  cfg["seed"] = o.seed;
  json result;
  if (o.out_of_sample) {
    add_optimizer_config(cfg, o);
    std::vector<CorrelationMatrix> sample;
    for (const Object& obj : data.objects.objects()) sample.push_back(std::get<CorrelationMatrix>(obj));
    result = to_json(deepest_out_of_sample(sample, method, o.tsh, opt, &dm), method, opt.algorithm);
  } else {
    const InSampleDeepest best = deepest_in_sample(dm, method);
    result = to_json(best, data.objects[best.index], method);
    if (!data.labels[best.index].empty()) result["label"] = data.labels[best.index];
  }
  if (g.format == "csv") {
    std::ostringstream out;
    out << "source,method,depth\n"
        << result["source"].get<std::string>() << ',' << o.method << ','
        << format_double(result["depth"].get<double>()) << '\n';
    write_output(o.out, out.str());
  } else {
    write_output(o.out, report_document("deepest", cfg, result));
  }
}

void emit_experiment(const std::string& command, const ExperimentReport& report, json cfg,
                     const Options& o, const Globals& g) {
  if (g.format == "csv") {
    write_output(o.out, experiment_csv(report, g.timing));
  } else {
    write_output(o.out, report_document(command, cfg, to_json(report, g.timing)));
  }
}

std::vector<DepthMethod> methods_or_none(const std::string& list) {
  if (list.empty() || list == "none") return {};
  return parse_methods(list);
}

void cmd_simulate_corr(const Options& o, const Globals& g) {
  ExperimentSpec spec;
  spec.space = SimSpace::Correlation;
  spec.corr = {o.p, o.n, o.eps, o.nu_bulk, o.nu_out, o.reps, o.seed};
  spec.methods = methods_or_none(o.methods);
  spec.baseline = o.baseline;
  json cfg = base_config("simulate-corr", g);
  cfg.update({{"p", o.p}, {"n", o.n}, {"eps", o.eps}, {"nu_bulk", o.nu_bulk}, {"nu_out", o.nu_out},
              {"reps", o.reps}, {"methods", o.methods}, {"baseline", o.baseline},
              {"out_of_sample", o.out_of_sample}, {"seed", o.seed}});
  if (o.out_of_sample) {
    spec.out_of_sample = OutOfSampleSettings{o.tsh, optimizer_config(o)};
    add_optimizer_config(cfg, o);
  }
  validate(spec.corr);
  emit_experiment("simulate-corr", run_location_experiment(spec), cfg, o, g);
}

void cmd_simulate_sphere(const Options& o, const Globals& g) {
  ExperimentSpec spec;
  spec.space = SimSpace::Sphere;
  spec.sphere = {o.p, o.n, o.eps, o.lambda_bulk, o.lambda_out, o.reps, o.seed};
  spec.methods = methods_or_none(o.methods);
  spec.baseline = o.baseline;
  validate(spec.sphere);
  json cfg = base_config("simulate-sphere", g);
  cfg.update({{"p", o.p}, {"n", o.n}, {"eps", o.eps}, {"lambda_bulk", o.lambda_bulk},
              {"lambda_out", o.lambda_out}, {"reps", o.reps}, {"methods", o.methods},
              {"baseline", o.baseline}, {"seed", o.seed}});
  emit_experiment("simulate-sphere", run_location_experiment(spec), cfg, o, g);
}

void cmd_permtest(const Options& o, const Globals& g) {
  const Metric metric = parse_metric(o.metric);
  const DepthMethod method = parse_method(o.method);
  if (o.B == 0) throw InvalidArgument("--B must be at least 1");
  const Dataset data = load_dataset(o.in);
  const PermutationReport report = permutation_test(data, metric, method, o.B, o.seed);
  json cfg = base_config("permtest", g);
  cfg.update({{"in", o.in}, {"metric", o.metric}, {"method", o.method}, {"B", o.B},
              {"seed", o.seed}, {"pvalue_corrected", o.pvalue_corrected}});
  if (g.format == "csv") {
    write_output(o.out, permutation_csv(report, o.pvalue_corrected));
  } else {
    write_output(o.out, report_document("permtest", cfg, to_json(report, o.pvalue_corrected)));
  }
}

void cmd_swap_test(const Options& o, const Globals& g) {
  const Metric metric = parse_metric(o.metric);
  const std::vector<DepthMethod> methods = parse_methods(o.methods);
  const Dataset data = load_dataset(o.in);
  const SwapExperimentReport report =
      label_swap_experiment(data, metric, methods, o.k, o.repeats, o.B, o.seed);
  json cfg = base_config("swap-test", g);
  cfg.update({{"in", o.in}, {"metric", o.metric}, {"methods", o.methods}, {"k", o.k},
              {"repeats", o.repeats}, {"B", o.B}, {"seed", o.seed}});
  if (g.format == "csv") {
    write_output(o.out, swap_csv(report));
  } else {
    write_output(o.out, report_document("swap-test", cfg, to_json(report)));
  }
}

void cmd_gen_hist(const Options& o, const Globals& g) {
  require_json(g, "gen-hist");
  write_output(o.out, dataset_to_json(gen_histogram_groups(o.n1, o.n2, o.shift, o.bins, o.seed, o.draws)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric depths for object data: depth values, deepest objects, "
               "location simulations and permutation tests."};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();

  Globals g;
  Options o;
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores); output does not depend on it");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--isa", g.isa, "Kernel variant")->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  app.add_flag("--timing", g.timing, "Record wall-clock times in reports (makes output run-dependent)");

  const auto metric_check = CLI::IsMember({"spd", "sphere", "wass", "eucl"});
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Output path (default stdout)"); };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed")->required();
  };
  auto add_oos = [&](CLI::App* sub) {
    sub->add_flag("--out-of-sample", o.out_of_sample, "Optimize over correlation matrices beyond the sample");
    sub->add_option("--tsh", o.tsh, "PCA cumulative explained-variance threshold");
    sub->add_option("--optimizer", o.optimizer, "Box optimizer")
        ->check(CLI::IsMember({"simplex", "lbfgs"}));
    sub->add_option("--starts", o.starts, "Number of top in-sample starts");
    sub->add_option("--halfwidth", o.halfwidth, "Half-width of the search box per PCA coordinate");
    sub->add_option("--max-evals", o.max_evals, "Objective evaluations per start (0 = 500 x PCA dimension)");
  };

  auto* dist = app.add_subcommand("dist", "Pairwise distance matrix as CSV");
  dist->add_option("--in", o.in, "Object dataset (JSON, or histogram CSV)")->required();
  dist->add_option("--metric", o.metric, "Metric")->required()->check(metric_check);
  add_out(dist);

  auto* depth = app.add_subcommand("depth", "Depth of every sample member");
  depth->add_option("--dm", o.dm, "Distance matrix CSV");
  depth->add_option("--in", o.in, "Object dataset (JSON, or histogram CSV)");
  depth->add_option("--metric", o.metric, "Metric for --in")->check(metric_check);
  depth->add_option("--method", o.method, "MOD3|MOD2|MLD|MSD|MHD");
  add_out(depth);

  auto* deepest = app.add_subcommand("deepest", "Deepest object of a sample");
  deepest->add_option("--in", o.in, "Object dataset")->required();
  deepest->add_option("--metric", o.metric, "Metric")->required()->check(metric_check);
  deepest->add_option("--method", o.method, "MOD3|MOD2|MLD|MSD|MHD");
  deepest->add_option("--seed", o.seed, "Recorded in the report; the search is deterministic");
  add_oos(deepest);
  add_out(deepest);

  auto* sim_corr = app.add_subcommand("simulate-corr", "Correlation-matrix location experiment");
  sim_corr->add_option("--p", o.p, "Matrix dimension");
  sim_corr->add_option("--n", o.n, "Sample size");
  sim_corr->add_option("--eps", o.eps, "Outlier probability");
  sim_corr->add_option("--nu-bulk", o.nu_bulk, "Spectrum location of the bulk");
  sim_corr->add_option("--nu-out", o.nu_out, "Spectrum location of outliers");
  sim_corr->add_option("--reps", o.reps, "Replicates");
  sim_corr->add_option("--methods", o.methods, "Comma-separated depth methods, or none");
  sim_corr->add_flag("--baseline", o.baseline, "Add the random-pick estimator");
  add_oos(sim_corr);
  add_seed(sim_corr);
  add_out(sim_corr);

  auto* sim_sphere = app.add_subcommand("simulate-sphere", "Sphere location experiment");
  sim_sphere->add_option("--p", o.p, "Ambient dimension");
  sim_sphere->add_option("--n", o.n, "Sample size");
  sim_sphere->add_option("--eps", o.eps, "Outlier probability");
  sim_sphere->add_option("--lambda-bulk", o.lambda_bulk, "Mean scale of the bulk");
  sim_sphere->add_option("--lambda-out", o.lambda_out, "Mean scale of outliers");
  sim_sphere->add_option("--reps", o.reps, "Replicates");
  sim_sphere->add_option("--methods", o.methods, "Comma-separated depth methods, or none");
  sim_sphere->add_flag("--baseline", o.baseline, "Add the random-pick estimator");
  sim_sphere->add_flag("--out-of-sample", o.out_of_sample, "Not available for spheres");
  add_seed(sim_sphere);
  add_out(sim_sphere);

  auto* perm = app.add_subcommand("permtest", "Two-group permutation test");
  perm->add_option("--in", o.in, "Labeled dataset (JSON, or histogram CSV)")->required();
  perm->add_option("--metric", o.metric, "Metric")->required()->check(metric_check);
  perm->add_option("--method", o.method, "MOD3|MOD2|MLD|MSD|MHD");
  perm->add_option("--B", o.B, "Permutations");
  perm->add_flag("--pvalue-corrected", o.pvalue_corrected, "Report (1+count)/(1+B) instead of count/B");
  add_seed(perm);
  add_out(perm);

  auto* swap = app.add_subcommand("swap-test", "Permutation tests after swapping k labels per group");
  swap->add_option("--in", o.in, "Labeled dataset (JSON, or histogram CSV)")->required();
  swap->add_option("--metric", o.metric, "Metric")->required()->check(metric_check);
  swap->add_option("--methods", o.methods, "Comma-separated depth methods");
  swap->add_option("--k", o.k, "Labels swapped per group");
  swap->add_option("--repeats", o.repeats, "Repeats");
  swap->add_option("--B", o.B, "Permutations per test");
  add_seed(swap);
  add_out(swap);

  auto* gen = app.add_subcommand("gen-hist", "Synthetic two-group histogram dataset");
  gen->add_option("--n1", o.n1, "Group A size");
  gen->add_option("--n2", o.n2, "Group B size");
  gen->add_option("--shift", o.shift, "Mean shift of group B");
  gen->add_option("--bins", o.bins, "Bins per histogram");
  gen->add_option("--draws", o.draws, "Normal draws per histogram");
  add_seed(gen);
  add_out(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    set_max_threads(g.threads);
    if (g.isa == "scalar") kernels::set_active_isa(kernels::Isa::Scalar);
    if (g.isa == "avx2") kernels::set_active_isa(kernels::Isa::Avx2);

    if (dist->parsed()) cmd_dist(o, g);
    else if (depth->parsed()) cmd_depth(o, g);
    else if (deepest->parsed()) cmd_deepest(o, g);
    else if (sim_corr->parsed()) cmd_simulate_corr(o, g);
    else if (sim_sphere->parsed()) {
      if (o.out_of_sample) throw InvalidArgument("out-of-sample supports metric spd only");
      cmd_simulate_sphere(o, g);
    }
    else if (perm->parsed()) cmd_permtest(o, g);
    else if (swap->parsed()) cmd_swap_test(o, g);
    else if (gen->parsed()) cmd_gen_hist(o, g);
  } catch (const InvalidArgument& e) {
    std::cerr << "mdepth: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "mdepth: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "mdepth: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
