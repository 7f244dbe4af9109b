#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mof/concrete.hpp"
#include "mof/experiment.hpp"
#include "mof/simgen.hpp"

namespace {

using namespace mof;

ResponseModel parse_model_or_throw(const std::string& name) {
  for (const ResponseModel m : kAllResponseModels)
    if (name == to_string(m)) return m;
  throw CLI::ValidationError("--models", "unknown model '" + name + "'");
}

FeatureDependence parse_dependence_or_throw(const std::string& name) {
  if (name == "independent" || name == "ind") return FeatureDependence::independent;
  if (name == "weakly_dependent" || name == "wd")
    return FeatureDependence::weakly_dependent;
  if (name == "strongly_dependent" || name == "sd")
    return FeatureDependence::strongly_dependent;
  throw CLI::ValidationError("--dependence", "unknown dependence '" + name + "'");
}

std::vector<MethodKind> parse_methods_or_throw(const std::vector<std::string>& names) {
  std::vector<MethodKind> out;
  for (const std::string& name : names) {
    if (name == "all") {
      out.assign(kAllMethods.begin(), kAllMethods.end());
      continue;
    }
    const auto kind = parse_method(name);
    if (!kind) throw CLI::ValidationError("--methods", "unknown method '" + name + "'");
    out.push_back(*kind);
  }
  return out;
}

GridFilter build_filter(const std::vector<std::string>& models,
                        const std::vector<std::string>& dependencies,
                        const std::vector<double>& rhos, const std::vector<int>& ells,
                        const std::vector<int>& sizes) {
  GridFilter filter;
  for (const std::string& m : models) filter.models.push_back(parse_model_or_throw(m));
  for (const std::string& d : dependencies)
    filter.dependencies.push_back(parse_dependence_or_throw(d));
  if (!rhos.empty() || !ells.empty()) {
    const std::vector<double> use_rhos = rhos.empty() ? std::vector<double>{0.0, 0.5, 0.9} : rhos;
    const std::vector<int> use_ells = ells.empty() ? std::vector<int>{1, 2} : ells;
    for (const double rho : use_rhos)
      for (const int ell : use_ells) {
        CovarianceSpec cov{rho, rho == 0.0 ? 1 : ell};  // rho=0 collapses ell
        cov.validate();
        const auto same = [&](const CovarianceSpec& c) {
          return c.rho == cov.rho && c.ell == cov.ell;
        };
        if (std::none_of(filter.covariances.begin(), filter.covariances.end(), same))
          filter.covariances.push_back(cov);
      }
  }
  filter.sample_sizes = sizes;
  return filter;
}

// Writes to --out when given, stdout otherwise.
int with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(std::cout);
    return 0;
  }
  std::ofstream file(path);
  if (!file) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return 1;
  }
  fn(file);
  if (!file.good()) {
    std::cerr << "error: failed writing '" << path << "'\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-output regression forests: simulation grid and concrete study"};
  app.require_subcommand(1);

  std::vector<std::string> models, dependencies, method_names{"all"};
  std::vector<double> rhos;
  std::vector<int> ells, sizes;
  std::string out_path, data_path, standardize = "global";
  int reps = 0, folds = 5, trees = 500, threads = 1;
  std::uint64_t seed = 1;

  auto add_grid_flags = [&](CLI::App* cmd) {
    cmd->add_option("--models", models, "response models (default: all)");
    cmd->add_option("--dependence", dependencies,
                    "feature dependence: independent|weakly_dependent|strongly_dependent");
    cmd->add_option("--rho", rhos, "error correlations from {0, 0.5, 0.9}");
    cmd->add_option("--ell", ells, "covariance exponent from {1, 2}");
    cmd->add_option("--n", sizes, "sample sizes (default: 100 200 500)");
  };
  auto add_common_flags = [&](CLI::App* cmd) {
    cmd->add_option("--methods", method_names,
                    "rf_univ|rf_multi|et_univ|et_multi|et_mt|all");
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--out", out_path, "output CSV path (default: stdout)");
    cmd->add_option("--trees", trees, "trees per ensemble")->check(CLI::PositiveNumber);
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run the simulation grid");
  add_grid_flags(simulate);
  add_common_flags(simulate);
  bool summary = false;
  simulate->add_option("--reps", reps, "CV repetitions per setting (default 50)");
  simulate->add_option("--folds", folds, "CV folds");
  simulate->add_option("--threads", threads, "parallel grid cells");
  simulate->add_flag("--summary", summary, "aggregate repetitions to means");

  CLI::App* concrete = app.add_subcommand("concrete", "run the concrete slump study");
  add_common_flags(concrete);
  concrete->add_option("--data", data_path, "path to the UCI slump_test.data file")
      ->required();
  concrete->add_option("--reps", reps, "CV repetitions (default 20)");
  concrete->add_option("--folds", folds, "CV folds");
  concrete->add_option("--standardize", standardize, "global|fold output standardization")
      ->check(CLI::IsMember({"global", "fold"}));
  bool no_loocv = false;
  concrete->add_flag("--no-loocv", no_loocv, "skip the leave-one-out pass");

  CLI::App* bench = app.add_subcommand("bench", "measure fit runtimes");
  add_grid_flags(bench);
  add_common_flags(bench);
  bench->add_option("--reps", reps, "measurements per setting (default 10)");

  CLI::App* gen = app.add_subcommand("gen", "dump one generated dataset as CSV");
  std::string gen_model = "linear1", gen_dependence = "independent";
  double gen_rho = 0.0;
  int gen_ell = 1, gen_n = 200;
  gen->add_option("--model", gen_model, "response model");
  gen->add_option("--dependence", gen_dependence, "feature dependence");
  gen->add_option("--rho", gen_rho, "error correlation");
  gen->add_option("--ell", gen_ell, "covariance exponent");
  gen->add_option("--n", gen_n, "sample size")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "seed");
  gen->add_option("--out", out_path, "output CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      GridOptions opt;
      opt.filter = build_filter(models, dependencies, rhos, ells, sizes);
      opt.methods = parse_methods_or_throw(method_names);
      opt.repetitions = reps > 0 ? reps : 50;
      opt.folds = folds;
      opt.num_trees = trees;
      opt.seed = seed;
      opt.threads = threads;
      opt.summary = summary;
      return with_output(out_path, [&](std::ostream& os) { run_grid(opt, os); });
    }
    if (concrete->parsed()) {
      const Dataset data = load_concrete(data_path);
      ConcreteOptions opt;
      opt.methods = parse_methods_or_throw(method_names);
      opt.repetitions = reps > 0 ? reps : 20;
      opt.folds = folds;
      opt.num_trees = trees;
      opt.seed = seed;
      opt.standardize = standardize == "fold" ? Standardize::train_fold : Standardize::global;
      opt.include_loocv = !no_loocv;
      return with_output(out_path, [&](std::ostream& os) { run_concrete(data, opt, os); });
    }
    if (bench->parsed()) {
      BenchOptions opt;
      opt.filter = build_filter(models, dependencies, rhos, ells, sizes);
      opt.methods = parse_methods_or_throw(method_names);
      opt.repetitions = reps > 0 ? reps : 10;
      opt.num_trees = trees;
      opt.seed = seed;
      return with_output(out_path, [&](std::ostream& os) { run_bench(opt, os); });
    }
    if (gen->parsed()) {
      SimulationSetting setting;
      setting.model = parse_model_or_throw(gen_model);
      setting.dependence = parse_dependence_or_throw(gen_dependence);
      setting.cov = CovarianceSpec{gen_rho, gen_rho == 0.0 ? 1 : gen_ell};
      setting.cov.validate();
      setting.n = gen_n;
      setting.seed = seed;
      const Dataset data = make_dataset(setting);
      return with_output(out_path, [&](std::ostream& os) { write_dataset_csv(os, data); });
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
