#include "mof/experiment.hpp"

#include <array>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mof/concrete.hpp"
#include "mof/parallel.hpp"

namespace mof {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

struct CellResult {
  EvalMetrics metrics;
  double fit_seconds = 0.0;
};

}  // namespace

std::vector<SettingKey> enumerate_settings(const GridFilter& filter) {
  const auto& models = filter.models.empty()
                           ? std::vector<ResponseModel>(kAllResponseModels.begin(),
                                                        kAllResponseModels.end())
                           : filter.models;
  const auto& deps = filter.dependencies.empty()
                         ? std::vector<FeatureDependence>(kAllFeatureDependencies.begin(),
                                                          kAllFeatureDependencies.end())
                         : filter.dependencies;
  const auto& covs = filter.covariances.empty()
                         ? std::vector<CovarianceSpec>(kAllCovarianceSpecs.begin(),
                                                       kAllCovarianceSpecs.end())
                         : filter.covariances;
  const auto& sizes = filter.sample_sizes.empty()
                          ? std::vector<int>(kAllSampleSizes.begin(), kAllSampleSizes.end())
                          : filter.sample_sizes;
  std::vector<SettingKey> out;
  for (const ResponseModel model : models)
    for (const CovarianceSpec& cov : covs)
      for (const FeatureDependence dep : deps)
        for (const int n : sizes) {
          cov.validate();
          if (n < 10) throw std::invalid_argument("grid: n too small");
          out.push_back(SettingKey{model, dep, cov, n});
        }
  if (out.empty()) throw std::invalid_argument("grid: empty setting filter");
  return out;
}

bool is_unstable_setting(const SettingKey& setting) {
  return setting.dependence == FeatureDependence::weakly_dependent &&
         (setting.model == ResponseModel::linear1 ||
          setting.model == ResponseModel::linear2 || setting.model == ResponseModel::mgam1);
}

void run_grid(const GridOptions& options, std::ostream& out) {
  if (options.repetitions < 1)
    throw std::invalid_argument("run_grid: repetitions must be >= 1");
  const std::vector<SettingKey> settings = enumerate_settings(options.filter);
  const std::size_t num_methods = options.methods.size();
  if (num_methods == 0) throw std::invalid_argument("run_grid: no methods");
  const auto reps = static_cast<std::size_t>(options.repetitions);

  // One task per (setting, repetition): generate a fresh dataset and run one
  // CV pass per method on it. Tasks are independent; results land in
  // preallocated slots, so the CSV is identical for any thread count.
  const std::size_t num_tasks = settings.size() * reps;
  std::vector<std::vector<CellResult>> results(num_tasks);

  parallel_for(num_tasks, options.threads, [&](std::size_t task) {
    const std::size_t s = task / reps;
    const std::size_t rep = task % reps;
    const SettingKey& key = settings[s];
    SimulationSetting sim;
    sim.model = key.model;
    sim.dependence = key.dependence;
    sim.cov = key.cov;
    sim.n = key.n;
    sim.seed = mix_seed(options.seed, s, rep);
    const Dataset data = make_dataset(sim);

    std::vector<CellResult> row(num_methods);
    for (std::size_t m = 0; m < num_methods; ++m) {
      MethodConfig mc;
      mc.kind = options.methods[m];
      mc.num_trees = options.num_trees;
      CrossValOptions cv;
      cv.folds = options.folds;
      cv.repetitions = 1;
      // Methods share the fold assignment within a repetition (paired design).
      cv.seed = mix_seed(options.seed, s, rep);
      const CrossValResult r = cross_validate(data, make_fitter(mc), cv);
      row[m] = CellResult{r.mean, r.mean_fit_seconds};
    }
    results[task] = std::move(row);
  });

  if (options.summary) {
    out << "model,dependence,rho,ell,n,method,repetitions,overall_mse,mse_y1,mse_y2,"
           "mse_y3,fit_seconds,unstable\n";
  } else {
    out << "model,dependence,rho,ell,n,method,repetition,overall_mse,mse_y1,mse_y2,"
           "mse_y3,fit_seconds,unstable\n";
  }
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const SettingKey& key = settings[s];
    const std::string prefix = std::string(to_string(key.model)) + "," +
                               std::string(to_string(key.dependence)) + "," +
                               fmt(key.cov.rho) + "," + std::to_string(key.cov.ell) + "," +
                               std::to_string(key.n) + ",";
    const char* unstable = is_unstable_setting(key) ? "true" : "false";
    for (std::size_t m = 0; m < num_methods; ++m) {
      const std::string method{method_name(options.methods[m])};
      if (options.summary) {
        EvalMetrics mean;
        mean.per_output_mse.assign(3, 0.0);
        double fit_seconds = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
          const CellResult& cell = results[s * reps + rep][m];
          mean.overall_mse += cell.metrics.overall_mse;
          mean.sum_of_mse += cell.metrics.sum_of_mse;
          for (std::size_t j = 0; j < 3; ++j)
            mean.per_output_mse[j] += cell.metrics.per_output_mse[j];
          fit_seconds += cell.fit_seconds;
        }
        const auto k = static_cast<double>(reps);
        out << prefix << method << "," << reps << "," << fmt(mean.overall_mse / k) << ","
            << fmt(mean.per_output_mse[0] / k) << "," << fmt(mean.per_output_mse[1] / k)
            << "," << fmt(mean.per_output_mse[2] / k) << "," << fmt(fit_seconds / k)
            << "," << unstable << "\n";
      } else {
        for (std::size_t rep = 0; rep < reps; ++rep) {
          const CellResult& cell = results[s * reps + rep][m];
          out << prefix << method << "," << rep << "," << fmt(cell.metrics.overall_mse)
              << "," << fmt(cell.metrics.per_output_mse[0]) << ","
              << fmt(cell.metrics.per_output_mse[1]) << ","
              << fmt(cell.metrics.per_output_mse[2]) << "," << fmt(cell.fit_seconds)
              << "," << unstable << "\n";
        }
      }
    }
  }
}

void run_concrete(const Dataset& concrete, const ConcreteOptions& options,
                  std::ostream& out) {
  concrete.validate();
  if (concrete.d() != 3) throw std::invalid_argument("run_concrete: expected 3 outputs");

  struct Subset {
    std::vector<std::size_t> columns;
    std::string name;
  };
  std::vector<Subset> subsets;
  for (std::size_t j = 0; j < 3; ++j)
    subsets.push_back({{j}, std::string(kConcreteOutputNames[j])});
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b)
      subsets.push_back({{a, b}, std::string(kConcreteOutputNames[a]) + "+" +
                                     std::string(kConcreteOutputNames[b])});
  subsets.push_back({{0, 1, 2}, "slump+flow+cs"});

  out << "analysis,outputs,method,folds,repetitions,overall_mse,sum_of_mse,mse_slump,"
         "mse_flow,mse_cs\n";

  auto emit = [&](const std::string& analysis, const Subset& subset,
                  MethodKind method, int folds, int repetitions,
                  const EvalMetrics& metrics) {
    std::array<std::string, 3> per_output;
    for (std::size_t j = 0; j < subset.columns.size(); ++j)
      per_output[subset.columns[j]] = fmt(metrics.per_output_mse[j]);
    out << analysis << "," << subset.name << "," << method_name(method) << "," << folds
        << "," << repetitions << "," << fmt(metrics.overall_mse) << ","
        << fmt(metrics.sum_of_mse) << "," << per_output[0] << "," << per_output[1] << ","
        << per_output[2] << "\n";
  };

  for (std::size_t s = 0; s < subsets.size(); ++s) {
    const Subset& subset = subsets[s];
    const Dataset data = concrete.select_outputs(subset.columns);
    for (const MethodKind method : options.methods) {
      MethodConfig mc;
      mc.kind = method;
      mc.num_trees = options.num_trees;
      CrossValOptions cv;
      cv.folds = options.folds;
      cv.repetitions = options.repetitions;
      cv.standardize = options.standardize;
      // Fold assignments and fit seeds are shared across methods, so the
      // univariate and multivariate variants of a base learner report
      // identical numbers on every single-output task.
      cv.seed = mix_seed(options.seed, s);
      const CrossValResult r = cross_validate(data, make_fitter(mc), cv);
      emit("cv", subset, method, options.folds, options.repetitions, r.mean);

      if (options.include_loocv && subset.columns.size() == 3) {
        CrossValOptions loo;
        loo.folds = static_cast<int>(data.n());
        loo.repetitions = 1;
        loo.standardize = options.standardize;
        loo.seed = mix_seed(options.seed, 0x6c6f6fULL);
        const CrossValResult lr = cross_validate(data, make_fitter(mc), loo);
        emit("loocv", subset, method, loo.folds, 1, lr.mean);
      }
    }
  }
}

void run_bench(const BenchOptions& options, std::ostream& out) {
  const std::vector<SettingKey> settings = enumerate_settings(options.filter);
  out << "model,dependence,rho,ell,n,method,repetition,fit_seconds\n";
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const SettingKey& key = settings[s];
    SimulationSetting sim;
    sim.model = key.model;
    sim.dependence = key.dependence;
    sim.cov = key.cov;
    sim.n = key.n;
    sim.seed = mix_seed(options.seed, s, 0xda7aULL);
    const Dataset data = make_dataset(sim);
    for (const MethodKind method : options.methods) {
      MethodConfig mc;
      mc.kind = method;
      mc.num_trees = options.num_trees;
      const RuntimeStats stats =
          benchmark_fit(data, make_fitter(mc), options.repetitions,
                        mix_seed(options.seed, s, static_cast<std::uint64_t>(method)));
      for (std::size_t rep = 0; rep < stats.seconds.size(); ++rep)
        out << to_string(key.model) << "," << to_string(key.dependence) << ","
            << fmt(key.cov.rho) << "," << key.cov.ell << "," << key.n << ","
            << method_name(method) << "," << rep << "," << fmt(stats.seconds[rep])
            << "\n";
    }
  }
}

}  // namespace mof
