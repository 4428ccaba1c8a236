// Command-line front end: simulate / select / fit / evaluate / benchmark.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
// All outputs are written atomically and contain no timestamps, so a rerun
// with the same arguments and seed is byte-identical.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "survc/survc.hpp"

namespace fs = std::filesystem;
using namespace survc;

namespace {

struct CommonColumns {
  std::string time_col = "time";
  std::string event_col = "event";
  std::vector<std::string> covariate_cols;

  CsvSchema schema() const {
    CsvSchema s;
    s.time_column = time_col;
    s.event_column = event_col;
    if (!covariate_cols.empty()) s.covariate_columns = covariate_cols;
    return s;
  }
};

void add_column_flags(CLI::App* cmd, CommonColumns& cols) {
  cmd->add_option("--time-col", cols.time_col, "Name of the time column")
      ->capture_default_str();
  cmd->add_option("--event-col", cols.event_col, "Name of the event column")
      ->capture_default_str();
  cmd->add_option("--covariate-cols", cols.covariate_cols,
                  "Covariate column names (default: all remaining columns)")
      ->delimiter(',');
}

std::size_t default_workers() {
  if (const char* env = std::getenv("SURVC_WORKERS")) {
    const long v = std::atol(env);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string config_echo(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::vector<double> read_eta_file(const fs::path& path) {
  CsvTable table = read_csv(path);
  const std::size_t col = table.column_index("eta");
  std::vector<double> eta;
  eta.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    eta.push_back(parse_cell(table.rows[i][col], i + 1, "eta"));
  return eta;
}

int run_simulate(const SimulationConfig& sim, const fs::path& out) {
  GeneratedData gen = generate_dataset(sim);
  atomic_write(out, dataset_to_csv(gen.data));

  std::string eta_csv = "eta_mu\n";
  for (double v : gen.eta_mu) eta_csv += format_double(v) + "\n";
  fs::path eta_path = out;
  eta_path += ".eta.csv";
  atomic_write(eta_path, eta_csv);

  fs::path meta_path = out;
  meta_path += ".meta";
  atomic_write(meta_path,
               config_echo({{"n", std::to_string(sim.n)},
                            {"p", std::to_string(sim.p)},
                            {"rho", format_double(sim.rho)},
                            {"target_censoring", format_double(sim.target_censoring)},
                            {"seed", std::to_string(sim.seed)},
                            {"censoring_scale", format_double(gen.censoring_scale)},
                            {"realized_censoring", format_double(gen.realized_censoring)}}));
  std::cout << "wrote " << out.string() << " (n=" << sim.n << ", p=" << sim.p
            << ", realized censoring " << gen.realized_censoring << ")\n";
  return 0;
}

int run_select(const fs::path& input, const CommonColumns& cols, bool fold,
               std::optional<std::size_t> p_star, const fs::path& out) {
  SurvivalDataset data = load_dataset(input, cols.schema());
  const KaplanMeierCurve g = censoring_km(data);
  MarkerRanking ranking = rank_markers(data, g, fold);

  std::string csv = "feature,score,rank\n";
  const std::size_t limit =
      p_star ? std::min(*p_star, ranking.entries.size()) : ranking.entries.size();
  for (std::size_t r = 0; r < limit; ++r) {
    const auto& e = ranking.entries[r];
    csv += data.feature_names[e.feature] + "," +
           (e.defined ? format_double(e.score) : std::string("NA")) + "," +
           std::to_string(r + 1) + "\n";
  }
  atomic_write(out, csv);
  std::cout << "wrote " << out.string() << " (" << limit << " of "
            << ranking.entries.size() << " features)\n";
  return 0;
}

int run_fit(const fs::path& input, const CommonColumns& cols, const BoostConfig& config,
            const fs::path& out, fs::path trace_path) {
  SurvivalDataset data = load_dataset(input, cols.schema());
  FitResult result = fit(data, config);
  save_model(out, result.model, config);

  if (trace_path.empty()) {
    trace_path = out;
    trace_path += ".trace.csv";
  }
  std::string trace_csv = "iteration,risk,selected\n";
  trace_csv += "0," + format_double(result.trace.risk_path[0]) + ",\n";
  for (std::size_t m = 0; m < result.trace.selected.size(); ++m)
    trace_csv += std::to_string(m + 1) + "," +
                 format_double(result.trace.risk_path[m + 1]) + "," +
                 result.model.feature_names[result.trace.selected[m]] + "\n";
  atomic_write(trace_path, trace_csv);

  std::size_t nonzero = 0;
  for (double b : result.model.coefficients) nonzero += b != 0.0;
  std::cout << "wrote " << out.string() << " (" << nonzero
            << " nonzero coefficients) and " << trace_path.string() << "\n";
  return 0;
}

int run_evaluate(const fs::path& learn_path, const fs::path& test_path,
                 const fs::path& single_path, double split_fraction,
                 std::uint64_t split_seed, const CommonColumns& cols,
                 const fs::path& model_path, const fs::path& eta_path,
                 const fs::path& out) {
  SurvivalDataset learn, test;
  if (!single_path.empty()) {
    SurvivalDataset all = load_dataset(single_path, cols.schema());
    SplitPlan plan = stratified_split(all.events(), split_fraction, split_seed);
    auto subset = [&](const std::vector<std::size_t>& idx) {
      SurvivalDataset d;
      d.feature_names = all.feature_names;
      d.covariates = Matrix(idx.size(), all.num_features());
      for (std::size_t r = 0; r < idx.size(); ++r) {
        d.observations.push_back(all.observations[idx[r]]);
        for (std::size_t j = 0; j < all.num_features(); ++j)
          d.covariates(r, j) = all.covariates(idx[r], j);
      }
      return d;
    };
    learn = subset(plan.learning);
    test = subset(plan.test);
  } else {
    learn = load_dataset(learn_path, cols.schema());
    test = load_dataset(test_path, cols.schema());
  }

  std::vector<double> eta;
  if (!eta_path.empty()) {
    eta = read_eta_file(eta_path);
    if (eta.size() != test.size())
      throw data_error("eta file has " + std::to_string(eta.size()) +
                       " rows, test data has " + std::to_string(test.size()));
  } else {
    auto [model, cfg] = load_model(model_path);
    (void)cfg;
    eta = model.predict(test.covariates);
  }

  EvalResult r = evaluate_external(eta, learn.times(), learn.events(), test.times(),
                                   test.events());
  std::cout << "uno_c=" << format_double(r.uno) << "\n"
            << "harrell_c=" << format_double(r.harrell) << "\n";
  if (!out.empty())
    atomic_write(out, "metric,value\nuno_c," + format_double(r.uno) + "\nharrell_c," +
                          format_double(r.harrell) + "\n");
  return 0;
}

int run_benchmark(const std::string& grid, std::size_t B, std::size_t m_stop,
                  double step_length, double sigma, std::size_t n, std::size_t p_star,
                  double censoring, std::uint64_t seed, std::size_t workers,
                  const fs::path& out_dir) {
  StudyConfig study;
  study.replicates = B;
  study.m_stop = m_stop;
  study.step_length = step_length;
  study.master_seed = seed;
  study.workers = workers;

  if (grid == "paper-table1") {
    study.cells = {{100, 5, 0.5, sigma},  {100, 10, 0.5, sigma}, {100, 30, 0.5, sigma},
                   {100, 5, 0.3, sigma},  {100, 5, 0.7, sigma},  {50, 5, 0.5, sigma},
                   {200, 5, 0.5, sigma},  {500, 5, 0.5, sigma}};
  } else if (grid == "paper-table2") {
    const StudyCell settings[] = {{100, 5, 0.5, 0}, {100, 10, 0.5, 0},
                                  {100, 30, 0.5, 0}, {100, 5, 0.3, 0},
                                  {100, 5, 0.7, 0},  {50, 5, 0.5, 0},
                                  {200, 5, 0.5, 0},  {500, 5, 0.5, 0}};
    for (const auto& setting : settings)
      for (double s : {0.5, 0.25, 0.1, 0.075, 0.05}) {
        StudyCell cell = setting;
        cell.sigma = s;
        study.cells.push_back(cell);
      }
  } else if (grid == "cell") {
    study.cells = {{n, p_star, censoring, sigma}};
  } else {
    throw CLI::ValidationError("--grid must be paper-table1, paper-table2 or cell");
  }

  StudyResult result = run_simulation_study(study);
  fs::create_directories(out_dir);
  atomic_write(out_dir / "replicates.csv", replicates_to_csv(result));
  atomic_write(out_dir / "summary.csv", summary_to_csv(result));
  atomic_write(out_dir / "summary.txt", summary_to_text(result));
  atomic_write(out_dir / "run.config",
               config_echo({{"grid", grid},
                            {"B", std::to_string(B)},
                            {"m_stop", std::to_string(m_stop)},
                            {"step_length", format_double(step_length)},
                            {"sigma", format_double(sigma)},
                            {"seed", std::to_string(seed)},
                            {"workers", std::to_string(workers)}}));
  std::cout << summary_to_text(result);
  std::cout << "wrote " << (out_dir / "summary.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survc: concordance-index boosting for right-censored survival data"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a key=value file");

  // simulate
  SimulationConfig sim;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
  simulate->add_option("--n", sim.n, "Sample size")->capture_default_str();
  simulate->add_option("--p", sim.p, "Number of markers")->capture_default_str();
  simulate->add_option("--rho", sim.rho, "Pairwise marker correlation")
      ->capture_default_str();
  simulate->add_option("--censoring", sim.target_censoring, "Target censoring rate")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  simulate->add_option("-o,--output", sim_out, "Output CSV path")->required();

  // select
  CommonColumns sel_cols;
  std::string sel_in, sel_out;
  bool sel_no_fold = false;
  std::size_t sel_top = 0;
  auto* select = app.add_subcommand("select", "Rank markers by univariate power");
  select->add_option("-i,--input", sel_in, "Input dataset CSV")->required();
  add_column_flags(select, sel_cols);
  select->add_flag("--no-fold", sel_no_fold,
                   "Rank by raw C instead of the folded max(C, 1-C)");
  select->add_option("--top", sel_top, "Write only the top-ranked features (0 = all)")
      ->capture_default_str();
  select->add_option("-o,--output", sel_out, "Output ranking CSV")->required();

  // fit
  CommonColumns fit_cols;
  std::string fit_in, fit_out, fit_trace;
  BoostConfig boost;
  auto* fitcmd = app.add_subcommand("fit", "Boost a linear marker combination");
  fitcmd->add_option("-i,--input", fit_in, "Training dataset CSV")->required();
  add_column_flags(fitcmd, fit_cols);
  fitcmd->add_option("--sigma", boost.smoothing.sigma, "Smoothing parameter")
      ->capture_default_str();
  fitcmd->add_option("--sl", boost.step_length, "Step length")->capture_default_str();
  fitcmd->add_option("--mstop", boost.m_stop, "Number of boosting iterations")
      ->capture_default_str();
  fitcmd->add_option("-o,--output", fit_out, "Output model path")->required();
  fitcmd->add_option("--trace-output", fit_trace,
                     "Trace CSV path (default: <output>.trace.csv)");

  // evaluate
  CommonColumns eval_cols;
  std::string eval_learn, eval_test, eval_single, eval_model, eval_eta, eval_out;
  double eval_fraction = 2.0 / 3.0;
  std::uint64_t eval_seed = 1;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Concordance of a model or external marker on test data");
  evaluate->add_option("--learn", eval_learn, "Learning dataset CSV");
  evaluate->add_option("--test", eval_test, "Test dataset CSV");
  evaluate->add_option("--input", eval_single,
                       "Single dataset CSV to split (instead of --learn/--test)");
  evaluate->add_option("--split-fraction", eval_fraction,
                       "Learning fraction of the stratified split")
      ->capture_default_str();
  evaluate->add_option("--split-seed", eval_seed, "Stratified split seed")
      ->capture_default_str();
  add_column_flags(evaluate, eval_cols);
  evaluate->add_option("--model", eval_model, "Fitted model file");
  evaluate->add_option("--eta", eval_eta,
                       "External marker CSV (column 'eta', one row per test row)");
  evaluate->add_option("-o,--output", eval_out, "Optional result CSV");

  // benchmark
  std::string bench_grid = "cell", bench_out;
  std::size_t bench_B = 100, bench_mstop = 10000, bench_n = 100, bench_pstar = 5;
  std::size_t bench_workers = default_workers();
  double bench_sigma = 0.1, bench_sl = 0.1, bench_cens = 0.5;
  std::uint64_t bench_seed = 1;
  auto* benchmark =
      app.add_subcommand("benchmark", "Run the simulation study over a grid");
  benchmark->add_option("--grid", bench_grid, "paper-table1, paper-table2 or cell")
      ->capture_default_str();
  benchmark->add_option("--B", bench_B, "Replicates per cell")->capture_default_str();
  benchmark->add_option("--mstop", bench_mstop, "Boosting iterations")
      ->capture_default_str();
  benchmark->add_option("--sl", bench_sl, "Step length")->capture_default_str();
  benchmark->add_option("--sigma", bench_sigma, "Smoothing parameter")
      ->capture_default_str();
  benchmark->add_option("--n", bench_n, "Training sample size (grid=cell)")
      ->capture_default_str();
  benchmark->add_option("--p-star", bench_pstar, "Pre-selected markers (grid=cell)")
      ->capture_default_str();
  benchmark->add_option("--censoring", bench_cens, "Censoring rate (grid=cell)")
      ->capture_default_str();
  benchmark->add_option("--seed", bench_seed, "Master seed")->capture_default_str();
  benchmark->add_option("--workers", bench_workers,
                        "Worker threads (SURVC_WORKERS overrides the default)")
      ->capture_default_str();
  benchmark->add_option("-o,--output", bench_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return run_simulate(sim, sim_out);
    if (*select)
      return run_select(sel_in, sel_cols, !sel_no_fold,
                        sel_top ? std::optional<std::size_t>(sel_top) : std::nullopt,
                        sel_out);
    if (*fitcmd) return run_fit(fit_in, fit_cols, boost, fit_out, fit_trace);
    if (*evaluate) {
      if (eval_single.empty() && (eval_learn.empty() || eval_test.empty()))
        throw data_error("evaluate needs --learn and --test, or --input to split");
      if (eval_model.empty() == eval_eta.empty())
        throw data_error("evaluate needs exactly one of --model or --eta");
      return run_evaluate(eval_learn, eval_test, eval_single, eval_fraction,
                          eval_seed, eval_cols, eval_model, eval_eta, eval_out);
    }
    if (*benchmark)
      return run_benchmark(bench_grid, bench_B, bench_mstop, bench_sl, bench_sigma,
                           bench_n, bench_pstar, bench_cens, bench_seed,
                           bench_workers, bench_out);
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
