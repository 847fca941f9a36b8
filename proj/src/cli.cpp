#include "scorecraft/cli.hpp"

#include "scorecraft/csv.hpp"
#include "scorecraft/io.hpp"
#include "scorecraft/kernels.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <optional>

namespace scorecraft {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

CenteringMode parse_centering(const std::string& s) {
  if (s == "none") return CenteringMode::none;
  if (s == "weighted") return CenteringMode::weighted_sum_zero;
  throw ValidationError("--centering must be 'none' or 'weighted', got '" + s + "'");
}

VarianceKind parse_variance(const std::string& s) {
  if (s == "population") return VarianceKind::population;
  if (s == "sample") return VarianceKind::sample;
  throw ValidationError("--variance must be 'population' or 'sample', got '" + s + "'");
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
    throw ValidationError(std::string(flag) + " expects name=value, got '" + s + "'");
  }
  return {csv::trim(s.substr(0, eq)), csv::trim(s.substr(eq + 1))};
}

std::vector<InWeight> parse_inweights(const std::vector<std::string>& items) {
  std::vector<InWeight> out;
  for (const auto& item : items) {
    const auto [k, v] = split_assignment(item, "--inweight");
    double coef = 0.0;
    double value = 0.0;
    if (!csv::parse_double(k, coef) || coef != static_cast<int>(coef) || coef < 1) {
      throw ValidationError("--inweight: coefficient index must be a positive integer, got '" + k + "'");
    }
    if (!csv::parse_double(v, value) || !std::isfinite(value)) {
      throw ValidationError("--inweight: value must be a finite number, got '" + v + "'");
    }
    out.push_back({static_cast<int>(coef), value});
  }
  return out;
}

// Design matrix, outcomes and weights for one data file under a model.
struct Prepared {
  Matrix x;
  Vector y;
  Vector w;
};

Prepared prepare_spec_data(const ScorecardSpec& spec, const std::string& data_path) {
  const Sample s = load_sample(data_path);
  s.validate();
  return {build_design_matrix(spec, s), s.y, s.w};
}

Prepared prepare_raw_data(const std::string& data_path, std::vector<std::string>* columns) {
  const NumericSample s = parse_numeric_sample(csv::read_file(data_path), data_path);
  if (columns) *columns = s.columns;
  return {design_from_columns(s.values), s.y, s.w};
}

Prepared prepare_for_model(const ModelFile& m, const std::string& data_path) {
  if (!m.raw_design()) return prepare_spec_data(parse_spec(m.spec_text), data_path);
  std::vector<std::string> columns;
  Prepared p = prepare_raw_data(data_path, &columns);
  if (columns != m.raw_columns) throw ValidationError(data_path + ": columns do not match the model's raw design");
  return p;
}

ModelFile load_model(const std::string& path) { return parse_model(csv::read_file(path)); }

std::string format_metrics(const ScoreMetrics& m) {
  return "divergence " + fmt("%.6f", m.divergence) + "\nminus_ll " + fmt("%.6f", m.minus_ll) + "\nks " +
         fmt("%.6f", m.ks) + "\nroc_area " + fmt("%.6f", m.roc_area) + "\n";
}

// ---- compile ---------------------------------------------------------------

struct CompileArgs {
  std::string spec;
  std::string centering = "none";
  std::string data;
  std::vector<std::string> inweights;
};

int cmd_compile(const CompileArgs& a, std::ostream& out) {
  const ScorecardSpec spec = load_spec(a.spec);
  CenteringPolicy policy;
  if (parse_centering(a.centering) == CenteringMode::weighted_sum_zero) {
    if (a.data.empty()) throw ValidationError("--centering weighted needs --data for attribute counts");
    const Prepared d = prepare_spec_data(spec, a.data);
    policy = CenteringPolicy::weighted(d.x, d.w);
  }
  const ConstraintSet cs = compile_constraints(spec, policy, parse_inweights(a.inweights));
  std::map<RowKind, int> eq_kinds;
  for (const auto& r : cs.eq_rows) ++eq_kinds[r.kind];
  out << "q = " << spec.q() << "\n";
  out << "m_e = " << cs.equality_count() << "\n";
  out << "m_i = " << cs.inequality_count() << "\n";
  for (const auto& [kind, count] : eq_kinds) out << "  " << row_kind_name(kind) << " equality rows: " << count << "\n";
  out << format_provenance(cs);
  return 0;
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  std::string spec;
  std::string data;
  bool raw = false;
  double lambda = 0.0;
  double tol = 1e-6;
  int max_iter = 50;
  std::string centering = "none";
  std::vector<std::string> inweights;
  std::string init_model;
  std::string out;
  std::string report;
  std::string dump_qp;
  int threads = 0;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  if (a.raw == !a.spec.empty()) throw ValidationError("fit: give exactly one of --spec or --raw");
  ModelFile model;
  model.lambda = a.lambda;
  model.tol = a.tol;
  model.centering = a.centering;
  model.inweights = parse_inweights(a.inweights);

  std::optional<ScorecardSpec> spec;
  Prepared d;
  ConstraintSet cs;
  const CenteringMode centering = parse_centering(a.centering);
  if (a.raw) {
    if (centering != CenteringMode::none || !model.inweights.empty()) {
      throw ValidationError("fit --raw: centering and in-weights need a scorecard spec");
    }
    d = prepare_raw_data(a.data, &model.raw_columns);
    cs = ConstraintSet::none(d.x.cols());
  } else {
    spec = load_spec(a.spec);
    model.spec_text = write_spec(*spec);
    model.spec_hash = spec_hash(*spec);
    d = prepare_spec_data(*spec, a.data);
    const CenteringPolicy policy =
        centering == CenteringMode::none ? CenteringPolicy::off() : CenteringPolicy::weighted(d.x, d.w);
    cs = compile_constraints(*spec, policy, model.inweights);
  }

  FitConfig config;
  config.lambda = a.lambda;
  config.tol = a.tol;
  config.max_outer_iters = a.max_iter;
  config.threads = a.threads > 0 ? a.threads : kernels::default_threads();
  if (!a.init_model.empty()) {
    const ModelFile init = load_model(a.init_model);
    if (init.q() != d.x.cols()) throw ValidationError("--init-model: coefficient count does not match the design");
    config.initial.mode = InitialBetaMode::supplied;
    config.initial.supplied = init.fit.beta;
  }
  const PenaltySpec pen{a.lambda};

  if (!a.dump_qp.empty()) {
    const Vector beta0 = initial_beta(d.y, d.w, d.x.cols(), config.initial);
    const QpProblem p = assemble_qp(logistic_terms(d.x, d.y, d.w, beta0, config.threads), pen, beta0, cs);
    csv::write_file_atomic(a.dump_qp, write_qp_dump(p));
  }

  try {
    model.fit = fit(d.x, d.y, d.w, pen, cs, config);
  } catch (const StepFailure& e) {
    err << "fit failed: " << e.what() << "\n";
    if (e.solution().status == QpStatus::infeasible) {
      err << "constraint set is infeasible (" << cs.equality_count() << " equality, " << cs.inequality_count()
          << " inequality rows)\n";
    }
    return 2;
  }

  for (const auto& rec : model.fit.trajectory) {
    out << "iteration " << rec.iteration << ": max_delta " << fmt("%.3e", rec.max_delta) << "  minus_ll "
        << fmt("%.6f", rec.minus_ll) << "  qp_iterations " << rec.qp_iterations << "\n";
  }
  out << "status " << fit_status_name(model.fit.status) << "\n";
  out << "intercept " << fmt("%.6f", model.fit.beta[0]) << "\n";
  out << "residuals eq " << fmt("%.3e", model.fit.constraint_residuals.eq) << "  ineq "
      << fmt("%.3e", model.fit.constraint_residuals.ineq) << "  kkt " << fmt("%.3e", model.fit.kkt.max()) << "\n";
  for (const auto& w : model.fit.warnings) err << "warning: " << w << "\n";

  if (!a.out.empty()) csv::write_file_atomic(a.out, write_model(model));
  if (!a.report.empty()) {
    if (!spec) throw ValidationError("--report needs a scorecard spec");
    const Vector score = score_vector(d.x, model.fit.beta);
    write_report(*spec, {{"fit", model.fit.beta, evaluate_score(score, d.y, d.w)}}, a.report);
  }
  if (model.fit.status != FitStatus::converged) {
    err << "fit did not converge within " << a.max_iter << " outer iterations\n";
    return 2;
  }
  return 0;
}

// ---- eval / compare --------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string data;
  std::string cdf_dump;
  std::string variance = "population";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const ModelFile m = load_model(a.model);
  const Prepared d = prepare_for_model(m, a.data);
  const Vector score = score_vector(d.x, m.fit.beta);
  out << format_metrics(evaluate_score(score, d.y, d.w, parse_variance(a.variance)));
  if (!a.cdf_dump.empty()) csv::write_file_atomic(a.cdf_dump, format_cdf_dump(scorecdfs(score, d.y, d.w)));
  return 0;
}

struct CompareArgs {
  std::vector<std::string> scores;
  std::vector<std::string> models;
  std::string data;
  std::string report;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  if (a.scores.empty() && a.models.empty()) throw ValidationError("compare: give at least one --score or --model");
  std::vector<std::pair<std::string, Vector>> scores;
  std::vector<ReportColumn> columns;
  std::optional<ScorecardSpec> spec;
  Vector y;
  Vector w;
  for (const auto& item : a.models) {
    const auto [name, path] = split_assignment(item, "--model");
    const ModelFile m = load_model(path);
    const Prepared d = prepare_for_model(m, a.data);
    y = d.y;
    w = d.w;
    scores.emplace_back(name, score_vector(d.x, m.fit.beta));
    if (!m.raw_design()) {
      const ScorecardSpec s = parse_spec(m.spec_text);
      if (spec && !(s == *spec)) throw ValidationError("compare: models were fitted on different specs");
      spec = s;
      columns.push_back({name, m.fit.beta, evaluate_score(scores.back().second, d.y, d.w)});
    }
  }
  if (y.size() == 0) {
    // No models: only the data file's y,w columns are needed.
    const Sample s = load_sample(a.data);
    y = s.y;
    w = s.w;
  }
  for (const auto& item : a.scores) {
    const auto [name, path] = split_assignment(item, "--score");
    Vector s = load_score_file(path);
    require_size(("score file " + path).c_str(), s.size(), y.size());
    scores.emplace_back(name, std::move(s));
  }
  out << compare_scores(scores, y, w).format();
  if (!a.report.empty()) {
    if (!spec) throw ValidationError("compare --report needs at least one spec-based --model");
    write_report(*spec, columns, a.report);
  }
  return 0;
}

// ---- gen / qp-solve --------------------------------------------------------

struct GenArgs {
  std::string spec;
  int n_good = 1000;
  int n_bad = 1000;
  std::uint64_t seed = 1;
  double weight = 1.0;
  std::string config;
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const ScorecardSpec spec = load_spec(a.spec);
  SyntheticConfig cfg = a.config.empty()
                            ? SyntheticConfig::with_random_multinomials(spec, a.seed, a.n_good, a.n_bad)
                            : parse_synthetic_config(csv::read_file(a.config), spec);
  if (a.config.empty()) cfg.weight = a.weight;
  const Sample s = gen_synthetic(cfg);
  csv::write_file_atomic(a.out, write_sample(s));
  out << "wrote " << s.n() << " records to " << a.out << "\n";
  return 0;
}

int cmd_qp_solve(const std::string& path, std::ostream& out) {
  const QpProblem p = read_qp_dump(csv::read_file(path));
  const QpSolution sol = solve_qp(p);
  out << "status " << status_name(sol.status) << "\n";
  out << "iterations " << sol.iterations << (sol.polished ? " (polished)" : "") << "\n";
  if (!sol.note.empty()) out << "note " << sol.note << "\n";
  out << "objective " << fmt("%.12g", p.objective(sol.beta)) << "\n";
  out << "kkt stationarity " << fmt("%.3e", sol.kkt.stationarity) << "\n";
  out << "kkt primal_eq " << fmt("%.3e", sol.kkt.primal_eq) << "\n";
  out << "kkt primal_ineq " << fmt("%.3e", sol.kkt.primal_ineq) << "\n";
  out << "kkt dual " << fmt("%.3e", sol.kkt.dual) << "\n";
  out << "kkt complementarity " << fmt("%.3e", sol.kkt.complementarity) << "\n";
  out << "beta";
  for (Eigen::Index i = 0; i < sol.beta.size(); ++i) out << ' ' << csv::format_double(sol.beta[i]);
  out << "\n";
  return sol.status == QpStatus::optimal ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained logistic scorecard fitting", "scorecraft"};
  app.require_subcommand(1);

  CompileArgs compile_args;
  auto* compile = app.add_subcommand("compile", "Compile constraint tags and print row counts and provenance");
  compile->add_option("--spec", compile_args.spec, "Scorecard spec CSV")->required();
  compile->add_option("--centering", compile_args.centering, "none or weighted");
  compile->add_option("--data", compile_args.data, "Data CSV (for weighted centering)");
  compile->add_option("--inweight", compile_args.inweights, "Pin coefficient k to v: k=v (1 = intercept)");

  FitArgs fit_args;
  auto* fitc = app.add_subcommand("fit", "Fit a constrained logistic scorecard");
  fitc->add_option("--spec", fit_args.spec, "Scorecard spec CSV");
  fitc->add_option("--data", fit_args.data, "Data CSV")->required();
  fitc->add_flag("--raw", fit_args.raw, "Treat data columns as numeric basis columns");
  fitc->add_option("--lambda", fit_args.lambda, "Ridge penalty weight");
  fitc->add_option("--tol", fit_args.tol, "Convergence tolerance on max |delta beta|");
  fitc->add_option("--max-iter", fit_args.max_iter, "Maximum outer iterations");
  fitc->add_option("--centering", fit_args.centering, "none or weighted");
  fitc->add_option("--inweight", fit_args.inweights, "Pin coefficient k to v: k=v (1 = intercept)");
  fitc->add_option("--init-model", fit_args.init_model, "Start from this model's coefficients");
  fitc->add_option("--out", fit_args.out, "Model JSON output");
  fitc->add_option("--report", fit_args.report, "Weight report output (CSV twin written alongside)");
  fitc->add_option("--dump-qp", fit_args.dump_qp, "Write the first QP subproblem here");
  fitc->add_option("--threads", fit_args.threads, "Kernel threads (default SCORECRAFT_THREADS or 1)");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score a data file with a fitted model");
  eval->add_option("--model", eval_args.model, "Model JSON")->required();
  eval->add_option("--data", eval_args.data, "Data CSV")->required();
  eval->add_option("--cdf-dump", eval_args.cdf_dump, "Write sorted score/FG/FB columns here");
  eval->add_option("--variance", eval_args.variance, "population or sample");

  CompareArgs compare_args;
  auto* compare = app.add_subcommand("compare", "Compare scores on one data file");
  compare->add_option("--score", compare_args.scores, "name=path to a one-column score CSV");
  compare->add_option("--model", compare_args.models, "name=path to a model JSON");
  compare->add_option("--data", compare_args.data, "Data CSV")->required();
  compare->add_option("--report", compare_args.report, "Weight report for the --model entries");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic data file");
  gen->add_option("--spec", gen_args.spec, "Scorecard spec CSV")->required();
  gen->add_option("--n-good", gen_args.n_good, "Good records");
  gen->add_option("--n-bad", gen_args.n_bad, "Bad records");
  gen->add_option("--seed", gen_args.seed, "Generator seed");
  gen->add_option("--weight", gen_args.weight, "Record weight");
  gen->add_option("--config", gen_args.config, "JSON config with explicit multinomials");
  gen->add_option("--out", gen_args.out, "Output data CSV")->required();

  std::string dump_path;
  auto* qp_solve = app.add_subcommand("qp-solve", "Solve a dumped QP and print KKT residuals");
  qp_solve->add_option("dump", dump_path, "QP dump file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return 1;
  }

  try {
    if (*compile) return cmd_compile(compile_args, out);
    if (*fitc) return cmd_fit(fit_args, out, err);
    if (*eval) return cmd_eval(eval_args, out);
    if (*compare) return cmd_compare(compare_args, out);
    if (*gen) return cmd_gen(gen_args, out);
    if (*qp_solve) return cmd_qp_solve(dump_path, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace scorecraft
