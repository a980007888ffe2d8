#include "cli.hpp"

#include "robsub/bicriteria.hpp"
#include "robsub/dimreduce.hpp"
#include "robsub/errors.hpp"
#include "robsub/hardness.hpp"
#include "robsub/io.hpp"
#include "robsub/oracle.hpp"
#include "robsub/parallel.hpp"
#include "robsub/pipeline.hpp"
#include "robsub/regression.hpp"
#include "robsub/rng.hpp"
#include "robsub/sketch.hpp"
#include "robsub/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace robsub::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void emit(const json& report, const std::string& path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot write report " + path);
  f << text;
}

json loss_json(const LossSpec& loss) {
  return json{{"name", loss.name()}, {"p", loss.p()}, {"c_m", loss.c_m()}, {"param", loss.param()}};
}

json cost_json(double cost_p, double p) {
  return json{{"v_cost_p", cost_p}, {"v_cost", std::pow(cost_p, 1.0 / p)}};
}

struct ApproxArgs {
  std::string input;
  std::string report;
  std::string factor_out;
  std::string loss = "l1";
  std::string stage = "full";
  Index k = 1;
  double eps = 0.25;
  std::uint64_t seed = 0;
  bool baseline = true;
  PipelineConfig cfg;
  std::optional<Index> p_m;
  std::optional<Index> t_m;
  std::optional<Index> recursion_p_m;
};

struct RegressArgs {
  std::string input;
  std::string rhs;
  std::string weights;
  std::string report;
  std::string x_out;
  std::string loss = "huber";
  double eps = 0.1;
  std::uint64_t seed = 0;
  RegressionConfig cfg;
  std::optional<Index> base_cap;
};

struct GadgetArgs {
  std::string edges;
  std::string graph;
  std::string report;
  std::string export_path;
  std::int64_t export_copies = 0;
  Index k = 3;
  double b1 = 1e4;
  std::int64_t b2 = 1000000;
  double p = 1.0;
};

struct BenchArgs {
  std::string out;
  Index rows = 20000;
  Index cols = 200;
  Index k = 3;
  std::vector<double> densities{0.005, 0.01, 0.02, 0.04};
  int repeats = 3;
  std::uint64_t seed = 0;
  double c_sketch = 40.0;
  double eps_const = 0.5;
};

json run_approx(const ApproxArgs& args) {
  const auto t_total = Clock::now();
  auto t0 = Clock::now();
  const Matrix a = read_matrix(args.input);
  const double t_read = since(t0);
  const LossSpec loss = parse_loss(args.loss);
  PipelineConfig cfg = args.cfg;
  cfg.bicriteria.p_m_override = args.p_m;
  cfg.bicriteria.conditioning = cfg.conditioning;
  cfg.dimreduce.t_m_override = args.t_m;
  cfg.recursion_p_m = args.recursion_p_m;

  json result;
  json timings;
  timings["read"] = t_read;
  std::optional<Subspace> u;
  Index k_used = args.k;

  if (args.stage == "bicriteria" || args.stage == "dimreduce") {
    t0 = Clock::now();
    const BicriteriaResult bic = const_approx(a, args.k, loss, derive_seed(args.seed, streams::kRecursion, 1000),
                                              cfg.bicriteria);
    timings["bicriteria"] = since(t0);
    k_used = bic.k_used;
    result["k_clamped"] = bic.k_clamped;
    result["p_m"] = bic.p_m;
    result["sketch_cols"] = bic.sketch_cols;
    result["recursion_depth"] = bic.recursion.depth;
    result["recursion_sizes"] = bic.recursion.level_sizes;
    result["shrink_failed"] = bic.recursion.shrink_failed;
    result["bicriteria_dim"] = bic.u.dim();
    u = bic.u;
    if (args.stage == "dimreduce") {
      t0 = Clock::now();
      DimReduceConfig dcfg = cfg.dimreduce;
      dcfg.eps = args.eps;
      dcfg.seed = derive_seed(args.seed, streams::kGaussian, 1000);
      const DimReduceResult dr = dim_reduce(a, k_used, bic.u, loss, dcfg);
      timings["dimreduce"] = since(t0);
      result["r1"] = dr.r1;
      result["r"] = dr.r;
      result["t_m"] = dr.t_m;
      result["dimreduce_expected_sample"] = dr.expected_sample_size;
      result["dimreduce_sample"] = dr.sample_size;
      result["zero_residual"] = dr.zero_residual;
      u = dr.u;
    }
  } else if (args.stage == "full") {
    const PipelineResult pr = approx_subspace(a, args.k, args.eps, loss, args.seed, cfg);
    k_used = pr.k_used;
    result["k_clamped"] = pr.k_clamped;
    result["p_m"] = pr.bicriteria_p_m;
    result["bicriteria_dim"] = pr.bicriteria_dim;
    result["bicriteria_depth"] = pr.bicriteria_depth;
    result["bicriteria_shrink_failed"] = pr.bicriteria_shrink_failed;
    result["dimreduce_dim"] = pr.dimreduce_dim;
    result["dimreduce_sample"] = pr.dimreduce_sample;
    result["dimreduce_expected_sample"] = pr.dimreduce_expected;
    result["lopsided_cols"] = pr.lopsided_cols;
    result["lopsided_skipped"] = pr.lopsided_skipped;
    result["small_rows"] = pr.small_rows;
    result["small_cost"] = pr.small_cost;
    result["small_converged"] = pr.small_converged;
    if (!loss.is_lp()) {
      result["recursion_depth"] = pr.recursion_depth;
      result["recursion_sizes"] = pr.recursion_sizes;
      result["recursion_shrink_failed"] = pr.recursion_shrink_failed;
      result["eps_level"] = pr.eps_level;
    }
    for (const auto& [name, sec] : pr.timings_seconds) timings[name] = sec;
    u = pr.v;
  } else {
    throw InputError("unknown stage '" + args.stage + "' (expected bicriteria, dimreduce or full)");
  }

  result["subspace_dim"] = u->dim();
  const double cost_p = residual_cost(a, *u, loss);
  result["cost"] = cost_json(cost_p, loss.p());
  if (args.baseline) {
    t0 = Clock::now();
    const OracleResult base = svd_truncation_cost(a, k_used, loss);
    timings["baseline"] = since(t0);
    result["baseline"] = cost_json(base.cost, loss.p());
    result["baseline"]["method"] = "svd_truncation";
  }
  if (!args.factor_out.empty()) write_matrix_market(args.factor_out, Matrix(u->basis()));
  timings["total"] = since(t_total);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "approx";
  report["input"] = {{"path", args.input}, {"rows", a.rows()}, {"cols", a.cols()}, {"nnz", a.nnz()},
                     {"sparse", a.is_sparse()}};
  report["seed"] = args.seed;
  report["stage"] = args.stage;
  report["k"] = args.k;
  report["k_used"] = k_used;
  report["eps"] = args.eps;
  report["loss"] = loss_json(loss);
  const auto& b = cfg.bicriteria;
  report["config"] = {
      {"c_sketch", b.c_sketch},        {"eps_const", b.eps_const},
      {"c_poly", b.c_poly},            {"pm_multiplier", b.pm_multiplier},
      {"c_loglog_recur", b.c_loglog},  {"c_pi", cfg.conditioning.c_pi},
      {"beta_samples", cfg.conditioning.beta_samples},
      {"c1", cfg.dimreduce.r1_multiplier}, {"quality_k", cfg.dimreduce.quality_k},
      {"k2", cfg.dimreduce.k2},        {"c_lopsided", cfg.c_lopsided},
      {"r1_multiplier", cfg.r1_multiplier}, {"kappa", cfg.kappa},
      {"c_loglog", cfg.c_loglog},      {"restarts", cfg.small.restarts},
      {"threads", thread_count()}};
  if (args.p_m) report["config"]["p_m"] = *args.p_m;
  if (args.t_m) report["config"]["t_m"] = *args.t_m;
  report["result"] = result;
  report["timings_seconds"] = timings;
  return report;
}

json run_regress(const RegressArgs& args) {
  const auto t_total = Clock::now();
  const Matrix a = read_matrix(args.input);
  const Vector b = read_vector_csv(args.rhs);
  if (b.size() != a.rows()) throw InputError("rhs length does not match the number of rows");
  std::optional<WeightVector> w;
  if (!args.weights.empty()) w = read_weights_csv(args.weights);
  const LossSpec loss = parse_loss(args.loss);
  RegressionConfig cfg = args.cfg;
  cfg.base_cap = args.base_cap;

  json timings;
  auto t0 = Clock::now();
  const RegressionResult rr = m_regress(a, b, loss, args.eps, args.seed, cfg, w ? &*w : nullptr);
  timings["sampled"] = since(t0);
  t0 = Clock::now();
  const WeightVector full_w = w ? *w : WeightVector::ones(a.rows());
  const IrlsResult full = irls_solve(a, b, full_w, loss, cfg.irls);
  timings["full_irls"] = since(t0);
  const double sampled_cost = regression_cost(a, b, rr.x, full_w, loss);
  const double full_cost = regression_cost(a, b, full.x, full_w, loss);
  if (!args.x_out.empty()) write_csv_matrix(args.x_out, rr.x);
  timings["total"] = since(t_total);

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "regress";
  report["input"] = {{"path", args.input}, {"rhs", args.rhs}, {"rows", a.rows()}, {"cols", a.cols()},
                     {"nnz", a.nnz()}, {"weighted", w.has_value()}};
  report["seed"] = args.seed;
  report["eps"] = args.eps;
  report["loss"] = loss_json(loss);
  report["config"] = {{"delta", cfg.delta}, {"c_size", cfg.c_size}, {"kappa", cfg.kappa},
                      {"max_levels", cfg.max_levels}, {"irls_tol", cfg.irls.tol}, {"irls_x_tol", cfg.irls.x_tol},
                      {"irls_max_iter", cfg.irls.max_iter}};
  if (args.base_cap) report["config"]["base_cap"] = *args.base_cap;
  report["result"] = {{"sampled_cost", sampled_cost},
                      {"full_cost", full_cost},
                      {"cost_ratio", full_cost > 0.0 ? sampled_cost / full_cost : 1.0},
                      {"levels", rr.levels},
                      {"sizes", rr.sizes},
                      {"base_iterations", rr.base.iterations},
                      {"full_iterations", full.iterations},
                      {"x", std::vector<double>(rr.x.data(), rr.x.data() + rr.x.size())}};
  report["timings_seconds"] = timings;
  return report;
}

Adjacency fixture_graph(const std::string& name) {
  if (name == "k4") return complete_graph(4);
  if (name == "petersen") return petersen_graph();
  if (name == "c5") return cycle_graph(5);
  throw InputError("unknown fixture graph '" + name + "' (expected k4, petersen or c5)");
}

json run_gadget(const GadgetArgs& args) {
  const auto t_total = Clock::now();
  if (args.edges.empty() == args.graph.empty()) throw InputError("give exactly one of --edges or --graph");
  const Adjacency adj = args.edges.empty() ? fixture_graph(args.graph) : read_edge_list(args.edges);
  const GadgetInstance inst = gen_gadget(adj, args.k, args.b1, args.b2);
  const CoordinateOptimum best = brute_force_best_coordinate(inst, args.p);
  const bool clique = has_clique(adj, args.k);
  const double formula = clique_formula_cost(inst, args.p);
  const double bound = clique_margin_bound(inst.b1, inst.k, inst.r, args.p);
  const double d = static_cast<double>(inst.d);
  // Slack of order d^2 / b1 in the clique formula.
  const double slack = d * d / inst.b1;
  const double gap = best.cost - formula;

  std::string verdict;
  if (clique) {
    verdict = std::abs(gap) <= slack ? "clique-k cost formula matched" : "clique-k cost formula mismatch";
  } else {
    verdict = gap > 0.0 ? "no k-clique: minimum exceeds the clique formula" : "no k-clique: margin not observed";
  }
  if (!args.export_path.empty()) write_matrix_market(args.export_path, Matrix(inst.q_points(args.export_copies)));

  json report;
  report["schema_version"] = kSchemaVersion;
  report["command"] = "gadget";
  report["graph"] = args.edges.empty() ? args.graph : args.edges;
  report["instance"] = {{"d", inst.d}, {"r", inst.r}, {"k", inst.k}, {"b1", inst.b1}, {"b2", inst.b2},
                        {"c", inst.c}};
  report["p"] = args.p;
  report["result"] = {{"has_k_clique", clique},
                      {"best_set", best.s},
                      {"best_cost", best.cost},
                      {"best_excess", excess_cost(inst, best.cost)},
                      {"subsets_evaluated", best.evaluated},
                      {"clique_formula_cost", formula},
                      {"gap_to_clique_formula", gap},
                      {"margin_bound", bound},
                      {"gap_over_bound", bound > 0.0 ? gap / bound : 0.0},
                      {"verdict", verdict}};
  report["timings_seconds"] = {{"total", since(t_total)}};
  return report;
}

void run_bench(const BenchArgs& args, std::ostream& out) {
  std::ostringstream csv;
  csv << std::setprecision(9);
  csv << "density,nnz,stage1_seconds\n";
  const double kk = static_cast<double>(args.k);
  const auto m = std::min<Index>(args.cols, static_cast<Index>(std::ceil(args.c_sketch * kk * kk)));
  const Index s = std::min<Index>(m, std::max<Index>(1, static_cast<Index>(std::ceil(2.0 / args.eps_const))));
  for (std::size_t j = 0; j < args.densities.size(); ++j) {
    const Matrix a(random_sparse(args.rows, args.cols, args.densities[j], derive_seed(args.seed, 100, j)));
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < std::max(args.repeats, 1); ++rep) {
      const auto t0 = Clock::now();
      const SparseSketch r = make_sparse_sketch(derive_seed(args.seed, streams::kSparseSketch), m, args.cols, s);
      const DenseMatrix ar = apply_right(a, r);
      const double sec = since(t0);
      if (ar.size() > 0 && !std::isfinite(ar(0, 0))) throw NumericalError("bench: non-finite sketch");
      best = std::min(best, sec);
    }
    csv << args.densities[j] << ',' << a.nnz() << ',' << best << '\n';
  }
  if (args.out.empty() || args.out == "-") {
    out << csv.str();
  } else {
    std::ofstream f(args.out);
    if (!f) throw IoError("cannot write " + args.out);
    f << csv.str();
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust subspace approximation and M-estimator regression"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads (0 = all cores; ROBSUB_THREADS overrides)")
      ->check(CLI::NonNegativeNumber);

  ApproxArgs ax;
  auto* approx = app.add_subcommand("approx", "Fit a rank-k subspace");
  approx->add_option("--input", ax.input, "Matrix Market (.mtx) or headerless CSV")->required();
  approx->add_option("--k", ax.k, "Target rank")->required()->check(CLI::PositiveNumber);
  approx->add_option("--loss", ax.loss, "l1, l2, lp:P, huber[:tau], l1l2, fair[:c]");
  approx->add_option("--eps", ax.eps, "Accuracy parameter in (0, 1)");
  approx->add_option("--seed", ax.seed, "Seed for every randomized stage");
  approx->add_option("--stage", ax.stage, "bicriteria, dimreduce or full");
  approx->add_option("--report", ax.report, "JSON report path (default stdout)");
  approx->add_option("--factor-out", ax.factor_out, "Write the subspace basis as Matrix Market");
  approx->add_flag("!--no-baseline", ax.baseline, "Skip the SVD baseline");
  approx->add_option("--k2", ax.cfg.dimreduce.k2, "Oversampling constant K2 for residual sampling");
  approx->add_option("--c1", ax.cfg.dimreduce.r1_multiplier, "c1 in r1 = c1 K k^{2+p} eps^{-p-1} log(k/eps + 2)");
  approx->add_option("--quality-k", ax.cfg.dimreduce.quality_k, "Quality bound K of the bicriteria subspace");
  approx->add_option("--t-m", ax.t_m, "Gaussian sketch width for growth-2 residual sampling");
  approx->add_option("--c-sketch", ax.cfg.bicriteria.c_sketch, "Sketch width multiplier c_R (m = c_R k^2)");
  approx->add_option("--eps-const", ax.cfg.bicriteria.eps_const, "Constant eps of the right sketch (s = ceil(2/eps))");
  approx->add_option("--c-pi", ax.cfg.conditioning.c_pi, "Embedding rows multiplier c_Pi");
  approx->add_option("--beta-samples", ax.cfg.conditioning.beta_samples, "Directions used to certify beta");
  approx->add_option("--c-poly", ax.cfg.bicriteria.c_poly, "c_r in the recursion sample size c_r d'^2 sum q'");
  approx->add_option("--pm-multiplier", ax.cfg.bicriteria.pm_multiplier, "Multiplier in the row budget P_M");
  approx->add_option("--p-m", ax.p_m, "Explicit bicriteria row budget P_M");
  approx->add_option("--c-loglog-recur", ax.cfg.bicriteria.c_loglog, "C in C log log log n");
  approx->add_option("--c-lopsided", ax.cfg.c_lopsided, "Rows of the right embedding S per m^2");
  approx->add_option("--r1-multiplier", ax.cfg.r1_multiplier, "poly(k/eps) multiplier in the final row sampling");
  approx->add_option("--kappa", ax.cfg.kappa, "kappa for growth-2 score sketches (t = ceil(3/kappa))");
  approx->add_option("--c-loglog", ax.cfg.c_loglog, "C in eps' = eps / (C log log n)");
  approx->add_option("--recursion-p-m", ax.recursion_p_m, "Row budget of the growth-2 recursion");
  approx->add_option("--restarts", ax.cfg.small.restarts, "Local-search restarts in the small solver");

  RegressArgs rx;
  auto* regress = app.add_subcommand("regress", "Sampled M-estimator regression against a full IRLS solve");
  regress->add_option("--input", rx.input, "Design matrix (.mtx or CSV)")->required();
  regress->add_option("--rhs", rx.rhs, "Response vector, one value per line")->required();
  regress->add_option("--weights", rx.weights, "Optional row weights (each >= 1)");
  regress->add_option("--loss", rx.loss, "Loss (default huber)");
  regress->add_option("--eps", rx.eps, "Accuracy parameter in (0, 1)");
  regress->add_option("--seed", rx.seed, "Seed");
  regress->add_option("--delta", rx.cfg.delta, "Failure probability in the sample size");
  regress->add_option("--c-size", rx.cfg.c_size, "Constant in the per-level sample size");
  regress->add_option("--kappa", rx.cfg.kappa, "kappa in n^{1/2 + kappa}");
  regress->add_option("--max-levels", rx.cfg.max_levels, "Maximum sampling levels");
  regress->add_option("--base-cap", rx.base_cap, "Rows at which sampling stops (default 20 d^2 / eps^2)");
  regress->add_option("--irls-tol", rx.cfg.irls.tol, "IRLS relative tolerance");
  regress->add_option("--irls-x-tol", rx.cfg.irls.x_tol, "IRLS relative step tolerance");
  regress->add_option("--irls-max-iter", rx.cfg.irls.max_iter, "IRLS iteration cap");
  regress->add_option("--report", rx.report, "JSON report path (default stdout)");
  regress->add_option("--x-out", rx.x_out, "Write the solution as CSV");

  GadgetArgs gx;
  auto* gadget = app.add_subcommand("gadget", "Build and brute-force the clique gadget");
  gadget->add_option("--edges", gx.edges, "Edge list, 0-based 'u v' per line");
  gadget->add_option("--graph", gx.graph, "Built-in graph: k4, petersen, c5");
  gadget->add_option("--k", gx.k, "Clique size");
  gadget->add_option("--b1", gx.b1, "B1");
  gadget->add_option("--b2", gx.b2, "B2 (simplex copies)");
  gadget->add_option("--p", gx.p, "Exponent p");
  gadget->add_option("--export", gx.export_path, "Write the point set as Matrix Market");
  gadget->add_option("--export-copies", gx.export_copies, "Simplex copies to materialize in the export");
  gadget->add_option("--report", gx.report, "JSON report path (default stdout)");

  BenchArgs bx;
  auto* bench = app.add_subcommand("bench", "Time the right sketch across sparsity levels (CSV)");
  bench->add_option("--rows", bx.rows, "Rows");
  bench->add_option("--cols", bx.cols, "Columns");
  bench->add_option("--k", bx.k, "Rank (sketch width c_R k^2)");
  bench->add_option("--densities", bx.densities, "Four densities in (0, 1]")->expected(4);
  bench->add_option("--repeats", bx.repeats, "Timed repeats per density (best kept)");
  bench->add_option("--seed", bx.seed, "Seed");
  bench->add_option("--out", bx.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 3;
  }

  try {
    set_thread_count(threads);
    if (*approx) emit(run_approx(ax), ax.report, out);
    if (*regress) emit(run_regress(rx), rx.report, out);
    if (*gadget) emit(run_gadget(gx), gx.report, out);
    if (*bench) run_bench(bx, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

}  // namespace robsub::cli
