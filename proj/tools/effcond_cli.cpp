// effcond command-line front end.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "effcond/canonical_rep.hpp"
#include "effcond/effective_approx.hpp"
#include "effcond/io.hpp"
#include "effcond/laminate_models.hpp"
#include "effcond/recovery.hpp"
#include "effcond/reference_solver.hpp"
#include "effcond/truncation.hpp"

using namespace effcond;
using io::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;
constexpr const char *kSweepSchema = "effcond-sweep/1";

struct Options {
  std::string output;
  std::string geometry;
  std::string mirror;
  std::string sigma1, sigma2;
  std::string lambda;
  std::string rep;
  std::string program;
  std::string samples;
  std::string dir1 = "1,0,0,1", dir2 = "0,0,0,0";
  std::string variable = "sigma1";
  std::string scale = "log";
  std::string method = "oracle";
  double tol = 1e-10;
  double rank_tol = 1e-8;
  double eps = 1e-14;
  double from = 0.1, to = 10.0;
  int points = 11;
  int half_m = 0;
  int order = 2;
  int modes = 1;
  bool rotate = false;
};

// Reproducibility header shared by every subcommand.
struct Run {
  std::string command;
  json config;
  std::string geometry_hash = "-";

  std::string config_hash() const { return io::hash_hex(command + io::dump(config, -1)); }

  json header() const {
    return {{"version", EFFCOND_VERSION},
            {"command", command},
            {"config_hash", config_hash()},
            {"geometry_hash", geometry_hash}};
  }

  void echo() const {
    std::fprintf(stderr, "# effcond %s %s config=%s geometry=%s\n", EFFCOND_VERSION,
                 command.c_str(), config_hash().c_str(), geometry_hash.c_str());
  }
};

void emit(const Options &o, const std::string &text) {
  if (o.output.empty() || o.output == "-")
    std::cout << text;
  else
    io::write_file_atomic(o.output, text);
}

void emit_json(const Options &o, const Run &run, json body) {
  json out = {{"effcond", run.header()}};
  for (auto it = body.begin(); it != body.end(); ++it)
    out[it.key()] = it.value();
  emit(o, io::dump(out));
}

MirrorSpec mirror_spec(const std::string &s) {
  if (s.empty())
    return {};
  if (s == "auto")
    return {true, 0};
  try {
    return {false, std::stoi(s)};
  } catch (const std::exception &) {
    throw ParseError("--mirror must be an integer shift or \"auto\"");
  }
}

GridGeometry load(const Options &o, Run &run) {
  GridGeometry g = io::read_geometry(o.geometry, mirror_spec(o.mirror));
  run.geometry_hash = io::geometry_hash(g);
  return g;
}

AdmissiblePair pair_from(const Options &o) {
  const Tensor2 s1 = io::parse_tensor(o.sigma1), s2 = io::parse_tensor(o.sigma2);
  return o.rotate ? make_rotatable_pair(s1, s2) : admissible_pair(s1, s2);
}

DiagonalTriple parse_triple(const std::string &s) {
  std::vector<cplx> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ','))
    v.push_back(io::parse_complex(cell));
  if (v.size() != 3)
    throw ParseError("--lambda needs three comma-separated values");
  return {v[0], v[1], v[2]};
}

CanonicalRep load_rep(const std::string &path) {
  const json j = json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded())
    throw ParseError("rep file is not valid JSON: " + path);
  return io::rep_from_json(j.contains("rep") ? j["rep"] : j);
}

json residuals_json(const std::map<std::string, double> &m) {
  json r = json::object();
  for (const auto &[k, v] : m)
    r[k] = v;
  return r;
}

std::vector<double> grid(const Options &o) {
  if (o.points < 1)
    throw DimensionMismatch("--points must be >= 1");
  if (o.scale != "log" && o.scale != "lin")
    throw ParseError("--scale must be log or lin");
  if (o.scale == "log" && !(o.from > 0.0 && o.to > 0.0))
    throw DimensionMismatch("log grid needs positive bounds");
  std::vector<double> v(o.points);
  for (int i = 0; i < o.points; ++i) {
    const double t = o.points == 1 ? 0.0 : static_cast<double>(i) / (o.points - 1);
    v[i] = o.scale == "log" ? o.from * std::pow(o.to / o.from, t) : o.from + (o.to - o.from) * t;
  }
  return v;
}

int worker_count(int jobs) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char *env = std::getenv("EFFCOND_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (const std::exception &) {
      throw ParseError("EFFCOND_THREADS must be a positive integer");
    }
    if (n < 1)
      throw ParseError("EFFCOND_THREADS must be a positive integer");
  }
  return std::clamp(n, 1, std::max(1, jobs));
}

// Subcommands.

int cmd_solve(const Options &o, Run &run) {
  const GridGeometry g = load(o, run);
  run.echo();
  const SolveReport r = solve_effective(g, pair_from(o), o.tol);
  emit_json(o, run,
            {{"n", g.n},
             {"f", g.f},
             {"sigma_star", io::to_json(r.sigma_star)},
             {"iterations", r.iterations},
             {"residual", r.residual}});
  return 0;
}

int cmd_represent(const Options &o, Run &run) {
  CanonicalRep rep;
  json extra = json::object();
  if (!o.rep.empty()) {
    rep = load_rep(o.rep);
    run.echo();
  } else {
    const GridGeometry g = load(o, run);
    run.echo();
    rep = extract_rep(build_eigenbasis(g, o.half_m, o.eps), ExtractOptions{o.rank_tol, 1e-8});
    extra = {{"n", g.n}, {"f", g.f}};
  }
  const ValidationReport v = validate_rep(rep);
  json body = {{"rep", io::to_json(rep)},
               {"validation",
                {{"max_residual", v.max_residual()}, {"residuals", residuals_json(v.residuals)}}}};
  for (auto it = extra.begin(); it != extra.end(); ++it)
    body[it.key()] = it.value();
  emit_json(o, run, body);
  return 0;
}

int cmd_approx(const Options &o, Run &run) {
  const CanonicalRep rep = load_rep(o.rep);
  run.geometry_hash = io::hash_hex(io::dump(io::to_json(rep), -1));
  run.echo();
  json body = {{"half_m", rep.half_m}, {"weight_deficit", 1.0 - rep.beta.squaredNorm()}};
  if (!o.lambda.empty()) {
    const DiagonalTriple t = parse_triple(o.lambda);
    body["method"] = "diagonal";
    body["sigma_star"] = io::to_json(sigma_diag_theorem1(rep, rep, t));
  } else {
    if (o.sigma1.empty() || o.sigma2.empty())
      throw ParseError("approx needs --lambda or both --sigma1 and --sigma2");
    const AdmissiblePair p = pair_from(o);
    body["method"] = "tensor";
    body["sigma_star"] = io::to_json(sigma_star_theorem2(rep, p.sigma1, p.sigma2));
  }
  emit_json(o, run, body);
  return 0;
}

int cmd_laminate(const Options &o, Run &run) {
  const json j = json::parse(io::read_file(o.program), nullptr, false);
  if (j.is_discarded())
    throw ParseError("laminate program is not valid JSON: " + o.program);
  const LaminateProgram p = io::laminate_from_json(j);
  run.geometry_hash = io::hash_hex(io::dump(j, -1));
  run.echo();
  emit_json(o, run,
            {{"steps", p.steps.size()}, {"sigma_star", io::to_json(polycrystal_laminate(p))}});
  return 0;
}

int cmd_recover(const Options &o, Run &run) {
  const std::string text = io::read_file(o.samples);
  run.geometry_hash = io::hash_hex(text);
  run.echo();
  const RecoveredSpectrum r = recover_spectrum(io::parse_samples_csv(text), o.modes);
  emit_json(o, run,
            {{"modes", o.modes},
             {"rho", r.rho},
             {"beta_sq", r.beta_sq},
             {"misfit", r.misfit},
             {"sum_deviation", r.sum_deviation}});
  return 0;
}

int cmd_truncate(const Options &o, Run &run) {
  const GridGeometry g = load(o, run);
  run.echo();
  TruncationOptions topt;
  topt.rank_tol = o.rank_tol;
  const TruncatedSpace sp = build_truncated_space(g, o.order, topt);
  const ExpansionComparison c =
      compare_expansions(sp, io::parse_tensor(o.dir1), io::parse_tensor(o.dir2));
  emit_json(o, run,
            {{"order", o.order},
             {"dimension", sp.dim()},
             {"dim_e_tilde", sp.dim_e_tilde},
             {"dim_j_tilde", sp.dim_j_tilde},
             {"dim_r", sp.dim_r},
             {"closure_residuals", residuals_json(sp.closure_residuals)},
             {"discrepancy_by_order", c.by_order},
             {"max_discrepancy", c.max_discrepancy}});
  return 0;
}

int cmd_sweep(const Options &o, Run &run) {
  const GridGeometry g = load(o, run);
  if (o.variable != "sigma1" && o.variable != "sigma2")
    throw ParseError("--variable must be sigma1 or sigma2");
  if (o.method != "oracle" && o.method != "tensor")
    throw ParseError("--method must be oracle or tensor");
  const Tensor2 s1 = io::parse_tensor(o.sigma1), s2 = io::parse_tensor(o.sigma2);
  std::optional<TheoremTwoEvaluator> ev;
  if (o.method == "tensor") {
    if (o.rep.empty())
      throw ParseError("--method tensor needs --rep");
    ev.emplace(load_rep(o.rep));
  }
  const std::vector<double> xs = grid(o);
  // Validate every point before any solve runs.
  std::vector<AdmissiblePair> pairs;
  for (double x : xs) {
    const Tensor2 a = o.variable == "sigma1" ? Tensor2(x * s1) : s1;
    const Tensor2 b = o.variable == "sigma2" ? Tensor2(x * s2) : s2;
    pairs.push_back(o.rotate ? make_rotatable_pair(a, b) : admissible_pair(a, b));
  }
  run.echo();

  const int jobs = static_cast<int>(xs.size());
  std::vector<Tensor2> out(jobs);
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (int i = next++; i < jobs; i = next++) {
      try {
        out[i] = ev ? ev->sigma_star(pairs[i].sigma1, pairs[i].sigma2)
                    : solve_effective(g, pairs[i], o.tol).sigma_star;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error)
          first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < worker_count(jobs); ++t)
    pool.emplace_back(worker);
  for (std::thread &t : pool)
    t.join();
  if (first_error)
    std::rethrow_exception(first_error);

  std::ostringstream csv;
  csv << "# " << kSweepSchema << " version=" << EFFCOND_VERSION
      << " config=" << run.config_hash() << " geometry=" << run.geometry_hash
      << " method=" << o.method << " variable=" << o.variable << "\n";
  csv << "index,x";
  for (const char *e : {"s11", "s12", "s21", "s22"})
    csv << "," << e << "_re," << e << "_im";
  csv << "\n";
  char buf[64];
  for (int i = 0; i < jobs; ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g", i, xs[i]);
    csv << buf;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", out[i](r, c).real(), out[i](r, c).imag());
        csv << buf;
      }
    csv << "\n";
  }
  emit(o, csv.str());
  return 0;
}

int cmd_selftest(const Options &o, Run &run) {
  run.echo();
  std::mt19937_64 rng(2024);
  json checks = json::object();
  bool ok = true;
  auto record = [&](const char *name, double value, double tol) {
    checks[name] = {{"value", value}, {"tol", tol}, {"pass", value < tol}};
    ok = ok && value < tol;
  };

  const GridGeometry g = random_symmetric(8, rng);
  const VectorField h = random_field(8, rng);
  VectorField sum = VectorField::zeros(8);
  for (int i = 1; i <= 4; ++i)
    sum.data += project_phase(i, h, g).data;
  record("phase_partition", (sum.data - h.data).norm() / h.data.norm(), 1e-12);
  const VectorField l1 = project_lambda(1, h);
  record("lambda_idempotent", (project_lambda(1, l1).data - l1.data).norm() / h.data.norm(),
         1e-12);

  const CanonicalRep rep = extract_rep(build_eigenbasis(g));
  record("rep_identities", validate_rep(rep).max_residual(), 1e-8);
  const Tensor2 s1 = Eigen::Vector2cd(cplx(3.0, 0.5), 2.0).asDiagonal();
  const Tensor2 s2 = Tensor2::Identity();
  const Tensor2 ref = solve_effective(g, admissible_pair(s1, s2), 1e-12).sigma_star;
  record("tensor_formula_vs_oracle", (sigma_star_theorem2(rep, s1, s2) - ref).norm(), 1e-7);

  const auto lam = default_sampling(2);
  const RecoveredSpectrum r = recover_spectrum(synthesize({0.7, 0.2}, {0.4, 0.6}, lam), 2);
  record("recovery", std::max(std::abs(r.rho[0] - 0.7), std::abs(r.rho[1] - 0.2)), 1e-6);

  emit_json(o, run, {{"checks", checks}, {"pass", ok}});
  return ok ? 0 : kExitNumeric;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Effective conductivity of periodic two-phase composites"};
  app.set_version_flag("--version", std::string(EFFCOND_VERSION));
  app.require_subcommand(1);
  Options o;

  auto add_output = [&](CLI::App *c) {
    c->add_option("-o,--output", o.output, "Output path (default stdout)");
  };
  auto add_geometry = [&](CLI::App *c) {
    c->add_option("--geometry", o.geometry, "Geometry file (JSON or ASCII grid)")->required();
    c->add_option("--mirror", o.mirror, "Reflection shift or \"auto\"");
  };
  auto add_pair = [&](CLI::App *c, bool required) {
    auto *a = c->add_option("--sigma1", o.sigma1, "Phase 1 tensor \"a11,a12,a21,a22\"");
    auto *b = c->add_option("--sigma2", o.sigma2, "Phase 2 tensor");
    if (required) {
      a->required();
      b->required();
    }
    c->add_flag("--rotate", o.rotate, "Allow a common phase rotation into the coercive half-plane");
  };

  CLI::App *solve = app.add_subcommand("solve", "Reference FFT solve for sigma*");
  add_geometry(solve);
  add_pair(solve, true);
  solve->add_option("--tol", o.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
  add_output(solve);

  CLI::App *represent = app.add_subcommand("represent", "Extract a canonical representation");
  represent->add_option("--geometry", o.geometry, "Geometry file");
  represent->add_option("--mirror", o.mirror, "Reflection shift or \"auto\"");
  represent->add_option("--rep", o.rep, "Re-emit and validate an existing rep");
  represent->add_option("--half-m", o.half_m, "Retained modes (0 keeps all)")
      ->check(CLI::NonNegativeNumber);
  represent->add_option("--eps", o.eps, "Edge clamp")->check(CLI::Range(1e-300, 0.5));
  represent->add_option("--rank-tol", o.rank_tol, "Pivot conditioning tolerance")
      ->check(CLI::PositiveNumber);
  add_output(represent);

  CLI::App *approx = app.add_subcommand("approx", "Evaluate sigma* from a rep");
  approx->add_option("--rep", o.rep, "Rep JSON")->required();
  approx->add_option("--lambda", o.lambda, "Diagonal triple \"l1,l2,l3\"");
  add_pair(approx, false);
  add_output(approx);

  CLI::App *laminate = app.add_subcommand("laminate", "Hierarchical polycrystal laminate");
  laminate->add_option("--program", o.program, "Laminate program JSON")->required();
  add_output(laminate);

  CLI::App *recover = app.add_subcommand("recover", "Recover (rho, beta^2) from samples");
  recover->add_option("--samples", o.samples, "CSV: lambda_re,lambda_im,value_re,value_im")
      ->required();
  recover->add_option("--modes", o.modes, "Number of modes")->required()->check(CLI::PositiveNumber);
  add_output(recover);

  CLI::App *truncate = app.add_subcommand("truncate-check", "Build and check a truncated space");
  add_geometry(truncate);
  truncate->add_option("--order", o.order, "Truncation order M")->check(CLI::Range(1, 8));
  truncate->add_option("--dir1", o.dir1, "Phase 1 perturbation direction");
  truncate->add_option("--dir2", o.dir2, "Phase 2 perturbation direction");
  truncate->add_option("--rank-tol", o.rank_tol, "Orthogonalization tolerance")
      ->check(CLI::PositiveNumber);
  add_output(truncate);

  CLI::App *sweep = app.add_subcommand("sweep", "Sweep one phase tensor over a grid (CSV)");
  add_geometry(sweep);
  add_pair(sweep, true);
  sweep->add_option("--variable", o.variable, "sigma1 or sigma2");
  sweep->add_option("--from", o.from, "Grid start");
  sweep->add_option("--to", o.to, "Grid end");
  sweep->add_option("--points", o.points, "Grid size");
  sweep->add_option("--scale", o.scale, "log or lin");
  sweep->add_option("--method", o.method, "oracle or tensor");
  sweep->add_option("--rep", o.rep, "Rep JSON for --method tensor");
  sweep->add_option("--tol", o.tol, "Solver tolerance")->check(CLI::PositiveNumber);
  add_output(sweep);

  CLI::App *selftest = app.add_subcommand("selftest", "Quick internal consistency checks");
  add_output(selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  CLI::App *sub = app.get_subcommands().front();
  Run run;
  run.command = sub->get_name();
  run.config = json::object();
  for (const CLI::Option *opt : sub->get_options()) {
    if (opt->check_lname("help") || opt->check_lname("output") || opt->count() == 0)
      continue;
    run.config[opt->get_name()] = opt->results();
  }

  try {
    if (sub == solve)
      return cmd_solve(o, run);
    if (sub == represent) {
      if (o.rep.empty() && o.geometry.empty())
        throw ParseError("represent needs --geometry or --rep");
      return cmd_represent(o, run);
    }
    if (sub == approx)
      return cmd_approx(o, run);
    if (sub == laminate)
      return cmd_laminate(o, run);
    if (sub == recover)
      return cmd_recover(o, run);
    if (sub == truncate)
      return cmd_truncate(o, run);
    if (sub == sweep)
      return cmd_sweep(o, run);
    return cmd_selftest(o, run);
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == ErrorKind::Validation ? kExitValidation : kExitNumeric;
  } catch (const json::exception &e) {
    std::fprintf(stderr, "error: ParseError: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}
