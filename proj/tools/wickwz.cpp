// Batch front end: runs simulation and verification experiments from a JSON
// config and writes reports to files. Exit codes are the machine contract:
// 0 success/pass, 2 config error, 3 non-finite solver state, 4 statistical
// fail. Stdout is a human-readable summary only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wickwz/errors.hpp"
#include "wickwz/gbm.hpp"
#include "wickwz/malliavin.hpp"
#include "wickwz/numerics.hpp"
#include "wickwz/parallel.hpp"
#include "wickwz/rng.hpp"
#include "wickwz/solver.hpp"
#include "wickwz/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonFinite = 3;
constexpr int kExitStatFail = 4;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::optional<uint64_t> seed_override;
};

[[noreturn]] void config_fail(const std::string& field, const std::string& what) {
  throw wickwz::Error(wickwz::Errc::config_error, field + ": " + what);
}

json load_config(const CommonOptions& opt) {
  std::ifstream in(opt.config_path);
  if (!in) config_fail("config", "cannot open " + opt.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_fail("config", std::string("invalid JSON: ") + e.what());
  }
  return j;
}

wickwz::PartitionPtr parse_partition(const json& cfg) {
  if (!cfg.contains("partition")) config_fail("partition", "missing");
  const json& p = cfg["partition"];
  if (p.contains("points")) {
    return wickwz::make_partition(p["points"].get<std::vector<double>>());
  }
  if (p.contains("uniform_n")) {
    const std::size_t n = p["uniform_n"].get<std::size_t>();
    const double horizon = p.value("horizon", 1.0);
    return wickwz::make_uniform_partition(n, horizon);
  }
  config_fail("partition", "need either points or uniform_n");
}

wickwz::Drift parse_drift(const json& model) {
  if (!model.contains("drift")) config_fail("model.drift", "missing");
  const json& d = model["drift"];
  const std::string id = d.value("id", "");
  if (id == "zero") return wickwz::Drift::zero();
  if (id == "linear") {
    if (!d.contains("beta")) config_fail("model.drift.beta", "missing");
    return wickwz::Drift::linear(d["beta"].get<double>());
  }
  if (id == "tanh_logistic") {
    if (!d.contains("a") || !d.contains("c")) config_fail("model.drift", "needs a and c");
    return wickwz::Drift::tanh_logistic(d["a"].get<double>(), d["c"].get<double>());
  }
  if (id == "sin_drift") {
    if (!d.contains("a") || !d.contains("omega")) config_fail("model.drift", "needs a and omega");
    return wickwz::Drift::sin_drift(d["a"].get<double>(), d["omega"].get<double>());
  }
  config_fail("model.drift.id", "unknown drift id '" + id + "'");
}

wickwz::InitialCondition parse_init(const json& model, const wickwz::PartitionPtr& p, double s) {
  if (!model.contains("init")) config_fail("model.init", "missing");
  const json& init = model["init"];
  const std::string kind = init.value("kind", "");
  if (kind == "deterministic") {
    if (!init.contains("x0")) config_fail("model.init.x0", "missing");
    return wickwz::InitialCondition::deterministic(init["x0"].get<double>());
  }
  if (kind == "lognormal_exp") {
    if (!init.contains("y0")) config_fail("model.init.y0", "missing");
    const double y0 = init["y0"].get<double>();
    const std::string dir = init.value("direction", "haar");
    if (dir == "haar")
      return wickwz::InitialCondition::lognormal_exp(y0, wickwz::make_haar_direction(p));
    if (dir == "indicator")
      return wickwz::InitialCondition::lognormal_exp(y0, wickwz::indicator_direction(p, s));
    config_fail("model.init.direction", "unknown direction '" + dir + "' (haar | indicator)");
  }
  config_fail("model.init.kind", "unknown kind '" + kind + "' (deterministic | lognormal_exp)");
}

std::vector<double> parse_sigma(const json& model, const wickwz::PartitionPtr& p) {
  if (!model.contains("sigma")) return {};
  const json& s = model["sigma"];
  if (s.is_number()) return std::vector<double>(p->n(), s.get<double>());
  return s.get<std::vector<double>>();
}

struct LoadedConfig {
  json raw;
  wickwz::PartitionPtr partition;
  int m = 32;
  std::size_t n_paths = 1000;
  uint64_t master_seed = 42;
  wickwz::ModelSpec model;
  std::vector<double> grid;
  fs::path out_dir;
};

LoadedConfig parse_common(const CommonOptions& opt) {
  json cfg = load_config(opt);
  if (cfg.value("schema_version", 1) != 1) config_fail("schema_version", "expected 1");
  auto p = parse_partition(cfg);
  const int m = cfg.value("m", 32);
  if (m < 1) config_fail("m", "must be >= 1");
  const json& model = cfg.contains("model") ? cfg["model"] : json::object();
  const double s = model.value("s", 0.0);
  wickwz::ModelSpec spec{parse_drift(model), parse_sigma(model, p), parse_init(model, p, s), s};
  spec.validate(*p);

  LoadedConfig out{std::move(cfg), p, m, 0, 0, std::move(spec), {}, {}};
  out.n_paths = out.raw.value("n_paths", std::size_t{1000});
  out.master_seed = opt.seed_override.value_or(out.raw.value("master_seed", uint64_t{42}));
  if (out.raw.contains("grid") && out.raw["grid"].contains("times"))
    out.grid = out.raw["grid"]["times"].get<std::vector<double>>();
  else
    out.grid = wickwz::make_output_grid(*p, m, s,
                                        out.raw.contains("grid")
                                            ? out.raw["grid"].value("count", std::size_t{9})
                                            : std::size_t{9});
  std::string dir = opt.out_dir.empty() ? out.raw.value("out_dir", std::string("out")) : opt.out_dir;
  out.out_dir = dir;
  return out;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) config_fail("out", "cannot write " + (dir / name).string());
  return os;
}

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

void write_json_file(const fs::path& dir, const std::string& name, const ordered_json& j) {
  auto os = open_out(dir, name);
  os << j.dump(2) << "\n";
}

int cmd_simulate(const CommonOptions& opt) {
  LoadedConfig cfg = parse_common(opt);
  wickwz::EnsembleOptions eopt;
  eopt.grid = cfg.grid;
  eopt.threads = opt.threads;
  const wickwz::EnsembleRun run = wickwz::run_ensemble(cfg.partition, cfg.m, cfg.model,
                                                       cfg.n_paths, cfg.master_seed, eopt);
  {
    auto os = open_out(cfg.out_dir, "run.json");
    wickwz::write_run_json(os, run, now_utc());
  }
  {
    auto os = open_out(cfg.out_dir, "trajectories.csv");
    wickwz::write_trajectories_csv(os, run);
  }
  std::cout << "simulate: " << run.n_paths << " paths, " << run.grid.size()
            << " grid times -> " << (cfg.out_dir / "trajectories.csv").string()
            << " (config " << run.config_hash << ")\n";
  return kExitOk;
}

int cmd_check_derivative(const CommonOptions& opt) {
  LoadedConfig cfg = parse_common(opt);
  const json block = cfg.raw.value("check_derivative", json::object());
  const double eps = block.value("eps", 1e-4);
  const double tolerance = block.value("tolerance", 1e-5);
  const std::size_t n_paths = block.value("n_paths", std::size_t{100});
  const double q = block.value("q", 5.0);
  const double trim = block.value("trim", 0.0);
  std::vector<double> ts = block.value("t", std::vector<double>{});
  if (ts.empty()) ts = {cfg.grid.back()};
  std::vector<double> eps_list =
      block.value("eps_list", std::vector<double>{1e-2, 3e-3, 1e-3, 3e-4, 1e-4});

  const wickwz::Direction haar = wickwz::make_haar_direction(cfg.partition);
  if (cfg.model.init.directional_coefficient(haar) == 0.0)
    throw wickwz::Error(wickwz::Errc::degenerate_init,
                        "model.init: D_h Y vanishes; use a lognormal_exp initial condition");

  // Closed form vs central differences across paths and times.
  double max_rel = 0.0;
  std::vector<std::size_t> ids;
  std::vector<wickwz::DerivativeSample> samples;
  for (std::size_t i = 0; i < n_paths; ++i) {
    const auto ps = wickwz::PathSample::sample(cfg.partition, cfg.m,
                                               wickwz::derive_seed(cfg.master_seed, i));
    for (double t : ts) {
      wickwz::DerivativeSample ds;
      ds.t = t;
      ds.eps = eps;
      ds.closed_form = wickwz::dhx_closed(ps, cfg.model, haar, t);
      ds.fd_value = wickwz::dhx_fd(ps, cfg.model, haar, t, eps, &ds.fd_error_estimate);
      ids.push_back(i);
      samples.push_back(ds);
      const double denom = std::max(std::fabs(ds.closed_form), 1e-300);
      max_rel = std::max(max_rel, std::fabs(ds.closed_form - ds.fd_value) / denom);
    }
  }

  // Step-size sweep on the first path: the log-log slope of the FD error.
  const auto ps0 = wickwz::PathSample::sample(cfg.partition, cfg.m,
                                              wickwz::derive_seed(cfg.master_seed, 0));
  const double t_probe = ts.back();
  const double ref = wickwz::dhx_closed(ps0, cfg.model, haar, t_probe);
  std::vector<double> log_eps, log_err;
  for (double e : eps_list) {
    const double fd = wickwz::dhx_fd(ps0, cfg.model, haar, t_probe, e);
    const double err = std::fabs(fd - ref);
    if (err > 0.0) {
      log_eps.push_back(std::log(e));
      log_err.push_back(std::log(err));
    }
  }
  const double slope =
      log_eps.size() >= 2 ? wickwz::least_squares(log_eps, log_err).slope : 0.0;

  // Inverse-moment estimate from a closed-form derivative ensemble.
  wickwz::EnsembleOptions eopt;
  eopt.grid = cfg.grid;
  eopt.record_dhx = true;
  eopt.threads = opt.threads;
  const auto run = wickwz::run_ensemble(cfg.partition, cfg.m, cfg.model,
                                        cfg.n_paths, cfg.master_seed, eopt);
  const auto inv = wickwz::inverse_moment(run, cfg.grid.back(), q, trim);

  const bool pass = max_rel <= tolerance;
  ordered_json report;
  report["max_rel_discrepancy"] = max_rel;
  report["tolerance"] = tolerance;
  report["eps"] = eps;
  report["fd_order_slope"] = slope;
  report["inverse_moment"] = {{"q", inv.q},           {"trim", inv.trim},
                              {"estimate", inv.estimate}, {"se", inv.se},
                              {"ci_lo", inv.ci_lo},    {"ci_hi", inv.ci_hi},
                              {"min_abs_derivative", inv.min_abs_derivative},
                              {"nondegenerate", inv.nondegenerate}};
  report["pass"] = pass;
  write_json_file(cfg.out_dir, "derivative_report.json", report);
  {
    auto os = open_out(cfg.out_dir, "derivatives.csv");
    wickwz::write_derivatives_csv(os, ids, samples);
  }
  std::cout << "check-derivative: max rel discrepancy " << max_rel << " (tolerance " << tolerance
            << "), FD order slope " << slope << (pass ? " -> pass\n" : " -> FAIL\n");
  return pass ? kExitOk : kExitStatFail;
}

int cmd_density(const CommonOptions& opt) {
  LoadedConfig cfg = parse_common(opt);
  const json block = cfg.raw.value("density", json::object());
  const double t = block.value("t", cfg.grid.back());
  const std::size_t grid_points = block.value("grid_points", std::size_t{401});

  wickwz::EnsembleOptions eopt;
  eopt.grid = {t};
  eopt.threads = opt.threads;
  const auto run = wickwz::run_ensemble(cfg.partition, cfg.m, cfg.model, cfg.n_paths,
                                        cfg.master_seed, eopt);
  std::vector<double> samples(run.n_paths);
  for (std::size_t i = 0; i < run.n_paths; ++i) samples[i] = run.x_at(i, 0);

  const double h = block.contains("bandwidth") && block["bandwidth"].get<double>() > 0.0
                       ? block["bandwidth"].get<double>()
                       : wickwz::silverman_bandwidth(samples);
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 3.0 * h, hi = *hi_it + 3.0 * h;
  std::vector<double> grid_x(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i)
    grid_x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);

  const auto est = wickwz::kde_density(samples, h, std::move(grid_x), t, opt.threads);
  {
    auto os = open_out(cfg.out_dir, "density.csv");
    os << "t,x,p\n";
    char buf[96];
    for (std::size_t i = 0; i < est.grid_x.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", t, est.grid_x[i], est.density[i]);
      os << buf;
    }
  }
  ordered_json report;
  report["t"] = t;
  report["bandwidth"] = est.bandwidth;
  report["n_samples"] = est.n_samples;
  write_json_file(cfg.out_dir, "density_report.json", report);
  std::cout << "density: " << est.n_samples << " samples at t=" << t << ", bandwidth "
            << est.bandwidth << "\n";
  return kExitOk;
}

int cmd_fp(const CommonOptions& opt) {
  LoadedConfig cfg = parse_common(opt);
  const json block = cfg.raw.value("fp", json::object());
  const std::size_t r_points = block.value("r_points", std::size_t{65});
  const double eps = block.value("eps", 1e-3);
  const bool run_control = block.value("negative_control", true);

  std::vector<wickwz::TestFunction> bumps;
  if (block.contains("bumps")) {
    for (const json& b : block["bumps"])
      bumps.push_back(wickwz::make_bump(b.at("center_t").get<double>(),
                                        b.at("width_t").get<double>(),
                                        b.at("center_x").get<double>(),
                                        b.at("width_x").get<double>()));
  } else {
    bumps = {wickwz::make_bump(0.35, 0.30, 1.00, 0.60), wickwz::make_bump(0.50, 0.40, 0.80, 0.50),
             wickwz::make_bump(0.65, 0.30, 1.20, 0.70), wickwz::make_bump(0.45, 0.35, 1.50, 0.80),
             wickwz::make_bump(0.55, 0.40, 0.60, 0.40)};
  }

  const double T = cfg.partition->horizon();
  std::vector<double> r_grid;
  for (std::size_t i = 0; i < r_points; ++i) {
    const double r = cfg.model.s + (T - cfg.model.s) * static_cast<double>(i) /
                                       static_cast<double>(r_points);
    r_grid.push_back(r);
  }
  wickwz::EnsembleOptions eopt;
  eopt.grid = cfg.grid;
  eopt.deta_r_grid = r_grid;
  eopt.fd_eps = eps;
  eopt.threads = opt.threads;
  const auto run = wickwz::run_ensemble(cfg.partition, cfg.m, cfg.model, cfg.n_paths,
                                        cfg.master_seed, eopt);

  bool all_pass = true;
  ordered_json report;
  report["n_paths"] = run.n_paths;
  report["r_points"] = r_points;
  report["eps"] = eps;
  report["bumps"] = ordered_json::array();
  for (const auto& phi : bumps) {
    const auto res = wickwz::fp_residual(run, phi, false, opt.threads);
    all_pass = all_pass && res.pass;
    report["bumps"].push_back({{"id", res.test_function_id},
                               {"residual", res.residual},
                               {"std_error", res.std_error},
                               {"pass", res.pass}});
    std::cout << "fp: " << res.test_function_id << " residual " << res.residual << " (3SE "
              << 3.0 * res.std_error << ") " << (res.pass ? "pass" : "FAIL") << "\n";
  }
  if (run_control) {
    bool control_rejected = false;
    report["negative_control"] = ordered_json::array();
    for (const auto& phi : bumps) {
      const auto res = wickwz::fp_residual(run, phi, true, opt.threads);
      control_rejected = control_rejected || !res.pass;
      report["negative_control"].push_back({{"id", res.test_function_id},
                                            {"residual", res.residual},
                                            {"std_error", res.std_error},
                                            {"rejected", !res.pass}});
    }
    report["negative_control_rejected"] = control_rejected;
    std::cout << "fp: negative control " << (control_rejected ? "rejected (good)" : "NOT rejected")
              << "\n";
  }
  report["all_pass"] = all_pass;
  write_json_file(cfg.out_dir, "fp_report.json", report);
  return all_pass ? kExitOk : kExitStatFail;
}

int cmd_mean(const CommonOptions& opt) {
  LoadedConfig cfg = parse_common(opt);
  wickwz::EnsembleOptions eopt;
  eopt.grid = cfg.grid;
  eopt.record_bpoly = true;
  eopt.threads = opt.threads;
  const auto run = wickwz::run_ensemble(cfg.partition, cfg.m, cfg.model, cfg.n_paths,
                                        cfg.master_seed, eopt);
  const double x0 = cfg.model.init.amplitude();
  const auto rep = wickwz::mean_preservation(run, x0);
  ordered_json report;
  report["x0"] = x0;
  report["all_pass"] = rep.all_pass;
  report["low_power"] = rep.low_power;
  report["times"] = ordered_json::array();
  for (const auto& row : rep.rows) {
    ordered_json r = {{"t", row.t},   {"mean", row.mean},
                      {"se", row.se}, {"pass", row.pass}};
    if (rep.has_naive) {
      r["naive_mean"] = row.naive_mean;
      r["naive_ref"] = row.naive_ref;
      r["naive_outside_band"] = row.naive_outside_band;
    }
    report["times"].push_back(r);
  }
  write_json_file(cfg.out_dir, "mean_report.json", report);
  std::cout << "mean: " << (rep.all_pass ? "all times pass" : "FAIL") << "\n";
  return rep.all_pass ? kExitOk : kExitStatFail;
}

int cmd_convergence(const CommonOptions& opt) {
  LoadedConfig cfg = parse_common(opt);
  const json block = cfg.raw.value("convergence", json::object());
  std::vector<std::size_t> n_values;
  if (block.contains("n_values")) {
    n_values = block["n_values"].get<std::vector<std::size_t>>();
  } else {
    const std::size_t n_min = block.value("n_min", std::size_t{4});
    const std::size_t n_max = block.value("n_max", std::size_t{256});
    for (std::size_t n = n_min; n <= n_max; ++n) n_values.push_back(n);
  }
  const std::size_t n_seeds = block.value("n_seeds", std::size_t{200});
  const double lo = block.value("slope_min", 0.4);
  const double hi = block.value("slope_max", 0.55);
  std::vector<uint64_t> seeds(n_seeds);
  for (std::size_t i = 0; i < n_seeds; ++i) seeds[i] = wickwz::derive_seed(cfg.master_seed, i);

  const auto rep = wickwz::convergence_report(seeds, n_values, cfg.m,
                                              cfg.partition->horizon());
  const bool pass = rep.slope >= lo && rep.slope <= hi;
  {
    auto os = open_out(cfg.out_dir, "convergence.csv");
    os << "n,mesh,mean_sup_error\n";
    char buf[96];
    for (const auto& row : rep.rows) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", row.n, row.mesh, row.mean_sup_error);
      os << buf;
    }
  }
  ordered_json report;
  report["slope"] = rep.slope;
  report["slope_band"] = {lo, hi};
  report["n_seeds"] = n_seeds;
  report["pass"] = pass;
  write_json_file(cfg.out_dir, "convergence.json", report);
  std::cout << "convergence: slope " << rep.slope << " in [" << lo << ", " << hi << "] "
            << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kExitOk : kExitStatFail;
}

int cmd_gbm_demo(const CommonOptions& opt) {
  LoadedConfig cfg = parse_common(opt);
  const json block = cfg.raw.value("gbm_demo", json::object());
  const double s = block.value("s", 0.0);
  const std::size_t t_points = block.value("t_points", std::size_t{257});
  const double T = cfg.partition->horizon();
  std::vector<double> t_grid;
  for (std::size_t i = 0; i < t_points; ++i) {
    const double t = s + (T - s) * static_cast<double>(i) / static_cast<double>(t_points);
    if (t < T) t_grid.push_back(t);
  }
  const auto rep = wickwz::fp_operator_compare(*cfg.partition, s, t_grid);
  {
    auto os = open_out(cfg.out_dir, "gbm_demo.csv");
    os << "t,xi,running_avg\n";
    char buf[96];
    for (const auto& row : rep.rows) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", row.t, row.xi, row.running_avg);
      os << buf;
    }
    // Closing row at the horizon: left-limit sawtooth value and the exact
    // running average over [s, T], which is one half.
    const double closing_avg = wickwz::xi_integral(*cfg.partition, s, T) / (T - s);
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", T, 1.0, closing_avg);
    os << buf;
  }
  ordered_json report;
  report["sup_deviation"] = rep.sup_deviation;
  report["sup_deviation_grid"] = rep.sup_deviation_grid;
  report["breakpoint_running_avgs"] = rep.breakpoint_running_avgs;
  write_json_file(cfg.out_dir, "gbm_compare.json", report);
  std::cout << "gbm-demo: sup |xi - 1/2| = " << rep.sup_deviation
            << ", running averages at breakpoints all 1/2\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wick-type Wong-Zakai SDE simulation and verification"};
  app.require_subcommand(1);

  CommonOptions opt;
  uint64_t seed_value = 0;
  bool seed_set = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON config file")->required();
    sub->add_option("--out", opt.out_dir, "output directory (overrides config)");
    sub->add_option("--threads", opt.threads, "worker cap (0 = auto, env WICKWZ_THREADS)");
    sub->add_option("--seed", seed_value, "master seed override")->each([&](const std::string&) {
      seed_set = true;
    });
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run an ensemble, write run.json + trajectories.csv");
  CLI::App* check = app.add_subcommand("check-derivative", "closed-form vs FD derivative report");
  CLI::App* density = app.add_subcommand("density", "kernel density estimate of X_t");
  CLI::App* fp = app.add_subcommand("fp", "weak Fokker-Planck residual tests");
  CLI::App* mean = app.add_subcommand("mean", "mean preservation and the naive comparator");
  CLI::App* convergence = app.add_subcommand("convergence", "polygonal sup-error rate");
  CLI::App* gbm_demo = app.add_subcommand("gbm-demo", "xi sawtooth vs the exact coefficient 1/2");
  for (CLI::App* sub : {simulate, check, density, fp, mean, convergence, gbm_demo}) add_common(sub);

  CLI11_PARSE(app, argc, argv);
  if (seed_set) opt.seed_override = seed_value;

  try {
    if (simulate->parsed()) return cmd_simulate(opt);
    if (check->parsed()) return cmd_check_derivative(opt);
    if (density->parsed()) return cmd_density(opt);
    if (fp->parsed()) return cmd_fp(opt);
    if (mean->parsed()) return cmd_mean(opt);
    if (convergence->parsed()) return cmd_convergence(opt);
    if (gbm_demo->parsed()) return cmd_gbm_demo(opt);
  } catch (const wickwz::Error& e) {
    std::cerr << e.what() << "\n";
    if (e.code() == wickwz::Errc::non_finite_state) return kExitNonFinite;
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
