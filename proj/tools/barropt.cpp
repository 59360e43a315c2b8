// barropt: barrier-strategy solver CLI.
//
// Subcommands: scale, one-barrier, solve, verify, simulate, sweep.
// Exit codes: 0 success, 1 verification failed, 2 input error,
// 3 convergence error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "barropt/hjb.hpp"
#include "barropt/io.hpp"
#include "barropt/mc.hpp"
#include "barropt/multibarrier.hpp"
#include "barropt/one_barrier.hpp"

namespace {

using namespace barropt;

bool g_quiet = false;

void note(const std::string& s) {
  if (!g_quiet) std::cerr << s << "\n";
}

int cmd_scale(const std::string& model_path, const std::string& grid_spec,
              const std::string& out_path) {
  const auto model = io::load_model(model_path);
  const ScaleFunctions sf(model);
  const auto grid = io::parse_grid(grid_spec);
  nlohmann::json cfg{{"model", io::model_to_json(model)}, {"grid", grid_spec}};
  io::CsvWriter csv(out_path, "scale", cfg, {"x", "W", "W1", "W2", "Z"});
  for (double x : io::grid_points(grid))
    csv.row({x, sf.w(x), sf.w1(x), sf.w2(x), sf.z(x)});
  note("wrote " + out_path);
  return 0;
}

int cmd_one_barrier(const std::string& model_path, const std::string& reward_path,
                    double upper, const std::string& out_path,
                    std::string diag_path) {
  const auto model = io::load_model(model_path);
  const auto reward = io::load_reward(reward_path);
  const ScaleFunctions sf(model);
  OneBarrierOptions opts;
  opts.upper = upper;
  const auto sol = find_bstar(sf, reward, opts);
  if (diag_path.empty()) diag_path = out_path + ".diag.csv";
  nlohmann::json cfg{{"model", io::model_to_json(model)},
                     {"reward", io::reward_to_json(reward)},
                     {"upper", upper}};
  io::CsvWriter csv(diag_path, "one-barrier", cfg, {"u", "F", "Fprime"});
  for (const auto& p : sol.diagnostics) csv.row({p.u, p.f, p.df});
  auto j = io::result_envelope("one-barrier", cfg);
  j["bstar"] = sol.bstar;
  j["Fmax"] = sol.fmax;
  j["decrF1_holds"] = sol.decr_f1_holds;
  j["search_upper"] = sol.search_upper;
  j["growth_warning"] = sol.growth_warning;
  j["diagnostics_csv"] = diag_path;
  io::write_json_file(out_path, j);
  note("b* = " + io::fmt17(sol.bstar) + ", wrote " + out_path);
  return 0;
}

int cmd_solve(const std::string& model_path, const std::string& reward_path,
              int max_barriers, double upper, const std::string& out_path,
              const std::string& trace_path) {
  const auto model = io::load_model(model_path);
  const auto reward = io::load_reward(reward_path);
  const ScaleFunctions sf(model);
  MultibarrierOptions opts;
  opts.max_barriers = max_barriers;
  opts.upper = upper;
  nlohmann::json cfg{{"model", io::model_to_json(model)},
                     {"reward", io::reward_to_json(reward)},
                     {"max_barriers", max_barriers},
                     {"upper", upper}};

  MultibarrierSolution sol;
  if (!trace_path.empty()) {
    io::CsvWriter trace(trace_path, "solve", cfg,
                        {"stage", "k", "v", "z", "F", "genH"});
    sol = solve(sf, reward, opts, [&](const TraceRow& row) {
      trace.raw_row(row.stage + "," + std::to_string(row.k) + "," +
                    io::fmt17(row.v) + "," + io::fmt17(row.z) + "," +
                    io::fmt17(row.f) + "," + io::fmt17(row.gen_h));
    });
  } else {
    sol = solve(sf, reward, opts);
  }

  auto j = io::result_envelope("solve", cfg);
  j["barriers"] = sol.barriers;
  j["c_points"] = sol.c_points;
  j["n"] = sol.n;
  j["stopped_reason"] = stop_reason_name(sol.stopped_reason);
  j["partial"] = sol.partial;
  j["search_upper"] = sol.search_upper;
  j["bstar"] = sol.one_barrier.bstar;
  j["decrF1_holds"] = sol.one_barrier.decr_f1_holds;
  j["warnings"] = sol.warnings;
  io::write_json_file(out_path, j);
  std::string levels;
  for (double b : sol.barriers) levels += (levels.empty() ? "" : ", ") + io::fmt17(b);
  note("barriers: {" + levels + "}, wrote " + out_path);
  return 0;
}

int cmd_verify(const std::string& model_path, const std::string& reward_path,
               const std::string& barrier_list, double tol,
               const std::string& out_path, const std::string& csv_path) {
  const auto model = io::load_model(model_path);
  const auto reward = io::load_reward(reward_path);
  const ScaleFunctions sf(model);
  const BarrierSet bset(sf, reward, io::parse_number_list(barrier_list));
  const ValueFunction vf(sf, reward, bset);
  HjbGridSpec spec;
  spec.tol = tol;
  const auto rep = check_hjb(vf, spec);

  nlohmann::json cfg{{"model", io::model_to_json(model)},
                     {"reward", io::reward_to_json(reward)},
                     {"barriers", bset.levels()},
                     {"tol", tol}};
  if (!csv_path.empty()) {
    io::CsvWriter csv(csv_path, "verify", cfg, {"x", "genV", "g_minus_Vprime"});
    for (std::size_t i = 0; i < rep.grid.size(); ++i)
      csv.row({rep.grid[i], rep.residual_gen[i], rep.residual_grad[i]});
  }
  auto j = io::result_envelope("verify", cfg);
  j["pass"] = rep.pass;
  j["tol"] = rep.tol;
  j["max_violation_gen"] = rep.max_violation_gen;
  j["max_violation_grad"] = rep.max_violation_grad;
  j["warnings"] = rep.warnings;
  auto pj = nlohmann::json::array();
  for (const auto& g : rep.pasting)
    pj.push_back({{"barrier", g.barrier},
                  {"even", g.even},
                  {"v_gap", g.v_gap},
                  {"v1_gap", g.v1_gap},
                  {"v2_gap", g.v2_gap},
                  {"ok", g.ok}});
  j["pasting"] = pj;
  io::write_json_file(out_path, j);
  note(std::string("verify: ") + (rep.pass ? "pass" : "FAIL") + ", wrote " +
       out_path);
  return rep.pass ? 0 : 1;
}

int cmd_simulate(const std::string& model_path, const std::string& reward_path,
                 const std::string& barrier_list, const SimConfig& cfg_in,
                 long trace_n, const std::string& trace_out,
                 const std::string& out_path) {
  const auto model = io::load_model(model_path);
  const auto reward = io::load_reward(reward_path);
  const auto barriers = io::parse_number_list(barrier_list);
  const auto est = simulate_value(model, reward, barriers, cfg_in);

  nlohmann::json cfg{{"model", io::model_to_json(model)},
                     {"reward", io::reward_to_json(reward)},
                     {"barriers", barriers},
                     {"x0", cfg_in.x0},
                     {"paths", cfg_in.n_paths},
                     {"dt", cfg_in.dt},
                     {"horizon", cfg_in.horizon},
                     {"seed", cfg_in.seed},
                     {"antithetic", cfg_in.antithetic},
                     {"bridge_hit", cfg_in.bridge_hit},
                     {"exact_reflection", cfg_in.exact_reflection}};
  auto j = io::result_envelope("simulate", cfg);
  j["mean"] = est.mean;
  j["stderr"] = est.stderr_;
  j["n_ruined"] = est.n_ruined;
  j["n_paths"] = est.n_paths;
  j["truncation_bound"] = est.truncation_bound;
  io::write_json_file(out_path, j);

  if (trace_n > 0) {
    const auto rows = simulate_paths(model, reward, barriers, cfg_in, trace_n);
    io::CsvWriter csv(trace_out.empty() ? out_path + ".paths.csv" : trace_out,
                      "simulate", cfg, {"path", "t", "X", "L", "regime", "reward"});
    for (const auto& r : rows)
      csv.raw_row(std::to_string(r.path) + "," + io::fmt17(r.t) + "," +
                  io::fmt17(r.x) + "," + io::fmt17(r.l) + "," +
                  std::to_string(r.regime) + "," + io::fmt17(r.reward));
  }
  note("mean = " + io::fmt17(est.mean) + " +- " + io::fmt17(est.stderr_) +
       ", wrote " + out_path);
  return 0;
}

int cmd_sweep(const std::string& model_path, const std::string& reward_path,
              const std::string& barrier_list, const std::string& v_spec,
              const std::string& z_spec, double upper,
              const std::string& out_path, const std::string& zcurve_path) {
  const auto model = io::load_model(model_path);
  const auto reward = io::load_reward(reward_path);
  const ScaleFunctions sf(model);
  const BarrierSet bset(sf, reward, io::parse_number_list(barrier_list));
  const std::size_t level = bset.n_pairs();
  const auto vg = io::parse_grid(v_spec);
  const auto zg = io::parse_grid(z_spec);
  const double u = upper > 0.0 ? upper : default_search_upper(sf);

  nlohmann::json cfg{{"model", io::model_to_json(model)},
                     {"reward", io::reward_to_json(reward)},
                     {"barriers", bset.levels()},
                     {"v", v_spec},
                     {"z", z_spec}};
  io::CsvWriter surf(out_path, "sweep", cfg, {"v", "z", "F", "dFdz"});
  for (double v : io::grid_points(vg)) {
    if (v < bset.top()) continue;
    for (double z : io::grid_points(zg)) {
      if (z <= v) continue;
      const auto s = f_surface(sf, reward, bset, level, v, z);
      surf.row({v, z, s.value, s.dz});
    }
  }
  if (!zcurve_path.empty()) {
    io::CsvWriter zc(zcurve_path, "sweep", cfg, {"v", "z_of_v", "F", "interior"});
    for (double v : io::grid_points(vg)) {
      if (v < bset.top()) continue;
      const auto zv = z_of_v(sf, reward, bset, level, v, u);
      zc.row({v, zv.z, zv.fmax, zv.interior ? 1.0 : 0.0});
    }
  }
  note("wrote " + out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"barrier-strategy solver for state-dependent reward control"};
  app.require_subcommand(1);
  int threads = int(std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "worker threads (speed only)");
  app.add_flag("--quiet", g_quiet, "suppress progress notes");

  std::string model_path, reward_path, out_path, diag_path, trace_path;
  std::string barrier_list, grid_spec, v_spec, z_spec, trace_out, zcurve_path;
  double upper = 0.0, tol = 0.0;
  int max_barriers = 21;
  long trace_n = 0;
  SimConfig sim;

  auto* scale = app.add_subcommand("scale", "tabulate W, W', W'', Z");
  scale->add_option("--model", model_path)->required();
  scale->add_option("--grid", grid_spec, "start:stop:step")->required();
  scale->add_option("--out", out_path)->required();

  auto* oneb = app.add_subcommand("one-barrier", "optimal one-barrier threshold");
  oneb->add_option("--model", model_path)->required();
  oneb->add_option("--reward", reward_path)->required();
  oneb->add_option("--upper", upper);
  oneb->add_option("--out", out_path)->required();
  oneb->add_option("--diag", diag_path, "diagnostic grid CSV (default <out>.diag.csv)");

  auto* solve_cmd = app.add_subcommand("solve", "multibarrier solver");
  solve_cmd->add_option("--model", model_path)->required();
  solve_cmd->add_option("--reward", reward_path)->required();
  solve_cmd->add_option("--max-barriers", max_barriers);
  solve_cmd->add_option("--upper", upper);
  solve_cmd->add_option("--out", out_path)->required();
  solve_cmd->add_option("--trace", trace_path, "stage trace CSV");

  auto* verify = app.add_subcommand("verify", "HJB + smooth-pasting check");
  verify->add_option("--model", model_path)->required();
  verify->add_option("--reward", reward_path)->required();
  verify->add_option("--barriers", barrier_list, "comma list b1,b2,...")->required();
  verify->add_option("--tol", tol, "override verification tolerance");
  verify->add_option("--out", out_path)->required();
  verify->add_option("--csv", diag_path, "residual curves CSV");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate");
  simulate->add_option("--model", model_path)->required();
  simulate->add_option("--reward", reward_path)->required();
  simulate->add_option("--barriers", barrier_list)->required();
  simulate->add_option("--x0", sim.x0)->required();
  simulate->add_option("--paths", sim.n_paths);
  simulate->add_option("--dt", sim.dt);
  simulate->add_option("--horizon", sim.horizon);
  simulate->add_option("--seed", sim.seed);
  simulate->add_flag("--antithetic", sim.antithetic);
  bool no_bridge = false, plain_reflection = false;
  simulate->add_flag("--no-bridge-hit", no_bridge,
                     "disable the bridge hitting correction");
  simulate->add_flag("--plain-reflection", plain_reflection,
                     "endpoint Skorokhod reflection instead of in-step maximum");
  simulate->add_option("--trace", trace_n, "trace the first N paths");
  simulate->add_option("--trace-out", trace_out);
  simulate->add_option("--out", out_path)->required();

  auto* sweep = app.add_subcommand("sweep", "F(v, z; b) surface and z(v) curve");
  sweep->add_option("--model", model_path)->required();
  sweep->add_option("--reward", reward_path)->required();
  sweep->add_option("--barriers", barrier_list, "odd prefix b_1..b_{2k+1}")->required();
  sweep->add_option("--v", v_spec, "start:stop:step")->required();
  sweep->add_option("--z", z_spec, "start:stop:step")->required();
  sweep->add_option("--upper", upper);
  sweep->add_option("--out", out_path)->required();
  sweep->add_option("--zcurve", zcurve_path, "z(v) curve CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scale) return cmd_scale(model_path, grid_spec, out_path);
    if (*oneb) return cmd_one_barrier(model_path, reward_path, upper, out_path, diag_path);
    if (*solve_cmd)
      return cmd_solve(model_path, reward_path, max_barriers, upper, out_path,
                       trace_path);
    if (*verify)
      return cmd_verify(model_path, reward_path, barrier_list, tol, out_path,
                        diag_path);
    if (*simulate) {
      sim.threads = std::max(1, threads);
      sim.bridge_hit = !no_bridge;
      sim.exact_reflection = !plain_reflection;
      return cmd_simulate(model_path, reward_path, barrier_list, sim, trace_n,
                          trace_out, out_path);
    }
    if (*sweep)
      return cmd_sweep(model_path, reward_path, barrier_list, v_spec, z_spec,
                       upper, out_path, zcurve_path);
  } catch (const barropt::ConfigError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const barropt::ConvergenceFailure& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
