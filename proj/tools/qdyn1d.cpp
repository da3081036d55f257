// qdyn1d - experiment runner for one-dimensional discrete Schrodinger
// operators: transfer-matrix growth scans, hierarchical trace maps, Abel-
// averaged transport, Prufer stability traces, Sturmian continued fractions.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "qdyn1d/cfrac.hpp"
#include "qdyn1d/checks.hpp"
#include "qdyn1d/csv.hpp"
#include "qdyn1d/dynamics.hpp"
#include "qdyn1d/json_io.hpp"
#include "qdyn1d/parallel.hpp"
#include "qdyn1d/perturb.hpp"
#include "qdyn1d/potentials.hpp"
#include "qdyn1d/tracemap.hpp"
#include "qdyn1d/transfer.hpp"
#include "qdyn1d/version.hpp"

namespace {

using nlohmann::json;
using namespace qdyn1d;

struct RunContext {
  json config = json::object();  // resolved configuration (echoed into the manifest)
  std::string out_prefix = "qdyn1d-out/";
  int threads = 0;
  std::uint64_t seed = 1;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::vector<std::string> outputs;
  json diagnostics = json::object();

  std::string path(const std::string& name) {
    std::filesystem::path p(out_prefix + name);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    outputs.push_back(p.string());
    return p.string();
  }

  void write_manifest(const std::string& command) {
    json m;
    m["tool"] = "qdyn1d";
    m["version"] = kVersion;
    m["command"] = command;
    m["config"] = config;
    m["seed"] = seed;
    m["threads"] = resolve_threads(threads);
    m["outputs"] = outputs;
    m["diagnostics"] = diagnostics;
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::filesystem::path p(out_prefix + "manifest.json");
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    out << m.dump(2) << "\n";
  }
};

json load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in '" + file + "': " + e.what());
  }
  return j;
}

void check_config_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown config key '" + where + "." + it.key() + "'");
  }
}

// params.<key> lookup helpers: CLI flags override config values.
template <typename T>
T param(const json& cfg, const std::string& key, T fallback) {
  if (cfg.contains("params") && cfg["params"].contains(key))
    return cfg["params"][key].get<T>();
  return fallback;
}

std::vector<double> grid_from_json(const json& g) {
  if (g.is_array()) return g.get<std::vector<double>>();
  check_config_keys(g, {"lo", "hi", "points", "scale"}, "grid");
  const double lo = g.at("lo").get<double>();
  const double hi = g.at("hi").get<double>();
  const int points = g.value("points", 8);
  const std::string scale = g.value("scale", "geometric");
  if (points < 1) throw ConfigError("grid.points must be >= 1");
  std::vector<double> out;
  for (int i = 0; i < points; ++i) {
    const double s = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    out.push_back(scale == "geometric" ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s);
  }
  return out;
}

PotentialSpec spec_from_context(const json& cfg, const std::string& model_flag) {
  if (!model_flag.empty()) {
    PotentialSpec spec;
    if (model_flag == "period-doubling" || model_flag == "pd") {
      spec.family = Family::Substitution;
      spec.rule = period_doubling_rule();
    } else if (model_flag == "fibonacci") {
      spec.family = Family::Substitution;
      spec.rule = fibonacci_rule();
    } else if (model_flag == "thue-morse") {
      spec.family = Family::Substitution;
      spec.rule = thue_morse_rule();
    } else if (model_flag == "s3") {
      spec.family = Family::Substitution;
      spec.rule = even_block_rule(1, 1);
    } else if (model_flag == "prime") {
      spec.family = Family::Prime;
    } else if (model_flag == "sparse") {
      spec.family = Family::Sparse;
    } else if (model_flag == "hierarchical") {
      spec.family = Family::Hierarchical;
    } else if (model_flag == "sturmian") {
      spec.family = Family::Sturmian;
    } else if (model_flag == "free") {
      spec.family = Family::Explicit;
      spec.explicit_values.clear();  // synthesized to V = 0 on demand below
    } else {
      throw ConfigError("unknown --model '" + model_flag + "'");
    }
    // Parameters from config still apply on top of a named model.
    if (cfg.contains("potential")) {
      json merged = cfg["potential"];
      merged.erase("family");
      merged.erase("rule");
      PotentialSpec from_cfg = spec_from_json(merged);
      from_cfg.family = spec.family;
      from_cfg.rule = spec.rule;
      if (spec.family == Family::Explicit) from_cfg.explicit_values = spec.explicit_values;
      return from_cfg;
    }
    return spec;
  }
  if (!cfg.contains("potential"))
    throw ConfigError("missing 'potential' (or --model) for this experiment");
  return spec_from_json(cfg["potential"]);
}

PotentialSamples realize_for_sites(PotentialSpec spec, index_t n_max) {
  // The named "free" model is an empty explicit spec: synthesize V = 0 here.
  // User-supplied explicit potentials are never padded; a short list fails
  // the window check in realize().
  if (spec.family == Family::Explicit && spec.explicit_values.empty()) {
    spec.explicit_lo = 0;
    spec.explicit_values.assign(static_cast<size_t>(n_max) + 1, 0.0);
  }
  return realize(spec, {0, n_max});
}

void dump_potential_csv(RunContext& ctx, const PotentialSamples& v, const std::string& name) {
  CsvWriter csv(ctx.path(name), {"n", "V"});
  for (index_t n = v.window.lo; n <= v.window.hi; ++n) csv.row({n, v[n]});
}

// ---------------------------------------------------------------------------

int cmd_transfer_scan(RunContext& ctx, const std::string& model) {
  const json& cfg = ctx.config;
  const auto n_max = param<index_t>(cfg, "n_max", index_t{1} << 16);
  const std::string norm_name = param<std::string>(cfg, "norm", "op");
  const NormKind norm = norm_name == "hs" ? NormKind::HilbertSchmidt : NormKind::Operator;
  PotentialSpec spec = spec_from_context(cfg, model);

  std::vector<double> energies;
  if (cfg.contains("params") && cfg["params"].contains("energies") &&
      cfg["params"]["energies"].is_string()) {
    for (const SpecialEnergy& se : special_energies(spec)) energies.push_back(se.energy);
  } else if (cfg.contains("params") && cfg["params"].contains("energies")) {
    energies = grid_from_json(cfg["params"]["energies"]);
  } else {
    for (const SpecialEnergy& se : special_energies(spec)) energies.push_back(se.energy);
  }

  const PotentialSamples v = realize_for_sites(spec, n_max);
  if (param<bool>(cfg, "dump_potential", false)) dump_potential_csv(ctx, v, "potential.csv");

  const std::vector<ScanRow> rows = energy_scan(v, energies, n_max, norm, ctx.threads);
  CsvWriter csv(ctx.path("scan.csv"),
                {"E", "alpha_hat", "C_hat", "residual", "n_max", "norm_kind", "ok", "error"});
  for (const ScanRow& row : rows)
    csv.row({row.energy, row.fit.alpha_hat, row.fit.c_hat, row.fit.residual, n_max,
             norm_name, row.ok ? 1 : 0, row.error});
  ctx.diagnostics["rows"] = rows.size();
  ctx.write_manifest("transfer-scan");
  return 0;
}

int cmd_tracemap(RunContext& ctx) {
  const json& cfg = ctx.config;
  const int m = param<int>(cfg, "m", 3);
  const double lambda = param<double>(cfg, "lambda", 1.0);
  const double ratio = param<double>(cfg, "R", 1.0);
  const double tol = param<double>(cfg, "tol", 1e-12);

  const GapEdgeSet set = gap_edge_energies(m, lambda, ratio, tol);
  CsvWriter csv(ctx.path("gap-edges.csv"),
                {"m", "k", "E_mk", "x_m", "x_m_plus_1", "cascade_defect"});
  for (size_t k = 0; k < set.energies.size(); ++k) {
    const TraceOrbit orbit = trace_orbit(set.energies[k], lambda, ratio, m + 5);
    double defect = std::abs(orbit.x_double(m + 1) + 2.0);
    for (int l = 2; l <= 5 && m + l < static_cast<int>(orbit.x.size()); ++l)
      defect = std::max(defect, std::abs(orbit.x_double(m + l) - 2.0));
    csv.row({m, static_cast<std::int64_t>(k + 1), set.energies[k],
             m == 0 ? set.energies[k] : orbit.x_double(m), orbit.x_double(m + 1), defect});
  }

  if (cfg.contains("params") && cfg["params"].contains("orbit_E")) {
    const double e0 = cfg["params"]["orbit_E"].get<double>();
    const int m_max = param<int>(cfg, "m_max", 20);
    const TraceOrbit orbit = trace_orbit(e0, lambda, ratio, m_max);
    CsvWriter ocsv(ctx.path("orbit.csv"), {"m", "x", "log2_abs_x", "sign"});
    for (size_t i = 0; i < orbit.x.size(); ++i)
      ocsv.row({static_cast<std::int64_t>(i), orbit.x[i].to_double(), orbit.x[i].log2_abs(),
                orbit.x[i].sign()});
    ctx.diagnostics["orbit_saturated"] = orbit.saturated;
  }

  ctx.diagnostics["edges"] = set.energies.size();
  ctx.write_manifest("tracemap");
  return 0;
}

int cmd_dynamics(RunContext& ctx, const std::string& model) {
  const json& cfg = ctx.config;
  const auto L = param<index_t>(cfg, "L", 1000);
  const double alpha = param<double>(cfg, "alpha", 0.0);
  const std::string geom_name = param<std::string>(cfg, "geometry", "half-line");
  const Geometry geom = geom_name == "whole-line" ? Geometry::WholeLine : Geometry::HalfLine;

  std::vector<double> t_grid = {10, 19, 36, 67, 126, 200};
  if (cfg.contains("params") && cfg["params"].contains("T_grid"))
    t_grid = grid_from_json(cfg["params"]["T_grid"]);
  std::vector<double> p_list = {2.0};
  if (cfg.contains("params") && cfg["params"].contains("p_list"))
    p_list = cfg["params"]["p_list"].get<std::vector<double>>();

  PotentialSpec spec = spec_from_context(cfg, model);
  spec.geometry = geom;
  PotentialSamples v;
  if (geom == Geometry::HalfLine) {
    v = realize_for_sites(spec, L);
  } else {
    if (spec.family == Family::Explicit && spec.explicit_values.empty()) {
      spec.explicit_lo = -L;
      spec.explicit_values.assign(static_cast<size_t>(2 * L) + 1, 0.0);
    }
    v = realize(spec, {-L, L});
  }
  if (param<bool>(cfg, "dump_potential", false)) dump_potential_csv(ctx, v, "potential.csv");

  const LatticeOperator op = build_operator(v, geom, L);
  const EigenData eig = diagonalize(op);
  const DynamicsReport rep = dynamics_report(eig, op, t_grid, p_list, alpha, ctx.threads);

  CsvWriter mcsv(ctx.path("moments.csv"), {"T", "p", "moment", "P_T", "beta_running"});
  for (size_t ip = 0; ip < p_list.size(); ++ip) {
    double prev_log_m = 0.0, prev_log_t = 0.0;
    bool have_prev = false;
    for (const DynamicsRow& row : rep.rows) {
      double beta_running = std::numeric_limits<double>::quiet_NaN();
      if (row.guard_ok) {
        const double lm = std::log(row.moments[ip]), lt = std::log(row.T);
        if (have_prev) beta_running = (lm - prev_log_m) / (lt - prev_log_t);
        prev_log_m = lm;
        prev_log_t = lt;
        have_prev = true;
      }
      mcsv.row({row.T, p_list[ip], row.moments[ip], row.p_t, beta_running});
    }
  }

  if (param<bool>(cfg, "amplitudes", false)) {
    CsvWriter acsv(ctx.path("amplitudes.csv"), {"n", "T", "a"});
    for (const DynamicsRow& row : rep.rows) {
      const std::vector<double> a = abel_amplitudes(eig, row.T);
      for (index_t i = 0; i < op.size(); ++i) acsv.row({op.site_of(i), row.T, a[static_cast<size_t>(i)]});
    }
  }

  json summary;
  summary["alpha"] = alpha;
  summary["L"] = L;
  summary["geometry"] = geom_name;
  summary["guards"] = json::array();
  for (const DynamicsRow& row : rep.rows)
    summary["guards"].push_back({{"T", row.T},
                                 {"guard_ok", row.guard_ok},
                                 {"boundary_mass", row.boundary},
                                 {"total_mass", row.total_mass},
                                 {"N_T", row.n_of_t}});
  summary["fits"] = json::array();
  for (const TransportFit& fit : rep.fits)
    summary["fits"].push_back({{"p", fit.p},
                               {"beta_hat", fit.beta_hat},
                               {"beta_liminf", fit.beta_liminf},
                               {"flagged", fit.flagged},
                               {"used", fit.used}});

  if (cfg.contains("params") && cfg["params"].contains("harness")) {
    const json& h = cfg["params"]["harness"];
    check_config_keys(h, {"E0", "p", "alpha"}, "params.harness");
    const double e0 = h.value("E0", 0.0);
    const double hp = h.value("p", 6.0);
    const double ha = h.value("alpha", alpha);
    const std::vector<HarnessRow> rows = bound_scaling_harness(eig, op, ha, hp, e0, t_grid, ctx.threads);
    CsvWriter hcsv(ctx.path("harness.csv"), {"T", "lhs", "rhs", "ratio", "mu_window", "guard_ok"});
    for (const HarnessRow& row : rows)
      hcsv.row({row.T, row.lhs, row.rhs, row.ratio, row.mu_window, row.guard_ok ? 1 : 0});
  }

  std::ofstream sj(ctx.path("summary.json"));
  sj << summary.dump(2) << "\n";
  ctx.diagnostics["guards"] = summary["guards"];
  ctx.write_manifest("dynamics");
  return 0;
}

int cmd_perturb(RunContext& ctx, const std::string& model) {
  const json& cfg = ctx.config;
  const auto n_max = param<index_t>(cfg, "n_max", index_t{1} << 14);
  const auto n_fit = param<index_t>(cfg, "n_fit", index_t{1} << 16);
  const double e0 = param<double>(cfg, "E0", 0.0);

  PerturbationSpec w_spec;
  w_spec.c2 = param<double>(cfg, "c2", 1.0);
  w_spec.decay = param<double>(cfg, "decay", 4.0);
  w_spec.seed = ctx.seed;
  const std::string pattern = param<std::string>(cfg, "pattern", "deterministic");
  if (pattern == "alternating")
    w_spec.pattern = SignPattern::Alternating;
  else if (pattern == "random")
    w_spec.pattern = SignPattern::SeededRandom;
  else if (pattern != "deterministic")
    throw ConfigError("unknown pattern '" + pattern + "'");
  w_spec.support_cutoff = param<index_t>(cfg, "support_cutoff", -1);

  PotentialSpec spec = spec_from_context(cfg, model);
  const index_t top = std::max(n_max, n_fit);
  const PotentialSamples v = realize_for_sites(spec, top);
  const PotentialSamples w = make_perturbation(w_spec, {0, top});

  const PruferPair pair = prufer_trace(v, w, e0, n_max);
  CsvWriter csv(ctx.path("prufer.csv"), {"n", "R", "U", "theta", "residual", "solution"});
  for (size_t i = 0; i < pair.dirichlet.r.size(); ++i)
    csv.row({static_cast<std::int64_t>(i + 1), pair.dirichlet.r[i], pair.dirichlet.u[i],
             pair.dirichlet.theta[i], pair.dirichlet.residual[i], "D"});
  for (size_t i = 0; i < pair.neumann.r.size(); ++i)
    csv.row({static_cast<std::int64_t>(i + 1), pair.neumann.r[i], pair.neumann.u[i],
             pair.neumann.theta[i], pair.neumann.residual[i], "N"});

  const StabilityReport rep = stability_check(v, w, e0, n_fit, &w_spec);
  json out;
  out["omega"] = pair.omega;
  out["max_residual"] =
      std::max(pair.dirichlet.max_residual, pair.neumann.max_residual);
  out["max_r_ratio"] = std::max(pair.dirichlet.max_r_ratio, pair.neumann.max_r_ratio);
  out["alpha_unperturbed"] = rep.unperturbed.alpha_hat;
  out["alpha_perturbed"] = rep.perturbed.alpha_hat;
  out["delta_alpha"] = rep.delta_alpha;
  out["within_hypothesis"] = rep.within_hypothesis;
  std::ofstream sj(ctx.path("stability.json"));
  sj << out.dump(2) << "\n";
  ctx.diagnostics = out;
  ctx.write_manifest("perturb");
  return 0;
}

int cmd_sturmian(RunContext& ctx) {
  const json& cfg = ctx.config;
  const int depth = param<int>(cfg, "depth", 200);
  const double lambda = param<double>(cfg, "lambda", 1.0);
  const double universal_d = param<double>(cfg, "D", 1.0);

  RotationNumber omega = RotationNumber::golden_mean();
  if (cfg.contains("potential") && cfg["potential"].contains("omega")) {
    PotentialSpec spec = spec_from_json(cfg["potential"]);
    omega = spec.omega;
  }

  const CFExpansion exp = cf_expand(omega, depth);
  const std::vector<Convergent> conv = convergents(exp);
  const BoundedDensity bd = bounded_density(exp);
  const SturmianExponent se = sturmian_alpha(lambda, exp, universal_d);

  CsvWriter csv(ctx.path("cf.csv"), {"k", "a_k", "p_k", "q_k", "running_avg"});
  for (size_t k = 0; k < exp.a.size(); ++k)
    csv.row({static_cast<std::int64_t>(k + 1), exp.a[k], conv[k + 1].p.to_string(),
             conv[k + 1].q.to_string(), bd.running[k]});

  json out;
  out["exact"] = exp.exact;
  out["truncated"] = exp.truncated;
  out["depth"] = exp.depth();
  out["d_hat"] = bd.d_hat;
  out["lambda"] = lambda;
  out["C_lambda"] = se.c_lambda;
  out["D"] = universal_d;
  out["alpha"] = se.alpha;
  std::ofstream sj(ctx.path("sturmian.json"));
  sj << out.dump(2) << "\n";
  ctx.diagnostics = out;
  ctx.write_manifest("sturmian");
  return 0;
}

int cmd_structure_check(RunContext& ctx, const std::string& model) {
  const json& cfg = ctx.config;
  const auto length = param<index_t>(cfg, "length", 10000);
  const auto from = param<index_t>(cfg, "from", 1);
  const int k = param<int>(cfg, "k", 3);
  const std::string cond_name = param<std::string>(cfg, "condition", "S1");

  StructureCondition cond;
  if (cond_name == "S1")
    cond = StructureCondition::S1;
  else if (cond_name == "S2")
    cond = StructureCondition::S2;
  else if (cond_name == "S3")
    cond = StructureCondition::S3;
  else if (cond_name == "S4")
    cond = StructureCondition::S4;
  else
    throw ConfigError("unknown condition '" + cond_name + "'");

  std::string word;
  if (cfg.contains("params") && cfg["params"].contains("word")) {
    word = cfg["params"]["word"].get<std::string>();
  } else {
    PotentialSpec spec = spec_from_context(cfg, model);
    if (spec.family == Family::Substitution) {
      word = subst_fixed_point(spec.rule, length);
    } else {
      PotentialSpec probe = spec;
      probe.level_a = 0;
      probe.level_b = 1;
      const PotentialSamples v = realize(probe, {1, length});
      for (index_t n = 1; n <= length; ++n) word += v[n] == 0.0 ? 'a' : 'b';
    }
  }

  const StructureReport rep = check_structure(word, cond, from, k);
  json out;
  out["condition"] = cond_name;
  out["from"] = from;
  out["length"] = static_cast<index_t>(word.size());
  out["holds"] = rep.holds;
  out["first_violation"] = rep.first_violation;
  std::cout << out.dump(2) << "\n";
  ctx.diagnostics = out;
  ctx.write_manifest("structure-check");
  return 0;
}

int cmd_verify(const std::string& suite) {
  std::vector<CheckResult> results;
  if (suite == "identities")
    results = run_identity_checks();
  else if (suite == "oracles")
    results = run_oracle_checks();
  else if (suite == "bounds")
    results = run_bound_checks();
  else if (suite == "all")
    results = run_acceptance();
  else
    throw ConfigError("unknown suite '" + suite + "' (identities|oracles|bounds|all)");

  bool all_pass = true;
  for (const CheckResult& r : results) {
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.id << "  " << r.name << "  [" << r.details
              << "]  (" << format_double(r.seconds) << " s)\n";
  }
  std::cout << (all_pass ? "ALL CHECKS PASSED" : "CHECK FAILURES PRESENT") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdyn1d: transfer-matrix growth and quantum transport experiments "
               "for 1D discrete Schrodinger operators"};
  app.set_version_flag("--version", qdyn1d::kVersion);
  app.require_subcommand(1);

  std::string config_file, model, out_prefix, suite = "all";
  int threads = 0;
  std::uint64_t seed = 1;
  bool have_threads_flag = false, have_seed_flag = false;

  auto add_common = [&](CLI::App* sub, bool with_model = true) {
    sub->add_option("--config", config_file, "JSON configuration file");
    sub->add_option("--out", out_prefix, "output path prefix");
    sub->add_option("--threads", threads, "parallel workers (0 = auto / QDYN1D_THREADS)")
        ->each([&](const std::string&) { have_threads_flag = true; });
    sub->add_option("--seed", seed, "random seed for seeded components")
        ->each([&](const std::string&) { have_seed_flag = true; });
    if (with_model)
      sub->add_option("--model", model,
                      "named model: pd|period-doubling|fibonacci|thue-morse|s3|prime|sparse|"
                      "hierarchical|sturmian|free");
    return sub;
  };

  // Per-command flags land in an override map applied onto config["params"]
  // after parsing (flags win over config). The each() hook sees the raw
  // token, which is parsed here directly.
  nlohmann::json flag_params = nlohmann::json::object();
  auto opt_num = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                     const std::string& help) {
    sub->add_option_function<double>(
           flag, [&flag_params, key](const double& v) { flag_params[key] = v; }, help)
        ->expected(1);
  };
  auto opt_str = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                     const std::string& help) {
    sub->add_option_function<std::string>(
           flag, [&flag_params, key](const std::string& v) { flag_params[key] = v; }, help)
        ->expected(1);
  };

  CLI::App* scan = add_common(app.add_subcommand("transfer-scan", "norm-growth power-law fits"));
  opt_num(scan, "--n-max", "n_max", "profile length");
  opt_str(scan, "--norm", "norm", "op|hs");
  opt_str(scan, "--energies", "energies_list", "comma list of energies (default: special)");

  CLI::App* tm = add_common(app.add_subcommand("tracemap", "gap-edge energies and trace orbits"), false);
  opt_num(tm, "--m", "m", "trace level");
  opt_num(tm, "--lambda", "lambda", "coupling");
  opt_num(tm, "--R", "R", "hierarchy ratio");
  opt_num(tm, "--tol", "tol", "root tolerance");
  opt_num(tm, "--orbit-E", "orbit_E", "also emit the orbit at this energy");
  opt_num(tm, "--m-max", "m_max", "orbit length");

  CLI::App* dyn = add_common(app.add_subcommand("dynamics", "Abel-averaged transport on a finite lattice"));
  opt_num(dyn, "--L", "L", "lattice size");
  opt_num(dyn, "--alpha", "alpha", "power-law exponent for N(T)");
  opt_str(dyn, "--geometry", "geometry", "half-line|whole-line");
  opt_str(dyn, "--p", "p_csv", "comma list of moment orders");
  opt_str(dyn, "--T", "T_csv", "T grid lo:hi:points (geometric)");

  CLI::App* pert = add_common(app.add_subcommand("perturb", "Prufer trace and stability check"));
  opt_num(pert, "--E0", "E0", "energy");
  opt_num(pert, "--c2", "c2", "perturbation amplitude");
  opt_num(pert, "--decay", "decay", "perturbation decay exponent");
  opt_str(pert, "--pattern", "pattern", "deterministic|alternating|random");
  opt_num(pert, "--n-max", "n_max", "trace length");
  opt_num(pert, "--n-fit", "n_fit", "profile length for the exponent fit");

  CLI::App* st = add_common(app.add_subcommand("sturmian", "continued fractions and the Sturmian exponent"), false);
  opt_num(st, "--depth", "depth", "expansion depth");
  opt_num(st, "--lambda", "lambda", "coupling");
  opt_num(st, "--D", "D", "universal constant in alpha = D d(omega) log C_lambda");
  opt_str(st, "--omega", "omega_name", "golden|silver|<decimal>");

  CLI::App* sc = add_common(app.add_subcommand("structure-check", "check (S1)-(S4) block conditions"));
  opt_str(sc, "--condition", "condition", "S1|S2|S3|S4");
  opt_num(sc, "--k", "k", "S4 multiplicity parameter");
  opt_num(sc, "--from", "from", "first site to check (1-based)");
  opt_num(sc, "--length", "length", "word length to generate");
  opt_str(sc, "--word", "word", "explicit word over {a,b}");

  CLI::App* ver = app.add_subcommand("verify", "run invariant/oracle/bound suites");
  ver->add_option("suite", suite, "identities|oracles|bounds|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ver->parsed()) return cmd_verify(suite);

    RunContext ctx;
    if (!config_file.empty()) ctx.config = load_config(config_file);
    check_config_keys(ctx.config, {"experiment", "potential", "params", "output", "seed", "threads"},
                      "config");
    if (ctx.config.contains("params"))
      check_config_keys(ctx.config["params"],
                        {"n_max", "n_fit", "L", "alpha", "geometry", "T_grid", "p_list", "energies",
                         "norm", "m", "m_max", "lambda", "R", "tol", "orbit_E", "depth", "D", "E0",
                         "c2", "decay", "pattern", "support_cutoff", "condition", "k", "from",
                         "length", "word", "harness", "dump_potential", "amplitudes"},
                        "params");
    if (!ctx.config.contains("params")) ctx.config["params"] = nlohmann::json::object();

    // Flag overrides (CLI wins over config).
    for (auto it = flag_params.begin(); it != flag_params.end(); ++it) {
      if (it.key() == "energies_list") {
        std::vector<double> es;
        std::stringstream ss(it.value().get<std::string>());
        std::string tok;
        while (std::getline(ss, tok, ',')) es.push_back(std::stod(tok));
        ctx.config["params"]["energies"] = es;
      } else if (it.key() == "p_csv") {
        std::vector<double> ps;
        std::stringstream ss(it.value().get<std::string>());
        std::string tok;
        while (std::getline(ss, tok, ',')) ps.push_back(std::stod(tok));
        ctx.config["params"]["p_list"] = ps;
      } else if (it.key() == "T_csv") {
        const std::string s = it.value().get<std::string>();
        const auto c1 = s.find(':'), c2 = s.rfind(':');
        if (c1 == std::string::npos || c2 == c1) throw ConfigError("--T expects lo:hi:points");
        ctx.config["params"]["T_grid"] = {{"lo", std::stod(s.substr(0, c1))},
                                          {"hi", std::stod(s.substr(c1 + 1, c2 - c1 - 1))},
                                          {"points", std::stoi(s.substr(c2 + 1))}};
      } else if (it.key() == "omega_name") {
        const std::string s = it.value().get<std::string>();
        nlohmann::json om;
        if (s == "golden" || s == "silver")
          om = s;
        else
          om = {{"decimal", std::stod(s)}};
        ctx.config["potential"]["omega"] = om;
        ctx.config["potential"]["family"] = "sturmian";
      } else if (it.key() == "m" || it.key() == "m_max" || it.key() == "k" || it.key() == "from" ||
                 it.key() == "length" || it.key() == "n_max" || it.key() == "n_fit" ||
                 it.key() == "L" || it.key() == "depth" || it.key() == "support_cutoff") {
        ctx.config["params"][it.key()] = static_cast<index_t>(it.value().get<double>());
      } else if (it.key() == "condition" || it.key() == "pattern" || it.key() == "norm" ||
                 it.key() == "geometry" || it.key() == "word") {
        ctx.config["params"][it.key()] = it.value();
      } else {
        ctx.config["params"][it.key()] = it.value();
      }
    }

    if (ctx.config.contains("output")) {
      check_config_keys(ctx.config["output"], {"prefix"}, "output");
      ctx.out_prefix = ctx.config["output"].value("prefix", ctx.out_prefix);
    }
    if (!out_prefix.empty()) ctx.out_prefix = out_prefix;
    ctx.config["output"] = {{"prefix", ctx.out_prefix}};
    if (ctx.config.contains("threads")) ctx.threads = ctx.config["threads"].get<int>();
    if (have_threads_flag) ctx.threads = threads;
    if (ctx.config.contains("seed")) ctx.seed = ctx.config["seed"].get<std::uint64_t>();
    if (have_seed_flag) ctx.seed = seed;
    ctx.config["seed"] = ctx.seed;

    if (scan->parsed()) return cmd_transfer_scan(ctx, model);
    if (tm->parsed()) return cmd_tracemap(ctx);
    if (dyn->parsed()) return cmd_dynamics(ctx, model);
    if (pert->parsed()) return cmd_perturb(ctx, model);
    if (st->parsed()) return cmd_sturmian(ctx);
    if (sc->parsed()) return cmd_structure_check(ctx, model);
    throw ConfigError("no subcommand selected");
  } catch (const ConfigError& e) {
    nlohmann::json err{{"error", e.what()}, {"type", "config"}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const qdyn1d::Error& e) {
    nlohmann::json err{{"error", e.what()}, {"type", "run"}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}, {"type", "internal"}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
