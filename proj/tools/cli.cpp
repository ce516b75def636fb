#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hqp/asymptotics.hpp"
#include "hqp/collision.hpp"
#include "hqp/error.hpp"
#include "hqp/exact_count.hpp"
#include "hqp/flow_algebra.hpp"
#include "hqp/parallel.hpp"
#include "hqp/rate.hpp"
#include "hqp/thresholds.hpp"
#include "hqp/version.hpp"

namespace hqp::cli {

namespace {

using nlohmann::json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Result of one mode: the CSV plus lines meant for the diagnostic stream.
struct JobOutput {
  Table table;
  std::vector<std::string> log;
  bool failed = false;
};

struct Globals {
  std::string out_path;
  std::string manifest_path;
  std::uint64_t seed = 1;
  int threads = 0;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::string join(const std::vector<double>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_double(v[i]);
  }
  return s;
}

std::string matrix_text(const OverlapMatrix& mu) {
  std::string s;
  for (int r = 0; r < mu.dim(); ++r) {
    if (r) s += ';';
    for (int c = 0; c < mu.dim(); ++c) {
      if (c) s += ',';
      s += std::to_string(mu(r, c));
    }
  }
  return s;
}

WeightMatrix to_weight_matrix(const std::vector<std::vector<double>>& rows) {
  const int d = static_cast<int>(rows.size());
  WeightMatrix w(d, 0.0);
  for (int r = 0; r < d; ++r) {
    if (static_cast<int>(rows[r].size()) != d) throw std::invalid_argument("matrix must be square");
    for (int c = 0; c < d; ++c) w(r, c) = rows[r][c];
  }
  return w;
}

OverlapMatrix to_overlap_matrix(const std::vector<std::vector<double>>& rows) {
  const WeightMatrix w = to_weight_matrix(rows);
  OverlapMatrix mu(w.dim(), 0);
  for (int r = 0; r < w.dim(); ++r)
    for (int c = 0; c < w.dim(); ++c) {
      const double v = w(r, c);
      if (v < 0.0 || v != std::floor(v)) throw std::invalid_argument("overlap entries must be nonnegative integers");
      mu(r, c) = static_cast<std::int64_t>(v);
    }
  return mu;
}

/// Assignments (tau, tau_star) realizing the overlap matrix mu.
std::pair<Assignment, Assignment> realize(const OverlapMatrix& mu) {
  std::vector<int> tau;
  std::vector<int> star;
  for (int r = 0; r < mu.dim(); ++r)
    for (int s = 0; s < mu.dim(); ++s)
      for (std::int64_t i = 0; i < mu(r, s); ++i) {
        tau.push_back(r);
        star.push_back(s);
      }
  if (tau.empty()) throw std::invalid_argument("overlap matrix is empty");
  return {Assignment(std::move(tau), mu.dim()), Assignment(std::move(star), mu.dim())};
}

double relative_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Modes. Each returns its table; validation failures throw
// std::invalid_argument, guards throw ResourceError.

JobOutput run_thresholds(const std::string& pi_text) {
  const ProportionVector pi(parse_list(pi_text));
  const auto rep = thresholds(pi);
  JobOutput job;
  job.table.header = {"pi", "d", "entropy", "gamma_low", "gamma_up", "argmax_k"};
  job.table.rows.push_back({join(std::vector<double>(pi.values().begin(), pi.values().end()), ','),
                            std::to_string(pi.dim()), format_double(shannon_entropy(pi)),
                            format_double(rep.gamma_low), format_double(rep.gamma_up), std::to_string(rep.argmax_k)});
  return job;
}

JobOutput run_free_energy(const std::string& pi_text, const std::string& grid_text, int n, double alpha) {
  const ProportionVector pi(parse_list(pi_text));
  const auto grid = parse_grid(grid_text);
  JobOutput job;
  job.table.header = {"gamma", "free_energy"};
  if (n > 0) job.table.header.insert(job.table.header.end(), {"n", "finite_n", "finite_n_minus_entropy", "off_diagonal"});
  const double h = shannon_entropy(pi);
  for (double gamma : grid) {
    std::vector<std::string> row{format_double(gamma), format_double(free_energy(pi, gamma))};
    if (n > 0) {
      const auto fn = finite_n_free_energy(n, pi, gamma, alpha);
      row.insert(row.end(), {std::to_string(n), format_double(fn.value), format_double(fn.value - h),
                             std::to_string(fn.off_diagonal)});
    }
    job.table.rows.push_back(std::move(row));
  }
  return job;
}

struct CollisionArgs {
  std::string mu_text;
  int random_cases = 0;
  int d = 3;
  int max_entry = 10;
  double alpha = 0.5;
  std::int64_t mc_trials = 0;
};

JobOutput run_collision(const CollisionArgs& a, std::uint64_t seed, int threads) {
  if (a.mu_text.empty() == (a.random_cases == 0))
    throw std::invalid_argument("collision: give exactly one of --mu or --random");
  if (a.mc_trials < 0) throw std::invalid_argument("collision: --mc-trials must be >= 0");
  std::vector<OverlapMatrix> cases;
  if (!a.mu_text.empty()) {
    cases.push_back(to_overlap_matrix(parse_matrix(a.mu_text)));
  } else {
    if (a.random_cases < 0) throw std::invalid_argument("collision: --random must be >= 0");
    if (a.d < 2) throw std::invalid_argument("collision: --d must be >= 2");
    if (a.max_entry < 1) throw std::invalid_argument("collision: --max-entry must be >= 1");
    for (int c = 0; c < a.random_cases; ++c) {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(c));
      OverlapMatrix mu(a.d, 0);
      for (int r = 0; r < a.d; ++r)
        for (int s = 0; s < a.d; ++s)
          mu(r, s) = static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(a.max_entry) + 1));
      mu(0, 0) = std::max<std::int64_t>(mu(0, 0), 1);
      cases.push_back(mu);
    }
  }
  for (const auto& mu : cases) (void)CollisionQuery(mu, a.alpha);  // validate before any work

  struct Row {
    double dp, dft, mc, mc_se;
  };
  const auto rows = parallel_map<Row>(cases.size(), threads, [&](std::size_t i) {
    const CollisionQuery q(cases[i], a.alpha);
    Row row{collision_prob_dp(q), collision_prob_dft(q), 0.0, 0.0};
    if (a.mc_trials > 0) {
      const auto [tau, star] = realize(cases[i]);
      Rng rng = make_stream(seed, 1'000'000 + i);
      const auto mc = collision_prob_mc(tau, star, a.alpha, a.mc_trials, rng);
      row.mc = mc.estimate;
      row.mc_se = mc.std_error;
    }
    return row;
  });

  JobOutput job;
  job.table.header = {"case", "mu", "alpha", "q_dp", "q_dft", "rel_diff"};
  if (a.mc_trials > 0) job.table.header.insert(job.table.header.end(), {"q_mc", "mc_stderr"});
  for (std::size_t i = 0; i < cases.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), matrix_text(cases[i]), format_double(a.alpha),
                                 format_double(rows[i].dp), format_double(rows[i].dft),
                                 format_double(relative_diff(rows[i].dp, rows[i].dft))};
    if (a.mc_trials > 0) row.insert(row.end(), {format_double(rows[i].mc), format_double(rows[i].mc_se)});
    job.table.rows.push_back(std::move(row));
  }
  return job;
}

struct SimulateArgs {
  int n = 0;
  int d = 2;
  std::string pi_text;
  double alpha = 0.5;
  std::string grid_text;
  std::int64_t trials = 100;
  bool fixed_tau = false;
  bool excess = false;
};

JobOutput run_simulate(const SimulateArgs& a, std::uint64_t seed, int threads) {
  const ProportionVector pi = a.pi_text.empty() ? ProportionVector::uniform(a.d) : ProportionVector(parse_list(a.pi_text));
  if (pi.dim() != a.d) throw std::invalid_argument("simulate: --pi has " + std::to_string(pi.dim()) + " entries, --d is " + std::to_string(a.d));
  if (a.trials < 1) throw std::invalid_argument("simulate: --trials must be >= 1");
  const auto grid = parse_grid(a.grid_text);
  for (double g : grid)
    if (!(g > 0.0)) throw std::invalid_argument("simulate: gamma values must be > 0");

  JobOutput job;
  job.table.header = {"gamma", "m", "estimate", "stderr", "successes", "trials"};
  if (a.excess) job.table.header.push_back("expected_excess");
  for (double gamma : grid) {
    // Every grid point reuses the same seed, so trial t sees the same
    // planted assignment and the same leading pools at every gamma.
    InstanceParams p{a.n, a.d, pi, a.alpha, query_count_for_gamma(a.n, gamma), seed};
    p.validate();
    // The exact sum is computed first so that its size guard trips before a
    // long simulation.
    const double excess = a.excess ? expected_excess_solutions(p) : 0.0;
    const auto est = estimate_prob_E(p, a.trials, {.resample_tau = !a.fixed_tau, .threads = threads});
    std::vector<std::string> row{format_double(gamma), std::to_string(p.m), format_double(est.estimate),
                                 format_double(est.std_error), std::to_string(est.successes),
                                 std::to_string(est.trials)};
    if (a.excess) row.push_back(format_double(excess));
    job.table.rows.push_back(std::move(row));
  }
  return job;
}

JobOutput run_identity(int d, int trials, std::uint64_t seed, int threads) {
  if (d < 2 || d > 8) throw std::invalid_argument("identity: --d must lie in 2..8");
  if (trials < 1) throw std::invalid_argument("identity: --trials must be >= 1");
  const FlowGraph g = FlowGraph::complete(d);
  struct Row {
    double closed, basis, basis_alt;
  };
  const auto rows = parallel_map<Row>(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    Rng rng = make_stream(seed, t);
    WeightMatrix w(d, 0.0);
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) w(r, s) = 0.1 + 1.9 * uniform01(rng);
    const EdgeSet alt = random_spanning_forest(g, rng);
    return Row{gaussian_flow_integral_closed(g, w), gaussian_flow_integral_basis(g, w, default_spanning_forest(g)),
               gaussian_flow_integral_basis(g, w, alt)};
  });
  JobOutput job;
  job.table.header = {"trial", "d", "closed", "basis", "basis_alt_tree", "rel_diff", "status"};
  for (int t = 0; t < trials; ++t) {
    const auto& r = rows[static_cast<std::size_t>(t)];
    const double diff = std::max(relative_diff(r.closed, r.basis), relative_diff(r.closed, r.basis_alt));
    const bool pass = diff <= 1e-9;
    job.failed = job.failed || !pass;
    const std::string status = pass ? "PASS" : "FAIL";
    job.table.rows.push_back({std::to_string(t), std::to_string(d), format_double(r.closed), format_double(r.basis),
                              format_double(r.basis_alt), format_double(diff), status});
    job.log.push_back(status + " gaussian-flow-integral trial=" + std::to_string(t) + " d=" + std::to_string(d) +
                      " rel_diff=" + format_double(diff));
  }
  return job;
}

JobOutput run_rates(const std::string& w_text, double alpha, const std::string& grid_text, int threads) {
  const WeightMatrix w = to_weight_matrix(parse_matrix(w_text));
  const bool balanced = in_flow_space(w);
  const double theta = theta_of_w(w, alpha);
  JobOutput job;
  job.table.header = {"alpha", "in_flow_space", "theta", "components", "regime", "fitted", "target", "pass"};
  std::vector<std::string> row{format_double(alpha), balanced ? "true" : "false", format_double(theta),
                               std::to_string(support_components(w)), balanced ? "polynomial" : "exponential"};
  if (grid_text.empty()) {
    row.insert(row.end(), {"", "", ""});
  } else {
    ScalingExperiment exp{w, {}, alpha};
    for (double n : parse_grid(grid_text)) {
      if (n < 1.0 || n != std::floor(n)) throw std::invalid_argument("rates: --n-grid must hold positive integers");
      exp.n_grid.push_back(static_cast<int>(n));
    }
    if (balanced) {
      const auto res = verify_polynomial_rate(exp, 0.05, threads);
      row.insert(row.end(), {format_double(res.slope), format_double(res.target), res.pass ? "true" : "false"});
    } else {
      const auto res = verify_exponential_rate(exp, 0.05, threads);
      row.insert(row.end(), {format_double(res.rate), format_double(-res.theta), res.pass ? "true" : "false"});
    }
  }
  job.table.rows.push_back(std::move(row));
  return job;
}

void write_csv(const Table& t, std::ostream& out) {
  const auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << csv_field(fields[i]);
    }
    out << "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += v[i].is_array() ? ";" : ",";
      s += config_value(v[i]);
    }
    return s;
  }
  return v.dump();
}

/// Replaces "--config FILE" by the subcommand and flags stored in FILE.
/// Flags given explicitly on the command line win over the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw CLI::ArgumentMismatch("--config needs a file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("mode") || !doc["mode"].is_string())
    throw std::invalid_argument("config " + path + ": expected an object with a string \"mode\"");
  const std::string mode = doc["mode"].get<std::string>();
  if (!rest.empty() && rest.front()[0] != '-' && rest.front() != mode)
    throw std::invalid_argument("config mode '" + mode + "' conflicts with subcommand '" + rest.front() + "'");
  if (!rest.empty() && rest.front() == mode) rest.erase(rest.begin());

  const auto given = [&](const std::string& flag) {
    for (const auto& a : rest)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> out{mode};
  const json params = doc.contains("params") ? doc["params"] : json::object();
  if (!params.is_object()) throw std::invalid_argument("config " + path + ": \"params\" must be an object");
  auto add = [&](const std::string& key, const json& value) {
    const std::string flag = "--" + key;
    if (given(flag)) return;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
      return;
    }
    out.push_back(flag);
    out.push_back(config_value(value));
  };
  for (const auto& [key, value] : doc.items())
    if (key != "mode" && key != "params") add(key, value);
  for (const auto& [key, value] : params.items()) add(key, value);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

json collect_params(const CLI::App* sub) {
  json params = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      params[name] = res.size() == 1 ? res.front() : json(res).dump();
    } else if (!opt->get_default_str().empty()) {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw std::invalid_argument("grid must look like a:b:step, got '" + text + "'");
  const double a = parse_double(parts[0]);
  const double b = parse_double(parts[1]);
  const double step = parse_double(parts[2]);
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be > 0");
  if (b < a) throw std::invalid_argument("grid end must be >= start");
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  if (count > 1'000'000) throw std::invalid_argument("grid has more than 10^6 points");
  std::vector<double> grid;
  grid.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Snap to 12 significant digits so 0.2 + 14*0.2 prints as 3.
    grid.push_back(parse_double(format_double(a + static_cast<double>(i) * step)));
  }
  return grid;
}

std::vector<std::vector<double>> parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(text, ';')) rows.push_back(parse_list(row));
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  return rows;
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }

  CLI::App app{"Histogram query problem laboratory", "hqp"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--out", g.out_path, "CSV output file (default: stdout)");
  app.add_option("--manifest", g.manifest_path, "run manifest path (default: <out>.manifest.json)");
  app.add_option("--seed", g.seed, "base RNG seed");
  app.add_option("--threads", g.threads, "worker threads (0: HQP_THREADS or hardware)")->check(CLI::NonNegativeNumber);

  std::function<JobOutput()> job;

  std::string pi_text;
  auto* thr = app.add_subcommand("thresholds", "gamma_low, gamma_up and the maximizing k for one pi");
  thr->add_option("--pi", pi_text, "proportions, comma separated")->required();
  thr->callback([&] { job = [&] { return run_thresholds(pi_text); }; });

  std::string fe_pi, fe_grid;
  int fe_n = 0;
  double fe_alpha = 0.5;
  auto* fe = app.add_subcommand("free-energy", "annealed free energy over a gamma grid");
  fe->add_option("--pi", fe_pi, "proportions, comma separated")->required();
  fe->add_option("--gamma-grid", fe_grid, "a:b:step")->required();
  fe->add_option("--n", fe_n, "also report the finite-n value at this n (0: skip)");
  fe->add_option("--alpha", fe_alpha, "pool inclusion probability for the finite-n value");
  fe->callback([&] { job = [&] { return run_free_energy(fe_pi, fe_grid, fe_n, fe_alpha); }; });

  CollisionArgs col;
  auto* co = app.add_subcommand("collision", "exact collision probability by DP and DFT, optionally Monte Carlo");
  co->add_option("--mu", col.mu_text, "overlap matrix, rows split by ';'");
  co->add_option("--random", col.random_cases, "number of random overlap matrices instead of --mu");
  co->add_option("--d", col.d, "dimension of random matrices");
  co->add_option("--max-entry", col.max_entry, "largest random entry");
  co->add_option("--alpha", col.alpha, "pool inclusion probability");
  co->add_option("--mc-trials", col.mc_trials, "Monte Carlo pools per case (0: skip)");
  co->callback([&] { job = [&] { return run_collision(col, g.seed, g.threads); }; });

  SimulateArgs sim;
  auto* si = app.add_subcommand("simulate", "Monte Carlo estimate of Pr(Z >= 2) over a gamma grid");
  si->add_option("--n", sim.n, "number of individuals")->required();
  si->add_option("--d", sim.d, "number of types");
  si->add_option("--pi", sim.pi_text, "proportions (default uniform)");
  si->add_option("--alpha", sim.alpha, "pool inclusion probability");
  si->add_option("--gamma-grid", sim.grid_text, "a:b:step")->required();
  si->add_option("--trials", sim.trials, "instances per grid point");
  si->add_flag("--fixed-tau", sim.fixed_tau, "keep one planted assignment for all trials");
  si->add_flag("--excess", sim.excess, "add the exact expected number of extra solutions");
  si->callback([&] { job = [&] { return run_simulate(sim, g.seed, g.threads); }; });

  int id_d = 3, id_trials = 100;
  auto* id = app.add_subcommand("identity", "closed form vs basis route for the Gaussian flow integral");
  id->add_option("--d", id_d, "number of vertices");
  id->add_option("--trials", id_trials, "random weight arrays");
  id->callback([&] { job = [&] { return run_identity(id_d, id_trials, g.seed, g.threads); }; });

  std::string rt_w, rt_grid;
  double rt_alpha = 0.5;
  auto* rt = app.add_subcommand("rates", "rate function of a weight matrix and its scaling check");
  rt->add_option("--w", rt_w, "weight matrix, rows split by ';'")->required();
  rt->add_option("--alpha", rt_alpha, "pool inclusion probability");
  rt->add_option("--n-grid", rt_grid, "a:b:step grid of n for the scaling fit");
  rt->callback([&] { job = [&] { return run_rates(rt_w, rt_alpha, rt_grid, g.threads); }; });

  std::vector<const char*> argv{"hqp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalid;
  }
  if (g.threads == 0) g.threads = default_thread_count();

  const CLI::App* sub = app.get_subcommands().front();
  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = utc_now();
  JobOutput result;
  try {
    result = job();
  } catch (const ResourceError& e) {
    err << "error: resource guard: " << e.what() << '\n';
    return kResource;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  for (const auto& line : result.log) err << line << '\n';
  if (g.out_path.empty()) {
    write_csv(result.table, out);
  } else {
    std::ofstream file(g.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << g.out_path << '\n';
      return kInvalid;
    }
    write_csv(result.table, file);
  }

  const int code = result.failed ? kCheckFailed : kOk;
  std::string manifest_path = g.manifest_path;
  if (manifest_path.empty() && !g.out_path.empty()) manifest_path = g.out_path + ".manifest.json";
  if (!manifest_path.empty()) {
    json deps = json::object();
    for (const auto& [name, ver] : dependency_versions()) deps[name] = ver;
    deps["cli11"] = CLI11_VERSION;
    json manifest = {
        {"tool", "hqp"},
        {"version", version()},
        {"mode", sub->get_name()},
        {"params", collect_params(sub)},
        {"seed", g.seed},
        {"threads", g.threads},
        {"output", g.out_path.empty() ? "-" : g.out_path},
        {"columns", result.table.header},
        {"rows", result.table.rows.size()},
        {"started_at", started_at},
        {"wall_time_seconds", wall},
        {"exit_code", code},
        {"dependencies", deps},
    };
    std::ofstream file(manifest_path);
    if (!file) {
      err << "error: cannot open " << manifest_path << '\n';
      return kInvalid;
    }
    file << manifest.dump(2) << '\n';
  }
  return code;
}

}  // namespace hqp::cli
