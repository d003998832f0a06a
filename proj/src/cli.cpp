#include "allpay/cli.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "allpay/benchmarks.hpp"
#include "allpay/config.hpp"
#include "allpay/errors.hpp"
#include "allpay/monte_carlo.hpp"
#include "allpay/opt_mechanism.hpp"
#include "allpay/verifier.hpp"

namespace allpay {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerify = 3;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// RFC 4180 field quoting.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::vector<std::string>& header) : path_(path) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) text_ << (k ? "," : "") << field(cells[k]);
    text_ << '\n';
  }

  void write(std::ostream& log) const {
    std::ofstream f(path_, std::ios::binary);
    f << text_.str();
    if (!f) throw Error("cannot write " + path_.string());
    log << "wrote " << path_.string() << '\n';
  }

 private:
  fs::path path_;
  std::ostringstream text_;
};

/// Runs fn(0..count-1) on a small thread pool; each call owns its slot.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned pool = static_cast<unsigned>(
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency())));
  if (pool <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < pool; ++t) {
    threads.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) fn(k);
    });
  }
  for (auto& th : threads) th.join();
}

enum class Kind { Opt, OptN, Fix, Sym, FixN };

struct Mechanism {
  std::string name;
  Kind kind = Kind::Opt;
  std::size_t agent = 0;  // distribution used by symmetric mechanisms
};

Mechanism parse_mechanism(const std::string& name) {
  if (name == "opt") return {name, Kind::Opt, 0};
  if (name == "optn") return {name, Kind::OptN, 0};
  if (name == "fix") return {name, Kind::Fix, 0};
  if (name == "fixn") return {name, Kind::FixN, 0};
  if (name == "sym") return {"sym1", Kind::Sym, 0};
  if (name.rfind("sym", 0) == 0 && name.size() > 3 &&
      std::all_of(name.begin() + 3, name.end(), [](unsigned char c) { return std::isdigit(c); })) {
    const long k = std::stol(name.substr(3));
    if (k >= 1) return {name, Kind::Sym, static_cast<std::size_t>(k - 1)};
  }
  throw ConfigError("unknown mechanism '" + name + "' (opt, optn, fix, fixn, sym, symK)");
}

std::vector<Mechanism> parse_mechanisms(const std::vector<std::string>& names) {
  std::vector<Mechanism> out;
  for (const auto& n : names) {
    if (n == "all") {
      for (const char* m : {"opt", "fix", "sym1", "sym2"}) out.push_back(parse_mechanism(m));
    } else {
      out.push_back(parse_mechanism(n));
    }
  }
  if (out.empty()) throw ConfigError("no mechanism given");
  return out;
}

struct Evaluated {
  EquilibriumProfile profile;
  double profit = 0.0;
};

/// Equilibrium and profit of one mechanism. `n` overrides the number of agents
/// of the n-agent mechanisms (0 keeps the config's count).
Evaluated evaluate(const ContestSpec& spec, const Mechanism& m, std::size_t n, double prize) {
  const std::size_t count = n == 0 ? spec.n() : n;
  if (m.kind != Kind::OptN && m.kind != Kind::FixN && n != 0 && n != spec.n()) {
    throw ConfigError("mechanism " + m.name + " uses the config's agents; --ns applies to optn and fixn");
  }
  switch (m.kind) {
    case Kind::Opt:
    case Kind::OptN: {
      ContestSpec s = spec;
      if (m.kind == Kind::OptN) s.agents.assign(count, spec.agents.front());
      Evaluated e{opt_profile(s), 0.0};
      e.profile.mechanism = m.name;
      e.profit = opt_profit(s, e.profile.strategies).total;
      return e;
    }
    case Kind::Fix: {
      const FixedPrizeOutcome o = fix_mechanism(spec, prize);
      return {fixed_prize_profile(m.name, o), fixed_prize_profit(o)};
    }
    case Kind::Sym:
    case Kind::FixN: {
      if (m.agent >= spec.n()) throw ConfigError(m.name + ": no agent " + std::to_string(m.agent + 1));
      const FixedPrizeOutcome o = sym_mechanism(spec, m.agent, count, prize);
      return {fixed_prize_profile(m.name, o), fixed_prize_profit(o)};
    }
  }
  throw ConfigError("unreachable mechanism kind");
}

bool is_fixed_prize(const Mechanism& m) { return m.kind != Kind::Opt && m.kind != Kind::OptN; }

/// Profit alone; skips the optimal prize schedules, which cost O(n^2).
double profit_of(const ContestSpec& spec, const Mechanism& m, std::size_t n, double prize) {
  if (is_fixed_prize(m)) return evaluate(spec, m, n, prize).profit;
  if (m.kind == Kind::Opt && n != 0 && n != spec.n()) {
    throw ConfigError("mechanism opt uses the config's agents; --ns applies to optn and fixn");
  }
  ContestSpec s = spec;
  if (m.kind == Kind::OptN) s.agents.assign(n == 0 ? spec.n() : n, spec.agents.front());
  return opt_profit(s).total;
}

PrizeOptimum best_fixed_prize(const ContestSpec& spec, const Mechanism& m, std::size_t n) {
  return optimal_fixed_prize([&](double z) { return profit_of(spec, m, n, z); });
}

struct Options {
  std::string config = std::string(kCaseStudyPreset);
  std::string out = ".";
  std::uint64_t seed = 1;
  double tol = 1e-3;
  int steps = 0;
  std::vector<double> lambdas;
  std::vector<std::size_t> ns;
  std::vector<std::string> mechanisms;
  double prize = 1.0;
  std::size_t points = 1001;
  std::size_t trials = 1000000;
  unsigned workers = 0;
  double perturb = 0.0;
  std::size_t types = 101;
  std::size_t bids = 2001;
};

ContestSpec load_spec(const Options& o) {
  ContestSpec spec = load_config(o.config);
  if (o.steps != 0) spec.numerics.ode_steps = o.steps;
  spec.numerics.validate();
  return spec;
}

ContestSpec with_lambda(ContestSpec spec, double lambda) {
  spec.lambda = lambda;
  spec.validate();
  return spec;
}

/// Lambdas to run: the sweep list, or the config's own value.
std::vector<double> lambdas_of(const Options& o, const ContestSpec& spec) {
  return o.lambdas.empty() ? std::vector<double>{spec.lambda} : o.lambdas;
}

double single_lambda(const Options& o, const ContestSpec& spec) {
  if (o.lambdas.size() > 1) throw ConfigError("this command takes a single --lambdas value");
  return o.lambdas.empty() ? spec.lambda : o.lambdas.front();
}

std::size_t single_n(const Options& o) {
  if (o.ns.size() > 1) throw ConfigError("this command takes a single --ns value");
  return o.ns.empty() ? 0 : o.ns.front();
}

Mechanism single_mechanism(const std::vector<Mechanism>& ms) {
  if (ms.size() != 1) throw ConfigError("this command takes exactly one --mechanism");
  return ms.front();
}

fs::path out_dir(const Options& o) {
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

std::string size_str(std::size_t n) { return std::to_string(n); }

void write_strategies(const EquilibriumProfile& p, std::size_t points, const fs::path& path, std::ostream& log) {
  CsvFile csv(path, {"agent", "v", "b"});
  const auto grid = numerics::linspace(p.spec.support().lo(), p.spec.support().hi(), points);
  for (std::size_t i = 0; i < p.strategies.size(); ++i) {
    // Agents sharing one schedule (symmetric mechanisms) are written once.
    bool repeat = false;
    for (std::size_t j = 0; j < i && !repeat; ++j) repeat = p.strategies[j].same_schedule(p.strategies[i]);
    if (repeat) continue;
    for (double v : grid) csv.row({size_str(i + 1), fmt(v), fmt(p.strategies[i](v))});
  }
  csv.write(log);
}

void write_prizes(const EquilibriumProfile& p, std::size_t points, const fs::path& path, std::ostream& log) {
  CsvFile csv(path, {"agent", "b", "Z"});
  for (std::size_t i = 0; i < p.prizes.size(); ++i) {
    const double top = p.strategies[i].max_bid();
    for (std::size_t k = 1; k <= points; ++k) {
      const double b = top * static_cast<double>(k) / static_cast<double>(points);
      csv.row({size_str(i + 1), fmt(b), fmt(p.prizes[i](b))});
    }
  }
  csv.write(log);
}

int cmd_solve(const Options& o, std::ostream& out) {
  const ContestSpec base = load_spec(o);
  const ContestSpec spec = with_lambda(base, single_lambda(o, base));
  const Mechanism m = single_mechanism(parse_mechanisms(o.mechanisms));
  const Evaluated e = evaluate(spec, m, single_n(o), o.prize);
  const fs::path dir = out_dir(o);
  write_strategies(e.profile, o.points, dir / "strategies.csv", out);
  if (!is_fixed_prize(m)) write_prizes(e.profile, o.points, dir / "prizes.csv", out);
  out << m.name << " profit " << fmt(e.profit) << " at lambda " << fmt(spec.lambda) << '\n';
  return kExitOk;
}

int cmd_prize(const Options& o, std::ostream& out) {
  const ContestSpec base = load_spec(o);
  const fs::path dir = out_dir(o);
  const std::vector<Mechanism> ms = parse_mechanisms(o.mechanisms);
  if (ms.size() == 1 && !is_fixed_prize(ms.front())) {
    const ContestSpec spec = with_lambda(base, single_lambda(o, base));
    const Evaluated e = evaluate(spec, ms.front(), single_n(o), 1.0);
    write_prizes(e.profile, o.points, dir / "prizes.csv", out);
    return kExitOk;
  }
  // Fixed-prize mechanisms: the profit-maximising constant prize.
  CsvFile csv(dir / "optimal_prize.csv", {"mechanism", "lambda", "n", "prize", "profit"});
  const std::size_t n = single_n(o);
  for (const auto& m : ms) {
    if (!is_fixed_prize(m)) throw ConfigError("optimal fixed prize: " + m.name + " is not a fixed-prize mechanism");
    for (double lambda : lambdas_of(o, base)) {
      const ContestSpec spec = with_lambda(base, lambda);
      const PrizeOptimum best = best_fixed_prize(spec, m, n);
      csv.row({m.name, fmt(lambda), size_str(n == 0 ? spec.n() : n), fmt(best.prize), fmt(best.profit)});
      out << m.name << " lambda " << fmt(lambda) << ": Z* " << fmt(best.prize) << " profit " << fmt(best.profit) << '\n';
    }
  }
  csv.write(out);
  return kExitOk;
}

int cmd_profit(const Options& o, std::ostream& out, std::ostream& err) {
  const ContestSpec base = load_spec(o);
  const std::vector<Mechanism> ms = parse_mechanisms(o.mechanisms);
  struct Row {
    const Mechanism* m;
    double lambda;
    std::size_t n;
    std::optional<double> profit;
    std::string error;
    bool config_error = false;
  };
  std::vector<Row> rows;
  for (const auto& m : ms) {
    const bool sweeps_n = m.kind == Kind::OptN || m.kind == Kind::FixN;
    const std::vector<std::size_t> ns = sweeps_n && !o.ns.empty() ? o.ns : std::vector<std::size_t>{0};
    for (double lambda : lambdas_of(o, base)) {
      for (std::size_t n : ns) rows.push_back({&m, lambda, n, std::nullopt, {}, false});
    }
  }
  parallel_for(rows.size(), [&](std::size_t k) {
    Row& r = rows[k];
    try {
      r.profit = profit_of(with_lambda(base, r.lambda), *r.m, r.n, o.prize);
    } catch (const ConfigError& e) {
      r.error = e.what();
      r.config_error = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  CsvFile csv(out_dir(o) / "profit.csv", {"mechanism", "lambda", "n", "profit", "status"});
  int code = kExitOk;
  for (const auto& r : rows) {
    const std::size_t n = r.n == 0 ? base.n() : r.n;
    csv.row({r.m->name, fmt(r.lambda), size_str(n), r.profit ? fmt(*r.profit) : "", r.profit ? "ok" : "failed"});
    if (!r.profit) {
      err << "error: " << r.m->name << " lambda " << fmt(r.lambda) << " n " << n << ": " << r.error << '\n';
      code = std::max(code, r.config_error ? kExitUsage : kExitSolver);
    }
  }
  csv.write(out);
  return code;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const ContestSpec base = load_spec(o);
  const ContestSpec spec = with_lambda(base, single_lambda(o, base));
  const Mechanism m = single_mechanism(parse_mechanisms(o.mechanisms));
  EquilibriumProfile profile = evaluate(spec, m, single_n(o), o.prize).profile;
  if (o.perturb != 0.0) {
    for (auto& s : profile.strategies) s = s.perturbed(o.perturb);
    profile.mechanism += " (perturbed)";
  }
  VerificationReport report;
  report.mechanism = profile.mechanism;
  report.deviation = best_response_check(profile, o.types, o.bids, o.tol);
  report.ir = check_ir(profile);
  report.monotonicity = check_monotonicity(profile);
  if (m.kind == Kind::Opt || m.kind == Kind::OptN) {
    report.sa = check_sa(profile.spec, 0, default_sa_replacements(profile.spec.support()));
  }
  out << report.to_text();
  const fs::path path = out_dir(o) / "verify.json";
  std::ofstream f(path, std::ios::binary);
  f << report.to_json() << '\n';
  if (!f) throw Error("cannot write " + path.string());
  out << "wrote " << path.string() << '\n';
  return report.passed() ? kExitOk : kExitVerify;
}

int cmd_mc(const Options& o, std::ostream& out) {
  const ContestSpec base = load_spec(o);
  const std::vector<Mechanism> ms = parse_mechanisms(o.mechanisms);
  const std::size_t n = single_n(o);
  CsvFile csv(out_dir(o) / "mc.csv", {"mechanism", "lambda", "n", "trials", "seed", "generator", "mean_profit",
                                      "std_error", "analytic_profit", "z_score"});
  for (const auto& m : ms) {
    for (double lambda : lambdas_of(o, base)) {
      const ContestSpec spec = with_lambda(base, lambda);
      const Evaluated e = evaluate(spec, m, n, o.prize);
      const MonteCarloResult r = monte_carlo_campaign(e.profile, o.trials, o.seed, o.workers);
      const double z = r.std_error > 0.0 ? (r.mean_profit - e.profit) / r.std_error : 0.0;
      csv.row({m.name, fmt(lambda), size_str(e.profile.spec.n()), size_str(r.trials), std::to_string(r.seed),
               r.generator, fmt(r.mean_profit), fmt(r.std_error), fmt(e.profit), fmt(z)});
      out << m.name << " lambda " << fmt(lambda) << ": mc " << fmt(r.mean_profit) << " +- " << fmt(r.std_error)
          << ", analytic " << fmt(e.profit) << '\n';
    }
  }
  csv.write(out);
  return kExitOk;
}

int cmd_figures(const Options& o, std::ostream& out) {
  const fs::path dir = out_dir(o);
  const ContestSpec base = paper_case_study(0.1);
  const Mechanism opt = parse_mechanism("opt"), fix = parse_mechanism("fix");
  const Mechanism sym1 = parse_mechanism("sym1"), sym2 = parse_mechanism("sym2");
  const Mechanism optn = parse_mechanism("optn"), fixn = parse_mechanism("fixn");
  const std::vector<double> panels = {0.1, 0.3, 0.5};

  // Profit against lambda.
  std::vector<double> lambdas;
  for (int k = 2; k <= 80; ++k) lambdas.push_back(k / 100.0);
  std::vector<std::array<double, 4>> fig1(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t k) {
    const ContestSpec spec = with_lambda(base, lambdas[k]);
    fig1[k] = {profit_of(spec, opt, 0, 1.0), profit_of(spec, fix, 0, 1.0), profit_of(spec, sym1, 0, 1.0),
               profit_of(spec, sym2, 0, 1.0)};
  });
  CsvFile f1(dir / "fig1.csv", {"lambda", "opt", "fix", "sym1", "sym2"});
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    f1.row({fmt(lambdas[k]), fmt(fig1[k][0]), fmt(fig1[k][1]), fmt(fig1[k][2]), fmt(fig1[k][3])});
  }
  f1.write(out);

  // Strategies against type, and optimal prizes against the winning effort.
  CsvFile f2(dir / "fig2.csv", {"lambda", "v", "opt", "fix1", "fix2", "sym1", "sym2"});
  CsvFile f3(dir / "fig3.csv", {"lambda", "b", "z1", "z2"});
  for (double lambda : panels) {
    const ContestSpec spec = with_lambda(base, lambda);
    const Evaluated eo = evaluate(spec, opt, 0, 1.0), ef = evaluate(spec, fix, 0, 1.0);
    const Evaluated e1 = evaluate(spec, sym1, 0, 1.0), e2 = evaluate(spec, sym2, 0, 1.0);
    for (double v : numerics::linspace(0.0, 1.0, 101)) {
      f2.row({fmt(lambda), fmt(v), fmt(eo.profile.strategies[0](v)), fmt(ef.profile.strategies[0](v)),
              fmt(ef.profile.strategies[1](v)), fmt(e1.profile.strategies[0](v)), fmt(e2.profile.strategies[0](v))});
    }
    const double top = eo.profile.strategies[0].max_bid();
    for (double b : numerics::linspace(0.0, top, 101)) {
      f3.row({fmt(lambda), fmt(b), fmt(eo.profile.prizes[0](b)), fmt(eo.profile.prizes[1](b))});
    }
  }
  f2.write(out);
  f3.write(out);

  // Profit against the number of agents.
  struct Cell {
    double lambda;
    std::size_t n;
    double optn = 0.0, fixn = 0.0;
  };
  std::vector<Cell> cells;
  for (double lambda : panels) {
    for (std::size_t n = 2; n <= 50; ++n) cells.push_back({lambda, n});
  }
  parallel_for(cells.size(), [&](std::size_t k) {
    const ContestSpec spec = with_lambda(base, cells[k].lambda);
    cells[k].optn = profit_of(spec, optn, cells[k].n, 1.0);
    cells[k].fixn = profit_of(spec, fixn, cells[k].n, 1.0);
  });
  CsvFile f4(dir / "fig4.csv", {"lambda", "n", "optn", "fixn", "bound"});
  for (const auto& c : cells) {
    f4.row({fmt(c.lambda), size_str(c.n), fmt(c.optn), fmt(c.fixn), fmt(2.0 - c.lambda)});
  }
  f4.write(out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal prizes and benchmark mechanisms for asymmetric all-pay contests", "allpay"};
  app.require_subcommand(1);
  Options o;

  app.add_option("--config", o.config, "Config file, or the preset name 'paper-case-study'");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--seed", o.seed, "Monte Carlo seed");
  app.add_option("--tol", o.tol, "Largest deviation gain accepted by verify")->check(CLI::PositiveNumber);
  app.add_option("--steps", o.steps, "ODE steps (overrides numerics.steps)")->check(CLI::PositiveNumber);

  auto mechanism = [&](CLI::App* sub, bool many) {
    sub->add_option("--mechanism,-m", o.mechanisms,
                    many ? "Mechanisms: opt optn fix fixn sym symK all (comma separated)"
                         : "Mechanism: opt optn fix fixn sym symK")
        ->delimiter(',')
        ->required();
  };
  auto lambdas = [&](CLI::App* sub) {
    sub->add_option("--lambdas,--lambda", o.lambdas, "Principal type(s) lambda, comma separated")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
  };
  auto ns = [&](CLI::App* sub) {
    sub->add_option("--ns,--n", o.ns, "Agent count(s) for optn and fixn, comma separated")
        ->delimiter(',')
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  };
  auto prize = [&](CLI::App* sub) {
    sub->add_option("--prize", o.prize, "Fixed prize Z")->check(CLI::PositiveNumber);
  };

  CLI::App* solve = app.add_subcommand("solve", "Equilibrium strategies (and optimal prizes) to CSV");
  mechanism(solve, false);
  lambdas(solve);
  ns(solve);
  prize(solve);
  solve->add_option("--points", o.points, "Rows per agent")->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));

  CLI::App* prize_cmd = app.add_subcommand("prize", "Optimal prize schedules (opt) or optimal fixed prizes");
  mechanism(prize_cmd, true);
  lambdas(prize_cmd);
  ns(prize_cmd);
  prize_cmd->add_option("--points", o.points, "Rows per agent")->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));

  CLI::App* profit = app.add_subcommand("profit", "Principal's profit over lambda and n sweeps");
  mechanism(profit, true);
  lambdas(profit);
  ns(profit);
  prize(profit);

  CLI::App* verify = app.add_subcommand("verify", "Best-response, IR, monotonicity and autonomy checks");
  mechanism(verify, false);
  lambdas(verify);
  ns(verify);
  prize(verify);
  verify->add_option("--perturb", o.perturb, "Shift every strategy by this effort before checking");
  verify->add_option("--types", o.types, "Type grid size")->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  verify->add_option("--bids", o.bids, "Bid grid size")->check(CLI::Range(std::size_t{3}, std::size_t{1000000}));

  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo estimate of the profit");
  mechanism(mc, true);
  lambdas(mc);
  ns(mc);
  prize(mc);
  mc->add_option("--trials", o.trials, "Simulated contests")->check(CLI::PositiveNumber);
  mc->add_option("--workers", o.workers, "Threads (0 = all cores)");

  CLI::App* figures = app.add_subcommand("figures", "fig1.csv .. fig4.csv for the built-in case study");

  for (CLI::App* sub : {solve, prize_cmd, profit, verify, mc, figures}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(o, out);
    if (*prize_cmd) return cmd_prize(o, out);
    if (*profit) return cmd_profit(o, out, err);
    if (*verify) return cmd_verify(o, out);
    if (*mc) return cmd_mc(o, out);
    if (*figures) return cmd_figures(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace allpay
