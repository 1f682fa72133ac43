// chipgame: command-line front end for the chip-game solver.
//
//   chipgame value     --game jm1 -a 1 -h 2 -n 75 -q 0.429056 [--check]
//   chipgame policy    --game jm2 --start 0,0 -n 20 -q 0.35
//   chipgame threshold --game jm2 --start 0,0 --nmax 150 --lo 0.30 --hi 0.35 --tol 1e-6
//   chipgame sweep     --game jm2 --start 0,0 -n 146 --lo 0.30 --hi 0.35 --step 0.01
//   chipgame simulate  --game jm2 --start 0,0 -n 100 -q 0.35 --trials 100000 --seed 1
//   chipgame verify    [--suite paper-numbers|fairness|oracles|montecarlo|all]
//
// Exit status: 0 success, 1 failed verification, 2 bad parameters,
// 3 internal consistency failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "chipgame/chipgame.hpp"
#include "chipgame/json_io.hpp"
#include "chipgame/verify.hpp"

namespace {

using namespace chipgame;

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kBadParams = 2, kInternal = 3 };

class BadParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string game;
  Chips a = 0;
  Chips h = 0;
  std::string start;
  Budget n = 0;
  std::optional<Budget> n_min;
  Budget n_max = kDefaultThresholdHorizon;
  std::string q;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  double tol = 1e-6;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
  std::string suite = "all";
  std::string format = "json";
  std::string output;
  bool check = false;
};

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

GameVariant variant_of(const RunConfig& cfg) {
  if (cfg.game.empty()) throw BadParameter("--game is required (jm1, jm2 or jm3)");
  auto v = parse_variant(cfg.game);
  if (!v) throw BadParameter("--game must be jm1, jm2 or jm3, got '" + cfg.game + "'");
  return *v;
}

double q_of(const RunConfig& cfg) {
  if (cfg.q.empty()) throw BadParameter("-q is required");
  std::size_t used = 0;
  double q = 0.0;
  try {
    q = std::stod(cfg.q, &used);
  } catch (const std::exception&) {
    throw BadParameter("-q is not a number: '" + cfg.q + "'");
  }
  if (used != cfg.q.size()) throw BadParameter("-q is not a number: '" + cfg.q + "'");
  if (!(q >= 0.0 && q < 0.5)) throw BadParameter("q must lie in [0, 0.5), got " + cfg.q);
  return q;
}

// --start "a,h" if given, else -a/-h.
GameState start_of(const RunConfig& cfg) {
  if (cfg.start.empty()) return GameState{cfg.a, cfg.h};
  unsigned long a = 0;
  unsigned long h = 0;
  char comma = 0;
  std::istringstream in(cfg.start);
  if (!(in >> a >> comma >> h) || comma != ',' || !in.eof()) {
    throw BadParameter("--start must look like a,h (e.g. 0,0), got '" + cfg.start + "'");
  }
  return GameState{Chips(a), Chips(h)};
}

bool csv(const RunConfig& cfg) { return cfg.format == "csv"; }

int cmd_value(const RunConfig& cfg, std::ostream& out) {
  const GameVariant v = variant_of(cfg);
  const double q = q_of(cfg);
  const GameState s = start_of(cfg);
  const double val = value(v, s.a, s.h, cfg.n, q);
  if (csv(cfg)) {
    out << "game,a,h,n,q,value\n"
        << to_string(v) << ',' << s.a << ',' << s.h << ',' << cfg.n << ',' << fmt17(q) << ','
        << fmt17(val) << '\n';
    return kOk;
  }
  auto j = value_json(v, s, cfg.n, q, val);
  if (cfg.check) {
    if (cfg.n <= kExpectimaxHorizonCap) {
      const Rational qr = parse_rational(cfg.q);
      const Rational ex = exact_value(v, s.a, s.h, cfg.n, qr);
      j["expectimax"] = expectimax_oracle(v, s.a, s.h, cfg.n, q);
      j["exact"] = ex.str();
      j["exact_double"] = ex.convert_to<double>();
    } else {
      j["cross_check"] = "skipped: needs n <= " + std::to_string(kExpectimaxHorizonCap);
    }
  }
  out << j.dump() << '\n';
  return kOk;
}

int cmd_policy(const RunConfig& cfg, std::ostream& out) {
  const GameVariant v = variant_of(cfg);
  const double q = q_of(cfg);
  const Policy pol = extract_policy(solve(v, q, cfg.n, start_of(cfg)));
  if (csv(cfg)) {
    out << "a,h,n,action\n";
    pol.for_each_choice([&](GameState s, Budget n, Action act) {
      out << s.a << ',' << s.h << ',' << n << ',' << to_string(act) << '\n';
    });
    return kOk;
  }
  out << to_json(pol).dump() << '\n';
  return kOk;
}

int cmd_threshold(const RunConfig& cfg, std::ostream& out) {
  const GameVariant v = variant_of(cfg);
  const GameState s = start_of(cfg);
  const auto br = critical_q(v, s, cfg.n_max, cfg.lo, cfg.hi, cfg.tol);
  if (csv(cfg)) {
    out << "game,a,h,n_max,q_lo,q_hi,n_star,value\n" << to_string(v) << ',' << s.a << ',' << s.h
        << ',' << cfg.n_max << ',';
    if (br) {
      out << fmt17(br->q_lo) << ',' << fmt17(br->q_hi) << ',' << br->witness_at_hi.n_star << ','
          << fmt17(br->witness_at_hi.value) << '\n';
    } else {
      out << ",,,\n";
    }
    return kOk;
  }
  out << threshold_json(v, s, cfg.n_max, br).dump() << '\n';
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const GameVariant v = variant_of(cfg);
  const GameState s = start_of(cfg);
  const Budget n_min = cfg.n_min.value_or(cfg.n);
  if (n_min > cfg.n) throw BadParameter("--nmin must not exceed -n");
  std::vector<double> qs;
  try {
    qs = q_grid(cfg.lo, cfg.hi, cfg.step);
  } catch (const std::invalid_argument& e) {
    throw BadParameter(e.what());
  }
  nlohmann::json rows = nlohmann::json::array();
  if (csv(cfg)) out << "q,n,value\n";
  for (double q : qs) {
    const auto table = solve(v, q, cfg.n, s, Retention::start_trace);
    for (Budget n = n_min; n <= cfg.n; ++n) {
      if (csv(cfg)) {
        out << fmt17(q) << ',' << n << ',' << fmt17(table.start_value(n)) << '\n';
      } else {
        rows.push_back(value_json(v, s, n, q, table.start_value(n)));
      }
    }
  }
  if (!csv(cfg)) out << rows.dump() << '\n';
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const GameVariant v = variant_of(cfg);
  const double q = q_of(cfg);
  const GameState s = start_of(cfg);
  if (cfg.trials == 0) throw BadParameter("--trials must be at least 1");
  const Policy pol = extract_policy(solve(v, q, cfg.n, s));
  const SimStats st = simulate(v, pol, q, cfg.n, s, cfg.trials, cfg.seed);
  if (csv(cfg)) {
    out << "trials,mean,stderr,min,max,seed\n"
        << st.trials << ',' << fmt17(st.mean) << ',' << fmt17(st.std_error) << ','
        << fmt17(st.min) << ',' << fmt17(st.max) << ',' << st.seed << '\n';
    return kOk;
  }
  out << to_json(st).dump() << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto suite = parse_suite(cfg.suite);
  if (!suite) throw BadParameter("--suite must be paper-numbers, fairness, oracles, montecarlo or all");
  bool ok = true;
  run_suite(*suite, [&](const CheckResult& r) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n' << std::flush;
    ok = ok && r.passed;
  });
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver for the chip games modelling deviant Bitcoin mining"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Read key = value options from a file");
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--game", cfg.game, "Game variant: jm1, jm2 or jm3");
  app.add_option("-a", cfg.a, "Player chips");
  app.add_option("-h", cfg.h, "Bank chips");
  app.add_option("--start", cfg.start, "Start state as a,h (overrides -a/-h)");
  app.add_option("-n", cfg.n, "Action budget (horizon)");
  app.add_option("--nmin", cfg.n_min, "Smallest horizon emitted by sweep");
  app.add_option("--nmax", cfg.n_max, "Horizon searched for bias witnesses");
  app.add_option("-q", cfg.q, "Tails probability (attacker hash share), in [0, 0.5)");
  app.add_option("--lo", cfg.lo, "Lower end of the q range");
  app.add_option("--hi", cfg.hi, "Upper end of the q range");
  app.add_option("--step", cfg.step, "Grid step in q");
  app.add_option("--tol", cfg.tol, "Bracket width for threshold search");
  app.add_option("--trials", cfg.trials, "Number of simulated games");
  app.add_option("--seed", cfg.seed, "Simulation seed");
  app.add_option("--suite", cfg.suite, "Verification suite");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output", cfg.output, "Write to this file instead of standard output");
  app.add_flag("--check", cfg.check, "value: also run expectimax and exact cross-checks (n <= 20)");

  int (*handler)(const RunConfig&, std::ostream&) = nullptr;
  auto sub = [&](const char* name, const char* desc, int (*fn)(const RunConfig&, std::ostream&)) {
    app.add_subcommand(name, desc)->fallthrough()->callback([&handler, fn] { handler = fn; });
  };
  sub("value", "Maximal expected net income E(a,h,n,q)", cmd_value);
  sub("policy", "Optimal action at every reachable state", cmd_policy);
  sub("threshold", "Bracket the critical hashrate by bisection", cmd_threshold);
  sub("sweep", "Values over a q grid (CSV q,n,value)", cmd_sweep);
  sub("simulate", "Monte Carlo play of the optimal policy", cmd_simulate);
  sub("verify", "Run the built-in check suites", cmd_verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadParams;
  }

  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      std::cerr << "error: cannot open output file '" << cfg.output << "'\n";
      return kBadParams;
    }
  }
  std::ostream& out = cfg.output.empty() ? std::cout : file;

  try {
    return handler(cfg, out);
  } catch (const NonMonotoneThreshold& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadParams;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadParams;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}
