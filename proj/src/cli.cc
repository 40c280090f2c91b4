// Copyright 2026 The Shopbot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shopbot/cli.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"
#include "shopbot/scenario.h"

namespace shopbot::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string shortest(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

ordered_json report_fields(const RegimeReport& report) {
  ordered_json j;
  j["classification"] = std::string(regime_name(report.classification));
  j["cycle_count"] = report.cycle_count;
  j["mean_trough"] = report.mean_trough;
  j["mean_peak"] = report.mean_peak;
  j["window_mean_price"] = report.window_mean_price;
  j["window_cv"] = report.window_cv;
  return j;
}

ordered_json load_fields(const LoadReport& load) {
  ordered_json j;
  j["robot_queries"] = load.robot_queries;
  j["total_queries"] = load.total_queries;
  j["robot_fraction"] = load.robot_fraction;
  j["harm_flag"] = load.harm_flag;
  return j;
}

ordered_json counts_fields(const LedgerReport::Counts& c) {
  ordered_json j;
  j["compliant"] = c.compliant;
  j["breach"] = c.breach;
  j["unassented"] = c.unassented;
  j["throttled"] = c.throttled;
  return j;
}

// Maps every failure to its exit code and prints one diagnostic line.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

ScenarioConfig load_simulation(const fs::path& path, const SimulateOptions& options) {
  ScenarioConfig config = load_scenario(path);
  if (!config.has_sellers) throw ConfigError("sellers: required for simulate");
  if (options.seed) config.seed = *options.seed;
  if (options.ticks) {
    if (*options.ticks < 1) throw ConfigError("ticks: must be at least 1");
    config.ticks = *options.ticks;
  }
  return config;
}

void write_run(const fs::path& dir, const RunResult& result, const PriceGrid& grid) {
  make_dir(dir);
  write_file(dir / "prices.csv", prices_csv(result, grid));
  write_file(dir / "summary.json", summary_json(result));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument(what + ": not a number: '" + text + "'");
  }
  return value;
}

std::vector<AccessRequest> read_history(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<AccessRequest> requests;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("time,", 0) == 0) continue;
    const std::vector<std::string> f = split_csv(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() != 5) throw ConfigError(where + ": expected time,agent,path,purpose,fraction");
    AccessRequest r;
    r.time = parse_number<std::int64_t>(f[0], where + ": time");
    r.agent_token = f[1];
    r.origin_address = f[1];
    r.path = f[2];
    r.declared_purpose = f[3];
    r.catalog_fraction_fetched = parse_number<double>(f[4], where + ": fraction");
    requests.push_back(std::move(r));
  }
  return requests;
}

}  // namespace

std::string prices_csv(const RunResult& result, const PriceGrid& grid) {
  std::string out = "tick,seller_id,price,profit\n";
  for (const TickRecord& rec : result.series) {
    for (std::size_t i = 0; i < rec.prices.size(); ++i) {
      out += std::to_string(rec.tick);
      out += ',';
      out += std::to_string(i);
      out += ',';
      out += grid.format(rec.prices[i]);
      out += ',';
      out += shortest(rec.profits[i]);
      out += '\n';
    }
  }
  return out;
}

std::string summary_json(const RunResult& result) {
  ordered_json j = report_fields(result.report);
  if (result.summary.dispersion) {
    ordered_json d;
    d["range_ratio"] = result.summary.dispersion->range_ratio;
    d["coeff_variation"] = result.summary.dispersion->coeff_variation;
    j["price_dispersion"] = d;
  } else {
    j["price_dispersion"] = nullptr;
  }
  j["consumer_surplus"] = result.summary.consumer_surplus;
  j["mean_profit"] = result.summary.mean_profit;
  j["seed"] = result.summary.seed;
  j["ticks"] = result.summary.ticks;
  j["window_ticks"] = result.summary.window_ticks;
  return j.dump(2) + "\n";
}

std::string events_csv(const TrafficResult& result) {
  std::string out = "tick,address,agent,path,outcome\n";
  for (const TrafficEvent& e : result.ledger.events) {
    out += std::to_string(e.tick) + ',' + e.address + ',' + e.agent + ',' + e.path + ',' +
           std::string(outcome_name(e.outcome)) + '\n';
  }
  return out;
}

std::string load_json(const TrafficResult& result) {
  ordered_json j = load_fields(result.overall);
  ordered_json windows = ordered_json::array();
  for (const LoadWindow& w : result.windows) {
    ordered_json row;
    row["start_tick"] = w.start_tick;
    row["end_tick"] = w.end_tick;
    row.update(load_fields(w.load));
    windows.push_back(row);
  }
  j["windows"] = windows;
  ordered_json aggregate = ordered_json::array();
  for (const AggregateLoad& a : result.aggregate) {
    ordered_json row;
    row["robot_count"] = a.robot_count;
    row["per_robot_fraction"] = a.per_robot_fraction;
    row["robot_fraction"] = a.robot_fraction;
    row["harm_flag"] = a.harm_flag;
    aggregate.push_back(row);
  }
  j["aggregate_load"] = aggregate;
  j["blocklist"] = result.ledger.blocklist;
  const LedgerReport report = ledger_report(result.protocol);
  j["protocol"] = counts_fields(report.totals);
  if (result.metasite) {
    ordered_json m;
    m["metasite_total"] = result.metasite->metasite_total;
    m["vendor_total"] = result.metasite->vendor_total;
    m["total"] = result.metasite->total;
    j["metasite"] = m;
  }
  return j.dump(2) + "\n";
}

std::string decision_json(const AccessDecision& decision) {
  ordered_json j;
  j["verdict"] = std::string(verdict_name(decision.verdict));
  if (decision.reason) {
    j["reason"] = std::string(deny_reason_name(*decision.reason));
  } else {
    j["reason"] = nullptr;
  }
  j["retry_after"] = decision.retry_after;
  return j.dump() + "\n";
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.sweep.empty()) {
      const ScenarioConfig config = load_simulation(options.config, options);
      const RunResult result = run(config.simulation, config.ticks, config.seed);
      write_run(options.out_dir, result, config.simulation.market.grid());
      out << regime_name(result.report.classification) << "\n";
      return kExitOk;
    }

    std::vector<RunRequest> requests;
    std::vector<fs::path> dirs;
    std::set<std::string> used;
    for (std::size_t i = 0; i < options.sweep.size(); ++i) {
      const ScenarioConfig config = load_simulation(options.sweep[i], options);
      requests.push_back({config.simulation, config.ticks, config.seed, {}});
      std::string name = options.sweep[i].stem().string();
      if (!used.insert(name).second) {
        name += "-" + std::to_string(i);
        used.insert(name);
      }
      dirs.push_back(options.out_dir / name);
    }
    const unsigned threads =
        options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::vector<RunResult> results = run_many(requests, threads);
    for (std::size_t i = 0; i < results.size(); ++i) {
      write_run(dirs[i], results[i], requests[i].config.market.grid());
      out << dirs[i].filename().string() << " "
          << regime_name(results[i].report.classification) << "\n";
    }
    return kExitOk;
  });
}

int cmd_robots_parse(const fs::path& policy, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = read_file(policy);
    try {
      const ExclusionPolicy parsed = parse_policy(text);
      for (const std::string& w : parsed.warnings) err << "warning: " << w << "\n";
      out << serialize_policy(parsed);
      return kExitOk;
    } catch (const PolicyParseError& e) {
      err << policy.string() << ":" << e.line() << ": " << e.what() << "\n";
      return kExitInvalid;
    }
  });
}

int cmd_robots_check(const CheckOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = read_file(options.policy);
    ExclusionPolicy policy;
    try {
      policy = parse_policy(text);
    } catch (const PolicyParseError& e) {
      err << options.policy.string() << ":" << e.line() << ": " << e.what() << "\n";
      return kExitInvalid;
    }
    std::vector<AccessRequest> history;
    if (options.history) history = read_history(*options.history);

    AccessRequest request;
    request.agent_token = options.agent;
    request.origin_address = options.agent;
    request.path = options.path;
    request.declared_purpose = options.purpose;
    request.catalog_fraction_fetched = options.fraction;
    request.time = options.time.value_or(history.empty() ? 0 : history.back().time);

    AssentLedger ledger;
    if (!options.unassented) {
      std::int64_t start = request.time;
      std::vector<std::string> agents = {options.agent};
      for (const AccessRequest& h : history) {
        start = std::min(start, h.time);
        agents.push_back(h.agent_token);
      }
      for (const std::string& agent : agents) {
        AccessRequest fetch;
        fetch.agent_token = agent;
        fetch.origin_address = agent;
        fetch.path = "/robots.txt";
        fetch.time = start;
        evaluate_access(policy, fetch, ledger);
      }
    }
    for (const AccessRequest& h : history) evaluate_access(policy, h, ledger);
    const AccessDecision decision = evaluate_access(policy, request, ledger);
    out << decision_json(decision);
    switch (decision.verdict) {
      case Verdict::kAllow:
        return kExitOk;
      case Verdict::kDeny:
        return kExitDeny;
      case Verdict::kThrottle:
        return kExitThrottle;
    }
    return kExitOk;
  });
}

int cmd_traffic(const fs::path& config_path, const fs::path& out_dir, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig config = load_scenario(config_path);
    if (!config.traffic) throw ConfigError("traffic: required for traffic");
    const TrafficResult result = run_traffic(*config.traffic);
    make_dir(out_dir);
    write_file(out_dir / "events.csv", events_csv(result));
    write_file(out_dir / "load.json", load_json(result));
    out << "robot_fraction " << shortest(result.overall.robot_fraction) << "\n";
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shopbot market and robot-traffic simulator", "shopbot"};
  app.require_subcommand(1);

  SimulateOptions sim;
  std::uint64_t seed = 0;
  std::int64_t ticks = 0;
  std::string config_path;
  std::string out_path;
  std::vector<std::string> sweep;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a market simulation");
  simulate->add_option("--config", config_path, "Scenario JSON");
  simulate->add_option("--out", out_path, "Output directory")->required();
  CLI::Option* seed_opt = simulate->add_option("--seed", seed, "Override the scenario seed");
  CLI::Option* ticks_opt = simulate->add_option("--ticks", ticks, "Override the run length");
  simulate->add_option("--sweep", sweep, "Run several scenarios in parallel");
  simulate->add_option("--threads", sim.threads, "Worker threads for --sweep");

  CLI::App* robots = app.add_subcommand("robots", "Parse or evaluate exclusion policies");
  robots->require_subcommand(1);
  std::string parse_file;
  CLI::App* parse = robots->add_subcommand("parse", "Print the canonical policy");
  parse->add_option("policy", parse_file, "Policy file")->required();

  CheckOptions check;
  std::string check_file;
  std::string history_file;
  std::int64_t check_time = 0;
  CLI::App* check_cmd = robots->add_subcommand("check", "Evaluate one request");
  check_cmd->add_option("policy", check_file, "Policy file")->required();
  check_cmd->add_option("--agent", check.agent, "Agent token")->required();
  check_cmd->add_option("--path", check.path, "Request path");
  check_cmd->add_option("--purpose", check.purpose, "Declared purpose");
  check_cmd->add_option("--history", history_file, "Prior requests CSV");
  CLI::Option* time_opt = check_cmd->add_option("--time", check_time, "Request time, seconds");
  check_cmd->add_option("--fraction", check.fraction, "Catalog fraction fetched so far");
  check_cmd->add_flag("--unassented", check.unassented, "Agent never fetched the policy");

  std::string traffic_config;
  std::string traffic_out;
  CLI::App* traffic = app.add_subcommand("traffic", "Run a robot-traffic scenario");
  traffic->add_option("--config", traffic_config, "Scenario JSON")->required();
  traffic->add_option("--out", traffic_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (simulate->parsed()) {
    if (config_path.empty() == sweep.empty()) {
      err << "error: simulate needs exactly one of --config or --sweep\n";
      return kExitInvalid;
    }
    sim.config = config_path;
    sim.out_dir = out_path;
    if (*seed_opt) sim.seed = seed;
    if (*ticks_opt) sim.ticks = ticks;
    sim.sweep.assign(sweep.begin(), sweep.end());
    return cmd_simulate(sim, out, err);
  }
  if (parse->parsed()) return cmd_robots_parse(parse_file, out, err);
  if (check_cmd->parsed()) {
    check.policy = check_file;
    if (!history_file.empty()) check.history = fs::path(history_file);
    if (*time_opt) check.time = check_time;
    return cmd_robots_check(check, out, err);
  }
  return cmd_traffic(traffic_config, traffic_out, out, err);
}

}  // namespace shopbot::cli
