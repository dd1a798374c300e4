// Command-line front end: Monte Carlo sweeps, threshold location, resource
// accounting, fusion planning, loss budgeting and optics self-checks, with
// deterministic seeding and json/csv record output.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mtqc/format.hpp"
#include "mtqc/montecarlo.hpp"
#include "mtqc/optics.hpp"
#include "mtqc/resources.hpp"

using json = nlohmann::ordered_json;
using namespace mtqc;

namespace {

struct CommonOpts {
  std::uint64_t seed = 42;
  int workers = 0;  // 0 = all available
  std::string output;
  std::string format = "json";
  std::string config_path;
  bool paper_constants = false;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--seed", c.seed, "master seed, 64-bit unsigned")->capture_default_str();
  cmd->add_option("--workers", c.workers, "worker threads; 0 = available parallelism")
      ->capture_default_str();
  cmd->add_option("-o,--output", c.output, "write records to this file instead of stdout");
  cmd->add_option("--format", c.format, "record encoding")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_flag("--paper-constants", c.paper_constants,
                "evaluate splitter successes with the linearized (1-2*eta)/2 model");
  cmd->add_option("--config", c.config_path,
                  "key=value file pre-populating flags; explicit flags win");
}

std::string trimmed(const std::string& text) {
  auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

// Expands `--config FILE` by appending one `--key=value` token per config
// line whose key was not already given on the command line, so explicit
// flags always win. Lines starting with # or ; are comments.
void apply_config_file(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");

  auto given = [&args](const std::string& key) {
    std::string full = "--" + key;
    for (const std::string& a : args)
      if (a == full || a.rfind(full + "=", 0) == 0 || (key == "output" && a == "-o"))
        return true;
    return false;
  };

  std::string line;
  while (std::getline(in, line)) {
    line = trimmed(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line '" + line + "' is not key=value");
    std::string key = trimmed(line.substr(0, eq));
    std::string value = trimmed(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config line '" + line + "' has no key");
    if (key == "config") continue;
    if (!given(key)) args.push_back("--" + key + "=" + value);
  }
}

struct NoiseOpts {
  std::string variant = "mtqc2";
  int n = 8;
  int m = 2;
  int N_rep = 1;
  double eta = 0.0;
  bool half_rate_removal = false;

  Variant variant_enum() const {
    return variant == "mtqc1" ? Variant::mtqc1 : Variant::mtqc2;
  }
  NoiseParams params() const {
    NoiseParams p;
    p.eta = eta;
    p.n = n;
    p.m = m;
    p.N_rep = N_rep;
    p.variant = variant_enum();
    p.mtqc2_half_rate_removal = half_rate_removal;
    return p;
  }
};

void add_noise(CLI::App* cmd, NoiseOpts& o) {
  cmd->add_option("--variant", o.variant, "protocol variant")
      ->check(CLI::IsMember({"mtqc1", "mtqc2"}))
      ->capture_default_str();
  cmd->add_option("--n", o.n, "photons per fusion")->capture_default_str();
  cmd->add_option("--m", o.m, "photons per lattice qubit")->capture_default_str();
  cmd->add_option("--N-rep", o.N_rep, "repetition blocks per lattice qubit (odd)")
      ->capture_default_str();
  cmd->add_option("--eta", o.eta, "per-photon loss rate")->capture_default_str();
  cmd->add_flag("--half-rate-removal", o.half_rate_removal,
                "alternative mtqc2 removal model with four half-rate exposures");
}

// "a", "a,b,c" or "lo:hi:step" (inclusive endpoints).
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0) ||
        hi < lo)
      throw std::invalid_argument("bad grid '" + text + "', expected lo:hi:step");
    int points = static_cast<int>((hi - lo) / step + 1e-9) + 1;
    for (int i = 0; i < points; ++i) out.push_back(lo + i * step);
    return out;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty grid '" + text + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + text + "'");
  return out;
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

std::string encode_records(const std::vector<json>& records, const std::string& format) {
  if (format == "json") {
    json arr = json::array();
    for (const json& r : records) arr.push_back(r);
    return arr.dump(2) + "\n";
  }
  std::ostringstream out;
  if (records.empty()) return "";
  for (auto it = records.front().begin(); it != records.front().end(); ++it)
    out << (it == records.front().begin() ? "" : ",") << it.key();
  out << '\n';
  for (const json& r : records) {
    bool first = true;
    for (const auto& kv : r.items()) {
      out << (first ? "" : ",") << csv_cell(kv.value());
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
}

struct SweepPoint {
  int d;
  double p_z;
  SimResult result;
};

// Runs one job per (d, p_z) grid point; the per-point seed is derived from
// the master seed and the point index, so the sweep shape never perturbs the
// samples of other points.
std::vector<SweepPoint> run_sweep(const std::vector<int>& ds,
                                  const std::vector<double>& pz_grid,
                                  const NoiseOpts& noise, std::optional<int> T_override,
                                  std::optional<double> pf_override, long long trials,
                                  const CommonOpts& common) {
  std::vector<SweepPoint> points;
  std::uint64_t index = 0;
  for (int d : ds) {
    for (double pz : pz_grid) {
      SimJob job;
      job.lattice = T_override ? LatticeConfig{d, *T_override}
                               : LatticeConfig::with_default_time(d);
      job.noise = noise.params();
      job.p_z_override = pz;
      job.p_f_override = pf_override;
      job.trials = trials;
      job.seed = substream(common.seed, index++).next();
      job.validate();
      points.push_back({d, pz, run_job(job, common.workers)});
    }
  }
  return points;
}

json point_record(const SweepPoint& p, const NoiseOpts& noise, long long trials,
                  const CommonOpts& common, int T_used) {
  json r;
  r["variant"] = noise.variant;
  r["d"] = p.d;
  r["T"] = T_used;
  r["n"] = noise.n;
  r["m"] = noise.m;
  r["N_rep"] = noise.N_rep;
  r["eta"] = noise.eta;
  r["p_f"] = p.result.p_f;
  r["p_Z"] = p.result.p_z;
  r["trials"] = trials;
  r["logical_loss_rate"] = p.result.logical_loss_rate;
  r["p_L"] = p.result.p_L;
  r["ci99"] = p.result.ci99;
  r["seed"] = common.seed;
  return r;
}

int cmd_simulate(const CommonOpts& common, const NoiseOpts& noise, const std::string& d_list,
                 const std::string& pz_text, std::optional<int> T_override,
                 std::optional<double> pf_override, long long trials) {
  std::vector<int> ds = parse_int_list(d_list);
  std::vector<double> pz_grid;
  if (!pz_text.empty()) {
    pz_grid = parse_grid(pz_text);
  } else {
    NoiseParams p = noise.params();
    pz_grid = {encoded_dephasing(dephasing_rate(p.eta, p.m), p.N_rep)};
  }
  std::vector<SweepPoint> points =
      run_sweep(ds, pz_grid, noise, T_override, pf_override, trials, common);
  std::vector<json> records;
  for (const SweepPoint& p : points) {
    int T_used = T_override ? *T_override : 4 * p.d + 1;
    records.push_back(point_record(p, noise, trials, common, T_used));
    std::cerr << "d=" << p.d << " T=" << T_used << " p_Z=" << format_double(p.p_z)
              << " p_L=" << format_double(p.result.p_L) << " +-"
              << format_double(p.result.ci99)
              << " loss=" << format_double(p.result.logical_loss_rate) << '\n';
  }
  write_output(encode_records(records, common.format), common.output);
  return 0;
}

int cmd_threshold(const CommonOpts& common, const NoiseOpts& noise,
                  const std::string& d_list, const std::string& pz_text,
                  std::optional<int> T_override, std::optional<double> pf_override,
                  long long trials, int N_enc) {
  std::vector<int> ds = parse_int_list(d_list);
  std::vector<double> pz_grid = parse_grid(pz_text);
  std::vector<SweepPoint> points =
      run_sweep(ds, pz_grid, noise, T_override, pf_override, trials, common);

  std::map<int, ThresholdCurve> curves;
  for (const SweepPoint& p : points) {
    ThresholdCurve& c = curves[p.d];
    c.d = p.d;
    c.p_z.push_back(p.p_z);
    c.p_L.push_back(p.result.p_L);
    std::cerr << "d=" << p.d << " p_Z=" << format_double(p.p_z)
              << " p_L=" << format_double(p.result.p_L) << " +-"
              << format_double(p.result.ci99) << '\n';
  }
  std::vector<ThresholdCurve> list;
  for (auto& [d, c] : curves) list.push_back(std::move(c));
  ThresholdEstimate est = find_threshold(std::move(list));
  if (!est.found) {
    std::cerr << est.diagnostic << '\n';
    return 2;
  }

  double eta_th = threshold_to_loss(est.p_z_th, noise.m, 1);
  double eta_th_enc = threshold_to_loss(est.p_z_th, noise.m, N_enc);
  std::cerr << "threshold p_Z = " << format_double(est.p_z_th) << " +- "
            << format_double(est.uncertainty) << " (loss " << format_double(eta_th)
            << " unencoded, " << format_double(eta_th_enc) << " with N_rep=" << N_enc
            << ")\n";

  json r;
  r["variant"] = noise.variant;
  r["n"] = noise.n;
  r["m"] = noise.m;
  r["eta"] = noise.eta;
  r["trials"] = trials;
  r["p_z_th"] = est.p_z_th;
  r["uncertainty"] = est.uncertainty;
  r["eta_th"] = eta_th;
  r["N_enc"] = N_enc;
  r["eta_th_encoded"] = eta_th_enc;
  r["seed"] = common.seed;
  write_output(encode_records({r}, common.format), common.output);
  return 0;
}

int cmd_resources(const CommonOpts& common, const NoiseOpts& noise, bool encoded, int d) {
  CostModel model = common.paper_constants ? CostModel::linearized : CostModel::exact;
  double star = star_cost(noise.n, noise.m, noise.eta, noise.variant_enum(), encoded, model);
  double central = encoded ? enc_cost(noise.m, noise.eta, model)
                           : ghz_cost(noise.m + 2, noise.eta, model);
  json r;
  r["variant"] = noise.variant;
  r["n"] = noise.n;
  r["m"] = noise.m;
  r["eta"] = noise.eta;
  r["encoded"] = encoded;
  r["cost_model"] = common.paper_constants ? "linearized" : "exact";
  r["ghz_arm"] = ghz_cost(noise.n + 1, noise.eta, model);
  r["ghz_head"] = ghz_cost(noise.n + 2, noise.eta, model);
  r["central_cost"] = central;
  r["star_cost"] = star;
  r["d"] = d;
  r["gate_qubits"] = count_lattice_qubits_for_gate(d);
  r["gate_overhead"] = d > 0 ? gate_overhead(noise.n, noise.m, noise.eta,
                                             noise.variant_enum(), encoded, d, model)
                             : 0.0;
  std::cerr << "star cost " << format_double(star) << " three-photon states ("
            << r["cost_model"].get<std::string>() << " model)\n";
  write_output(encode_records({r}, common.format), common.output);
  return 0;
}

int cmd_plan_ghz(const CommonOpts& common, int m, double eta) {
  GhzPlan plan = plan_ghz(m);
  CostModel model = common.paper_constants ? CostModel::linearized : CostModel::exact;
  std::cerr << "GHZ_" << m << ": " << plan.leaf_count() << " ingredients, depth "
            << plan.depth() << ", lossless cost " << format_double(ghz_cost_closed_form(m))
            << ", cost at eta=" << format_double(eta) << ": "
            << format_double(ghz_cost(m, eta, model)) << '\n';
  std::vector<json> records;
  for (std::size_t round = 0; round < plan.rounds.size(); ++round)
    for (const GhzPlan::Fusion& f : plan.rounds[round]) {
      json r;
      r["round"] = round;
      r["left"] = f.left;
      r["right"] = f.right;
      r["result"] = f.result();
      records.push_back(r);
    }
  write_output(encode_records(records, common.format), common.output);
  return 0;
}

int cmd_loss_budget(const CommonOpts& common, double eta_total, int kappa,
                    std::optional<double> pz_th, int m) {
  double total = eta_total;
  if (pz_th) total = invert_dephasing_rate(*pz_th, m);
  LossBudget b = balanced_budget(total, kappa);
  json r;
  r["eta_total"] = total;
  r["kappa"] = kappa;
  r["eta_soc"] = b.eta_soc;
  r["eta_dly"] = b.eta_dly;
  r["eta_swc"] = b.eta_swc;
  r["eta_det"] = b.eta_det;
  r["eta_s"] = b.eta_s;
  std::cerr << "budget for eta_total=" << format_double(total) << " at kappa=" << kappa
            << ": component " << format_double(b.eta_soc) << ", delay "
            << format_double(b.eta_dly) << ", per-switch " << format_double(b.eta_s)
            << '\n';
  write_output(encode_records({r}, common.format), common.output);
  return 0;
}

int cmd_verify_optics(const CommonOpts& common, long long trials, int n_max, double eta) {
  std::vector<json> records;
  bool all_pass = true;
  auto report = [&](const std::string& check, int n, double eta_used, double expected,
                    double observed, bool pass) {
    json r;
    r["check"] = check;
    r["n"] = n;
    r["eta"] = eta_used;
    r["expected"] = expected;
    r["observed"] = observed;
    r["pass"] = pass;
    records.push_back(r);
    all_pass &= pass;
    std::cerr << (pass ? "ok   " : "FAIL ") << check << " n=" << n
              << " eta=" << format_double(eta_used) << " expected "
              << format_double(expected) << " observed " << format_double(observed)
              << '\n';
  };

  for (int n = 1; n <= n_max; ++n) {
    double expect = 1.0 - std::pow(2.0, -n);
    double got = enumerated_nbsm_success_rate(n);
    report("enumerated_success", n, 0.0, expect, got, got == expect);
  }
  for (int n : {2, n_max}) {
    NbsmStats stats = simulate_nbsm(n, eta, trials, substream(common.seed, n));
    double expect = nbsm_failure_rate(eta, n);
    double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(trials));
    bool pass = std::abs(stats.failure_rate() - expect) <= 3.0 * sigma;
    report("sampled_failure", n, eta, expect, stats.failure_rate(), pass);
    double inference = stats.successes
                           ? static_cast<double>(stats.correct_inferences) /
                                 static_cast<double>(stats.successes)
                           : 1.0;
    report("label_inference", n, eta, 1.0, inference, inference == 1.0);
  }
  BsTally tally = sample_bs(eta, trials, substream(common.seed, 101));
  double expect_bs = (1.0 - eta) * (1.0 - eta) / 2.0;
  double sigma_bs = std::sqrt(expect_bs * (1.0 - expect_bs) / static_cast<double>(trials));
  report("splitter_success", 1, eta, expect_bs, tally.rate(),
         std::abs(tally.rate() - expect_bs) <= 3.0 * sigma_bs);

  write_output(encode_records(records, common.format), common.output);
  return all_pass ? 0 : 1;
}

int cmd_ppo(const CommonOpts& common) {
  std::vector<json> records;
  auto add = [&](const std::string& state, double ppos) {
    json r;
    r["state"] = state;
    r["ppos"] = ppos;
    records.push_back(r);
    std::cerr << state << ": " << format_double(ppos) << '\n';
  };
  add("ghz4", ppo_cost(ppo_tree_ghz(4)));
  add("ghz9", ppo_cost(ppo_tree_ghz(9)));
  add("c3prime", ppo_cost(ppo_tree_resource_state(8, 2)));
  add("c3", ppo_cost(ppo_tree_resource_state(8, 8)));
  add("tm_c3prime", tm_round_ppo({0.25}));
  add("tm_c3", tm_round_ppo({0.25, 0.25, 0.25}));
  write_output(encode_records(records, common.format), common.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and resource toolkit for fusion-grown cluster computing"};
  app.require_subcommand(1);

  CommonOpts common;
  NoiseOpts noise;
  std::string d_list = "3";
  std::string pz_text;
  long long trials = 10000;
  std::optional<int> T_override;
  std::optional<double> pf_override;
  int N_enc = 3;
  bool encoded = false;
  int d_single = 0;
  int plan_m = 10;
  double eta_total = 0.01;
  int kappa = 3;
  std::optional<double> pz_th;
  long long optics_trials = 200000;
  int n_max = 8;

  CLI::App* sim = app.add_subcommand("simulate", "sample logical error rates on a (d, p_Z) grid");
  add_common(sim, common);
  add_noise(sim, noise);
  sim->add_option("--d", d_list, "code distances, comma separated")->capture_default_str();
  sim->add_option("--pz", pz_text, "dephasing grid: value, list or lo:hi:step");
  sim->add_option("--T", T_override, "simulating-time extent; default 4d+1");
  sim->add_option("--pf", pf_override, "override the fusion failure rate");
  sim->add_option("--trials", trials, "trials per grid point")->capture_default_str();

  CLI::App* thr = app.add_subcommand("threshold", "locate the dephasing threshold from curve crossings");
  add_common(thr, common);
  add_noise(thr, noise);
  thr->add_option("--d", d_list, "code distances, comma separated (need two or more)")
      ->capture_default_str();
  thr->add_option("--pz", pz_text, "dephasing grid: lo:hi:step or list (three or more points)")
      ->required();
  thr->add_option("--T", T_override, "simulating-time extent; default 4d+1");
  thr->add_option("--pf", pf_override, "override the fusion failure rate");
  thr->add_option("--trials", trials, "trials per grid point")->capture_default_str();
  thr->add_option("--N-enc", N_enc, "repetition blocks for the encoded loss conversion")
      ->capture_default_str();

  CLI::App* res = app.add_subcommand("resources", "three-photon-state costs per star cluster and per gate");
  add_common(res, common);
  add_noise(res, noise);
  res->add_flag("--encoded", encoded, "use the repetition-encoded central ingredient");
  res->add_option("--d", d_single, "code distance for the per-gate overhead")
      ->capture_default_str();

  CLI::App* plan = app.add_subcommand("plan-ghz", "balanced fusion schedule for one GHZ target");
  add_common(plan, common);
  plan->add_option("--m", plan_m, "GHZ target size")->capture_default_str();
  plan->add_option("--eta", eta_total, "per-photon loss rate for the cost figure")
      ->capture_default_str();

  CLI::App* budget = app.add_subcommand("loss-budget", "split a loss allowance into component budgets");
  add_common(budget, common);
  budget->add_option("--eta", eta_total, "total per-photon loss allowance")
      ->capture_default_str();
  budget->add_option("--kappa", kappa, "delay and switch depth in time steps")
      ->capture_default_str();
  budget->add_option("--pz-th", pz_th, "derive the allowance from this dephasing threshold");
  budget->add_option("--m", noise.m, "photons per lattice qubit for --pz-th")
      ->capture_default_str();

  CLI::App* optics = app.add_subcommand("verify-optics", "self-check the fusion measurement model");
  add_common(optics, common);
  optics->add_option("--trials", optics_trials, "samples per stochastic check")
      ->capture_default_str();
  optics->add_option("--n-max", n_max, "largest fusion size to enumerate")
      ->capture_default_str();
  optics->add_option("--eta", eta_total, "per-photon loss rate for sampled checks")
      ->capture_default_str();

  CLI::App* ppo = app.add_subcommand("ppo", "heralded-operation totals for the standard states");
  add_common(ppo, common);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    apply_config_file(args);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(common, noise, d_list, pz_text, T_override, pf_override, trials);
    if (thr->parsed())
      return cmd_threshold(common, noise, d_list, pz_text, T_override, pf_override, trials,
                           N_enc);
    if (res->parsed()) return cmd_resources(common, noise, encoded, d_single);
    if (plan->parsed()) return cmd_plan_ghz(common, plan_m, eta_total);
    if (budget->parsed())
      return cmd_loss_budget(common, eta_total, kappa, pz_th, noise.m);
    if (optics->parsed()) return cmd_verify_optics(common, optics_trials, n_max, eta_total);
    if (ppo->parsed()) return cmd_ppo(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "error: no subcommand selected\n";
  return 1;
}
