// bethe: command-line front end. JSON for single results, JSON lines for
// decimation traces, CSV for sweeps. Exit codes: 0 success, 1 usage or
// validation error, 2 numerical non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bethe/acceptance.hpp"
#include "bethe/bp.hpp"
#include "bethe/decimate.hpp"
#include "bethe/graph.hpp"
#include "bethe/partition.hpp"
#include "bethe/potts_fix.hpp"
#include "bethe/prediction.hpp"

using json = nlohmann::ordered_json;
using namespace bethe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotConverged = 2;

// Every flag any command reads; unset fields keep these defaults and are still
// echoed into the output.
struct RunConfig {
  std::string command;
  int q = 3;
  int d = 4;
  double beta = 1.0;
  double B = 0.0;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  long max_iter = 100000;
  int threads = 1;
  std::string out;  // empty: stdout

  std::string init = "free";

  // Graph source: a file, or a sampler on n vertices.
  std::string graph_file;
  int n = 0;
  std::string sampler = "config";

  std::vector<int> radii{1, 2};
  std::string method = "brute";
  int sweeps = 10000;
  int burn_in = 1000;
  int chains = 8;
  int grid_points = 21;

  int steps = 0;
  std::string mode = "random";
  std::string z_method = "none";
  std::string summary;

  double beta_min = 0.1, beta_max = 3.0, B_min = 0.01, B_max = 1.0;
  int beta_points = 10, B_points = 10;
};

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["q"] = c.q;
  j["d"] = c.d;
  j["beta"] = c.beta;
  j["B"] = c.B;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["threads"] = c.threads;
  j["out"] = c.out;
  if (c.command == "bp") j["init"] = c.init;
  if (c.command == "zeta" || c.command == "logz" || c.command == "decimate" || c.command == "graph sample") {
    j["graph"] = c.graph_file.empty() ? json{{"sampler", c.sampler}, {"n", c.n}} : json{{"file", c.graph_file}};
  }
  if (c.command == "zeta" || c.command == "decimate") j["t"] = c.radii;
  if (c.command == "logz") {
    j["method"] = c.method;
    j["sweeps"] = c.sweeps;
    j["burn_in"] = c.burn_in;
    j["chains"] = c.chains;
    j["grid_points"] = c.grid_points;
  }
  if (c.command == "decimate") {
    j["steps"] = c.steps;
    j["mode"] = c.mode;
    j["z"] = c.z_method;
    j["summary"] = c.summary;
  }
  if (c.command == "sweep") {
    j["beta_range"] = {c.beta_min, c.beta_max, c.beta_points};
    j["B_range"] = {c.B_min, c.B_max, c.B_points};
  }
  return j;
}

json envelope(const RunConfig& c) {
  json j;
  j["version"] = BETHE_VERSION;
  j["config"] = config_json(c);
  return j;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) fail(ErrorCode::InvalidArgument, "cannot open output file " + path);
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_json(const RunConfig& c, const json& j) {
  Output out(c.out);
  out.get() << j.dump(2) << "\n";
}

PottsParams params(const RunConfig& c) {
  PottsParams pp{c.q, c.beta, c.B};
  check_potts(pp);
  return pp;
}

MultiGraph load_graph(const RunConfig& c) {
  if (!c.graph_file.empty()) {
    std::ifstream in(c.graph_file);
    if (!in) fail(ErrorCode::BadGraphFile, "cannot open " + c.graph_file);
    return read_graph(in);
  }
  if (c.n <= 0) fail(ErrorCode::InvalidArgument, "need --graph FILE or --n N");
  if (c.sampler == "config") return sample_config_model(c.n, c.d, c.seed);
  if (c.sampler == "simple") return sample_simple_regular(c.n, c.d, c.seed);
  fail(ErrorCode::InvalidArgument, "unknown sampler " + c.sampler);
}

const char* verdict_name(const std::optional<Verdict>& v) { return v ? to_string(*v) : nullptr; }

json report_json(const FixedPointReport& r) {
  json j;
  std::optional<double> bias;
  try {
    bias = simplex_to_bias(r.h);
  } catch (const Error&) {
  }
  j["b"] = bias ? json(*bias) : json(nullptr);
  j["h"] = r.h.vec();
  j["residual"] = r.residual;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["phi"] = r.phi;
  j["phi_vx"] = r.phi_vx;
  j["phi_e"] = r.phi_e;
  j["z_h"] = r.z_h;
  j["bz_h"] = r.bz_h;
  if (r.ltype) j["ltype"] = *r.ltype;
  for (auto [key, v] : {std::pair{"localmax_hessian", &r.localmax_hessian},
                        std::pair{"localmax_rho", &r.localmax_rho}, std::pair{"stable", &r.stable}}) {
    if (*v) j[key] = verdict_name(*v);
  }
  if (r.jac_spectral_radius) j["jac_spectral_radius"] = *r.jac_spectral_radius;
  return j;
}

// ---------------------------------------------------------------------------

int cmd_bp(const RunConfig& c) {
  const auto pp = params(c);
  SimplexMeasure init;
  if (c.init == "free") init = SimplexMeasure::uniform(c.q);
  else if (c.init == "max") init = SimplexMeasure::point(c.q, 0);
  else fail(ErrorCode::InvalidArgument, "--init must be free or max");
  SolveOptions opts;
  opts.tol = c.tol;
  opts.max_iter = c.max_iter;
  const auto rep = solve_bp(potts_spec(pp), c.d, init, opts);
  auto j = envelope(c);
  j["result"] = report_json(rep);
  write_json(c, j);
  return rep.converged ? kExitOk : kExitNotConverged;
}

int cmd_classify(const RunConfig& c) {
  const auto pp = params(c);
  json sols = json::array();
  for (const auto& s : classify_fixed_points(pp, c.d)) {
    auto r = report_json(analyze_solution(s, pp, c.d));
    json labels = json::array();
    for (const auto& l : s.labels) labels.push_back(l.str());
    r["labels"] = labels;
    r["Q"] = s.Q;
    r["p_plus"] = s.p_plus;
    r["p_minus"] = s.p_minus;
    sols.push_back(r);
  }
  auto j = envelope(c);
  j["solutions"] = sols;
  write_json(c, j);
  return kExitOk;
}

int cmd_bethe(const RunConfig& c) {
  const auto pp = params(c);
  const auto pred = bethe_prediction(pp, c.d);
  auto j = envelope(c);
  j["phi"] = pred.phi;
  j["phi_free"] = pred.phi_free;
  j["phi_max"] = pred.phi_max;
  j["argmax"] = to_string(pred.argmax);
  j["b_free"] = pred.extremal.b_free;
  j["b_max"] = pred.extremal.b_max;
  j["h_free"] = pred.extremal.h_free.vec();
  j["h_max"] = pred.extremal.h_max.vec();
  j["converged"] = pred.extremal.converged;
  write_json(c, j);
  return pred.extremal.converged ? kExitOk : kExitNotConverged;
}

int cmd_graph_sample(const RunConfig& c) {
  if (c.n <= 0) fail(ErrorCode::InvalidArgument, "--n is required");
  const auto g = load_graph(c);
  Output out(c.out);
  write_graph(out.get(), g);
  return kExitOk;
}

int cmd_zeta(const RunConfig& c) {
  const auto g = load_graph(c);
  json values = json::array();
  for (int t : c.radii) values.push_back({{"t", t}, {"zeta", zeta(g, t, c.d)}});
  auto j = envelope(c);
  j["n"] = g.n();
  j["zeta"] = values;
  write_json(c, j);
  return kExitOk;
}

int cmd_logz(const RunConfig& c) {
  const auto pp = params(c);
  const auto spec = potts_spec(pp);
  auto j = envelope(c);
  j["method"] = c.method;
  if (c.method == "annealed") {
    if (c.n <= 0) fail(ErrorCode::InvalidArgument, "annealed needs --n");
    j["logz"] = annealed_logz(c.n, c.d, spec);
    j["per_vertex"] = true;
  } else if (c.method == "cycle") {
    if (c.n <= 0) fail(ErrorCode::InvalidArgument, "cycle needs --n");
    j["logz"] = logz_cycle(c.n, spec);
  } else {
    const auto g = load_graph(c);
    if (c.method == "brute") {
      j["logz"] = logz_brute(g, spec);
    } else if (c.method == "forest") {
      j["logz"] = logz_forest(g, spec);
    } else if (c.method == "mc") {
      TIOptions ti;
      ti.grid = uniform_grid(pp.beta, c.grid_points);
      ti.sweeps = c.sweeps;
      ti.burn_in = c.burn_in;
      ti.chains = c.chains;
      ti.threads = c.threads;
      ti.seed = derive_seed(c.seed, "cli_ti");
      const auto r = estimate_logz_ti(g, pp, ti);
      j["logz"] = r.estimate;
      j["stderr"] = r.std_error;
      j["per_chain"] = r.per_chain;
    } else {
      fail(ErrorCode::InvalidArgument, "unknown method " + c.method);
    }
  }
  write_json(c, j);
  return kExitOk;
}

int cmd_decimate(const RunConfig& c) {
  const auto g = load_graph(c);
  OpROptions opts;
  if (c.mode == "random") opts.mode = PairingMode::Random;
  else if (c.mode == "argmin") opts.mode = PairingMode::Argmin;
  else fail(ErrorCode::InvalidArgument, "--mode must be random or argmin");
  if (c.z_method == "none") opts.z_method = ZMethod::None;
  else if (c.z_method == "exact") opts.z_method = ZMethod::Exact;
  else if (c.z_method == "mc") opts.z_method = ZMethod::MonteCarlo;
  else fail(ErrorCode::InvalidArgument, "--z must be none, exact or mc");
  if (opts.z_method != ZMethod::None) {
    const auto pp = params(c);
    opts.spec = potts_spec(pp);
    opts.potts = pp;
    opts.ti.sweeps = c.sweeps;
    opts.ti.burn_in = c.burn_in;
    opts.ti.chains = c.chains;
    opts.ti.threads = c.threads;
    opts.ti.seed = derive_seed(c.seed, "cli_decimate_ti");
  }
  const auto trace = decimate(g, opts, c.steps, c.radii, c.seed);

  Output out(c.out);
  auto header = envelope(c);
  header["type"] = "header";
  header["n"] = trace.steps[0].n;
  header["zeta"] = trace.steps[0].zeta;
  out.get() << header.dump() << "\n";
  for (std::size_t k = 1; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    json line;
    line["type"] = "step";
    line["step"] = s.step;
    line["n"] = s.n;
    line["removed"] = s.removed;
    line["pairing"] = s.pairing;
    line["zeta"] = s.zeta;
    line["logz_delta"] = s.logz_delta ? json(*s.logz_delta) : json(nullptr);
    out.get() << line.dump() << "\n";
  }

  if (!c.summary.empty()) {
    std::ofstream csv(c.summary, std::ios::binary);
    if (!csv) fail(ErrorCode::InvalidArgument, "cannot open " + c.summary);
    csv << "# bethe " << BETHE_VERSION << " " << config_json(c).dump() << "\n";
    csv << "step,n,removed";
    for (int t : trace.radii) csv << ",zeta_" << t;
    csv << ",logz_delta\n";
    for (const auto& s : trace.steps) {
      csv << s.step << "," << s.n << "," << s.removed;
      for (double z : s.zeta) csv << "," << g17(z);
      csv << "," << (s.logz_delta ? g17(*s.logz_delta) : "") << "\n";
    }
  }
  return kExitOk;
}

struct SweepRow {
  double beta = 0.0, B = 0.0;
  ExtremalPair ext;
  double phi_free = 0.0, phi_max = 0.0, phi = 0.0;
  int fixed_points = 0, localmax = 0;
  std::string localmax_free, localmax_max;
};

SweepRow sweep_cell(int q, int d, double beta, double B) {
  const PottsParams pp{q, beta, B};
  const auto spec = potts_spec(pp);
  SweepRow row;
  row.beta = beta;
  row.B = B;
  const auto pred = bethe_prediction(pp, d, false);
  row.ext = pred.extremal;
  row.phi_free = pred.phi_free;
  row.phi_max = pred.phi_max;
  row.phi = pred.phi;
  const auto sols = classify_fixed_points(pp, d);
  row.fixed_points = static_cast<int>(sols.size());
  for (const auto& s : sols) {
    row.localmax += localmax_verdict(hessian_localmax(embed(s.h, spec), pp, d).verdict) == Verdict::Yes;
  }
  auto verdict_at = [&](const SimplexMeasure& h) {
    return to_string(localmax_verdict(hessian_localmax(embed(h, spec), pp, d).verdict));
  };
  row.localmax_free = verdict_at(row.ext.h_free);
  row.localmax_max = verdict_at(row.ext.h_max);
  return row;
}

double grid_value(double lo, double hi, int points, int i) {
  return points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
}

int cmd_sweep(const RunConfig& c) {
  params(c);
  if (c.beta_points < 1 || c.B_points < 1) fail(ErrorCode::InvalidArgument, "grid needs >= 1 point per axis");
  const int cells = c.beta_points * c.B_points;
  std::vector<SweepRow> rows(cells);
  std::vector<std::string> errors(cells);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k; (k = next++) < cells;) {
      try {
        rows[k] = sweep_cell(c.q, c.d, grid_value(c.beta_min, c.beta_max, c.beta_points, k / c.B_points),
                             grid_value(c.B_min, c.B_max, c.B_points, k % c.B_points));
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::max(1, c.threads); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }

  Output out(c.out);
  auto& os = out.get();
  os << "# bethe " << BETHE_VERSION << " " << config_json(c).dump() << "\n";
  os << "beta,B,b_free,b_max,phi_free,phi_max,Phi,n_fixed_points,n_localmax,localmax_free,localmax_max\n";
  bool converged = true;
  for (const auto& r : rows) {
    converged = converged && r.ext.converged;
    os << g17(r.beta) << "," << g17(r.B) << "," << g17(r.ext.b_free) << "," << g17(r.ext.b_max) << ","
       << g17(r.phi_free) << "," << g17(r.phi_max) << "," << g17(r.phi) << "," << r.fixed_points << ","
       << r.localmax << "," << r.localmax_free << "," << r.localmax_max << "\n";
  }
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_selftest(const RunConfig& c) {
  Output out(c.out);
  acceptance::Options opts;
  opts.seed = c.seed;
  opts.threads = c.threads;
  return acceptance::run_acceptance(opts, out.get()) == 0 ? kExitOk : kExitInvalid;
}

void add_model(CLI::App* sub, RunConfig& c) {
  sub->add_option("--q", c.q, "number of spins")->capture_default_str();
  sub->add_option("--d", c.d, "degree")->capture_default_str();
  sub->add_option("--beta", c.beta, "inverse temperature")->capture_default_str();
  sub->add_option("--B", c.B, "external field on spin 0")->capture_default_str();
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
  sub->add_option("--out", c.out, "output file (default stdout)");
}

void add_graph_source(CLI::App* sub, RunConfig& c) {
  sub->add_option("--graph", c.graph_file, "graph file");
  sub->add_option("--n", c.n, "vertex count for the sampler");
  sub->add_option("--sampler", c.sampler, "config or simple")->capture_default_str();
}

void add_mc(CLI::App* sub, RunConfig& c) {
  sub->add_option("--sweeps", c.sweeps, "sweeps per grid point")->capture_default_str();
  sub->add_option("--burn-in", c.burn_in, "burn-in sweeps per grid point")->capture_default_str();
  sub->add_option("--chains", c.chains, "independent chains")->capture_default_str();
  sub->add_option("--threads", c.threads, "worker threads")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Bethe prediction, BP fixed points and exact / Monte Carlo partition functions"};
  app.require_subcommand(1);
  std::map<CLI::App*, std::function<int()>> handlers;

  auto* bp = app.add_subcommand("bp", "iterate BP from the free or max start");
  add_model(bp, c);
  add_common(bp, c);
  bp->add_option("--init", c.init, "free or max")->capture_default_str();
  bp->add_option("--tol", c.tol, "residual tolerance")->capture_default_str();
  bp->add_option("--max-iter", c.max_iter, "iteration cap")->capture_default_str();
  handlers[bp] = [&] { return cmd_bp(c); };

  auto* classify = app.add_subcommand("classify", "all l-type fixed points with verdicts");
  add_model(classify, c);
  add_common(classify, c);
  handlers[classify] = [&] { return cmd_classify(c); };

  auto* bethe = app.add_subcommand("bethe", "Bethe prediction max(Phi(h_f), Phi(h_m))");
  add_model(bethe, c);
  add_common(bethe, c);
  handlers[bethe] = [&] { return cmd_bethe(c); };

  auto* graph = app.add_subcommand("graph", "graph utilities");
  graph->require_subcommand(1);
  auto* sample = graph->add_subcommand("sample", "sample a d-regular graph");
  sample->add_option("--n", c.n, "vertex count")->required();
  sample->add_option("--d", c.d, "degree")->capture_default_str();
  sample->add_option("--sampler", c.sampler, "config or simple")->capture_default_str();
  add_common(sample, c);
  handlers[sample] = [&] { return cmd_graph_sample(c); };

  auto* zeta_cmd = app.add_subcommand("zeta", "fraction of vertices with non-tree balls");
  add_graph_source(zeta_cmd, c);
  zeta_cmd->add_option("--d", c.d, "degree")->capture_default_str();
  zeta_cmd->add_option("--t", c.radii, "radii")->capture_default_str();
  add_common(zeta_cmd, c);
  handlers[zeta_cmd] = [&] { return cmd_zeta(c); };

  auto* logz = app.add_subcommand("logz", "log partition function");
  add_model(logz, c);
  add_common(logz, c);
  add_graph_source(logz, c);
  add_mc(logz, c);
  logz->add_option("--method", c.method, "brute, forest, cycle, mc or annealed")->capture_default_str();
  logz->add_option("--grid-points", c.grid_points, "TI grid points")->capture_default_str();
  handlers[logz] = [&] { return cmd_logz(c); };

  auto* dec = app.add_subcommand("decimate", "repeated vertex removal with re-pairing");
  add_model(dec, c);
  add_common(dec, c);
  add_graph_source(dec, c);
  add_mc(dec, c);
  dec->add_option("--steps", c.steps, "removals")->capture_default_str();
  dec->add_option("--mode", c.mode, "random or argmin")->capture_default_str();
  dec->add_option("--z", c.z_method, "none, exact or mc")->capture_default_str();
  dec->add_option("--t", c.radii, "radii for zeta")->capture_default_str();
  dec->add_option("--summary", c.summary, "summary CSV path");
  handlers[dec] = [&] { return cmd_decimate(c); };

  auto* sweep = app.add_subcommand("sweep", "Bethe prediction over a (beta, B) grid");
  sweep->add_option("--q", c.q, "number of spins")->capture_default_str();
  sweep->add_option("--d", c.d, "degree")->capture_default_str();
  sweep->add_option("--beta-min", c.beta_min)->capture_default_str();
  sweep->add_option("--beta-max", c.beta_max)->capture_default_str();
  sweep->add_option("--beta-points", c.beta_points)->capture_default_str();
  sweep->add_option("--B-min", c.B_min)->capture_default_str();
  sweep->add_option("--B-max", c.B_max)->capture_default_str();
  sweep->add_option("--B-points", c.B_points)->capture_default_str();
  sweep->add_option("--threads", c.threads, "worker threads")->capture_default_str();
  add_common(sweep, c);
  handlers[sweep] = [&] { return cmd_sweep(c); };

  auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria");
  add_common(selftest, c);
  selftest->add_option("--threads", c.threads, "worker threads")->capture_default_str();
  handlers[selftest] = [&] { return cmd_selftest(c); };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  for (auto& [sub, run] : handlers) {
    if (!sub->parsed()) continue;
    c.command = sub == sample ? "graph sample" : sub->get_name();
    try {
      return run();
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInvalid;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitInvalid;
    }
  }
  return kExitInvalid;
}
