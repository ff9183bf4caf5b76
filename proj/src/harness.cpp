#include "rsgp/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "rsgp/io.hpp"

namespace rsgp {

namespace fs = std::filesystem;

namespace {

// gamma below this counts as consensus and the common value is reported.
constexpr double kConsensusTol = 1e-2;

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

OracleReport oracle_check(const ObjectiveInstance& inst) {
  const NodeSet regs = regular_nodes(inst);
  OracleReport r;
  r.x_star = closed_form_solution(inst, regs);
  r.x_attack = closed_form_solution(inst, all_nodes(inst.size()));
  r.lambda_min = hessian_min_eigenvalue(inst, regs);
  Vector g = Vector::Zero(inst.d);
  for (NodeId m : inst.malicious) g += gradient(inst, m, r.x_attack);
  r.attack_gradient_norm = g.norm();
  r.bound = r.lambda_min * (r.x_attack - r.x_star).norm();
  const double lhs = r.attack_gradient_norm, rhs = r.bound;
  r.relative_slack = rhs > 0.0 ? (lhs - rhs) / rhs : (lhs >= 0.0 ? 0.0 : -1.0);
  r.holds = r.relative_slack >= -1e-8;
  return r;
}

std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

ObjectiveInstance make_instance(const ExperimentConfig& cfg, std::size_t trial) {
  const std::uint64_t seed = cfg.resample_instance ? cfg.base_seed + trial : cfg.base_seed;
  auto rng = derive_rng(seed, kInstanceStream);
  ObjectiveInstance inst = sample_instance(cfg.n, cfg.d, cfg.x_o, cfg.noise_sigma, rng, cfg.h_sigma);
  if (cfg.attack.kind == AttackKind::none) {
    inst.malicious = cfg.malicious;
    return inst;
  }
  return apply_attack(inst, cfg.malicious, cfg.attack);
}

TrialSetup make_trial_setup(const ExperimentConfig& cfg, std::size_t trial) {
  const std::uint64_t seed = cfg.base_seed + trial;
  auto grng = derive_rng(seed, kGraphStream);
  TrialSetup s{{}, make_instance(cfg, trial), derive_rng(seed, kAlgorithmStream), 0};
  constexpr std::size_t kMaxAttempts = 10000;
  do {
    if (++s.graph_attempts > kMaxAttempts)
      throw PreconditionError("no strongly connected graph after " + std::to_string(kMaxAttempts) +
                              " draws; raise graph.p");
    s.graph = gen_erdos_renyi(cfg.n, cfg.edge_probability(), grng);
  } while (!is_strongly_connected(s.graph));
  s.graph.set_malicious(cfg.malicious);
  return s;
}

TrialOutcome run_one(const ExperimentConfig& cfg, std::size_t trial, TrialArtifacts* artifacts) {
  TrialSetup setup = make_trial_setup(cfg, trial);
  const ObjectiveInstance& inst = setup.instance;
  const OracleReport oracle = oracle_check(inst);

  TrialOutcome out;
  out.trial = trial;
  out.seed = cfg.base_seed + trial;
  out.graph_attempts = setup.graph_attempts;
  if (artifacts) artifacts->initial_graph = setup.graph;

  DetectionStats det;
  try {
    switch (cfg.algorithm) {
      case Algorithm::rsgp:
      case Algorithm::sgp_plain: {
        ProtocolConfig pc = cfg.protocol;
        if (cfg.algorithm == Algorithm::sgp_plain) pc.detection_enabled = false;
        TrialRun run = run_trial(setup.graph, inst, pc, std::move(setup.algorithm_rng), cfg.sample_stride);
        for (const auto& node : run.state.nodes) out.finals.push_back(node.x);
        det = detection_stats(run.state.sever_log, setup.graph);
        if (artifacts) {
          artifacts->samples = std::move(run.samples);
          artifacts->sever_log = std::move(run.state.sever_log);
        }
        break;
      }
      case Algorithm::tv:
      case Algorithm::trimmed: {
        BaselineRun run = cfg.algorithm == Algorithm::tv
                              ? run_tv(setup.graph, inst, cfg.tv, std::move(setup.algorithm_rng), cfg.sample_stride)
                              : run_trimmed(setup.graph, inst, cfg.trimmed, std::move(setup.algorithm_rng),
                                            cfg.sample_stride);
        out.finals = std::move(run.x);
        det = detection_stats({}, setup.graph);
        if (artifacts) artifacts->samples = std::move(run.samples);
        break;
      }
    }
  } catch (const NumericDegeneracyError& e) {
    out.ok = false;
    out.error = e.what();
    return out;
  }

  const std::vector<NodeId> regs = complement(inst.malicious, inst.size());
  std::vector<Vector> fr;
  for (NodeId i : regs) fr.push_back(out.finals[i]);
  TrialReport& r = out.report;
  r.p = 2.0;
  r.epsilon_p = avg_solution_difference(fr, oracle.x_star);
  r.varrho = avg_cost_increase(regs, fr, inst, oracle.x_star, cfg.cost_form);
  r.gamma_p = consensus_deviation(fr);
  try {
    r.xi_p = degradation_ratio(fr, oracle.x_star, inst.x_o);
  } catch (const UndefinedRatioError&) {
    r.xi_p = std::numeric_limits<double>::quiet_NaN();
  }
  r.attack_edges_remaining = det.attack_edges_remaining;
  r.regular_isolated = det.regular_isolated;
  r.false_severs = det.false_severs;
  r.isolation_round = det.isolation_round;
  if (r.gamma_p <= kConsensusTol) {
    Vector mean = Vector::Zero(inst.d);
    for (const auto& x : fr) mean += x;
    r.consensus_value = mean / static_cast<double>(fr.size());
  }
  out.epsilon_attack = avg_solution_difference(fr, oracle.x_attack);
  return out;
}

const std::vector<std::string>& aggregate_metric_names() {
  static const std::vector<std::string> names{
      "epsilon_p",       "varrho",           "gamma_p",      "xi_p",          "epsilon_attack",
      "attack_edges_remaining", "regular_isolated", "false_severs", "isolated", "isolation_round"};
  return names;
}

namespace {

std::map<std::string, double> trial_values(const TrialOutcome& t) {
  const TrialReport& r = t.report;
  std::map<std::string, double> v{
      {"epsilon_p", r.epsilon_p},
      {"varrho", r.varrho},
      {"gamma_p", r.gamma_p},
      {"xi_p", r.xi_p},
      {"epsilon_attack", t.epsilon_attack},
      {"attack_edges_remaining", static_cast<double>(r.attack_edges_remaining)},
      {"regular_isolated", static_cast<double>(r.regular_isolated)},
      {"false_severs", static_cast<double>(r.false_severs)},
      {"isolated", r.attack_edges_remaining == 0 ? 1.0 : 0.0},
  };
  if (r.isolation_round) v["isolation_round"] = static_cast<double>(*r.isolation_round);
  return v;
}

}  // namespace

Aggregate aggregate(const std::vector<TrialOutcome>& trials) {
  Aggregate a;
  a.trials = trials.size();
  std::map<std::string, std::vector<double>> cols;
  for (const auto& t : trials) {
    if (!t.ok) continue;
    ++a.completed;
    for (const auto& [k, v] : trial_values(t))
      if (!std::isnan(v)) cols[k].push_back(v);
  }
  for (const auto& name : aggregate_metric_names()) {
    MetricSummary s;
    const auto& xs = cols[name];
    s.count = xs.size();
    if (s.count == 0) {
      s.mean = s.stderr_ = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double x : xs) sum += x;
      s.mean = sum / static_cast<double>(s.count);
      if (s.count > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stderr_ = std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count));
      }
    }
    a.metrics[name] = s;
  }
  return a;
}

namespace {

void write_trials_csv(const fs::path& path, const std::vector<TrialOutcome>& trials) {
  auto os = open_out(path);
  os << "trial,seed,status,graph_attempts,p,epsilon_p,varrho,gamma_p,xi_p,epsilon_attack,"
        "attack_edges_remaining,regular_isolated,false_severs,isolation_round,error\n";
  for (const auto& t : trials) {
    const TrialReport& r = t.report;
    os << t.trial << ',' << t.seed << ',' << (t.ok ? "ok" : "aborted") << ',' << t.graph_attempts << ',';
    if (t.ok) {
      os << fmt17(r.p) << ',' << fmt17(r.epsilon_p) << ',' << fmt17(r.varrho) << ',' << fmt17(r.gamma_p) << ','
         << fmt17(r.xi_p) << ',' << fmt17(t.epsilon_attack) << ',' << r.attack_edges_remaining << ','
         << r.regular_isolated << ',' << r.false_severs << ',';
      if (r.isolation_round) os << *r.isolation_round;
    } else {
      os << ",,,,,,,,,";
    }
    std::string err = t.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ' ';
    os << ',' << err << '\n';
  }
}

void write_aggregate_csv(const fs::path& path, const Aggregate& a) {
  auto os = open_out(path);
  os << "metric,mean,stderr,count\n";
  os << "trials," << a.trials << ",0," << a.trials << '\n';
  os << "completed," << a.completed << ",0," << a.trials << '\n';
  for (const auto& name : aggregate_metric_names()) {
    const auto& s = a.metrics.at(name);
    os << name << ',' << fmt17(s.mean) << ',' << fmt17(s.stderr_) << ',' << s.count << '\n';
  }
}

nlohmann::json oracle_to_json(const OracleReport& o) {
  return {{"x_star", vector_to_json(o.x_star)},
          {"x_attack", vector_to_json(o.x_attack)},
          {"lambda_min", o.lambda_min},
          {"attack_gradient_norm", o.attack_gradient_norm},
          {"bound", o.bound},
          {"relative_slack", o.relative_slack},
          {"holds", o.holds}};
}

nlohmann::json aggregate_to_json(const Aggregate& a) {
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [k, s] : a.metrics) m[k] = {{"mean", s.mean}, {"stderr", s.stderr_}, {"count", s.count}};
  return {{"trials", a.trials}, {"completed", a.completed}, {"metrics", m}};
}

void write_report_json(const fs::path& path, const CampaignResult& res) {
  std::ostringstream cfg;
  write_config(cfg, res.cfg);
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : res.trials) {
    nlohmann::json j = {{"trial", t.trial}, {"seed", t.seed}, {"status", t.ok ? "ok" : "aborted"}};
    if (t.ok) {
      j["report"] = report_to_json(t.report);
      j["epsilon_attack"] = t.epsilon_attack;
    } else {
      j["error"] = t.error;
    }
    trials.push_back(std::move(j));
  }
  nlohmann::json j = {{"algorithm", to_string(res.cfg.algorithm)},
                      {"config", cfg.str()},
                      {"aggregate", aggregate_to_json(res.summary)},
                      {"trials", trials}};
  if (res.oracle) j["oracle"] = oracle_to_json(*res.oracle);
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

void write_artifacts(const fs::path& dir, const ExperimentConfig& cfg, std::size_t k, const TrialArtifacts& a) {
  const bool protocol = cfg.algorithm == Algorithm::rsgp || cfg.algorithm == Algorithm::sgp_plain;
  if (protocol) {
    auto os = open_out(dir / ("sever_log_" + std::to_string(k) + ".csv"));
    write_sever_log_csv(os, a.sever_log);
  }
  if (cfg.sample_stride > 0) {
    auto os = open_out(dir / ("trajectory_" + std::to_string(k) + ".csv"));
    write_trajectory_csv(os, a.samples, cfg.d, to_string(cfg.algorithm));
    auto gs = open_out(dir / ("graph_" + std::to_string(k) + ".txt"));
    write_edge_list(gs, a.initial_graph);
  }
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream os(probe);
    if (!os) throw std::runtime_error("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace

CampaignResult run_campaign(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  CampaignResult res;
  res.cfg = cfg;
  if (!cfg.resample_instance) res.oracle = oracle_check(make_instance(cfg, 0));
  if (opts.write_outputs) prepare_dir(cfg.output_dir);

  const std::size_t n = cfg.trials;
  res.trials.resize(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      try {
        TrialArtifacts art;
        res.trials[k] = run_one(cfg, k, opts.write_outputs ? &art : nullptr);
        if (opts.write_outputs) write_artifacts(cfg.output_dir, cfg, k, art);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.parallel, n));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  res.summary = aggregate(res.trials);
  if (opts.write_outputs) {
    write_trials_csv(cfg.output_dir / "trials.csv", res.trials);
    write_aggregate_csv(cfg.output_dir / "aggregate.csv", res.summary);
    write_report_json(cfg.output_dir / "report.json", res);
    if (!cfg.resample_instance) {
      auto os = open_out(cfg.output_dir / "instance.json");
      os << instance_to_json(make_instance(cfg, 0)).dump(2) << '\n';
    }
  }
  return res;
}

namespace {

void write_summary_columns_header(std::ostream& os) {
  for (const auto& name : aggregate_metric_names()) os << ',' << name << ',' << name << "_stderr";
  os << '\n';
}

void write_summary_columns(std::ostream& os, const Aggregate& a) {
  for (const auto& name : aggregate_metric_names()) {
    const auto& s = a.metrics.at(name);
    os << ',' << fmt17(s.mean) << ',' << fmt17(s.stderr_);
  }
  os << '\n';
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!cfg.sweep) throw std::invalid_argument("sweep: config has no [sweep] section");
  cfg.validate();
  SweepResult res{cfg.sweep->param, cfg.sweep->values, {}};
  if (opts.write_outputs) prepare_dir(cfg.output_dir);
  for (std::size_t k = 0; k < res.values.size(); ++k) {
    ExperimentConfig c = cfg.with_param(res.param, res.values[k]);
    c.sweep.reset();
    c.output_dir = cfg.output_dir / (res.param + "_" + std::to_string(k));
    res.points.push_back(run_campaign(c, opts));
  }
  if (opts.write_outputs) {
    auto os = open_out(cfg.output_dir / "sweep.csv");
    os << "param,value,trials,completed";
    write_summary_columns_header(os);
    for (std::size_t k = 0; k < res.values.size(); ++k) {
      const auto& a = res.points[k].summary;
      os << res.param << ',' << fmt17(res.values[k]) << ',' << a.trials << ',' << a.completed;
      write_summary_columns(os, a);
    }
  }
  return res;
}

std::vector<CampaignResult> compare(const std::vector<ExperimentConfig>& cfgs, const fs::path& out,
                                    const RunOptions& opts) {
  if (cfgs.empty()) throw std::invalid_argument("compare: no configs given");
  if (opts.write_outputs) prepare_dir(out);
  std::vector<CampaignResult> res;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    ExperimentConfig c = cfgs[k];
    c.output_dir = out / (std::to_string(k) + "_" + to_string(c.algorithm));
    res.push_back(run_campaign(c, opts));
  }
  if (opts.write_outputs) {
    auto os = open_out(out / "compare.csv");
    os << "index,algorithm,trials,completed";
    write_summary_columns_header(os);
    for (std::size_t k = 0; k < res.size(); ++k) {
      const auto& a = res[k].summary;
      os << k << ',' << to_string(res[k].cfg.algorithm) << ',' << a.trials << ',' << a.completed;
      write_summary_columns(os, a);
    }
  }
  return res;
}

}  // namespace rsgp
