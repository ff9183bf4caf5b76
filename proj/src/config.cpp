#include "rsgp/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rsgp {

namespace pt = boost::property_tree;

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::rsgp: return "rsgp";
    case Algorithm::sgp_plain: return "sgp_plain";
    case Algorithm::tv: return "tv";
    case Algorithm::trimmed: return "trimmed";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "rsgp") return Algorithm::rsgp;
  if (s == "sgp_plain") return Algorithm::sgp_plain;
  if (s == "tv") return Algorithm::tv;
  if (s == "trimmed") return Algorithm::trimmed;
  throw std::invalid_argument("algorithm.name: unknown algorithm '" + s + "'");
}

double ExperimentConfig::edge_probability() const {
  if (p) return *p;
  return 3.0 * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

void ExperimentConfig::validate() const {
  if (n < 2) throw std::invalid_argument("graph.n must be >= 2");
  const double prob = edge_probability();
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("graph.p must lie in [0, 1]");
  for (NodeId m : malicious)
    if (m >= n) throw std::invalid_argument("graph.malicious: node " + std::to_string(m) + " out of range");
  if (malicious.size() >= n) throw std::invalid_argument("graph.malicious: no regular node left");
  if (d < 1) throw std::invalid_argument("instance.d must be >= 1");
  if (static_cast<std::size_t>(x_o.size()) != d)
    throw std::invalid_argument("instance.x_o must have d components");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("instance.noise_sigma must be >= 0");
  if (!(h_sigma > 0.0)) throw std::invalid_argument("instance.h_sigma must be > 0");
  if (attack.kind != AttackKind::none && malicious.empty())
    throw std::invalid_argument("attack.kind: an attack needs a nonempty graph.malicious");
  if (attack.kind == AttackKind::target_pull && static_cast<std::size_t>(attack.target.size()) != d)
    throw std::invalid_argument("attack.target must have d components");
  if (trials < 1) throw std::invalid_argument("campaign.trials must be >= 1");
  if (sample_stride < 0) throw std::invalid_argument("campaign.sample_stride must be >= 0");
  switch (algorithm) {
    case Algorithm::rsgp:
    case Algorithm::sgp_plain: protocol.validate(); break;
    case Algorithm::tv: tv.validate(); break;
    case Algorithm::trimmed: trimmed.validate(); break;
  }
  if (sweep) {
    static const std::set<std::string> known{"beta", "alpha", "lambda", "kappa"};
    if (!known.count(sweep->param)) throw std::invalid_argument("sweep.param: unknown parameter '" + sweep->param + "'");
    if (sweep->values.empty()) throw std::invalid_argument("sweep.values must be nonempty");
    for (double v : sweep->values) with_param(sweep->param, v);
  }
}

ExperimentConfig ExperimentConfig::with_param(const std::string& param, double value) const {
  ExperimentConfig c = *this;
  if (param == "beta") {
    c.protocol.beta = value;
    c.protocol.validate();
  } else if (param == "alpha") {
    c.protocol.alpha = value;
    c.protocol.validate();
  } else if (param == "lambda") {
    c.tv.lambda = value;
    c.tv.validate();
  } else if (param == "kappa") {
    if (!(value >= 0.0) || value != std::floor(value))
      throw std::invalid_argument("sweep.values: kappa must be a nonnegative integer");
    c.trimmed.kappa = static_cast<std::size_t>(value);
  } else {
    throw std::invalid_argument("sweep.param: unknown parameter '" + param + "'");
  }
  return c;
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"graph", {"n", "p", "malicious"}},
      {"instance", {"d", "x_o", "noise_sigma", "h_sigma", "resample"}},
      {"attack", {"kind", "delta_s", "shift", "target", "gain"}},
      {"algorithm", {"name"}},
      {"protocol",
       {"eta0", "rho", "alpha", "beta", "score_mode", "detection_start", "detection", "T", "y_floor",
        "step_guard"}},
      {"tv", {"lambda", "eta0", "rho", "T"}},
      {"trimmed", {"kappa", "eta0", "rho", "T"}},
      {"campaign", {"trials", "base_seed", "sample_stride", "cost_form", "output_dir"}},
      {"sweep", {"param", "values"}},
  };
  return s;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw std::invalid_argument(key + ": cannot parse '" + tok + "' as a number");
    out.push_back(v);
  }
  return out;
}

Vector to_vector(const std::vector<double>& xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) v[static_cast<Eigen::Index>(k)] = xs[k];
  return v;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <class T>
  void get(const std::string& key, T& out) const {
    auto node = tree_.get_child_optional(pt::ptree::path_type(key, '.'));
    if (!node) return;
    auto v = node->template get_value_optional<T>();
    if (!v) throw std::invalid_argument(key + ": invalid value '" + node->data() + "'");
    out = *v;
  }

  std::optional<std::string> raw(const std::string& key) const {
    auto node = tree_.get_child_optional(pt::ptree::path_type(key, '.'));
    if (!node) return std::nullopt;
    return node->data();
  }

 private:
  const pt::ptree& tree_;
};

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument(key + ": expected a boolean, got '" + s + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index k = 0; k < v.size(); ++k) s += (k ? " " : "") + fmt(v[k]);
  return s;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw std::invalid_argument("config: key '" + section + "' outside a section");
    auto it = schema().find(section);
    if (it == schema().end()) throw std::invalid_argument("config: unknown section [" + section + "]");
    for (const auto& [key, _] : body)
      if (!it->second.count(key)) throw std::invalid_argument("config: unknown key " + section + "." + key);
  }

  ExperimentConfig c;
  Reader r(tree);
  r.get("graph.n", c.n);
  if (auto s = r.raw("graph.p")) {
    double p;
    r.get("graph.p", p);
    c.p = p;
  }
  if (auto s = r.raw("graph.malicious")) {
    c.malicious.clear();
    for (double v : parse_list("graph.malicious", *s)) {
      if (v < 0 || v != std::floor(v)) throw std::invalid_argument("graph.malicious: node ids must be nonnegative integers");
      c.malicious.insert(static_cast<NodeId>(v));
    }
  }

  r.get("instance.d", c.d);
  if (auto s = r.raw("instance.x_o")) c.x_o = to_vector(parse_list("instance.x_o", *s));
  r.get("instance.noise_sigma", c.noise_sigma);
  r.get("instance.h_sigma", c.h_sigma);
  if (auto s = r.raw("instance.resample")) c.resample_instance = parse_bool("instance.resample", *s);

  if (auto s = r.raw("attack.kind")) c.attack.kind = attack_kind_from_string(*s);
  r.get("attack.delta_s", c.attack.delta_s);
  r.get("attack.shift", c.attack.shift);
  if (auto s = r.raw("attack.target")) c.attack.target = to_vector(parse_list("attack.target", *s));
  r.get("attack.gain", c.attack.gain);

  if (auto s = r.raw("algorithm.name")) c.algorithm = algorithm_from_string(*s);

  r.get("protocol.eta0", c.protocol.eta0);
  r.get("protocol.rho", c.protocol.rho);
  r.get("protocol.alpha", c.protocol.alpha);
  r.get("protocol.beta", c.protocol.beta);
  if (auto s = r.raw("protocol.score_mode")) c.protocol.score_mode = score_mode_from_string(*s);
  r.get("protocol.detection_start", c.protocol.detection_start);
  if (auto s = r.raw("protocol.detection")) c.protocol.detection_enabled = parse_bool("protocol.detection", *s);
  r.get("protocol.T", c.protocol.T);
  r.get("protocol.y_floor", c.protocol.y_floor);
  if (auto s = r.raw("protocol.step_guard")) c.protocol.step_guard = parse_bool("protocol.step_guard", *s);

  r.get("tv.lambda", c.tv.lambda);
  r.get("tv.eta0", c.tv.eta0);
  r.get("tv.rho", c.tv.rho);
  r.get("tv.T", c.tv.T);

  r.get("trimmed.kappa", c.trimmed.kappa);
  r.get("trimmed.eta0", c.trimmed.eta0);
  r.get("trimmed.rho", c.trimmed.rho);
  r.get("trimmed.T", c.trimmed.T);

  r.get("campaign.trials", c.trials);
  r.get("campaign.base_seed", c.base_seed);
  r.get("campaign.sample_stride", c.sample_stride);
  if (auto s = r.raw("campaign.cost_form")) {
    if (*s == "per_node") c.cost_form = CostIncreaseForm::per_node;
    else if (*s == "global") c.cost_form = CostIncreaseForm::global;
    else throw std::invalid_argument("campaign.cost_form: expected per_node or global, got '" + *s + "'");
  }
  if (auto s = r.raw("campaign.output_dir")) c.output_dir = *s;

  auto param = r.raw("sweep.param");
  auto values = r.raw("sweep.values");
  if (param || values) {
    if (!param || !values) throw std::invalid_argument("sweep: both param and values are required");
    c.sweep = SweepSpec{*param, parse_list("sweep.values", *values)};
  }

  if (c.algorithm == Algorithm::sgp_plain) c.protocol.detection_enabled = false;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& os, const ExperimentConfig& c) {
  os << "[graph]\nn = " << c.n << "\np = " << fmt(c.edge_probability()) << "\nmalicious =";
  for (NodeId m : c.malicious) os << ' ' << m;
  os << "\n\n[instance]\nd = " << c.d << "\nx_o = " << join(c.x_o) << "\nnoise_sigma = " << fmt(c.noise_sigma)
     << "\nh_sigma = " << fmt(c.h_sigma) << "\nresample = " << (c.resample_instance ? "true" : "false");
  os << "\n\n[attack]\nkind = " << to_string(c.attack.kind) << "\ndelta_s = " << fmt(c.attack.delta_s)
     << "\nshift = " << fmt(c.attack.shift) << "\ngain = " << fmt(c.attack.gain);
  if (c.attack.target.size() > 0) os << "\ntarget = " << join(c.attack.target);
  os << "\n\n[algorithm]\nname = " << to_string(c.algorithm);
  const auto& p = c.protocol;
  os << "\n\n[protocol]\neta0 = " << fmt(p.eta0) << "\nrho = " << fmt(p.rho) << "\nalpha = " << fmt(p.alpha)
     << "\nbeta = " << fmt(p.beta) << "\nscore_mode = " << to_string(p.score_mode)
     << "\ndetection_start = " << p.detection_start << "\ndetection = " << (p.detection_enabled ? "true" : "false")
     << "\nT = " << p.T << "\ny_floor = " << fmt(p.y_floor) << "\nstep_guard = " << (p.step_guard ? "true" : "false");
  os << "\n\n[tv]\nlambda = " << fmt(c.tv.lambda) << "\neta0 = " << fmt(c.tv.eta0) << "\nrho = " << fmt(c.tv.rho)
     << "\nT = " << c.tv.T;
  os << "\n\n[trimmed]\nkappa = " << c.trimmed.kappa << "\neta0 = " << fmt(c.trimmed.eta0)
     << "\nrho = " << fmt(c.trimmed.rho) << "\nT = " << c.trimmed.T;
  os << "\n\n[campaign]\ntrials = " << c.trials << "\nbase_seed = " << c.base_seed
     << "\nsample_stride = " << c.sample_stride
     << "\ncost_form = " << (c.cost_form == CostIncreaseForm::per_node ? "per_node" : "global")
     << "\noutput_dir = " << c.output_dir.string() << "\n";
  if (c.sweep) {
    os << "\n[sweep]\nparam = " << c.sweep->param << "\nvalues =";
    for (double v : c.sweep->values) os << ' ' << fmt(v);
    os << "\n";
  }
}

}  // namespace rsgp
