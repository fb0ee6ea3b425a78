#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "netinfer/bench.hpp"
#include "netinfer/errors.hpp"

namespace netinfer {

namespace {

const std::set<std::string> kKnownMethods = {"granger", "one_lag",  "nig",
                                             "precision", "ffnn", "oracle"};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError("config: bad value '" + value + "' for key '" + key + "'");
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size() || value.front() == '-') bad_value(key, value);
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return v;
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<std::string> split_list(const std::string& key,
                                    const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) bad_value(key, value);
    out.push_back(item);
  }
  if (out.empty()) bad_value(key, value);
  return out;
}

}  // namespace

int ExperimentConfig::max_lag_needed() const {
  int lag = 0;
  for (const std::string& m : methods) {
    if (m == "granger" || m == "one_lag")
      lag = std::max(lag, 1);
    else if (m == "nig" || m == "oracle")
      lag = std::max(lag, 3);
    else if (m == "ffnn")
      lag = std::max(lag, feature_m);
  }
  return lag;
}

long long ExperimentConfig::samples_needed() const {
  return (checkpoints.empty() ? 0 : checkpoints.back()) + max_lag_needed();
}

void ExperimentConfig::validate() const {
  if (id.empty()) throw ConfigError("config: regime.id must not be empty");
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          c == '.'))
      throw ConfigError("config: regime.id may only use [A-Za-z0-9_.-]");
  if (graph_file.empty()) {
    if (n_nodes < 2) throw ConfigError("config: regime.n must be >= 2");
    if (p < 0.0 || p > 1.0)
      throw ConfigError("config: regime.p must lie in [0, 1]");
  } else {
    std::ifstream probe(graph_file);
    if (!probe)
      throw ConfigError("config: regime.graph_file '" + graph_file +
                        "' does not exist");
  }
  if (n_observed < 0)
    throw ConfigError("config: regime.observed must be >= 0");
  if (n_observed == 1)
    throw ConfigError("config: regime.observed must leave >= 2 observed nodes");
  if (n_nodes > 0 && n_observed > n_nodes)
    throw ConfigError("config: regime.observed exceeds regime.n");
  if (!(alpha > 0.0) || !(alpha <= rho) || !(rho < 1.0))
    throw ConfigError("config: need 0 < regime.alpha <= regime.rho < 1");
  if (!(sigma2 > 0.0)) throw ConfigError("config: noise.sigma2 must be > 0");
  if (beta < 0.0) throw ConfigError("config: noise.beta must be >= 0");
  if (osc < 0.0) throw ConfigError("config: noise.osc must be >= 0");
  if (intervention < 0.0)
    throw ConfigError("config: noise.intervention must be >= 0");
  if (!(sigma2 > beta + osc / 2.0))
    throw ConfigError(
        "config: need noise.sigma2 > noise.beta + noise.osc/2 so the "
        "covariance gap stays positive");
  if (checkpoints.empty())
    throw ConfigError("config: data.checkpoints must not be empty");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1)
      throw ConfigError("config: checkpoints must be >= 1");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw ConfigError("config: checkpoints must be strictly increasing");
  }
  if (trials < 1) throw ConfigError("config: data.trials must be >= 1");
  if (burn_in < -1) throw ConfigError("config: data.burn_in must be >= -1");
  if (methods.empty()) throw ConfigError("config: methods must not be empty");
  for (const std::string& m : methods)
    if (!kKnownMethods.count(m))
      throw ConfigError("config: unknown method '" + m + "'");
  if (feature_d < 0 || feature_d > 1)
    throw ConfigError("config: features.d must be 0 or 1");
  if (feature_m < 3) throw ConfigError("config: features.m must be >= 3");
  if (!(train.learning_rate > 0.0))
    throw ConfigError("config: train.learning_rate must be > 0");
  if (train.momentum < 0.0 || train.momentum >= 1.0)
    throw ConfigError("config: train.momentum must lie in [0, 1)");
  if (train.batch < 1) throw ConfigError("config: train.batch must be >= 1");
  if (train.epochs < 0) throw ConfigError("config: train.epochs must be >= 0");
  if (train.early_stop_window < 0)
    throw ConfigError("config: train.early_stop_window must be >= 0");
  for (int h : train.hidden)
    if (h < 1) throw ConfigError("config: train.hidden widths must be >= 1");
  for (double b : beta_sweep) {
    if (b < 0.0) throw ConfigError("config: train.beta_sweep entries must be >= 0");
    if (!(sigma2 > b + osc / 2.0))
      throw ConfigError(
          "config: train.beta_sweep entry violates noise.sigma2 > beta + osc/2");
  }
  if (length > 0 && length < samples_needed())
    throw ConfigError(
        "config: data.length = " + std::to_string(length) +
        " cannot cover the largest checkpoint; need >= " +
        std::to_string(samples_needed()));
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    if (!seen.insert(key).second)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");

    if (key == "regime.id") {
      cfg.id = value;
    } else if (key == "regime.n") {
      cfg.n_nodes = static_cast<int>(parse_int(key, value));
    } else if (key == "regime.observed") {
      cfg.n_observed = static_cast<int>(parse_int(key, value));
    } else if (key == "regime.p") {
      cfg.p = parse_real(key, value);
    } else if (key == "regime.directed") {
      cfg.directed = parse_flag(key, value);
    } else if (key == "regime.alpha") {
      cfg.alpha = parse_real(key, value);
    } else if (key == "regime.rho") {
      cfg.rho = parse_real(key, value);
    } else if (key == "regime.graph_file") {
      cfg.graph_file = value;
    } else if (key == "noise.sigma2") {
      cfg.sigma2 = parse_real(key, value);
    } else if (key == "noise.beta") {
      cfg.beta = parse_real(key, value);
    } else if (key == "noise.osc") {
      cfg.osc = parse_real(key, value);
    } else if (key == "noise.intervention") {
      cfg.intervention = parse_real(key, value);
    } else if (key == "data.checkpoints") {
      for (const std::string& s : split_list(key, value))
        cfg.checkpoints.push_back(parse_int(key, s));
    } else if (key == "data.length") {
      cfg.length = parse_int(key, value);
    } else if (key == "data.burn_in") {
      cfg.burn_in = static_cast<int>(parse_int(key, value));
    } else if (key == "data.trials") {
      cfg.trials = static_cast<int>(parse_int(key, value));
    } else if (key == "data.seed") {
      cfg.seed = parse_u64(key, value);
    } else if (key == "methods") {
      cfg.methods = split_list(key, value);
    } else if (key == "features.d") {
      cfg.feature_d = static_cast<int>(parse_int(key, value));
    } else if (key == "features.m") {
      cfg.feature_m = static_cast<int>(parse_int(key, value));
    } else if (key == "train.hidden") {
      cfg.train.hidden.clear();
      for (const std::string& s : split_list(key, value))
        cfg.train.hidden.push_back(static_cast<int>(parse_int(key, s)));
    } else if (key == "train.learning_rate") {
      cfg.train.learning_rate = parse_real(key, value);
    } else if (key == "train.momentum") {
      cfg.train.momentum = parse_real(key, value);
    } else if (key == "train.batch") {
      cfg.train.batch = static_cast<int>(parse_int(key, value));
    } else if (key == "train.epochs") {
      cfg.train.epochs = static_cast<int>(parse_int(key, value));
    } else if (key == "train.early_stop_delta") {
      cfg.train.early_stop_delta = parse_real(key, value);
    } else if (key == "train.early_stop_window") {
      cfg.train.early_stop_window = static_cast<int>(parse_int(key, value));
    } else if (key == "train.class_weights") {
      cfg.train.class_weights = parse_flag(key, value);
    } else if (key == "train.beta_sweep") {
      for (const std::string& s : split_list(key, value))
        cfg.beta_sweep.push_back(parse_real(key, s));
    } else if (key == "output.results") {
      cfg.results_path = value;
    } else if (key == "output.model") {
      cfg.model_path = value;
    } else if (key == "output.timing") {
      cfg.timing_sidecar = parse_flag(key, value);
    } else {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

}  // namespace netinfer
