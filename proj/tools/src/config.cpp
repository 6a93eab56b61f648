#include "blockcode/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace blockcode::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("missing-file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::set<std::string> kSystemKeys = {"N",       "L",         "M",         "b",         "dist.kind",
                                           "dist.mu", "dist.t0",   "dist.p",    "dist.fast", "dist.slow",
                                           "dist.samples"};

double get_number(const KeyValues& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : parse_number(key, it->second);
}

}  // namespace

KeyValues parse_key_values(const std::string& text, const std::string& source) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CliError("invalid-config", source + ":" + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
      throw CliError("invalid-config", source + ":" + std::to_string(number) + ": duplicate key " + key);
    }
  }
  return kv;
}

KeyValues read_key_values(const std::string& path) { return parse_key_values(read_file(path), path); }

double parse_number(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.rfind("10^", 0) == 0) return std::pow(10.0, parse_number(key, v.substr(3)));
  if (v == "inf") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw CliError("invalid-value", key + "=" + value);
  }
  return out;
}

long long parse_integer(const std::string& key, const std::string& value) {
  const double d = parse_number(key, value);
  if (d != std::floor(d) || std::abs(d) > 9e15) throw CliError("invalid-value", key + "=" + value + " (integer expected)");
  return static_cast<long long>(d);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool is_system_key(const std::string& key) { return kSystemKeys.count(key) > 0; }

void reject_unknown_keys(const KeyValues& kv, const std::vector<std::string>& extra_allowed,
                         const std::string& source) {
  std::string unknown;
  for (const auto& [key, value] : kv) {
    if (is_system_key(key) || std::find(extra_allowed.begin(), extra_allowed.end(), key) != extra_allowed.end()) {
      continue;
    }
    unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) throw CliError("invalid-config", source + ": unknown key(s): " + unknown);
}

SystemConfig system_config(const KeyValues& kv) {
  for (const char* required : {"N", "L"}) {
    if (!kv.count(required)) throw CliError("invalid-config", std::string("missing key ") + required);
  }
  SystemConfig cfg;
  cfg.workers = static_cast<int>(parse_integer("N", kv.at("N")));
  cfg.coordinates = static_cast<int>(parse_integer("L", kv.at("L")));
  cfg.samples = get_number(kv, "M", 50.0);
  cfg.cycles_per_derivative = get_number(kv, "b", 1.0);

  const std::string law = kv.count("dist.kind") ? kv.at("dist.kind") : "shifted-exponential";
  try {
    if (law == "shifted-exponential") {
      cfg.dist = StragglerDistribution(ShiftedExponential{get_number(kv, "dist.mu", 1e-3), get_number(kv, "dist.t0", 100.0)});
    } else if (law == "bernoulli") {
      cfg.dist = StragglerDistribution(Bernoulli{get_number(kv, "dist.p", 0.1), get_number(kv, "dist.fast", 1.0),
                                                 get_number(kv, "dist.slow", std::numeric_limits<double>::infinity())});
    } else if (law == "empirical") {
      if (!kv.count("dist.samples")) throw CliError("invalid-config", "dist.kind=empirical needs dist.samples");
      std::vector<double> samples;
      for (const auto& s : split_list(kv.at("dist.samples"))) samples.push_back(parse_number("dist.samples", s));
      cfg.dist = StragglerDistribution(Empirical{samples});
    } else {
      throw CliError("invalid-value", "dist.kind=" + law);
    }
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError("invalid-config", e.what());
  }
  return cfg;
}

BlockAllocation read_allocation(const std::string& path, const SystemConfig& cfg) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<long long> x;
  long long checksum = -1;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("sum=", 0) == 0) {
      checksum = parse_integer("sum", line.substr(4));
      continue;
    }
    if (checksum >= 0) throw CliError("infeasible-allocation", path + ": entries after the sum line");
    const long long v = parse_integer(path, line);
    if (v < 0) throw CliError("infeasible-allocation", path + ": negative block size " + line);
    x.push_back(v);
  }
  const long long total = std::accumulate(x.begin(), x.end(), 0LL);
  if (checksum < 0) throw CliError("infeasible-allocation", path + ": missing sum= line");
  if (checksum != total) {
    throw CliError("infeasible-allocation", path + ": entries sum to " + std::to_string(total) + ", sum line says " +
                                                std::to_string(checksum));
  }
  if (static_cast<int>(x.size()) != cfg.workers || total != cfg.coordinates) {
    throw CliError("infeasible-allocation", path + ": need " + std::to_string(cfg.workers) + " blocks summing to L=" +
                                                std::to_string(cfg.coordinates));
  }
  return BlockAllocation::integer(x);
}

std::string format_allocation(const std::vector<long long>& x) {
  std::string out;
  for (long long v : x) out += std::to_string(v) + "\n";
  return out + "sum=" + std::to_string(std::accumulate(x.begin(), x.end(), 0LL)) + "\n";
}

void write_allocation(const std::string& path, const std::vector<long long>& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("io", "cannot write " + path);
  out << format_allocation(x);
}

std::uint64_t resolve_seed(const std::string& flag_value, std::uint64_t fallback) {
  std::string v = flag_value;
  if (v.empty()) {
    const char* env = std::getenv("BLOCKCODE_SEED");
    if (env == nullptr || *env == '\0') return fallback;
    v = env;
  }
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw CliError("invalid-value", "seed=" + v);
  return seed;
}

}  // namespace blockcode::cli
