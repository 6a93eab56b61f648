#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "blockcode/allocation.hpp"

namespace blockcode::cli {

/// Failure reported to the user as one line: "error: <kind>: <message>".
class CliError : public std::runtime_error {
 public:
  CliError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Ordered key=value pairs from a flat text file. '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text, const std::string& source);
KeyValues read_key_values(const std::string& path);

/// Accepts plain decimal/scientific numbers and powers of ten written 10^x.
double parse_number(const std::string& key, const std::string& value);
long long parse_integer(const std::string& key, const std::string& value);
std::vector<std::string> split_list(const std::string& value);

/// Keys understood by system_config; N and L are required.
///   N, L, M (50), b (1), dist.kind (shifted-exponential | bernoulli | empirical),
///   dist.mu (1e-3), dist.t0 (100), dist.p, dist.fast, dist.slow (inf),
///   dist.samples (comma list)
bool is_system_key(const std::string& key);
SystemConfig system_config(const KeyValues& kv);

/// Throws CliError("invalid-config") naming every key outside `allowed`.
void reject_unknown_keys(const KeyValues& kv, const std::vector<std::string>& extra_allowed,
                         const std::string& source);

/// Allocation file: one nonnegative integer per line, then "sum=L".
BlockAllocation read_allocation(const std::string& path, const SystemConfig& cfg);
std::string format_allocation(const std::vector<long long>& x);
void write_allocation(const std::string& path, const std::vector<long long>& x);

/// Seed from the flag, else BLOCKCODE_SEED, else `fallback`.
std::uint64_t resolve_seed(const std::string& flag_value, std::uint64_t fallback = 1);

}  // namespace blockcode::cli
