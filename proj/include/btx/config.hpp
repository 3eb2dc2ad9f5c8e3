#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace btx {

// Sectioned key-value configuration. Sections and keys stay sorted so any
// echo of the config is deterministic.
class Config {
 public:
  using Map = std::map<std::string, std::map<std::string, std::string>>;

  Config() = default;
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  // "section.key=value" or split forms; later writes win, which is how flag
  // overrides layer on top of file values.
  void set(const std::string& section, const std::string& key, std::string value);
  void set_dotted(const std::string& dotted_key, std::string value);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, std::string fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  std::size_t get_size(const std::string& section, const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  // Comma-separated list, trimmed, empty items dropped.
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
  // Exactly six comma-separated weights.
  std::array<double, 6> get_alphas(const std::string& section, const std::string& key,
                                   const std::array<double, 6>& fallback) const;

  const Map& sections() const { return values_; }

 private:
  Map values_;
};

// Reproducibility record for one command invocation: the resolved config,
// inputs, and outputs. This is the only artifact that carries a timestamp.
std::string run_manifest(const std::string& command, const Config& config,
                         const std::vector<std::string>& inputs, const std::vector<std::string>& outputs);

}  // namespace btx
