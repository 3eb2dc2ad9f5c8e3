#include "btx/config.hpp"

#include <charconv>

#include "btx/errors.hpp"
#include "btx/ioutil.hpp"
#include "json.hpp"

namespace btx {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string key_name(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

}  // namespace

Config Config::parse(std::string_view text) {
  Config config;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": key outside any [section]");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    config.values_[section][std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return config;
}

Config Config::load(const std::string& path) { return parse(read_file(path)); }

void Config::set(const std::string& section, const std::string& key, std::string value) {
  values_[section][key] = std::move(value);
}

void Config::set_dotted(const std::string& dotted_key, std::string value) {
  const std::size_t dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
    throw ConfigError("override '" + dotted_key + "' must look like section.key");
  set(dotted_key.substr(0, dot), dotted_key.substr(dot + 1), std::move(value));
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  return s != values_.end() && s->second.count(key) != 0;
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  const auto s = values_.find(section);
  if (s == values_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string Config::get_string(const std::string& section, const std::string& key, std::string fallback) const {
  return get(section, key).value_or(std::move(fallback));
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  double out = 0.0;
  const char* end = v->data() + v->size();
  const auto res = std::from_chars(v->data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ConfigError(key_name(section, key) + ": '" + *v + "' is not a number");
  return out;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const char* end = v->data() + v->size();
  const auto res = std::from_chars(v->data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ConfigError(key_name(section, key) + ": '" + *v + "' is not a non-negative integer");
  return out;
}

std::size_t Config::get_size(const std::string& section, const std::string& key, std::size_t fallback) const {
  return static_cast<std::size_t>(get_u64(section, key, fallback));
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(key_name(section, key) + ": '" + *v + "' is not a boolean");
}

std::vector<std::string> Config::get_list(const std::string& section, const std::string& key) const {
  const auto v = get(section, key);
  std::vector<std::string> out;
  if (!v) return out;
  std::string_view rest = *v;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
  }
  return out;
}

std::array<double, 6> Config::get_alphas(const std::string& section, const std::string& key,
                                         const std::array<double, 6>& fallback) const {
  if (!has(section, key)) return fallback;
  const auto items = get_list(section, key);
  if (items.size() != 6)
    throw ConfigError(key_name(section, key) + ": expected 6 comma-separated weights, got " +
                      std::to_string(items.size()));
  std::array<double, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) {
    const char* end = items[i].data() + items[i].size();
    const auto res = std::from_chars(items[i].data(), end, out[i]);
    if (res.ec != std::errc{} || res.ptr != end)
      throw ConfigError(key_name(section, key) + ": '" + items[i] + "' is not a number");
  }
  return out;
}

std::string run_manifest(const std::string& command, const Config& config,
                         const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["timestamp"] = iso8601_utc_now();
  auto sections = nlohmann::ordered_json::object();
  for (const auto& [section, keys] : config.sections()) {
    auto obj = nlohmann::ordered_json::object();
    for (const auto& [key, value] : keys) obj[key] = value;
    sections[section] = obj;
  }
  j["config"] = sections;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

}  // namespace btx
