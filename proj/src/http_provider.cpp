#include <string>

#include "btx/errors.hpp"
#include "btx/translation.hpp"
#include "httplib.h"
#include "json.hpp"

namespace btx {

namespace {

std::string upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return out;
}

}  // namespace

HttpTranslationProvider::HttpTranslationProvider(std::string endpoint, std::string api_key, std::string model)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), model_(std::move(model)) {
  if (endpoint_.find("://") == std::string::npos) throw ConfigError("bad translation endpoint: " + endpoint_);
}

bool HttpTranslationProvider::supports(std::string_view src, std::string_view dst) const {
  const std::string s = upper_ascii(src), d = upper_ascii(dst);
  if (s == d) return false;
  return (s == "EN" && is_registered_language(d)) || (d == "EN" && is_registered_language(s));
}

std::string HttpTranslationProvider::translate(std::string_view text, std::string_view src, std::string_view dst) {
  if (!supports(src, dst)) throw UnsupportedPair("http provider: unsupported pair");
  const auto path_start = endpoint_.find('/', endpoint_.find("://") + 3);
  const std::string base = path_start == std::string::npos ? endpoint_ : endpoint_.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(5);
  client.set_read_timeout(60);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  nlohmann::json body = {{"text", std::string(text)}, {"source", upper_ascii(src)}, {"target", upper_ascii(dst)}};
  if (!model_.empty()) body["model"] = model_;

  const auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw ProviderFailure("translation endpoint unreachable: " + endpoint_);
  if (res->status != 200)
    throw ProviderFailure("translation endpoint returned status " + std::to_string(res->status));
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("translation") || !reply["translation"].is_string())
    throw ProviderFailure("translation endpoint reply does not match {translation: str}");
  return reply["translation"].get<std::string>();
}

}  // namespace btx
