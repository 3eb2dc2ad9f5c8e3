#pragma once

#include <string>
#include <string_view>

namespace btx {

// Whole-file read; throws ConfigError when the file cannot be opened.
std::string read_file(const std::string& path);

void write_file(const std::string& path, std::string_view content);

// Current wall-clock time as e.g. "2026-02-14T09:31:07Z". Only run manifests
// and cache records may carry timestamps; every other artifact must be
// byte-reproducible.
std::string iso8601_utc_now();

}  // namespace btx
