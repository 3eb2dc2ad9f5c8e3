#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixtures {

struct SegmentationCase {
  std::string name;
  std::string input;
  std::vector<std::string> expected;
};

inline std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      switch (s[i]) {
        case 'n':
          out.push_back('\n');
          break;
        case 't':
          out.push_back('\t');
          break;
        case '\\':
          out.push_back('\\');
          break;
        default:
          out.push_back('\\');
          out.push_back(s[i]);
      }
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

inline std::vector<SegmentationCase> load_segmentation_cases(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture: " + path);
  std::vector<SegmentationCase> cases;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("## ", 0) == 0) {
      cases.push_back({line.substr(3), "", {}});
    } else if (line.rfind("IN: ", 0) == 0) {
      cases.back().input = unescape(line.substr(4));
    } else if (line.rfind("OUT: ", 0) == 0) {
      cases.back().expected.push_back(unescape(line.substr(5)));
    }
  }
  return cases;
}

struct CorpusDoc {
  std::string id;
  std::string body;
};

// "## id" then one sentence per line; sentences join with single spaces.
inline std::vector<CorpusDoc> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture: " + path);
  std::vector<CorpusDoc> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("## ", 0) == 0) {
      docs.push_back({line.substr(3), ""});
    } else if (!line.empty() && line[0] != '#' && !docs.empty()) {
      if (!docs.back().body.empty()) docs.back().body += " ";
      docs.back().body += line;
    }
  }
  return docs;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace fixtures
