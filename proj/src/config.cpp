#include "mdseval/config.hpp"

#include <fstream>
#include <sstream>

namespace mdseval::cli {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& content) {
  std::map<std::string, std::string> out;
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ToolkitError("config line " + std::to_string(line_no) +
                         " is not `key = value`: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ToolkitError("config line " + std::to_string(line_no) + " has no key");
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> parse_key_value_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ToolkitError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_key_values(buffer.str());
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  RunConfig cfg;
  for (const auto& [key, value] : parse_key_value_file(path)) {
    if (key == "corpus_dir")
      cfg.corpus_dir = value;
    else if (key == "predictions_dir")
      cfg.predictions_dir = value;
    else if (key == "report_dir")
      cfg.report_dir = value;
    else if (key == "backend")
      cfg.backend_profile = value;
    else if (key == "discriminator")
      cfg.discriminator_profile = value;
    else if (key == "seed")
      cfg.seed = std::stoull(value);
    else if (key == "template")
      cfg.template_path = value;
    else
      throw ToolkitError("unknown run config key: " + key);
  }
  return cfg;
}

}  // namespace mdseval::cli
