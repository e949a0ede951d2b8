#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "mdseval/data_model.hpp"

namespace mdseval::cli {

// Flat `key = value` file, one pair per line, '#' comments. Used for the
// pipeline config, build plans and run configs.
std::map<std::string, std::string> parse_key_value_file(
    const std::filesystem::path& path);
std::map<std::string, std::string> parse_key_values(const std::string& content);

struct RunConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path predictions_dir;
  std::filesystem::path report_dir;
  std::string backend_profile = "echo";
  std::string discriminator_profile = "containment";
  uint64_t seed = 0;
  std::filesystem::path template_path;

  static RunConfig from_file(const std::filesystem::path& path);
};

}  // namespace mdseval::cli
