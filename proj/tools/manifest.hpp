#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace quickdetect::cli {

// SHA-1 of "blob <size>\0<content>", the hash `git hash-object` prints.
std::string git_blob_sha1(std::string_view content);

std::string iso8601_utc(std::chrono::system_clock::time_point t);

struct ManifestOutput {
  std::string file;
  std::size_t bytes = 0;
  std::string git_blob_sha1;
};

// Everything needed to re-run a command bitwise: the command line, the
// config text it read, the seed, and hashes of what it wrote.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string config_name;
  std::string config_text;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  unsigned threads = 0;
  std::string tool_version;
  std::chrono::system_clock::time_point started;
  std::chrono::system_clock::time_point finished;
  std::vector<ManifestOutput> outputs;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const;
};

// Writes `content` to dir/name and records it in the manifest.
void write_output(const std::filesystem::path& dir, const std::string& name, const std::string& content,
                  RunManifest& manifest);

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);

}  // namespace quickdetect::cli
