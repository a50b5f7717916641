#include "manifest.hpp"

#include <openssl/evp.h>

#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace quickdetect::cli {

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string iso8601_utc(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "quickdetect";
  j["tool_version"] = tool_version;
  j["command"] = command;
  j["arguments"] = arguments;
  j["config"] = {{"name", config_name}, {"text", config_text}};
  j["seed"] = seed;
  j["replications"] = replications;
  j["threads"] = threads;
  j["started_at"] = iso8601_utc(started);
  j["finished_at"] = iso8601_utc(finished);
  auto outs = nlohmann::ordered_json::array();
  for (const auto& o : outputs) outs.push_back({{"file", o.file}, {"bytes", o.bytes}, {"git_blob_sha1", o.git_blob_sha1}});
  j["outputs"] = outs;
  if (!extra.empty()) j["details"] = extra;
  return j;
}

void write_output(const std::filesystem::path& dir, const std::string& name, const std::string& content,
                  RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out << content;
  manifest.outputs.push_back({name, content.size(), git_blob_sha1(content)});
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << manifest.to_json().dump(2) << '\n';
}

}  // namespace quickdetect::cli
