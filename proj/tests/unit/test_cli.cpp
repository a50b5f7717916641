#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "manifest.hpp"

using namespace quickdetect;
using nlohmann::ordered_json;

namespace {

std::string config_path(const std::string& name) { return std::string(QUICKDETECT_CONFIG_DIR) + "/" + name; }

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "quickdetect");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("quickdetect_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Manifest, GitBlobHash) {
  EXPECT_EQ(cli::git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(cli::git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Manifest, Iso8601) {
  EXPECT_EQ(cli::iso8601_utc(std::chrono::system_clock::time_point{}), "1970-01-01T00:00:00Z");
}

TEST(Table, CsvAndJson) {
  cli::Table t;
  t.columns = {"a", "b"};
  t.rows.push_back({1, "x"});
  t.rows.push_back({2.5, nullptr});
  EXPECT_EQ(t.to_csv(), "a,b\n1,x\n2.5,\n");
  const ordered_json j = t.to_json();
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[1]["a"], 2.5);
  t.rows.pop_back();
  EXPECT_TRUE(t.to_json().is_object());
}

TEST(Cli, ScheduleJson) {
  const Result r = invoke({"schedule", "--beta", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = ordered_json::parse(r.out);
  EXPECT_EQ(j["m"], 25);
  EXPECT_EQ(j["ell"], 25);
  EXPECT_NEAR(j["a_beta"].get<double>(), 9.5533209431692359, 1e-12);
  EXPECT_EQ(j["m_exceeds_m0"], true);
}

TEST(Cli, InfoClosedForm) {
  const Result r = invoke({"info", "--config", config_path("table1.cfg"), "--theta", "0.9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = ordered_json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 0.81 / 0.38, 1e-14);
  EXPECT_EQ(j["method"], "closed-form");
  const Result l = invoke({"info", "--config", config_path("table1.cfg"), "--theta", "0.9", "--method", "lyapunov"});
  ASSERT_EQ(l.code, 0) << l.err;
  EXPECT_NEAR(ordered_json::parse(l.out)["value"].get<double>(), 0.81 / 0.38, 1e-12);
}

TEST(Cli, SimulateThenRunReplaysPath) {
  const auto dir = scratch_dir("replay");
  const Result s = invoke({"simulate", "--config", config_path("table1.cfg"), "--theta", "0.9", "--change-point",
                           "5", "--horizon", "200", "--seed", "3", "--out-dir", dir.string()});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto path_file = dir / "path.csv";
  ASSERT_TRUE(std::filesystem::exists(path_file));
  const Result a = invoke({"run", "--config", config_path("table1.cfg"), "--input", path_file.string(), "--format",
                           "json"});
  const Result b = invoke({"run", "--config", config_path("table1.cfg"), "--theta", "0.9", "--change-point", "5",
                           "--horizon", "200", "--seed", "3", "--format", "json"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(ordered_json::parse(a.out)["stop_time"], ordered_json::parse(b.out)["stop_time"]);
  std::filesystem::remove_all(dir);
}

TEST(Cli, OutDirWritesManifestWithHashes) {
  const auto dir = scratch_dir("manifest");
  const Result r = invoke({"lcpfa", "--config", config_path("table1.cfg"), "--reps", "500", "--seed", "9",
                           "--out-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto manifest = ordered_json::parse(read_file(dir / "manifest.json"));
  EXPECT_EQ(manifest["command"], "lcpfa");
  EXPECT_EQ(manifest["seed"], 9);
  EXPECT_EQ(manifest["replications"], 500);
  EXPECT_EQ(manifest["config"]["text"], read_file(config_path("table1.cfg")));
  ASSERT_EQ(manifest["outputs"].size(), 1u);
  const auto& o = manifest["outputs"][0];
  EXPECT_EQ(o["file"], "lcpfa.csv");
  EXPECT_EQ(o["git_blob_sha1"], cli::git_blob_sha1(read_file(dir / "lcpfa.csv")));
  std::filesystem::remove_all(dir);
}

TEST(Cli, SameSeedSameOutput) {
  const std::vector<std::string> args = {"pfa", "--config", config_path("table1.cfg"), "--rho", "0.1",
                                         "--alpha", "0.05", "--reps", "1000"};
  const Result a = invoke(args);
  const Result b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, Table1Structure) {
  const auto dir = scratch_dir("table1");
  std::filesystem::create_directories(dir);
  const std::string cfg = R"([model]
family = ar
coefficients = 0

[grid]
points = -0.9, -0.5, 0.5, 0.9

[rules]
units = exp
wsr_thresholds = 100, 120
sr_threshold = 150

[experiment]
thetas = 0.9, 0.5
change_points = 0, 10
lcpfa_span = 1
lcpfa_window = 26
replications = 10000
seed = 5
)";
  std::ofstream(dir / "small.cfg") << cfg;
  const Result r = invoke({"table1", "--config", (dir / "small.cfg").string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = ordered_json::parse(r.out);
  ASSERT_EQ(rows.size(), 8u);
  std::vector<std::string> keys;
  for (auto it = rows[0].begin(); it != rows[0].end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"theta", "nu", "rule", "threshold", "exp_threshold", "add", "add_se",
                                            "add_ci_lower", "add_ci_upper", "n_used", "censor_rate", "discard_rate",
                                            "lcpfa", "lcpfa_se", "lcpfa_argmax_k", "add_app"}));
  EXPECT_EQ(rows[0]["rule"], "wsr");
  EXPECT_EQ(rows[1]["rule"], "sr");
  EXPECT_EQ(rows[2]["nu"], 10);
  EXPECT_NEAR(rows[0]["exp_threshold"].get<double>(), 100.0, 1e-9);
  EXPECT_NEAR(rows[0]["add_app"].get<double>(), std::log(100.0) / (0.81 / 0.38), 1e-12);
  EXPECT_NEAR(rows[4]["add_app"].get<double>(), std::log(120.0) / (0.25 / 1.5), 1e-12);
  EXPECT_EQ(rows[0]["lcpfa"], rows[2]["lcpfa"]);
  for (const auto& row : rows) EXPECT_GT(row["add"].get<double>(), 1.0);
  std::filesystem::remove_all(dir);
}

TEST(Cli, Table1NeedsEnoughReplications) {
  const Result r = invoke({"table1", "--config", config_path("table1.cfg"), "--reps", "500"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("at least 10000"), std::string::npos) << r.err;
}

TEST(Cli, BadInvocationsFail) {
  EXPECT_NE(invoke({}).code, 0);
  EXPECT_NE(invoke({"nosuch"}).code, 0);
  EXPECT_NE(invoke({"schedule"}).code, 0);
  EXPECT_NE(invoke({"schedule", "--beta", "2"}).code, 0);
  EXPECT_NE(invoke({"lcpfa"}).code, 0);
  EXPECT_NE(invoke({"lcpfa", "--config", "/nonexistent.cfg"}).code, 0);
  const Result r = invoke({"lcpfa", "--config", config_path("table1.cfg"), "--reps", "10"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--reps"), std::string::npos) << r.err;
}
