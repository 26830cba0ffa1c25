/*
Copyright 2026 The trigrid Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "trigrid/cli.hpp"
#include "trigrid/graph_io.hpp"

using namespace trigrid;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "trigrid");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string sample(const char* name) { return (std::filesystem::path(TRIGRID_SAMPLES_DIR) / name).string(); }

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("trigrid_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(CliCount, TriangleFile) {
  const Result r = run({"count", "--input", sample("k3.txt"), "--ranks", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "1");
  EXPECT_NE(r.out.find("counters.probes="), std::string::npos);
}

TEST(CliCount, GoldenRmat) {
  const Result r = run({"count", "--rmat-scale", "10", "--seed", "42", "--ranks", "9"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "77206");
}

TEST(CliCount, JsonReport) {
  const Result r = run({"count", "--input", sample("k4.txt"), "--ranks", "4", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out.substr(r.out.find('\n') + 1));
  EXPECT_EQ(j["triangles"], 4);
  EXPECT_EQ(j["grid_side"], 2);
  EXPECT_EQ(j["counters"]["task_total"], 6);
}

TEST(CliCount, TogglesAndMetricsFile) {
  const auto dir = temp_dir("metrics");
  const auto metrics = (dir / "m.txt").string();
  const Result r = run({"count", "--rmat-scale", "8", "--ranks", "4", "--no-direct-hash", "--no-dcsr", "--no-prune",
                        "--enum", "ijk", "--metrics", metrics, "--dump-blocks", (dir / "blocks").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find('='), std::string::npos);
  std::ifstream in(metrics);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_NE(text.str().find("options.enumeration=ijk"), std::string::npos);
  for (int rank = 0; rank < 4; ++rank) {
    const auto blob = dir / "blocks" / ("rank" + std::to_string(rank) + ".tasks.blob");
    ASSERT_TRUE(std::filesystem::exists(blob));
  }
}

TEST(CliCount, NonSquareRanksIsUsageError) {
  const Result r = run({"count", "--input", sample("k3.txt"), "--ranks", "3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("perfect square"), std::string::npos);
}

TEST(CliCount, MissingInputIsIoError) {
  EXPECT_EQ(run({"count", "--input", "/nonexistent/graph.txt", "--ranks", "1"}).code, 2);
}

TEST(CliCount, MalformedInputIsIoError) {
  const auto dir = temp_dir("bad");
  std::ofstream(dir / "bad.txt") << "0 1\nnot an edge\n";
  EXPECT_EQ(run({"count", "--input", (dir / "bad.txt").string(), "--ranks", "1"}).code, 2);
}

TEST(CliCount, ArgumentErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"count", "--ranks", "1"}).code, 1);
  EXPECT_EQ(run({"count", "--ranks", "1", "--input", sample("k3.txt"), "--rmat-scale", "4"}).code, 1);
  EXPECT_EQ(run({"count", "--ranks", "1", "--rmat-scale", "4", "--enum", "kji"}).code, 1);
  EXPECT_EQ(run({"count", "--ranks", "1", "--rmat-scale", "40"}).code, 1);
}

TEST(CliValidate, K4Matches) {
  const Result r = run({"validate", "--input", sample("k4.txt"), "--ranks", "4"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("serial=4\nmatrix=4\nengine[p=4]=4 match\nresult=match"), std::string::npos) << r.out;
}

TEST(CliValidate, RmatSweepMatches) {
  const Result r = run({"validate", "--rmat-scale", "9", "--seed", "42", "--ranks", "1,4,9,16"});
  EXPECT_EQ(r.code, 0) << r.out;
  for (int p : {1, 4, 9, 16}) {
    EXPECT_NE(r.out.find("engine[p=" + std::to_string(p) + "]=30191 match"), std::string::npos) << r.out;
  }
  EXPECT_NE(r.out.find("matrix=skipped"), std::string::npos);
}

TEST(CliValidate, InjectedFaultIsDetected) {
  const Result r = run({"validate", "--input", sample("k4.txt"), "--ranks", "1,4", "--inject-fault"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("MISMATCH"), std::string::npos);
  EXPECT_NE(r.out.find("result=mismatch"), std::string::npos);
}

TEST(CliBench, SingleRankCountHasUnitSpeedup) {
  const Result r = run({"bench", "--rmat-scale", "8", "--ranks", "4", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = nlohmann::json::parse(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0]["speedup"].get<double>(), 1.0);
}

TEST(CliBench, SweepRowsAndMonotoneTasks) {
  const Result r = run({"bench", "--rmat-scale", "10", "--ranks", "4,16", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = nlohmann::json::parse(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LE(rows[0]["tasks_touched"].get<std::uint64_t>(), rows[1]["tasks_touched"].get<std::uint64_t>());
  EXPECT_EQ(rows[0]["triangles"], rows[1]["triangles"]);
}

TEST(CliBench, ToggleSweepTable) {
  const Result r = run({"bench", "--rmat-scale", "8", "--ranks", "1,4", "--sweep-toggles"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 1u + 5 * 2);
  EXPECT_NE(r.out.find("no-prune"), std::string::npos);
}

TEST(CliGenerate, WritesLoadableGraph) {
  const auto dir = temp_dir("gen");
  for (const char* name : {"g.tgr", "g.txt"}) {
    const auto path = (dir / name).string();
    const Result r = run({"generate", "--scale", "10", "--seed", "42", "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "n=1024 m=10655 raw=16384");
    EXPECT_EQ(load_graph(path).edges.size(), 10655u);
    EXPECT_EQ(first_line(run({"count", "--input", path, "--ranks", "4"}).out), "77206");
  }
}
