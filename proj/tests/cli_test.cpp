#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Runs the installed CLI with stdout captured to a file; stderr is dropped.
RunResult run_cli(const std::string& args) {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "sparseloc_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  const fs::path out = dir / "stdout.txt";
  const std::string command =
      std::string(SPARSELOC_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(command.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return RunResult{code, slurp(out)};
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "sparseloc_cli_work";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Small but complete survey shared by the CLI cases.
std::string sim_flags(const fs::path& map) {
  return "simulate --seed 7 --out " + map.string() +
         " --width 90 --height 24 --grid-cols 24 --grid-rows 2 --aps 12 --samples 8"
         " --shadowing-sigma 3 --temporal-sigma 1.5";
}

}  // namespace

TEST_CASE("simulate is deterministic per seed and writes valid maps") {
  const fs::path a = work_dir() / "map_a.json";
  const fs::path b = work_dir() / "map_b.json";
  REQUIRE(run_cli(sim_flags(a)).exit_code == 0);
  REQUIRE(run_cli(sim_flags(b)).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("\"environment\"") != std::string::npos);
}

TEST_CASE("train writes a model archive") {
  const fs::path map = work_dir() / "map_a.json";
  const fs::path model = work_dir() / "model.json";
  if (!fs::exists(map)) REQUIRE(run_cli(sim_flags(map)).exit_code == 0);
  REQUIRE(run_cli("train --map " + map.string() + " --out " + model.string()).exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(model));
  CHECK(doc.contains("clusters"));
  CHECK(doc.contains("psi"));
}

TEST_CASE("cluster --dump prints per-orientation heads and members") {
  const fs::path map = work_dir() / "map_a.json";
  if (!fs::exists(map)) REQUIRE(run_cli(sim_flags(map)).exit_code == 0);
  const RunResult r = run_cli("cluster --map " + map.string() + " --dump");
  REQUIRE(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(r.stdout_text);
  CHECK(doc.is_array());
  CHECK(doc.size() == 4);
  CHECK(doc[0].contains("clusters"));
  CHECK(doc[0]["clusters"][0].contains("head"));
}

TEST_CASE("localize emits one fix json per measurement row") {
  const fs::path map = work_dir() / "map_a.json";
  const fs::path model = work_dir() / "model.json";
  const fs::path fixes = work_dir() / "fixes.csv";
  const fs::path truth = work_dir() / "truth.csv";
  if (!fs::exists(map)) REQUIRE(run_cli(sim_flags(map)).exit_code == 0);
  if (!fs::exists(model))
    REQUIRE(run_cli("train --map " + map.string() + " --out " + model.string()).exit_code == 0);
  REQUIRE(run_cli(sim_flags(map) + " --fixes 5 --fixes-out " + fixes.string() +
                  " --truth-out " + truth.string())
              .exit_code == 0);

  const RunResult r = run_cli("localize --model " + model.string() + " --measurements " +
                              fixes.string() + " --method lasso --num-aps 8");
  REQUIRE(r.exit_code == 0);
  int lines = 0;
  std::stringstream ss(r.stdout_text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    ++lines;
    const auto doc = nlohmann::json::parse(line);
    CHECK(doc.contains("x"));
    CHECK(doc.contains("y"));
    CHECK(doc["method"] == "lasso");
    CHECK(doc.contains("support"));
    CHECK(doc.contains("outlier_aps"));
  }
  CHECK(lines == 5);
  CHECK(slurp(truth).starts_with("x,y,orientation,outlier_aps\n"));
}

TEST_CASE("localize with m-lasso flags injected outliers end to end") {
  const fs::path map = work_dir() / "map_a.json";
  const fs::path model = work_dir() / "model.json";
  const fs::path fixes = work_dir() / "bad_fixes.csv";
  if (!fs::exists(map)) REQUIRE(run_cli(sim_flags(map)).exit_code == 0);
  if (!fs::exists(model))
    REQUIRE(run_cli("train --map " + map.string() + " --out " + model.string()).exit_code == 0);
  // Corrupt two APs that sit near the test fixes so selection keeps them.
  REQUIRE(run_cli(sim_flags(map) + " --fixes 6 --fixes-out " + fixes.string() +
                  " --outlier-aps 7,8 --outlier-bias 30")
              .exit_code == 0);

  const RunResult r = run_cli("localize --model " + model.string() + " --measurements " +
                              fixes.string() + " --method m-lasso --num-aps 8 --mu 0.5");
  REQUIRE(r.exit_code == 0);
  int flagged_rows = 0;
  std::stringstream ss(r.stdout_text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto doc = nlohmann::json::parse(line);
    for (const auto& ap : doc["outlier_aps"]) {
      if (ap == 7 || ap == 8) {
        ++flagged_rows;
        break;
      }
    }
  }
  CHECK(flagged_rows >= 3); // selection keeps the corrupted APs in most fixes
}

TEST_CASE("evaluate writes one csv row per method") {
  const fs::path map = work_dir() / "map_a.json";
  const fs::path report = work_dir() / "report.csv";
  if (!fs::exists(map)) REQUIRE(run_cli(sim_flags(map)).exit_code == 0);
  REQUIRE(run_cli("evaluate --map " + map.string() + " --out " + report.string() +
                  " --methods lasso,cs,wknn --num-aps 8 --num-fixes 6 --seed 2 --knn-k 5")
              .exit_code == 0);
  const std::string text = slurp(report);
  CHECK(text.starts_with("method,mae,p25,p50,p75,p100,time_ms\n"));
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("lasso,") != std::string::npos);
  CHECK(text.find("cs,") != std::string::npos);
  CHECK(text.find("wknn,") != std::string::npos);
}

TEST_CASE("evaluate without timing is byte-stable across runs") {
  const fs::path map = work_dir() / "map_a.json";
  const fs::path rep_a = work_dir() / "rep_a.csv";
  const fs::path rep_b = work_dir() / "rep_b.csv";
  const fs::path cdf_a = work_dir() / "cdf_a.csv";
  const fs::path cdf_b = work_dir() / "cdf_b.csv";
  if (!fs::exists(map)) REQUIRE(run_cli(sim_flags(map)).exit_code == 0);
  const std::string common = "evaluate --map " + map.string() +
                             " --methods lasso,wknn --num-aps 8 --num-fixes 6 --seed 3"
                             " --knn-k 5 --no-timing";
  REQUIRE(run_cli(common + " --out " + rep_a.string() + " --cdf-out " + cdf_a.string())
              .exit_code == 0);
  REQUIRE(run_cli(common + " --out " + rep_b.string() + " --cdf-out " + cdf_b.string())
              .exit_code == 0);
  CHECK(slurp(rep_a) == slurp(rep_b));
  CHECK(slurp(cdf_a) == slurp(cdf_b));
}

TEST_CASE("cv writes the tuple grid with a best marker") {
  const fs::path map = work_dir() / "map_a.json";
  const fs::path out = work_dir() / "cv.csv";
  if (!fs::exists(map)) REQUIRE(run_cli(sim_flags(map)).exit_code == 0);
  REQUIRE(run_cli("cv --map " + map.string() + " --out " + out.string() +
                  " --method lasso --lambda-grid 0.01,0.1,100 --folds 2 --num-fixes 6"
                  " --num-aps 8 --seed 5")
              .exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.starts_with("lambda,alpha,mu,mse,best\n"));
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find(",1\n") != std::string::npos);
}

TEST_CASE("usage errors exit 1 and data errors exit 2") {
  CHECK(run_cli("localize").exit_code == 1);                       // missing required flags
  CHECK(run_cli("frobnicate").exit_code == 1);                     // unknown subcommand
  const fs::path bad = work_dir() / "bad.json";
  std::ofstream(bad) << "{\"config\": 1}";
  CHECK(run_cli("train --map " + bad.string() + " --out /dev/null").exit_code == 2);
  CHECK(run_cli("train --map " + (work_dir() / "missing.json").string() +
                " --out /dev/null")
            .exit_code == 2);
}
