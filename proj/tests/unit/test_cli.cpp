#include <filesystem>
#include <fstream>
#include <sstream>

#include "carpetdim/io.hpp"
#include "carpetdim/parallel.hpp"
#include "carpetdim/run.hpp"
#include "carpetdim/scalar_json.hpp"
#include "doctest.h"

using namespace carpetdim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("carpetdim-test-" + name);
  fs::remove_all(d);
  return d;
}

RunResult run_quiet(const RunConfig& c) {
  std::ostringstream sink;
  return run(c, sink);
}

}  // namespace

TEST_CASE("report task on the golden preset") {
  RunConfig c;
  c.preset = "pu-golden";
  c.tasks = {"report"};
  c.out_dir = fresh_dir("report").string();
  const auto r = run_quiet(c);
  REQUIRE(r.exit_code == 0);
  CHECK(r.complete);
  const Json j = Json::parse(slurp(fs::path(c.out_dir) / "report.json"));
  CHECK(j["case"] == 1);
  CHECK(j["ad_F"].get<double>() == doctest::Approx(1.3472).epsilon(1e-3));
}

TEST_CASE("h task on the cantor preset") {
  RunConfig c;
  c.preset = "cantor-third";
  c.tasks = {"h"};
  c.kmax = 10;
  c.out_dir = fresh_dir("h").string();
  REQUIRE(run_quiet(c).exit_code == 0);
  std::istringstream csv(slurp(fs::path(c.out_dir) / "h.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "k,max_class_size,H_k,H_lower,symbolic_min_dim");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream ls(line);
    std::string k, size, hk;
    std::getline(ls, k, ',');
    std::getline(ls, size, ',');
    std::getline(ls, hk, ',');
    CHECK(size == "1");
    CHECK(std::stod(hk) == 0.0);
  }
  CHECK(rows == 10);
}

TEST_CASE("invalid carpet exits with code 2") {
  RunConfig c;
  c.carpet = R"({"alpha": {"rat": [1, 2]}, "beta": {"rat": [1, 3]},
                "maps": [{"tx": {"rat": [0, 1]}, "ty": {"rat": [0, 1]}},
                         {"tx": {"rat": [2, 3]}, "ty": {"rat": [1, 2]}}]})";
  c.tasks = {"validate"};
  c.out_dir = fresh_dir("bad").string();
  const auto r = run_quiet(c);
  CHECK(r.exit_code == 2);
  CHECK(r.error.find("OrderViolation") != std::string::npos);
}

TEST_CASE("configuration errors") {
  RunConfig c;
  c.preset = "pu-golden";
  c.out_dir = fresh_dir("config").string();
  c.tasks = {};
  CHECK(run_quiet(c).exit_code == 2);
  c.tasks = {"nonsense"};
  CHECK(run_quiet(c).exit_code == 2);
  c.tasks = {"sweep"};
  c.betas = {};
  CHECK(run_quiet(c).exit_code == 2);
}

TEST_CASE("budget overrun keeps partial outputs") {
  RunConfig c;
  c.preset = "pu-golden";
  c.tasks = {"validate", "measure"};
  c.depth = 30;
  c.max_words = 1000;
  c.engine = "exact";
  c.out_dir = fresh_dir("budget").string();
  const auto r = run_quiet(c);
  CHECK(r.exit_code == 3);
  CHECK_FALSE(r.complete);
  const Json m = Json::parse(slurp(fs::path(c.out_dir) / "manifest.json"));
  CHECK(m["complete"] == false);
  CHECK(m["failed_task"] == "measure");
  CHECK(fs::exists(fs::path(c.out_dir) / "validate.json"));
}

TEST_CASE("manifest hashes match the files") {
  RunConfig c;
  c.preset = "cantor-third";
  c.tasks = {"validate", "classes", "measure"};
  c.kmax = 4;
  c.depth = 6;
  c.bins = 81;
  c.out_dir = fresh_dir("manifest").string();
  REQUIRE(run_quiet(c).exit_code == 0);
  const Json m = Json::parse(slurp(fs::path(c.out_dir) / "manifest.json"));
  CHECK(m["complete"] == true);
  REQUIRE(m["files"].size() >= 3);
  for (const auto& f : m["files"]) {
    const std::string body = slurp(fs::path(c.out_dir) / f["path"].get<std::string>());
    CHECK(f["sha256"] == sha256_hex(body));
    CHECK(f["bytes"] == body.size());
  }
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("sweep rows") {
  RunConfig c;
  c.alpha = "1/2";
  c.tasks = {"sweep"};
  c.betas = {"0.55", "0.75", "2^(-1/2)"};
  c.out_dir = fresh_dir("sweep").string();
  REQUIRE(run_quiet(c).exit_code == 0);
  std::istringstream csv(slurp(fs::path(c.out_dir) / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "beta,convolution_bound,s_upper,s_tau,bd_F,ad_F_lo,ad_F_hi");
  int rows = 0;
  std::string last;
  while (std::getline(csv, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 3);
  std::istringstream ls(last);
  std::string beta, lo, hi;
  std::getline(ls, beta, ',');
  std::getline(ls, lo, ',');
  std::getline(ls, hi, ',');
  CHECK(std::stod(lo) == 1.0);
  CHECK(std::stod(hi) == 1.0);
}

TEST_CASE("identical configuration gives identical bytes") {
  RunConfig c;
  c.preset = "pu-golden";
  c.tasks = {"h", "measure", "boxdim"};
  c.kmax = 8;
  c.depth = 8;
  c.bins = 100;
  c.scales = {"2^-3", "2^-5", "2^-7", "2^-9", "2^-10"};
  c.out_dir = fresh_dir("det-a").string();
  set_worker_count(1);
  REQUIRE(run_quiet(c).exit_code == 0);
  const std::string a = slurp(fs::path(c.out_dir) / "manifest.json");
  c.out_dir = fresh_dir("det-b").string();
  set_worker_count(4);
  REQUIRE(run_quiet(c).exit_code == 0);
  set_worker_count(0);
  const Json ja = Json::parse(a);
  const Json jb = Json::parse(slurp(fs::path(c.out_dir) / "manifest.json"));
  CHECK(ja["files"] == jb["files"]);
}
