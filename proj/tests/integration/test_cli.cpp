#include "exactdiff/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "exactdiff");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = exactdiff::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(EXACTDIFF_CONFIG_DIR) + "/" + name; }

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "exactdiff_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write(const fs::path& path, const json& j) {
  std::ofstream(path) << j.dump(2);
  return path.string();
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"probe", "--format", "xml"}).code == 2);
  CHECK(run({"probe", "--config", "/no/such/file.json"}).code == 2);
  const auto missing = write(scratch() / "nofn.json", json{{"points", json::array({json::array({"1/2"})})}});
  const auto r = run({"probe", "--config", missing});
  CHECK(r.code == 2);
  CHECK(r.err.find("function") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("probe reports") {
  const auto lin = run({"probe", "--config", config("probe_linear.json")});
  CHECK(lin.code == 0);
  const auto j = json::parse(lin.out);
  CHECK(j.at("points").size() == 3);
  CHECK(j.at("points")[0].at("linearity").at("value") == "0/1");

  const auto kink = run({"probe", "--config", config("probe_abs.json")});
  CHECK(kink.code == 0);
  const auto k = json::parse(kink.out).at("points")[0];
  CHECK(k.at("class_a").at("status") == "violated_at");
  CHECK(k.at("partials")[0].at("witness").at("low").at("slope") == "-1/1");
  CHECK(k.at("partials")[0].at("witness").at("high").at("slope") == "1/1");

  const auto diag = run({"probe", "--config", config("probe_abs_diagonal.json"), "--format", "csv"});
  CHECK(diag.code == 0);
  CHECK(diag.out.find("1/2 1/2,ViolatedAt,ViolatedAt,2/1,1/1,2/1,true") != std::string::npos);

  auto wrong = json::parse(std::ifstream(config("probe_abs.json")));
  wrong["expect"] = "consistent";
  CHECK(run({"probe", "--config", write(scratch() / "wrong.json", wrong)}).code == 1);
}

TEST_CASE("bet") {
  const auto sq = run({"bet", "--config", config("bet_square.json"), "--format", "csv"});
  CHECK(sq.code == 0);
  CHECK(sq.out.rfind("length,capital\n0,1/1\n1,1/2\n2,3/4\n3,5/8\n", 0) == 0);
  const auto flat = run({"bet", "--config", config("bet_constant.json"), "--format", "csv"});
  CHECK(flat.code == 0);
  CHECK(flat.out == "length,capital\n0,1/1\n1,1/1\n2,1/1\n3,1/1\n4,1/1\n5,1/1\n6,1/1\n7,1/1\n8,1/1\n");
  const auto bad = run({"bet", "--config", config("bet_corrupt.json")});
  CHECK(bad.code == 1);
  CHECK(json::parse(bad.out).at("fairness").at("witness") == "1");
  CHECK(run({"bet", "--config", config("bet_square.json"), "--depth", "4"}).code == 0);
}

TEST_CASE("counterexample: determinism, bundles and tampering") {
  const auto dir = scratch();
  auto cfg = json::parse(std::ifstream(config("toy.json")));
  cfg["bundle_out"] = (dir / "bundle.json").string();
  const auto path = write(dir / "toy.json", cfg);
  const auto a = run({"counterexample", "--config", path, "--seed", "5"});
  const auto b = run({"counterexample", "--config", path, "--seed", "5"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto report = json::parse(a.out);
  CHECK(report.at("partition").at("pass") == true);
  CHECK(report.at("vacuous") == false);

  const auto reload = write(dir / "reload.json", json{{"bundle_in", (dir / "bundle.json").string()}});
  const auto r = run({"counterexample", "--config", reload});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out).at("bundle_matches_rebuild") == true);

  auto bundle = json::parse(std::ifstream(dir / "bundle.json"));
  bundle["blocks"][3][0]["cell_scale"] = 21;
  write(dir / "tampered_bundle.json", bundle);
  const auto tampered = write(dir / "tampered.json", json{{"bundle_in", (dir / "tampered_bundle.json").string()}});
  const auto t = run({"counterexample", "--config", tampered});
  CHECK(t.code == 1);
  CHECK(json::parse(t.out).at("bundle_matches_rebuild") == false);

  const auto empty = run({"counterexample", "--config", config("toy.json"), "--depth", "0"});
  CHECK(empty.code == 0);
  CHECK(json::parse(empty.out).at("vacuous") == true);

  const auto nb = run({"counterexample", "--config", config("neighborhood.json"), "--format", "csv"});
  CHECK(nb.code == 0);
  CHECK(nb.out.find(",false") == std::string::npos);
}

TEST_CASE("counterexample: blocked build exits 1") {
  const json cfg{{"test",
                  {{"dimension", 2},
                   {"stages",
                    json::array({json{{"rule", "explicit"},
                                      {"cubes", json::array({json{{"dim", 2}, {"scale", 1}, {"corner", {"0", "0"}}}})}},
                                 json{{"rule", "explicit"},
                                      {"cubes", json::array({json{{"dim", 2}, {"scale", 2}, {"corner", {"3", "3"}}}})}}})}}},
                 {"depth", 1}};
  const auto r = run({"counterexample", "--config", write(scratch() / "blocked.json", cfg)});
  CHECK(r.code == 1);
  CHECK(json::parse(r.out).at("build_error").get<std::string>().find("stage 1") != std::string::npos);
}

TEST_CASE("dore-maleva") {
  const auto k0 = run({"dore-maleva", "--depth", "0", "--format", "csv"});
  CHECK(k0.code == 0);
  CHECK(k0.out == "stage,N,p,removed_fraction,remaining,grid_oracle\n0,,,,1/1,1/1\n");
  const auto k1 = json::parse(run({"dore-maleva", "--depth", "1"}).out);
  CHECK(k1.at("table")[1].at("remaining") == "5/9");
  const auto full = run({"dore-maleva", "--config", config("dore_maleva.json")});
  CHECK(full.code == 0);
  const auto j = json::parse(full.out);
  CHECK(j.at("below_half_stage") == 2);
  CHECK(j.at("table")[3].at("grid_oracle") == j.at("table")[3].at("remaining"));
  const auto out = (scratch() / "dm.csv").string();
  CHECK(run({"dore-maleva", "--depth", "3", "--format", "csv", "--out", out}).code == 0);
  CHECK(fs::exists(out + ".summary.json"));
  const auto bad = write(scratch() / "dm_bad.json", json{{"N", {4}}, {"p", {"1"}}, {"stages", 1}});
  CHECK(run({"dore-maleva", "--config", bad}).code == 2);
}
