#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string command = std::string(PERSYM_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  std::array<char, 4096> buffer;
  size_t got = 0;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    result.output.append(buffer.data(), got);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string data_path(const std::string& name) {
  return std::string(PERSYM_DATA_DIR) + "/" + name;
}

nlohmann::json run_json(const std::string& args) {
  const CliResult result = run_cli(args);
  REQUIRE(result.exit_code == 0);
  return nlohmann::json::parse(result.output);
}

}  // namespace

TEST_CASE("cli reports the symmetry group of a square") {
  const nlohmann::json report = run_json("sym-group " + data_path("square.json"));
  CHECK(report["command"] == "sym-group");
  CHECK(report["results"]["order"] == 8);
  CHECK(report["results"]["type"] == "Dihedral(4)");
  CHECK(report["results"]["rotations"] == 4);
  CHECK(report["results"]["reflections"] == 4);
  CHECK(report["results"]["rotoreflections"] == 0);
  CHECK(report["results"]["elements"].size() == 8);
  CHECK(report["inputs"].size() == 1);
  CHECK(report["warnings"].empty());
}

TEST_CASE("cli reports the seven-bar barcode of the quad filtration") {
  const nlohmann::json report = run_json("barcode " + data_path("example_4_4.json"));
  const auto& bars = report["results"]["bars"];
  REQUIRE(report["results"]["bar_count"] == 7);
  std::vector<std::pair<int, int>> intervals;
  for (const auto& bar : bars)
    intervals.emplace_back(bar["birth_index"].get<int>(), bar["death_index"].get<int>());
  std::sort(intervals.begin(), intervals.end());
  const std::vector<std::pair<int, int>> expected = {{0, 1}, {0, 1}, {0, 2}, {1, 2},
                                                     {1, 2}, {1, 2}, {1, 2}};
  CHECK(intervals == expected);
}

TEST_CASE("cli finds the best mirror of the bent quadrilateral") {
  const nlohmann::json report = run_json("defect-sweep " + data_path("ex_10_4.csv") +
                                         " --axes 180 --rotations 180");
  const auto& results = report["results"];
  CHECK(results["record_count"] == 359);
  CHECK(results["best_mirror"]["defect"].get<double>() == Catch::Approx(0.6130).margin(1e-3));
  CHECK(results["best_mirror"]["axis_deg"].get<double>() == Catch::Approx(171.0).margin(1.0));
  CHECK(results["records"].size() == 359);
}

TEST_CASE("cli finds the best reflection axis of the right triangle") {
  const nlohmann::json report =
      run_json("measure-sweep " + data_path("rtriangle.csv") + " --angles 180");
  const auto& best = report["results"]["best"];
  CHECK(best["measure"].get<double>() == Catch::Approx(0.9899).margin(1e-4));
  CHECK(best["axis_deg"].get<double>() == Catch::Approx(168.0).margin(1.0));
  const std::vector<std::pair<double, double>> expected = {
      {0.1932, 0.9090}, {2.0203, 0.0955}, {-0.2135, -0.0045}};
  REQUIRE(best["reflected_points"].size() == 3);
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(best["reflected_points"][i][0].get<double>() ==
          Catch::Approx(expected[i].first).margin(1e-3));
    CHECK(best["reflected_points"][i][1].get<double>() ==
          Catch::Approx(expected[i].second).margin(1e-3));
  }
}

TEST_CASE("cli metrics of a document against itself vanish") {
  const std::string path = data_path("example_4_4.json");
  for (const std::string metric : {"S", "E", "L", "I", "bottleneck"}) {
    CAPTURE(metric);
    const nlohmann::json report =
        run_json("metrics " + path + " " + path + " --metric " + metric);
    CHECK(report["results"]["metric"] == metric);
    CHECK(report["results"]["distance"].get<double>() == 0.0);
    CHECK(report["inputs"].size() == 2);
  }
}

TEST_CASE("cli metrics separate different filtrations") {
  const nlohmann::json report = run_json("metrics " + data_path("square.json") + " " +
                                         data_path("example_4_4.json") + " --metric E");
  CHECK(report["results"]["distance"].get<double>() > 0.0);
}

TEST_CASE("cli output is deterministic") {
  const std::string args = "defect-sweep " + data_path("ex_10_4.csv") +
                           " --axes 45 --rotations 45";
  const CliResult first = run_cli(args);
  const CliResult second = run_cli(args);
  REQUIRE(first.exit_code == 0);
  CHECK(first.output == second.output);

  const nlohmann::json serial = run_json(args + " --threads 1");
  const nlohmann::json parallel = run_json(args + " --threads 4");
  CHECK(serial["results"] == parallel["results"]);
}

TEST_CASE("cli writes the same report to --out") {
  const std::string out_path = "/tmp/persym_cli_out.json";
  const std::string args = "sym-group " + data_path("square.json");
  const CliResult direct = run_cli(args);
  const CliResult redirected = run_cli(args + " --out " + out_path);
  REQUIRE(redirected.exit_code == 0);
  CHECK(redirected.output.empty());
  std::ifstream file(out_path, std::ios::binary);
  const std::string written((std::istreambuf_iterator<char>(file)),
                            std::istreambuf_iterator<char>());
  CHECK(written == direct.output);
  std::remove(out_path.c_str());
}

TEST_CASE("cli emits csv tables on request") {
  const CliResult result =
      run_cli("sym-group " + data_path("square.json") + " --format csv");
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.rfind("kind,angle_deg,perm\n", 0) == 0);
  CHECK(std::count(result.output.begin(), result.output.end(), '\n') == 9);

  const CliResult metrics = run_cli("metrics " + data_path("square.json") + " " +
                                    data_path("square.json") + " --format csv");
  CHECK(metrics.output == "metric,distance\nE,0\n");
}

TEST_CASE("cli exit codes distinguish failure modes") {
  CHECK(run_cli("no-such-command").exit_code == 64);
  CHECK(run_cli("").exit_code == 64);
  CHECK(run_cli("sym-group /no/such/file.json").exit_code == 2);
  CHECK(run_cli("sym-group").exit_code == 2);
  CHECK(run_cli("metrics " + data_path("square.json") + " " + data_path("square.json") +
                " --metric Q")
            .exit_code == 2);
  CHECK(run_cli("measure-sweep " + data_path("square.json") + " --angles 0").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("cli rejects malformed documents") {
  const std::string bad_path = "/tmp/persym_cli_bad.json";
  {
    std::ofstream file(bad_path);
    file << "{\"dimension\": 2, \"frames\": []}";
  }
  CHECK(run_cli("sym-group " + bad_path).exit_code == 2);
  {
    std::ofstream file(bad_path);
    file << "not json at all";
  }
  CHECK(run_cli("sym-group " + bad_path).exit_code == 2);
  std::remove(bad_path.c_str());
}

TEST_CASE("cli echoed inputs round-trip") {
  const nlohmann::json first = run_json("barcode " + data_path("two_frames.json"));
  const std::string echo_path = "/tmp/persym_cli_echo.json";
  {
    std::ofstream file(echo_path);
    file << first["inputs"][0].dump();
  }
  const nlohmann::json second = run_json("barcode " + echo_path);
  CHECK(second["results"] == first["results"]);
  CHECK(second["inputs"][0] == first["inputs"][0]);
  std::remove(echo_path.c_str());
}

TEST_CASE("cli reports the surviving cayley graph of the stretched square") {
  const nlohmann::json report = run_json("cayley " + data_path("two_frames.json"));
  const auto& results = report["results"];
  CHECK(results["vertex_count"] == 8);
  CHECK(results["generator_count"] == 3);
  CHECK(results["component_count"] == 2);
  const auto& spectrum = results["laplacian_spectrum"];
  REQUIRE(spectrum.size() == 8);
  const std::vector<double> expected = {0, 0, 4, 4, 4, 4, 4, 4};
  for (size_t i = 0; i < expected.size(); ++i)
    CHECK(spectrum[i].get<double>() == Catch::Approx(expected[i]).margin(1e-8));
}

TEST_CASE("cli reports degree weights of the stretched square") {
  const nlohmann::json report = run_json("degrees " + data_path("two_frames.json"));
  const auto& results = report["results"];
  CHECK(results["vertex_weights"] == nlohmann::json({19, 7}));
  CHECK(results["edge_weights"] == nlohmann::json({7}));
  CHECK(results["profiles"][0]["polynomial"] == "t + 5t^2 + 2t^4");
  CHECK(results["profiles"][1]["polynomial"] == "t + 3t^2");
}

TEST_CASE("cli decomposes the permutation representation of the stretched square") {
  const nlohmann::json report = run_json("rep-barcode " + data_path("two_frames.json"));
  const auto& results = report["results"];
  CHECK(results["group_order"] == 2);
  CHECK(results["rotation_count"] == 2);
  REQUIRE(results["bars"].size() == 2);
  for (const auto& entry : results["bars"]) {
    REQUIRE(entry["intervals"].size() == 2);
    for (const auto& bar : entry["intervals"]) {
      CHECK(bar["birth_index"] == 0);
      CHECK(bar["death_index"] == 1);
    }
  }
  CHECK(results["characters"][0]["re"].get<double>() == Catch::Approx(4.0));
  CHECK(results["characters"][1]["re"].get<double>() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("cli computes the displacement spectrum of the stretched square") {
  const nlohmann::json report = run_json("fourier-demo " + data_path("two_frames.json"));
  const auto& results = report["results"];
  CHECK(results["orders"] == nlohmann::json({2, 2}));
  CHECK(results["multipliers"] == nlohmann::json({1}));
  REQUIRE(results["spectrum"].size() == 2);
  CHECK(results["spectrum"][0]["re"].get<double>() == Catch::Approx(8.0));
  CHECK(results["spectrum"][1]["re"].get<double>() == Catch::Approx(-8.0));
  CHECK(results["entropy"].get<double>() == Catch::Approx(std::log(2.0)).margin(1e-9));
}

TEST_CASE("cli computes the displacement spectrum of the square") {
  const nlohmann::json report = run_json("fourier-demo " + data_path("square.json"));
  const auto& results = report["results"];
  CHECK(results["orders"] == nlohmann::json({4}));
  const std::vector<double> expected = {16, -8, 0, -8};
  REQUIRE(results["spectrum"].size() == 4);
  for (size_t k = 0; k < expected.size(); ++k) {
    CHECK(results["spectrum"][k]["re"].get<double>() ==
          Catch::Approx(expected[k]).margin(1e-9));
    CHECK(results["spectrum"][k]["im"].get<double>() == Catch::Approx(0.0).margin(1e-9));
  }
}
