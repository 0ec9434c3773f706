#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("cuspwave_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return dir / file;
  }
  std::string read(const std::string& file) const {
    std::ifstream f(dir / file, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  // Runs the CLI; stdout/stderr go to files in the sandbox.
  int cli(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + CUSPWAVE_CLI + "\" " + args + " > \"" +
                            (dir / "stdout.txt").string() + "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
};

const std::string kTiny = R"([grid]
L = 6
dx = 0.05
t_final = 1
output_stride = 5
[perturbation]
bump = W 1e-3 0 1.5
bump = q 1e-3 0.2 1.5
[output]
csv = tiny.csv
verdict = tiny.json
)";

const std::string kBackground = R"([grid]
L = 6
dx = 0.05
t_final = 1
output_stride = 5
[output]
csv = bg.csv
verdict = bg.json
)";

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("cli run on the background") {
  Sandbox sb("bg");
  const auto cfg = sb.write("bg.cfg", kBackground);
  REQUIRE(sb.cli("run --config \"" + cfg.string() + "\" --out \"" + sb.dir.string() + "\"") == 0);
  const auto rows = parse_csv(sb.read("bg.csv"));
  REQUIRE(rows.size() > 2);
  const auto& head = rows.front();
  for (std::size_t r = 1; r < rows.size(); ++r)
    for (std::size_t c = 1; c < head.size(); ++c) {
      const std::string& name = head[c];
      if (name == "S" || name == "sup_null_A" || name == "sup_null_B") continue;
      INFO(name);
      CHECK(std::abs(std::stod(rows[r][c])) <= 1e-11);
    }
  const auto v = nlohmann::json::parse(sb.read("bg.json"));
  CHECK(v["verdict"] == "PASS");
  CHECK(v["status"] == "completed");
}

TEST_CASE("cli output is deterministic") {
  Sandbox sb("det");
  const auto cfg = sb.write("tiny.cfg", kTiny);
  REQUIRE(sb.cli("run --config \"" + cfg.string() + "\" --out \"" + (sb.dir / "a").string() + "\"") == 0);
  REQUIRE(sb.cli("run --config \"" + cfg.string() + "\" --out \"" + (sb.dir / "b").string() + "\" --threads 4") == 0);
  CHECK(sb.read("a/tiny.csv") == sb.read("b/tiny.csv"));
  CHECK_FALSE(sb.read("a/tiny.csv").empty());
}

TEST_CASE("cli environment override of the output directory") {
  Sandbox sb("env");
  const auto cfg = sb.write("tiny.cfg", kTiny);
  const auto env_dir = sb.dir / "from_env";
  REQUIRE(sb.cli("run --config \"" + cfg.string() + "\" --out \"" + (sb.dir / "flag").string() + "\"",
                 "CUSPWAVE_OUT=\"" + env_dir.string() + "\"") == 0);
  CHECK(fs::exists(env_dir / "tiny.csv"));
  CHECK_FALSE(fs::exists(sb.dir / "flag" / "tiny.csv"));
}

TEST_CASE("cli exit codes") {
  Sandbox sb("codes");
  const auto gate = sb.write("gate.cfg", kTiny + "[perturbation]\nbump = R 0.8 0 1\n");
  CHECK(sb.cli("run --config \"" + gate.string() + "\" --out \"" + sb.dir.string() + "\"") == 3);
  CHECK(sb.read("stderr.txt").find("Theorem-1 gate") != std::string::npos);

  const auto blow = sb.write("blow.cfg", kTiny + "[perturbation]\nbump = W 1e9 0 1\n");
  CHECK(sb.cli("run --config \"" + blow.string() + "\" --out \"" + sb.dir.string() + "\"") == 2);

  const auto bad = sb.write("bad.cfg", "[grid]\nwidth = 3\n");
  CHECK(sb.cli("run --config \"" + bad.string() + "\"") == 1);
  CHECK(sb.cli("run") == 1);
  CHECK(sb.cli("") == 1);

  const auto strict = sb.write("strict.cfg", kTiny + "[grid]\nt_final = 5\nL = 8\n[diagnostics]\nwindow_start = 1\nlambda_max = -5\n");
  CHECK(sb.cli("decay-report --config \"" + strict.string() + "\" --out \"" + sb.dir.string() + "\"") == 4);
  const auto v = nlohmann::json::parse(sb.read("tiny.json"));
  CHECK(v["verdict"] == "FAIL");
  CHECK(v["lambda"].get<double>() > -5.0);
}

TEST_CASE("cli verification subcommands") {
  Sandbox sb("verify");
  CHECK(sb.cli("verify-background --seed 3 --out \"" + sb.dir.string() + "\"") == 0);
  CHECK(nlohmann::json::parse(sb.read("verify_background.json"))["verdict"] == "PASS");

  const auto iso = sb.write("iso.cfg", kBackground + "[isometry]\na = 1\nb = 0.3\nc = 0.2\nd = 1.06\n[scheme]\nstencil_order = 2\n");
  CHECK(sb.cli("isometry-check --config \"" + iso.string() + "\" --out \"" + sb.dir.string() + "\"") == 0);
  const auto vi = nlohmann::json::parse(sb.read("bg.json"));
  CHECK(vi["drift"].get<double>() <= vi["bound"].get<double>());
  CHECK(vi["drift"].get<double>() > 0.0);

  const auto conv = sb.write("conv.cfg", kBackground);
  CHECK(sb.cli("convergence --config \"" + conv.string() + "\" --dx-list 0.05,0.025,0.0125 --threads 3 --out \"" +
               sb.dir.string() + "\"") == 0);
  const auto vc = nlohmann::json::parse(sb.read("bg.json"));
  CHECK(vc["quantities"][0]["order"] == "EXACT");

  const auto cr = sb.write("cr.cfg", kTiny + "[diagnostics]\nresidual_tol = 1\n");
  CHECK(sb.cli("constraint-report --config \"" + cr.string() + "\" --out \"" + sb.dir.string() + "\"") == 0);
  const auto vr = nlohmann::json::parse(sb.read("tiny.json"));
  CHECK(vr["lapse"] == "constrained");
  CHECK(vr["reports"].size() > 2);
}
