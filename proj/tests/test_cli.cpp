// End-to-end checks of the command-line tool: exit codes, file formats and
// determinism across worker counts. Drives the installed binary through
// std::system using paths provided by the build.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("ROBUSTCOOL_CLI");
  REQUIRE(p != nullptr);
  return p;
}

std::string data_dir() {
  const char* p = std::getenv("ROBUSTCOOL_DATA");
  REQUIRE(p != nullptr);
  return p;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("robustcool_test_" + name);
}

int run(const std::string& args, const fs::path& stdout_file = {},
        const fs::path& stderr_file = {}) {
  std::string cmd = cli_path() + " " + args;
  if (!stdout_file.empty()) cmd += " > " + stdout_file.string();
  if (!stderr_file.empty()) cmd += " 2> " + stderr_file.string();
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string value_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("missing config file exits with the config code") {
  CHECK(run("rates --config /nonexistent/path.cfg", temp_file("null1"),
            temp_file("null2")) == 2);
}

TEST_CASE("unknown config key exits with the config code and names the key") {
  const fs::path cfg = temp_file("unknown.cfg");
  std::ofstream(cfg) << "nu = 1\nbogus_knob = 3\n";
  const fs::path err = temp_file("unknown.err");
  CHECK(run("rates --config " + cfg.string(), temp_file("unknown.out"), err) == 2);
  CHECK(slurp(err).find("bogus_knob") != std::string::npos);
}

TEST_CASE("rates on a resonance config returns vanishing a_plus") {
  const fs::path out = temp_file("rates.json");
  CHECK(run("rates --config " + data_dir() + "/resonance.cfg", out,
            temp_file("rates.err")) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  const double scale =
      std::max(j["a_plus_eit"].get<double>(), j["a_plus_ssh"].get<double>());
  CHECK(std::abs(j["a_plus"].get<double>()) <= 1e-14 * scale);
  CHECK(j.contains("W"));
  CHECK(j.contains("curly_D"));
  CHECK(j["provenance"].contains("config_hash"));
  CHECK(j["provenance"]["resolved_config"].contains("omega_b"));
}

TEST_CASE("validity gate trips exit code 4 and --force bypasses it") {
  const fs::path cfg = temp_file("gate.cfg");
  std::ofstream(cfg) << "nu = 1\ngamma = 1\nomega_a = 0.01\neta_a = 0.05\n"
                     << "eta_b = 0.2\nomega_b = 0.5\ncutoff = 6\n";
  CHECK(run("rates --config " + cfg.string(), temp_file("gate.out"),
            temp_file("gate.err")) == 4);
  CHECK(run("rates --force --config " + cfg.string(), temp_file("gate2.out"),
            temp_file("gate2.err")) == 0);
}

TEST_CASE("steady subcommand emits the steady-state summary") {
  const fs::path out = temp_file("steady.json");
  CHECK(run("steady --config " + data_dir() + "/resonance_small.cfg", out,
            temp_file("steady.err")) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["mean_n"].get<double>() >= 0.0);
  CHECK(j["pop_e"].get<double>() < 1e-3);
}

TEST_CASE("evolve subcommand writes the CSV time series") {
  const fs::path out = temp_file("evolve.csv");
  CHECK(run("evolve --t-final 5 --samples 10 --nbar 1 --config " + data_dir() +
                "/resonance_small.cfg",
            out, temp_file("evolve.err")) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("t,mean_n,pop_g1,pop_g2,pop_e,purity") != std::string::npos);
  CHECK(csv.find("# config_hash") != std::string::npos);
  std::istringstream in(value_rows(csv));
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 12);  // header + 11 samples
}

TEST_CASE("scan over 101 points emits 101 rows") {
  const fs::path out = temp_file("scan101.csv");
  CHECK(run("scan --config " + data_dir() + "/scan_omega_b_101.cfg", out,
            temp_file("scan101.err")) == 0);
  std::istringstream in(value_rows(slurp(out)));
  int rows = -1;  // discount the header
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 101);
}

TEST_CASE("scan output is identical for any thread count") {
  const fs::path out1 = temp_file("scan_t1.csv");
  const fs::path out4 = temp_file("scan_t4.csv");
  CHECK(run("scan --threads 1 --config " + data_dir() + "/scan_omega_b_101.cfg",
            out1, temp_file("scan_t1.err")) == 0);
  CHECK(run("scan --threads 4 --config " + data_dir() + "/scan_omega_b_101.cfg",
            out4, temp_file("scan_t4.err")) == 0);
  CHECK(value_rows(slurp(out1)) == value_rows(slurp(out4)));
}

TEST_CASE("mc subcommand runs a small deterministic ensemble") {
  const fs::path out1 = temp_file("mc1.csv");
  const fs::path out2 = temp_file("mc2.csv");
  const std::string args = "mc --traj 8 --t-final 5 --samples 5 --nbar 1 --seed 7 "
                           "--config " + data_dir() + "/resonance_small.cfg";
  CHECK(run(args + " --threads 1", out1, temp_file("mc1.err")) == 0);
  CHECK(run(args + " --threads 3", out2, temp_file("mc2.err")) == 0);
  CHECK(value_rows(slurp(out1)) == value_rows(slurp(out2)));
  CHECK(slurp(out1).find("mean_n_mode_0,stderr_mode_0") != std::string::npos);
}

TEST_CASE("derive subcommand maps physical parameters") {
  const fs::path out = temp_file("derive.json");
  CHECK(run("derive --map geometry --theta-deg 60", out, temp_file("derive.err")) ==
        0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["eta_ratio"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));

  CHECK(run("derive --map raman --omega-p 0.3 --eta-p 0.005 --delta 100 --nu 1",
            out, temp_file("derive2.err")) == 0);
  const auto r = nlohmann::json::parse(slurp(out));
  CHECK(r["eta_b"].get<double>() / 0.005 == doctest::Approx(2.0).epsilon(1e-3));

  CHECK(run("derive --map gradient --lambda 0.1 --nu 1 --omega-d 0.5", out,
            temp_file("derive3.err")) == 0);
  const auto g = nlohmann::json::parse(slurp(out));
  CHECK(g["omega_b"].get<double>() == 0.5);
  CHECK(g["eta_b"].get<double>() == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("report subcommand prints an operating-point summary") {
  const fs::path out = temp_file("report.json");
  CHECK(run("report --scenario colinear60", out, temp_file("report.err")) == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["eta_ratio"].get<double>() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(run("report --scenario nonsense", temp_file("report2.out"),
            temp_file("report2.err")) == 2);
}
