#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "lcgf/extremes/extremes.hpp"
#include "lcgf/io/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("lcgf_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

std::string binary() {
  const char* b = std::getenv("LCGF_BIN");
  REQUIRE_MESSAGE(b != nullptr, "LCGF_BIN is not set");
  return b;
}

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd = binary() + " " + args + " > " + stdout_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("envgen then green") {
  Sandbox sb;
  REQUIRE(run("envgen --p 0.8 --n 40 --seed 5 --out " + sb("env.bin")) == 0);
  CHECK(fs::exists(sb("env.bin")));
  REQUIRE(run("green --env " + sb("env.bin") + " --source 20,20 --box-corner 4,4 --box-n 32 --out " +
                  sb("g.csv"),
              sb("stdout.txt")) == 0);
  const std::string out = slurp(sb("stdout.txt"));
  CHECK(out.find("# G(source,source) = ") != std::string::npos);
  std::ifstream in(sb("g.csv"));
  const lcgf::CsvData d = lcgf::read_csv(in);
  CHECK(d.columns == std::vector<std::string>{"x", "y", "value"});
  REQUIRE(!d.rows.empty());
  for (const auto& row : d.rows) CHECK(std::stod(row[2]) >= 0.0);
  const auto pos = out.find("symmetry |G(s,t) - G(t,s)| = ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(out.substr(pos + 30)) < 1e-8);
}

TEST_CASE("sampling is deterministic across runs and thread counts") {
  Sandbox sb;
  const std::string args = " sample --model mbrw --N 32 --replicates 4 --sample-seed 9 --out " + sb("a.csv");
  REQUIRE(run("--threads 1" + args) == 0);
  const std::string first = slurp(sb("a.csv")), first_meta = slurp(sb("a.csv.json"));
  REQUIRE(run("--force --threads 3" + args) == 0);
  CHECK(slurp(sb("a.csv")) == first);
  CHECK(slurp(sb("a.csv.json")) == first_meta);
  CHECK(!first.empty());
}

TEST_CASE("extremes on a constant field") {
  Sandbox sb;
  {
    std::ofstream f(sb("const.csv"));
    f << "# schema_version=1\nreplicate,x,y,value\n";
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) f << "0," << x << "," << y << ",2.5\n";
  }
  REQUIRE(run("extremes --in " + sb("const.csv") + " --scale 1 --out " + sb("s.csv")) == 0);
  std::ifstream in(sb("s.csv"));
  const lcgf::CsvData d = lcgf::read_csv(in);
  REQUIRE(d.rows.size() == 1);
  CHECK(std::stod(d.rows[0][d.column("max")]) == 2.5);
  CHECK(std::stod(d.rows[0][d.column("centered")]) == doctest::Approx(2.5 - lcgf::m_n(8, 2)).epsilon(1e-12));
  CHECK(d.rows[0][d.column("argmax_x")] == "0");
}

TEST_CASE("usage errors exit with status 2") {
  Sandbox sb;
  CHECK(run("no-such-command") == 2);
  CHECK(run("sample --model nonsense --N 8 --out " + sb("x.csv")) == 2);
  REQUIRE(run("sample --model brw --N 8 --replicates 1 --out " + sb("x.csv")) == 0);
  CHECK(run("sample --model brw --N 8 --replicates 1 --out " + sb("x.csv")) == 2);
  CHECK(run("--force sample --model brw --N 8 --replicates 1 --out " + sb("x.csv")) == 0);
}
