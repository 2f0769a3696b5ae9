#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

// HEATFLOW_INFO: path of the binary; HEATFLOW_CONFIGS: the shipped configs.

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("heatflow_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(HEATFLOW_INFO) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string shipped(const std::string& name) { return std::string(HEATFLOW_CONFIGS) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Config in `dir` that points at a model file written alongside it.
fs::path make_config(const fs::path& dir, const std::string& model, const std::string& extra) {
  write(dir / "m.model", model);
  write(dir / "c.conf", "model=m.model\n" + extra);
  return dir / "c.conf";
}

}  // namespace

TEST_CASE("every shipped config runs cleanly") {
  const fs::path out = scratch("shipped");
  for (const std::string& args :
       {"scan --config " + shipped("fig1a_scan.conf"), "scan --config " + shipped("fig1b_scan.conf"),
        "verify --config " + shipped("verify_two_point.conf"),
        "verify --config " + shipped("verify_two_gaussian.conf"),
        "thresholds --config " + shipped("thresholds_two_point.conf"),
        "thresholds --config " + shipped("thresholds_gaussian5.conf"),
        "thresholds --config " + shipped("thresholds_two_gaussian_half.conf"),
        "bounds --config " + shipped("bounds_two_point.conf"),
        "bounds --config " + shipped("bounds_three_point.conf")}) {
    INFO(args);
    CHECK(run(args + " --out-dir " + out.string()) == 0);
  }
  CHECK(fs::exists(out / "scan.csv"));
  CHECK(fs::exists(out / "scan.svg"));
  CHECK(fs::exists(out / "concentration.csv"));
  CHECK(fs::exists(out / "lattice.csv"));
  CHECK(fs::exists(out / "verify_report.txt"));
}

TEST_CASE("scan CSV layout") {
  const fs::path out = scratch("layout");
  REQUIRE(run("scan --config " + shipped("fig1a_scan.conf") + " --out-dir " + out.string()) == 0);
  const std::vector<std::string> rows = lines(slurp(out / "scan.csv"));
  REQUIRE(rows.size() == 201);
  CHECK(rows[0] == "t,I,J_mut,K_mut,I_err,J_err,K_err,dI_fd,d2I_fd");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::count(rows[i].begin(), rows[i].end(), ',') == 8);
  }
  CHECK(rows[1].rfind("0.01,", 0) == 0);
  CHECK(rows.back().rfind("10,", 0) == 0);
}

TEST_CASE("Gaussian scan reproduces the closed-form information") {
  const fs::path dir = scratch("gauss");
  const fs::path conf = make_config(dir, "weights=1\ncenters=0\nvariances=1\n",
                                    "t_min=0.01\nt_max=10\nt_points=20\noutputs=csv\n");
  REQUIRE(run("scan --config " + conf.string() + " --out-dir " + dir.string()) == 0);
  const std::vector<std::string> rows = lines(slurp(dir / "scan.csv"));
  REQUIRE(rows.size() == 21);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i].substr(0, rows[i].find(',')));
    const std::string rest = rows[i].substr(rows[i].find(',') + 1);
    const double info = std::stod(rest.substr(0, rest.find(',')));
    CHECK(std::abs(info - 0.5 * std::log1p(1.0 / t)) < 1e-6);
  }
  CHECK_FALSE(fs::exists(dir / "scan.svg"));
}

TEST_CASE("byte-identical output across runs and worker counts") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const fs::path c = scratch("det_c");
  const std::string conf = shipped("fig1b_scan.conf");
  REQUIRE(run("scan --config " + conf + " --jobs 1 --out-dir " + a.string()) == 0);
  REQUIRE(run("scan --config " + conf + " --jobs 1 --out-dir " + b.string()) == 0);
  REQUIRE(run("scan --config " + conf + " --jobs 4 --out-dir " + c.string()) == 0);
  CHECK(slurp(a / "scan.csv") == slurp(b / "scan.csv"));
  CHECK(slurp(a / "scan.csv") == slurp(c / "scan.csv"));
  CHECK(slurp(a / "scan.svg") == slurp(c / "scan.svg"));

  const std::string bounds = shipped("bounds_three_point.conf");
  REQUIRE(run("bounds --config " + bounds + " --jobs 1 --out-dir " + a.string()) == 0);
  REQUIRE(run("bounds --config " + bounds + " --jobs 3 --out-dir " + c.string()) == 0);
  CHECK(slurp(a / "concentration.csv") == slurp(c / "concentration.csv"));
  CHECK(slurp(a / "lattice.csv") == slurp(c / "lattice.csv"));
}

TEST_CASE("input errors exit with 2") {
  const fs::path dir = scratch("input");
  CHECK(run("") == 2);
  CHECK(run("scan") == 2);
  CHECK(run("scan --config " + shipped("fig1a_scan.conf") + " --jobs -1") == 2);
  CHECK(run("plot --config " + shipped("fig1a_scan.conf")) == 2);
  CHECK(run("scan --config " + (dir / "missing.conf").string()) == 2);

  write(dir / "bad.conf", "model=m.model\nt_points=two\n");
  CHECK(run("scan --config " + (dir / "bad.conf").string() + " --out-dir " + dir.string()) == 2);

  const fs::path bad_model = make_config(dir, "weights=0.5,0.5\ncenters=-1;oops\n", "");
  CHECK(run("scan --config " + bad_model.string() + " --out-dir " + dir.string()) == 2);

  const fs::path wide = make_config(dir, "dim=65\nweights=1\ncenters=0\n", "");
  CHECK(run("scan --config " + wide.string() + " --out-dir " + dir.string()) == 2);
}

TEST_CASE("bounds on a smooth model skips the concentration check and keeps the lattice") {
  const fs::path dir = scratch("smooth_bounds");
  const fs::path conf = make_config(dir, "weights=0.5,0.5\ncenters=-1;1\nvariances=0.1,0.1\n", "");
  CHECK(run("bounds --config " + conf.string() + " --out-dir " + dir.string()) == 0);
  const std::string report = slurp(dir / "bounds_report.txt");
  CHECK(report.find("SKIP  concentration bound") != std::string::npos);
  CHECK(fs::exists(dir / "lattice.csv"));
  CHECK_FALSE(fs::exists(dir / "concentration.csv"));
}

TEST_CASE("a failing check exits with 1") {
  const fs::path dir = scratch("fail");
  const fs::path conf = make_config(dir, "weights=0.5,0.5\ncenters=-1;1\n",
                                    "t_min=0.05\nt_max=1\nt_points=4\nquad.method=gauss_hermite\n"
                                    "quad.order=2\nsuite=derivatives\noutputs=report\n");
  CHECK(run("verify --config " + conf.string() + " --out-dir " + dir.string()) == 1);
  CHECK(slurp(dir / "verify_report.txt").find("FAIL") != std::string::npos);
}

TEST_CASE("a numeric failure exits with 3 and flags the partial CSV") {
  const fs::path dir = scratch("numeric");
  const fs::path conf = make_config(dir, "weights=0.3,0.3,0.4\ncenters=-1;0;1\n",
                                    "t_min=0.01\nt_max=1\nt_points=5\nquad.rel_tol=1e-300\n"
                                    "quad.abs_tol=1e-300\noutputs=csv\n");
  CHECK(run("scan --config " + conf.string() + " --out-dir " + dir.string()) == 3);
  const std::vector<std::string> rows = lines(slurp(dir / "scan.csv"));
  REQUIRE(rows.size() >= 2);
  CHECK(rows.front() == "t,I,J_mut,K_mut,I_err,J_err,K_err,dI_fd,d2I_fd");
  CHECK(rows.back() == "# INCOMPLETE");
}
