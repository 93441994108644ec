#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fcrm/json_io.hpp"
#include "test_support.hpp"

using namespace fcrm;
namespace fs = std::filesystem;

#ifndef FCRM_CLI_PATH
#define FCRM_CLI_PATH "fcrm"
#endif

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "fcrm_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FCRM_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

// model of the worked example: nu_E Lebesgue on [0,2], nu_B = delta_1
std::string write_mp_model(double rate_height = 1.0) {
  FcrmModel m;
  m.nu_E.densities.push_back(UniformDensity{0.0, 2.0, rate_height});
  m.nu_B = LevyMeasure::point_mass(1.0, 1.0);
  const fs::path path = scratch_dir() / "mp_model.json";
  save_json(to_json(m), path.string());
  return path.string();
}

}  // namespace

TEST_CASE("json round trip for triplets and models") {
  testing::Gen gen(4242);
  for (int trial = 0; trial < 30; ++trial) {
    const CharTriplet t = gen.random_triplet(gen.coin() ? TripletKind::Free
                                                        : TripletKind::Classical);
    const CharTriplet back = triplet_from_json(to_json(t));
    CHECK(back.kind == t.kind);
    CHECK(triplets_close(back, t, 0.0));
  }
  for (int trial = 0; trial < 10; ++trial) {
    const FcrmModel m = gen.model_with_fixed_atoms();
    const FcrmModel back = model_from_json(to_json(m));
    CHECK(validate_model(back).ok);
    CHECK(back.fixed_atoms.size() == m.fixed_atoms.size());
    CHECK(measures_close(back.nu_B, m.nu_B, 0.0));
  }
}

TEST_CASE("json: infinite power cutoff round-trips as \"inf\"") {
  LevyMeasure nu;
  nu.densities.push_back(
      PowerDensity{0.5, 1.0, std::numeric_limits<double>::infinity(), Side::Positive});
  const json j = to_json(nu);
  CHECK(j["densities"][0]["cutoff"] == "inf");
  const LevyMeasure back = levy_from_json(j);
  const auto* pw = std::get_if<PowerDensity>(&back.densities[0].shape);
  REQUIRE(pw != nullptr);
  CHECK(std::isinf(pw->cutoff));
}

TEST_CASE("cli: law on the worked model writes the free Poisson triplet") {
  const std::string model = write_mp_model();
  const fs::path out = scratch_dir() / "law.json";
  REQUIRE(run_cli("law --model " + model + " --set \"[0,2)\" --out " + out.string()) == 0);
  const CharTriplet t = load_triplet(out.string());
  CHECK(t.kind == TripletKind::Free);
  CHECK(triplets_close(t, CharTriplet::free_triplet(0.0, 2.0, LevyMeasure::point_mass(1.0, 2.0)),
                       1e-12));
}

TEST_CASE("cli: density of the semicircle triplet") {
  const fs::path triplet_path = scratch_dir() / "semicircle.json";
  save_json(to_json(CharTriplet::free_triplet(1.0, 0.0)), triplet_path.string());
  const fs::path out = scratch_dir() / "semicircle.csv";
  REQUIRE(run_cli("density --triplet " + triplet_path.string() +
                  " --grid -3:3:601 --out " + out.string()) == 0);

  std::ifstream in(out.string());
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,density");
  double rho0 = -1.0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# atom", 0) == 0) continue;
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma));
    if (std::abs(x) < 1e-9) rho0 = std::stod(line.substr(comma + 1));
  }
  CHECK(rho0 == doctest::Approx(1.0 / M_PI).epsilon(1e-3 * M_PI));
}

TEST_CASE("cli: density output is byte-identical across runs") {
  const fs::path triplet_path = scratch_dir() / "mp.json";
  save_json(to_json(CharTriplet::free_triplet(0.0, 2.0, LevyMeasure::point_mass(1.0, 2.0))),
            triplet_path.string());
  const fs::path out1 = scratch_dir() / "d1.csv";
  const fs::path out2 = scratch_dir() / "d2.csv";
  REQUIRE(run_cli("density --triplet " + triplet_path.string() + " --grid 0:6:201 --out " +
                  out1.string()) == 0);
  REQUIRE(run_cli("density --triplet " + triplet_path.string() + " --grid 0:6:201 --out " +
                  out2.string()) == 0);
  CHECK(testing::read_file(out1.string()) == testing::read_file(out2.string()));
}

TEST_CASE("cli: exit codes partition the failure causes") {
  CHECK(run_cli("validate --model /nonexistent/m.json") == 2);

  const fs::path bad_json = scratch_dir() / "bad.json";
  testing::write_file(bad_json.string(), "{not json");
  CHECK(run_cli("validate --model " + bad_json.string()) == 2);

  // nu_B atom at zero -> validation failure
  const fs::path invalid_model = scratch_dir() / "invalid1.json";
  testing::write_file(invalid_model.string(), R"({
    "alpha": {"atoms": [], "densities": []},
    "nu_E": {"atoms": [[0.5, 1.0]], "densities": []},
    "nu_B": {"atoms": [[0.0, 1.0]], "densities": []},
    "fixed_atoms": []
  })");
  CHECK(run_cli("validate --model " + invalid_model.string()) == 3);

  // power exponent 2.5 -> validation failure naming Levy integrability
  const fs::path invalid_power = scratch_dir() / "invalid2.json";
  testing::write_file(invalid_power.string(), R"({
    "alpha": {"atoms": [], "densities": []},
    "nu_E": {"atoms": [[0.5, 1.0]], "densities": []},
    "nu_B": {"atoms": [], "densities": [
      {"family": "power", "p": 2.5, "c": 1.0, "cutoff": 1.0, "side": "+"}]},
    "fixed_atoms": []
  })");
  const std::string err_file = (scratch_dir() / "err.txt").string();
  const std::string cmd = std::string(FCRM_CLI_PATH) + " validate --model " +
                          invalid_power.string() + " >/dev/null 2>" + err_file;
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
  CHECK(testing::read_file(err_file).find("integrability") != std::string::npos);

  // valid minimal model passes
  const fs::path minimal = scratch_dir() / "minimal.json";
  testing::write_file(minimal.string(), R"({
    "alpha": {"atoms": [[1.0, 2.0]], "densities": []},
    "nu_E": {"atoms": [], "densities": []},
    "nu_B": {"atoms": [], "densities": []},
    "fixed_atoms": []
  })");
  CHECK(run_cli("validate --model " + minimal.string()) == 0);
}

TEST_CASE("cli: oracle-compare stays under a generous KS bound") {
  const std::string model = write_mp_model();
  const fs::path out = scratch_dir() / "compare.csv";
  const int code = run_cli("oracle-compare --model " + model +
                           " --set \"[0,2)\" --n 400 --seed 42 --ks-max 0.1 --grid -1:11:301 "
                           "--out " + out.string());
  CHECK(code == 0);
  const std::string content = testing::read_file(out.string());
  CHECK(content.rfind("# ks,", 0) == 0);

  // an absurdly small threshold must trip exit 5
  const int breach = run_cli("oracle-compare --model " + model +
                             " --set \"[0,2)\" --n 400 --seed 42 --ks-max 1e-6 "
                             "--grid -1:11:301 --out " + out.string());
  CHECK(breach == 5);
}

TEST_CASE("cli: additivity report") {
  const std::string model = write_mp_model();
  CHECK(run_cli("additivity --model " + model + " --part \"[0,1)\" --part \"[1,2)\"") == 0);
  CHECK(run_cli("additivity --model " + model + " --part \"[0,1.5)\" --part \"[1,2)\"") == 3);
}

TEST_CASE("cli: classical table of the worked model is the Poisson(2) pmf") {
  const std::string model = write_mp_model();
  const fs::path out = scratch_dir() / "classical.csv";
  REQUIRE(run_cli("classical --model " + model + " --set \"[0,2)\" --grid -1:9:101 --out " +
                  out.string()) == 0);
  const std::string content = testing::read_file(out.string());
  // atoms are appended as comment rows; the first is the k = 0 mass e^{-2}
  const auto pos = content.find("# atom,");
  REQUIRE(pos != std::string::npos);
  std::istringstream atom_line(content.substr(pos + 7));
  std::string loc_str, mass_str;
  std::getline(atom_line, loc_str, ',');
  std::getline(atom_line, mass_str);
  CHECK(std::stod(loc_str) == doctest::Approx(0.0));
  CHECK(std::stod(mass_str) == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
}
