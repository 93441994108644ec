// fcrm: batch front-end over the free-completely-random-measure toolkit.
// JSON models/triplets in, CSV tables and reports out, stable exit codes:
//   0 ok, 2 parse error, 3 validation failure, 4 numerical failure,
//   5 KS threshold breach.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fcrm/bijection.hpp"
#include "fcrm/inversion.hpp"
#include "fcrm/json_io.hpp"
#include "fcrm/levy.hpp"
#include "fcrm/model.hpp"
#include "fcrm/oracle.hpp"
#include "fcrm/region.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitThreshold = 5;

struct CliError {
  int code;
  std::string message;
};

fcrm::FcrmModel parse_model_or_throw(const std::string& path) {
  fcrm::FcrmModel model;
  try {
    model = fcrm::load_model(path);
  } catch (const std::exception& e) {
    throw CliError{kExitParse, std::string("parse error: ") + e.what()};
  }
  const fcrm::ModelReport report = fcrm::validate_model(model);
  if (!report.ok) {
    std::string msg = "model validation failed:";
    for (const std::string& m : report.messages) msg += "\n  " + m;
    throw CliError{kExitValidation, msg};
  }
  return model;
}

fcrm::CharTriplet parse_triplet_or_throw(const std::string& path) {
  fcrm::CharTriplet t;
  try {
    t = fcrm::load_triplet(path);
  } catch (const std::exception& e) {
    throw CliError{kExitParse, std::string("parse error: ") + e.what()};
  }
  const fcrm::ValidationReport report = fcrm::validate_levy(t.nu);
  if (!report.ok || t.a < 0.0) {
    std::string msg = "triplet validation failed:";
    for (const std::string& m : report.messages) msg += "\n  " + m;
    if (t.a < 0.0) msg += "\n  gaussian part must be nonnegative";
    throw CliError{kExitValidation, msg};
  }
  return t;
}

fcrm::RegionSet parse_region_or_throw(const std::string& text) {
  try {
    return fcrm::RegionSet::parse(text);
  } catch (const std::exception& e) {
    throw CliError{kExitParse, std::string("parse error: ") + e.what()};
  }
}

fcrm::GridSpec parse_grid_or_throw(const std::string& text, const fcrm::CharTriplet& t,
                                   double eps, int eps_levels, int default_n) {
  fcrm::GridSpec g;
  if (text.empty()) {
    g = fcrm::GridSpec::automatic(t, default_n);
  } else {
    double lo, hi;
    int n;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || !(lo < hi) || n < 2) {
      throw CliError{kExitParse, "grid must be lo:hi:n with lo < hi and n >= 2"};
    }
    g.lo = lo;
    g.hi = hi;
    g.n = n;
  }
  if (eps > 0.0) g.eps = eps;
  if (eps_levels >= 1) g.eps_levels = eps_levels;
  return g;
}

void write_cdf_compare_csv(const std::string& path, const fcrm::DensityTable& table,
                           const fcrm::EmpiricalSpectrum& spectrum, double ks) {
  std::ofstream out(path);
  if (!out) throw CliError{kExitNumerical, "cannot open " + path + " for writing"};
  out << "# ks," << fcrm::format_double(ks) << '\n';
  out << "# " << spectrum.model_tag << ',' << spectrum.n << ',' << spectrum.seed << '\n';
  out << "x,analytic_cdf,empirical_cdf\n";
  const size_t n = spectrum.values.size();
  for (size_t i = 0; i < n; ++i) {
    const double x = spectrum.values[i];
    out << fcrm::format_double(x) << ',' << fcrm::format_double(table.cdf(x)) << ','
        << fcrm::format_double(static_cast<double>(i + 1) / static_cast<double>(n)) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free completely random measures: laws, densities, and matrix-model checks"};
  app.require_subcommand(1);

  std::string model_path, triplet_path, region_text, grid_text, out_path;
  std::vector<std::string> part_texts;
  double eps = 0.0;
  int eps_levels = 0;
  int n = 1000;
  int reps = 10000;
  std::uint64_t seed = 1;
  double ks_max = -1.0;
  bool compare_classical = false;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--grid", grid_text, "density grid as lo:hi:n (default: automatic)");
    cmd->add_option("--eps", eps, "Stieltjes offset override");
    cmd->add_option("--eps-levels", eps_levels, "Richardson levels in the offset");
    auto* out = cmd->add_option("--out", out_path, "output path");
    if (needs_out) out->required();
  };

  CLI::App* validate = app.add_subcommand("validate", "validate a model or triplet file");
  validate->add_option("--model", model_path, "model JSON path");
  validate->add_option("--triplet", triplet_path, "triplet JSON path");

  CLI::App* law = app.add_subcommand("law", "write the free triplet of the law of G(E)");
  law->add_option("--model", model_path, "model JSON path")->required();
  law->add_option("--set", region_text, "region, e.g. [0,2)")->required();
  law->add_option("--out", out_path, "output triplet JSON path")->required();

  CLI::App* density = app.add_subcommand("density", "recover a free density table (CSV)");
  density->add_option("--model", model_path, "model JSON path (with --set)");
  density->add_option("--triplet", triplet_path, "free triplet JSON path");
  density->add_option("--set", region_text, "region for --model");
  add_common(density, true);

  CLI::App* classical = app.add_subcommand(
      "classical", "write the classical-counterpart density table (CSV)");
  classical->add_option("--model", model_path, "model JSON path (with --set)");
  classical->add_option("--triplet", triplet_path, "classical triplet JSON path");
  classical->add_option("--set", region_text, "region for --model");
  add_common(classical, true);

  CLI::App* compare = app.add_subcommand(
      "oracle-compare", "compare the analytic law against a Monte Carlo oracle");
  compare->add_option("--model", model_path, "model JSON path")->required();
  compare->add_option("--set", region_text, "region")->required();
  compare->add_option("--n", n, "matrix size for the free oracle");
  compare->add_option("--reps", reps, "replicates for the classical oracle");
  compare->add_option("--seed", seed, "oracle seed");
  compare->add_option("--ks-max", ks_max, "fail (exit 5) if the KS distance exceeds this");
  compare->add_flag("--classical", compare_classical,
                    "compare the classical counterpart instead of the free law");
  add_common(compare, true);

  CLI::App* additivity =
      app.add_subcommand("additivity", "check g_law additivity over disjoint parts");
  additivity->add_option("--model", model_path, "model JSON path")->required();
  additivity->add_option("--part", part_texts, "region part (repeatable)")->required();
  additivity->add_option("--out", out_path, "report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      if (model_path.empty() == triplet_path.empty()) {
        throw CliError{kExitParse, "validate needs exactly one of --model / --triplet"};
      }
      if (!model_path.empty()) {
        parse_model_or_throw(model_path);
        std::cout << "model ok\n";
      } else {
        const fcrm::CharTriplet t = parse_triplet_or_throw(triplet_path);
        const fcrm::ValidationReport r = fcrm::validate_levy(t.nu);
        std::cout << "triplet ok; min{x^2,1} integral = " << r.min_x2_integral
                  << ", small-jump |x| mean = " << r.small_jump_abs_mean << '\n';
      }
      return kExitOk;
    }

    if (law->parsed()) {
      const fcrm::FcrmModel model = parse_model_or_throw(model_path);
      const fcrm::RegionSet region = parse_region_or_throw(region_text);
      const fcrm::CharTriplet t = fcrm::g_law(model, region);
      fcrm::save_json(fcrm::to_json(t), out_path);
      return kExitOk;
    }

    if (density->parsed() || classical->parsed()) {
      const bool classical_table = classical->parsed();
      fcrm::CharTriplet t;
      if (!model_path.empty()) {
        if (region_text.empty()) {
          throw CliError{kExitParse, "--model needs --set"};
        }
        const fcrm::FcrmModel model = parse_model_or_throw(model_path);
        const fcrm::RegionSet region = parse_region_or_throw(region_text);
        t = classical_table ? fcrm::classical_counterpart_law(model, region)
                            : fcrm::g_law(model, region);
      } else if (!triplet_path.empty()) {
        t = parse_triplet_or_throw(triplet_path);
      } else {
        throw CliError{kExitParse, "need --model + --set or --triplet"};
      }
      const fcrm::TripletKind want =
          classical_table ? fcrm::TripletKind::Classical : fcrm::TripletKind::Free;
      if (t.kind != want) {
        throw CliError{kExitValidation, std::string("triplet kind must be ") +
                                            (classical_table ? "classical" : "free")};
      }
      const fcrm::GridSpec g = parse_grid_or_throw(grid_text, t, eps, eps_levels, 600);
      const fcrm::DensityTable table =
          classical_table ? fcrm::classical_density(t, g) : fcrm::free_density(t, g);
      fcrm::write_density_csv(table, out_path);
      return kExitOk;
    }

    if (compare->parsed()) {
      const fcrm::FcrmModel model = parse_model_or_throw(model_path);
      const fcrm::RegionSet region = parse_region_or_throw(region_text);
      double ks;
      if (compare_classical) {
        const fcrm::CharTriplet t = fcrm::classical_counterpart_law(model, region);
        const fcrm::GridSpec g = parse_grid_or_throw(grid_text, t, eps, eps_levels, 600);
        const fcrm::DensityTable table = fcrm::classical_density(t, g);
        const fcrm::EmpiricalSpectrum spectrum =
            fcrm::sample_classical_L(model, region, reps, seed);
        ks = fcrm::ks_between(table, spectrum.values);
        write_cdf_compare_csv(out_path, table, spectrum, ks);
      } else {
        const fcrm::CharTriplet t = fcrm::g_law(model, region);
        const fcrm::GridSpec g = parse_grid_or_throw(grid_text, t, eps, eps_levels, 600);
        const fcrm::DensityTable table = fcrm::free_density(t, g);
        const fcrm::EmpiricalSpectrum spectrum =
            fcrm::free_add_oracle({fcrm::matrix_model_for(t)}, n, seed);
        ks = fcrm::ks_between(table, spectrum.values);
        write_cdf_compare_csv(out_path, table, spectrum, ks);
      }
      std::cout << "ks = " << ks << '\n';
      if (ks_max >= 0.0 && ks > ks_max) {
        std::cerr << "KS " << ks << " exceeds --ks-max " << ks_max << '\n';
        return kExitThreshold;
      }
      return kExitOk;
    }

    if (additivity->parsed()) {
      const fcrm::FcrmModel model = parse_model_or_throw(model_path);
      std::vector<fcrm::RegionSet> parts;
      for (const std::string& text : part_texts) parts.push_back(parse_region_or_throw(text));
      fcrm::AdditivityReport report;
      try {
        report = fcrm::check_additivity(model, parts);
      } catch (const std::invalid_argument& e) {
        throw CliError{kExitValidation, e.what()};
      }
      std::string lines;
      lines += "disjoint," + std::string(report.disjoint ? "yes" : "no") + '\n';
      lines += "consistent," + std::string(report.ok ? "yes" : "no") + '\n';
      lines += "union_eta," + fcrm::format_double(report.union_law.eta) + '\n';
      lines += "sum_eta," + fcrm::format_double(report.sum_law.eta) + '\n';
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << lines;
      }
      std::cout << lines;
      return report.ok ? kExitOk : kExitNumerical;
    }
  } catch (const CliError& e) {
    std::cerr << e.message << '\n';
    return e.code;
  } catch (const fcrm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (estimate " << e.estimate()
              << ", error bound " << e.error_bound() << ")\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical domain failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
