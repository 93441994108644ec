#include "fcrm/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace fcrm {

namespace {

json side_to_json(Side side) { return side == Side::Positive ? "+" : "-"; }

Side side_from_json(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "+") return Side::Positive;
  if (s == "-") return Side::Negative;
  throw std::invalid_argument("side must be \"+\" or \"-\"");
}

json component_to_json(const DensityComponent& comp) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<std::remove_cvref_t<decltype(d)>>;
        if constexpr (std::is_same_v<T, UniformDensity>) {
          return {{"family", "uniform"}, {"lo", d.lo}, {"hi", d.hi}, {"height", d.height}};
        } else if constexpr (std::is_same_v<T, ExponentialDensity>) {
          return {{"family", "exponential"},
                  {"rate", d.rate},
                  {"scale", d.scale},
                  {"side", side_to_json(d.side)}};
        } else if constexpr (std::is_same_v<T, PowerDensity>) {
          json cutoff;
          if (std::isfinite(d.cutoff)) {
            cutoff = d.cutoff;
          } else {
            cutoff = "inf";
          }
          return {{"family", "power"},
                  {"p", d.p},
                  {"c", d.c},
                  {"cutoff", cutoff},
                  {"side", side_to_json(d.side)}};
        } else {
          return {{"family", "tabulated"}, {"nodes", d.nodes}, {"values", d.values}};
        }
      },
      comp.shape);
}

DensityComponent component_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "uniform") {
    return UniformDensity{j.at("lo").get<double>(), j.at("hi").get<double>(),
                          j.at("height").get<double>()};
  }
  if (family == "exponential") {
    return ExponentialDensity{j.at("rate").get<double>(), j.at("scale").get<double>(),
                              side_from_json(j.at("side"))};
  }
  if (family == "power") {
    double cutoff;
    const json& c = j.at("cutoff");
    if (c.is_string()) {
      if (c.get<std::string>() != "inf") {
        throw std::invalid_argument("power cutoff must be a number or \"inf\"");
      }
      cutoff = std::numeric_limits<double>::infinity();
    } else {
      cutoff = c.get<double>();
    }
    return PowerDensity{j.at("p").get<double>(), j.at("c").get<double>(), cutoff,
                        side_from_json(j.at("side"))};
  }
  if (family == "tabulated") {
    return TabulatedDensity{j.at("nodes").get<std::vector<double>>(),
                            j.at("values").get<std::vector<double>>()};
  }
  throw std::invalid_argument("unknown density family: " + family);
}

json atoms_to_json(const std::vector<LevyAtom>& atoms) {
  json out = json::array();
  for (const LevyAtom& atom : atoms) out.push_back({atom.location, atom.weight});
  return out;
}

std::vector<LevyAtom> atoms_from_json(const json& j) {
  std::vector<LevyAtom> atoms;
  for (const json& pair : j) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::invalid_argument("atoms must be [location, weight] pairs");
    }
    atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return atoms;
}

json densities_to_json(const std::vector<DensityComponent>& densities) {
  json out = json::array();
  for (const DensityComponent& comp : densities) out.push_back(component_to_json(comp));
  return out;
}

std::vector<DensityComponent> densities_from_json(const json& j) {
  std::vector<DensityComponent> out;
  for (const json& entry : j) out.push_back(component_from_json(entry));
  return out;
}

}  // namespace

json to_json(const LevyMeasure& nu) {
  return {{"atoms", atoms_to_json(nu.atoms)}, {"densities", densities_to_json(nu.densities)}};
}

LevyMeasure levy_from_json(const json& j) {
  LevyMeasure nu;
  if (j.contains("atoms")) nu.atoms = atoms_from_json(j.at("atoms"));
  if (j.contains("densities")) nu.densities = densities_from_json(j.at("densities"));
  return nu;
}

json to_json(const CharTriplet& t) {
  return {{"kind", t.kind == TripletKind::Free ? "free" : "classical"},
          {"a", t.a},
          {"eta", t.eta},
          {"nu", to_json(t.nu)}};
}

CharTriplet triplet_from_json(const json& j) {
  CharTriplet t;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "free") {
    t.kind = TripletKind::Free;
  } else if (kind == "classical") {
    t.kind = TripletKind::Classical;
  } else {
    throw std::invalid_argument("kind must be \"free\" or \"classical\"");
  }
  t.a = j.at("a").get<double>();
  t.eta = j.at("eta").get<double>();
  if (j.contains("nu")) t.nu = levy_from_json(j.at("nu"));
  return t;
}

json to_json(const BaseMeasure& m) {
  return {{"atoms", atoms_to_json(m.atoms)}, {"densities", densities_to_json(m.densities)}};
}

BaseMeasure base_from_json(const json& j) {
  BaseMeasure m;
  if (j.contains("atoms")) m.atoms = atoms_from_json(j.at("atoms"));
  if (j.contains("densities")) m.densities = densities_from_json(j.at("densities"));
  return m;
}

json to_json(const FcrmModel& m) {
  json fixed = json::array();
  for (const FixedAtom& atom : m.fixed_atoms) {
    fixed.push_back({{"location", atom.location}, {"triplet", to_json(atom.law)}});
  }
  return {{"alpha", to_json(m.alpha)},
          {"nu_E", to_json(m.nu_E)},
          {"nu_B", to_json(m.nu_B)},
          {"fixed_atoms", fixed}};
}

FcrmModel model_from_json(const json& j) {
  FcrmModel m;
  if (j.contains("alpha")) m.alpha = base_from_json(j.at("alpha"));
  if (j.contains("nu_E")) m.nu_E = base_from_json(j.at("nu_E"));
  if (j.contains("nu_B")) m.nu_B = levy_from_json(j.at("nu_B"));
  if (j.contains("fixed_atoms")) {
    for (const json& entry : j.at("fixed_atoms")) {
      m.fixed_atoms.push_back(
          {entry.at("location").get<double>(), triplet_from_json(entry.at("triplet"))});
    }
  }
  return m;
}

CharTriplet load_triplet(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return triplet_from_json(j);
}

FcrmModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return model_from_json(j);
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_density_csv(const DensityTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "x,density\n";
  for (size_t i = 0; i < table.xs.size(); ++i) {
    out << format_double(table.xs[i]) << ',' << format_double(table.rho[i]) << '\n';
  }
  for (const DetectedAtom& atom : table.atom_report) {
    out << "# atom," << format_double(atom.location) << ',' << format_double(atom.mass) << '\n';
  }
}

void write_spectrum_csv(const EmpiricalSpectrum& spectrum, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "# " << spectrum.model_tag << ',' << spectrum.n << ',' << spectrum.seed << '\n';
  out << "value\n";
  for (double v : spectrum.values) out << format_double(v) << '\n';
}

}  // namespace fcrm
