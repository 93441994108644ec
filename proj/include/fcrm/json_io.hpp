#pragma once

#include <string>

#include "json.hpp"

#include "fcrm/inversion.hpp"
#include "fcrm/levy.hpp"
#include "fcrm/model.hpp"
#include "fcrm/oracle.hpp"

namespace fcrm {

using nlohmann::json;

json to_json(const LevyMeasure& nu);
json to_json(const CharTriplet& t);
json to_json(const BaseMeasure& m);
json to_json(const FcrmModel& m);

LevyMeasure levy_from_json(const json& j);
CharTriplet triplet_from_json(const json& j);
BaseMeasure base_from_json(const json& j);
FcrmModel model_from_json(const json& j);

CharTriplet load_triplet(const std::string& path);
FcrmModel load_model(const std::string& path);
void save_json(const json& j, const std::string& path);

/// 17-significant-digit decimal rendering (byte-stable across runs).
std::string format_double(double x);

/// `x,density` rows plus trailing `# atom,<location>,<mass>` comment lines.
void write_density_csv(const DensityTable& table, const std::string& path);

/// Leading `# <model_tag>,<n>,<seed>` metadata line, `value` header, one
/// ascending sample per row.
void write_spectrum_csv(const EmpiricalSpectrum& spectrum, const std::string& path);

}  // namespace fcrm
