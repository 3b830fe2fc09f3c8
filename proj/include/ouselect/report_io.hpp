#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ouselect/risklab.hpp"
#include "ouselect/selector.hpp"
#include "ouselect/transforms.hpp"

namespace ouselect {

using json = nlohmann::ordered_json;

/// Doubles as JSON numbers; NaN and infinities become null.
json num(double v);

json to_json(const NoiseParams& p);
NoiseParams noise_params_from_json(const json& j);
json to_json(const FamilyBounds& b);
FamilyBounds family_bounds_from_json(const json& j);
json to_json(const MeanSE& m);
json to_json(const MomentConstants& mc);

/// theta_hat truncated to supp(gamma_hat) and j <= 2 omega_max, sigma_hat, costs, selection.
json to_json(const EstimationResult& res, const WeightGrid& grid);
json to_json(const AuditRecord& rec);
json to_json(const SigmaRow& row);
json to_json(const ConditionReport& rep);
json to_json(const EfficiencyReport& rep);

/// 17 significant digits, "nan" for NaN.
std::string fmt_double(double v);

/// Writes `rows` under `header` as comma-separated text.
void write_csv(const std::string& file, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Pretty JSON (2-space indent, trailing newline).
void write_json(const std::string& file, const json& j);
void write_text(const std::string& file, const std::string& text);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& file);

} // namespace ouselect
