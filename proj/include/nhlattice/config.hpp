#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nhlattice/protocols.hpp"

namespace nhl {

// Units for every config document: rates and energies in kappa, time in
// 1/kappa, phases in radians.
inline constexpr const char* kUnitsDeclaration = "energy=kappa; time=1/kappa; phase=rad";
inline constexpr int kManifestVersion = 1;

// Accepts plain numbers and pi expressions such as "pi/2", "-pi/4", "3*pi/4", "-pi".
double parse_phase(const std::string& text);

// Full document with every field present (absent optionals are omitted).
nlohmann::json to_json(const ExperimentConfig& config);

// Strict: unknown keys and wrongly typed values throw InvalidArgument naming
// the dotted key path.
ExperimentConfig config_from_json(const nlohmann::json& doc);

// Reads a config document or a manifest (its "config" member).
ExperimentConfig load_config(const std::filesystem::path& path);

// FNV-1a 64 of the canonical JSON dump, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace nhl
