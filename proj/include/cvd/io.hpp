#pragma once

#include "cvd/cvd.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace cvd {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Provenance block embedded in every artifact.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    std::string version = kLibraryVersion;
    /// ISO-8601 UTC; left empty unless requested so reruns stay byte-identical.
    std::string started;
    std::string finished;
};

std::string utc_now();

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CvdConfig& c);
/// Overrides the fields present in `j`; unknown keys raise std::invalid_argument.
void apply_config_json(const nlohmann::json& j, CvdConfig& c);

/// gammas[k][l][s][r] = [re, im]; lambdas[k] descending Schmidt values.
nlohmann::json to_json(const Mps& mps);
Mps mps_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Circuit& c);
Circuit circuit_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CvdReport& r);
CvdReport report_from_json(const nlohmann::json& j);

/// Header layer,bond,S_inf,bond_dim; one row per (layer, bond), layer 0 = input.
std::string tail_csv(const CvdReport& r);

/// Artifact = payload plus "manifest". Readers check the "format" tag.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& s);

void save_mps(const std::filesystem::path& path, const Mps& mps, const RunManifest& m);
Mps load_mps(const std::filesystem::path& path);
void save_circuit(const std::filesystem::path& path, const Circuit& c, const RunManifest& m);
Circuit load_circuit(const std::filesystem::path& path);
void save_report(const std::filesystem::path& path, const CvdReport& r, const RunManifest& m);
CvdReport load_report(const std::filesystem::path& path);

}  // namespace cvd
