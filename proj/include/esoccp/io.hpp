#pragma once

#include "esoccp/portfolio.hpp"
#include "esoccp/solvers.hpp"
#include "esoccp/spherical.hpp"
#include "esoccp/stochastic.hpp"

#include <string>

// vendored single-header nlohmann/json
#include "json.hpp"

namespace esoccp {

using Json = nlohmann::json;

// Problem file: {"k":, "l":, "A":, "B":, "C":, "D":, "p":, "q":} with
// matrices as arrays of rows (or flat row-major arrays) -- see FORMATS.md.
EsoclcpInstance esoclcp_from_json(const Json& j);
Json esoclcp_to_json(const EsoclcpInstance& inst);
EsoclcpInstance load_esoclcp(const std::string& path);

// Scenario model file: {"base": <problem object or path>, "perturbations":
// [{"target": "A[0][0]", "dist": "normal", "mean":, "sd":, "scale":}],
// "seed":}.
ScenarioModel scenario_model_from_json(const Json& j, const std::string& base_dir);
ScenarioModel load_scenario_model(const std::string& path);

// Portfolio returns: CSV with header "scenario,prob,asset1..assetN" (one row
// per scenario) or JSON {"R": [[..]], "f": [..], "c0":}.
PortfolioInstance load_portfolio_csv(const std::string& path, double c0);
PortfolioInstance portfolio_from_json(const Json& j, std::optional<double> c0_override);
PortfolioInstance load_portfolio(const std::string& path, std::optional<double> c0_flag);

// Matrix file: JSON array of rows, {"matrix": [[..]]}, or whitespace text.
Matrix load_matrix(const std::string& path);

Json verdict_to_json(const QcVerdict& verdict);
Json saa_report_to_json(const SaaReport& report);
Json verify_report_to_json(const VerifyReport& rep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// FNV-1a 64-bit digest, hex-encoded; used for the run manifest.
std::string fnv1a_hex(const std::string& bytes);

/// Reproducibility record emitted with every CLI run: identical manifests
/// (wall clock aside) imply identical numeric outputs.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> input_digests; // (path, digest)
    std::uint64_t seed = 0;
    Json config;
    std::string version = "0.1.0";
    double wall_clock_sec = 0.0;
};
Json manifest_to_json(const RunManifest& m);

} // namespace esoccp
