#ifndef FME_CONFIG_HPP
#define FME_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fme/simulate.hpp"

namespace fme {

// Extra knobs for the `cohort` subcommand.
struct CohortRunConfig {
    std::size_t n_individuals = 0;
    double lln_t = 0.0;                 // time at which the LLN check is reported
    std::vector<double> checkpoints;    // compensator-residual checkpoints; empty = step grid
};

// One instrument for the `price` subcommand.
struct InstrumentSpec {
    std::string type;                  // "survivor_bond" or "annuity"
    double t = 0.0;                    // valuation time (must be a checkpoint)
    std::vector<double> dates;         // maturity (bond: one) or payment dates
    double x = 0.0;
};

struct PricingRunConfig {
    std::string discount_csv;          // path, relative to the config file
    std::vector<InstrumentSpec> instruments;
};

struct DriftTableConfig {
    int example = 0;                   // benchmark selector 1..3; 0 = use the scenario volatility
};

// Parsed top-level config file: the scenario plus optional per-subcommand
// sections. Schema is versioned; unknown versions are rejected.
struct RunConfig {
    ScenarioConfig scenario;
    std::optional<CohortRunConfig> cohort;
    std::optional<PricingRunConfig> pricing;
    std::optional<DriftTableConfig> drift_table;
    std::string base_dir;              // directory of the config file
};

RunConfig load_config(const std::string& path);

// FNV-1a over the raw config bytes; keys the manifest.
std::uint64_t hash_file(const std::string& path);

struct RunManifest {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::string started_at;            // ISO-8601 UTC
    std::string finished_at;
    std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& m, const std::string& path);

std::string iso_timestamp_now();

}  // namespace fme

#endif
