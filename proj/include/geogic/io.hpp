#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "geogic/datagen.hpp"
#include "geogic/montecarlo.hpp"
#include "geogic/oracle.hpp"
#include "geogic/selection.hpp"

namespace geogic {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::json;

// --- dataset CSV: header s1[,s2],z,x1..xp; the intercept column is implicit ---

void write_dataset_csv(std::ostream& os, const Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

// Row numbers in diagnostics are file line numbers (the header is line 1).
Dataset read_dataset_csv(std::istream& is, const std::string& source = "<stream>");
Dataset read_dataset_csv(const std::filesystem::path& path);

// --- JSON ---

Json to_json(const CovParams& theta);
Json to_json(const ThetaBox& box);
Json to_json(const MleResult& fit, bool with_trace = false);
Json to_json(const SelectionReport& report);
Json to_json(const KlReport& kl);
Json to_json(const RiskReport& risk);
Json to_json(const RegressorSpec& spec);
Json to_json(const ExperimentConfig& config);
Json to_json(const CellResult& cell);
Json to_json(const ExperimentResult& result);

// Inverse of to_json(ExperimentConfig). Missing keys keep their defaults;
// unknown keys and ill-typed values raise ConfigError naming the field.
ExperimentConfig experiment_config_from_json(const Json& j);
RegressorSpec regressor_from_json(const Json& j, const std::string& where);
CovParams theta_from_json(const Json& j, const std::string& where);
ThetaBox box_from_json(const Json& j, const std::string& where);

// Parses JSON text; syntax errors report the line and column.
Json parse_json_text(const std::string& text, const std::string& source);
Json read_json_file(const std::filesystem::path& path);

// Comma-separated reals, e.g. "0.5,0.5,1".
std::vector<double> parse_real_list(const std::string& text, const std::string& what);

// --- experiment outputs ---

// function,n,delta,model,count. With several tau rules the function
// column reads "<label>/<rule>". Failed replicates appear as model "failed".
void write_frequency_csv(std::ostream& os, const std::vector<ExperimentResult>& results);
// function,n,model,frequency
void write_table1_csv(std::ostream& os, const std::vector<ExperimentResult>& results);
// Grouped bar chart of selection frequencies, one panel per (function, tau rule).
std::string frequency_svg(const std::vector<ExperimentResult>& results);

Json results_json(const std::vector<ExperimentResult>& results);

// --- run manifest ---

std::string sha256_hex(const std::string& bytes);
// Digest of the canonical dump of a config echo.
std::string config_digest(const Json& config_echo);

struct OutputFile {
  std::string path;  // relative to the output directory
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string started_utc;
  std::string finished_utc;
  std::vector<OutputFile> outputs;
};

std::string utc_timestamp();
OutputFile describe_output(const std::filesystem::path& dir, const std::string& name);
Json to_json(const RunManifest& manifest);

// Writes text to dir/name and returns its inventory entry.
OutputFile write_output(const std::filesystem::path& dir, const std::string& name,
                        const std::string& text);

}  // namespace geogic
