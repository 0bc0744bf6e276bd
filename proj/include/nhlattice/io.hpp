#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nhlattice/protocols.hpp"

namespace nhl {

// 17 significant digits, enough to round-trip any double.
std::string format_double(double x);
double parse_double(const std::string& text);

// Long format, header "t,site,re,im", one row per (sample, site).
std::string trajectory_csv(const Trajectory& traj);
Trajectory parse_trajectory_csv(const std::string& text);

std::string dispersion_csv(const std::vector<DispersionRow>& rows);
std::string reduction_csv(const ReductionMetrics& metrics);
std::string profiles_csv(const std::vector<StorageProfile>& profiles);

// Ordered key=value lines. Lists are comma separated.
using MetricsRecord = std::vector<std::pair<std::string, std::string>>;

std::string format_metrics(const MetricsRecord& record);
MetricsRecord parse_metrics(const std::string& text);
const std::string& metric(const MetricsRecord& record, const std::string& key);

MetricsRecord metrics_record(const ExperimentResult& result);
TransportMetrics transport_metrics_from(const MetricsRecord& record);
StorageMetrics storage_metrics_from(const MetricsRecord& record);
ReductionMetrics reduction_metrics_from(const MetricsRecord& record);

nlohmann::json manifest_json(const ExperimentResult& result, const std::vector<std::string>& artifacts);

// Writes to a temporary sibling and renames it over the target.
void atomic_write(const std::filesystem::path& path, const std::string& content);

enum class OutputFormat { csv, csv_svg };

// Writes every artifact of a result into out_dir (created if needed) and
// returns the file names, manifest last.
std::vector<std::string> write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir,
                                       OutputFormat format);

}  // namespace nhl
