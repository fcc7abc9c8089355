#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lpproj/ball_measures.hpp"
#include "lpproj/fluctuation.hpp"
#include "lpproj/ldp.hpp"
#include "lpproj/projection.hpp"

namespace lpproj::report {

inline constexpr int kSchemaVersion = 1;

/// Fixed CSV header of each report kind; `validate` checks emitted files
/// against these. Rate grids and ball batches have axis-dependent headers
/// (see rate_grid_columns / ball_batch_columns).
const std::vector<std::string>& csv_columns(std::string_view kind);
std::vector<std::string> rate_grid_columns(const RateGrid& grid);
std::vector<std::string> ball_batch_columns(long n);

std::string ball_batch_csv(const BallPointBatch& batch);
std::string ball_batch_json(const BallPointBatch& batch);

std::string stat_batch_csv(const StatSampleBatch& batch);
std::string stat_batch_json(const StatSampleBatch& batch);

/// Deterministic content only; wall-clock timings go to convergence_timing_csv.
std::string convergence_json(const ConvergenceReport& report);
std::string convergence_csv(const ConvergenceReport& report);
std::string convergence_plot_ks_csv(const ConvergenceReport& report);
std::string convergence_plot_envelope_csv(const ConvergenceReport& report);
std::string convergence_timing_csv(const ConvergenceReport& report);

std::string rate_grid_csv(const RateGrid& grid);
std::string rate_grids_json(const std::vector<RateGrid>& grids);

/// Header row of a CSV text.
std::vector<std::string> csv_header(std::string_view csv);

/// Writes bytes verbatim (binary mode, so '\n' stays '\n'), creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace lpproj::report
