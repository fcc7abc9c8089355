#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lpproj/fluctuation.hpp"
#include "lpproj/moments.hpp"
#include "lpproj/projection.hpp"
#include "lpproj/sampling.hpp"

namespace lpproj {

enum class Command { Sample, CltStudy, BerryEsseen, LdpRates, TailRates, Validate };

std::string to_string(Command c);
Command parse_command(const std::string& text);
/// Commands that draw Monte Carlo samples (sample counts must be >= 1000).
bool is_statistical(Command c);

/// What `sample` writes: ball points, raw projection norms or the centered statistic.
enum class SampleKind { Ball, RawNorm, CenteredX };

std::string to_string(SampleKind kind);
SampleKind parse_sample_kind(const std::string& text);

inline constexpr const char* kOutDirEnv = "LPPROJ_OUT_DIR";
inline constexpr std::size_t kMinStatisticalSamples = 1000;

struct StudyConfig {
  Command command = Command::Validate;
  PExponent p = PExponent::finite(2.0);
  WSpec w = WSpec::exponential1();
  double lambda = 0.5;
  std::optional<KRule> k_rule;     // default: n^0.8 for berry-esseen, else ceil(lambda n)
  LambdaMode lambda_mode = LambdaMode::Limit;
  std::vector<long> n_grid;                  // default depends on the command
  std::vector<std::size_t> samples{100000};  // one shared count or one per n
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t substreams = 4;
  VarianceVariant variant = VarianceVariant::MomentBased;
  MConstantVariant m_variant = MConstantVariant::AsPrinted;
  ScaleConvention conv = ScaleConvention::UnitDensity;
  ProjectionMethod method = ProjectionMethod::Representation;
  SampleKind sample_kind = SampleKind::CenteredX;
  std::optional<double> y;          // tail-rates threshold
  std::vector<double> y_grid;       // ldp-rates evaluation points
  std::filesystem::path out_dir;

  /// Samples for grid cell i.
  std::size_t samples_for(std::size_t i) const;
  /// Checks the invariants; throws ConfigError naming the field.
  void validate() const;
};

/// Keys accepted in config files and as --key flags.
const std::vector<std::string>& config_keys();

/// Closest known key by edit distance, if reasonably close.
std::optional<std::string> suggest_key(const std::string& unknown);

/// Builds a config from key/value text pairs (flags). Unknown keys are rejected.
StudyConfig config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);
/// Key/value pairs of a JSON config object (arrays become comma lists). Parse
/// errors carry line and column.
std::vector<std::pair<std::string, std::string>> json_config_pairs(const std::string& text);
/// Builds a config from JSON text (strict; unknown keys rejected).
StudyConfig config_from_json_text(const std::string& text);
StudyConfig load_config_file(const std::filesystem::path& path);
/// Config embedded in a manifest written by run_command.
StudyConfig load_manifest_config(const std::filesystem::path& manifest);

/// Fills command-dependent defaults (n-grid, k-rule, y) and the output
/// directory (LPPROJ_OUT_DIR, else ./lpproj_out/<command>), then validates.
StudyConfig resolve(StudyConfig config);

/// Canonical JSON of the resolved config (sorted keys); out_dir and workers are
/// excluded when `for_hash` is set.
std::string config_json(const StudyConfig& config, bool for_hash = false);
/// 64-bit FNV-1a of config_json(config, true), as 16 hex digits.
std::string config_hash(const StudyConfig& config);

}  // namespace lpproj
