#include "lpproj/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include <json.hpp>

#include "lpproj/errors.hpp"
#include "lpproj/report_io.hpp"
#include "lpproj/util.hpp"

namespace lpproj {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::Sample:
      return "sample";
    case Command::CltStudy:
      return "clt-study";
    case Command::BerryEsseen:
      return "berry-esseen";
    case Command::LdpRates:
      return "ldp-rates";
    case Command::TailRates:
      return "tail-rates";
    case Command::Validate:
      return "validate";
  }
  return "validate";
}

Command parse_command(const std::string& text) {
  for (Command c : {Command::Sample, Command::CltStudy, Command::BerryEsseen, Command::LdpRates, Command::TailRates,
                    Command::Validate}) {
    if (lowercase(text) == to_string(c)) {
      return c;
    }
  }
  throw ConfigError("command", "unknown command '" + text +
                                   "' (expected sample, clt-study, berry-esseen, ldp-rates, tail-rates or validate)");
}

bool is_statistical(Command c) {
  return c == Command::Sample || c == Command::CltStudy || c == Command::BerryEsseen || c == Command::TailRates;
}

std::string to_string(SampleKind kind) {
  switch (kind) {
    case SampleKind::Ball:
      return "ball";
    case SampleKind::RawNorm:
      return "raw-norm";
    case SampleKind::CenteredX:
      return "centered-x";
  }
  return "centered-x";
}

SampleKind parse_sample_kind(const std::string& text) {
  const std::string t = lowercase(text);
  if (t == "ball") {
    return SampleKind::Ball;
  }
  if (t == "raw-norm" || t == "raw") {
    return SampleKind::RawNorm;
  }
  if (t == "centered-x" || t == "statistic" || t == "x") {
    return SampleKind::CenteredX;
  }
  throw ArgumentError("unknown sample kind '" + text + "' (ball, raw-norm, centered-x)");
}

std::size_t StudyConfig::samples_for(std::size_t i) const {
  if (samples.empty()) {
    throw ConfigError("samples", "no sample count");
  }
  return samples.size() == 1 ? samples[0] : samples.at(i);
}

void StudyConfig::validate() const {
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) {
      throw ConfigError("n", "grid entry " + std::to_string(n_grid[i]) + " is not positive");
    }
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw ConfigError("n", "grid must be strictly increasing (" + std::to_string(n_grid[i - 1]) + " then " +
                                 std::to_string(n_grid[i]) + ")");
    }
  }
  if (samples.empty() || (samples.size() != 1 && samples.size() != n_grid.size())) {
    throw ConfigError("samples", "give one sample count or one per grid entry");
  }
  if (is_statistical(command)) {
    for (std::size_t s : samples) {
      if (s < kMinStatisticalSamples) {
        throw ConfigError("samples", "count " + std::to_string(s) + " below the minimum " +
                                         std::to_string(kMinStatisticalSamples) + " for statistical commands");
      }
    }
    if (n_grid.empty()) {
      throw ConfigError("n", "empty n-grid");
    }
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("lambda", "must lie in [0, 1], got " + format_real(lambda));
  }
  if (workers < 1) {
    throw ConfigError("workers", "must be at least 1");
  }
  if (substreams < 1) {
    throw ConfigError("substreams", "must be at least 1");
  }
  if (p.is_infinite() && w.kind != WSpec::Kind::Exponential1) {
    throw ConfigError("w", "p = inf supports only the uniform cube (exponential1)");
  }
  switch (command) {
    case Command::Sample:
      if (n_grid.size() != 1) {
        throw ConfigError("n", "sample takes a single n");
      }
      break;
    case Command::TailRates:
      if (p.is_infinite()) {
        throw ConfigError("p", "tail-rates needs a finite p");
      }
      if (!(lambda > 0.0)) {
        throw ConfigError("lambda", "tail-rates needs lambda > 0");
      }
      if (!y || !(*y > 0.0)) {
        throw ConfigError("y", "tail-rates needs a positive threshold y");
      }
      break;
    case Command::LdpRates:
      if (p.is_infinite()) {
        throw ConfigError("p", "ldp-rates needs a finite p");
      }
      if (p.value() < 2.0 && !(lambda > 0.0)) {
        throw ConfigError("lambda", "the p < 2 rate needs lambda > 0");
      }
      for (std::size_t i = 1; i < y_grid.size(); ++i) {
        if (!(y_grid[i] > y_grid[i - 1])) {
          throw ConfigError("y_grid", "must be strictly increasing");
        }
      }
      break;
    default:
      break;
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "command", "p",       "w",      "lambda",     "k_rule",    "lambda_mode", "n",
      "samples", "seed",    "workers", "substreams", "variant",   "m_variant",   "convention",
      "method",  "sample_kind", "y",  "y_grid",     "out_dir"};
  return keys;
}

namespace {

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) {
    prev[j] = j;
  }
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) {
        parts.push_back(cur);
      }
      cur.clear();
    } else if (c != '[' && c != ']') {
      cur += c;
    }
  }
  if (!cur.empty()) {
    parts.push_back(cur);
  }
  return parts;
}

// Integer fields accept "100000", "1e5" or "100000.0".
std::uint64_t parse_count(const std::string& text, const std::string& field) {
  if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    try {
      return std::stoull(text);
    } catch (const std::exception&) {
      throw ConfigError(field, "integer out of range: '" + text + "'");
    }
  }
  double v = 0.0;
  try {
    v = parse_real(text, field);
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
  }
  if (!(v >= 0.0) || v != std::floor(v) || v > 9007199254740992.0) {
    throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

double parse_field_real(const std::string& text, const std::string& field) {
  try {
    return parse_real(text, field);
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
}

void apply(StudyConfig& c, const std::string& key, const std::string& value) {
  try {
    if (key == "command") {
      c.command = parse_command(value);
    } else if (key == "p") {
      c.p = PExponent::parse(value);
    } else if (key == "w") {
      c.w = WSpec::parse(value);
    } else if (key == "lambda") {
      c.lambda = parse_field_real(value, key);
    } else if (key == "k_rule") {
      c.k_rule = KRule::parse(value);
    } else if (key == "lambda_mode") {
      c.lambda_mode = parse_lambda_mode(value);
    } else if (key == "n") {
      c.n_grid.clear();
      for (const std::string& part : split_list(value)) {
        c.n_grid.push_back(static_cast<long>(parse_count(part, key)));
      }
    } else if (key == "samples") {
      c.samples.clear();
      for (const std::string& part : split_list(value)) {
        c.samples.push_back(static_cast<std::size_t>(parse_count(part, key)));
      }
    } else if (key == "seed") {
      c.seed = parse_count(value, key);
    } else if (key == "workers") {
      c.workers = static_cast<std::size_t>(parse_count(value, key));
    } else if (key == "substreams") {
      c.substreams = static_cast<std::size_t>(parse_count(value, key));
    } else if (key == "variant") {
      c.variant = parse_variance_variant(value);
    } else if (key == "m_variant") {
      c.m_variant = parse_m_variant(value);
    } else if (key == "convention") {
      c.conv = parse_convention(value);
    } else if (key == "method") {
      c.method = parse_projection_method(value);
    } else if (key == "sample_kind") {
      c.sample_kind = parse_sample_kind(value);
    } else if (key == "y") {
      c.y = parse_field_real(value, key);
    } else if (key == "y_grid") {
      c.y_grid.clear();
      for (const std::string& part : split_list(value)) {
        c.y_grid.push_back(parse_field_real(part, key));
      }
    } else if (key == "out_dir") {
      c.out_dir = value;
    } else {
      std::string message = "unknown key \"" + key + "\"";
      if (const auto near = suggest_key(key)) {
        message += "; did you mean \"" + *near + "\"?";
      }
      throw ConfigError(key, message);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

std::string json_scalar_text(const json& v, const std::string& key) {
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_number_unsigned()) {
    return std::to_string(v.get<std::uint64_t>());
  }
  if (v.is_number_integer()) {
    return std::to_string(v.get<std::int64_t>());
  }
  if (v.is_number_float()) {
    return format_real(v.get<double>());
  }
  throw ConfigError(key, "expected a number or string, got " + std::string(v.type_name()));
}

}  // namespace

std::optional<std::string> suggest_key(const std::string& unknown) {
  std::optional<std::string> best;
  std::size_t best_d = std::max<std::size_t>(2, unknown.size() / 3) + 1;
  for (const std::string& k : config_keys()) {
    const std::size_t d = edit_distance(lowercase(unknown), k);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

StudyConfig config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
  StudyConfig c;
  std::set<std::string> seen;
  for (const auto& [raw_key, value] : pairs) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '-', '_');
    if (!seen.insert(key).second) {
      throw ConfigError(key, "given more than once");
    }
    apply(c, key, value);
  }
  return c;
}

std::vector<std::pair<std::string, std::string>> json_config_pairs(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("", "config must be a JSON object");
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [key, v] : doc.items()) {
    if (v.is_array()) {
      std::string joined;
      for (const json& e : v) {
        if (!joined.empty()) {
          joined += ',';
        }
        joined += json_scalar_text(e, key);
      }
      pairs.emplace_back(key, joined);
    } else if (v.is_null()) {
      continue;
    } else {
      pairs.emplace_back(key, json_scalar_text(v, key));
    }
  }
  return pairs;
}

StudyConfig config_from_json_text(const std::string& text) { return config_from_pairs(json_config_pairs(text)); }

StudyConfig load_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config", "file not found: " + path.string());
  }
  try {
    return config_from_json_text(report::read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(e.field(), path.string() + ": " + e.what());
  }
}

StudyConfig load_manifest_config(const std::filesystem::path& manifest) {
  json doc;
  try {
    doc = json::parse(report::read_file(manifest));
  } catch (const json::parse_error& e) {
    throw ConfigError("manifest", std::string("parse error: ") + e.what());
  }
  if (!doc.contains("config")) {
    throw ConfigError("manifest", manifest.string() + " has no embedded config");
  }
  return config_from_json_text(doc["config"].dump());
}

StudyConfig resolve(StudyConfig c) {
  if (c.n_grid.empty()) {
    switch (c.command) {
      case Command::Sample:
        c.n_grid = {1024};
        break;
      case Command::CltStudy:
        c.n_grid = {256, 1024, 4096};
        break;
      case Command::BerryEsseen:
        c.n_grid = {1000, 10000, 100000};
        break;
      case Command::TailRates:
        c.n_grid = {64, 128, 256};
        break;
      default:
        break;
    }
  }
  if (!c.k_rule) {
    c.k_rule = c.command == Command::BerryEsseen ? KRule::parse("n^0.8") : KRule{};
  }
  if (c.command == Command::TailRates && !c.y && c.p.is_finite() && c.lambda > 0.0) {
    c.y = 1.15 * std::sqrt(c.lambda * ldp_m_constant(c.p, c.m_variant));
  }
  if (c.command == Command::LdpRates && c.y_grid.empty() && c.p.is_finite() && c.lambda > 0.0) {
    const double ref = c.p.value() >= 2.0 ? std::sqrt(abs_moment(c.p, 2.0))
                                          : std::sqrt(c.lambda * ldp_m_constant(c.p, c.m_variant));
    for (int i = 5; i <= 15; ++i) {
      c.y_grid.push_back(ref * i / 10.0);
    }
  }
  if (c.out_dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    const std::filesystem::path base = env != nullptr && *env != '\0' ? env : "lpproj_out";
    c.out_dir = base / to_string(c.command);
  }
  c.validate();
  return c;
}

std::string config_json(const StudyConfig& c, bool for_hash) {
  json j;  // std::map-backed: keys come out sorted
  j["command"] = to_string(c.command);
  j["p"] = c.p.to_string();
  j["w"] = c.w.to_string();
  j["lambda"] = c.lambda;
  if (c.k_rule) {
    j["k_rule"] = c.k_rule->to_string();
  }
  j["lambda_mode"] = to_string(c.lambda_mode);
  j["n"] = c.n_grid;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["substreams"] = c.substreams;
  j["variant"] = to_string(c.variant);
  j["m_variant"] = to_string(c.m_variant);
  j["convention"] = to_string(c.conv);
  j["method"] = to_string(c.method);
  j["sample_kind"] = to_string(c.sample_kind);
  if (c.y) {
    j["y"] = *c.y;
  }
  if (!c.y_grid.empty()) {
    j["y_grid"] = c.y_grid;
  }
  if (!for_hash) {
    j["workers"] = c.workers;
    j["out_dir"] = c.out_dir.generic_string();
  }
  return j.dump();
}

std::string config_hash(const StudyConfig& c) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : config_json(c, true)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace lpproj
