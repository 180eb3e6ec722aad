#include "ambient/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ambient {

namespace {

struct KeySpec {
  const char* key;
  const char* default_value;
  const char* comment;
};

// Order here is the order of the emitted default file.
constexpr KeySpec kKeys[] = {
    {"sensor.preset", "hdl64", "hdl64 | hdl32 | vlp16 | custom"},
    {"sensor.rings", "64", "custom only: ring count"},
    {"sensor.cols", "1800", "custom only: columns per revolution"},
    {"sensor.min_elevation_deg", "-24.9", "custom only: lowest ring"},
    {"sensor.max_elevation_deg", "2.0", "custom only: highest ring"},
    {"sensor.vertical_angles", "", "custom only: comma-separated ring elevations (overrides the range)"},
    {"sensor.max_range", "120", "meters; also d_max of the normal weights"},
    {"sensor.min_range", "0.5", "meters; closer returns are dropped"},
    {"ground.enabled", "true", ""},
    {"ground.max_slope_deg", "10", "steepest slope between ground returns"},
    {"ground.sensor_height", "1.73", "meters above the ground plane"},
    {"ground.height_tolerance", "0.5", "ground may rise this far above the nominal plane"},
    {"ground.slope_baseline", "0.2", "minimum spacing of returns in a slope test, meters"},
    {"depth_cluster.beta0_min", "10", "degrees; used for degenerate scenes"},
    {"depth_cluster.beta0_max", "60", "degrees; used for feature-rich scenes"},
    {"depth_cluster.initial_beta0", "", "first-pass threshold; empty means beta0_min"},
    {"depth_cluster.force_beta0", "", "final-pass threshold override; empty means dynamic"},
    {"euclidean_cluster.gamma", "1.2", "slack on the expected beam spacing"},
    {"euclidean_cluster.window", "2", "search half-width in pixels"},
    {"skeleton.n_e", "100", "minimum Euclidean cluster size"},
    {"skeleton.n_d", "30", "minimum depth cluster size (also the final filter)"},
    {"normals.sample_fraction", "0.1", "share of skeleton pixels sampled"},
    {"normals.window", "2", "neighborhood half-width in pixels"},
    {"normals.depth_gate", "0.5", "meters; max depth difference to the center"},
    {"normals.min_neighbors", "5", "smallest neighborhood that yields a normal"},
    {"normals.seed", "42", "sampling seed"},
    {"degeneration.min_features", "10", "fewer normals fall back to beta0_min"},
    {"pipeline.workers", "1", "frames processed concurrently"},
};

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::ConfigError, key + ": " + what);
}

double to_double(const ConfigValues& cfg, const std::string& key) {
  const std::string& s = cfg.get(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    config_error(key, "expected a number, got '" + s + "'");
  }
  return v;
}

std::optional<double> to_optional_double(const ConfigValues& cfg, const std::string& key) {
  if (cfg.get(key).empty()) return std::nullopt;
  return to_double(cfg, key);
}

long long to_integer(const ConfigValues& cfg, const std::string& key, long long min_value) {
  const std::string& s = cfg.get(key);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    config_error(key, "expected an integer, got '" + s + "'");
  }
  if (v < min_value) config_error(key, "must be >= " + std::to_string(min_value));
  return v;
}

bool to_bool(const ConfigValues& cfg, const std::string& key) {
  const std::string& s = cfg.get(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  config_error(key, "expected true/false, got '" + s + "'");
}

SensorModel build_sensor(const ConfigValues& cfg) {
  const std::string& preset = cfg.get("sensor.preset");
  const double max_range = to_double(cfg, "sensor.max_range");
  const double min_range = to_double(cfg, "sensor.min_range");
  try {
    auto with_range = [&](const SensorModel& s) {
      return SensorModel(s.num_cols(), {s.ring_elevations().begin(), s.ring_elevations().end()},
                         max_range, min_range);
    };
    if (preset == "hdl64") return with_range(SensorModel::hdl64());
    if (preset == "hdl32") return with_range(SensorModel::hdl32());
    if (preset == "vlp16") return with_range(SensorModel::vlp16());
    if (preset != "custom") config_error("sensor.preset", "unknown preset '" + preset + "'");

    const int cols = static_cast<int>(to_integer(cfg, "sensor.cols", 4));
    const std::string& list = cfg.get("sensor.vertical_angles");
    if (!list.empty()) {
      std::vector<double> angles;
      std::stringstream ss(list);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) config_error("sensor.vertical_angles", "empty entry");
        const std::string trimmed = item.substr(first, last - first + 1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
        if (ec != std::errc() || ptr != trimmed.data() + trimmed.size()) {
          config_error("sensor.vertical_angles", "bad angle '" + trimmed + "'");
        }
        angles.push_back(v);
      }
      return SensorModel(cols, std::move(angles), max_range, min_range);
    }
    return SensorModel::uniform(static_cast<int>(to_integer(cfg, "sensor.rings", 2)), cols,
                                to_double(cfg, "sensor.min_elevation_deg"),
                                to_double(cfg, "sensor.max_elevation_deg"), max_range, min_range);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    config_error("sensor", e.what());
  }
}

}  // namespace

ConfigValues::ConfigValues() {
  for (const auto& k : kKeys) values_.emplace(k.key, k.default_value);
}

void ConfigValues::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) config_error(key, "unknown configuration key");
  it->second = value;
}

const std::string& ConfigValues::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) config_error(key, "unknown configuration key");
  return it->second;
}

void ConfigValues::merge_ini(const std::string& text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError,
                origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      if (body.data().empty()) continue;
      throw Error(ErrorCode::ConfigError,
                  origin + ": key '" + section + "' must live inside a [section]");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!values_.contains(full)) {
        throw Error(ErrorCode::ConfigError, origin + ": unknown configuration key '" + full + "'");
      }
      values_[full] = value.get_value<std::string>();
    }
  }
}

void ConfigValues::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  merge_ini(buffer.str(), path.string());
}

void ConfigValues::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::ConfigError, "override '" + assignment + "' is not section.key=value");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

PipelineConfig ConfigValues::to_pipeline() const {
  PipelineConfig c;
  c.sensor = build_sensor(*this);

  c.ground_enabled = to_bool(*this, "ground.enabled");
  c.ground.max_slope_deg = to_double(*this, "ground.max_slope_deg");
  c.ground.sensor_height = to_double(*this, "ground.sensor_height");
  c.ground.height_tolerance = to_double(*this, "ground.height_tolerance");
  c.ground.slope_baseline = to_double(*this, "ground.slope_baseline");
  if (!(c.ground.max_slope_deg > 0.0 && c.ground.max_slope_deg < 90.0)) {
    config_error("ground.max_slope_deg", "must lie in (0, 90)");
  }
  if (!(c.ground.slope_baseline >= 0.0)) config_error("ground.slope_baseline", "must be >= 0");

  c.degeneration.beta0_min_deg = to_double(*this, "depth_cluster.beta0_min");
  c.degeneration.beta0_max_deg = to_double(*this, "depth_cluster.beta0_max");
  if (!(c.degeneration.beta0_min_deg > 0.0 &&
        c.degeneration.beta0_min_deg < c.degeneration.beta0_max_deg &&
        c.degeneration.beta0_max_deg < 90.0)) {
    config_error("depth_cluster", "need 0 < beta0_min < beta0_max < 90");
  }
  c.initial_beta0 = to_optional_double(*this, "depth_cluster.initial_beta0");
  c.force_beta0 = to_optional_double(*this, "depth_cluster.force_beta0");
  for (const auto& [key, v] : {std::pair{"depth_cluster.initial_beta0", c.initial_beta0},
                               std::pair{"depth_cluster.force_beta0", c.force_beta0}}) {
    if (v && !(*v > 0.0 && *v < 90.0)) config_error(key, "must lie in (0, 90)");
  }

  c.euclidean.gamma = to_double(*this, "euclidean_cluster.gamma");
  if (!(c.euclidean.gamma >= 1.0)) config_error("euclidean_cluster.gamma", "must be >= 1");
  c.euclidean.window = static_cast<int>(to_integer(*this, "euclidean_cluster.window", 1));

  c.skeleton.n_e = static_cast<std::size_t>(to_integer(*this, "skeleton.n_e", 1));
  c.skeleton.n_d = static_cast<std::size_t>(to_integer(*this, "skeleton.n_d", 1));

  c.normals.sample_fraction = to_double(*this, "normals.sample_fraction");
  if (!(c.normals.sample_fraction > 0.0 && c.normals.sample_fraction <= 1.0)) {
    config_error("normals.sample_fraction", "must lie in (0, 1]");
  }
  c.normals.window = static_cast<int>(to_integer(*this, "normals.window", 1));
  c.normals.depth_gate = to_double(*this, "normals.depth_gate");
  if (!(c.normals.depth_gate > 0.0)) config_error("normals.depth_gate", "must be > 0");
  c.normals.min_neighbors = static_cast<std::size_t>(to_integer(*this, "normals.min_neighbors", 3));
  c.normals.rng_seed = static_cast<std::uint64_t>(to_integer(*this, "normals.seed", 0));

  c.degeneration.min_features =
      static_cast<std::size_t>(to_integer(*this, "degeneration.min_features", 1));
  c.workers = static_cast<std::size_t>(to_integer(*this, "pipeline.workers", 1));
  return c;
}

std::string ConfigValues::to_ini() const {
  std::ostringstream out;
  std::string current;
  for (const auto& k : kKeys) {
    const std::string key = k.key;
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    if (section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << section << "]\n";
      current = section;
    }
    if (k.comment[0] != '\0') out << "; " << k.comment << '\n';
    out << key.substr(dot + 1) << " = " << values_.at(key) << '\n';
  }
  return out.str();
}

}  // namespace ambient
