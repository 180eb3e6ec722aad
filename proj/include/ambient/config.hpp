#ifndef AMBIENT_CONFIG_HPP
#define AMBIENT_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>

#include "ambient/pipeline.hpp"

namespace ambient {

/// Flat `section.key -> value` settings backed by an INI file. Every key has
/// a default; unknown keys are rejected.
class ConfigValues {
 public:
  ConfigValues();

  /// Throws ConfigError for an unknown key.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const noexcept { return values_; }

  /// Applies every `key = value` from an INI file; errors carry the line.
  void merge_file(const std::filesystem::path& path);
  void merge_ini(const std::string& text, const std::string& origin = "<string>");
  /// Applies a `section.key=value` override.
  void apply_override(const std::string& assignment);

  /// Converts and validates. Throws ConfigError naming the offending key.
  PipelineConfig to_pipeline() const;

  /// The current values as an INI document, with comments.
  std::string to_ini() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace ambient

#endif  // AMBIENT_CONFIG_HPP
