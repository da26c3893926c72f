#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace viscowave {

/// Flat `[section] key = value` document. Keys are addressed as
/// "section.key"; `#` and `;` start comments. Later assignments win.
class IniDocument {
 public:
  static IniDocument parse(std::string_view text, const std::string& origin = "<string>");
  static IniDocument load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& dotted_key) const;
  void set(const std::string& dotted_key, std::string value);
  bool contains(const std::string& dotted_key) const { return values_.count(dotted_key) != 0; }

  /// Keys in document order of first appearance.
  const std::vector<std::string>& keys() const { return order_; }
  const std::string& origin() const { return origin_; }
  std::string to_string() const;

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  std::string origin_;
};

}  // namespace viscowave
