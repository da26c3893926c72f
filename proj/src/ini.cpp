#include "viscowave/ini.hpp"

#include <fstream>
#include <sstream>

#include "viscowave/field.hpp"

namespace viscowave {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(std::string_view line) {
  // a comment marker inside a quoted value is not a comment
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (!quoted && (line[i] == '#' || line[i] == ';')) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

}  // namespace

IniDocument IniDocument::parse(std::string_view text, const std::string& origin) {
  IniDocument doc;
  doc.origin_ = origin;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(where + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw Error(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw Error(where + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    doc.set(section.empty() ? key : section + "." + key, std::move(value));
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::optional<std::string> IniDocument::get(const std::string& dotted_key) const {
  const auto it = values_.find(dotted_key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void IniDocument::set(const std::string& dotted_key, std::string value) {
  if (!values_.count(dotted_key)) order_.push_back(dotted_key);
  values_[dotted_key] = std::move(value);
}

std::string IniDocument::to_string() const {
  std::ostringstream out;
  std::string current;
  for (const auto& key : order_) {
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (section != current) {
      out << "[" << section << "]\n";
      current = section;
    }
    out << name << " = " << values_.at(key) << "\n";
  }
  return out.str();
}

}  // namespace viscowave
