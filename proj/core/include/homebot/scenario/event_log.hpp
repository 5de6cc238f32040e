#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace homebot::scenario {

/// Ordered JSON-lines records. Every record has "t", "module" and "type";
/// timestamps never decrease.
class EventLog {
 public:
  /// Timestamps are rounded to microseconds. Throws InvalidArgument if `t`
  /// precedes the previous record.
  void add(double t, std::string_view module, std::string_view type, nlohmann::json fields = nlohmann::json::object());

  [[nodiscard]] std::vector<nlohmann::json> const& records() const { return records_; }
  [[nodiscard]] bool empty() const { return records_.empty(); }
  [[nodiscard]] std::string to_jsonl() const;
  void write(const std::string& path) const;

 private:
  std::vector<nlohmann::json> records_;
  double last_t_ = 0.0;
};

/// Parses JSON-lines text. Blank lines are skipped. Throws ParseError
/// naming the 1-based line of the first malformed record.
std::vector<nlohmann::json> parse_log(std::string_view text);
std::vector<nlohmann::json> load_log(const std::string& path);

}  // namespace homebot::scenario
