#include "homebot/scenario/event_log.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "homebot/error.hpp"

namespace homebot::scenario {

using nlohmann::json;

void EventLog::add(double t, std::string_view module, std::string_view type, json fields) {
  const double rounded = std::round(t * 1e6) / 1e6;
  if (!records_.empty() && rounded < last_t_) throw InvalidArgument("EventLog: timestamps must not decrease");
  if (!fields.is_object()) throw InvalidArgument("EventLog: record fields must be an object");
  fields["t"] = rounded;
  fields["module"] = module;
  fields["type"] = type;
  records_.push_back(std::move(fields));
  last_t_ = rounded;
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records_) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

void EventLog::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write log '" + path + "'");
  f << to_jsonl();
}

std::vector<json> parse_log(std::string_view text) {
  std::vector<json> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json r;
    try {
      r = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("log line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!r.is_object() || !r.contains("t") || !r["t"].is_number() || !r.contains("module") ||
        !r["module"].is_string() || !r.contains("type") || !r["type"].is_string())
      throw ParseError("log line " + std::to_string(line_no) + ": record needs numeric 't' and string 'module', 'type'");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<json> load_log(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read log '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_log(ss.str());
}

}  // namespace homebot::scenario
