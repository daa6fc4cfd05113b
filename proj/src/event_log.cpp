#include "fuzzyalign/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "fuzzyalign/error.hpp"
#include "fuzzyalign/model.hpp"

namespace fuzzyalign {

namespace pt = boost::property_tree;

std::size_t multiplicity(const EventLog& log, const std::vector<Event>& events) {
  return static_cast<std::size_t>(
      std::count_if(log.traces.begin(), log.traces.end(), [&](const Trace& t) { return t.events == events; }));
}

// ---------------------------------------------------------------------------
// XES

namespace {

constexpr const char* kConceptName = "concept:name";

bool is_attribute_element(const std::string& tag) {
  return tag == "string" || tag == "float" || tag == "int" || tag == "boolean" || tag == "date" || tag == "id";
}

struct Attribute {
  std::string key;
  Value value;
};

std::optional<Attribute> read_attribute(const std::string& tag, const pt::ptree& node) {
  if (!is_attribute_element(tag) || tag == "date") return std::nullopt;  // timestamps are ignored
  auto key = node.get_optional<std::string>("<xmlattr>.key");
  auto value = node.get_optional<std::string>("<xmlattr>.value");
  if (!key || !value) throw Error(ErrorKind::Syntax, "XES attribute <" + tag + "> needs key and value");
  if (tag == "float" || tag == "int") {
    auto d = parse_decimal(*value);
    if (!d) throw Error(ErrorKind::Syntax, "XES " + tag + " attribute '" + *key + "' is not numeric: " + *value);
    return Attribute{*key, *d};
  }
  return Attribute{*key, infer_value(*value)};
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_attribute(std::ostringstream& out, const std::string& indent, const std::string& key, const Value& v) {
  const char* tag = is_number(v) ? "float" : "string";
  out << indent << '<' << tag << " key=\"" << xml_escape(key) << "\" value=\"" << xml_escape(format_value(v))
      << "\"/>\n";
}

}  // namespace

EventLog parse_xes(std::string_view document) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(document)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed XES: ") + e.what());
  }
  auto log_node = tree.get_child_optional("log");
  if (!log_node) throw Error(ErrorKind::Syntax, "malformed XES: missing <log> element");

  EventLog log;
  for (const auto& [tag, trace_node] : *log_node) {
    if (tag != "trace") continue;
    Trace trace;
    for (const auto& [child_tag, child] : trace_node) {
      if (child_tag == "event") {
        Event ev;
        bool named = false;
        for (const auto& [attr_tag, attr_node] : child) {
          auto attr = read_attribute(attr_tag, attr_node);
          if (!attr) continue;
          if (attr->key == kConceptName) {
            ev.activity = format_value(attr->value);
            named = true;
          } else if (attr->key.find(':') == std::string::npos) {
            ev.writes[attr->key] = attr->value;
          }
        }
        if (!named || ev.activity.empty())
          throw Error(ErrorKind::Semantic, "XES event in trace " + std::to_string(log.traces.size() + 1) +
                                               " lacks concept:name");
        trace.events.push_back(std::move(ev));
      } else if (auto attr = read_attribute(child_tag, child); attr && attr->key == kConceptName) {
        trace.case_id = format_value(attr->value);
      }
    }
    if (trace.case_id.empty()) trace.case_id = "trace-" + std::to_string(log.traces.size() + 1);
    log.traces.push_back(std::move(trace));
  }
  return log;
}

std::string write_xes(const EventLog& log) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<log xes.version=\"1.0\">\n";
  for (const auto& trace : log.traces) {
    out << "  <trace>\n";
    write_attribute(out, "    ", kConceptName, trace.case_id);
    for (const auto& ev : trace.events) {
      out << "    <event>\n";
      write_attribute(out, "      ", kConceptName, ev.activity);
      for (const auto& [k, v] : ev.writes) write_attribute(out, "      ", k, v);
      out << "    </event>\n";
    }
    out << "  </trace>\n";
  }
  out << "</log>\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::vector<std::string>> split_csv(std::string_view doc) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    char c = doc[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < doc.size() && doc[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    if (c == '"' && cell.empty()) {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < doc.size() && doc[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
      }
      row.clear();
      cell.clear();
      any = false;
      ++line;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorKind::Syntax, "unterminated quoted CSV cell at line " + std::to_string(line));
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

bool is_timestamp_column(const std::string& name) {
  return name == "timestamp" || name == "time:timestamp";
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

EventLog parse_csv(std::string_view document, const ProcessModel* model) {
  if (document.size() >= 3 && document.substr(0, 3) == "\xEF\xBB\xBF") document.remove_prefix(3);
  auto rows = split_csv(document);
  if (rows.empty()) throw Error(ErrorKind::Syntax, "CSV log is empty (missing header)");
  const auto& header = rows.front();
  if (header.size() < 2 || header[0] != "case_id" || header[1] != "activity")
    throw Error(ErrorKind::Syntax, "CSV header must start with case_id,activity");

  EventLog log;
  std::map<std::string, std::size_t> trace_of_case;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() > header.size())
      throw Error(ErrorKind::Syntax, "CSV row " + std::to_string(r + 1) + " has more cells than the header");
    if (row.size() < 2 || row[0].empty() || row[1].empty())
      throw Error(ErrorKind::Syntax, "CSV row " + std::to_string(r + 1) + " lacks case_id or activity");
    Event ev{row[1], {}};
    for (std::size_t c = 2; c < row.size(); ++c) {
      if (row[c].empty() || is_timestamp_column(header[c])) continue;
      const VariableDecl* decl = model ? model->find_variable(header[c]) : nullptr;
      if (decl && decl->kind != VarKind::String) {
        auto d = parse_decimal(row[c]);
        if (!d)
          throw Error(ErrorKind::Syntax, "CSV row " + std::to_string(r + 1) + ": '" + row[c] +
                                             "' is not a number for variable '" + header[c] + "'");
        ev.writes[header[c]] = *d;
      } else if (decl) {
        ev.writes[header[c]] = row[c];
      } else {
        ev.writes[header[c]] = infer_value(row[c]);
      }
    }
    auto [it, inserted] = trace_of_case.emplace(row[0], log.traces.size());
    if (inserted) log.traces.push_back(Trace{row[0], {}});
    log.traces[it->second].events.push_back(std::move(ev));
  }
  return log;
}

std::string write_csv(const EventLog& log) {
  std::set<std::string> columns;
  for (const auto& t : log.traces)
    for (const auto& e : t.events)
      for (const auto& [k, v] : e.writes) columns.insert(k);
  std::ostringstream out;
  out << "case_id,activity";
  for (const auto& c : columns) out << ',' << csv_cell(c);
  out << '\n';
  for (const auto& t : log.traces)
    for (const auto& e : t.events) {
      out << csv_cell(t.case_id) << ',' << csv_cell(e.activity);
      for (const auto& c : columns) {
        out << ',';
        auto it = e.writes.find(c);
        if (it != e.writes.end()) out << csv_cell(format_value(it->second));
      }
      out << '\n';
    }
  return out.str();
}

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

EventLog load_log(const std::string& path, const ProcessModel* model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open log file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (ends_with(path, ".csv")) return parse_csv(ss.str(), model);
  return parse_xes(ss.str());
}

void save_log(const EventLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write log file '" + path + "'");
  out << (ends_with(path, ".csv") ? write_csv(log) : write_xes(log));
}

}  // namespace fuzzyalign
