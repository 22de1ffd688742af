#include "hyperlearn/trace.hpp"

#include <charconv>
#include <cmath>

#include "hyperlearn/error.hpp"

namespace hyperlearn {

double Label::value(const std::string& name) const {
  auto it = valuations.find(name);
  if (it == valuations.end()) throw Error(ErrorKind::UnknownValuation, "label has no valuation '" + name + "'");
  return it->second;
}

ZippedTrace zip_traces(const std::vector<Trace>& traces) {
  if (traces.empty()) throw Error(ErrorKind::EmptyInput, "zip of zero traces");
  const std::size_t len = traces.front().size();
  for (const auto& t : traces) {
    if (t.size() != len) {
      throw Error(ErrorKind::LengthMismatch, "zip of traces with lengths " + std::to_string(len) + " and " +
                                                 std::to_string(t.size()));
    }
  }
  if (len == 0) throw Error(ErrorKind::EmptyInput, "zip of empty traces");
  ZippedTrace z;
  z.arity = traces.size();
  z.columns.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    z.columns[i].reserve(traces.size());
    for (const auto& t : traces) z.columns[i].push_back(t[i]);
  }
  return z;
}

Trace project(const ZippedTrace& z, std::size_t slot) {
  if (slot >= z.arity) throw Error(ErrorKind::ArityMismatch, "slot " + std::to_string(slot) + " out of range");
  Trace t;
  t.reserve(z.size());
  for (const auto& col : z.columns) t.push_back(col[slot]);
  return t;
}

std::vector<Trace> ordered_union(const std::vector<std::pair<int, Trace>>& exist_traces,
                                 const std::vector<std::pair<int, Trace>>& univ_traces) {
  std::map<int, const Trace*> merged;
  for (const auto* set : {&exist_traces, &univ_traces}) {
    for (const auto& [idx, tr] : *set) {
      if (!merged.emplace(idx, &tr).second) {
        throw Error(ErrorKind::DuplicateIndex, "quantifier index " + std::to_string(idx) + " appears twice");
      }
    }
  }
  std::vector<Trace> out;
  out.reserve(merged.size());
  for (const auto& [idx, tr] : merged) out.push_back(*tr);
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string number_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

}  // namespace

std::string format_label(const Label& l) {
  std::string out;
  for (const auto& p : l.props) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  out += " |";
  bool first = true;
  for (const auto& [k, v] : l.valuations) {
    out += first ? " " : ",";
    first = false;
    out += k + "=" + number_text(v);
  }
  return out;
}

Label parse_label(std::string_view line) {
  Label l;
  const std::size_t bar = line.find('|');
  std::string_view props = trim(line.substr(0, bar));
  std::size_t i = 0;
  while (i < props.size()) {
    std::size_t j = props.find_first_of(" \t", i);
    if (j == std::string_view::npos) j = props.size();
    if (j > i) l.props.emplace(props.substr(i, j - i));
    i = j + 1;
  }
  if (bar == std::string_view::npos) return l;
  std::string_view vals = trim(line.substr(bar + 1));
  i = 0;
  while (i < vals.size()) {
    std::size_t j = vals.find(',', i);
    if (j == std::string_view::npos) j = vals.size();
    std::string_view kv = trim(vals.substr(i, j - i));
    if (!kv.empty()) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string_view::npos) throw Error(ErrorKind::Syntax, "valuation without '=': " + std::string(kv));
      std::string_view key = trim(kv.substr(0, eq));
      std::string_view num = trim(kv.substr(eq + 1));
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (ec != std::errc() || ptr != num.data() + num.size()) {
        throw Error(ErrorKind::Syntax, "bad number in valuation: " + std::string(kv));
      }
      l.valuations[std::string(key)] = v;
    }
    i = j + 1;
  }
  return l;
}

std::string format_trace(const Trace& t) {
  std::string out;
  for (const auto& l : t) out += format_label(l) + "\n";
  return out;
}

Trace parse_trace(std::string_view text) {
  Trace t;
  for (auto line : split_lines(text)) {
    if (trim(line).empty() || trim(line).front() == '#') continue;
    t.push_back(parse_label(line));
  }
  return t;
}

std::vector<Trace> parse_trace_set(std::string_view text) {
  std::vector<Trace> out(1);
  for (auto line : split_lines(text)) {
    std::string_view s = trim(line);
    if (s == "---") {
      out.emplace_back();
    } else if (!s.empty() && s.front() != '#') {
      out.back().push_back(parse_label(line));
    }
  }
  return out;
}

std::string format_trace_set(const std::vector<Trace>& ts) {
  std::string out;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (k > 0) out += "---\n";
    out += format_trace(ts[k]);
  }
  return out;
}

}  // namespace hyperlearn
