#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hyperlearn {

/// Observable content of one state: the propositions that hold plus named
/// numeric valuations.
struct Label {
  std::set<std::string> props;
  std::map<std::string, double> valuations;

  bool operator==(const Label&) const = default;

  bool has(const std::string& prop) const { return props.count(prop) != 0; }
  /// Throws UnknownValuation when `name` is absent.
  double value(const std::string& name) const;
};

using Trace = std::vector<Label>;

/// Point-wise bundle of n equal-length traces: columns[i][k] is trace k at
/// position i.
struct ZippedTrace {
  std::size_t arity = 0;
  std::vector<std::vector<Label>> columns;

  std::size_t size() const { return columns.size(); }
};

ZippedTrace zip_traces(const std::vector<Trace>& traces);

/// Slot k of every column, i.e. the inverse of zip_traces for one trace.
Trace project(const ZippedTrace& z, std::size_t slot);

/// Merges traces tagged with their original quantifier positions into one
/// list ordered by position. Throws DuplicateIndex on overlap.
std::vector<Trace> ordered_union(const std::vector<std::pair<int, Trace>>& exist_traces,
                                 const std::vector<std::pair<int, Trace>>& univ_traces);

// Text form: one position per line, `p q | x=1,y=2`; traces in a set are
// separated by a line holding `---`.
std::string format_label(const Label& l);
Label parse_label(std::string_view line);
std::string format_trace(const Trace& t);
Trace parse_trace(std::string_view text);
std::vector<Trace> parse_trace_set(std::string_view text);
std::string format_trace_set(const std::vector<Trace>& ts);

}  // namespace hyperlearn
