#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyperlearn/formula.hpp"
#include "hyperlearn/trace.hpp"

namespace hyperlearn {

struct SkolemDecl {
  int exist_index = 0;     // original quantifier position of the existential
  std::vector<int> deps;   // universal positions before it, increasing

  bool operator==(const SkolemDecl&) const = default;
};

struct SkolemizedFormula {
  std::vector<SkolemDecl> decls;
  std::vector<TraceVar> universal_vars;
  LtlNode body;                     // existential atoms retagged as Skolem targets
  std::vector<Quantifier> prefix;   // the original prefix, kept for positions and names

  std::size_t arity() const { return prefix.size(); }
  const SkolemDecl* decl_for(int exist_index) const;
};

/// exist index -> sorted universal indices preceding it. Throws NotClosed.
std::map<int, std::vector<int>> dependency_sets(const Formula& f);

/// Throws NotClosed when `f` fails validation.
SkolemizedFormula skolemize(const Formula& f);

/// Name used for the Skolem function of quantifier position i, e.g. "f2".
std::string skolem_name(int exist_index);

/// `exists f2(t1). forall t1. <body>` with retagged atoms printed as `p@f2`.
std::string pretty(const SkolemizedFormula& sk);

struct WitnessEntry {
  std::vector<Trace> universal_prefixes;  // one per dependency, in order
  Trace existential;
  std::vector<int> actions;               // actions that produced `existential`
};

/// Tabulated Skolem function f_i: universal prefixes -> existential prefix.
/// All prefixes inside an entry share one length; entries for different
/// lengths coexist so the table is prefix-closed when filled from rollouts.
class WitnessTable {
 public:
  WitnessTable() = default;
  WitnessTable(int exist_index, std::vector<int> deps) : exist_index_(exist_index), deps_(std::move(deps)) {}

  int exist_index() const { return exist_index_; }
  const std::vector<int>& deps() const { return deps_; }

  /// Throws LengthMismatch on unequal prefix lengths or a wrong number of
  /// universal prefixes, WitnessConflict when the key already maps elsewhere.
  void record(std::vector<Trace> universal_prefixes, Trace existential, std::vector<int> actions = {});

  /// `length` disambiguates constant Skolem functions, whose key is empty.
  const WitnessEntry* lookup(const std::vector<Trace>& universal_prefixes, std::size_t length) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, WitnessEntry>& entries() const { return entries_; }

  std::string to_json() const;
  static WitnessTable from_json(const std::string& text);

 private:
  int exist_index_ = 0;
  std::vector<int> deps_;
  std::map<std::string, WitnessEntry> entries_;
};

/// Canonical text key for a tuple of universal prefixes of the given length.
std::string witness_key(const std::vector<Trace>& universal_prefixes, std::size_t length);

/// assignment[k] is the trace for quantifier position k+1. True iff every
/// existential trace equals its witness' output on the assigned universal
/// traces. Throws MissingWitness when a table is absent, LengthMismatch when
/// assignment is not total or lengths differ.
bool check_consistency(const SkolemizedFormula& sk, const std::vector<Trace>& assignment,
                       const std::vector<WitnessTable>& witnesses);

}  // namespace hyperlearn
