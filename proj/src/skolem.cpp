#include "hyperlearn/skolem.hpp"

#include <json.hpp>

namespace hyperlearn {

namespace {

void require_closed(const Formula& f) {
  auto diags = validate(f);
  if (!diags.empty()) throw Error(ErrorKind::NotClosed, "formula is not closed: " + diags.front().message);
}

}  // namespace

const SkolemDecl* SkolemizedFormula::decl_for(int exist_index) const {
  for (const auto& d : decls)
    if (d.exist_index == exist_index) return &d;
  return nullptr;
}

std::map<int, std::vector<int>> dependency_sets(const Formula& f) {
  require_closed(f);
  std::map<int, std::vector<int>> out;
  std::vector<int> universals;
  for (const auto& q : f.prefix) {
    if (q.kind == QuantKind::Forall) {
      universals.push_back(q.var.index);
    } else {
      out[q.var.index] = universals;
    }
  }
  return out;
}

std::string skolem_name(int exist_index) { return "f" + std::to_string(exist_index); }

SkolemizedFormula skolemize(const Formula& f) {
  auto deps = dependency_sets(f);
  SkolemizedFormula sk;
  sk.prefix = f.prefix;
  for (auto& [idx, d] : deps) sk.decls.push_back({idx, d});
  for (const auto& q : f.prefix)
    if (q.kind == QuantKind::Forall) sk.universal_vars.push_back(q.var);
  sk.body = f.body;
  auto retag = [&](TraceRef& r) {
    if (f.prefix[r.index - 1].kind == QuantKind::Exists) {
      r.kind = TargetKind::Skolem;
      r.name = skolem_name(r.index);
    }
  };
  for_each_atom(sk.body, [&](Atom& a) {
    if (auto* bp = std::get_if<BoolProp>(&a)) {
      retag(bp->trace);
    } else {
      for (auto& r : std::get<Predicate>(a).args) retag(r);
    }
  });
  return sk;
}

std::string pretty(const SkolemizedFormula& sk) {
  std::string out;
  for (const auto& d : sk.decls) {
    out += "exists " + skolem_name(d.exist_index) + "(";
    for (std::size_t k = 0; k < d.deps.size(); ++k) {
      if (k > 0) out += ", ";
      out += sk.prefix[d.deps[k] - 1].var.name;
    }
    out += "). ";
  }
  for (const auto& v : sk.universal_vars) out += "forall " + v.name + ". ";
  out += unparse(sk.body);
  return out;
}

std::string witness_key(const std::vector<Trace>& universal_prefixes, std::size_t length) {
  std::string key = std::to_string(length) + "\n";
  for (std::size_t k = 0; k < universal_prefixes.size(); ++k) {
    if (k > 0) key += "---\n";
    key += format_trace(universal_prefixes[k]);
  }
  return key;
}

void WitnessTable::record(std::vector<Trace> universal_prefixes, Trace existential, std::vector<int> actions) {
  if (universal_prefixes.size() != deps_.size()) {
    throw Error(ErrorKind::LengthMismatch, "witness for " + skolem_name(exist_index_) + " expects " +
                                               std::to_string(deps_.size()) + " universal prefixes");
  }
  for (const auto& u : universal_prefixes) {
    if (u.size() != existential.size()) {
      throw Error(ErrorKind::LengthMismatch, "witness prefixes of unequal length");
    }
  }
  std::string key = witness_key(universal_prefixes, existential.size());
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    if (it->second.existential != existential) {
      throw Error(ErrorKind::WitnessConflict,
                  "witness " + skolem_name(exist_index_) + " already maps this prefix to another trace");
    }
    return;
  }
  entries_.emplace(std::move(key), WitnessEntry{std::move(universal_prefixes), std::move(existential),
                                                std::move(actions)});
}

const WitnessEntry* WitnessTable::lookup(const std::vector<Trace>& universal_prefixes,
                                         std::size_t length) const {
  auto it = entries_.find(witness_key(universal_prefixes, length));
  return it == entries_.end() ? nullptr : &it->second;
}

std::string WitnessTable::to_json() const {
  nlohmann::json j;
  j["exist_index"] = exist_index_;
  j["deps"] = deps_;
  auto arr = nlohmann::json::array();
  for (const auto& [key, e] : entries_) {
    nlohmann::json je;
    auto us = nlohmann::json::array();
    for (const auto& u : e.universal_prefixes) us.push_back(format_trace(u));
    je["universal"] = us;
    je["existential"] = format_trace(e.existential);
    je["actions"] = e.actions;
    arr.push_back(std::move(je));
  }
  j["entries"] = std::move(arr);
  return j.dump(1);
}

WitnessTable WitnessTable::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    WitnessTable t(j.at("exist_index").get<int>(), j.at("deps").get<std::vector<int>>());
    for (const auto& je : j.at("entries")) {
      std::vector<Trace> us;
      for (const auto& u : je.at("universal")) us.push_back(parse_trace(u.get<std::string>()));
      t.record(std::move(us), parse_trace(je.at("existential").get<std::string>()),
               je.at("actions").get<std::vector<int>>());
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed witness table: ") + e.what());
  }
}

bool check_consistency(const SkolemizedFormula& sk, const std::vector<Trace>& assignment,
                       const std::vector<WitnessTable>& witnesses) {
  if (assignment.size() != sk.arity()) {
    throw Error(ErrorKind::LengthMismatch, "assignment covers " + std::to_string(assignment.size()) +
                                               " of " + std::to_string(sk.arity()) + " quantifiers");
  }
  for (const auto& t : assignment) {
    if (t.size() != assignment.front().size()) throw Error(ErrorKind::LengthMismatch, "assigned traces differ in length");
  }
  for (const auto& d : sk.decls) {
    const WitnessTable* table = nullptr;
    for (const auto& w : witnesses)
      if (w.exist_index() == d.exist_index) table = &w;
    if (!table) throw Error(ErrorKind::MissingWitness, "no witness table for " + skolem_name(d.exist_index));
    std::vector<Trace> args;
    for (int u : d.deps) args.push_back(assignment[u - 1]);
    const WitnessEntry* e = table->lookup(args, assignment.front().size());
    if (!e || e->existential != assignment[d.exist_index - 1]) return false;
  }
  return true;
}

}  // namespace hyperlearn
