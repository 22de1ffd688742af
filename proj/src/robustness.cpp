#include "hyperlearn/robustness.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace hyperlearn {

namespace {

inline double pick_min(double a, double b) { return a < b ? a : b; }
inline double pick_max(double a, double b) { return a > b ? a : b; }

std::size_t slot_of(const TraceRef& r, std::size_t arity) {
  if (r.index < 1 || static_cast<std::size_t>(r.index) > arity) {
    throw Error(ErrorKind::ArityMismatch, "atom target '" + r.name + "' has no slot among " +
                                              std::to_string(arity) + " traces");
  }
  return static_cast<std::size_t>(r.index) - 1;
}

double predicate_term(const Predicate& p, const std::vector<Label>& column, std::size_t a, std::size_t b) {
  double v = column[a].value(p.valuation);
  if (p.args.size() == 2) {
    v -= column[b].value(p.valuation);
    if (p.abs_diff && v < 0) v = -v;
  }
  return v;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "Satisfied";
    case Verdict::Violated: return "Violated";
    case Verdict::Borderline: return "Borderline";
  }
  return "?";
}

RowEvaluator::RowEvaluator(const LtlNode& body, std::size_t arity, RobustnessConfig cfg,
                           const kernels::KernelTable* k)
    : cfg_(cfg), k_(k ? k : &kernels::active()), arity_(arity) {
  compile(body);
  rows_.resize(nodes_.size());
}

int RowEvaluator::compile(const LtlNode& n) {
  Node node{n.op};
  if (n.op == Op::Atom) {
    AtomSpec spec;
    spec.atom = n.atom;
    if (const auto* bp = std::get_if<BoolProp>(&n.atom)) {
      spec.slot_a = slot_of(bp->trace, arity_);
    } else {
      const auto& p = std::get<Predicate>(n.atom);
      if (p.args.empty() || p.args.size() > 2) throw Error(ErrorKind::ArityMismatch, "predicate arity");
      spec.slot_a = slot_of(p.args[0], arity_);
      spec.slot_b = p.args.size() == 2 ? slot_of(p.args[1], arity_) : spec.slot_a;
    }
    node.atom = static_cast<int>(atoms_.size());
    atoms_.push_back(std::move(spec));
  } else {
    if (!n.children.empty()) node.lhs = compile(n.children[0]);
    if (n.children.size() > 1) node.rhs = compile(n.children[1]);
  }
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

double RowEvaluator::margin(const AtomSpec& a, const std::vector<Label>& column) const {
  if (const auto* bp = std::get_if<BoolProp>(&a.atom)) {
    return column[a.slot_a].has(bp->prop) ? cfg_.rho_max : cfg_.rho_min();
  }
  const auto& p = std::get<Predicate>(a.atom);
  const double v = predicate_term(p, column, a.slot_a, a.slot_b);
  switch (p.comparator) {
    case Comparator::LT: return p.constant - v;
    case Comparator::GT: return v - p.constant;
    case Comparator::EQ: return v == p.constant ? cfg_.rho_max : cfg_.rho_min();
  }
  return cfg_.rho_min();
}

void RowEvaluator::append(const std::vector<Label>& column) {
  if (column.size() != arity_) {
    throw Error(ErrorKind::ArityMismatch, "column of width " + std::to_string(column.size()) + ", expected " +
                                              std::to_string(arity_));
  }
  // Compute every margin before committing so a failure leaves state intact.
  std::vector<double> fresh(atoms_.size());
  for (std::size_t a = 0; a < atoms_.size(); ++a) fresh[a] = margin(atoms_[a], column);
  for (std::size_t a = 0; a < atoms_.size(); ++a) atoms_[a].margins.push_back(fresh[a]);
  ++length_;
}

void RowEvaluator::clear() {
  for (auto& a : atoms_) a.margins.clear();
  length_ = 0;
}

double RowEvaluator::eval(std::size_t begin, std::size_t end) {
  if (begin > end || end > length_) {
    throw Error(ErrorKind::WindowOutOfRange, "window [" + std::to_string(begin) + ", " + std::to_string(end) +
                                                 ") outside a trace of length " + std::to_string(length_));
  }
  const double lo = cfg_.rho_min(), hi = cfg_.rho_max;
  if (begin == end) return lo;
  const std::size_t len = end - begin;
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    const Node& node = nodes_[n];
    auto& out = rows_[n];
    out.resize(len);
    const double* l = node.lhs >= 0 ? rows_[node.lhs].data() : nullptr;
    const double* r = node.rhs >= 0 ? rows_[node.rhs].data() : nullptr;
    switch (node.op) {
      case Op::True: std::fill(out.begin(), out.end(), hi); break;
      case Op::False: std::fill(out.begin(), out.end(), lo); break;
      case Op::Atom: k_->clamp(atoms_[node.atom].margins.data() + begin, lo, hi, out.data(), len); break;
      case Op::Not: k_->neg(l, out.data(), len); break;
      case Op::And: k_->min(l, r, out.data(), len); break;
      case Op::Or: k_->max(l, r, out.data(), len); break;
      case Op::Implies: k_->implies(l, r, out.data(), len); break;
      case Op::Next:
        std::copy(l + 1, l + len, out.begin());
        out[len - 1] = lo;
        break;
      case Op::Eventually:
        out[len - 1] = l[len - 1];
        for (std::size_t i = len - 1; i-- > 0;) out[i] = pick_max(l[i], out[i + 1]);
        break;
      case Op::Always:
        out[len - 1] = l[len - 1];
        for (std::size_t i = len - 1; i-- > 0;) out[i] = pick_min(l[i], out[i + 1]);
        break;
      case Op::Until: {
        double next = lo;
        for (std::size_t i = len; i-- > 0;) {
          next = pick_max(r[i], pick_min(l[i], next));
          out[i] = next;
        }
        break;
      }
    }
  }
  return rows_.back()[0];
}

std::vector<double> RowEvaluator::monitor_signature() {
  std::vector<double> sig;
  if (length_ == 0) return sig;
  eval(0, length_);
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    if (!is_temporal(nodes_[n].op)) continue;
    sig.push_back(rows_[n][0]);
    if (nodes_[n].op == Op::Until) {
      const auto& l = rows_[nodes_[n].lhs];
      double m = l[0];
      for (std::size_t i = 1; i < length_; ++i) m = pick_min(m, l[i]);
      sig.push_back(m);
    }
  }
  return sig;
}

double eval_ltl(const ZippedTrace& z, std::size_t begin, std::size_t end, const LtlNode& body,
                const RobustnessConfig& cfg) {
  if (begin > end || end > z.size()) {
    throw Error(ErrorKind::WindowOutOfRange, "window [" + std::to_string(begin) + ", " + std::to_string(end) +
                                                 ") outside a trace of length " + std::to_string(z.size()));
  }
  RowEvaluator ev(body, z.arity, cfg);
  for (std::size_t i = 0; i < end; ++i) ev.append(z.columns[i]);
  return ev.eval(begin, end);
}

double eval_ltl(const ZippedTrace& z, const LtlNode& body, const RobustnessConfig& cfg) {
  return eval_ltl(z, 0, z.size(), body, cfg);
}

double eval_hyper(const std::vector<Trace>& assignment, const SkolemizedFormula& sk, const RobustnessConfig& cfg) {
  if (assignment.size() != sk.arity()) {
    throw Error(ErrorKind::ArityMismatch, "assignment of " + std::to_string(assignment.size()) +
                                              " traces for a formula of arity " + std::to_string(sk.arity()));
  }
  std::vector<std::pair<int, Trace>> exist, univ;
  for (std::size_t k = 0; k < sk.prefix.size(); ++k) {
    auto& bucket = sk.prefix[k].kind == QuantKind::Exists ? exist : univ;
    bucket.emplace_back(sk.prefix[k].var.index, assignment[k]);
  }
  return eval_ltl(zip_traces(ordered_union(exist, univ)), sk.body, cfg);
}

namespace {

bool atom_holds(const Atom& atom, const std::vector<Trace>& as, std::size_t i) {
  if (const auto* bp = std::get_if<BoolProp>(&atom)) {
    const Trace& t = as.at(static_cast<std::size_t>(bp->trace.index) - 1);
    return t[i].has(bp->prop);
  }
  const auto& p = std::get<Predicate>(atom);
  std::vector<Label> column;
  std::size_t a = 0, b = 0;
  column.push_back(as.at(static_cast<std::size_t>(p.args[0].index) - 1)[i]);
  if (p.args.size() == 2) {
    column.push_back(as.at(static_cast<std::size_t>(p.args[1].index) - 1)[i]);
    b = 1;
  }
  const double v = predicate_term(p, column, a, b);
  switch (p.comparator) {
    case Comparator::LT: return v < p.constant;
    case Comparator::GT: return v > p.constant;
    case Comparator::EQ: return v == p.constant;
  }
  return false;
}

bool holds(const std::vector<Trace>& as, const LtlNode& n, std::size_t i, std::size_t m) {
  if (i >= m) return false;
  switch (n.op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return atom_holds(n.atom, as, i);
    case Op::Not: return !holds(as, n.children[0], i, m);
    case Op::And: return holds(as, n.children[0], i, m) && holds(as, n.children[1], i, m);
    case Op::Or: return holds(as, n.children[0], i, m) || holds(as, n.children[1], i, m);
    case Op::Implies: return !holds(as, n.children[0], i, m) || holds(as, n.children[1], i, m);
    case Op::Next:
      // every assigned trace must have a position i+1
      for (const auto& t : as)
        if (t.size() < i + 2) return false;
      return holds(as, n.children[0], i + 1, m);
    case Op::Eventually:
      for (std::size_t j = i; j < m; ++j)
        if (holds(as, n.children[0], j, m)) return true;
      return false;
    case Op::Always:
      for (std::size_t j = i; j < m; ++j)
        if (!holds(as, n.children[0], j, m)) return false;
      return true;
    case Op::Until:
      for (std::size_t j = i; j < m; ++j) {
        if (holds(as, n.children[1], j, m)) return true;
        if (!holds(as, n.children[0], j, m)) return false;
      }
      return false;
  }
  return false;
}

bool quantify(const std::vector<Trace>& traces, const Formula& f, std::vector<Trace>& as) {
  if (as.size() == f.prefix.size()) return boolean_holds(as, f.body, 0);
  const bool exists = f.prefix[as.size()].kind == QuantKind::Exists;
  for (const auto& t : traces) {
    as.push_back(t);
    const bool r = quantify(traces, f, as);
    as.pop_back();
    if (r == exists) return exists;
  }
  return !exists;
}

}  // namespace

bool boolean_holds(const std::vector<Trace>& assignment, const LtlNode& body, std::size_t i) {
  std::size_t m = std::numeric_limits<std::size_t>::max();
  for (const auto& t : assignment) m = std::min(m, t.size());
  if (assignment.empty()) m = 0;
  return holds(assignment, body, i, m);
}

bool boolean_sat(const std::vector<Trace>& traces, const Formula& f) {
  std::vector<Trace> as;
  return quantify(traces, f, as);
}

Verdict sat_verdict(double rho, const RobustnessConfig& cfg, bool boolean_only) {
  if (boolean_only) return rho == cfg.rho_max ? Verdict::Satisfied : Verdict::Violated;
  if (rho > 0) return Verdict::Satisfied;
  if (rho < 0) return Verdict::Violated;
  return Verdict::Borderline;
}

Verdict sat_verdict(double rho, const RobustnessConfig& cfg, const LtlNode& body) {
  return sat_verdict(rho, cfg, is_boolean_only(body));
}

}  // namespace hyperlearn
