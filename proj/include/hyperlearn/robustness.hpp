#pragma once

#include <cstddef>
#include <vector>

#include "hyperlearn/formula.hpp"
#include "hyperlearn/kernels.hpp"
#include "hyperlearn/skolem.hpp"
#include "hyperlearn/trace.hpp"

namespace hyperlearn {

struct RobustnessConfig {
  double rho_max = 100.0;

  double rho_min() const { return -rho_max; }
};

enum class Verdict { Satisfied, Violated, Borderline };

const char* to_string(Verdict v);

/// Dynamic-programming robustness over a growing zipped trace. Atom margins
/// are cached per appended column; operator rows are rebuilt per query with
/// the row kernels. Slot k of a column feeds atoms whose target index is k+1,
/// whether that target is a quantified trace or a Skolem image.
class RowEvaluator {
 public:
  RowEvaluator(const LtlNode& body, std::size_t arity, RobustnessConfig cfg = {},
               const kernels::KernelTable* k = nullptr);

  /// Throws ArityMismatch on a wrong column width, UnknownValuation when a
  /// predicate's valuation is missing.
  void append(const std::vector<Label>& column);
  void clear();
  std::size_t size() const { return length_; }

  /// Robustness of the body at `begin` over the window [begin, end).
  /// Throws WindowOutOfRange unless begin <= end <= size().
  double eval(std::size_t begin, std::size_t end);
  double eval() { return eval(0, length_); }

  /// Position-0 value of every temporal node over the whole prefix, plus the
  /// running minimum of each Until's left operand. Together with the current
  /// state this makes prefix robustness a Markov reward.
  std::vector<double> monitor_signature();

  const RobustnessConfig& config() const { return cfg_; }

 private:
  struct Node {
    Op op;
    int lhs = -1;
    int rhs = -1;
    int atom = -1;  // index into atoms_ for Op::Atom
  };
  struct AtomSpec {
    Atom atom;
    std::size_t slot_a = 0;
    std::size_t slot_b = 0;
    std::vector<double> margins;  // unclamped, one per position
  };

  int compile(const LtlNode& n);
  double margin(const AtomSpec& a, const std::vector<Label>& column) const;

  RobustnessConfig cfg_;
  const kernels::KernelTable* k_;
  std::size_t arity_;
  std::vector<Node> nodes_;  // post-order, root last
  std::vector<AtomSpec> atoms_;
  std::vector<std::vector<double>> rows_;
  std::size_t length_ = 0;
};

/// Robustness of `body` over the window [begin, end) of `z`.
double eval_ltl(const ZippedTrace& z, std::size_t begin, std::size_t end, const LtlNode& body,
                const RobustnessConfig& cfg = {});
double eval_ltl(const ZippedTrace& z, const LtlNode& body, const RobustnessConfig& cfg = {});

/// assignment[k] is the trace for quantifier position k+1 (universal or
/// existential; existential positions hold the Skolem images).
double eval_hyper(const std::vector<Trace>& assignment, const SkolemizedFormula& sk,
                  const RobustnessConfig& cfg = {});

/// Finite-trace Boolean satisfaction by explicit quantifier recursion over
/// the trace set. Reference oracle, exponential in the prefix length.
bool boolean_sat(const std::vector<Trace>& traces, const Formula& f);

/// Boolean satisfaction of a quantifier-free body at position i under a fixed
/// assignment (assignment[k] for quantifier position k+1).
bool boolean_holds(const std::vector<Trace>& assignment, const LtlNode& body, std::size_t i = 0);

Verdict sat_verdict(double rho, const RobustnessConfig& cfg, bool boolean_only);
Verdict sat_verdict(double rho, const RobustnessConfig& cfg, const LtlNode& body);

}  // namespace hyperlearn
