#include "hyperlearn/formula.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hyperlearn {

LtlNode LtlNode::constant(bool value) {
  LtlNode n;
  n.op = value ? Op::True : Op::False;
  return n;
}

LtlNode LtlNode::make_atom(Atom a) {
  LtlNode n;
  n.op = Op::Atom;
  n.atom = std::move(a);
  return n;
}

LtlNode LtlNode::unary(Op op, LtlNode child) {
  LtlNode n;
  n.op = op;
  n.children.push_back(std::move(child));
  return n;
}

LtlNode LtlNode::binary(Op op, LtlNode lhs, LtlNode rhs) {
  LtlNode n;
  n.op = op;
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return n;
}

bool is_unary(Op op) {
  return op == Op::Not || op == Op::Next || op == Op::Eventually || op == Op::Always;
}

bool is_binary(Op op) {
  return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Until;
}

bool is_temporal(Op op) {
  return op == Op::Next || op == Op::Eventually || op == Op::Always || op == Op::Until;
}

namespace {

constexpr int kMaxNesting = 1200;

enum class Tok {
  Ident, Number, At, Dot, LParen, RParen, LBracket, RBracket,
  Bar, Amp, Bang, Arrow, Less, Greater, Equal, Minus, End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    const int l = line, cc = col;
    auto single = [&](Tok k) {
      out.push_back({k, std::string(1, c), l, cc});
      advance(1);
    };
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), l, cc});
      advance(j - i);
      continue;
    }
    if (digit(c)) {
      std::size_t j = i;
      while (j < s.size() && digit(s[j])) ++j;
      if (j + 1 < s.size() && s[j] == '.' && digit(s[j + 1])) {
        ++j;
        while (j < s.size() && digit(s[j])) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && digit(s[k])) {
          while (k < s.size() && digit(s[k])) ++k;
          j = k;
        }
      }
      out.push_back({Tok::Number, std::string(s.substr(i, j - i)), l, cc});
      advance(j - i);
      continue;
    }
    switch (c) {
      case '@': single(Tok::At); continue;
      case '.': single(Tok::Dot); continue;
      case '(': single(Tok::LParen); continue;
      case ')': single(Tok::RParen); continue;
      case '[': single(Tok::LBracket); continue;
      case ']': single(Tok::RBracket); continue;
      case '|': single(Tok::Bar); continue;
      case '&': single(Tok::Amp); continue;
      case '!': single(Tok::Bang); continue;
      case '<': single(Tok::Less); continue;
      case '>': single(Tok::Greater); continue;
      case '=': single(Tok::Equal); continue;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          out.push_back({Tok::Arrow, "->", l, cc});
          advance(2);
        } else {
          single(Tok::Minus);
        }
        continue;
      default: break;
    }
    std::string shown = (static_cast<unsigned char>(c) >= 0x20 && static_cast<unsigned char>(c) < 0x7f)
                            ? std::string(1, c)
                            : "byte " + std::to_string(static_cast<unsigned char>(c));
    throw SyntaxError(l, cc, "unexpected character '" + shown + "'");
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse() {
    Formula f;
    while (peek().kind == Tok::Ident && (peek().text == "forall" || peek().text == "exists")) {
      Quantifier q;
      q.kind = next().text == "forall" ? QuantKind::Forall : QuantKind::Exists;
      const Token& name = expect(Tok::Ident, "trace variable");
      if (is_keyword(name.text)) fail(name, "keyword '" + name.text + "' cannot name a trace variable");
      q.var.name = name.text;
      q.var.index = static_cast<int>(f.prefix.size()) + 1;
      expect(Tok::Dot, "'.'");
      f.prefix.push_back(std::move(q));
    }
    f.body = parse_implies(0);
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after formula");
    resolve(f);
    return f;
  }

 private:
  static bool is_keyword(const std::string& s) {
    return s == "forall" || s == "exists" || s == "true" || s == "false" || s == "X" || s == "F" ||
           s == "G" || s == "U";
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::End) ++pos_;
    return t;
  }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw SyntaxError(t.line, t.col, msg);
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) {
      fail(peek(), std::string("expected ") + what +
                       (peek().kind == Tok::End ? " before end of input" : ", found '" + peek().text + "'"));
    }
    return next();
  }
  bool at_ident(const char* word) const { return peek().kind == Tok::Ident && peek().text == word; }

  void enter(int depth) const {
    if (depth > kMaxNesting) fail(peek(), "formula nested too deeply");
  }

  LtlNode parse_implies(int d) {
    enter(d);
    LtlNode lhs = parse_or(d + 1);
    if (peek().kind == Tok::Arrow) {
      next();
      return LtlNode::binary(Op::Implies, std::move(lhs), parse_implies(d + 1));
    }
    return lhs;
  }

  LtlNode parse_or(int d) {
    LtlNode lhs = parse_and(d + 1);
    while (peek().kind == Tok::Bar) {
      next();
      lhs = LtlNode::binary(Op::Or, std::move(lhs), parse_and(d + 1));
    }
    return lhs;
  }

  LtlNode parse_and(int d) {
    LtlNode lhs = parse_until(d + 1);
    while (peek().kind == Tok::Amp) {
      next();
      lhs = LtlNode::binary(Op::And, std::move(lhs), parse_until(d + 1));
    }
    return lhs;
  }

  LtlNode parse_until(int d) {
    enter(d);
    LtlNode lhs = parse_unary(d + 1);
    if (at_ident("U")) {
      next();
      return LtlNode::binary(Op::Until, std::move(lhs), parse_until(d + 1));
    }
    return lhs;
  }

  LtlNode parse_unary(int d) {
    enter(d);
    if (peek().kind == Tok::Bang) {
      next();
      return LtlNode::unary(Op::Not, parse_unary(d + 1));
    }
    if (peek().kind == Tok::Ident) {
      const std::string& w = peek().text;
      Op op = Op::True;
      if (w == "X") op = Op::Next;
      else if (w == "F") op = Op::Eventually;
      else if (w == "G") op = Op::Always;
      if (op != Op::True) {
        next();
        return LtlNode::unary(op, parse_unary(d + 1));
      }
    }
    return parse_primary(d + 1);
  }

  LtlNode parse_primary(int d) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::LParen: {
        next();
        LtlNode inner = parse_implies(d + 1);
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::LBracket: return LtlNode::make_atom(parse_predicate());
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false") {
          next();
          return LtlNode::constant(t.text == "true");
        }
        if (is_keyword(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
        BoolProp bp;
        bp.prop = next().text;
        expect(Tok::At, "'@' after proposition");
        bp.trace = parse_var();
        return LtlNode::make_atom(std::move(bp));
      }
      case Tok::End: fail(t, "unexpected end of input");
      default: fail(t, "unexpected '" + t.text + "'");
    }
  }

  TraceRef parse_var() {
    const Token& v = expect(Tok::Ident, "trace variable");
    if (is_keyword(v.text)) fail(v, "keyword '" + v.text + "' cannot name a trace variable");
    TraceRef r;
    r.name = v.text;
    return r;
  }

  // valuation@var; returns the valuation name.
  std::string parse_ref(TraceRef& out) {
    const Token& v = expect(Tok::Ident, "valuation name");
    if (is_keyword(v.text)) fail(v, "keyword '" + v.text + "' cannot name a valuation");
    std::string name = v.text;
    expect(Tok::At, "'@' after valuation");
    out = parse_var();
    return name;
  }

  Predicate parse_predicate() {
    expect(Tok::LBracket, "'['");
    Predicate p;
    if (peek().kind == Tok::Bar) {
      next();
      TraceRef a, b;
      p.valuation = parse_ref(a);
      expect(Tok::Minus, "'-' inside |...|");
      const Token& second = peek();
      if (parse_ref(b) != p.valuation) fail(second, "both sides of a difference must use the same valuation");
      expect(Tok::Bar, "closing '|'");
      p.args = {a, b};
      p.abs_diff = true;
    } else {
      TraceRef a;
      p.valuation = parse_ref(a);
      p.args = {a};
      if (peek().kind == Tok::Minus) {
        next();
        TraceRef b;
        const Token& second = peek();
        if (parse_ref(b) != p.valuation) fail(second, "both sides of a difference must use the same valuation");
        p.args.push_back(b);
      }
    }
    const Token& cmp = next();
    switch (cmp.kind) {
      case Tok::Less: p.comparator = Comparator::LT; break;
      case Tok::Greater: p.comparator = Comparator::GT; break;
      case Tok::Equal: p.comparator = Comparator::EQ; break;
      default: fail(cmp, "expected '<', '>' or '='");
    }
    bool negative = false;
    if (peek().kind == Tok::Minus) {
      next();
      negative = true;
    }
    const Token& num = expect(Tok::Number, "numeric constant");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), value);
    if (ec != std::errc() || ptr != num.text.data() + num.text.size() || !std::isfinite(value)) {
      fail(num, "bad numeric constant '" + num.text + "'");
    }
    p.constant = negative ? -value : value;
    expect(Tok::RBracket, "']'");
    return p;
  }

  static void resolve(Formula& f) {
    std::map<std::string, int> index;
    for (const auto& q : f.prefix) index.emplace(q.var.name, q.var.index);
    auto fix = [&](TraceRef& r) {
      if (r.kind != TargetKind::Trace) return;
      auto it = index.find(r.name);
      r.index = it == index.end() ? 0 : it->second;
    };
    for_each_atom(f.body, [&](Atom& a) {
      if (auto* bp = std::get_if<BoolProp>(&a)) {
        fix(bp->trace);
      } else {
        for (auto& r : std::get<Predicate>(a).args) fix(r);
      }
    });
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

int precedence(Op op) {
  switch (op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Until: return 4;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always: return 5;
    default: return 6;
  }
}

std::string ref_text(const TraceRef& r) { return r.name; }

void unparse_into(const LtlNode& n, std::string& out);

void unparse_child(const LtlNode& c, int min_prec, std::string& out) {
  if (precedence(c.op) < min_prec) {
    out += '(';
    unparse_into(c, out);
    out += ')';
  } else {
    unparse_into(c, out);
  }
}

void unparse_atom(const Atom& a, std::string& out) {
  if (const auto* bp = std::get_if<BoolProp>(&a)) {
    out += bp->prop + "@" + ref_text(bp->trace);
    return;
  }
  const auto& p = std::get<Predicate>(a);
  out += "[ ";
  if (p.abs_diff) out += '|';
  for (std::size_t k = 0; k < p.args.size(); ++k) {
    if (k > 0) out += " - ";
    out += p.valuation + "@" + ref_text(p.args[k]);
  }
  if (p.abs_diff) out += '|';
  out += p.comparator == Comparator::LT ? " < " : p.comparator == Comparator::GT ? " > " : " = ";
  out += format_number(p.constant);
  out += " ]";
}

void unparse_into(const LtlNode& n, std::string& out) {
  switch (n.op) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Atom: unparse_atom(n.atom, out); return;
    case Op::Not:
      out += '!';
      unparse_child(n.children[0], 5, out);
      return;
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      out += n.op == Op::Next ? "X " : n.op == Op::Eventually ? "F " : "G ";
      unparse_child(n.children[0], 5, out);
      return;
    case Op::And:
    case Op::Or: {
      const int p = precedence(n.op);
      unparse_child(n.children[0], p, out);  // left-associative
      out += n.op == Op::And ? " & " : " | ";
      unparse_child(n.children[1], p + 1, out);
      return;
    }
    case Op::Implies:
    case Op::Until: {
      const int p = precedence(n.op);
      unparse_child(n.children[0], p + 1, out);  // right-associative
      out += n.op == Op::Implies ? " -> " : " U ";
      unparse_child(n.children[1], p, out);
      return;
    }
  }
}

}  // namespace

Formula parse_formula_unchecked(std::string_view text) { return Parser(lex(text)).parse(); }

Formula parse_formula(std::string_view text) {
  Formula f = parse_formula_unchecked(text);
  auto diags = validate(f);
  if (!diags.empty()) throw Error(diags.front().kind, diags.front().message);
  return f;
}

std::vector<Diagnostic> validate(const Formula& f) {
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  for (std::size_t k = 0; k < f.prefix.size(); ++k) {
    const auto& v = f.prefix[k].var;
    if (!seen.insert(v.name).second) {
      out.push_back({ErrorKind::DuplicateQuantifier, "trace variable '" + v.name + "' is quantified twice"});
    }
    if (v.index != static_cast<int>(k) + 1) {
      out.push_back({ErrorKind::NotClosed, "trace variable '" + v.name + "' has index " +
                                               std::to_string(v.index) + " but sits at position " +
                                               std::to_string(k + 1)});
    }
  }
  std::set<std::string> reported;
  auto check_ref = [&](const TraceRef& r) {
    if (r.kind == TargetKind::Skolem) {
      out.push_back({ErrorKind::NotClosed, "Skolem target '" + r.name + "' in an unskolemized formula"});
      return;
    }
    const bool bound = r.index >= 1 && r.index <= static_cast<int>(f.prefix.size()) &&
                       f.prefix[r.index - 1].var.name == r.name;
    if (!bound && reported.insert(r.name).second) {
      out.push_back({ErrorKind::UnboundTraceVar, "trace variable '" + r.name + "' is not quantified"});
    }
  };
  for_each_atom(f.body, [&](const Atom& a) {
    if (const auto* bp = std::get_if<BoolProp>(&a)) {
      check_ref(bp->trace);
      return;
    }
    const auto& p = std::get<Predicate>(a);
    if (p.args.empty() || p.args.size() > 2) {
      out.push_back({ErrorKind::ArityMismatch, "predicate over '" + p.valuation + "' needs 1 or 2 arguments"});
    }
    if (p.abs_diff && p.args.size() != 2) {
      out.push_back({ErrorKind::ArityMismatch, "|...| predicate over '" + p.valuation + "' needs 2 arguments"});
    }
    if (p.comparator == Comparator::EQ && p.constant != std::floor(p.constant)) {
      out.push_back({ErrorKind::ArityMismatch,
                     "'=' predicate over '" + p.valuation + "' needs an integer constant"});
    }
    for (const auto& r : p.args) check_ref(r);
  });
  return out;
}

std::string unparse(const LtlNode& node) {
  std::string out;
  unparse_into(node, out);
  return out;
}

std::string unparse(const Formula& f) {
  std::string out;
  for (const auto& q : f.prefix) {
    out += q.kind == QuantKind::Forall ? "forall " : "exists ";
    out += q.var.name + ". ";
  }
  unparse_into(f.body, out);
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ArtifactMissing, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Formula load_formula_file(const std::filesystem::path& path) { return parse_formula(read_text_file(path)); }

std::size_t count_atoms(const LtlNode& node) {
  std::size_t n = 0;
  for_each_atom(node, [&](const Atom&) { ++n; });
  return n;
}

std::size_t depth(const LtlNode& node) {
  std::size_t d = 0;
  for (const auto& c : node.children) d = std::max(d, depth(c));
  return d + 1;
}

bool is_boolean_only(const LtlNode& node) {
  bool ok = true;
  for_each_atom(node, [&](const Atom& a) {
    if (const auto* p = std::get_if<Predicate>(&a); p && p->comparator != Comparator::EQ) ok = false;
  });
  return ok;
}

}  // namespace hyperlearn
