#include "hyperlearn/worlds.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <sstream>

#include "hyperlearn/error.hpp"
#include "hyperlearn/formula.hpp"

namespace hyperlearn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

bool is_legend(std::string_view line) {
  line = trim(line);
  if (line.size() < 2 || line[0] < 'a' || line[0] > 'z') return false;
  return trim(line.substr(1)).substr(0, 1) == "=";
}

int parse_agent(std::string_view tok, std::string_view what) {
  std::string s(tok.substr(what.size() + 1));
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || v < 1 || v > 9) {
    throw Error(ErrorKind::UnknownGlyph, "bad agent number in legend token '" + std::string(tok) + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

bool GridMap::has_tag(Cell c, const std::string& tag) const {
  auto it = special.find(c);
  return it != special.end() && it->second.count(tag) != 0;
}

std::vector<Cell> GridMap::cells_with(const std::string& tag) const {
  std::vector<Cell> out;
  for (const auto& [c, tags] : special)
    if (tags.count(tag)) out.push_back(c);
  return out;
}

GridMap load_map(std::string_view text) {
  std::vector<std::string_view> rows;
  std::vector<std::string_view> legend;
  for (auto raw : lines_of(text)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == ';') continue;
    if (is_legend(line)) {
      legend.push_back(line);
    } else {
      rows.push_back(line);
    }
  }
  if (rows.empty()) throw Error(ErrorKind::NonRectangular, "map has no grid rows");
  GridMap m;
  m.width = static_cast<int>(rows.front().size());
  m.height = static_cast<int>(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != m.width) {
      throw Error(ErrorKind::NonRectangular, "row " + std::to_string(r + 1) + " has width " +
                                                 std::to_string(rows[r].size()) + ", expected " +
                                                 std::to_string(m.width));
    }
    const int y = m.height - 1 - static_cast<int>(r);
    for (int x = 0; x < m.width; ++x) {
      const char g = rows[r][x];
      const Cell c{x, y};
      if (g == '#') {
        m.walls.insert(c);
      } else if (g == '.') {
      } else if (g >= '1' && g <= '9') {
        if (!m.starts.emplace(g - '0', c).second) {
          throw Error(ErrorKind::UnknownGlyph, std::string("start ") + g + " appears twice");
        }
      } else if (g >= 'a' && g <= 'z') {
        m.letters[c] = g;
      } else {
        throw Error(ErrorKind::UnknownGlyph, std::string("unknown map glyph '") + g + "' at row " +
                                                 std::to_string(r + 1));
      }
    }
  }
  for (auto line : legend) {
    const char letter = line[0];
    std::vector<Cell> cells;
    for (const auto& [c, l] : m.letters)
      if (l == letter) cells.push_back(c);
    if (cells.empty()) throw Error(ErrorKind::UnknownGlyph, std::string("legend letter '") + letter + "' not on the map");
    std::string_view rest = trim(line.substr(line.find('=') + 1));
    std::istringstream toks{std::string(rest)};
    std::string tok;
    while (toks >> tok) {
      if (tok.rfind("goal:", 0) == 0) {
        m.goals[parse_agent(tok, "goal")] = cells.front();
      } else if (tok.rfind("start:", 0) == 0) {
        m.starts[parse_agent(tok, "start")] = cells.front();
      } else if (tok == "fire" || tok == "victim" || tok == "resource") {
        for (const auto& c : cells) m.special[c].insert(tok);
      } else {
        throw Error(ErrorKind::UnknownGlyph, "unknown legend token '" + tok + "'");
      }
    }
  }
  if (m.starts.empty()) throw Error(ErrorKind::MissingStart, "map has no start cell");
  return m;
}

GridMap load_map_file(const std::filesystem::path& path) { return load_map(read_text_file(path)); }

Cell apply_move(const GridMap& m, Cell c, int action) {
  Cell n = c;
  switch (static_cast<Move>(action)) {
    case Move::Stay: break;
    case Move::Up: ++n.y; break;
    case Move::Down: --n.y; break;
    case Move::Left: --n.x; break;
    case Move::Right: ++n.x; break;
  }
  return m.open(n) ? n : c;
}

// ---------------------------------------------------------------- grid world

GridWorld::GridWorld(GridMap map, std::size_t agents, int beta)
    : Environment(beta), map_(std::move(map)), agents_(agents) {
  for (std::size_t k = 1; k <= agents_; ++k) {
    if (!map_.starts.count(static_cast<int>(k))) {
      throw Error(ErrorKind::ArityMismatch, "map has no start for agent " + std::to_string(k));
    }
  }
  registry_.add("x", [](const AgentState& a) { return static_cast<double>(a.fields[0]); });
  registry_.add("y", [](const AgentState& a) { return static_cast<double>(a.fields[1]); });
  const int w = map_.width;
  registry_.add("cell", [w](const AgentState& a) { return static_cast<double>(a.fields[1] * w + a.fields[0]); });
}

std::vector<std::string> GridWorld::action_names() const { return {"stay", "up", "down", "left", "right"}; }

JointState GridWorld::reset(std::uint64_t) const {
  JointState s;
  for (std::size_t k = 1; k <= agents_; ++k) {
    const Cell c = map_.starts.at(static_cast<int>(k));
    s.per_trace.push_back({{c.x, c.y}});
  }
  return s;
}

JointState GridWorld::transition(const JointState& s, const JointAction& a) const {
  JointState n = s;
  for (std::size_t k = 0; k < agents_; ++k) {
    const Cell c = apply_move(map_, position(s.per_trace[k]), a.per_trace[k]);
    n.per_trace[k].fields[0] = c.x;
    n.per_trace[k].fields[1] = c.y;
  }
  return n;
}

bool GridWorld::collision(const JointState& s) const {
  for (std::size_t i = 0; i < s.per_trace.size(); ++i)
    for (std::size_t j = i + 1; j < s.per_trace.size(); ++j)
      if (position(s.per_trace[i]) == position(s.per_trace[j])) return true;
  return false;
}

bool GridWorld::on_goal(const JointState& s, std::size_t slot) const {
  auto it = map_.goals.find(static_cast<int>(slot) + 1);
  return it != map_.goals.end() && position(s.per_trace[slot]) == it->second;
}

std::vector<Label> GridWorld::label_of(const JointState& s) const {
  std::vector<Label> out(agents_);
  for (std::size_t k = 0; k < agents_; ++k) {
    const Cell c = position(s.per_trace[k]);
    Label& l = out[k];
    if (auto it = map_.letters.find(c); it != map_.letters.end()) l.props.insert(std::string(1, it->second));
    for (const auto& [agent, g] : map_.goals) {
      if (g == c) {
        l.props.insert("g" + std::to_string(agent));
        if (agent == static_cast<int>(k) + 1) l.props.insert("goal");
      }
    }
    for (std::size_t j = 0; j < agents_; ++j) {
      if (j != k && position(s.per_trace[j]) == c) l.props.insert("col");
    }
    registry_.fill(s.per_trace[k], l);
    if (auto it = map_.goals.find(static_cast<int>(k) + 1); it != map_.goals.end()) {
      l.valuations["goal_dist"] = std::abs(c.x - it->second.x) + std::abs(c.y - it->second.y);
    }
  }
  return out;
}

std::vector<float> GridWorld::features(const JointState& s) const {
  std::vector<float> f;
  for (const auto& a : s.per_trace) {
    f.push_back(static_cast<float>(a.fields[0]) / static_cast<float>(std::max(1, map_.width - 1)));
    f.push_back(static_cast<float>(a.fields[1]) / static_cast<float>(std::max(1, map_.height - 1)));
  }
  f.push_back(static_cast<float>(s.step_count) / static_cast<float>(beta()));
  return f;
}

// ------------------------------------------------------------------ wildfire

const char* WildfireWorld::map_text() {
  return "ghi\n"
         "def\n"
         "abc\n"
         "a = start:1 start:2\n"
         "c = fire\n"
         "f = fire victim\n"
         "g = victim\n"
         "i = fire\n";
}

Cell WildfireWorld::cell_of(char letter) {
  const int k = letter - 'a';
  return {k % 3, k / 3};
}

WildfireWorld::WildfireWorld(int beta) : GridWorld(load_map(map_text()), 2, beta) {
  fires_ = map_.cells_with("fire");
  registry_.add("loc", [](const AgentState& a) { return static_cast<double>(a.fields[1] * 3 + a.fields[0]); });
}

JointState WildfireWorld::reset(std::uint64_t seed) const {
  JointState s = GridWorld::reset(seed);
  s.shared.assign(1, (std::int64_t{1} << fires_.size()) - 1);  // bit k set while fire k burns
  return s;
}

JointState WildfireWorld::transition(const JointState& s, const JointAction& a) const {
  JointState n = GridWorld::transition(s, a);
  const Cell drone1 = position(n.per_trace[0]);
  for (std::size_t k = 0; k < fires_.size(); ++k)
    if (fires_[k] == drone1) n.shared[0] &= ~(std::int64_t{1} << k);
  return n;
}

std::vector<Label> WildfireWorld::label_of(const JointState& s) const {
  std::vector<Label> out(agents_);
  for (std::size_t k = 0; k < agents_; ++k) {
    const Cell c = position(s.per_trace[k]);
    Label& l = out[k];
    l.props.insert(std::string(1, map_.letters.count(c) ? map_.letters.at(c) : static_cast<char>('a' + c.y * 3 + c.x)));
    if (map_.has_tag(c, "victim")) l.props.insert("victim");
    for (std::size_t f = 0; f < fires_.size(); ++f) {
      if (fires_[f] == c) l.props.insert(((s.shared[0] >> f) & 1) ? "fire" : "extinguished");
    }
    registry_.fill(s.per_trace[k], l);
  }
  return out;
}

std::vector<float> WildfireWorld::features(const JointState& s) const {
  std::vector<float> f = GridWorld::features(s);
  for (std::size_t k = 0; k < fires_.size(); ++k) f.push_back(static_cast<float>((s.shared[0] >> k) & 1));
  return f;
}

// ------------------------------------------------------------------ resource

ResourceWorld::ResourceWorld(GridMap map, std::size_t agents, int beta, int delta)
    : GridWorld(std::move(map), agents, beta), delta_(delta) {
  auto cells = map_.cells_with("resource");
  if (cells.size() != 1) {
    throw Error(ErrorKind::Config, "resource map needs exactly one resource cell, found " + std::to_string(cells.size()));
  }
  if (delta_ <= 0) throw Error(ErrorKind::Config, "delta must be positive");
  resource_ = cells.front();
  registry_.add("energy", [](const AgentState& a) { return static_cast<double>(a.fields[2]); });
}

JointState ResourceWorld::reset(std::uint64_t seed) const {
  JointState s = GridWorld::reset(seed);
  for (auto& a : s.per_trace) a.fields.insert(a.fields.end(), {0, 0});  // energy, arrived
  return s;
}

JointState ResourceWorld::transition(const JointState& s, const JointAction& a) const {
  JointState n = GridWorld::transition(s, a);
  for (std::size_t k = 0; k < agents_; ++k) {
    const bool arrived = position(n.per_trace[k]) == resource_ && position(s.per_trace[k]) != resource_;
    n.per_trace[k].fields[3] = arrived ? 1 : 0;
    if (arrived) ++n.per_trace[k].fields[2];
  }
  return n;
}

std::vector<Label> ResourceWorld::label_of(const JointState& s) const {
  std::vector<Label> out(agents_);
  for (std::size_t k = 0; k < agents_; ++k) {
    Label& l = out[k];
    const Cell c = position(s.per_trace[k]);
    if (s.per_trace[k].fields[3]) l.props.insert("res");
    if (c == resource_) l.props.insert("on_res");
    registry_.fill(s.per_trace[k], l);
  }
  return out;
}

std::string ResourceWorld::observation_key(const JointState& s, int slot) const {
  // Energy is left out on purpose: it only ever grows, and the fairness
  // objective depends on it through the arrival pattern, not its magnitude.
  std::string key;
  auto put = [&](const AgentState& a) {
    key += std::to_string(a.fields[0]) + "," + std::to_string(a.fields[1]) + ";";
  };
  if (slot >= 0) {
    put(s.per_trace.at(static_cast<std::size_t>(slot)));
  } else {
    for (const auto& a : s.per_trace) put(a);
  }
  return key;
}

std::vector<float> ResourceWorld::features(const JointState& s) const {
  std::vector<float> f = GridWorld::features(s);
  for (const auto& a : s.per_trace) f.push_back(static_cast<float>(a.fields[2]) / static_cast<float>(beta()));
  return f;
}

// ----------------------------------------------------------------------- pcp

DominoSet parse_dominoes(std::string_view text) {
  DominoSet d;
  int line_no = 0;
  for (auto raw : lines_of(text)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == ';') continue;
    const std::size_t bar = line.find('|');
    if (bar == std::string_view::npos) {
      throw Error(ErrorKind::InvalidDomino, "line " + std::to_string(line_no) + ": expected top|bottom");
    }
    std::string top(trim(line.substr(0, bar))), bot(trim(line.substr(bar + 1)));
    auto valid = [](const std::string& w) {
      return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    };
    if (!valid(top) || !valid(bot)) {
      throw Error(ErrorKind::InvalidDomino, "line " + std::to_string(line_no) +
                                                ": domino words must be nonempty lowercase letters");
    }
    d.dominoes.emplace_back(std::move(top), std::move(bot));
  }
  if (d.dominoes.empty()) throw Error(ErrorKind::InvalidDomino, "domino set is empty");
  return d;
}

DominoSet load_dominoes_file(const std::filesystem::path& path) { return parse_dominoes(read_text_file(path)); }

std::pair<std::string, std::string> concat_words(const DominoSet& d, const std::vector<int>& indices) {
  std::string top, bot;
  for (int i : indices) {
    if (i < 1 || static_cast<std::size_t>(i) > d.size()) {
      throw Error(ErrorKind::InvalidDomino, "domino index " + std::to_string(i) + " out of range");
    }
    top += d.dominoes[i - 1].first;
    bot += d.dominoes[i - 1].second;
  }
  return {top, bot};
}

bool is_match(const DominoSet& d, const std::vector<int>& indices) {
  if (indices.empty()) return false;
  auto [top, bot] = concat_words(d, indices);
  return top == bot;
}

std::optional<std::vector<int>> pcp_oracle(const DominoSet& d, int max_len) {
  if (max_len > 12) throw Error(ErrorKind::BoundTooLarge, "PCP search bound " + std::to_string(max_len) + " exceeds 12");
  if (d.size() == 0) return std::nullopt;
  // Search state: the unmatched overhang and which side carries it. Two
  // sequences reaching the same overhang have identical futures, so only the
  // first (shortest) one is kept.
  struct Node {
    bool top_ahead;
    std::string overhang;
    std::vector<int> seq;
  };
  std::deque<Node> frontier{{true, "", {}}};
  std::set<std::pair<bool, std::string>> seen;
  while (!frontier.empty()) {
    Node cur = std::move(frontier.front());
    frontier.pop_front();
    if (static_cast<int>(cur.seq.size()) >= max_len) continue;
    for (std::size_t i = 0; i < d.size(); ++i) {
      std::string top = cur.top_ahead ? cur.overhang : "";
      std::string bot = cur.top_ahead ? "" : cur.overhang;
      top += d.dominoes[i].first;
      bot += d.dominoes[i].second;
      const std::size_t common = std::min(top.size(), bot.size());
      if (top.compare(0, common, bot, 0, common) != 0) continue;
      Node next{top.size() >= bot.size(), top.size() >= bot.size() ? top.substr(common) : bot.substr(common),
                cur.seq};
      next.seq.push_back(static_cast<int>(i) + 1);
      if (next.overhang.empty()) return next.seq;
      if (seen.insert({next.top_ahead, next.overhang}).second) frontier.push_back(std::move(next));
    }
  }
  return std::nullopt;
}

PcpWorld::PcpWorld(DominoSet dominoes, int max_dominoes, std::size_t agents)
    : Environment(max_dominoes + 1), dominoes_(std::move(dominoes)), max_dominoes_(max_dominoes), agents_(agents) {
  if (dominoes_.size() == 0) throw Error(ErrorKind::InvalidDomino, "domino set is empty");
  if (max_dominoes_ < 1) throw Error(ErrorKind::Config, "max_dominoes must be at least 1");
  registry_.add("ndom", [](const AgentState& a) { return static_cast<double>(a.fields.size() - 1); });
}

std::vector<std::string> PcpWorld::action_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= dominoes_.size(); ++i) out.push_back("dom_" + std::to_string(i));
  out.push_back("dom_#");
  return out;
}

JointState PcpWorld::reset(std::uint64_t) const {
  JointState s;
  s.per_trace.assign(agents_, AgentState{{0}});
  return s;
}

bool PcpWorld::terminal(const JointState& s) const {
  return std::all_of(s.per_trace.begin(), s.per_trace.end(), [](const AgentState& a) { return finished(a); });
}

JointState PcpWorld::transition(const JointState& s, const JointAction& a) const {
  JointState n = s;
  for (std::size_t k = 0; k < agents_; ++k) {
    AgentState& st = n.per_trace[k];
    if (finished(st)) continue;
    const int act = a.per_trace[k];
    if (act == terminator()) {
      st.fields[0] = 1;
    } else if (static_cast<int>(st.fields.size()) - 1 < max_dominoes_) {
      st.fields.push_back(act + 1);
    }
  }
  return n;
}

std::vector<int> PcpWorld::chosen(const AgentState& a) { return {a.fields.begin() + 1, a.fields.end()}; }

std::pair<std::string, std::string> PcpWorld::words(const AgentState& a) const {
  return concat_words(dominoes_, chosen(a));
}

std::vector<Label> PcpWorld::label_of(const JointState& s) const {
  std::vector<Label> out(agents_);
  for (std::size_t k = 0; k < agents_; ++k) {
    const auto& st = s.per_trace[k];
    auto [top, bot] = words(st);
    if (finished(st)) out[k].props.insert("terminated");
    if (!st.fields.empty() && st.fields.size() > 1) out[k].props.insert("dom_" + std::to_string(st.fields.back()));
    registry_.fill(st, out[k]);
    out[k].valuations["top_len"] = static_cast<double>(top.size());
    out[k].valuations["bot_len"] = static_cast<double>(bot.size());
  }
  return out;
}

std::vector<Trace> PcpWorld::traces_of(const std::vector<JointState>& path) const {
  std::vector<Trace> out(agents_);
  if (path.empty()) return out;
  const JointState& s = path.back();
  std::vector<std::pair<std::string, std::string>> ws;
  std::size_t len = 0;
  for (const auto& st : s.per_trace) {
    ws.push_back(words(st));
    len = std::max({len, ws.back().first.size() + 1, ws.back().second.size() + 1});
  }
  for (std::size_t k = 0; k < agents_; ++k) {
    const auto& [top, bot] = ws[k];
    for (std::size_t i = 0; i < len; ++i) {
      const char t = i < top.size() ? top[i] : '#';
      const char b = i < bot.size() ? bot[i] : '#';
      Label l;
      if (t == '#') l.props.insert("top_end");
      else l.props.insert(std::string("top_") + t);
      if (b == '#') l.props.insert("bot_end");
      else l.props.insert(std::string("bot_") + b);
      l.valuations["top"] = letter_code(t);
      l.valuations["bot"] = letter_code(b);
      l.valuations["gap"] = letter_code(t) - letter_code(b);
      out[k].push_back(std::move(l));
    }
  }
  return out;
}

std::vector<float> PcpWorld::features(const JointState& s) const {
  std::vector<float> f;
  const float k = static_cast<float>(dominoes_.size() + 1);
  for (const auto& st : s.per_trace) {
    f.push_back(static_cast<float>(st.fields[0]));
    for (int i = 0; i < max_dominoes_; ++i) {
      const std::size_t at = static_cast<std::size_t>(i) + 1;
      f.push_back(at < st.fields.size() ? static_cast<float>(st.fields[at]) / k : 0.0f);
    }
  }
  return f;
}

// ----------------------------------------------------------------- baselines

double baseline_reward(BaselineKind kind, const Environment& env, const JointState&, const JointAction&,
                       const JointState& next) {
  if (kind == BaselineKind::SafeRL) {
    const auto* grid = dynamic_cast<const GridWorld*>(&env);
    if (!grid || env.kind() != EnvKind::Grid) {
      throw Error(ErrorKind::KindMismatch, std::string("SafeRL baseline on a ") + to_string(env.kind()) + " environment");
    }
    if (grid->collision(next)) return -5.0;
    std::size_t on = 0;
    for (std::size_t k = 0; k < env.arity(); ++k) on += grid->on_goal(next, k) ? 1 : 0;
    if (on == env.arity()) return 10.0;
    return on == 1 ? 5.0 : 0.0;
  }
  const auto* pcp = dynamic_cast<const PcpWorld*>(&env);
  if (!pcp) throw Error(ErrorKind::KindMismatch, std::string("PCP baseline on a ") + to_string(env.kind()) + " environment");
  double total = 0.0;
  for (const auto& st : next.per_trace) {
    auto [top, bot] = pcp->words(st);
    const std::size_t common = std::min(top.size(), bot.size());
    total += top.compare(0, common, bot, 0, common) == 0 ? 1.0 : -1.0;
  }
  return total / static_cast<double>(next.per_trace.size());
}

}  // namespace hyperlearn
