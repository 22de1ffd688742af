#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperlearn/env.hpp"

namespace hyperlearn {

struct Cell {
  int x = 0;
  int y = 0;

  auto operator<=>(const Cell&) const = default;
};

/// Parsed ASCII map. Rows are read top to bottom, so the last text row is
/// y = 0 and "up" increases y.
struct GridMap {
  int width = 0;
  int height = 0;
  std::set<Cell> walls;
  std::map<int, Cell> starts;  // agent number (1-based) -> cell
  std::map<int, Cell> goals;
  std::map<Cell, char> letters;                      // tagged cells a..z
  std::map<Cell, std::set<std::string>> special;     // fire / victim / resource

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  bool is_wall(Cell c) const { return walls.count(c) != 0; }
  bool open(Cell c) const { return in_bounds(c) && !is_wall(c); }
  int index(Cell c) const { return c.y * width + c.x; }
  bool has_tag(Cell c, const std::string& tag) const;
  std::vector<Cell> cells_with(const std::string& tag) const;
};

/// Grid rows use `#` wall, `.` free, `1`..`9` agent starts, `a`..`z` tagged
/// cells. Legend lines look like `a = goal:1 start:2 fire victim resource`;
/// lines starting with `;` are comments. Throws NonRectangular,
/// UnknownGlyph, MissingStart.
GridMap load_map(std::string_view text);
GridMap load_map_file(const std::filesystem::path& path);

enum class Move { Stay = 0, Up, Down, Left, Right };

/// Blocked moves (wall or border) leave the agent in place.
Cell apply_move(const GridMap& m, Cell c, int action);

/// Multi-agent grid world: actions stay/up/down/left/right, simultaneous
/// moves, no early termination. Labels carry the cell letter, `g<k>` on the
/// goal of agent k, `goal` on the agent's own goal and `col` when two agents
/// share a cell; valuations x, y, cell and goal_dist.
class GridWorld : public Environment {
 public:
  GridWorld(GridMap map, std::size_t agents, int beta);

  EnvKind kind() const override { return EnvKind::Grid; }
  std::size_t arity() const override { return agents_; }
  int num_actions() const override { return 5; }
  std::vector<std::string> action_names() const override;
  JointState reset(std::uint64_t seed) const override;
  std::vector<Label> label_of(const JointState& s) const override;
  std::vector<float> features(const JointState& s) const override;

  const GridMap& map() const { return map_; }
  static Cell position(const AgentState& a) { return {static_cast<int>(a.fields[0]), static_cast<int>(a.fields[1])}; }
  bool collision(const JointState& s) const;
  bool on_goal(const JointState& s, std::size_t slot) const;

 protected:
  JointState transition(const JointState& s, const JointAction& a) const override;

  GridMap map_;
  std::size_t agents_;
};

/// The 3x3 rescue scenario: cells a..i row by row from the bottom-left, fires
/// at i, f, c that agent 1 extinguishes by visiting, victims at g and f,
/// both drones starting at a. Valuation loc is the cell index (a = 0).
class WildfireWorld : public GridWorld {
 public:
  explicit WildfireWorld(int beta = 8);

  EnvKind kind() const override { return EnvKind::Wildfire; }
  JointState reset(std::uint64_t seed) const override;
  std::vector<Label> label_of(const JointState& s) const override;
  std::vector<float> features(const JointState& s) const override;

  static const char* map_text();
  /// Cell for a letter a..i.
  static Cell cell_of(char letter);

 protected:
  JointState transition(const JointState& s, const JointAction& a) const override;

 private:
  std::vector<Cell> fires_;
};

/// Two or more agents collect energy on a single resource cell: energy grows
/// by one whenever an agent moves onto it from another cell. Cells may be
/// shared. Labels carry `res` on arrival, `on_res` while standing there, and
/// valuations energy, x, y.
class ResourceWorld : public GridWorld {
 public:
  ResourceWorld(GridMap map, std::size_t agents, int beta, int delta);

  EnvKind kind() const override { return EnvKind::Resource; }
  JointState reset(std::uint64_t seed) const override;
  std::vector<Label> label_of(const JointState& s) const override;
  std::string observation_key(const JointState& s, int slot = -1) const override;
  std::vector<float> features(const JointState& s) const override;

  int delta() const { return delta_; }
  Cell resource() const { return resource_; }
  static std::int64_t energy(const AgentState& a) { return a.fields[2]; }

 protected:
  JointState transition(const JointState& s, const JointAction& a) const override;

 private:
  int delta_;
  Cell resource_;
};

struct DominoSet {
  std::vector<std::pair<std::string, std::string>> dominoes;

  std::size_t size() const { return dominoes.size(); }
};

/// One `top|bottom` pair per line over lowercase letters; `;` comments.
/// Throws InvalidDomino.
DominoSet parse_dominoes(std::string_view text);
DominoSet load_dominoes_file(const std::filesystem::path& path);

/// Concatenated words for 1-based domino indices.
std::pair<std::string, std::string> concat_words(const DominoSet& d, const std::vector<int>& indices);
bool is_match(const DominoSet& d, const std::vector<int>& indices);

/// Shortest solution (1-based indices) of length <= max_len by breadth-first
/// search with prefix-consistency pruning. Throws BoundTooLarge past 12.
std::optional<std::vector<int>> pcp_oracle(const DominoSet& d, int max_len);

/// Each trace picks dominoes; action k (0-based) appends domino k+1 and the
/// last action is the terminator. A trace is the letter-aligned unrolling of
/// its words, padded with `#` to a length shared by all traces.
class PcpWorld : public Environment {
 public:
  PcpWorld(DominoSet dominoes, int max_dominoes, std::size_t agents = 2);

  EnvKind kind() const override { return EnvKind::Pcp; }
  std::size_t arity() const override { return agents_; }
  int num_actions() const override { return static_cast<int>(dominoes_.size()) + 1; }
  std::vector<std::string> action_names() const override;
  JointState reset(std::uint64_t seed) const override;
  std::vector<Label> label_of(const JointState& s) const override;
  bool terminal(const JointState& s) const override;
  std::vector<Trace> traces_of(const std::vector<JointState>& path) const override;
  bool state_aligned_traces() const override { return false; }
  std::vector<float> features(const JointState& s) const override;

  const DominoSet& dominoes() const { return dominoes_; }
  int terminator() const { return static_cast<int>(dominoes_.size()); }
  /// 1-based indices chosen so far by one trace.
  static std::vector<int> chosen(const AgentState& a);
  static bool finished(const AgentState& a) { return a.fields[0] != 0; }
  std::pair<std::string, std::string> words(const AgentState& a) const;
  static int letter_code(char c) { return c == '#' ? 0 : c - 'a' + 1; }

 protected:
  JointState transition(const JointState& s, const JointAction& a) const override;

 private:
  DominoSet dominoes_;
  int max_dominoes_;
  std::size_t agents_;
};

enum class BaselineKind { SafeRL, Pcp };

/// Hand-crafted comparison rewards. SafeRL: +10 when every agent is on its
/// goal, +5 when exactly one is, -5 on collision (which takes precedence).
/// Pcp: per trace +1 when top and bottom agree on their common prefix, else
/// -1, averaged over traces. Throws KindMismatch.
double baseline_reward(BaselineKind kind, const Environment& env, const JointState& prev, const JointAction& a,
                       const JointState& next);

}  // namespace hyperlearn
