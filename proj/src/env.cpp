#include "hyperlearn/env.hpp"

#include "hyperlearn/error.hpp"

namespace hyperlearn {

const char* to_string(EnvKind k) {
  switch (k) {
    case EnvKind::Grid: return "grid";
    case EnvKind::Wildfire: return "wildfire";
    case EnvKind::Pcp: return "pcp";
    case EnvKind::Resource: return "resource";
  }
  return "?";
}

JointState Environment::step(const JointState& s, const JointAction& a) const {
  if (s.step_count >= beta_ || terminal(s)) {
    throw Error(ErrorKind::EpisodeExhausted, "episode already has " + std::to_string(s.step_count) + " steps");
  }
  if (a.per_trace.size() != arity()) {
    throw Error(ErrorKind::InvalidAction, "joint action of width " + std::to_string(a.per_trace.size()) +
                                              ", expected " + std::to_string(arity()));
  }
  for (int x : a.per_trace) {
    if (x < 0 || x >= num_actions()) throw Error(ErrorKind::InvalidAction, "action " + std::to_string(x) + " out of range");
  }
  JointState next = transition(s, a);
  next.step_count = s.step_count + 1;
  return next;
}

std::vector<Trace> Environment::traces_of(const std::vector<JointState>& path) const {
  std::vector<Trace> out(arity());
  for (const auto& s : path) {
    auto labels = label_of(s);
    for (std::size_t k = 0; k < out.size(); ++k) out[k].push_back(std::move(labels[k]));
  }
  return out;
}

std::string Environment::observation_key(const JointState& s, int slot) const {
  std::string key;
  auto put = [&](const std::vector<std::int64_t>& v) {
    for (auto x : v) key += std::to_string(x) + ",";
    key += ';';
  };
  if (slot >= 0) {
    put(s.per_trace.at(static_cast<std::size_t>(slot)).fields);
  } else {
    for (const auto& a : s.per_trace) put(a.fields);
  }
  put(s.shared);
  return key;
}

}  // namespace hyperlearn
