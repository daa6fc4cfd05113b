#include "fuzzyalign/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>

#include "fuzzyalign/error.hpp"

namespace fuzzyalign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StateKey {
  std::uint32_t log_index = 0;
  StateId position;
  std::vector<DataSlot> slots;

  friend bool operator==(const StateKey&, const StateKey&) = default;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::size_t h = std::hash<std::uint64_t>{}((std::uint64_t{k.log_index} << 32) | k.position.value);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (const auto& s : k.slots) {
      mix(static_cast<std::size_t>(s.tag));
      if (s.tag != DataSlot::Tag::Observed) continue;
      if (const auto* d = std::get_if<double>(&s.value))
        mix(std::hash<double>{}(*d));
      else
        mix(std::hash<std::string>{}(std::get<std::string>(s.value)));
    }
    return h;
  }
};

struct Edge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  AlignmentMove move;
};

struct Node {
  StateKey key;
  double g = 0.0;
  std::uint32_t depth = 0;
  bool closed = false;
  std::vector<Edge> preds;
};

struct QueueEntry {
  double f;
  double h;
  std::uint32_t depth;
  std::uint64_t seq;
  std::uint32_t node;
  double g;
};

// Pops the smallest f; ties go to lower h, then longer prefix, then generation order.
struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

// Order of moves inside the lexicographic ranking of optima.
bool edge_before(const ProcessModel& model, const Edge& a, const Edge& b) {
  if (a.move.kind != b.move.kind) return a.move.kind < b.move.kind;
  const std::string empty;
  const std::string& an = a.move.model_activity ? model.activity(*a.move.model_activity).name : empty;
  const std::string& bn = b.move.model_activity ? model.activity(*b.move.model_activity).name : empty;
  if (an != bn) return an < bn;
  return a.to < b.to;
}

class Search {
 public:
  Search(const ProcessModel& model, const Trace& trace, const CostProfile& profile, const AlignOptions& options)
      : model_(model), trace_(trace), profile_(profile), options_(options) {}

  AlignmentResult run() {
    if (!(options_.epsilon > 0.0) || !std::isfinite(options_.epsilon))
      throw Error(ErrorKind::InvalidArgument, "epsilon must be a positive finite number");

    AlignmentResult result;
    const std::size_t n = trace_.events.size();
    result.epsilon_warning =
        2.0 * options_.epsilon * static_cast<double>(n + model_.state_count()) >= 1e-3;

    for (StateId s : model_.initial_states()) {
      if (!model_.distance_to_final(s)) continue;
      StateKey key{0, s, std::vector<DataSlot>(model_.variables().size())};
      auto idx = add_node(std::move(key), 0.0, 0);
      roots_.push_back(idx);
      push(idx);
    }
    if (roots_.empty()) throw Error(ErrorKind::UnreachableFinal, "no final state is reachable from an initial state");

    double best = kInf;
    std::vector<std::uint32_t> goals;
    while (!queue_.empty()) {
      QueueEntry e = queue_.top();
      queue_.pop();
      Node& node = nodes_[e.node];
      if (node.closed || e.g > node.g) continue;
      if (e.f > best + kTieTolerance) break;
      node.closed = true;
      if (++result.stats.expanded > options_.node_budget)
        throw Error(ErrorKind::BudgetExceeded, "search budget of " + std::to_string(options_.node_budget) +
                                                   " expansions exceeded for trace '" + trace_.case_id + "'");
      if (node.key.log_index == n && model_.is_final(node.key.position)) {
        goals.push_back(e.node);
        best = std::min(best, node.g);
        continue;
      }
      expand(e.node);
      result.stats.queue_peak = std::max(result.stats.queue_peak, queue_.size());
    }
    if (goals.empty()) throw Error(ErrorKind::UnreachableFinal, "no complete alignment exists for trace '" + trace_.case_id + "'");

    std::erase_if(goals, [&](std::uint32_t g) { return nodes_[g].g > best + kTieTolerance; });
    std::size_t cap = options_.all_optima ? std::max<std::size_t>(options_.optima_cap, 1) : 1;
    collect(goals, cap, result);

    result.search_cost = best;
    result.optimal_cost = result.alignments.front().total_cost;
    result.worst_cost = worst_case_cost(model_, trace_, profile_, options_.epsilon);
    result.fitness = fitness(best, result.worst_cost);
    return result;
  }

 private:
  std::uint32_t add_node(StateKey key, double g, std::uint32_t depth) {
    auto idx = static_cast<std::uint32_t>(nodes_.size());
    index_.emplace(key, idx);
    nodes_.push_back(Node{std::move(key), g, depth, false, {}});
    return idx;
  }

  double h(const StateKey& key) const {
    if (!options_.use_heuristic) return 0.0;
    return heuristic(model_, key.position, trace_.events.size() - key.log_index, options_.epsilon);
  }

  void push(std::uint32_t idx) {
    const Node& node = nodes_[idx];
    double hv = h(node.key);
    queue_.push(QueueEntry{node.g + hv, hv, node.depth, seq_++, idx, node.g});
  }

  void relax(std::uint32_t from, StateKey key, AlignmentMove move) {
    if (!model_.distance_to_final(key.position)) return;  // dead end
    double g = nodes_[from].g + move.cost + options_.epsilon;
    std::uint32_t depth = nodes_[from].depth + 1;
    auto it = index_.find(key);
    if (it == index_.end()) {
      auto idx = add_node(std::move(key), g, depth);
      nodes_[idx].preds.push_back(Edge{from, idx, std::move(move)});
      push(idx);
      return;
    }
    std::uint32_t idx = it->second;
    Node& node = nodes_[idx];
    if (g < node.g - kTieTolerance) {
      node.g = g;
      node.depth = depth;
      node.closed = false;
      node.preds.clear();
      node.preds.push_back(Edge{from, idx, std::move(move)});
      push(idx);
    } else if (g <= node.g + kTieTolerance) {
      node.preds.push_back(Edge{from, idx, std::move(move)});
    }
  }

  void expand(std::uint32_t idx) {
    const StateKey key = nodes_[idx].key;  // copy: nodes_ may reallocate
    const std::size_t i = key.log_index;
    const Event* event = i < trace_.events.size() ? &trace_.events[i] : nullptr;

    if (event != nullptr) {
      AlignmentMove mv;
      mv.log_index = i;
      mv.kind = MoveKind::LogMove;
      mv.cost = profile_.weights.log_move;
      relax(idx, StateKey{key.log_index + 1, key.position, key.slots}, std::move(mv));
    }
    for (const Transition& t : model_.outgoing(key.position)) {
      {
        AlignmentMove mv;
        mv.model_activity = t.activity;
        mv.kind = MoveKind::ModelMove;
        mv.cost = model_move_cost(model_, t.activity, profile_.weights);
        relax(idx, StateKey{key.log_index, t.to, advance_slots(model_, key.slots, nullptr, t.activity)},
              std::move(mv));
      }
      const ActivitySpec& spec = model_.activity(t.activity);
      if (event != nullptr && !spec.invisible && event->activity == spec.name) {
        MoveClass cls = classify_move(model_, event, t.activity, key.slots, profile_.mode);
        AlignmentMove mv;
        mv.log_index = i;
        mv.model_activity = t.activity;
        mv.kind = cls.kind;
        mv.cost = move_cost(cls, model_, t.activity, profile_);
        mv.violations = std::move(cls.violations);
        relax(idx, StateKey{key.log_index + 1, t.to, advance_slots(model_, key.slots, event, t.activity)},
              std::move(mv));
      }
    }
  }

  // Builds the optimal sub-graph and lists its root-to-goal paths in
  // lexicographic move order.
  void collect(const std::vector<std::uint32_t>& goals, std::size_t cap, AlignmentResult& result) {
    std::vector<char> on_optimal(nodes_.size(), 0);
    std::vector<std::uint32_t> stack(goals.begin(), goals.end());
    for (auto g : goals) on_optimal[g] = 1;
    std::vector<std::vector<const Edge*>> forward(nodes_.size());
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (const Edge& e : nodes_[v].preds) {
        forward[e.from].push_back(&e);
        if (!on_optimal[e.from]) {
          on_optimal[e.from] = 1;
          stack.push_back(e.from);
        }
      }
    }
    for (auto& edges : forward)
      std::sort(edges.begin(), edges.end(), [&](const Edge* a, const Edge* b) { return edge_before(model_, *a, *b); });

    std::vector<char> is_goal(nodes_.size(), 0);
    for (auto g : goals) is_goal[g] = 1;

    std::vector<const Edge*> path;
    bool stop = false;
    std::function<void(std::uint32_t)> walk = [&](std::uint32_t v) {
      if (stop) return;
      if (is_goal[v]) {
        if (result.alignments.size() == cap) {
          result.truncated = true;
          stop = true;
          return;
        }
        Alignment a;
        for (const Edge* e : path) {
          a.moves.push_back(e->move);
          a.total_cost += e->move.cost;
        }
        result.alignments.push_back(std::move(a));
        return;
      }
      for (const Edge* e : forward[v]) {
        path.push_back(e);
        walk(e->to);
        path.pop_back();
        if (stop) return;
      }
    };
    std::vector<std::uint32_t> roots = roots_;
    std::sort(roots.begin(), roots.end(),
              [&](auto a, auto b) { return nodes_[a].key.position < nodes_[b].key.position; });
    for (auto r : roots)
      if (on_optimal[r]) walk(r);
    if (!options_.all_optima) result.truncated = false;
  }

  const ProcessModel& model_;
  const Trace& trace_;
  const CostProfile& profile_;
  const AlignOptions& options_;

  std::vector<Node> nodes_;
  std::unordered_map<StateKey, std::uint32_t, StateKeyHash> index_;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue_;
  std::vector<std::uint32_t> roots_;
  std::uint64_t seq_ = 0;
};

}  // namespace

std::vector<DataSlot> advance_slots(const ProcessModel& model, std::vector<DataSlot> slots, const Event* log,
                                    std::optional<ActivityId> activity) {
  if (!activity) return slots;
  for (const auto& w : model.activity(*activity).writes) {
    DataSlot& slot = slots[*model.variable_index(w)];
    if (log != nullptr) {
      auto it = log->writes.find(w);
      if (it != log->writes.end()) {
        slot = DataSlot::observed(it->second);
        continue;
      }
    }
    slot = DataSlot::corrected();
  }
  return slots;
}

AlignmentResult align(const ProcessModel& model, const Trace& trace, const CostProfile& profile,
                      const AlignOptions& options) {
  return Search(model, trace, profile, options).run();
}

double heuristic(const ProcessModel& model, StateId position, std::size_t remaining_events, double epsilon) {
  auto d = model.distance_to_final(position);
  if (!d) return kInf;
  return epsilon * static_cast<double>(std::max(remaining_events, *d));
}

OptimaSet enumerate_optima(const ProcessModel& model, const Trace& trace, const CostProfile& profile,
                           double epsilon, std::size_t cap) {
  if (cap < 1) throw Error(ErrorKind::InvalidArgument, "optima cap must be at least 1");
  AlignOptions opts;
  opts.epsilon = epsilon;
  opts.all_optima = true;
  opts.optima_cap = cap;
  auto r = align(model, trace, profile, opts);
  return {std::move(r.alignments), r.truncated};
}

double worst_case_cost(const ProcessModel& model, const Trace& trace, const CostProfile& profile, double epsilon) {
  std::vector<double> dist(model.state_count(), kInf);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (StateId s : model.initial_states()) {
    dist[s.value] = 0.0;
    pq.push({0.0, s.value});
  }
  double best = kInf;
  while (!pq.empty()) {
    auto [d, s] = pq.top();
    pq.pop();
    if (d > dist[s]) continue;
    if (model.is_final(StateId{s})) best = std::min(best, d);
    for (const Transition& t : model.outgoing(StateId{s})) {
      double nd = d + model_move_cost(model, t.activity, profile.weights) + epsilon;
      if (nd < dist[t.to.value]) {
        dist[t.to.value] = nd;
        pq.push({nd, t.to.value});
      }
    }
  }
  if (best == kInf) throw Error(ErrorKind::UnreachableFinal, "no final state is reachable from an initial state");
  return best + static_cast<double>(trace.events.size()) * (profile.weights.log_move + epsilon);
}

double fitness(double optimal_cost, double worst_cost) {
  if (worst_cost <= 0.0) return 1.0;
  return std::clamp(1.0 - optimal_cost / worst_cost, 0.0, 1.0);
}

std::vector<ActivityId> model_projection(const Alignment& a) {
  std::vector<ActivityId> out;
  for (const auto& m : a.moves)
    if (m.model_activity) out.push_back(*m.model_activity);
  return out;
}

std::vector<std::size_t> log_projection(const Alignment& a) {
  std::vector<std::size_t> out;
  for (const auto& m : a.moves)
    if (m.log_index) out.push_back(*m.log_index);
  return out;
}

}  // namespace fuzzyalign
