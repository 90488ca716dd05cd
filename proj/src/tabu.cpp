#include "bncausal/tabu.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <string>

#include "bncausal/errors.hpp"

namespace bncausal {

namespace {

// Two structures within this score distance are treated as tied, so that
// likelihood-equivalent graphs (e.g. a reversed single arc) resolve through
// the structural tie-break instead of floating-point noise.
constexpr double kScoreTieEps = 1e-9;

enum class MoveType { Add, Delete, Reverse };

struct Move {
  MoveType type;
  int from;
  int to;
};

struct Candidate {
  Move move;
  double score;
  std::size_t arc_count;
  std::vector<std::pair<int, int>> arc_list;
  std::uint64_t hash;
};

std::uint64_t hash_arc_list(const std::vector<std::pair<int, int>>& arcs) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ULL;
  };
  for (const auto& [from, to] : arcs) {
    mix(static_cast<std::uint64_t>(from) + 1);
    mix(static_cast<std::uint64_t>(to) + 1);
  }
  return h;
}

// Preference order: higher score, then fewer arcs, then smaller arc list.
bool better(const Candidate& a, const Candidate& b) {
  if (a.score > b.score + kScoreTieEps) return true;
  if (b.score > a.score + kScoreTieEps) return false;
  if (a.arc_count != b.arc_count) return a.arc_count < b.arc_count;
  return a.arc_list < b.arc_list;
}

bool contains_arc(const std::vector<std::pair<int, int>>& arcs, int from, int to) {
  return std::find(arcs.begin(), arcs.end(), std::make_pair(from, to)) != arcs.end();
}

std::vector<std::pair<int, int>> arcs_after(const Dag& dag, const Move& m) {
  auto arcs = dag.arcs();
  switch (m.type) {
    case MoveType::Add:
      arcs.emplace_back(m.from, m.to);
      break;
    case MoveType::Delete:
      arcs.erase(std::find(arcs.begin(), arcs.end(), std::make_pair(m.from, m.to)));
      break;
    case MoveType::Reverse:
      arcs.erase(std::find(arcs.begin(), arcs.end(), std::make_pair(m.from, m.to)));
      arcs.emplace_back(m.to, m.from);
      break;
  }
  std::sort(arcs.begin(), arcs.end());
  return arcs;
}

bool creates_cycle(Dag& dag, const Move& m) {
  switch (m.type) {
    case MoveType::Add:
      return dag.reachable(m.to, m.from);
    case MoveType::Delete:
      return false;
    case MoveType::Reverse: {
      dag.remove_arc(m.from, m.to);
      const bool cyclic = dag.reachable(m.from, m.to);
      dag.add_arc(m.from, m.to);
      return cyclic;
    }
  }
  return false;
}

void apply_move(Dag& dag, const Move& m) {
  switch (m.type) {
    case MoveType::Add:
      dag.add_arc(m.from, m.to);
      break;
    case MoveType::Delete:
      dag.remove_arc(m.from, m.to);
      break;
    case MoveType::Reverse:
      dag.remove_arc(m.from, m.to);
      dag.add_arc(m.to, m.from);
      break;
  }
}

}  // namespace

Dag tabu_search(const ColumnTable& data, ScoreKind kind, const TabuConfig& cfg) {
  const int m = data.num_nodes();
  if (m < 2) fail(ErrorCode::InvalidArgument, "structure search needs at least two nodes");
  if (cfg.tabu_len < 1 || (cfg.max_iter < 0)) {
    fail(ErrorCode::InvalidArgument, "tabu_len must be >= 1 and max_iter >= 0");
  }
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 100 * m;

  for (const auto& arc : cfg.required_arcs) {
    if (contains_arc(cfg.forbidden_arcs, arc.first, arc.second)) {
      fail(ErrorCode::InvalidArgument, "an arc is both required and forbidden");
    }
  }

  Dag current(data.meta);
  for (const auto& [from, to] : cfg.required_arcs) current.add_arc(from, to);
  if (!is_acyclic(current)) {
    fail(ErrorCode::InvalidArgument, "required arcs already contain a cycle");
  }

  ScoreCache cache(data, kind);
  double current_score = cache.total(current);
  Dag best = current;
  double best_score = current_score;

  std::deque<std::uint64_t> tabu;
  auto remember = [&](std::uint64_t h) {
    tabu.push_back(h);
    while (static_cast<int>(tabu.size()) > cfg.tabu_len) tabu.pop_front();
  };
  remember(current.structure_hash());

  int non_improving = 0;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::optional<Candidate> pick;
    // Fixed enumeration: for each ordered pair (u,v), try add when the pair
    // is unconnected, else delete then reverse of the existing arc.
    for (int u = 0; u < m; ++u) {
      for (int v = 0; v < m; ++v) {
        if (u == v) continue;
        std::vector<Move> moves;
        if (!current.has_arc(u, v) && !current.has_arc(v, u)) {
          moves.push_back({MoveType::Add, u, v});
        } else if (current.has_arc(u, v)) {
          moves.push_back({MoveType::Delete, u, v});
          moves.push_back({MoveType::Reverse, u, v});
        }
        for (const Move& mv : moves) {
          if (mv.type == MoveType::Add && contains_arc(cfg.forbidden_arcs, mv.from, mv.to)) {
            continue;
          }
          if (mv.type != MoveType::Add && contains_arc(cfg.required_arcs, mv.from, mv.to)) {
            continue;
          }
          if (mv.type == MoveType::Reverse && contains_arc(cfg.forbidden_arcs, mv.to, mv.from)) {
            continue;
          }
          if (creates_cycle(current, mv)) continue;

          Candidate c;
          c.move = mv;
          c.arc_list = arcs_after(current, mv);
          c.arc_count = c.arc_list.size();
          c.hash = hash_arc_list(c.arc_list);
          if (std::find(tabu.begin(), tabu.end(), c.hash) != tabu.end()) continue;

          // Only the endpoint locals change; score the result exactly as a
          // sum of cached locals to keep comparisons reproducible.
          double s = current_score;
          auto relocal = [&](int node, int add_parent, int drop_parent) {
            std::vector<int> ps = current.parents(node);
            if (drop_parent >= 0) ps.erase(std::find(ps.begin(), ps.end(), drop_parent));
            if (add_parent >= 0) {
              ps.insert(std::lower_bound(ps.begin(), ps.end(), add_parent), add_parent);
            }
            s += cache.local(node, ps) - cache.local(node, current.parents(node));
          };
          switch (mv.type) {
            case MoveType::Add:
              relocal(mv.to, mv.from, -1);
              break;
            case MoveType::Delete:
              relocal(mv.to, -1, mv.from);
              break;
            case MoveType::Reverse:
              relocal(mv.to, -1, mv.from);
              relocal(mv.from, mv.to, -1);
              break;
          }
          c.score = s;
          if (!pick || better(c, *pick)) pick = c;
        }
      }
    }
    if (!pick) break;  // every move is tabu or invalid

    apply_move(current, pick->move);
    current_score = cache.total(current);
    remember(pick->hash);

    if (current_score > best_score + kScoreTieEps) {
      best = current;
      best_score = current_score;
      non_improving = 0;
    } else {
      if (++non_improving >= cfg.tabu_len) break;
    }
  }
  return best;
}

}  // namespace bncausal
