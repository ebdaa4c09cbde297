// SPDX-License-Identifier: Apache-2.0
#ifndef CQA_HYPERGRAPH_HPP
#define CQA_HYPERGRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cqa/constraints.hpp"
#include "cqa/errors.hpp"
#include "cqa/model.hpp"

namespace cqa {

using VertexId = std::size_t;
/// An edge is a sorted, duplicate-free set of vertex ids (size >= 1).
using Edge = std::vector<VertexId>;

/// A repair candidate: a subset of the instance's tuples by canonical
/// position. Produced by extend_to_maximal and the repair enumerator,
/// where it is a maximal independent set of the conflict hypergraph.
struct Repair {
  std::vector<VertexId> vertex_ids;  // sorted

  bool operator==(const Repair& o) const {
    return vertex_ids == o.vertex_ids;
  }
  bool operator<(const Repair& o) const { return vertex_ids < o.vertex_ids; }

  Instance materialize(const Instance& original) const {
    return original.restrict_to(vertex_ids);
  }
};

enum class HgMode { Materialized, Lazy };

struct HypergraphStats {
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::map<std::size_t, std::size_t> edge_size_histogram;
  std::size_t isolated_vertex_count = 0;
};

/// The conflict hypergraph of an instance under a constraint set:
/// vertices are the instance's tuples, edges are the tuple sets that
/// jointly violate some constraint under a substitution.
///
/// Materialized mode enumerates every edge up front (bounded by an edge
/// budget) and serves incidence queries from memory. Lazy mode only
/// builds per-position value indexes and answers edge queries by
/// constraint probing, so it scales to instances whose edge set would
/// not fit. Both modes answer identically. The hypergraph keeps
/// references to the instance and constraint set; both must outlive it.
/// Immutable after construction; probes are pure and thread-safe.
class ConflictHypergraph {
public:
  static constexpr std::size_t kDefaultEdgeBudget = 10'000'000;

  ConflictHypergraph(const Instance& instance, const ConstraintSet& cs,
                     HgMode mode,
                     std::size_t edge_budget = kDefaultEdgeBudget)
      : instance_(&instance), cs_(&cs), mode_(mode) {
    build_position_index();
    all_vertices_.resize(vertex_count());
    for (VertexId v = 0; v < all_vertices_.size(); ++v) all_vertices_[v] = v;
    if (mode_ == HgMode::Materialized) materialize_edges(edge_budget);
  }

  const Instance& instance() const { return *instance_; }
  const ConstraintSet& constraints() const { return *cs_; }
  HgMode mode() const { return mode_; }
  std::size_t vertex_count() const { return instance_->size(); }

  /// All edges; materialized mode only.
  const std::vector<Edge>& edges() const {
    require_materialized("edges()");
    return edges_;
  }

  /// Edge ids incident to a vertex; materialized mode only.
  const std::vector<std::size_t>& incident_edge_ids(VertexId v) const {
    require_materialized("incident_edge_ids()");
    return incidence_.at(v);
  }

  /// The edges containing a vertex, deduplicated, in canonical order.
  std::vector<Edge> edges_containing(VertexId v) const {
    check_vertex(v);
    if (mode_ == HgMode::Materialized) {
      std::vector<Edge> out;
      out.reserve(incidence_[v].size());
      for (std::size_t e : incidence_[v]) out.push_back(edges_[e]);
      return out;
    }
    std::set<Edge> found;
    probe_vertex(v, std::nullopt, [&](const Edge& e) {
      found.insert(e);
      return true;
    });
    return {found.begin(), found.end()};
  }

  std::vector<Edge> edges_containing(const Tuple& t) const {
    auto id = instance_->index_of(t);
    if (!id)
      throw InvalidArgument("tuple " + t.str() +
                            " is not a vertex of the hypergraph");
    return edges_containing(*id);
  }

  bool has_incident_edge(VertexId v) const {
    check_vertex(v);
    if (mode_ == HgMode::Materialized) return !incidence_[v].empty();
    bool found = false;
    probe_vertex(v, std::nullopt, [&](const Edge&) {
      found = true;
      return false;
    });
    return found;
  }

  /// True iff no edge is fully contained in the sorted vertex set.
  bool is_independent(const std::vector<VertexId>& sorted_set) const {
    for (VertexId v : sorted_set) check_vertex(v);
    if (mode_ == HgMode::Materialized) {
      for (VertexId v : sorted_set)
        for (std::size_t e : incidence_[v])
          if (edge_within(edges_[e], sorted_set)) return false;
      return true;
    }
    for (const DenialConstraint& c : cs_->denials()) {
      bool violated = false;
      for_each_violation_within(*instance_, c, sorted_set,
                                [&](const std::vector<std::size_t>&) {
                                  violated = true;
                                  return false;
                                });
      if (violated) return false;
    }
    return true;
  }

  /// True iff adding `v` to the independent sorted set keeps it
  /// independent; every new edge must contain v, so only those are
  /// probed.
  bool can_extend(const std::vector<VertexId>& sorted_independent,
                  VertexId v) const {
    check_vertex(v);
    if (mode_ == HgMode::Materialized) {
      for (std::size_t e : incidence_[v]) {
        const Edge& edge = edges_[e];
        bool inside = true;
        for (VertexId u : edge) {
          if (u != v && !std::binary_search(sorted_independent.begin(),
                                            sorted_independent.end(), u)) {
            inside = false;
            break;
          }
        }
        if (inside) return false;
      }
      return true;
    }
    std::vector<VertexId> with_v = sorted_independent;
    with_v.insert(std::lower_bound(with_v.begin(), with_v.end(), v), v);
    bool blocked = false;
    probe_vertex(v, with_v, [&](const Edge&) {
      blocked = true;
      return false;
    });
    return !blocked;
  }

  /// Deterministically completes an independent set to a maximal one by
  /// scanning candidates in canonical tuple order.
  Repair extend_to_maximal(std::vector<VertexId> s) const {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (!is_independent(s))
      throw InvalidArgument("seed set is not independent");
    for (VertexId v = 0; v < vertex_count(); ++v) {
      if (std::binary_search(s.begin(), s.end(), v)) continue;
      if (can_extend(s, v))
        s.insert(std::lower_bound(s.begin(), s.end(), v), v);
    }
    return Repair{std::move(s)};
  }

  /// Connected components over "shares an edge"; materialized only.
  std::vector<std::vector<VertexId>> components() const {
    require_materialized("components()");
    std::vector<VertexId> parent(vertex_count());
    for (VertexId v = 0; v < parent.size(); ++v) parent[v] = v;
    std::function<VertexId(VertexId)> find = [&](VertexId x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    for (const Edge& e : edges_)
      for (std::size_t i = 1; i < e.size(); ++i) {
        VertexId a = find(e[0]), b = find(e[i]);
        if (a != b) parent[a] = b;
      }
    std::map<VertexId, std::vector<VertexId>> groups;
    for (VertexId v = 0; v < parent.size(); ++v)
      groups[find(v)].push_back(v);
    std::vector<std::vector<VertexId>> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
  }

  HypergraphStats stats(bool minimize_edges = false) const {
    require_materialized("stats()");
    HypergraphStats st;
    st.vertex_count = vertex_count();
    std::vector<const Edge*> considered;
    considered.reserve(edges_.size());
    for (const Edge& e : edges_) considered.push_back(&e);
    if (minimize_edges) {
      // Keep only inclusion-minimal edges.
      std::vector<const Edge*> minimal;
      for (const Edge* e : considered) {
        bool has_subset = false;
        for (const Edge* f : considered) {
          if (f == e || f->size() >= e->size()) continue;
          if (edge_within(*f, *e)) {
            has_subset = true;
            break;
          }
        }
        if (!has_subset) minimal.push_back(e);
      }
      considered = std::move(minimal);
    }
    st.edge_count = considered.size();
    std::vector<bool> touched(vertex_count(), false);
    for (const Edge* e : considered) {
      ++st.edge_size_histogram[e->size()];
      for (VertexId v : *e) touched[v] = true;
    }
    for (VertexId v = 0; v < vertex_count(); ++v)
      if (!touched[v]) ++st.isolated_vertex_count;
    return st;
  }

private:
  static bool edge_within(const Edge& e, const std::vector<VertexId>& set) {
    if (e.size() > set.size()) return false;
    for (VertexId v : e)
      if (!std::binary_search(set.begin(), set.end(), v)) return false;
    return true;
  }

  void check_vertex(VertexId v) const {
    if (v >= instance_->size())
      throw InvalidArgument("vertex id " + std::to_string(v) +
                            " out of range");
  }

  void require_materialized(const char* what) const {
    if (mode_ != HgMode::Materialized)
      throw InvalidArgument(std::string(what) +
                            " requires a materialized hypergraph");
  }

  void build_position_index() {
    const auto& tuples = instance_->tuples();
    pos_index_.resize(instance_->schema().arity());
    for (std::size_t p = 0; p < pos_index_.size(); ++p)
      for (VertexId v = 0; v < tuples.size(); ++v)
        pos_index_[p][tuples[v].at(p)].push_back(v);
  }

  void materialize_edges(std::size_t edge_budget) {
    std::set<Edge> dedup;
    for (const DenialConstraint& c : cs_->denials()) {
      JoinState state{*this, c, nullptr, nullptr};
      join(state, 0, [&](const Edge& e) {
        if (dedup.insert(e).second && dedup.size() > edge_budget)
          throw BudgetError(
              "conflict hypergraph exceeds the edge budget of " +
              std::to_string(edge_budget) +
              " edges; rerun with the lazy hypergraph mode");
        return true;
      });
    }
    edges_.assign(dedup.begin(), dedup.end());
    incidence_.assign(vertex_count(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e)
      for (VertexId v : edges_[e]) incidence_[v].push_back(e);
  }

  // -- indexed constraint join ---------------------------------------------

  struct Pin {
    std::size_t literal;
    VertexId vertex;
  };

  struct JoinState {
    const ConflictHypergraph& hg;
    const DenialConstraint& c;
    const Pin* pin;                            // may be null
    const std::vector<VertexId>* restrict_to;  // sorted; may be null
    Binding binding;
    std::vector<VertexId> chosen;
  };

  // Fills constraint literals in slot order (a pinned literal first),
  // choosing candidates through the per-position value index on bound
  // positions. Emits sorted deduplicated edges; sink returns false to
  // stop the enumeration.
  bool join(JoinState& state, std::size_t depth,
            const std::function<bool(const Edge&)>& sink) const {
    const std::size_t m = state.c.literals.size();
    if (depth == m) {
      Edge e(state.chosen);
      std::sort(e.begin(), e.end());
      e.erase(std::unique(e.begin(), e.end()), e.end());
      return sink(e);
    }
    std::size_t li = slot_for_depth(state, depth);
    // Candidate vertices for this literal.
    std::vector<VertexId> scratch;
    const std::vector<VertexId>* candidates =
        candidate_vertices(state, li, scratch);
    for (VertexId v : *candidates) {
      std::vector<std::string> trail;
      if (unify(state, li, v, trail)) {
        state.chosen.push_back(v);
        bool keep_going = join(state, depth + 1, sink);
        state.chosen.pop_back();
        for (const std::string& name : trail) state.binding.erase(name);
        if (!keep_going) return false;
      } else {
        for (const std::string& name : trail) state.binding.erase(name);
      }
    }
    return true;
  }

  std::size_t slot_for_depth(const JoinState& state, std::size_t depth) const {
    if (!state.pin) return depth;
    if (depth == 0) return state.pin->literal;
    return depth <= state.pin->literal ? depth - 1 : depth;
  }

  const std::vector<VertexId>* candidate_vertices(
      JoinState& state, std::size_t li, std::vector<VertexId>& scratch) const {
    if (state.pin && li == state.pin->literal) {
      scratch.assign(1, state.pin->vertex);
      return &scratch;
    }
    if (state.restrict_to) return state.restrict_to;
    // Pick the most selective bound position, if any.
    const auto& pattern = state.c.literals[li];
    const std::vector<VertexId>* best = nullptr;
    for (std::size_t p = 0; p < pattern.size(); ++p) {
      auto v = resolve(pattern[p], state.binding);
      if (!v) continue;
      auto it = pos_index_[p].find(*v);
      if (it == pos_index_[p].end()) {
        scratch.clear();
        return &scratch;  // no tuple carries this value here
      }
      if (!best || it->second.size() < best->size()) best = &it->second;
    }
    if (best) return best;
    return &all_vertices_;
  }

  bool unify(JoinState& state, std::size_t li, VertexId v,
             std::vector<std::string>& trail) const {
    const Tuple& t = instance_->tuples()[v];
    const auto& pattern = state.c.literals[li];
    for (std::size_t p = 0; p < pattern.size(); ++p) {
      const Term& term = pattern[p];
      if (term.is_const()) {
        if (!(term.value() == t.at(p))) return false;
      } else {
        auto it = state.binding.find(term.var_name());
        if (it == state.binding.end()) {
          state.binding.emplace(term.var_name(), t.at(p));
          trail.push_back(term.var_name());
        } else if (!(it->second == t.at(p))) {
          return false;
        }
      }
    }
    for (const BuiltinAtom& b : state.c.builtins) {
      auto r = b.try_eval(state.binding);
      if (r && !*r) return false;
    }
    return true;
  }

  // Probes every constraint with `v` pinned at each literal position,
  // optionally restricting all other literals to a sorted vertex set.
  void probe_vertex(VertexId v,
                    std::optional<std::vector<VertexId>> restrict_to,
                    const std::function<bool(const Edge&)>& sink) const {
    for (const DenialConstraint& c : cs_->denials()) {
      for (std::size_t li = 0; li < c.literals.size(); ++li) {
        Pin pin{li, v};
        JoinState state{*this, c, &pin,
                        restrict_to ? &*restrict_to : nullptr};
        bool keep_going = true;
        join(state, 0, [&](const Edge& e) {
          keep_going = sink(e);
          return keep_going;
        });
        if (!keep_going) return;
      }
    }
  }

  const Instance* instance_;
  const ConstraintSet* cs_;
  HgMode mode_;
  std::vector<std::unordered_map<Value, std::vector<VertexId>, ValueHash>>
      pos_index_;
  std::vector<Edge> edges_;                      // materialized
  std::vector<std::vector<std::size_t>> incidence_;  // materialized
  std::vector<VertexId> all_vertices_;           // full-scan range
};

/// Convenience builder mirroring the two construction modes.
inline ConflictHypergraph build_hypergraph(
    const Instance& instance, const ConstraintSet& cs, HgMode mode,
    std::size_t edge_budget = ConflictHypergraph::kDefaultEdgeBudget) {
  return ConflictHypergraph(instance, cs, mode, edge_budget);
}

}  // namespace cqa

#endif  // CQA_HYPERGRAPH_HPP
