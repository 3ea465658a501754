#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace laguerre::transport {

/// Primal network simplex for uncapacitated min-cost flow with integer
/// supplies and real arc costs. The spanning tree is stored with
/// parent/thread/successor-count arrays and pivots use block search for the
/// entering arc; the strongly feasible tree rule prevents cycling.
class NetworkSimplex {
 public:
  enum class Status { optimal, infeasible, unbounded };

  explicit NetworkSimplex(int node_num) : node_num_(node_num), supply_(node_num, 0) {
    if (node_num <= 0) throw std::invalid_argument("NetworkSimplex: node count must be positive");
  }

  int add_arc(int source, int target, double cost) {
    if (source < 0 || source >= node_num_ || target < 0 || target >= node_num_)
      throw std::out_of_range("NetworkSimplex: arc endpoint out of range");
    arc_source_.push_back(source);
    arc_target_.push_back(target);
    arc_cost_.push_back(cost);
    return static_cast<int>(arc_source_.size()) - 1;
  }

  void set_supply(int node, std::int64_t supply) { supply_.at(node) = supply; }

  [[nodiscard]] int node_num() const { return node_num_; }
  [[nodiscard]] int arc_num() const { return static_cast<int>(arc_source_.size()); }

  /// Solves; afterwards flow(), potential() and artificial_flow() are valid.
  Status run(double rc_tolerance = -1.0) {
    init(rc_tolerance);
    for (;;) {
      if (!find_entering_arc()) break;
      find_join_node();
      const bool change = find_leaving_arc();
      if (delta_ >= kInf) return status_ = Status::unbounded;
      change_flow(change);
      if (change) {
        update_tree_structure();
        update_potential();
      }
      ++pivots_;
    }
    artificial_flow_ = 0;
    for (int e = arc_num_; e != all_arc_num_; ++e) artificial_flow_ += flow_[e];
    return status_ = artificial_flow_ == 0 ? Status::optimal : Status::infeasible;
  }

  [[nodiscard]] std::int64_t flow(int arc) const { return flow_[arc]; }
  /// Node potential pi with reduced cost c_uv + pi_u - pi_v >= 0 at optimality.
  [[nodiscard]] double potential(int node) const { return pi_[node]; }
  [[nodiscard]] std::int64_t artificial_flow() const { return artificial_flow_; }
  [[nodiscard]] std::size_t pivots() const { return pivots_; }
  [[nodiscard]] Status status() const { return status_; }

  /// sum over real arcs of flow * cost, accumulated in arc order.
  [[nodiscard]] double total_cost() const {
    double c = 0.0;
    for (int e = 0; e != arc_num_; ++e)
      if (flow_[e] != 0) c += static_cast<double>(flow_[e]) * cost_[e];
    return c;
  }

 private:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  static constexpr int kStateTree = 0;
  static constexpr int kStateLower = 1;
  static constexpr int kDirUp = 1;
  static constexpr int kDirDown = -1;

  void init(double rc_tolerance) {
    arc_num_ = arc_num();
    all_arc_num_ = arc_num_ + node_num_;
    root_ = node_num_;
    const int nodes = node_num_ + 1;
    std::int64_t sum_supply = 0;
    for (auto s : supply_) sum_supply += s;
    if (sum_supply != 0) throw std::invalid_argument("NetworkSimplex: supplies must sum to zero");

    source_.assign(all_arc_num_, 0);
    target_.assign(all_arc_num_, 0);
    cost_.assign(all_arc_num_, 0.0);
    flow_.assign(all_arc_num_, 0);
    state_.assign(all_arc_num_, kStateLower);
    parent_.assign(nodes, -1);
    pred_.assign(nodes, -1);
    thread_.assign(nodes, 0);
    rev_thread_.assign(nodes, 0);
    succ_num_.assign(nodes, 0);
    last_succ_.assign(nodes, 0);
    pred_dir_.assign(nodes, kDirUp);
    pi_.assign(nodes, 0.0);

    double max_cost = 0.0;
    for (int e = 0; e != arc_num_; ++e) {
      source_[e] = arc_source_[e];
      target_[e] = arc_target_[e];
      cost_[e] = arc_cost_[e];
      max_cost = std::max(max_cost, std::abs(arc_cost_[e]));
    }
    const double art_cost = (max_cost + 1.0) * nodes;
    eps_ = rc_tolerance >= 0.0 ? rc_tolerance : 1e-12 * (max_cost + 1.0);

    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = nodes;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;
    for (int u = 0, e = arc_num_; u != node_num_; ++u, ++e) {
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kStateTree;
      if (supply_[u] >= 0) {
        pred_dir_[u] = kDirUp;
        pi_[u] = 0.0;
        source_[e] = u;
        target_[e] = root_;
        flow_[e] = supply_[u];
        cost_[e] = 0.0;
      } else {
        pred_dir_[u] = kDirDown;
        pi_[u] = art_cost;
        source_[e] = root_;
        target_[e] = u;
        flow_[e] = -supply_[u];
        cost_[e] = art_cost;
      }
    }
    block_size_ = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(all_arc_num_))));
    next_arc_ = 0;
    pivots_ = 0;
  }

  [[nodiscard]] double reduced(int e) const { return cost_[e] + pi_[source_[e]] - pi_[target_[e]]; }

  bool find_entering_arc() {
    double min = -eps_;
    int cnt = block_size_;
    int e;
    bool found = false;
    for (e = next_arc_; e != all_arc_num_; ++e) {
      const double c = state_[e] * reduced(e);
      if (c < min) {
        min = c;
        in_arc_ = e;
        found = true;
      }
      if (--cnt == 0) {
        if (found) goto search_end;
        cnt = block_size_;
      }
    }
    for (e = 0; e != next_arc_; ++e) {
      const double c = state_[e] * reduced(e);
      if (c < min) {
        min = c;
        in_arc_ = e;
        found = true;
      }
      if (--cnt == 0) {
        if (found) goto search_end;
        cnt = block_size_;
      }
    }
    if (!found) return false;
  search_end:
    next_arc_ = e;
    return true;
  }

  void find_join_node() {
    int u = source_[in_arc_];
    int v = target_[in_arc_];
    while (u != v) {
      if (succ_num_[u] < succ_num_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    join_ = u;
  }

  bool find_leaving_arc() {
    int first, second;
    if (state_[in_arc_] == kStateLower) {
      first = source_[in_arc_];
      second = target_[in_arc_];
    } else {
      first = target_[in_arc_];
      second = source_[in_arc_];
    }
    delta_ = kInf;
    int result = 0;
    for (int u = first; u != join_; u = parent_[u]) {
      const int e = pred_[u];
      const std::int64_t d = pred_dir_[u] == kDirDown ? kInf : flow_[e];
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (int u = second; u != join_; u = parent_[u]) {
      const int e = pred_[u];
      const std::int64_t d = pred_dir_[u] == kDirUp ? kInf : flow_[e];
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
    return result != 0;
  }

  void change_flow(bool change) {
    if (delta_ > 0) {
      const std::int64_t val = state_[in_arc_] * delta_;
      flow_[in_arc_] += val;
      for (int u = source_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] -= pred_dir_[u] * val;
      for (int u = target_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] += pred_dir_[u] * val;
    }
    if (change) {
      state_[in_arc_] = kStateTree;
      state_[pred_[u_out_]] = kStateLower;
    } else {
      state_[in_arc_] = -state_[in_arc_];
    }
  }

  void update_tree_structure() {
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
      if (thread_[v_in_] != u_out_) {
        int after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      const int thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];
      int stem = u_in_;
      int par_stem = v_in_;
      int last = last_succ_[u_in_];
      int after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        const int next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_revs_.push_back(last);
        const int before = rev_thread_[stem];
        thread_[before] = after;
        rev_thread_[after] = before;
        parent_[stem] = par_stem;
        par_stem = stem;
        stem = next_stem;
        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
        after = thread_[last];
      }
      parent_[u_out_] = par_stem;
      thread_[last] = thread_continue;
      rev_thread_[thread_continue] = last;
      last_succ_[u_out_] = last;
      if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }
      for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

      int tmp_sc = 0;
      const int tmp_ls = last_succ_[u_out_];
      for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        pred_dir_[u] = -pred_dir_[p];
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
      succ_num_[u_in_] = old_succ_num;
    }

    const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const int last_succ_out = last_succ_[u_out_];
    for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) last_succ_[u] = last_succ_out;

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_out;
    }

    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  int node_num_;
  std::vector<std::int64_t> supply_;
  std::vector<int> arc_source_, arc_target_;
  std::vector<double> arc_cost_;

  int arc_num_ = 0, all_arc_num_ = 0, root_ = 0;
  std::vector<int> source_, target_, state_;
  std::vector<double> cost_, pi_;
  std::vector<std::int64_t> flow_;
  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, pred_dir_, dirty_revs_;
  int block_size_ = 10, next_arc_ = 0;
  int in_arc_ = 0, join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  std::int64_t delta_ = 0;
  double eps_ = 0.0;
  std::int64_t artificial_flow_ = 0;
  std::size_t pivots_ = 0;
  Status status_ = Status::optimal;
};

}  // namespace laguerre::transport
