#include "camo/transport.hpp"

#include "camo/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace camo
{
namespace
{

constexpr signed char kStateUpper = -1;
constexpr signed char kStateTree = 0;
constexpr signed char kStateLower = 1;
constexpr signed char kDirUp = 1;
constexpr signed char kDirDown = -1;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Uncapacitated network simplex over a complete bipartite graph plus one
// artificial arc per node to the root. Arc layout: real arc (i, j) has index
// i * demand_count + j; artificial arc of node u has index arc_count + u.
class NetworkSimplex
{
public:
  NetworkSimplex(std::span<const double> supply, std::span<const double> demand, const Eigen::MatrixXd& cost)
    : ns_(static_cast<int>(supply.size())), nd_(static_cast<int>(demand.size())), node_count_(ns_ + nd_),
      arc_count_(static_cast<long>(ns_) * nd_), root_(node_count_)
  {
    const long all_arcs = arc_count_ + node_count_;
    source_.resize(all_arcs);
    target_.resize(all_arcs);
    cost_.resize(all_arcs);
    flow_.assign(all_arcs, 0.0);
    state_.assign(all_arcs, kStateLower);

    double max_cost = 0.0;
    for (int i = 0; i < ns_; ++i)
    {
      for (int j = 0; j < nd_; ++j)
      {
        const long e = static_cast<long>(i) * nd_ + j;
        source_[e] = i;
        target_[e] = ns_ + j;
        cost_[e] = cost(i, j);
        max_cost = std::max(max_cost, std::abs(cost_[e]));
      }
    }
    cost_scale_ = std::max(1.0, max_cost);

    const int n = node_count_ + 1;
    parent_.resize(n);
    pred_.resize(n);
    thread_.resize(n);
    rev_thread_.resize(n);
    succ_num_.resize(n);
    last_succ_.resize(n);
    pred_dir_.resize(n);
    pi_.resize(n);

    const double art_cost = (max_cost + 1.0) * node_count_;
    for (int u = 0; u < node_count_; ++u)
    {
      const long e = arc_count_ + u;
      const double s = u < ns_ ? supply[u] : -demand[u - ns_];
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kStateTree;
      if (s >= 0)
      {
        pred_dir_[u] = kDirUp;
        pi_[u] = 0.0;
        source_[e] = u;
        target_[e] = root_;
        flow_[e] = s;
        cost_[e] = 0.0;
      }
      else
      {
        pred_dir_[u] = kDirDown;
        pi_[u] = art_cost;
        source_[e] = root_;
        target_[e] = u;
        flow_[e] = -s;
        cost_[e] = art_cost;
      }
    }
    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = node_count_ + 1;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;

    block_size_ = std::max<long>(10, static_cast<long>(std::sqrt(static_cast<double>(arc_count_))));
  }

  long run()
  {
    long iterations = 0;
    const long limit = 1000L + 50L * (arc_count_ + node_count_);
    while (find_entering_arc())
    {
      find_join_node();
      find_leaving_arc();
      if (delta_ == kInf) throw Error(ErrorKind::InvalidInput, "transport problem is unbounded");
      change_flow();
      update_tree_structure();
      update_potential();
      if (++iterations > limit) throw Error(ErrorKind::InvalidInput, "network simplex failed to converge");
    }
    return iterations;
  }

  double total_cost() const
  {
    double total = 0.0;
    for (long e = 0; e < arc_count_; ++e)
    {
      if (flow_[e] != 0.0) total += flow_[e] * cost_[e];
    }
    return total;
  }

  double flow(int i, int j) const { return flow_[static_cast<long>(i) * nd_ + j]; }

private:
  bool find_entering_arc()
  {
    const double tol = -1e-12 * cost_scale_;
    double min = tol;
    long cnt = block_size_;
    long e = next_arc_;
    bool found = false;
    for (long k = 0; k < arc_count_; ++k)
    {
      const double c = state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
      if (c < min)
      {
        min = c;
        in_arc_ = e;
        found = true;
      }
      if (++e == arc_count_) e = 0;
      if (--cnt == 0)
      {
        if (found) break;
        cnt = block_size_;
      }
    }
    next_arc_ = e;
    return found;
  }

  void find_join_node()
  {
    int u = source_[in_arc_];
    int v = target_[in_arc_];
    while (u != v)
    {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  void find_leaving_arc()
  {
    int first, second;
    if (state_[in_arc_] == kStateLower)
    {
      first = source_[in_arc_];
      second = target_[in_arc_];
    }
    else
    {
      first = target_[in_arc_];
      second = source_[in_arc_];
    }
    delta_ = kInf;
    int result = 0;
    for (int u = first; u != join_; u = parent_[u])
    {
      const long e = pred_[u];
      const double d = pred_dir_[u] == kDirDown ? kInf : flow_[e];
      if (d < delta_)
      {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (int u = second; u != join_; u = parent_[u])
    {
      const long e = pred_[u];
      const double d = pred_dir_[u] == kDirUp ? kInf : flow_[e];
      if (d <= delta_)
      {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1)
    {
      u_in_ = first;
      v_in_ = second;
    }
    else
    {
      u_in_ = second;
      v_in_ = first;
    }
  }

  void change_flow()
  {
    if (delta_ > 0)
    {
      const double val = state_[in_arc_] * delta_;
      flow_[in_arc_] += val;
      for (int u = source_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] -= pred_dir_[u] * val;
      for (int u = target_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] += pred_dir_[u] * val;
    }
    state_[in_arc_] = kStateTree;
    // Uncapacitated: the leaving arc is always a decreasing arc driven to zero.
    flow_[pred_[u_out_]] = 0.0;
    state_[pred_[u_out_]] = kStateLower;
  }

  void update_tree_structure()
  {
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_)
    {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;

      if (thread_[v_in_] != u_out_)
      {
        int after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    }
    else
    {
      const int thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

      int stem = u_in_;
      int par_stem = v_in_;
      int next_stem;
      int last = last_succ_[u_in_];
      int before, after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_)
      {
        next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_revs_.push_back(last);

        before = rev_thread_[stem];
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

      if (old_rev_thread != v_in_)
      {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }

      for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

      int tmp_sc = 0;
      const int tmp_ls = last_succ_[u_out_];
      for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u])
      {
        pred_[u] = pred_[p];
        pred_dir_[u] = static_cast<signed char>(-pred_dir_[p]);
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

    if (join_ != old_rev_thread && v_in_ != old_rev_thread)
    {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    }
    else if (last_succ_out != old_last_succ)
    {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_out;
    }

    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential()
  {
    const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  int ns_;
  int nd_;
  int node_count_;
  long arc_count_;
  int root_;
  double cost_scale_ = 1.0;
  long block_size_ = 10;
  long next_arc_ = 0;

  std::vector<int> source_;
  std::vector<int> target_;
  std::vector<double> cost_;
  std::vector<double> flow_;
  std::vector<signed char> state_;

  std::vector<int> parent_;
  std::vector<long> pred_;
  std::vector<int> thread_;
  std::vector<int> rev_thread_;
  std::vector<int> succ_num_;
  std::vector<int> last_succ_;
  std::vector<signed char> pred_dir_;
  std::vector<double> pi_;
  std::vector<int> dirty_revs_;

  long in_arc_ = 0;
  int join_ = 0;
  int u_in_ = 0;
  int v_in_ = 0;
  int u_out_ = 0;
  int v_out_ = 0;
  double delta_ = 0.0;
};

}  // namespace

TransportResult solve_transport(std::span<const double> supply, std::span<const double> demand,
                                const Eigen::MatrixXd& cost, bool want_plan)
{
  if (cost.rows() != static_cast<Eigen::Index>(supply.size()) ||
      cost.cols() != static_cast<Eigen::Index>(demand.size()))
  {
    throw Error(ErrorKind::DimensionMismatch, "cost matrix does not match supply/demand sizes");
  }
  double supply_total = 0.0, demand_total = 0.0;
  for (double s : supply)
  {
    if (!(s >= 0) || !std::isfinite(s)) throw Error(ErrorKind::InvalidInput, "supplies must be finite and >= 0");
    supply_total += s;
  }
  for (double d : demand)
  {
    if (!(d >= 0) || !std::isfinite(d)) throw Error(ErrorKind::InvalidInput, "demands must be finite and >= 0");
    demand_total += d;
  }
  if (!(supply_total > 0) || !(demand_total > 0)) throw Error(ErrorKind::ZeroMass, "transport with zero mass");
  if (std::abs(supply_total - demand_total) > 1e-6 * supply_total)
  {
    throw Error(ErrorKind::InvalidInput, "unbalanced transport problem");
  }

  // Drop zero-mass nodes.
  std::vector<int> rows, cols;
  std::vector<double> s, d;
  for (std::size_t i = 0; i < supply.size(); ++i)
  {
    if (supply[i] > 0)
    {
      rows.push_back(static_cast<int>(i));
      s.push_back(supply[i]);
    }
  }
  const double scale = supply_total / demand_total;
  for (std::size_t j = 0; j < demand.size(); ++j)
  {
    if (demand[j] > 0)
    {
      cols.push_back(static_cast<int>(j));
      d.push_back(demand[j] * scale);
    }
  }
  Eigen::MatrixXd reduced(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) reduced(i, j) = cost(rows[i], cols[j]);

  NetworkSimplex solver(s, d, reduced);
  TransportResult result;
  result.iterations = solver.run();
  result.cost = solver.total_cost();
  if (want_plan)
  {
    result.plan = Eigen::MatrixXd::Zero(supply.size(), demand.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) result.plan(rows[i], cols[j]) = solver.flow(i, j);
  }
  return result;
}

}  // namespace camo
