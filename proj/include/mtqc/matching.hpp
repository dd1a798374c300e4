#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

// Maximum-weight matching on general graphs (dense O(V^3) blossom algorithm
// with dual variables and lazy slack tracking). Vertices may stay unmatched;
// only edges with positive weight are ever used. This is the classical
// primal-dual formulation: labels start at the maximum edge weight, each
// phase either augments along a tight path or terminates when some exposed
// vertex's label reaches zero.

namespace mtqc {

struct MatchingSolution {
  std::int64_t total_weight = 0;
  std::vector<int> mate;  // mate[v] partner vertex, -1 when unmatched
};

class MaxWeightMatching {
 public:
  explicit MaxWeightMatching(int num_vertices) : n_(num_vertices) {
    if (num_vertices < 0) throw std::invalid_argument("vertex count must be >= 0");
    int cap = 2 * n_ + 2;
    g_.assign(static_cast<std::size_t>(cap) * cap, Edge{});
    for (int u = 1; u <= n_; ++u)
      for (int v = 1; v <= n_; ++v) edge(u, v) = Edge{u, v, 0};
    lab_.assign(cap, 0);
    match_.assign(cap, 0);
    slack_.assign(cap, 0);
    st_.assign(cap, 0);
    pa_.assign(cap, 0);
    s_.assign(cap, -1);
    vis_.assign(cap, 0);
    flower_.assign(cap, {});
    flower_from_.assign(static_cast<std::size_t>(cap) * (n_ + 1), 0);
  }

  // 0-based endpoints; nonpositive weights and self loops are ignored, and
  // parallel edges keep the heaviest weight.
  void add_edge(int u, int v, std::int64_t w) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_)
      throw std::invalid_argument("edge endpoint out of range");
    if (u == v || w <= 0) return;
    Edge& e = edge(u + 1, v + 1);
    e.w = std::max(e.w, w);
    edge(v + 1, u + 1).w = e.w;
  }

  MatchingSolution solve() {
    MatchingSolution out;
    out.mate.assign(n_, -1);
    if (n_ < 2) return out;

    n_x_ = n_;
    std::int64_t w_max = 0;
    for (int u = 1; u <= n_; ++u) {
      st_[u] = u;
      match_[u] = 0;
      flower_[u].clear();
      for (int v = 0; v <= n_; ++v) flower_from(u, v) = (u == v) ? u : 0;
      for (int v = 1; v <= n_; ++v) w_max = std::max(w_max, edge(u, v).w);
    }
    for (int u = 1; u <= n_; ++u) lab_[u] = w_max;

    while (run_phase()) {
    }

    for (int u = 1; u <= n_; ++u)
      if (match_[u] && edge(u, match_[u]).w > 0) {
        out.mate[u - 1] = match_[u] - 1;
        if (u < match_[u]) out.total_weight += edge(u, match_[u]).w;
      }
    return out;
  }

 private:
  struct Edge {
    int u = 0, v = 0;
    std::int64_t w = 0;
  };

  Edge& edge(int u, int v) { return g_[static_cast<std::size_t>(u) * (2 * n_ + 2) + v]; }
  int& flower_from(int b, int x) {
    return flower_from_[static_cast<std::size_t>(b) * (n_ + 1) + x];
  }

  std::int64_t slack_of(const Edge& e) const {
    return lab_[e.u] + lab_[e.v] - g_[static_cast<std::size_t>(e.u) * (2 * n_ + 2) + e.v].w * 2;
  }

  void update_slack(int u, int x) {
    if (!slack_[x] || slack_of(edge(u, x)) < slack_of(edge(slack_[x], x))) slack_[x] = u;
  }

  void set_slack(int x) {
    slack_[x] = 0;
    for (int u = 1; u <= n_; ++u)
      if (edge(u, x).w > 0 && st_[u] != x && s_[st_[u]] == 0) update_slack(u, x);
  }

  void queue_push(int x) {
    if (x <= n_) {
      q_.push_back(x);
    } else {
      for (int i : flower_[x]) queue_push(i);
    }
  }

  void set_st(int x, int b) {
    st_[x] = b;
    if (x > n_)
      for (int i : flower_[x]) set_st(i, b);
  }

  int get_pr(int b, int xr) {
    int pr = static_cast<int>(std::find(flower_[b].begin(), flower_[b].end(), xr) -
                              flower_[b].begin());
    if (pr % 2 == 1) {  // walk the stem the other way so the prefix has even length
      std::reverse(flower_[b].begin() + 1, flower_[b].end());
      return static_cast<int>(flower_[b].size()) - pr;
    }
    return pr;
  }

  void set_match(int u, int v) {
    match_[u] = edge(u, v).v;
    if (u <= n_) return;
    Edge e = edge(u, v);
    int xr = flower_from(u, e.u);
    int pr = get_pr(u, xr);
    for (int i = 0; i < pr; ++i) set_match(flower_[u][i], flower_[u][i ^ 1]);
    set_match(xr, v);
    std::rotate(flower_[u].begin(), flower_[u].begin() + pr, flower_[u].end());
  }

  void augment(int u, int v) {
    while (true) {
      int xnv = st_[match_[u]];
      set_match(u, v);
      if (!xnv) return;
      set_match(xnv, st_[pa_[xnv]]);
      u = st_[pa_[xnv]];
      v = xnv;
    }
  }

  int get_lca(int u, int v) {
    for (++vis_stamp_; u || v; std::swap(u, v)) {
      if (u == 0) continue;
      if (vis_[u] == vis_stamp_) return u;
      vis_[u] = vis_stamp_;
      u = st_[match_[u]];
      if (u) u = st_[pa_[u]];
    }
    return 0;
  }

  void add_blossom(int u, int lca, int v) {
    int b = n_ + 1;
    while (b <= n_x_ && st_[b]) ++b;
    if (b > n_x_) ++n_x_;
    lab_[b] = 0;
    s_[b] = 0;
    match_[b] = match_[lca];
    flower_[b].clear();
    flower_[b].push_back(lca);
    for (int x = u, y; x != lca; x = st_[pa_[y]]) {
      flower_[b].push_back(x);
      flower_[b].push_back(y = st_[match_[x]]);
      queue_push(y);
    }
    std::reverse(flower_[b].begin() + 1, flower_[b].end());
    for (int x = v, y; x != lca; x = st_[pa_[y]]) {
      flower_[b].push_back(x);
      flower_[b].push_back(y = st_[match_[x]]);
      queue_push(y);
    }
    set_st(b, b);
    for (int x = 1; x <= n_x_; ++x) edge(b, x).w = edge(x, b).w = 0;
    for (int x = 0; x <= n_; ++x) flower_from(b, x) = 0;
    for (int xs : flower_[b]) {
      for (int x = 1; x <= n_x_; ++x)
        if (edge(b, x).w == 0 || slack_of(edge(xs, x)) < slack_of(edge(b, x))) {
          edge(b, x) = edge(xs, x);
          edge(x, b) = edge(x, xs);
        }
      for (int x = 1; x <= n_; ++x)
        if (flower_from(xs, x)) flower_from(b, x) = xs;
    }
    set_slack(b);
  }

  void expand_blossom(int b) {
    for (int xs : flower_[b]) set_st(xs, xs);
    int xr = flower_from(b, edge(b, pa_[b]).u);
    int pr = get_pr(b, xr);
    for (int i = 0; i < pr; i += 2) {
      int xs = flower_[b][i], xns = flower_[b][i + 1];
      pa_[xs] = edge(xns, xs).u;
      s_[xs] = 1;
      s_[xns] = 0;
      slack_[xs] = 0;
      set_slack(xns);
      queue_push(xns);
    }
    s_[xr] = 1;
    pa_[xr] = pa_[b];
    for (std::size_t i = pr + 1; i < flower_[b].size(); ++i) {
      int xs = flower_[b][i];
      s_[xs] = -1;
      set_slack(xs);
    }
    st_[b] = 0;
  }

  bool on_found_edge(const Edge& e) {
    int u = st_[e.u], v = st_[e.v];
    if (s_[v] == -1) {
      pa_[v] = e.u;
      s_[v] = 1;
      int nu = st_[match_[v]];
      slack_[v] = slack_[nu] = 0;
      s_[nu] = 0;
      queue_push(nu);
    } else if (s_[v] == 0) {
      int lca = get_lca(u, v);
      if (!lca) {
        augment(u, v);
        augment(v, u);
        return true;
      }
      add_blossom(u, lca, v);
    }
    return false;
  }

  bool run_phase() {
    std::fill(s_.begin() + 1, s_.begin() + n_x_ + 1, -1);
    std::fill(slack_.begin() + 1, slack_.begin() + n_x_ + 1, 0);
    q_.clear();
    for (int x = 1; x <= n_x_; ++x)
      if (st_[x] == x && !match_[x]) {
        pa_[x] = 0;
        s_[x] = 0;
        queue_push(x);
      }
    if (q_.empty()) return false;

    while (true) {
      while (!q_.empty()) {
        int u = q_.front();
        q_.pop_front();
        if (s_[st_[u]] == 1) continue;
        for (int v = 1; v <= n_; ++v)
          if (edge(u, v).w > 0 && st_[u] != st_[v]) {
            if (slack_of(edge(u, v)) == 0) {
              if (on_found_edge(edge(u, v))) return true;
            } else {
              update_slack(u, st_[v]);
            }
          }
      }
      std::int64_t d = std::numeric_limits<std::int64_t>::max();
      for (int b = n_ + 1; b <= n_x_; ++b)
        if (st_[b] == b && s_[b] == 1) d = std::min(d, lab_[b] / 2);
      for (int x = 1; x <= n_x_; ++x)
        if (st_[x] == x && slack_[x]) {
          if (s_[x] == -1)
            d = std::min(d, slack_of(edge(slack_[x], x)));
          else if (s_[x] == 0)
            d = std::min(d, slack_of(edge(slack_[x], x)) / 2);
        }
      for (int u = 1; u <= n_; ++u) {
        if (s_[st_[u]] == 0) {
          if (lab_[u] <= d) return false;
          lab_[u] -= d;
        } else if (s_[st_[u]] == 1) {
          lab_[u] += d;
        }
      }
      for (int b = n_ + 1; b <= n_x_; ++b)
        if (st_[b] == b) {
          if (s_[b] == 0)
            lab_[b] += d * 2;
          else if (s_[b] == 1)
            lab_[b] -= d * 2;
        }
      q_.clear();
      for (int x = 1; x <= n_x_; ++x)
        if (st_[x] == x && slack_[x] && st_[slack_[x]] != x &&
            slack_of(edge(slack_[x], x)) == 0)
          if (on_found_edge(edge(slack_[x], x))) return true;
      for (int b = n_ + 1; b <= n_x_; ++b)
        if (st_[b] == b && s_[b] == 1 && lab_[b] == 0) expand_blossom(b);
    }
  }

  int n_ = 0;
  int n_x_ = 0;
  std::vector<Edge> g_;
  std::vector<std::int64_t> lab_;
  std::vector<int> match_, slack_, st_, pa_, s_, vis_;
  std::vector<std::vector<int>> flower_;
  std::vector<int> flower_from_;
  std::deque<int> q_;
  int vis_stamp_ = 0;
};

}  // namespace mtqc
