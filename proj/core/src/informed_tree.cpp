#include "plumesearch/informed_tree.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace plumesearch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// Uniform bucket grid for fixed-radius neighbour queries over the sample set.
class BucketIndex {
 public:
  BucketIndex(const std::vector<WorldPoint>& pts, double bucket_size)
      : pts_(pts), size_(std::max(bucket_size, 1e-9)) {
    if (pts.empty()) return;
    min_x_ = max_x_ = pts[0].x;
    min_y_ = max_y_ = pts[0].y;
    for (const WorldPoint& p : pts) {
      min_x_ = std::min(min_x_, p.x);
      max_x_ = std::max(max_x_, p.x);
      min_y_ = std::min(min_y_, p.y);
      max_y_ = std::max(max_y_, p.y);
    }
    nx_ = static_cast<int>((max_x_ - min_x_) / size_) + 1;
    ny_ = static_cast<int>((max_y_ - min_y_) / size_) + 1;
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      buckets_[bucket_of(pts[static_cast<std::size_t>(i)])].push_back(i);
    }
  }

  // Indices within `radius` of p, ascending; excludes `exclude`.
  void query(const WorldPoint& p, double radius, int exclude, std::vector<int>& out) const {
    out.clear();
    if (pts_.empty()) return;
    const int cx0 = std::max(0, static_cast<int>((p.x - radius - min_x_) / size_));
    const int cx1 = std::min(nx_ - 1, static_cast<int>((p.x + radius - min_x_) / size_));
    const int cy0 = std::max(0, static_cast<int>((p.y - radius - min_y_) / size_));
    const int cy1 = std::min(ny_ - 1, static_cast<int>((p.y + radius - min_y_) / size_));
    const double r2 = radius * radius;
    for (int cy = cy0; cy <= cy1; ++cy) {
      for (int cx = cx0; cx <= cx1; ++cx) {
        for (int i : buckets_[static_cast<std::size_t>(cy) * nx_ + cx]) {
          if (i == exclude) continue;
          const WorldPoint& q = pts_[static_cast<std::size_t>(i)];
          const double dx = q.x - p.x, dy = q.y - p.y;
          if (dx * dx + dy * dy <= r2) out.push_back(i);
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::size_t bucket_of(const WorldPoint& p) const {
    const int cx = std::clamp(static_cast<int>((p.x - min_x_) / size_), 0, nx_ - 1);
    const int cy = std::clamp(static_cast<int>((p.y - min_y_) / size_), 0, ny_ - 1);
    return static_cast<std::size_t>(cy) * nx_ + cx;
  }

  const std::vector<WorldPoint>& pts_;
  double size_;
  double min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

// Lebesgue measure estimate of the informed set for the RGG radius: the
// 2D ellipse once a solution exists, free-space area otherwise.
double informed_measure(const Tree& tree, const OccupancyGrid& grid) {
  const double free_area = grid.free_area();
  if (!std::isfinite(tree.c_best)) return free_area;
  const double c_min = distance(tree.root, tree.goal_estimate);
  const double disc = tree.c_best * tree.c_best - c_min * c_min;
  if (!(disc > 0.0)) return free_area;
  return std::min(free_area, kPi / 4.0 * tree.c_best * std::sqrt(disc));
}

}  // namespace

double Tree::h_hat(const WorldPoint& p) const {
  double best = kInf;
  for (const WorldPoint& g : goal_set) best = std::min(best, distance(p, g));
  return best;
}

double rgg_radius(double sample_count, double measure, double kappa, int dimension) {
  if (!(sample_count >= 2.0)) throw std::invalid_argument("rgg_radius: sample_count must be >= 2");
  if (!(measure > 0.0)) throw std::invalid_argument("rgg_radius: measure must be > 0");
  const double n = dimension;
  const double zeta = std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  return 2.0 * kappa * std::pow(1.0 + 1.0 / n, 1.0 / n) * std::pow(measure / zeta, 1.0 / n) *
         std::pow(std::log(sample_count) / sample_count, 1.0 / n);
}

Tree expand_tree(const std::vector<WorldPoint>& samples, const WorldPoint& root, const WorldPoint& goal_estimate,
                 const OccupancyGrid& grid, const PlannerConfig& config) {
  if (!is_free(grid, root)) throw std::invalid_argument("expand_tree: root is not in free space");

  Tree tree;
  tree.root = root;
  tree.goal_estimate = goal_estimate;
  tree.points.push_back(root);
  tree.parent.push_back(-1);
  tree.cost.push_back(0.0);

  const int m = static_cast<int>(samples.size());

  // Goal set: the k_n samples nearest the goal estimate.
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  const int kn = std::min(config.k_n, m);
  std::partial_sort(order.begin(), order.begin() + kn, order.end(), [&](int a, int b) {
    const double da = distance(samples[static_cast<std::size_t>(a)], goal_estimate);
    const double db = distance(samples[static_cast<std::size_t>(b)], goal_estimate);
    return da != db ? da < db : a < b;
  });
  std::vector<char> is_goal(static_cast<std::size_t>(m), 0);
  for (int k = 0; k < kn; ++k) {
    tree.goal_set.push_back(samples[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
    is_goal[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;
  }
  if (m == 0) return tree;

  // Static heuristics per sample.
  std::vector<double> h_hat(static_cast<std::size_t>(m));
  std::vector<double> f_hat(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    h_hat[static_cast<std::size_t>(i)] = tree.h_hat(samples[static_cast<std::size_t>(i)]);
    f_hat[static_cast<std::size_t>(i)] =
        tree.g_hat(samples[static_cast<std::size_t>(i)]) + h_hat[static_cast<std::size_t>(i)];
  }

  const double r = rgg_radius(std::max(m, 2), grid.free_area(), config.kappa, config.dimension);
  BucketIndex index(samples, r);

  std::vector<int> vertex_of(static_cast<std::size_t>(m), -1);  // sample -> tree vertex
  std::vector<int> sample_of{-1};                               // tree vertex -> sample
  std::vector<std::vector<int>> children{{}};

  // Vertex queue keyed by (static f_hat, insertion sequence).
  using QItem = std::pair<std::pair<double, int>, int>;  // ((f_hat, seq), vertex)
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> q_vertex;
  int seq = 0;
  q_vertex.push({{tree.h_hat(root), seq++}, 0});

  bool goal_connected = false;
  std::vector<int> near;
  std::vector<std::pair<double, int>> edge_queue;  // (c_hat + h_hat, sample)

  while (!q_vertex.empty() && !goal_connected) {
    const int v = q_vertex.top().second;
    q_vertex.pop();

    index.query(tree.points[static_cast<std::size_t>(v)], r, sample_of[static_cast<std::size_t>(v)], near);
    edge_queue.clear();
    for (int w : near) {
      edge_queue.emplace_back(distance(tree.points[static_cast<std::size_t>(v)], samples[static_cast<std::size_t>(w)]) +
                                  h_hat[static_cast<std::size_t>(w)],
                              w);
    }
    std::sort(edge_queue.begin(), edge_queue.end());

    for (const auto& [key, w] : edge_queue) {
      (void)key;
      const WorldPoint& wp = samples[static_cast<std::size_t>(w)];
      const double edge = distance(tree.points[static_cast<std::size_t>(v)], wp);
      const int wv = vertex_of[static_cast<std::size_t>(w)];
      const double g_w = wv >= 0 ? tree.cost[static_cast<std::size_t>(wv)] : kInf;
      const double g_new = tree.cost[static_cast<std::size_t>(v)] + edge;
      if (!(g_new < g_w)) continue;
      if (!segment_free(grid, tree.points[static_cast<std::size_t>(v)], wp)) continue;

      if (wv >= 0) {
        // Rewire: swap the parent edge and push the improvement down the
        // subtree.
        const int old_parent = tree.parent[static_cast<std::size_t>(wv)];
        auto& siblings = children[static_cast<std::size_t>(old_parent)];
        siblings.erase(std::find(siblings.begin(), siblings.end(), wv));
        tree.parent[static_cast<std::size_t>(wv)] = v;
        children[static_cast<std::size_t>(v)].push_back(wv);
        const double delta = g_new - tree.cost[static_cast<std::size_t>(wv)];
        std::vector<int> stack{wv};
        while (!stack.empty()) {
          const int u = stack.back();
          stack.pop_back();
          tree.cost[static_cast<std::size_t>(u)] += delta;
          for (int ch : children[static_cast<std::size_t>(u)]) stack.push_back(ch);
        }
      } else {
        const int nv = tree.size();
        tree.points.push_back(wp);
        tree.parent.push_back(v);
        tree.cost.push_back(g_new);
        sample_of.push_back(w);
        children[static_cast<std::size_t>(v)].push_back(nv);
        children.emplace_back();
        vertex_of[static_cast<std::size_t>(w)] = nv;
        q_vertex.push({{f_hat[static_cast<std::size_t>(w)], seq++}, nv});
        if (is_goal[static_cast<std::size_t>(w)]) goal_connected = true;
      }
    }
  }

  tree.c_best = kInf;
  for (int i = 0; i < m; ++i) {
    if (!is_goal[static_cast<std::size_t>(i)]) continue;
    const int wv = vertex_of[static_cast<std::size_t>(i)];
    if (wv >= 0) tree.c_best = std::min(tree.c_best, tree.cost[static_cast<std::size_t>(wv)]);
  }
  return tree;
}

namespace {

// Rebuild the tree keeping only the flagged vertices (root must be flagged).
// Parent indices can exceed child indices after rewiring, so remap first.
void compact(Tree& tree, const std::vector<char>& keep) {
  const int n = tree.size();
  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    if (keep[static_cast<std::size_t>(v)]) remap[static_cast<std::size_t>(v)] = next++;
  }
  Tree out;
  out.root = tree.root;
  out.goal_set = tree.goal_set;
  out.goal_estimate = tree.goal_estimate;
  out.c_best = tree.c_best;
  out.blossom_shortfall = tree.blossom_shortfall;
  for (int v = 0; v < n; ++v) {
    if (!keep[static_cast<std::size_t>(v)]) continue;
    out.points.push_back(tree.points[static_cast<std::size_t>(v)]);
    const int p = tree.parent[static_cast<std::size_t>(v)];
    out.parent.push_back(p < 0 ? -1 : remap[static_cast<std::size_t>(p)]);
    out.cost.push_back(tree.cost[static_cast<std::size_t>(v)]);
  }
  tree = std::move(out);
}

}  // namespace

void prune(Tree& tree, double c_best) {
  if (!std::isfinite(c_best)) return;
  const int n = tree.size();
  // keep: 0 unknown, 1 keep, 2 drop. A vertex survives iff f_hat <= c_best
  // and its whole ancestor chain survives.
  std::vector<char> state(static_cast<std::size_t>(n), 0);
  state[0] = 1;
  for (int v = 1; v < n; ++v) {
    if (state[static_cast<std::size_t>(v)] != 0) continue;
    std::vector<int> chain;
    int u = v;
    while (state[static_cast<std::size_t>(u)] == 0) {
      chain.push_back(u);
      u = tree.parent[static_cast<std::size_t>(u)];
    }
    char verdict = state[static_cast<std::size_t>(u)];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      if (verdict == 1 && tree.f_hat(tree.points[static_cast<std::size_t>(*it)]) > c_best) verdict = 2;
      state[static_cast<std::size_t>(*it)] = verdict;
    }
  }
  std::vector<char> keep(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) keep[static_cast<std::size_t>(v)] = state[static_cast<std::size_t>(v)] == 1;
  compact(tree, keep);
}

void blossom(Tree& tree, const SampleDistribution& dist, double sigma_loc, const PlannerConfig& config,
             const OccupancyGrid& grid, Rng& rng) {
  const int target = config.sigma_count;
  if (tree.non_root_count() >= target) return;

  const double bound = tree.c_best + 2.0 * sigma_loc;  // expanded ellipse
  int retries = config.blossom_retry_factor * config.sigma_count;
  std::vector<std::pair<std::pair<double, std::pair<double, int>>, int>> near;  // ((dist, (g, idx)), v)

  while (tree.non_root_count() < target && retries > 0) {
    --retries;
    const WorldPoint x = draw_samples(dist, grid, 1, rng)[0];
    if (std::isfinite(tree.c_best) && tree.f_hat(x) > bound) continue;

    const double measure = informed_measure(tree, grid);
    const double r = rgg_radius(std::max(tree.size(), 2), measure, config.kappa, config.dimension);

    near.clear();
    for (int v = 0; v < tree.size(); ++v) {
      const double dv = distance(x, tree.points[static_cast<std::size_t>(v)]);
      if (dv <= r) near.push_back({{dv, {tree.cost[static_cast<std::size_t>(v)], v}}, v});
    }
    std::sort(near.begin(), near.end());

    int x_vertex = -1;
    for (const auto& item : near) {
      const int v = item.second;
      const double edge = item.first.first;
      const double g_new = tree.cost[static_cast<std::size_t>(v)] + edge;
      const double g_x = x_vertex >= 0 ? tree.cost[static_cast<std::size_t>(x_vertex)] : kInf;
      if (!(g_new < g_x)) continue;
      if (!segment_free(grid, x, tree.points[static_cast<std::size_t>(v)])) continue;
      if (x_vertex < 0) {
        x_vertex = tree.size();
        tree.points.push_back(x);
        tree.parent.push_back(v);
        tree.cost.push_back(g_new);
      } else {
        tree.parent[static_cast<std::size_t>(x_vertex)] = v;
        tree.cost[static_cast<std::size_t>(x_vertex)] = g_new;
      }
    }
  }
  tree.blossom_shortfall = std::max(0, target - tree.non_root_count());
}

void cull(Tree& tree, const PlannerConfig& config) {
  const int target = config.sigma_count;
  if (tree.non_root_count() <= target) return;

  std::vector<int> order;
  for (int v = 1; v < tree.size(); ++v) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ga = tree.cost[static_cast<std::size_t>(a)], gb = tree.cost[static_cast<std::size_t>(b)];
    return ga != gb ? ga < gb : a < b;
  });

  std::vector<char> keep(static_cast<std::size_t>(tree.size()), 0);
  keep[0] = 1;
  int kept = 0;
  // Parents have strictly lower cost, so one ascending pass keeps the tree
  // connected; extra passes only matter for degenerate zero-length edges.
  bool progress = true;
  while (kept < target && progress) {
    progress = false;
    for (int v : order) {
      if (kept >= target) break;
      if (keep[static_cast<std::size_t>(v)]) continue;
      if (!keep[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(v)])]) continue;
      keep[static_cast<std::size_t>(v)] = 1;
      ++kept;
      progress = true;
    }
  }
  compact(tree, keep);
}

std::vector<CandidatePath> extract_paths(const Tree& tree, const PlannerConfig& config) {
  std::vector<CandidatePath> paths;
  for (int v = 1; v < tree.size(); ++v) {
    if (tree.cost[static_cast<std::size_t>(v)] > config.c_bar) continue;
    CandidatePath path;
    path.length = tree.cost[static_cast<std::size_t>(v)];
    std::vector<int> chain;
    for (int u = v; u >= 0; u = tree.parent[static_cast<std::size_t>(u)]) chain.push_back(u);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      path.waypoints.push_back(tree.points[static_cast<std::size_t>(*it)]);
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

Tree build_candidate_tree(const std::vector<WorldPoint>& samples, const WorldPoint& root,
                          const WorldPoint& goal_estimate, double sigma_loc, const OccupancyGrid& grid,
                          const SampleDistribution& dist, const PlannerConfig& config, Rng& rng) {
  Tree tree = expand_tree(samples, root, goal_estimate, grid, config);
  prune(tree, tree.c_best);
  if (tree.non_root_count() < config.sigma_count) {
    blossom(tree, dist, sigma_loc, config, grid, rng);
  } else if (tree.non_root_count() > config.sigma_count) {
    cull(tree, config);
  }
  return tree;
}

}  // namespace plumesearch
