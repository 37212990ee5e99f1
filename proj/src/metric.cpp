#include "chainforge/metric.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <queue>
#include <string>

namespace chainforge {

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::vector<Rational>> rows, Check check)
    : n_(rows.size()), d_(n_ * n_) {
  for (std::size_t i = 0; i < n_; ++i) {
    if (rows[i].size() != n_)
      throw InputError("distance matrix row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < n_; ++j) d_[i * n_ + j] = std::move(rows[i][j]);
  }
  bool first = true;
  for (std::size_t i = 0; i < n_; ++i) {
    if (sgn(d_[i * n_ + i]) != 0) throw InputError("nonzero diagonal at " + std::to_string(i));
    for (std::size_t j = i + 1; j < n_; ++j) {
      const Rational& a = d_[i * n_ + j];
      if (a != d_[j * n_ + i])
        throw InputError("distance matrix not symmetric at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
      if (sgn(a) <= 0)
        throw InputError("distinct points " + std::to_string(i) + "," + std::to_string(j) +
                         " at non-positive distance");
      if (a > diameter_) diameter_ = a;
      if (first || a < min_sep_) min_sep_ = a;
      first = false;
    }
  }
  if (check == Check::kFull) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        for (std::size_t k = 0; k < n_; ++k)
          if (d_[i * n_ + j] > d_[i * n_ + k] + d_[k * n_ + j])
            throw InputError("triangle inequality fails for (" + std::to_string(i) + "," +
                             std::to_string(j) + ") via " + std::to_string(k));
  }
}

FiniteMetricSpace FiniteMetricSpace::restricted(const std::vector<std::size_t>& points) const {
  std::vector<std::vector<Rational>> rows(points.size(), std::vector<Rational>(points.size()));
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = 0; b < points.size(); ++b) rows[a][b] = (*this)(points[a], points[b]);
  return FiniteMetricSpace(std::move(rows), Check::kSkipTriangle);
}

std::vector<std::size_t> maximal_epsilon_net(const FiniteMetricSpace& space, const Rational& epsilon,
                                             NetStrategy strategy) {
  if (sgn(epsilon) <= 0) throw InputError("epsilon must be positive");
  const std::size_t n = space.size();
  std::vector<std::size_t> net;
  if (n == 0) return net;
  if (strategy == NetStrategy::kIndexScan) {
    for (std::size_t x = 0; x < n; ++x) {
      bool keep = true;
      for (std::size_t q : net)
        if (space(x, q) < epsilon) {
          keep = false;
          break;
        }
      if (keep) net.push_back(x);
    }
    return net;
  }
  net.push_back(0);
  std::vector<Rational> to_net(n);
  for (std::size_t x = 0; x < n; ++x) to_net[x] = space(x, 0);
  while (true) {
    std::size_t far = 0;
    for (std::size_t x = 1; x < n; ++x)
      if (to_net[x] > to_net[far]) far = x;
    if (to_net[far] < epsilon) break;
    net.push_back(far);
    for (std::size_t x = 0; x < n; ++x)
      if (space(x, far) < to_net[x]) to_net[x] = space(x, far);
  }
  std::sort(net.begin(), net.end());
  return net;
}

Rational covering_radius(const FiniteMetricSpace& space, const std::vector<std::size_t>& net) {
  if (net.empty()) throw InputError("empty net");
  Rational worst = 0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    Rational best = space(x, net.front());
    for (std::size_t q : net)
      if (space(x, q) < best) best = space(x, q);
    if (best > worst) worst = best;
  }
  return worst;
}

Embedding::Embedding(const FiniteMetricSpace& source, std::vector<std::size_t> net)
    : net_(std::move(net)) {
  if (net_.empty()) throw InputError("net must be nonempty");
  for (std::size_t q : net_)
    if (q >= source.size()) throw InputError("net point out of range");
  coords_.resize(source.size());
  for (std::size_t x = 0; x < source.size(); ++x) {
    coords_[x].reserve(net_.size());
    for (std::size_t q : net_) coords_[x].push_back(source(x, q));
  }
}

Rational Embedding::image_distance(std::size_t x, std::size_t y) const {
  Rational best = 0;
  for (std::size_t t = 0; t < net_.size(); ++t) {
    Rational diff = abs(coords_[x][t] - coords_[y][t]);
    if (diff > best) best = diff;
  }
  return best;
}

FiniteMetricSpace Embedding::image_metric() const {
  const std::size_t n = coords_.size();
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) rows[i][j] = rows[j][i] = image_distance(i, j);
  // sup-norm distances always satisfy the triangle inequality
  return FiniteMetricSpace(std::move(rows), FiniteMetricSpace::Check::kSkipTriangle);
}

Embedding kuratowski_embed(const FiniteMetricSpace& space, std::vector<std::size_t> net) {
  return Embedding(space, std::move(net));
}

Distortion distortion(const FiniteMetricSpace& source, const Embedding& e) {
  Distortion out{Rational(1), Rational(1)};
  bool first = true;
  for (std::size_t i = 0; i < source.size(); ++i)
    for (std::size_t j = i + 1; j < source.size(); ++j) {
      Rational ratio = e.image_distance(i, j) / source(i, j);
      if (first) {
        out.expansion = out.contraction = ratio;
        first = false;
      } else {
        if (ratio > out.expansion) out.expansion = ratio;
        if (ratio < out.contraction) out.contraction = ratio;
      }
    }
  return out;
}

namespace {

// Cliques whose smallest vertex is `root`, written depth-first into `out`.
void collect_cliques(std::size_t root, const std::vector<std::vector<Vertex>>& higher,
                     const std::vector<std::vector<char>>& adjacent, int max_dim,
                     std::vector<std::vector<Simplex>>& out, std::atomic<std::size_t>& total,
                     std::size_t budget) {
  Simplex current{static_cast<Vertex>(root)};
  std::function<void(const std::vector<Vertex>&)> extend = [&](const std::vector<Vertex>& candidates) {
    out[current.size() - 1].push_back(current);
    if (total.fetch_add(1, std::memory_order_relaxed) + 1 > budget) return;
    if (static_cast<int>(current.size()) > max_dim) return;
    for (std::size_t a = 0; a < candidates.size(); ++a) {
      Vertex v = candidates[a];
      std::vector<Vertex> next;
      for (std::size_t b = a + 1; b < candidates.size(); ++b)
        if (adjacent[v][candidates[b]]) next.push_back(candidates[b]);
      current.push_back(v);
      extend(next);
      current.pop_back();
    }
  };
  extend(higher[root]);
}

ComplexPtr rips_impl(const FiniteMetricSpace& space, const Rational& scale, int max_dim,
                     std::size_t budget, bool parallel) {
  if (sgn(scale) <= 0) throw InputError("scale must be positive");
  if (max_dim < 1) throw InputError("max_dim must be at least 1");
  const std::size_t n = space.size();
  std::vector<std::vector<Vertex>> higher(n);
  std::vector<std::vector<char>> adjacent(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (space(i, j) <= scale) {
        higher[i].push_back(static_cast<Vertex>(j));
        adjacent[i][j] = adjacent[j][i] = 1;
      }

  std::vector<std::vector<std::vector<Simplex>>> per_root(
      n, std::vector<std::vector<Simplex>>(static_cast<std::size_t>(max_dim) + 1));
  std::atomic<std::size_t> total{0};
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (long long r = 0; r < count; ++r)
    collect_cliques(static_cast<std::size_t>(r), higher, adjacent, max_dim,
                    per_root[static_cast<std::size_t>(r)], total, budget);
  if (total.load() > budget)
    throw InputError("Rips complex exceeds the simplex budget of " + std::to_string(budget) +
                     " (at least " + std::to_string(total.load()) + " simplices)");

  std::vector<std::vector<Simplex>> by_dim(static_cast<std::size_t>(max_dim) + 1);
  for (auto& root : per_root)
    for (std::size_t d = 0; d < root.size(); ++d)
      for (auto& s : root[d]) by_dim[d].push_back(std::move(s));
  for (auto& level : by_dim) std::sort(level.begin(), level.end());

  Geometry g;
  g.metric = std::make_shared<FiniteMetricSpace>(space);
  return WeightedComplex::build_closed(std::move(by_dim), std::move(g), parallel);
}

}  // namespace

ComplexPtr build_rips(const FiniteMetricSpace& space, const Rational& scale, int max_dim,
                      std::size_t budget) {
  return rips_impl(space, scale, max_dim, budget, true);
}

ComplexPtr build_rips(const Embedding& e, const Rational& scale, int max_dim, std::size_t budget) {
  return rips_impl(e.image_metric(), scale, max_dim, budget, true);
}

ComplexPtr build_rips_serial(const FiniteMetricSpace& space, const Rational& scale, int max_dim,
                             std::size_t budget) {
  return rips_impl(space, scale, max_dim, budget, false);
}

FiniteMetricSpace shortest_path_metric(
    std::size_t n, const std::vector<std::pair<std::pair<std::size_t, std::size_t>, Rational>>& edges) {
  std::vector<std::vector<std::pair<std::size_t, Rational>>> adj(n);
  for (const auto& [e, w] : edges) {
    if (e.first >= n || e.second >= n) throw InputError("edge endpoint out of range");
    if (sgn(w) <= 0) throw InputError("edge length must be positive");
    adj[e.first].emplace_back(e.second, w);
    adj[e.second].emplace_back(e.first, w);
  }
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> done(n, false), seen(n, false);
    std::vector<Rational>& dist = rows[s];
    using Item = std::pair<Rational, std::size_t>;
    auto cmp = [](const Item& a, const Item& b) {
      return a.first > b.first || (a.first == b.first && a.second > b.second);
    };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    dist[s] = 0;
    seen[s] = true;
    pq.emplace(Rational(0), s);
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = true;
      for (const auto& [v, w] : adj[u]) {
        Rational nd = d + w;
        if (!seen[v] || nd < dist[v]) {
          dist[v] = nd;
          seen[v] = true;
          pq.emplace(nd, v);
        }
      }
    }
    for (std::size_t v = 0; v < n; ++v)
      if (!seen[v]) throw InputError("graph is disconnected; no shortest-path metric");
  }
  return FiniteMetricSpace(std::move(rows), FiniteMetricSpace::Check::kSkipTriangle);
}

}  // namespace chainforge
