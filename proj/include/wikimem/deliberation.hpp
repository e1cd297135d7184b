#pragma once

// Deliberation: temporal outlink-inclusion vectors, their pairwise similarity,
// average-linkage clustering, heatmap leaf ordering and cluster classification.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "wikimem/error.hpp"
#include "wikimem/snapshot.hpp"

namespace wikimem {

// Outlinks x periods binary matrix; rows sorted by title.
struct InclusionMatrix {
  std::vector<std::string> outlinks;
  std::vector<std::string> periods;
  std::vector<std::uint8_t> cells;  // row-major, 0 or 1

  std::size_t rows() const { return outlinks.size(); }
  std::size_t cols() const { return periods.size(); }
  std::uint8_t at(std::size_t row, std::size_t col) const { return cells[row * cols() + col]; }
  std::uint8_t& at(std::size_t row, std::size_t col) { return cells[row * cols() + col]; }

  std::vector<std::uint8_t> row(std::size_t r) const {
    return {cells.begin() + static_cast<std::ptrdiff_t>(r * cols()),
            cells.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols())};
  }

  bool operator==(const InclusionMatrix&) const = default;
};

inline InclusionMatrix build_inclusion_matrix(const SnapshotSeries& series) {
  if (series.empty()) throw Error(ErrorKind::DegenerateInput, "empty snapshot series");
  std::set<std::string> all;
  for (const auto& s : series.snapshots) all.insert(s.outlinks.links.begin(), s.outlinks.links.end());
  InclusionMatrix m;
  m.outlinks.assign(all.begin(), all.end());
  m.periods = series.periods();
  m.cells.assign(m.rows() * m.cols(), 0);
  std::map<std::string_view, std::size_t> index;
  for (std::size_t r = 0; r < m.rows(); ++r) index.emplace(m.outlinks[r], r);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    for (const auto& link : series.snapshots[c].outlinks.links) m.at(index.at(link), c) = 1;
  }
  return m;
}

enum class SimilarityMetric { Jaccard, Cosine };

inline SimilarityMetric parse_similarity_metric(std::string_view s) {
  if (s == "jaccard") return SimilarityMetric::Jaccard;
  if (s == "cosine") return SimilarityMetric::Cosine;
  throw Error(ErrorKind::Config, "unknown similarity metric '" + std::string(s) + "' (jaccard|cosine)");
}

struct SimilarityMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // n x n row-major

  std::size_t size() const { return labels.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
};

namespace detail {

struct PackedRows {
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;
  std::vector<std::uint32_t> ones;

  const std::uint64_t* row(std::size_t r) const { return bits.data() + r * words; }
};

inline PackedRows pack_rows(const InclusionMatrix& m) {
  PackedRows p;
  p.words = (m.cols() + 63) / 64;
  p.bits.assign(m.rows() * p.words, 0);
  p.ones.assign(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m.at(r, c)) {
        p.bits[r * p.words + c / 64] |= std::uint64_t{1} << (c % 64);
        ++p.ones[r];
      }
    }
  }
  return p;
}

inline std::size_t worker_count(std::size_t work_rows) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  return std::min(hw, std::max<std::size_t>(1, work_rows / 256));
}

}  // namespace detail

inline double binary_similarity(std::uint32_t both, std::uint32_t ones_a, std::uint32_t ones_b,
                                SimilarityMetric metric) {
  if (metric == SimilarityMetric::Jaccard) {
    const std::uint32_t either = ones_a + ones_b - both;
    return either == 0 ? 1.0 : static_cast<double>(both) / either;
  }
  if (ones_a == 0 || ones_b == 0) return ones_a == ones_b ? 1.0 : 0.0;
  return static_cast<double>(both) / std::sqrt(static_cast<double>(ones_a) * static_cast<double>(ones_b));
}

inline SimilarityMatrix pairwise_similarity(const InclusionMatrix& m,
                                            SimilarityMetric metric = SimilarityMetric::Jaccard) {
  const std::size_t n = m.rows();
  SimilarityMatrix s{m.outlinks, std::vector<double>(n * n, 0.0)};
  const auto packed = detail::pack_rows(m);
  const auto fill_rows = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < n; i += step) {
      s.values[i * n + i] = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        std::uint32_t both = 0;
        const auto* a = packed.row(i);
        const auto* b = packed.row(j);
        for (std::size_t w = 0; w < packed.words; ++w) both += static_cast<std::uint32_t>(std::popcount(a[w] & b[w]));
        const double v = std::clamp(binary_similarity(both, packed.ones[i], packed.ones[j], metric), 0.0, 1.0);
        s.values[i * n + j] = v;
        s.values[j * n + i] = v;
      }
    }
  };
  // Interleaved rows balance the triangular workload; each cell is written by one worker.
  const std::size_t workers = detail::worker_count(n);
  if (workers <= 1) {
    fill_rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(fill_rows, w, workers);
  }
  return s;
}

// One agglomeration step; node ids < n are leaves, n + t is the t-th merge.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;
};

namespace detail {

// Rank of each row under the tie-break key: labels when present, else index.
inline std::vector<std::size_t> tie_ranks(const SimilarityMatrix& s) {
  const std::size_t n = s.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (!s.labels.empty()) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.labels[a] < s.labels[b]; });
  }
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
  return rank;
}

}  // namespace detail

// Average-linkage (UPGMA) agglomeration on distance = 1 - similarity. Among
// equal distances the pair with the smallest (min key, max key) merges first,
// where a cluster's key is its smallest member rank; this makes the result
// independent of row order when labels are unique.
inline Dendrogram average_linkage(const SimilarityMatrix& s) {
  const std::size_t n = s.size();
  if (n < 2) throw Error(ErrorKind::DegenerateInput, "clustering needs at least 2 rows, got " + std::to_string(n));
  const auto rank = detail::tie_ranks(s);
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n * n; ++i) dist[i] = 1.0 - s.values[i];
  const auto d = [&](std::size_t a, std::size_t b) -> double& { return dist[a * n + b]; };

  std::vector<std::size_t> key = rank;
  std::vector<std::size_t> size(n, 1);
  std::vector<std::size_t> node(n);
  std::iota(node.begin(), node.end(), 0);
  std::vector<bool> active(n, true);
  std::vector<std::size_t> nn(n, 0);

  const auto closer = [&](std::size_t c, std::size_t x, std::size_t y) {
    // Is x a better neighbour of c than y?
    if (d(c, x) != d(c, y)) return d(c, x) < d(c, y);
    return key[x] < key[y];
  };
  const auto recompute_nn = [&](std::size_t c) {
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == c || !active[j]) continue;
      if (best == n || closer(c, j, best)) best = j;
    }
    nn[c] = best;
  };
  for (std::size_t c = 0; c < n; ++c) recompute_nn(c);

  Dendrogram tree{n, {}};
  tree.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c]) continue;
      if (best == n) {
        best = c;
        continue;
      }
      const double dc = d(c, nn[c]);
      const double db = d(best, nn[best]);
      if (dc != db) {
        if (dc < db) best = c;
        continue;
      }
      const auto kc = std::minmax(key[c], key[nn[c]]);
      const auto kb = std::minmax(key[best], key[nn[best]]);
      if (kc < kb) best = c;
    }
    std::size_t a = best;
    std::size_t b = nn[best];
    if (key[b] < key[a]) std::swap(a, b);
    const double height = d(a, b);
    tree.merges.push_back({node[a], node[b], height, size[a] + size[b]});

    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a || c == b) continue;
      const double merged = (static_cast<double>(size[a]) * d(a, c) + static_cast<double>(size[b]) * d(b, c)) /
                            static_cast<double>(size[a] + size[b]);
      d(a, c) = merged;
      d(c, a) = merged;
    }
    active[b] = false;
    size[a] += size[b];
    key[a] = std::min(key[a], key[b]);
    node[a] = n + step;
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a) continue;
      if (nn[c] == a || nn[c] == b) {
        recompute_nn(c);
      } else if (closer(c, a, nn[c])) {
        nn[c] = a;
      }
    }
    recompute_nn(a);
  }
  return tree;
}

// Flat labels 0..k-1 (arbitrary numbering) from undoing the last k-1 merges.
inline std::vector<std::size_t> cut_tree(const Dendrogram& tree, std::size_t k) {
  const std::size_t n = tree.leaves;
  if (k < 1 || k > n) throw Error(ErrorKind::Config, "cannot cut " + std::to_string(n) + " rows into " +
                                                         std::to_string(k) + " clusters");
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t t = 0; t + k < n; ++t) {
    parent[tree.merges[t].left] = n + t;
    parent[tree.merges[t].right] = n + t;
  }
  std::vector<std::size_t> root_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = i;
    while (parent[r] != r) r = parent[r];
    root_of[i] = r;
  }
  std::map<std::size_t, std::size_t> numbering;
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = numbering.emplace(root_of[i], numbering.size()).first->second;
  }
  return labels;
}

namespace detail {

// Leaves of each dendrogram node as a contiguous range of a base ordering.
struct LeafRanges {
  std::vector<std::size_t> base;   // base leaf order
  std::vector<std::size_t> pos;    // leaf -> position in base
  std::vector<std::size_t> begin;  // node -> [begin, end) in base
  std::vector<std::size_t> end;
};

inline LeafRanges leaf_ranges(const Dendrogram& tree) {
  const std::size_t n = tree.leaves;
  const std::size_t nodes = 2 * n - 1;
  LeafRanges r;
  r.begin.assign(nodes, 0);
  r.end.assign(nodes, 0);
  r.pos.assign(n, 0);
  std::vector<std::size_t> stack = {nodes - 1};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (v < n) {
      r.pos[v] = r.base.size();
      r.base.push_back(v);
      continue;
    }
    const auto& m = tree.merges[v - n];
    stack.push_back(m.right);
    stack.push_back(m.left);
  }
  for (std::size_t v = 0; v < nodes; ++v) {
    if (v < n) {
      r.begin[v] = r.pos[v];
      r.end[v] = r.pos[v] + 1;
    } else {
      const auto& m = tree.merges[v - n];
      r.begin[v] = std::min(r.begin[m.left], r.begin[m.right]);
      r.end[v] = std::max(r.end[m.left], r.end[m.right]);
    }
  }
  return r;
}

}  // namespace detail

// Dendrogram leaf order with optimal leaf ordering: child orientations are
// chosen to minimize the summed distance between adjacent leaves. Equal-cost
// choices go to the lower row rank. Trees larger than `optimal_limit` leaves
// fall back to orienting each merge by the distance across its junction.
inline std::vector<std::size_t> leaf_order(const Dendrogram& tree, const SimilarityMatrix& s,
                                           std::size_t optimal_limit = 2000) {
  const std::size_t n = tree.leaves;
  if (n == 0) return {};
  if (n == 1) return {0};
  const auto rank = detail::tie_ranks(s);
  const auto dist = [&](std::size_t a, std::size_t b) { return 1.0 - s.at(a, b); };
  const auto ranges = detail::leaf_ranges(tree);
  const auto leaves_of = [&](std::size_t v) {
    return std::vector<std::size_t>(ranges.base.begin() + static_cast<std::ptrdiff_t>(ranges.begin[v]),
                                    ranges.base.begin() + static_cast<std::ptrdiff_t>(ranges.end[v]));
  };
  const auto inside = [&](std::size_t leaf, std::size_t v) {
    return ranges.pos[leaf] >= ranges.begin[v] && ranges.pos[leaf] < ranges.end[v];
  };

  if (n > optimal_limit) {
    // Bottom-up: keep each subtree's ordering, flip children so the junction is closest.
    std::vector<std::vector<std::size_t>> order(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) order[i] = {i};
    for (std::size_t t = 0; t < tree.merges.size(); ++t) {
      auto left = std::move(order[tree.merges[t].left]);
      auto right = std::move(order[tree.merges[t].right]);
      double best = std::numeric_limits<double>::infinity();
      int best_flip = 0;
      for (int flip = 0; flip < 4; ++flip) {
        const std::size_t a = (flip & 1) ? left.front() : left.back();
        const std::size_t b = (flip & 2) ? right.back() : right.front();
        if (dist(a, b) < best) {
          best = dist(a, b);
          best_flip = flip;
        }
      }
      if (best_flip & 1) std::reverse(left.begin(), left.end());
      if (best_flip & 2) std::reverse(right.begin(), right.end());
      left.insert(left.end(), right.begin(), right.end());
      order[n + t] = std::move(left);
    }
    return order.back();
  }

  // cost(i, j): best ordering cost of the subtree at LCA(i, j) starting at i and
  // ending at j. Each leaf pair has exactly one LCA, so one n x n table serves
  // every node; via_k / via_m record the inner endpoints for reconstruction.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(n * n, inf);
  std::vector<std::uint32_t> via_k(n * n, 0), via_m(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) cost[i * n + i] = 0.0;

  const auto better = [&](double c, std::size_t a1, std::size_t b1, double best, std::size_t a2, std::size_t b2) {
    if (c != best) return c < best;
    return std::pair(rank[a1], rank[b1]) < std::pair(rank[a2], rank[b2]);
  };

  for (std::size_t t = 0; t < tree.merges.size(); ++t) {
    const std::size_t w = tree.merges[t].left;
    const std::size_t x = tree.merges[t].right;
    const auto lw = leaves_of(w);
    const auto lx = leaves_of(x);
    // Inner endpoint candidates: leaves of w's child that does not hold i.
    const auto inner_candidates = [&](std::size_t v, std::size_t outer) {
      if (v < n) return std::vector<std::size_t>{v};
      const auto& m = tree.merges[v - n];
      return leaves_of(inside(outer, m.left) ? m.right : m.left);
    };
    // half[i][m] = min over k of cost(i, k) + dist(k, m), for i in w, m in x.
    std::vector<double> half(lw.size() * lx.size(), inf);
    std::vector<std::uint32_t> half_k(lw.size() * lx.size(), 0);
    std::map<std::size_t, std::size_t> x_index;
    for (std::size_t q = 0; q < lx.size(); ++q) x_index[lx[q]] = q;
    for (std::size_t p = 0; p < lw.size(); ++p) {
      const std::size_t i = lw[p];
      const auto ks = inner_candidates(w, i);
      for (std::size_t q = 0; q < lx.size(); ++q) {
        const std::size_t m = lx[q];
        double best = inf;
        std::size_t best_k = ks.front();
        for (std::size_t k : ks) {
          const double c = cost[i * n + k] + dist(k, m);
          if (better(c, k, k, best, best_k, best_k)) {
            best = c;
            best_k = k;
          }
        }
        half[p * lx.size() + q] = best;
        half_k[p * lx.size() + q] = static_cast<std::uint32_t>(best_k);
      }
    }
    for (std::size_t p = 0; p < lw.size(); ++p) {
      const std::size_t i = lw[p];
      for (std::size_t j : lx) {
        const auto ms = inner_candidates(x, j);
        double best = inf;
        std::size_t best_m = ms.front();
        for (std::size_t m : ms) {
          const double c = half[p * lx.size() + x_index[m]] + cost[m * n + j];
          if (better(c, m, m, best, best_m, best_m)) {
            best = c;
            best_m = m;
          }
        }
        const std::size_t k = half_k[p * lx.size() + x_index[best_m]];
        cost[i * n + j] = cost[j * n + i] = best;
        via_k[i * n + j] = static_cast<std::uint32_t>(k);
        via_m[i * n + j] = static_cast<std::uint32_t>(best_m);
        // Reversed orientation: j..m then k..i.
        via_k[j * n + i] = static_cast<std::uint32_t>(best_m);
        via_m[j * n + i] = static_cast<std::uint32_t>(k);
      }
    }
  }

  const std::size_t root = 2 * n - 2;
  const auto& top = tree.merges.back();
  std::size_t best_i = n, best_j = n;
  double best = inf;
  for (std::size_t i : leaves_of(top.left)) {
    for (std::size_t j : leaves_of(top.right)) {
      for (const auto& [a, b] : {std::pair(i, j), std::pair(j, i)}) {
        if (best_i == n || better(cost[a * n + b], a, b, best, best_i, best_j)) {
          best = cost[a * n + b];
          best_i = a;
          best_j = b;
        }
      }
    }
  }

  // Reconstruct: the segment from i to j inside node v is order(i..k) + order(m..j).
  std::vector<std::size_t> out;
  out.reserve(n);
  struct Frame {
    std::size_t node, from, to;
  };
  std::vector<Frame> stack = {{root, best_i, best_j}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.node < n) {
      out.push_back(f.node);
      continue;
    }
    const auto& m = tree.merges[f.node - n];
    const std::size_t k = via_k[f.from * n + f.to];
    const std::size_t mm = via_m[f.from * n + f.to];
    const std::size_t from_child = inside(f.from, m.left) ? m.left : m.right;
    const std::size_t to_child = from_child == m.left ? m.right : m.left;
    stack.push_back({to_child, mm, f.to});
    stack.push_back({from_child, f.from, k});
  }
  return out;
}

// Mean silhouette of a labelling under distance = 1 - similarity.
inline double silhouette(const SimilarityMatrix& s, const std::vector<std::size_t>& labels) {
  const std::size_t n = s.size();
  const std::size_t k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) ++sizes[l];
  double total = 0.0;
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    if (sizes[labels[i]] <= 1) continue;  // singleton: 0 by convention
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sums[labels[j]] += 1.0 - s.at(i, j);
    }
    const double a = sums[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != labels[i] && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0 && std::isfinite(b)) total += (b - a) / denom;
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

struct ClusterAssignment {
  std::vector<std::string> outlinks;
  std::vector<int> labels;          // per row, 1..k
  std::vector<std::size_t> order;   // heatmap row order (permutation of rows)
  int k = 0;
  std::map<int, double> silhouette_by_k;  // filled when k was chosen automatically

  std::size_t cluster_size(int id) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), id));
  }
};

struct ClusterOptions {
  std::optional<int> k;  // nullopt = choose by silhouette
  int auto_min_k = 2;
  int auto_max_k = 8;
  std::size_t optimal_order_limit = 2000;
};

inline ClusterAssignment cluster(const SimilarityMatrix& s, const ClusterOptions& options = {}) {
  const std::size_t n = s.size();
  if (n < 2) throw Error(ErrorKind::DegenerateInput, "clustering needs at least 2 rows, got " + std::to_string(n));
  if (options.k && (*options.k < 2 || static_cast<std::size_t>(*options.k) > n)) {
    throw Error(ErrorKind::Config, "k must be in [2, " + std::to_string(n) + "], got " + std::to_string(*options.k));
  }
  const Dendrogram tree = average_linkage(s);
  ClusterAssignment out;
  out.outlinks = s.labels;
  std::size_t k = 0;
  std::vector<std::size_t> raw;
  if (options.k) {
    k = static_cast<std::size_t>(*options.k);
    raw = cut_tree(tree, k);
  } else {
    const std::size_t hi = std::min<std::size_t>(options.auto_max_k, n > 2 ? n - 1 : 2);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = static_cast<std::size_t>(options.auto_min_k); c <= hi; ++c) {
      auto labels = cut_tree(tree, c);
      const double score = silhouette(s, labels);
      out.silhouette_by_k[static_cast<int>(c)] = score;
      if (score > best) {
        best = score;
        k = c;
        raw = std::move(labels);
      }
    }
  }
  out.order = leaf_order(tree, s, options.optimal_order_limit);
  // Renumber 1..k by first appearance in heatmap order.
  std::map<std::size_t, int> renumber;
  for (std::size_t row : out.order) renumber.emplace(raw[row], static_cast<int>(renumber.size()) + 1);
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = renumber.at(raw[i]);
  out.k = static_cast<int>(k);
  return out;
}

enum class ClusterClass { Stable, Debated, Forgotten };

inline std::string_view to_string(ClusterClass c) {
  switch (c) {
    case ClusterClass::Stable: return "Stable";
    case ClusterClass::Debated: return "Debated";
    case ClusterClass::Forgotten: return "Forgotten";
  }
  return "Stable";
}

struct ClassifyThresholds {
  double final_frac = 0.1;  // Forgotten at or below this share of the peak
  double toggles = 2.0;     // Debated at or above this mean transition count
};

struct ClassEvidence {
  double final_frac = 0.0;
  double mean_toggles = 0.0;
  std::int64_t peak = 0;
};

inline std::size_t count_toggles(const std::vector<std::uint8_t>& row) {
  std::size_t t = 0;
  for (std::size_t i = 1; i < row.size(); ++i) t += row[i] != row[i - 1];
  return t;
}

// Forgotten iff the last count is at most final_frac of the peak; else Debated
// iff members toggle at least `toggles` times on average; else Stable.
inline ClusterClass classify_cluster(const std::vector<std::int64_t>& counts,
                                     const std::vector<std::vector<std::uint8_t>>& member_rows,
                                     const ClassifyThresholds& thresholds = {}, ClassEvidence* evidence = nullptr) {
  if (member_rows.empty() || counts.empty()) throw Error(ErrorKind::DegenerateInput, "empty cluster");
  const std::int64_t peak = *std::max_element(counts.begin(), counts.end());
  const double final_frac = peak > 0 ? static_cast<double>(counts.back()) / static_cast<double>(peak) : 0.0;
  double toggles = 0.0;
  for (const auto& row : member_rows) toggles += static_cast<double>(count_toggles(row));
  toggles /= static_cast<double>(member_rows.size());
  if (evidence) *evidence = {final_frac, toggles, peak};
  if (final_frac <= thresholds.final_frac) return ClusterClass::Forgotten;
  if (toggles >= thresholds.toggles) return ClusterClass::Debated;
  return ClusterClass::Stable;
}

struct ClusterProfile {
  int id = 0;
  std::vector<std::size_t> members;    // row indices
  std::vector<std::int64_t> counts;    // included members per period
  ClusterClass classification = ClusterClass::Stable;
  ClassEvidence evidence;
};

inline std::vector<ClusterProfile> cluster_profiles(const InclusionMatrix& m, const ClusterAssignment& a,
                                                    const ClassifyThresholds& thresholds = {}) {
  if (a.labels.size() != m.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "assignment has " + std::to_string(a.labels.size()) + " labels for " +
                                              std::to_string(m.rows()) + " rows");
  }
  std::vector<ClusterProfile> out(static_cast<std::size_t>(a.k));
  for (int id = 1; id <= a.k; ++id) {
    out[id - 1].id = id;
    out[id - 1].counts.assign(m.cols(), 0);
  }
  for (std::size_t r : a.order) {
    auto& p = out[static_cast<std::size_t>(a.labels[r] - 1)];
    p.members.push_back(r);
    for (std::size_t c = 0; c < m.cols(); ++c) p.counts[c] += m.at(r, c);
  }
  for (auto& p : out) {
    std::vector<std::vector<std::uint8_t>> rows;
    rows.reserve(p.members.size());
    for (std::size_t r : p.members) rows.push_back(m.row(r));
    p.classification = classify_cluster(p.counts, rows, thresholds, &p.evidence);
  }
  return out;
}

}  // namespace wikimem
