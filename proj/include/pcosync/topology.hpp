#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcosync {

/// Directed pulse-delivery graph. out_edges[i] holds the (sorted, 0-based)
/// indices of oscillators that receive oscillator i's pulses. No self-edges.
struct Graph {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> out_edges;

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& e : out_edges) total += e.size();
    return total;
  }
};

inline Graph all_to_all(std::size_t n) {
  if (n == 0) throw std::invalid_argument("all_to_all: n must be >= 1");
  Graph g{n, std::vector<std::vector<std::size_t>>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) g.out_edges[i].push_back(j);
    }
  }
  return g;
}

/// Bidirectional ring: each oscillator pulses both neighbours.
inline Graph ring(std::size_t n) {
  if (n < 2) throw std::invalid_argument("ring: n must be >= 2");
  Graph g{n, std::vector<std::vector<std::size_t>>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    g.out_edges[i].push_back(prev);
    if (next != prev) g.out_edges[i].push_back(next);
    std::sort(g.out_edges[i].begin(), g.out_edges[i].end());
  }
  return g;
}

/// Build a graph from explicit directed edges (0-based). Duplicates are
/// dropped; self-edges and out-of-range indices are rejected.
inline Graph from_edges(std::size_t n,
                        const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  if (n == 0) throw std::invalid_argument("from_edges: n must be >= 1");
  Graph g{n, std::vector<std::vector<std::size_t>>(n)};
  for (const auto& [from, to] : edges) {
    if (from >= n || to >= n) {
      throw std::invalid_argument("from_edges: edge index out of range");
    }
    if (from == to) {
      throw std::invalid_argument("from_edges: self-edges are not allowed");
    }
    g.out_edges[from].push_back(to);
  }
  for (auto& e : g.out_edges) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
  return g;
}

/// True iff every oscillator reaches every other along directed edges.
/// Kosaraju-style double sweep is overkill at these sizes; two BFS passes
/// (forward from 0, backward from 0) suffice.
inline bool is_strongly_connected(const Graph& g) {
  if (g.n == 0) return false;
  if (g.n == 1) return true;

  std::vector<std::vector<std::size_t>> in_edges(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j : g.out_edges[i]) in_edges[j].push_back(i);
  }

  auto reaches_all = [&](const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<bool> seen(g.n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == g.n;
  };

  return reaches_all(g.out_edges) && reaches_all(in_edges);
}

/// Edge-list text format: one "i j" pair per line, 1-based indices.
/// Blank lines and lines starting with '#' are skipped.
inline Graph parse_edge_list(std::istream& in, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long a = 0, b = 0;
    if (!(ls >> a >> b) || a < 1 || b < 1) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                  ": expected two 1-based indices");
    }
    edges.emplace_back(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
  }
  return from_edges(n, edges);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j : g.out_edges[i]) {
      out << (i + 1) << ' ' << (j + 1) << '\n';
    }
  }
}

}  // namespace pcosync
