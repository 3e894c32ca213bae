#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncg {

/// Directed graph over 1-based nodes with weighted links, as needed for
/// path enumeration on transportation networks.
class LinkGraph {
public:
    struct Arc {
        int link;  // caller's link index
        int from, to;
        double weight;
    };

    explicit LinkGraph(int n_nodes) : n_nodes_(n_nodes), out_(static_cast<std::size_t>(n_nodes) + 1) {}

    void add_link(int link, int from, int to, double weight) {
        if (from < 1 || from > n_nodes_ || to < 1 || to > n_nodes_)
            throw std::out_of_range("link endpoint outside node range");
        out_[static_cast<std::size_t>(from)].push_back({link, from, to, weight});
    }

    /// Sorts adjacency for deterministic traversal: by head node, then
    /// weight, then link index. Call once after all links are added.
    void finalize() {
        for (auto& arcs : out_)
            std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
                if (a.to != b.to) return a.to < b.to;
                if (a.weight != b.weight) return a.weight < b.weight;
                return a.link < b.link;
            });
    }

    int n_nodes() const { return n_nodes_; }
    const std::vector<Arc>& out(int node) const { return out_[static_cast<std::size_t>(node)]; }

private:
    int n_nodes_;
    std::vector<std::vector<Arc>> out_;
};

/// A simple path: node sequence plus the link indices realizing it.
struct Path {
    std::vector<int> nodes;
    std::vector<int> links;
    double cost = 0.0;
};

inline bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace detail {

/// Dijkstra from `src` to `dst`, avoiding banned nodes and banned links,
/// returning the lexicographically smallest (by node sequence) among the
/// shortest paths. Reconstruction follows dist-to-destination labels
/// computed on the reverse graph, so the argmin test compares the exact
/// floating-point expressions that produced the labels.
inline bool shortest_path(const LinkGraph& g, int src, int dst,
                          const std::vector<bool>& banned_node,
                          const std::set<int>& banned_link, Path& out) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(g.n_nodes()) + 1, inf);

    // reverse adjacency on the fly
    std::vector<std::vector<LinkGraph::Arc>> in(static_cast<std::size_t>(g.n_nodes()) + 1);
    for (int u = 1; u <= g.n_nodes(); ++u) {
        if (banned_node[static_cast<std::size_t>(u)] && u != src && u != dst) continue;
        for (const auto& arc : g.out(u)) {
            if (banned_link.count(arc.link)) continue;
            if (banned_node[static_cast<std::size_t>(arc.to)] && arc.to != dst && arc.to != src) continue;
            in[static_cast<std::size_t>(arc.to)].push_back(arc);
        }
    }

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[static_cast<std::size_t>(dst)] = 0.0;
    pq.push({0.0, dst});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(v)]) continue;
        for (const auto& arc : in[static_cast<std::size_t>(v)]) {
            double nd = arc.weight + d;
            if (nd < dist[static_cast<std::size_t>(arc.from)]) {
                dist[static_cast<std::size_t>(arc.from)] = nd;
                pq.push({nd, arc.from});
            }
        }
    }
    if (dist[static_cast<std::size_t>(src)] == inf) return false;

    out.nodes = {src};
    out.links.clear();
    out.cost = 0.0;
    int u = src;
    std::vector<bool> visited(static_cast<std::size_t>(g.n_nodes()) + 1, false);
    visited[static_cast<std::size_t>(u)] = true;
    while (u != dst) {
        const LinkGraph::Arc* next = nullptr;
        for (const auto& arc : g.out(u)) {
            if (banned_link.count(arc.link)) continue;
            if (banned_node[static_cast<std::size_t>(arc.to)] && arc.to != dst) continue;
            if (visited[static_cast<std::size_t>(arc.to)]) continue;
            if (arc.weight + dist[static_cast<std::size_t>(arc.to)] == dist[static_cast<std::size_t>(u)]) {
                next = &arc;  // adjacency order makes this the smallest head node
                break;
            }
        }
        if (!next) return false;  // numerically impossible on consistent labels
        out.links.push_back(next->link);
        out.cost += next->weight;
        u = next->to;
        out.nodes.push_back(u);
        visited[static_cast<std::size_t>(u)] = true;
    }
    return true;
}

}  // namespace detail

/// Yen's algorithm: up to k cheapest simple paths from src to dst, ordered by
/// cost with lexicographic tie-breaking on the node sequence (then the link
/// sequence, so parallel links yield distinct paths). Returns fewer than k
/// paths when the graph does not contain them.
inline std::vector<Path> k_shortest_paths(const LinkGraph& g, int src, int dst, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::vector<Path> result;
    std::vector<bool> no_banned_nodes(static_cast<std::size_t>(g.n_nodes()) + 1, false);

    Path first;
    if (!detail::shortest_path(g, src, dst, no_banned_nodes, {}, first)) return result;
    result.push_back(std::move(first));

    auto path_less = [](const Path& a, const Path& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.nodes != b.nodes) return lex_less(a.nodes, b.nodes);
        return lex_less(a.links, b.links);
    };
    std::vector<Path> candidates;

    while (static_cast<int>(result.size()) < k) {
        const Path& prev = result.back();
        for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
            int spur_node = prev.nodes[i];
            std::vector<int> root_nodes(prev.nodes.begin(), prev.nodes.begin() + static_cast<long>(i) + 1);
            std::vector<int> root_links(prev.links.begin(), prev.links.begin() + static_cast<long>(i));

            // ban the next link of every accepted path sharing this root
            std::set<int> banned_links;
            for (const auto& p : result)
                if (p.links.size() > i &&
                    std::equal(root_links.begin(), root_links.end(), p.links.begin()))
                    banned_links.insert(p.links[i]);
            std::vector<bool> banned_nodes(static_cast<std::size_t>(g.n_nodes()) + 1, false);
            for (std::size_t j = 0; j < i; ++j) banned_nodes[static_cast<std::size_t>(prev.nodes[j])] = true;

            Path spur;
            if (!detail::shortest_path(g, spur_node, dst, banned_nodes, banned_links, spur)) continue;

            Path total;
            total.nodes = root_nodes;
            total.nodes.insert(total.nodes.end(), spur.nodes.begin() + 1, spur.nodes.end());
            total.links = root_links;
            total.links.insert(total.links.end(), spur.links.begin(), spur.links.end());
            candidates.push_back(std::move(total));
        }
        if (candidates.empty()) break;

        // recompute candidate costs front-to-back for a stable comparison
        for (auto& c : candidates) {
            double cost = 0.0;
            std::size_t li = 0;
            for (std::size_t j = 0; j + 1 < c.nodes.size(); ++j, ++li) {
                for (const auto& arc : g.out(c.nodes[j]))
                    if (arc.link == c.links[li]) {
                        cost += arc.weight;
                        break;
                    }
            }
            c.cost = cost;
        }
        std::sort(candidates.begin(), candidates.end(), path_less);
        candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                     [](const Path& a, const Path& b) { return a.links == b.links; }),
                         candidates.end());

        // accept the cheapest candidate not already in the result
        std::size_t pick = 0;
        bool found = false;
        for (; pick < candidates.size(); ++pick) {
            bool dup = false;
            for (const auto& p : result)
                if (p.links == candidates[pick].links) dup = true;
            if (!dup) { found = true; break; }
        }
        if (!found) break;
        result.push_back(candidates[pick]);
        candidates.erase(candidates.begin(), candidates.begin() + static_cast<long>(pick) + 1);
    }
    return result;
}

}  // namespace ncg
