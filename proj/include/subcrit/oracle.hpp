#pragma once
// Exhaustive enumeration of small graphs by class, flavor, and connectivity.
// Everything here is brute force on purpose: results from this module are the
// ground truth that the analytic side is tested against, so the code favors
// directness over speed. Graphs have at most 8 vertices; edges live in a
// 28-bit mask indexed by vertex pairs.

#include "subcrit/graph_class.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace subcrit::oracle {

struct small_graph {
    int n = 0;
    uint32_t edges = 0;

    static constexpr int max_n = 8;

    // pairs ordered by larger endpoint: (0,1),(0,2),(1,2),(0,3),...
    static int pair_index(int i, int j) {
        if (i > j) std::swap(i, j);
        return j * (j - 1) / 2 + i;
    }

    bool has_edge(int i, int j) const { return edges >> pair_index(i, j) & 1u; }
    void add_edge(int i, int j) { edges |= 1u << pair_index(i, j); }
    void remove_edge(int i, int j) { edges &= ~(1u << pair_index(i, j)); }

    int edge_count() const { return __builtin_popcount(edges); }

    int degree(int v) const {
        int d = 0;
        for (int u = 0; u < n; ++u)
            if (u != v && has_edge(u, v)) ++d;
        return d;
    }

    small_graph permuted(const std::array<int, max_n>& perm) const {
        small_graph h;
        h.n = n;
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < j; ++i)
                if (has_edge(i, j)) h.add_edge(perm[i], perm[j]);
        return h;
    }

    bool operator==(const small_graph& o) const { return n == o.n && edges == o.edges; }
};

inline small_graph complete_graph(int n) {
    small_graph g;
    g.n = n;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) g.add_edge(i, j);
    return g;
}

inline small_graph complete_bipartite(int a, int b) {
    small_graph g;
    g.n = a + b;
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) g.add_edge(i, a + j);
    return g;
}

inline small_graph cycle_graph(int n) {
    small_graph g;
    g.n = n;
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

// ---------------------------------------------------------------------------
// connectivity

// Mask of vertices reachable from `start` inside the vertex set `allowed`.
inline uint32_t reach_mask(const small_graph& g, int start, uint32_t allowed) {
    uint32_t seen = 1u << start, frontier = seen;
    while (frontier) {
        uint32_t next = 0;
        for (int v = 0; v < g.n; ++v) {
            if (!(frontier >> v & 1u)) continue;
            for (int u = 0; u < g.n; ++u)
                if (u != v && (allowed >> u & 1u) && !(seen >> u & 1u) && g.has_edge(u, v))
                    next |= 1u << u;
        }
        seen |= next;
        frontier = next;
    }
    return seen;
}

inline bool is_connected(const small_graph& g) {
    if (g.n == 0) return false;
    uint32_t all = (1u << g.n) - 1;
    return reach_mask(g, 0, all) == all;
}

inline bool is_cut_vertex(const small_graph& g, int v) {
    if (g.n <= 2) return false;
    uint32_t rest = ((1u << g.n) - 1) & ~(1u << v);
    int start = __builtin_ctz(rest);
    return reach_mask(g, start, rest) != rest;
}

inline int cut_vertex_count(const small_graph& g) {
    int c = 0;
    for (int v = 0; v < g.n; ++v)
        if (is_cut_vertex(g, v)) ++c;
    return c;
}

// Connected with no cut vertex; the single edge counts as 2-connected, the
// single vertex does not.
inline bool is_two_connected(const small_graph& g) {
    if (g.n < 2) return false;
    if (!is_connected(g)) return false;
    return cut_vertex_count(g) == 0;
}

// ---------------------------------------------------------------------------
// block decomposition (Hopcroft-Tarjan edge-stack DFS)

struct block {
    uint32_t edge_mask = 0;
    uint32_t vertex_mask = 0;
    int edge_count() const { return __builtin_popcount(edge_mask); }
    int vertex_count() const { return __builtin_popcount(vertex_mask); }
};

struct block_decomposition {
    std::vector<block> blocks;
    uint32_t cut_vertices = 0;
    int cut_vertex_count() const { return __builtin_popcount(cut_vertices); }
};

namespace detail {

struct block_dfs {
    const small_graph& g;
    block_decomposition& out;
    std::array<int, small_graph::max_n> depth{}, low{};
    std::array<bool, small_graph::max_n> visited{};
    std::vector<std::pair<int, int>> stack;

    void pop_block(std::pair<int, int> until) {
        block b;
        while (true) {
            auto e = stack.back();
            stack.pop_back();
            b.edge_mask |= 1u << small_graph::pair_index(e.first, e.second);
            b.vertex_mask |= (1u << e.first) | (1u << e.second);
            if (e == until) break;
        }
        out.blocks.push_back(b);
    }

    void visit(int v, int parent, int d) {
        visited[v] = true;
        depth[v] = low[v] = d;
        int children = 0;
        for (int u = 0; u < g.n; ++u) {
            if (u == v || !g.has_edge(u, v)) continue;
            if (!visited[u]) {
                stack.push_back({v, u});
                visit(u, v, d + 1);
                ++children;
                low[v] = std::min(low[v], low[u]);
                if (low[u] >= depth[v]) {
                    pop_block({v, u});
                    if (parent >= 0 || children > 1) out.cut_vertices |= 1u << v;
                }
            } else if (u != parent && depth[u] < depth[v]) {
                stack.push_back({v, u});
                low[v] = std::min(low[v], depth[u]);
            }
        }
    }
};

} // namespace detail

inline block_decomposition block_decompose(const small_graph& g) {
    if (!is_connected(g)) throw std::invalid_argument("block_decompose requires a connected graph");
    block_decomposition out;
    detail::block_dfs dfs{g, out};
    dfs.visit(0, -1, 0);
    return out;
}

// ---------------------------------------------------------------------------
// class predicates

inline bool is_tree(const small_graph& g) {
    return is_connected(g) && g.edge_count() == g.n - 1;
}

// Every block is a single edge or a cycle. A 2-connected block is a cycle
// exactly when its edge and vertex counts agree.
inline bool is_cactus(const small_graph& g) {
    if (!is_connected(g)) return false;
    for (const block& b : block_decompose(g).blocks)
        if (b.edge_count() != 1 && b.edge_count() != b.vertex_count()) return false;
    return true;
}

// K4-minor-freeness by series-parallel reduction: repeatedly delete vertices
// of degree <= 1 and suppress vertices of degree 2 (merging any parallel edge
// that creates). A graph reduces to nothing exactly when it has no K4 minor.
inline bool k4_minor_free(const small_graph& g0) {
    small_graph g = g0;
    uint32_t alive = (1u << g.n) - 1;
    bool progress = true;
    while (progress) {
        progress = false;
        for (int v = 0; v < g.n; ++v) {
            if (!(alive >> v & 1u)) continue;
            int deg = 0, nb[2] = {-1, -1};
            for (int u = 0; u < g.n; ++u) {
                if (u == v || !(alive >> u & 1u) || !g.has_edge(u, v)) continue;
                if (deg < 2) nb[deg] = u;
                ++deg;
            }
            if (deg <= 1) {
                alive &= ~(1u << v);
                for (int u = 0; u < g.n; ++u)
                    if (u != v) g.remove_edge(u, v);
                progress = true;
            } else if (deg == 2) {
                alive &= ~(1u << v);
                g.remove_edge(nb[0], v);
                g.remove_edge(nb[1], v);
                g.add_edge(nb[0], nb[1]); // parallel edges merge in the simple representation
                progress = true;
            }
        }
    }
    // anything left has minimum degree >= 3 and therefore a K4 minor
    return alive == 0 || __builtin_popcount(alive) == 1;
}

namespace detail {

// Unit-capacity max flow on the vertex-split graph, counting internally
// disjoint s-t paths. Poles have unlimited capacity; each internal vertex may
// be used once.
inline int disjoint_path_count(const small_graph& g, int s, int t, int needed) {
    // node 2v = in, 2v+1 = out
    const int N = 2 * g.n;
    std::vector<std::vector<int>> cap(N, std::vector<int>(N, 0));
    for (int v = 0; v < g.n; ++v) cap[2 * v][2 * v + 1] = (v == s || v == t) ? needed : 1;
    for (int j = 1; j < g.n; ++j)
        for (int i = 0; i < j; ++i)
            if (g.has_edge(i, j)) {
                cap[2 * i + 1][2 * j] = needed;
                cap[2 * j + 1][2 * i] = needed;
            }
    int flow = 0;
    while (flow < needed) {
        std::vector<int> prev(N, -1);
        std::vector<int> queue = {2 * s};
        prev[2 * s] = 2 * s;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int u = queue[qi];
            for (int w = 0; w < N; ++w)
                if (prev[w] < 0 && cap[u][w] > 0) {
                    prev[w] = u;
                    queue.push_back(w);
                }
        }
        if (prev[2 * t + 1] < 0) break;
        for (int w = 2 * t + 1; w != 2 * s; ) {
            int u = prev[w];
            --cap[u][w];
            ++cap[w][u];
            w = u;
        }
        ++flow;
    }
    return flow;
}

} // namespace detail

// A K23 minor is equivalent to a K23 subdivision (maximum degree 3), i.e. two
// vertices joined by three internally disjoint paths of length >= 2. Removing
// a direct edge between the candidate branch vertices leaves exactly the
// length >= 2 paths.
inline bool has_k23_minor(const small_graph& g0) {
    for (int s = 0; s < g0.n; ++s)
        for (int t = s + 1; t < g0.n; ++t) {
            small_graph g = g0;
            g.remove_edge(s, t);
            if (detail::disjoint_path_count(g, s, t, 3) >= 3) return true;
        }
    return false;
}

inline bool is_sp(const small_graph& g) { return is_connected(g) && k4_minor_free(g); }

inline bool is_outerplanar(const small_graph& g) {
    return is_connected(g) && k4_minor_free(g) && !has_k23_minor(g);
}

// Generic minor test by branch-set search: assign vertices of g to the
// vertices of h (or to none), require the branch sets to be nonempty,
// connected, and pairwise adjacent where h demands it. Used as the slow
// second route in tests; the census uses the structured predicates above.
inline bool has_minor_generic(const small_graph& g, const small_graph& h) {
    if (h.n > g.n) return false;
    std::array<int, small_graph::max_n> part;
    part.fill(-1);

    auto feasible = [&]() {
        for (int a = 0; a < h.n; ++a) {
            uint32_t mask = 0;
            for (int v = 0; v < g.n; ++v)
                if (part[v] == a) mask |= 1u << v;
            if (!mask) return false;
            int start = __builtin_ctz(mask);
            if (reach_mask(g, start, mask) != mask) return false;
        }
        for (int b = 1; b < h.n; ++b)
            for (int a = 0; a < b; ++a) {
                if (!h.has_edge(a, b)) continue;
                bool touch = false;
                for (int v = 0; v < g.n && !touch; ++v)
                    for (int u = 0; u < g.n && !touch; ++u)
                        if (part[v] == a && part[u] == b && u != v && g.has_edge(u, v))
                            touch = true;
                if (!touch) return false;
            }
        return true;
    };

    // recursive assignment with a pigeonhole prune
    std::vector<int> order(g.n);
    for (int i = 0; i < g.n; ++i) order[i] = i;
    std::function<bool(int)> rec = [&](int idx) -> bool {
        if (idx == g.n) return feasible();
        int remaining = g.n - idx;
        int empty = 0;
        std::array<bool, small_graph::max_n> nonempty{};
        for (int v = 0; v < idx; ++v)
            if (part[order[v]] >= 0) nonempty[part[order[v]]] = true;
        for (int a = 0; a < h.n; ++a)
            if (!nonempty[a]) ++empty;
        if (remaining < empty) return false;
        for (int a = -1; a < h.n; ++a) {
            part[order[idx]] = a;
            if (rec(idx + 1)) return true;
        }
        part[order[idx]] = -1;
        return false;
    };
    return rec(0);
}

enum class minor_pattern { k4, k23, k33 };

inline bool has_minor(const small_graph& g, minor_pattern h) {
    switch (h) {
    case minor_pattern::k4: return !k4_minor_free(g);
    case minor_pattern::k23: return has_k23_minor(g);
    case minor_pattern::k33: return has_minor_generic(g, complete_bipartite(3, 3));
    }
    throw std::logic_error("unhandled minor pattern");
}

// ---------------------------------------------------------------------------
// canonical forms

namespace detail {

// Lexicographically minimal edge bitstring over vertex relabelings, built
// block by block: placing position d fixes the d bits pairing it with the
// earlier positions, so worse prefixes prune immediately. `fixed` positions
// at the front are not permuted (used for roots and poles).
struct canonical_search {
    const small_graph& g;
    int n;
    std::array<int, small_graph::max_n> chosen{};
    std::array<uint32_t, small_graph::max_n> best{};

    explicit canonical_search(const small_graph& gg)
        : g(gg), n(std::min(gg.n, small_graph::max_n)) {
        best.fill(~0u);
    }

    uint32_t block_bits(int d, int v) const {
        uint32_t b = 0;
        for (int i = 0; i < d; ++i)
            if (g.has_edge(chosen[i], v)) b |= 1u << i;
        return b;
    }

    // Fix positions 0..k-1 to the vertices already in `chosen` and record
    // their blocks, so the search and assembly start from a defined prefix.
    uint32_t seed_prefix(int k) {
        uint32_t used = 0;
        for (int d = 0; d < k; ++d) {
            best[d] = block_bits(d, chosen[d]);
            used |= 1u << chosen[d];
        }
        return used;
    }

    // Explores only orderings whose block sequence stays equal to the best
    // known prefix; a strictly smaller block lowers the record and invalidates
    // everything deeper.
    void run(uint32_t used, int d) {
        if (d >= n) return;
        for (int v = 0; v < n; ++v) {
            if (used >> v & 1u) continue;
            uint32_t b = block_bits(d, v);
            if (b > best[d]) continue;
            if (b < best[d]) {
                best[d] = b;
                for (int j = d + 1; j < n; ++j) best[j] = ~0u;
            }
            chosen[d] = v;
            run(used | 1u << v, d + 1);
        }
    }

    uint32_t assemble() const {
        uint32_t out = 0;
        int pos = 0;
        for (int d = 0; d < n; ++d) {
            out |= best[d] << pos;
            pos += d;
        }
        return out;
    }
};

} // namespace detail

// Minimal adjacency bitstring over all n! relabelings.
inline uint32_t canonical_form(const small_graph& g) {
    if (g.n <= 1) return 0;
    detail::canonical_search s(g);
    s.run(0, 0);
    return s.assemble();
}

// Minimal bitstring over relabelings that put `root` at position 0.
inline uint32_t canonical_rooted(const small_graph& g, int root) {
    detail::canonical_search s(g);
    s.chosen[0] = root;
    s.run(s.seed_prefix(1), 1);
    return s.assemble();
}

// Minimal bitstring with the first `k` vertices fixed pointwise (poles).
inline uint32_t canonical_with_fixed_prefix(const small_graph& g, int k) {
    detail::canonical_search s(g);
    for (int i = 0; i < k; ++i) s.chosen[i] = i;
    s.run(s.seed_prefix(k), k);
    return s.assemble();
}

// ---------------------------------------------------------------------------
// census

enum class connectivity { all, connected, two_connected };

inline const char* to_string(connectivity c) {
    switch (c) {
    case connectivity::all: return "all";
    case connectivity::connected: return "connected";
    case connectivity::two_connected: return "2-connected";
    }
    return "?";
}

namespace detail {

inline bool connected_in_class(const small_graph& g, graph_class cls) {
    switch (cls) {
    case graph_class::trees: return is_tree(g);
    case graph_class::cacti: return is_cactus(g);
    case graph_class::outerplanar: return is_outerplanar(g);
    case graph_class::sp: return is_sp(g);
    }
    return false;
}

// For the "all" flavor every component must belong to the class.
inline bool all_components_in_class(const small_graph& g, graph_class cls) {
    uint32_t remaining = (1u << g.n) - 1;
    while (remaining) {
        int start = __builtin_ctz(remaining);
        uint32_t comp = reach_mask(g, start, remaining);
        small_graph h;
        h.n = __builtin_popcount(comp);
        std::array<int, small_graph::max_n> map{};
        int idx = 0;
        for (int v = 0; v < g.n; ++v)
            if (comp >> v & 1u) map[v] = idx++;
        for (int j = 1; j < g.n; ++j)
            for (int i = 0; i < j; ++i)
                if ((comp >> i & 1u) && (comp >> j & 1u) && g.has_edge(i, j))
                    h.add_edge(map[i], map[j]);
        if (!connected_in_class(h, cls)) return false;
        remaining &= ~comp;
    }
    return true;
}

inline int max_edges_for(graph_class cls, int n) {
    switch (cls) {
    case graph_class::trees: return n - 1;
    case graph_class::cacti: return n <= 1 ? 0 : 3 * (n - 1) / 2;
    case graph_class::outerplanar:
    case graph_class::sp: return n <= 1 ? 0 : 2 * n - 3;
    }
    return n * (n - 1) / 2;
}

} // namespace detail

struct census_row {
    graph_class cls;
    connectivity conn;
    int n = 0;
    unsigned long long labelled = 0;
    unsigned long long unlabelled = 0;
    unsigned long long rooted_labelled = 0;
    unsigned long long rooted_unlabelled = 0;
    bool has_unlabelled = false;
    // parameter -> (value -> count over labelled members); "degree" counts
    // (graph, vertex) pairs, "root_degree" counts rooted unlabelled orbits.
    std::map<std::string, std::map<long, unsigned long long>> histograms;
};

// Iterate every edge subset on n labelled vertices and accumulate the graphs
// that match the class and connectivity. Unlabelled counting marks a graph
// when it equals its own canonical form, so each isomorphism orbit is counted
// exactly once; rooted orbits fix the root at position 0.
inline census_row enumerate(graph_class cls, int n, connectivity conn,
                            bool with_unlabelled = true) {
    if (n < 1 || n > small_graph::max_n)
        throw std::invalid_argument("oracle census supports 1 <= n <= 8");
    if (n > 7 && !(cls == graph_class::trees || cls == graph_class::cacti))
        throw std::invalid_argument("n = 8 census is limited to trees and cacti");

    census_row row;
    row.cls = cls;
    row.conn = conn;
    row.n = n;
    row.has_unlabelled = with_unlabelled;

    const int pairs = n * (n - 1) / 2;
    const int max_m = detail::max_edges_for(cls, n);

    auto consider = [&](uint32_t mask) {
        small_graph g;
        g.n = n;
        g.edges = mask;
        switch (conn) {
        case connectivity::all:
            if (!detail::all_components_in_class(g, cls)) return;
            break;
        case connectivity::connected:
            if (!is_connected(g) || !detail::connected_in_class(g, cls)) return;
            break;
        case connectivity::two_connected:
            if (!is_two_connected(g) || !detail::connected_in_class(g, cls)) return;
            break;
        }

        ++row.labelled;
        row.rooted_labelled += n;
        ++row.histograms["edges"][g.edge_count()];
        if (conn != connectivity::all) {
            auto bd = block_decompose(g);
            ++row.histograms["blocks"][static_cast<long>(bd.blocks.size())];
            ++row.histograms["cut_vertices"][bd.cut_vertex_count()];
        }
        for (int v = 0; v < n; ++v) ++row.histograms["degree"][g.degree(v)];

        if (with_unlabelled && canonical_form(g) == g.edges) {
            ++row.unlabelled;
            // every rooted orbit of this isomorphism class appears among the
            // rooted canonical forms of (g, r), each exactly once
            std::map<uint32_t, int> rooted_forms;
            for (int r = 0; r < n; ++r) rooted_forms.emplace(canonical_rooted(g, r), g.degree(r));
            row.rooted_unlabelled += rooted_forms.size();
            for (const auto& [form, deg] : rooted_forms) ++row.histograms["root_degree"][deg];
        }
    };

    if (n <= 7) {
        const uint32_t total = 1u << pairs;
        for (uint32_t mask = 0; mask < total; ++mask) {
            if (__builtin_popcount(mask) > max_m) continue;
            consider(mask);
        }
    } else {
        // iterate fixed-popcount masks (Gosper) within the class edge bound
        const int m_lo = conn == connectivity::all ? 0 : n - 1;
        for (int m = m_lo; m <= max_m; ++m) {
            if (m == 0) { consider(0); continue; }
            uint32_t mask = (1u << m) - 1;
            const uint32_t limit = 1u << pairs;
            while (mask < limit) {
                consider(mask);
                uint32_t c = mask & -mask;
                uint32_t r = mask + c;
                mask = (((r ^ mask) >> 2) / c) | r;
            }
        }
    }
    return row;
}

// ---------------------------------------------------------------------------
// series-parallel networks: two poles plus n internal vertices such that
// adding the pole edge (when absent) gives a 2-connected K4-minor-free graph

struct network_census_row {
    int n = 0; // internal vertices
    unsigned long long labelled = 0;
    unsigned long long series_labelled = 0; // no pole edge, poles separated by a cut vertex
    unsigned long long with_pole_edge = 0;
    unsigned long long unlabelled_fixed = 0; // orbits fixing each pole
    unsigned long long unlabelled_swap = 0;  // orbits allowing pole exchange
};

inline bool is_sp_network(const small_graph& g) {
    small_graph h = g;
    h.add_edge(0, 1);
    return is_two_connected(h) && k4_minor_free(h);
}

// Poles are vertices 0 and 1; internal vertices are 2..n+1.
inline network_census_row network_census(int n) {
    if (n < 0 || n + 2 > small_graph::max_n)
        throw std::invalid_argument("network census supports 0 <= n <= 6");
    network_census_row row;
    row.n = n;
    const int nv = n + 2;
    const int pairs = nv * (nv - 1) / 2;
    std::array<int, small_graph::max_n> swap_poles{};
    swap_poles[0] = 1;
    swap_poles[1] = 0;
    for (int v = 2; v < nv; ++v) swap_poles[v] = v;

    for (uint32_t mask = 0; mask < (1u << pairs); ++mask) {
        small_graph g;
        g.n = nv;
        g.edges = mask;
        if (!is_sp_network(g)) continue;
        ++row.labelled;
        if (g.has_edge(0, 1)) {
            ++row.with_pole_edge;
        } else if (n >= 1 && detail::disjoint_path_count(g, 0, 1, 2) <= 1) {
            ++row.series_labelled;
        }
        uint32_t cf = canonical_with_fixed_prefix(g, 2);
        if (cf == g.edges) {
            ++row.unlabelled_fixed;
            uint32_t cs = canonical_with_fixed_prefix(g.permuted(swap_poles), 2);
            if (cf <= cs) ++row.unlabelled_swap;
        }
    }
    return row;
}

} // namespace subcrit::oracle
