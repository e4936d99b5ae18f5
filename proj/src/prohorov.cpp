#include "mopp/prohorov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace mopp {

namespace {

void require_same_space(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    if (!(mu.space() == nu.space()))
        throw std::invalid_argument("measures live on different spaces");
}

// Pairwise atom distances, deduplicated, with 0 prepended.
std::vector<double> epsilon_breakpoints(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    std::vector<double> eps;
    eps.reserve(mu.size() * nu.size() + 1);
    eps.push_back(0.0);
    for (const Atom& a : mu.atoms())
        for (const Atom& b : nu.atoms()) eps.push_back(mu.space().distance(a.location, b.location));
    std::sort(eps.begin(), eps.end());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    return eps;
}

// Dinic max flow on the bipartite deficiency network. Node ids:
// source = 0, mu-atom i = 1 + i, nu-atom j = 1 + n_mu + j, sink = last.
class DeficiencyNetwork {
public:
    DeficiencyNetwork(const std::vector<double>& mu_w, const std::vector<double>& nu_w)
        : mu_w_(mu_w), nu_w_(nu_w) {}

    // Max deficiency max_A [mu(A) - nu(A^eps)] where adj(i, j) says whether
    // d(x_i, y_j) <= eps. Returns the deficiency of the optimal subset,
    // re-summed directly in index order so the value matches subset
    // enumeration bit for bit on exact-arithmetic weights.
    double max_deficiency(const std::vector<std::vector<char>>& adj) {
        build(adj);
        run_max_flow();
        std::vector<char> reachable(node_count_, 0);
        mark_reachable(reachable);
        double kept = 0.0;
        for (std::size_t i = 0; i < mu_w_.size(); ++i)
            if (reachable[1 + i]) kept += mu_w_[i];
        double covered = 0.0;
        for (std::size_t j = 0; j < nu_w_.size(); ++j)
            if (reachable[1 + mu_w_.size() + j]) covered += nu_w_[j];
        return kept - covered;
    }

private:
    struct Edge {
        int to;
        double residual;
        std::size_t twin;
    };

    void add_edge(int from, int to, double capacity) {
        graph_[from].push_back(edges_.size());
        edges_.push_back({to, capacity, edges_.size() + 1});
        graph_[to].push_back(edges_.size());
        edges_.push_back({from, 0.0, edges_.size() - 1});
    }

    void build(const std::vector<std::vector<char>>& adj) {
        node_count_ = 2 + mu_w_.size() + nu_w_.size();
        source_ = 0;
        sink_ = static_cast<int>(node_count_) - 1;
        edges_.clear();
        graph_.assign(node_count_, {});
        for (std::size_t i = 0; i < mu_w_.size(); ++i) add_edge(source_, 1 + static_cast<int>(i), mu_w_[i]);
        for (std::size_t j = 0; j < nu_w_.size(); ++j)
            add_edge(1 + static_cast<int>(mu_w_.size() + j), sink_, nu_w_[j]);
        const double inf = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < mu_w_.size(); ++i)
            for (std::size_t j = 0; j < nu_w_.size(); ++j)
                if (adj[i][j])
                    add_edge(1 + static_cast<int>(i), 1 + static_cast<int>(mu_w_.size() + j), inf);
    }

    bool bfs_levels() {
        level_.assign(node_count_, -1);
        level_[source_] = 0;
        std::queue<int> queue;
        queue.push(source_);
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop();
            for (std::size_t id : graph_[v]) {
                const Edge& e = edges_[id];
                if (e.residual > 0.0 && level_[e.to] < 0) {
                    level_[e.to] = level_[v] + 1;
                    queue.push(e.to);
                }
            }
        }
        return level_[sink_] >= 0;
    }

    double dfs_augment(int v, double limit) {
        if (v == sink_) return limit;
        for (std::size_t& idx = next_[v]; idx < graph_[v].size(); ++idx) {
            Edge& e = edges_[graph_[v][idx]];
            if (e.residual > 0.0 && level_[e.to] == level_[v] + 1) {
                const double pushed = dfs_augment(e.to, std::min(limit, e.residual));
                if (pushed > 0.0) {
                    e.residual -= pushed;
                    edges_[e.twin].residual += pushed;
                    return pushed;
                }
            }
        }
        level_[v] = -1;
        return 0.0;
    }

    void run_max_flow() {
        const double inf = std::numeric_limits<double>::infinity();
        while (bfs_levels()) {
            next_.assign(node_count_, 0);
            while (dfs_augment(source_, inf) > 0.0) {
            }
        }
    }

    void mark_reachable(std::vector<char>& reachable) const {
        std::queue<int> queue;
        queue.push(source_);
        reachable[source_] = 1;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop();
            for (std::size_t id : graph_[v]) {
                const Edge& e = edges_[id];
                if (e.residual > 0.0 && !reachable[e.to]) {
                    reachable[e.to] = 1;
                    queue.push(e.to);
                }
            }
        }
    }

    std::vector<double> mu_w_;
    std::vector<double> nu_w_;
    std::size_t node_count_ = 0;
    int source_ = 0;
    int sink_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> graph_;
    std::vector<int> level_;
    std::vector<std::size_t> next_;
};

struct Instance {
    std::vector<double> mu_w;
    std::vector<double> nu_w;
    std::vector<std::vector<double>> dist;  // dist[i][j]
    std::vector<double> breakpoints;
};

Instance make_instance(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    Instance inst;
    inst.mu_w.reserve(mu.size());
    for (const Atom& a : mu.atoms()) inst.mu_w.push_back(a.weight);
    inst.nu_w.reserve(nu.size());
    for (const Atom& b : nu.atoms()) inst.nu_w.push_back(b.weight);
    inst.dist.assign(mu.size(), std::vector<double>(nu.size(), 0.0));
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j)
            inst.dist[i][j] = mu.space().distance(mu.atoms()[i].location, nu.atoms()[j].location);
    inst.breakpoints = epsilon_breakpoints(mu, nu);
    return inst;
}

std::vector<std::vector<char>> adjacency_at(const Instance& inst, double eps) {
    std::vector<std::vector<char>> adj(inst.mu_w.size(), std::vector<char>(inst.nu_w.size(), 0));
    for (std::size_t i = 0; i < inst.mu_w.size(); ++i)
        for (std::size_t j = 0; j < inst.nu_w.size(); ++j) adj[i][j] = inst.dist[i][j] <= eps;
    return adj;
}

std::vector<std::vector<char>> transposed(const std::vector<std::vector<char>>& adj,
                                          std::size_t rows, std::size_t cols) {
    std::vector<std::vector<char>> out(cols, std::vector<char>(rows, 0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out[j][i] = adj[i][j];
    return out;
}

// Scans breakpoint intervals [d_k, d_{k+1}) for the smallest feasible
// eps = max(d_k, F(d_k)); F is nonincreasing so the first hit is the infimum.
double scan_intervals(const std::vector<double>& breakpoints,
                      const std::function<double(double)>& deficiency_at) {
    for (std::size_t k = 0; k < breakpoints.size(); ++k) {
        const double d = breakpoints[k];
        const double f = deficiency_at(d);
        const double candidate = std::max(d, f);
        const bool last = k + 1 == breakpoints.size();
        if (last || candidate < breakpoints[k + 1]) return candidate;
    }
    return 0.0;  // unreachable: breakpoints always contain 0
}

}  // namespace

ProhorovResult prohorov_distance(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    require_same_space(mu, nu);
    const Instance inst = make_instance(mu, nu);

    const auto deficiency_at = [&](double eps) {
        const auto adj = adjacency_at(inst, eps);
        DeficiencyNetwork forward(inst.mu_w, inst.nu_w);
        DeficiencyNetwork backward(inst.nu_w, inst.mu_w);
        const double f_forward = forward.max_deficiency(adj);
        const double f_backward =
            backward.max_deficiency(transposed(adj, inst.mu_w.size(), inst.nu_w.size()));
        return std::max({f_forward, f_backward, 0.0});
    };

    ProhorovResult result;
    result.value = scan_intervals(inst.breakpoints, deficiency_at);
    result.witness_epsilon_breakpoints = inst.breakpoints;
    return result;
}

namespace {

// max_S [sum_{i in S} w_i - sum_{j adjacent to S} v_j] over all subsets S,
// summing in index order (same arithmetic as the flow-cut evaluation).
double subset_max_deficiency(const std::vector<double>& w, const std::vector<double>& v,
                             const std::vector<std::vector<char>>& adj) {
    const std::size_t n = w.size();
    double best = 0.0;  // S empty
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        double kept = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::uint64_t{1} << i)) kept += w[i];
        double covered = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            bool hit = false;
            for (std::size_t i = 0; i < n && !hit; ++i)
                if ((mask & (std::uint64_t{1} << i)) && adj[i][j]) hit = true;
            if (hit) covered += v[j];
        }
        best = std::max(best, kept - covered);
    }
    return best;
}

}  // namespace

double prohorov_bruteforce(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    require_same_space(mu, nu);
    if (mu.size() + nu.size() > 16)
        throw std::invalid_argument("prohorov_bruteforce: more than 16 atoms combined");
    const Instance inst = make_instance(mu, nu);

    const auto deficiency_at = [&](double eps) {
        const auto adj = adjacency_at(inst, eps);
        const double f_forward = subset_max_deficiency(inst.mu_w, inst.nu_w, adj);
        const double f_backward = subset_max_deficiency(
            inst.nu_w, inst.mu_w, transposed(adj, inst.mu_w.size(), inst.nu_w.size()));
        return std::max(f_forward, f_backward);
    };

    return scan_intervals(inst.breakpoints, deficiency_at);
}

double mo_distance(const AtomicMeasure& mu, const AtomicMeasure& nu) {
    require_same_space(mu, nu);
    std::vector<double> radii;
    radii.reserve(mu.size() + nu.size());
    for (const Atom& a : mu.atoms()) radii.push_back(mu.space().cone_distance(a.location));
    for (const Atom& b : nu.atoms()) radii.push_back(nu.space().cone_distance(b.location));
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    double total = 0.0;
    double prev = 0.0;
    for (const double r : radii) {
        const double p = prohorov_distance(mu.restricted(r), nu.restricted(r)).value;
        if (p > 0.0) total += (std::exp(-prev) - std::exp(-r)) * (p / (1.0 + p));
        prev = r;
    }
    return total;
}

}  // namespace mopp
