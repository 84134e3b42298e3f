#include "nbhd/network_features.hpp"

#include "nbhd/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace nbhd {

NeighborhoodGraph build_graph(const Neighborhood& nb, const Matrix& coords, double edge_threshold) {
    if (!(edge_threshold > 0.0)) {
        throw Error(ErrorKind::Validation, "edge threshold must be positive");
    }
    NeighborhoodGraph g;
    g.cells = nb.members;
    g.graph = Graph(nb.members.size());
    const double t2 = edge_threshold * edge_threshold;
    for (std::size_t a = 0; a < g.cells.size(); ++a) {
        if (g.cells[a] == nb.center) {
            g.center_node = a;
        }
        for (std::size_t b = a + 1; b < g.cells.size(); ++b) {
            const double dx = coords(g.cells[a], 0) - coords(g.cells[b], 0);
            const double dy = coords(g.cells[a], 1) - coords(g.cells[b], 1);
            if (dx * dx + dy * dy <= t2) {
                g.graph.add_edge(a, b);
            }
        }
    }
    return g;
}

StatRegistry StatRegistry::standard() {
    StatRegistry r;
    r.entries_ = {
        {"degree", Statistic::Degree},
        {"node_count", Statistic::NodeCount, true},
        {"betweenness", Statistic::Betweenness},
        {"closeness", Statistic::Closeness},
        {"eigenvector", Statistic::Eigenvector},
        {"eccentricity", Statistic::Eccentricity},
        {"subgraph_centrality", Statistic::SubgraphCentrality},
        {"load", Statistic::Load},
        {"gil_schmidt", Statistic::GilSchmidt},
        {"information", Statistic::Information},
        {"stress", Statistic::Stress},
        {"average_distance", Statistic::AverageDistance},
        {"barycenter", Statistic::Barycenter},
        {"latora_closeness", Statistic::LatoraCloseness},
        {"residual_closeness", Statistic::ResidualCloseness},
        {"communicability_betweenness", Statistic::CommunicabilityBetweenness},
        {"cross_clique", Statistic::CrossClique},
        {"decay", Statistic::Decay},
        {"diffusion_degree", Statistic::DiffusionDegree},
        {"radiality", Statistic::Radiality},
        {"geodesic_k_path", Statistic::GeodesicKPath},
        {"laplacian", Statistic::Laplacian},
        {"leverage", Statistic::Leverage},
        {"lin", Statistic::Lin},
        {"lobby", Statistic::Lobby},
        {"markov", Statistic::Markov},
        {"max_neighborhood_component", Statistic::MaxNeighborhoodComponent},
        {"semi_local", Statistic::SemiLocal},
        {"topological_coefficient", Statistic::TopologicalCoefficient},
    };
    return r;
}

StatRegistry StatRegistry::select(const std::vector<std::string>& names) {
    if (names.empty()) {
        throw Error(ErrorKind::Validation, "network statistic selection is empty");
    }
    const auto all = standard();
    StatRegistry r;
    for (const auto& name : names) {
        auto it = std::find_if(all.entries_.begin(), all.entries_.end(),
                               [&](const StatEntry& e) { return e.name == name; });
        if (it == all.entries_.end()) {
            throw Error(ErrorKind::Validation, "unknown network statistic '" + name + "'");
        }
        for (const auto& e : r.entries_) {
            if (e.name == name) {
                throw Error(ErrorKind::Validation, "network statistic '" + name + "' selected twice");
            }
        }
        r.entries_.push_back(*it);
    }
    return r;
}

std::vector<std::string> StatRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) {
        out.push_back(e.name);
    }
    return out;
}

namespace {

Eigen::MatrixXd adjacency_matrix(const Graph& g, const std::vector<std::size_t>& nodes) {
    const auto m = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (g.adjacent(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)])) {
                a(i, j) = 1.0;
            }
        }
    }
    return a;
}

Eigen::MatrixXd expm_symmetric(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    const Eigen::VectorXd e = solver.eigenvalues().array().exp();
    return solver.eigenvectors() * e.asDiagonal() * solver.eigenvectors().transpose();
}

std::size_t position_of(const std::vector<std::size_t>& sorted, std::size_t v) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

// Bron-Kerbosch with pivoting; counts maximal cliques of `g`.
void count_maximal_cliques(const Graph& g, std::vector<std::size_t> candidates, std::vector<std::size_t> excluded,
                           std::size_t& count) {
    if (candidates.empty()) {
        if (excluded.empty()) {
            ++count;
        }
        return;
    }
    // Pivot maximizing |candidates ∩ N(u)|.
    std::size_t pivot = candidates.front();
    std::size_t best = 0;
    for (const auto* set : {&candidates, &excluded}) {
        for (auto u : *set) {
            std::size_t overlap = 0;
            for (auto v : candidates) {
                overlap += g.adjacent(u, v) ? 1 : 0;
            }
            if (overlap >= best) {
                best = overlap;
                pivot = u;
            }
        }
    }

    std::vector<std::size_t> branch;
    for (auto v : candidates) {
        if (!g.adjacent(pivot, v)) {
            branch.push_back(v);
        }
    }
    for (auto v : branch) {
        std::vector<std::size_t> next_c;
        std::vector<std::size_t> next_x;
        for (auto u : candidates) {
            if (g.adjacent(u, v)) {
                next_c.push_back(u);
            }
        }
        for (auto u : excluded) {
            if (g.adjacent(u, v)) {
                next_x.push_back(u);
            }
        }
        count_maximal_cliques(g, std::move(next_c), std::move(next_x), count);
        candidates.erase(std::find(candidates.begin(), candidates.end(), v));
        excluded.push_back(v);
    }
}

}  // namespace

CentralityEvaluator::CentralityEvaluator(const Graph& graph, NetworkParams params)
    : graph_(graph), params_(params) {
    const auto n = graph_.node_count();
    if (n == 0) {
        throw Error(ErrorKind::Validation, "network statistics need a graph with at least one node");
    }
    dist_.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
        dist_.push_back(graph_.bfs_distances(v));
    }
    component_id_.assign(n, -1);
    int next = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (component_id_[v] < 0) {
            for (std::size_t w = 0; w < n; ++w) {
                if (dist_[v][w] >= 0) {
                    component_id_[w] = next;
                }
            }
            ++next;
        }
    }
}

const CentralityEvaluator::Brandes& CentralityEvaluator::brandes() const {
    if (brandes_) {
        return *brandes_;
    }
    const auto n = graph_.node_count();
    Brandes b;
    b.betweenness.assign(n, 0.0);
    b.stress.assign(n, 0.0);
    b.load.assign(n, 0.0);

    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<double> beta(n);
    std::vector<double> flow(n);
    std::vector<int> d(n);
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<std::size_t> order;

    for (std::size_t s = 0; s < n; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(d.begin(), d.end(), -1);
        for (auto& p : preds) {
            p.clear();
        }
        order.clear();

        sigma[s] = 1.0;
        d[s] = 0;
        std::deque<std::size_t> queue{s};
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (auto w : graph_.neighbors(v)) {
                if (d[w] < 0) {
                    d[w] = d[v] + 1;
                    queue.push_back(w);
                }
                if (d[w] == d[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }

        for (auto v : order) {
            delta[v] = 0.0;
            beta[v] = 0.0;
            flow[v] = 1.0;
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto w = *it;
            const double share = flow[w] / static_cast<double>(std::max<std::size_t>(preds[w].size(), 1));
            for (auto v : preds[w]) {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                beta[v] += 1.0 + beta[w];
                if (v != s) {
                    flow[v] += share;
                }
            }
            if (w != s) {
                b.betweenness[w] += delta[w];
                b.stress[w] += sigma[w] * beta[w];
                b.load[w] += flow[w] - 1.0;
            }
        }
    }
    // Every unordered pair was visited from both endpoints.
    for (std::size_t v = 0; v < n; ++v) {
        b.betweenness[v] /= 2.0;
        b.stress[v] /= 2.0;
        b.load[v] /= 2.0;
    }
    brandes_ = std::move(b);
    return *brandes_;
}

double CentralityEvaluator::eigenvector(std::size_t node) const {
    const auto comp = graph_.component_of(node);
    if (comp.size() < 2) {
        return 0.0;
    }
    // Power iteration on A + I: same eigenvectors, and the shift makes the
    // Perron root strictly dominant in magnitude on bipartite components too.
    const auto m = comp.size();
    std::vector<std::vector<std::size_t>> local(m);
    for (std::size_t a = 0; a < m; ++a) {
        for (auto w : graph_.neighbors(comp[a])) {
            local[a].push_back(position_of(comp, w));
        }
    }
    std::vector<double> x(m, 1.0 / std::sqrt(static_cast<double>(m)));
    std::vector<double> y(m);
    for (int iter = 0; iter < 100000; ++iter) {
        double norm = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            double acc = x[a];
            for (auto b : local[a]) {
                acc += x[b];
            }
            y[a] = acc;
            norm += acc * acc;
        }
        norm = std::sqrt(norm);
        double change = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            y[a] /= norm;
            change = std::max(change, std::abs(y[a] - x[a]));
        }
        x.swap(y);
        if (change < 1e-14) {
            break;
        }
    }
    return x[position_of(comp, node)];
}

double CentralityEvaluator::subgraph(std::size_t node) const {
    const auto comp = graph_.component_of(node);
    const auto g = expm_symmetric(adjacency_matrix(graph_, comp));
    const auto c = static_cast<Eigen::Index>(position_of(comp, node));
    return g(c, c);
}

double CentralityEvaluator::information(std::size_t node) const {
    const auto comp = graph_.component_of(node);
    const auto m = static_cast<Eigen::Index>(comp.size());
    if (m < 2) {
        return 0.0;
    }
    const Eigen::MatrixXd a = adjacency_matrix(graph_, comp);
    Eigen::MatrixXd l = -a;
    l.diagonal() = a.rowwise().sum();
    const Eigen::MatrixXd c = (l + Eigen::MatrixXd::Ones(m, m)).llt().solve(Eigen::MatrixXd::Identity(m, m));
    const auto i = static_cast<Eigen::Index>(position_of(comp, node));
    // Sum of effective resistances from the node to its component.
    const double resistance = static_cast<double>(m) * c(i, i) + c.trace() - 2.0 * c.row(i).sum();
    return static_cast<double>(m) / resistance;
}

double CentralityEvaluator::communicability_betweenness(std::size_t node) const {
    const auto comp = graph_.component_of(node);
    const auto m = static_cast<Eigen::Index>(comp.size());
    if (m <= 2) {
        return 0.0;
    }
    const auto c = static_cast<Eigen::Index>(position_of(comp, node));
    Eigen::MatrixXd a = adjacency_matrix(graph_, comp);
    const Eigen::MatrixXd full = expm_symmetric(a);
    a.row(c).setZero();
    a.col(c).setZero();
    const Eigen::MatrixXd without = expm_symmetric(a);

    double total = 0.0;
    for (Eigen::Index p = 0; p < m; ++p) {
        for (Eigen::Index q = 0; q < m; ++q) {
            if (p == q || p == c || q == c) {
                continue;
            }
            total += (full(p, q) - without(p, q)) / full(p, q);
        }
    }
    const double k = static_cast<double>(m - 1);
    return total / (k * k - k);
}

double CentralityEvaluator::cross_clique(std::size_t node) const {
    const auto& nbrs = graph_.neighbors(node);
    if (nbrs.empty()) {
        return 1.0;  // the node alone is a maximal clique
    }
    const Graph local = graph_.induced(nbrs);
    std::vector<std::size_t> all(nbrs.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::size_t count = 0;
    count_maximal_cliques(local, all, {}, count);
    return static_cast<double>(count);
}

double CentralityEvaluator::radiality(std::size_t node) const {
    const auto comp = graph_.component_of(node);
    if (comp.size() < 2) {
        return 0.0;
    }
    int diameter = 0;
    for (auto u : comp) {
        for (auto v : comp) {
            diameter = std::max(diameter, dist_[u][v]);
        }
    }
    double total = 0.0;
    for (auto v : comp) {
        if (v != node) {
            total += static_cast<double>(diameter + 1 - dist_[node][v]);
        }
    }
    return total / static_cast<double>(comp.size() - 1);
}

double CentralityEvaluator::markov(std::size_t node) const {
    const auto comp = graph_.component_of(node);
    if (comp.size() < 2) {
        return 0.0;
    }
    // Mean first-passage times h into `node`: h_j = 1 + sum_k P_jk h_k, h_node = 0.
    std::vector<std::size_t> others;
    for (auto v : comp) {
        if (v != node) {
            others.push_back(v);
        }
    }
    const auto m = static_cast<Eigen::Index>(others.size());
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const auto v = others[static_cast<std::size_t>(a)];
        const double p = 1.0 / static_cast<double>(graph_.degree(v));
        for (auto w : graph_.neighbors(v)) {
            if (w != node) {
                system(a, static_cast<Eigen::Index>(position_of(others, w))) -= p;
            }
        }
    }
    const Eigen::VectorXd h = system.partialPivLu().solve(Eigen::VectorXd::Ones(m));
    return static_cast<double>(m) / h.sum();
}

double CentralityEvaluator::max_neighborhood_component(std::size_t node) const {
    const auto& nbrs = graph_.neighbors(node);
    if (nbrs.empty()) {
        return 0.0;
    }
    const Graph local = graph_.induced(nbrs);
    std::vector<bool> seen(nbrs.size(), false);
    std::size_t best = 0;
    for (std::size_t v = 0; v < nbrs.size(); ++v) {
        if (!seen[v]) {
            const auto comp = local.component_of(v);
            for (auto w : comp) {
                seen[w] = true;
            }
            best = std::max(best, comp.size());
        }
    }
    return static_cast<double>(best);
}

double CentralityEvaluator::semi_local(std::size_t node) const {
    const auto n = graph_.node_count();
    double total = 0.0;
    for (auto w : graph_.neighbors(node)) {
        for (auto u : graph_.neighbors(w)) {
            std::size_t within_two = 0;
            for (std::size_t v = 0; v < n; ++v) {
                if (v != u && dist_[u][v] > 0 && dist_[u][v] <= 2) {
                    ++within_two;
                }
            }
            total += static_cast<double>(within_two);
        }
    }
    return total;
}

double CentralityEvaluator::topological_coefficient(std::size_t node) const {
    const auto deg = graph_.degree(node);
    if (deg < 2) {
        return 0.0;
    }
    const auto n = graph_.node_count();
    double total = 0.0;
    std::size_t partners = 0;
    for (std::size_t m = 0; m < n; ++m) {
        if (m == node) {
            continue;
        }
        std::size_t shared = 0;
        for (auto w : graph_.neighbors(node)) {
            shared += graph_.adjacent(m, w) ? 1 : 0;
        }
        if (shared == 0) {
            continue;
        }
        ++partners;
        total += static_cast<double>(shared + (graph_.adjacent(node, m) ? 1 : 0));
    }
    if (partners == 0) {
        return 0.0;
    }
    return total / static_cast<double>(partners) / static_cast<double>(deg);
}

double CentralityEvaluator::evaluate(Statistic stat, std::size_t node) const {
    const auto n = graph_.node_count();
    if (node >= n) {
        throw Error(ErrorKind::Validation, "node index out of range");
    }
    const auto& d = dist_[node];
    std::size_t reachable = 0;
    double sum_d = 0.0;
    int ecc = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (v != node && d[v] > 0) {
            ++reachable;
            sum_d += d[v];
            ecc = std::max(ecc, d[v]);
        }
    }
    const double deg = static_cast<double>(graph_.degree(node));

    switch (stat) {
        case Statistic::Degree:
            return deg;
        case Statistic::NodeCount:
            return static_cast<double>(n);
        case Statistic::Betweenness:
            return brandes().betweenness[node];
        case Statistic::Closeness:
        case Statistic::GilSchmidt:
            return reachable ? static_cast<double>(reachable) / sum_d : 0.0;
        case Statistic::Eigenvector:
            return eigenvector(node);
        case Statistic::Eccentricity:
            return static_cast<double>(ecc);
        case Statistic::SubgraphCentrality:
            return subgraph(node);
        case Statistic::Load:
            return brandes().load[node];
        case Statistic::Information:
            return information(node);
        case Statistic::Stress:
            return brandes().stress[node];
        case Statistic::AverageDistance:
            return reachable ? sum_d / static_cast<double>(reachable) : 0.0;
        case Statistic::Barycenter:
            return reachable ? 1.0 / sum_d : 0.0;
        case Statistic::LatoraCloseness: {
            double total = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                if (d[v] > 0) {
                    total += 1.0 / d[v];
                }
            }
            return total;
        }
        case Statistic::ResidualCloseness: {
            double total = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                if (d[v] > 0) {
                    total += std::ldexp(1.0, -d[v]);
                }
            }
            return total;
        }
        case Statistic::CommunicabilityBetweenness:
            return communicability_betweenness(node);
        case Statistic::CrossClique:
            return cross_clique(node);
        case Statistic::Decay: {
            double total = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                if (d[v] > 0) {
                    total += std::pow(params_.decay, d[v]);
                }
            }
            return total;
        }
        case Statistic::DiffusionDegree: {
            double total = deg;
            for (auto w : graph_.neighbors(node)) {
                total += static_cast<double>(graph_.degree(w));
            }
            return total;
        }
        case Statistic::Radiality:
            return radiality(node);
        case Statistic::GeodesicKPath: {
            std::size_t count = 0;
            for (std::size_t v = 0; v < n; ++v) {
                if (d[v] > 0 && d[v] <= params_.k_path) {
                    ++count;
                }
            }
            return static_cast<double>(count);
        }
        case Statistic::Laplacian: {
            double total = deg * deg + deg;
            for (auto w : graph_.neighbors(node)) {
                total += 2.0 * static_cast<double>(graph_.degree(w));
            }
            return total;
        }
        case Statistic::Leverage: {
            if (deg == 0) {
                return 0.0;
            }
            double total = 0.0;
            for (auto w : graph_.neighbors(node)) {
                const double dw = static_cast<double>(graph_.degree(w));
                total += (deg - dw) / (deg + dw);
            }
            return total / deg;
        }
        case Statistic::Lin:
            return reachable ? std::pow(static_cast<double>(reachable + 1), 2) / sum_d : 0.0;
        case Statistic::Lobby: {
            std::vector<std::size_t> degs;
            for (auto w : graph_.neighbors(node)) {
                degs.push_back(graph_.degree(w));
            }
            std::sort(degs.rbegin(), degs.rend());
            std::size_t lobby = 0;
            while (lobby < degs.size() && degs[lobby] >= lobby + 1) {
                ++lobby;
            }
            return static_cast<double>(lobby);
        }
        case Statistic::Markov:
            return markov(node);
        case Statistic::MaxNeighborhoodComponent:
            return max_neighborhood_component(node);
        case Statistic::SemiLocal:
            return semi_local(node);
        case Statistic::TopologicalCoefficient:
            return topological_coefficient(node);
    }
    throw Error(ErrorKind::Validation, "unknown statistic");
}

std::vector<double> CentralityEvaluator::evaluate(const StatRegistry& registry, std::size_t node) const {
    std::vector<double> out;
    out.reserve(registry.size());
    for (const auto& entry : registry.entries()) {
        out.push_back(evaluate(entry.id, node));
    }
    return out;
}

std::vector<double> compute_network_features(const NeighborhoodGraph& g, const StatRegistry& registry,
                                             const NetworkParams& params) {
    CentralityEvaluator eval(g.graph, params);
    if (!params.mean_over_nodes) {
        return eval.evaluate(registry, g.center_node);
    }
    const auto n = g.graph.node_count();
    std::vector<double> out(registry.size(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        const auto row = eval.evaluate(registry, v);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += row[k];
        }
    }
    for (auto& x : out) {
        x /= static_cast<double>(n);
    }
    return out;
}

FeatureBlock network_matrix(const Matrix& coords, const std::vector<Neighborhood>& neighborhoods,
                            double edge_threshold, const StatRegistry& registry, const NetworkParams& params) {
    if (coords.rows() != neighborhoods.size()) {
        throw Error(ErrorKind::Validation, "coordinate rows do not match neighborhood count");
    }
    Matrix out(neighborhoods.size(), registry.size());
    out.set_col_names(registry.names());
    for (std::size_t i = 0; i < neighborhoods.size(); ++i) {
        const auto g = build_graph(neighborhoods[i], coords, edge_threshold);
        const auto row = compute_network_features(g, registry, params);
        std::copy(row.begin(), row.end(), out.row(i).begin());
    }

    FeatureBlock block;
    block.name = "network";
    block.values = std::move(out);
    block.provenance = "network(edge_threshold=" + std::to_string(edge_threshold) +
                       ", statistics=" + std::to_string(registry.size()) +
                       ", decay=" + std::to_string(params.decay) + ", k_path=" + std::to_string(params.k_path) +
                       (params.mean_over_nodes ? ", aggregation=mean)" : ", aggregation=center)");
    block.validate();
    return block;
}

}  // namespace nbhd
