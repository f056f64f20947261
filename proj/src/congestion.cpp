#include "srl/congestion.hpp"

#include <algorithm>
#include <cmath>

#include "srl/errors.hpp"

namespace srl {

void CongestionNetwork::validate() const {
    if (edges.empty()) throw ConfigError("congestion network has no edges");
    for (const auto& e : edges)
        if (e.sigma < 0.0) throw ConfigError("edge noise level must be >= 0");
    if (paths.empty()) throw ConfigError("congestion network has no players");
    for (const auto& player_paths : paths) {
        if (player_paths.empty()) throw ConfigError("every player needs at least one path");
        for (const auto& path : player_paths) {
            if (path.empty()) throw ConfigError("paths must be nonempty edge subsets");
            for (int r : path)
                if (r < 0 || r >= static_cast<int>(edges.size()))
                    throw ConfigError("path references an unknown edge");
            auto sorted = path;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw ConfigError("paths must not repeat edges");
        }
    }
}

std::vector<std::vector<int>> CongestionNetwork::incidence_matrix() const {
    int cols = 0;
    for (const auto& p : paths) cols += static_cast<int>(p.size());
    std::vector<std::vector<int>> inc(edges.size(), std::vector<int>(cols, 0));
    int col = 0;
    for (const auto& player_paths : paths)
        for (const auto& path : player_paths) {
            for (int r : path) inc[r][col] = 1;
            ++col;
        }
    return inc;
}

CongestionGame build_congestion_game(const CongestionNetwork& network) {
    network.validate();
    const int n_players = network.players();
    std::vector<int> actions(n_players);
    for (int k = 0; k < n_players; ++k) actions[k] = network.num_actions(k);

    long long n_profiles = 1;
    for (int n : actions) n_profiles *= n;

    std::vector<std::vector<double>> payoffs(n_players,
                                             std::vector<double>(n_profiles, 0.0));
    std::vector<int> load(network.edges.size());
    ActionProfile profile(n_players, 0);
    for (long long flat = 0; flat < n_profiles; ++flat) {
        long long rem = flat;
        for (int j = n_players - 1; j >= 0; --j) {
            profile[j] = static_cast<int>(rem % actions[j]);
            rem /= actions[j];
        }
        std::fill(load.begin(), load.end(), 0);
        for (int k = 0; k < n_players; ++k)
            for (int r : network.paths[k][profile[k]]) ++load[r];
        for (int k = 0; k < n_players; ++k) {
            double delay = 0.0;
            for (int r : network.paths[k][profile[k]]) {
                const auto& e = network.edges[r];
                delay += e.delay_base + e.delay_slope * load[r];
            }
            payoffs[k][flat] = -delay;
        }
    }

    CongestionGame out{Game(actions, std::move(payoffs)), {}, 0};
    out.dim = out.game.total_coords();

    // Sigma[(k,a),(j,b)] = sum of sigma_r^2 over shared edges.
    std::vector<std::vector<int>> on_edge;  // coordinate -> sorted edge list
    for (int k = 0; k < n_players; ++k)
        for (const auto& path : network.paths[k]) {
            auto sorted = path;
            std::sort(sorted.begin(), sorted.end());
            on_edge.push_back(std::move(sorted));
        }
    out.covariance.assign(static_cast<std::size_t>(out.dim) * out.dim, 0.0);
    for (int i = 0; i < out.dim; ++i)
        for (int j = i; j < out.dim; ++j) {
            double s = 0.0;
            std::size_t a = 0, b = 0;
            while (a < on_edge[i].size() && b < on_edge[j].size()) {
                if (on_edge[i][a] == on_edge[j][b]) {
                    const double sig = network.edges[on_edge[i][a]].sigma;
                    s += sig * sig;
                    ++a;
                    ++b;
                } else if (on_edge[i][a] < on_edge[j][b]) {
                    ++a;
                } else {
                    ++b;
                }
            }
            out.covariance[i * out.dim + j] = s;
            out.covariance[j * out.dim + i] = s;
        }
    return out;
}

CongestionNetwork two_route_network(double sigma) {
    CongestionNetwork net;
    net.edges = {{"top", 0.0, 1.0, sigma}, {"bottom", 0.0, 1.0, sigma}};
    net.paths = {{{0}, {1}}, {{0}, {1}}};
    return net;
}

CongestionNetwork shared_edge_network(double margin, double sigma_shared,
                                      double sigma_private) {
    CongestionNetwork net;
    net.edges = {{"shared", 1.0, 0.0, sigma_shared},
                 {"fast", 0.0, 0.0, sigma_private},
                 {"slow", margin, 0.0, sigma_private}};
    net.paths = {{{0, 1}, {0, 2}}};
    return net;
}

}  // namespace srl
