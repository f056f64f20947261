#pragma once

#include <string>
#include <vector>

#include "srl/game.hpp"

namespace srl {

// One network edge with an affine delay a + b * load and a per-edge
// observation noise level sigma >= 0.
struct CongestionEdge {
    std::string name;
    double delay_base = 0.0;   // a
    double delay_slope = 0.0;  // b, per unit load
    double sigma = 0.0;
};

// Routing game over a shared edge set: each player picks one of its paths
// (a nonempty subset of edges), pays the summed edge delays at the loads
// induced by everyone's choices, and observes per-edge noise.
struct CongestionNetwork {
    std::vector<CongestionEdge> edges;
    // paths[k][a] = edge indices of action a of player k.
    std::vector<std::vector<std::vector<int>>> paths;

    void validate() const;
    int players() const { return static_cast<int>(paths.size()); }
    int num_actions(int player) const { return static_cast<int>(paths[player].size()); }
    // P_ra = 1 iff edge r lies on path a; rows = edges, row-major, one block
    // of columns per player in coordinate order.
    std::vector<std::vector<int>> incidence_matrix() const;
};

struct CongestionGame {
    Game game;                       // payoffs = -(total path delay)
    std::vector<double> covariance;  // row-major total_coords x total_coords
    int dim = 0;

    double covariance_at(int i, int j) const { return covariance[i * dim + j]; }
};

// Builds the normal-form game induced by the network together with the
// (state-independent) score-noise covariance: Sigma[(k,a),(j,b)] =
// sum of sigma_r^2 over the edges shared by the two paths.
CongestionGame build_congestion_game(const CongestionNetwork& network);

// Two single-edge routes per player, both edges with delay = load, unit
// noise on both edges. Anti-coordination: splitting is a strict equilibrium.
CongestionNetwork two_route_network(double sigma = 1.0);

// Single player, two paths sharing one noisy edge; the slow route is
// strictly dominated (constant delay gap = margin).
CongestionNetwork shared_edge_network(double margin = 1.0, double sigma_shared = 1.0,
                                      double sigma_private = 1.0);

}  // namespace srl
