#pragma once

#include <optional>
#include <string>
#include <vector>

namespace srl {

// One pure action per player.
using ActionProfile = std::vector<int>;

// Per-player probability vectors over the action sets.
using MixedProfile = std::vector<std::vector<double>>;

// Finite normal-form game: N players, finite action sets, one dense payoff
// tensor per player indexed row-major over joint action profiles.
class Game {
public:
    // payoffs[k] must have size prod_j actions[j]; entries must be finite.
    Game(std::vector<int> actions, std::vector<std::vector<double>> payoffs,
         bool zero_sum = false,
         std::vector<std::vector<std::string>> action_labels = {});

    // 2-player convenience: row player payoff matrix A (n1 x n2) and column
    // player payoff matrix B, both row-major in (a1, a2).
    static Game two_player(int n1, int n2, std::vector<double> a, std::vector<double> b,
                           bool zero_sum = false);

    int players() const { return static_cast<int>(actions_.size()); }
    int num_actions(int player) const { return actions_[player]; }
    const std::vector<int>& action_counts() const { return actions_; }
    // Total number of (player, action) coordinates; this is the state
    // dimension of the score process.
    int total_coords() const { return total_coords_; }
    // Offset of player k's block in the flat coordinate layout.
    int coord_offset(int player) const { return offsets_[player]; }
    bool zero_sum() const { return zero_sum_; }
    const std::vector<std::vector<std::string>>& labels() const { return labels_; }
    std::string action_label(int player, int action) const;

    double payoff(int player, const ActionProfile& profile) const;
    const std::vector<double>& payoff_tensor(int player) const { return payoffs_[player]; }

    // v_k(x): expected payoff of each pure action of `player` against the
    // opponents' mixed strategies. Multilinear in the opponent components.
    std::vector<double> payoff_vector(int player, const MixedProfile& x) const;
    void payoff_vector(int player, const MixedProfile& x, std::vector<double>& out) const;

    // u_k(x) = <v_k(x), x_k>, computed through payoff_vector so the two
    // agree bit-for-bit.
    double expected_payoff(int player, const MixedProfile& x) const;

    // All players' payoff vectors against the flat (player-major) strategy
    // profile, written into `out` in the same layout. Single tensor sweep;
    // this is the integrator's hot path.
    void payoff_vectors_flat(const std::vector<double>& x_flat,
                             std::vector<double>& out) const;

    // Iterate all joint pure profiles (row-major).
    long long num_profiles() const { return num_profiles_; }
    ActionProfile profile_at(long long flat_index) const;

    void require_profile_shape(const MixedProfile& x) const;

private:
    std::vector<int> actions_;
    std::vector<std::vector<double>> payoffs_;
    bool zero_sum_ = false;
    std::vector<std::vector<std::string>> labels_;
    std::vector<int> offsets_;
    int total_coords_ = 0;
    long long num_profiles_ = 1;
};

// Best deviation gain: max over players k and actions b of v_kb(x) - u_k(x).
// Nonnegative everywhere; zero exactly at Nash equilibria.
double nash_gap(const Game& game, const MixedProfile& x);

// True iff every unilateral pure deviation strictly hurts the deviator.
bool is_strict_nash(const Game& game, const ActionProfile& profile);

struct DominanceMargin {
    double margin = 0.0;     // min over opponent pure profiles of v_kb - v_ka
    bool degenerate = false; // a == b
};

// Pure-strategy dominance a < b for `player`: margin > 0 iff b strictly
// dominates a. The minimum over the product of simplices is attained at a
// vertex, so opponent pure profiles are enumerated exactly.
DominanceMargin dominance_margin(const Game& game, int player, int action_a, int action_b);

// Mixed-vs-mixed variant: min over opponent pure profiles of <v_k, q - p>.
double mixed_dominance_margin(const Game& game, int player,
                              const std::vector<double>& p, const std::vector<double>& q);

// Rounds of pure-strategy elimination until a fixed point; returns the
// surviving action indices per player.
std::vector<std::vector<int>> iterated_dominance_survivors(const Game& game);

// Profile helpers -----------------------------------------------------------

MixedProfile uniform_profile(const Game& game);
MixedProfile pure_profile(const Game& game, const ActionProfile& profile);

// Enforces the simplex invariants: entries in [-1e-15, 0) are clamped to 0,
// each vector is renormalized, and entries below -1e-15 or sums away from 1
// by more than 1e-12 (before renormalization) are rejected.
MixedProfile sanitize_profile(const Game& game, MixedProfile x);

// Flatten / unflatten between MixedProfile and the player-major coordinate
// layout used by the dynamics.
std::vector<double> flatten(const Game& game, const MixedProfile& x);
MixedProfile unflatten(const Game& game, const std::vector<double>& flat);

// Built-in test games -------------------------------------------------------

// Canonical +-1 Matching Pennies; player 1 wants to match.
Game matching_pennies();
// 2x2 coordination game with diagonal payoffs (aa, aa) and (bb, bb), zero
// off-diagonal. Strict equilibria on the diagonal when aa, bb > 0.
Game coordination_2x2(double aa = 2.0, double bb = 1.0);
// Prisoner's Dilemma with temptation/reward/punishment/sucker payoffs.
Game prisoners_dilemma(double t = 5.0, double r = 3.0, double p = 1.0, double s = 0.0);
// Single player, one payoff per action.
Game single_player(std::vector<double> payoffs);

}  // namespace srl
