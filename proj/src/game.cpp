#include "srl/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "srl/errors.hpp"

namespace srl {

Game::Game(std::vector<int> actions, std::vector<std::vector<double>> payoffs,
           bool zero_sum, std::vector<std::vector<std::string>> action_labels)
    : actions_(std::move(actions)),
      payoffs_(std::move(payoffs)),
      zero_sum_(zero_sum),
      labels_(std::move(action_labels)) {
    if (actions_.empty()) throw ConfigError("game needs at least one player");
    if (payoffs_.size() != actions_.size())
        throw ConfigError("game needs one payoff tensor per player");
    num_profiles_ = 1;
    for (int n : actions_) {
        if (n < 1) throw ConfigError("every player needs at least one action");
        num_profiles_ *= n;
    }
    offsets_.resize(actions_.size());
    for (std::size_t k = 0; k < actions_.size(); ++k) {
        offsets_[k] = total_coords_;
        total_coords_ += actions_[k];
    }
    for (std::size_t k = 0; k < payoffs_.size(); ++k) {
        if (static_cast<long long>(payoffs_[k].size()) != num_profiles_)
            throw ConfigError("payoff tensor for player " + std::to_string(k + 1) +
                              " has wrong size");
        for (double u : payoffs_[k])
            if (!std::isfinite(u)) throw ConfigError("payoff entries must be finite");
    }
    if (zero_sum_) {
        if (players() != 2) throw ConfigError("zero-sum flag requires exactly 2 players");
        for (long long i = 0; i < num_profiles_; ++i)
            if (std::abs(payoffs_[0][i] + payoffs_[1][i]) > 1e-12)
                throw ConfigError("game flagged zero-sum but u1 + u2 != 0");
    }
    if (!labels_.empty()) {
        if (labels_.size() != actions_.size())
            throw ConfigError("action labels need one list per player");
        for (std::size_t k = 0; k < labels_.size(); ++k)
            if (static_cast<int>(labels_[k].size()) != actions_[k])
                throw ConfigError("action label count mismatch for player " +
                                  std::to_string(k + 1));
    }
}

Game Game::two_player(int n1, int n2, std::vector<double> a, std::vector<double> b,
                      bool zero_sum) {
    return Game({n1, n2}, {std::move(a), std::move(b)}, zero_sum);
}

std::string Game::action_label(int player, int action) const {
    if (!labels_.empty()) return labels_[player][action];
    return "a" + std::to_string(action + 1);
}

double Game::payoff(int player, const ActionProfile& profile) const {
    if (static_cast<int>(profile.size()) != players())
        throw ConfigError("action profile has wrong number of players");
    long long idx = 0;
    for (int j = 0; j < players(); ++j) {
        if (profile[j] < 0 || profile[j] >= actions_[j])
            throw ConfigError("action index out of range");
        idx = idx * actions_[j] + profile[j];
    }
    return payoffs_[player][idx];
}

void Game::require_profile_shape(const MixedProfile& x) const {
    if (static_cast<int>(x.size()) != players())
        throw ConfigError("mixed profile has wrong number of players");
    for (int k = 0; k < players(); ++k)
        if (static_cast<int>(x[k].size()) != actions_[k])
            throw ConfigError("mixed strategy of player " + std::to_string(k + 1) +
                              " has wrong dimension");
}

void Game::payoff_vector(int player, const MixedProfile& x, std::vector<double>& out) const {
    require_profile_shape(x);
    out.assign(actions_[player], 0.0);
    const int n = players();
    ActionProfile profile(n, 0);
    for (long long flat = 0; flat < num_profiles_; ++flat) {
        long long rem = flat;
        for (int j = n - 1; j >= 0; --j) {
            profile[j] = static_cast<int>(rem % actions_[j]);
            rem /= actions_[j];
        }
        double w = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j == player) continue;
            w *= x[j][profile[j]];
        }
        out[profile[player]] += w * payoffs_[player][flat];
    }
}

std::vector<double> Game::payoff_vector(int player, const MixedProfile& x) const {
    std::vector<double> v;
    payoff_vector(player, x, v);
    return v;
}

void Game::payoff_vectors_flat(const std::vector<double>& x_flat,
                               std::vector<double>& out) const {
    if (static_cast<int>(x_flat.size()) != total_coords_)
        throw ConfigError("flat strategy vector has wrong dimension");
    out.assign(total_coords_, 0.0);
    const int n = players();
    ActionProfile profile(n, 0);
    for (long long flat = 0; flat < num_profiles_; ++flat) {
        long long rem = flat;
        for (int j = n - 1; j >= 0; --j) {
            profile[j] = static_cast<int>(rem % actions_[j]);
            rem /= actions_[j];
        }
        for (int k = 0; k < n; ++k) {
            double w = 1.0;
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                w *= x_flat[offsets_[j] + profile[j]];
            }
            out[offsets_[k] + profile[k]] += w * payoffs_[k][flat];
        }
    }
}

double Game::expected_payoff(int player, const MixedProfile& x) const {
    const std::vector<double> v = payoff_vector(player, x);
    double u = 0.0;
    for (int a = 0; a < actions_[player]; ++a) u += v[a] * x[player][a];
    return u;
}

ActionProfile Game::profile_at(long long flat_index) const {
    ActionProfile profile(players(), 0);
    long long rem = flat_index;
    for (int j = players() - 1; j >= 0; --j) {
        profile[j] = static_cast<int>(rem % actions_[j]);
        rem /= actions_[j];
    }
    return profile;
}

double nash_gap(const Game& game, const MixedProfile& x) {
    double gap = 0.0;
    for (int k = 0; k < game.players(); ++k) {
        const std::vector<double> v = game.payoff_vector(k, x);
        double u = 0.0;
        for (int a = 0; a < game.num_actions(k); ++a) u += v[a] * x[k][a];
        for (int a = 0; a < game.num_actions(k); ++a) gap = std::max(gap, v[a] - u);
    }
    return gap;
}

bool is_strict_nash(const Game& game, const ActionProfile& profile) {
    if (static_cast<int>(profile.size()) != game.players())
        throw ConfigError("action profile has wrong number of players");
    for (int k = 0; k < game.players(); ++k) {
        const double here = game.payoff(k, profile);
        ActionProfile dev = profile;
        for (int a = 0; a < game.num_actions(k); ++a) {
            if (a == profile[k]) continue;
            dev[k] = a;
            if (game.payoff(k, dev) >= here) return false;
        }
        dev[k] = profile[k];
    }
    return true;
}

namespace {

// Visit every pure profile of the opponents of `player`, yielding the
// payoff row v_k(.) against that profile.
template <typename Fn>
void for_each_opponent_profile(const Game& game, int player, Fn&& fn) {
    const int n = game.players();
    ActionProfile profile(n, 0);
    std::vector<double> row(game.num_actions(player));
    long long count = 1;
    for (int j = 0; j < n; ++j)
        if (j != player) count *= game.num_actions(j);
    for (long long flat = 0; flat < count; ++flat) {
        long long rem = flat;
        for (int j = n - 1; j >= 0; --j) {
            if (j == player) continue;
            profile[j] = static_cast<int>(rem % game.num_actions(j));
            rem /= game.num_actions(j);
        }
        for (int a = 0; a < game.num_actions(player); ++a) {
            profile[player] = a;
            row[a] = game.payoff(player, profile);
        }
        fn(row);
    }
}

}  // namespace

DominanceMargin dominance_margin(const Game& game, int player, int action_a, int action_b) {
    if (action_a < 0 || action_a >= game.num_actions(player) || action_b < 0 ||
        action_b >= game.num_actions(player))
        throw ConfigError("dominance_margin: action index out of range");
    if (action_a == action_b) return {0.0, true};
    double m = std::numeric_limits<double>::infinity();
    for_each_opponent_profile(game, player, [&](const std::vector<double>& row) {
        m = std::min(m, row[action_b] - row[action_a]);
    });
    return {m, false};
}

double mixed_dominance_margin(const Game& game, int player,
                              const std::vector<double>& p, const std::vector<double>& q) {
    if (static_cast<int>(p.size()) != game.num_actions(player) ||
        static_cast<int>(q.size()) != game.num_actions(player))
        throw ConfigError("mixed_dominance_margin: strategy dimension mismatch");
    double m = std::numeric_limits<double>::infinity();
    for_each_opponent_profile(game, player, [&](const std::vector<double>& row) {
        double d = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a) d += row[a] * (q[a] - p[a]);
        m = std::min(m, d);
    });
    return m;
}

std::vector<std::vector<int>> iterated_dominance_survivors(const Game& game) {
    std::vector<std::vector<int>> alive(game.players());
    for (int k = 0; k < game.players(); ++k) {
        alive[k].resize(game.num_actions(k));
        std::iota(alive[k].begin(), alive[k].end(), 0);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int k = 0; k < game.players(); ++k) {
            std::vector<int> keep;
            for (int a : alive[k]) {
                bool dominated = false;
                for (int b : alive[k]) {
                    if (a == b) continue;
                    // Minimum of v_kb - v_ka over surviving opponent profiles.
                    double m = std::numeric_limits<double>::infinity();
                    std::vector<int> idx(game.players(), 0);
                    const long long total = [&] {
                        long long c = 1;
                        for (int j = 0; j < game.players(); ++j)
                            if (j != k) c *= static_cast<long long>(alive[j].size());
                        return c;
                    }();
                    ActionProfile profile(game.players(), 0);
                    for (long long flat = 0; flat < total; ++flat) {
                        long long rem = flat;
                        for (int j = game.players() - 1; j >= 0; --j) {
                            if (j == k) continue;
                            const auto& opts = alive[j];
                            profile[j] = opts[rem % opts.size()];
                            rem /= static_cast<long long>(opts.size());
                        }
                        profile[k] = b;
                        double vb = game.payoff(k, profile);
                        profile[k] = a;
                        double va = game.payoff(k, profile);
                        m = std::min(m, vb - va);
                    }
                    if (m > 0.0) {
                        dominated = true;
                        break;
                    }
                }
                if (!dominated) keep.push_back(a);
            }
            if (keep.size() < alive[k].size()) {
                alive[k] = std::move(keep);
                changed = true;
            }
        }
    }
    return alive;
}

MixedProfile uniform_profile(const Game& game) {
    MixedProfile x(game.players());
    for (int k = 0; k < game.players(); ++k)
        x[k].assign(game.num_actions(k), 1.0 / game.num_actions(k));
    return x;
}

MixedProfile pure_profile(const Game& game, const ActionProfile& profile) {
    MixedProfile x(game.players());
    for (int k = 0; k < game.players(); ++k) {
        x[k].assign(game.num_actions(k), 0.0);
        x[k][profile[k]] = 1.0;
    }
    return x;
}

MixedProfile sanitize_profile(const Game& game, MixedProfile x) {
    game.require_profile_shape(x);
    for (int k = 0; k < game.players(); ++k) {
        double sum = 0.0;
        for (double& p : x[k]) {
            if (p < 0.0) {
                if (p < -1e-15) throw ConfigError("mixed strategy has a negative entry");
                p = 0.0;
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw ConfigError("mixed strategy does not sum to 1");
        for (double& p : x[k]) p /= sum;
    }
    return x;
}

std::vector<double> flatten(const Game& game, const MixedProfile& x) {
    game.require_profile_shape(x);
    std::vector<double> flat;
    flat.reserve(game.total_coords());
    for (const auto& xk : x) flat.insert(flat.end(), xk.begin(), xk.end());
    return flat;
}

MixedProfile unflatten(const Game& game, const std::vector<double>& flat) {
    if (static_cast<int>(flat.size()) != game.total_coords())
        throw ConfigError("flat strategy vector has wrong dimension");
    MixedProfile x(game.players());
    for (int k = 0; k < game.players(); ++k) {
        const int off = game.coord_offset(k);
        x[k].assign(flat.begin() + off, flat.begin() + off + game.num_actions(k));
    }
    return x;
}

Game matching_pennies() {
    // Row player wins on a match.
    std::vector<double> a = {1.0, -1.0, -1.0, 1.0};
    std::vector<double> b = {-1.0, 1.0, 1.0, -1.0};
    return Game({2, 2}, {a, b}, true, {{"heads", "tails"}, {"heads", "tails"}});
}

Game coordination_2x2(double aa, double bb) {
    std::vector<double> a = {aa, 0.0, 0.0, bb};
    return Game({2, 2}, {a, a}, false, {{"a", "b"}, {"a", "b"}});
}

Game prisoners_dilemma(double t, double r, double p, double s) {
    std::vector<double> a = {r, s, t, p};
    std::vector<double> b = {r, t, s, p};
    return Game({2, 2}, {a, b}, false,
                {{"cooperate", "defect"}, {"cooperate", "defect"}});
}

Game single_player(std::vector<double> payoffs) {
    const int n = static_cast<int>(payoffs.size());
    return Game({n}, {std::move(payoffs)});
}

}  // namespace srl
