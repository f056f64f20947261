#include "srl/noise.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "srl/errors.hpp"
#include "srl/game.hpp"

namespace srl {

NoiseModel NoiseModel::none(int dim) {
    NoiseModel m;
    m.mode_ = Mode::None;
    m.dim_ = dim;
    return m;
}

NoiseModel NoiseModel::diagonal_uniform(double sigma, int dim) {
    return diagonal(std::vector<double>(dim, sigma));
}

NoiseModel NoiseModel::diagonal(std::vector<double> sigma) {
    NoiseModel m;
    m.mode_ = Mode::Diagonal;
    m.dim_ = static_cast<int>(sigma.size());
    for (double s : sigma)
        if (s < 0.0) throw ConfigError("noise coefficients must be >= 0");
    m.sigma_max_ = sigma.empty() ? 0.0 : *std::max_element(sigma.begin(), sigma.end());
    m.sigma_ = std::move(sigma);
    return m;
}

NoiseModel NoiseModel::diagonal_affine(std::vector<double> base,
                                       std::vector<std::vector<double>> coeff,
                                       double sigma_max) {
    NoiseModel m = diagonal(std::move(base));
    if (coeff.size() != m.sigma_.size())
        throw ConfigError("affine noise coefficients need one row per coordinate");
    for (const auto& row : coeff)
        if (row.size() != m.sigma_.size())
            throw ConfigError("affine noise coefficient rows must have full dimension");
    if (sigma_max <= 0.0) throw ConfigError("affine noise needs a declared sigma_max > 0");
    m.coeff_ = std::move(coeff);
    m.sigma_max_ = sigma_max;
    return m;
}

NoiseModel NoiseModel::correlated(std::vector<double> covariance, int dim) {
    if (static_cast<int>(covariance.size()) != dim * dim)
        throw ConfigError("covariance matrix has wrong size");
    Eigen::MatrixXd sig(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) sig(i, j) = covariance[i * dim + j];
    if (!sig.isApprox(sig.transpose(), 1e-10))
        throw ConfigError("covariance matrix must be symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sig);
    if (es.info() != Eigen::Success)
        throw SimulationError("covariance factorization failed");
    Eigen::VectorXd lam = es.eigenvalues();
    for (int i = 0; i < dim; ++i) {
        if (lam(i) < -1e-10)
            throw ConfigError("covariance matrix is not positive semidefinite");
        lam(i) = std::max(lam(i), 0.0);  // clip near-PSD rounding
    }
    const Eigen::MatrixXd l = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();

    NoiseModel m;
    m.mode_ = Mode::Correlated;
    m.dim_ = dim;
    m.covariance_ = std::move(covariance);
    m.factor_.resize(static_cast<std::size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m.factor_[i * dim + j] = l(i, j);
    double smax = 0.0;
    for (int i = 0; i < dim; ++i) smax = std::max(smax, std::sqrt(sig(i, i)));
    m.sigma_max_ = smax;
    return m;
}

double NoiseModel::sigma_at(int coord, const std::vector<double>& x_flat) const {
    if (mode_ == Mode::None) return 0.0;
    if (mode_ == Mode::Correlated)
        return std::sqrt(covariance_[static_cast<std::size_t>(coord) * dim_ + coord]);
    double s = sigma_[coord];
    if (!coeff_.empty())
        for (int j = 0; j < dim_; ++j) s += coeff_[coord][j] * x_flat[j];
    return s;
}

double NoiseModel::pair_sigma_sq(int a, int b) const {
    if (mode_ == Mode::None) return 0.0;
    if (mode_ == Mode::Correlated) {
        const double saa = covariance_[static_cast<std::size_t>(a) * dim_ + a];
        const double sbb = covariance_[static_cast<std::size_t>(b) * dim_ + b];
        const double sab = covariance_[static_cast<std::size_t>(a) * dim_ + b];
        return 0.5 * (saa + sbb - 2.0 * sab);
    }
    if (!coeff_.empty()) return sigma_max_ * sigma_max_;  // declared bound
    return 0.5 * (sigma_[a] * sigma_[a] + sigma_[b] * sigma_[b]);
}

void NoiseModel::sample_increment(const std::vector<double>& x_flat, double dt,
                                  const TrajectoryRng& rng, std::uint64_t step,
                                  std::vector<double>& out) const {
    out.assign(dim_, 0.0);
    if (mode_ == Mode::None || dt <= 0.0) return;
    const double root_dt = std::sqrt(dt);
    if (mode_ == Mode::Diagonal) {
        for (int i = 0; i < dim_; ++i)
            out[i] = sigma_at(i, x_flat) * root_dt * rng.normal(step, i);
        return;
    }
    for (int j = 0; j < dim_; ++j) {
        const double xi = rng.normal(step, j) * root_dt;
        for (int i = 0; i < dim_; ++i) out[i] += factor_[i * dim_ + j] * xi;
    }
}

std::vector<double> sample_noise_increment(const NoiseModel& noise,
                                           const std::vector<double>& x_flat, double dt,
                                           const TrajectoryRng& rng, std::uint64_t step) {
    std::vector<double> out;
    noise.sample_increment(x_flat, dt, rng, step, out);
    return out;
}

void NoiseModel::validate_against(const Game& game, int random_samples,
                                  std::uint64_t seed) const {
    if (dim_ != game.total_coords())
        throw ConfigError("noise model dimension does not match the game");
    if (mode_ != Mode::Diagonal) return;

    const auto check = [&](const std::vector<double>& x_flat) {
        for (int i = 0; i < dim_; ++i) {
            const double s = sigma_at(i, x_flat);
            if (s < -1e-12 || s > sigma_max_ + 1e-12)
                throw ConfigError("noise coefficient leaves [0, sigma_max] on the simplex");
        }
    };
    for (long long p = 0; p < game.num_profiles(); ++p)
        check(flatten(game, pure_profile(game, game.profile_at(p))));

    TrajectoryRng r{seed, 0};
    for (int s = 0; s < random_samples; ++s) {
        MixedProfile x(game.players());
        std::uint32_t coord = 0;
        for (int k = 0; k < game.players(); ++k) {
            x[k].resize(game.num_actions(k));
            double sum = 0.0;
            for (double& v : x[k]) {
                v = -std::log(r.uniform(s, coord++, 0));
                sum += v;
            }
            for (double& v : x[k]) v /= sum;
        }
        check(flatten(game, x));
    }
}

}  // namespace srl
