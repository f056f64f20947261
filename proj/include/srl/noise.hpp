#pragma once

#include <cstdint>
#include <vector>

#include "srl/rng.hpp"

namespace srl {

class Game;

// Observation-noise model over the flat (player, action) coordinates.
//
//   None        no diffusion term.
//   Diagonal    independent per-coordinate coefficients sigma_i(x),
//               constant or affine in the flat strategy profile.
//   Correlated  constant covariance Sigma, factored once as L L^T; the
//               increment is L xi sqrt(dt) with standard normal xi.
class NoiseModel {
public:
    enum class Mode { None, Diagonal, Correlated };

    static NoiseModel none(int dim);
    static NoiseModel diagonal_uniform(double sigma, int dim);
    static NoiseModel diagonal(std::vector<double> sigma);
    // sigma_i(x) = base_i + sum_j coeff_i[j] * x_j (flat layout);
    // sigma_max is the declared uniform bound used by the analysis bounds.
    static NoiseModel diagonal_affine(std::vector<double> base,
                                      std::vector<std::vector<double>> coeff,
                                      double sigma_max);
    // Symmetric PSD covariance, row-major dim x dim. Eigenvalues in
    // [-1e-10, 0) are clipped to zero; anything lower is rejected.
    static NoiseModel correlated(std::vector<double> covariance, int dim);

    Mode mode() const { return mode_; }
    int dim() const { return dim_; }

    bool state_dependent() const { return !coeff_.empty(); }
    double sigma_at(int coord, const std::vector<double>& x_flat) const;
    // Declared (or derived) uniform bound on every sigma_i.
    double sigma_max() const { return sigma_max_; }

    // Diagonal a-vs-b noise scale of the extinction bounds:
    //   diagonal:   (sigma_a^2 + sigma_b^2) / 2   (constant case; affine uses
    //               the declared bound)
    //   correlated: half the variance rate of Z_a - Z_b,
    //               (Sigma_aa + Sigma_bb - 2 Sigma_ab) / 2.
    double pair_sigma_sq(int coord_a, int coord_b) const;

    const std::vector<double>& covariance() const { return covariance_; }
    const std::vector<double>& factor() const { return factor_; }  // L, row-major

    // Fills `out` with the noise increment over dt at state x_flat, drawing
    // one normal per coordinate from the counter rng at `step`.
    void sample_increment(const std::vector<double>& x_flat, double dt,
                          const TrajectoryRng& rng, std::uint64_t step,
                          std::vector<double>& out) const;

    // Checks 0 <= sigma_i(x) <= sigma_max on all pure profiles of `game`
    // plus random interior samples (exact for affine coefficients).
    void validate_against(const Game& game, int random_samples = 256,
                          std::uint64_t seed = 0) const;

private:
    Mode mode_ = Mode::None;
    int dim_ = 0;
    std::vector<double> sigma_;                // diagonal base
    std::vector<std::vector<double>> coeff_;   // affine coefficients, optional
    double sigma_max_ = 0.0;
    std::vector<double> covariance_;           // correlated only
    std::vector<double> factor_;               // correlated only
};

// Increment vector as a value (spec-facing convenience wrapper).
std::vector<double> sample_noise_increment(const NoiseModel& noise,
                                           const std::vector<double>& x_flat, double dt,
                                           const TrajectoryRng& rng, std::uint64_t step);

}  // namespace srl
