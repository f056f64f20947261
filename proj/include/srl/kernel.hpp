#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace srl {

// Separable penalty kernel theta on [0,1] defining a regularized choice map
// on the simplex through h(x) = sum_a theta(x_a).
//
// Built-ins:
//   entropy    theta(z) = z log z      -> logit map, steep, K = 1
//   quadratic  theta(z) = z^2 / 2      -> Euclidean simplex projection, K = 1
// Custom separable kernels supply theta and its first three derivatives.
class PenaltyKernel {
public:
    enum class Kind { Entropy, Quadratic, GenericSeparable };

    static PenaltyKernel entropy();
    static PenaltyKernel quadratic();
    static PenaltyKernel separable(std::string name,
                                   std::function<double(double)> theta,
                                   std::function<double(double)> theta_d1,
                                   std::function<double(double)> theta_d2,
                                   std::function<double(double)> theta_d3,
                                   bool steep, double strong_convexity);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool steep() const { return steep_; }
    // Strong convexity modulus K with respect to the Euclidean norm.
    double strong_convexity() const { return strong_convexity_; }

    double theta(double z) const;
    double theta_d1(double z) const;
    double theta_d2(double z) const;
    double theta_d3(double z) const;

    // phi = inverse of theta'; arguments outside theta's slope range are
    // clamped to the [0, 1] endpoints. For entropy: phi(w) = exp(w - 1).
    double phi(double w) const;

    // h(x) = sum_a theta(x_a).
    double penalty(const std::vector<double>& x) const;

    // max h - min h over the n-simplex: theta(1) + (n-1) theta(0) - n theta(1/n).
    double omega(int n) const;

    // Checks theta'' >= K on a grid of 10^4 points of (0, 1]; throws on
    // violation. Built-ins pass by construction.
    void validate() const;

private:
    PenaltyKernel() = default;
    Kind kind_ = Kind::Entropy;
    std::string name_;
    bool steep_ = true;
    double strong_convexity_ = 1.0;
    struct Fns;
    std::shared_ptr<const Fns> fns_;  // only for GenericSeparable
};

// Q(y): unique maximizer of <y, x> - h(x) over the simplex.
// Entropy and quadratic use closed forms; generic separable kernels go
// through the safeguarded multiplier solver below.
std::vector<double> choice_map(const PenaltyKernel& kernel, const std::vector<double>& y);
void choice_map(const PenaltyKernel& kernel, const std::vector<double>& y,
                std::vector<double>& out);

// Generic separable solver: finds the multiplier z with
// sum_a phi(y_a - z) = 1 by bisection-safeguarded Newton (tolerance 1e-12,
// at most 200 iterations), then x_a = phi(y_a - z). Works for any kernel
// kind; used directly by the oracle tests.
std::vector<double> choice_map_separable(const PenaltyKernel& kernel,
                                         const std::vector<double>& y);

// h*(y) = <y, Q(y)> - h(Q(y)); log-sum-exp for entropy.
double conjugate_value(const PenaltyKernel& kernel, const std::vector<double>& y);

// F(p, y) = h(p) + h*(y) - <y, p> >= 0, with equality iff p = Q(y).
double fenchel_coupling(const PenaltyKernel& kernel, const std::vector<double>& p,
                        const std::vector<double>& y);

// Benchmark/score pair together with its coupling value.
struct FenchelState {
    std::vector<double> benchmark;
    std::vector<double> scores;
    double value = 0.0;
};
FenchelState make_fenchel_state(const PenaltyKernel& kernel, std::vector<double> p,
                                std::vector<double> y);

// Diagonal of the Hessian of h* at y, via the inverse Hessian of h on the
// affine hull of the face spanned by Q(y):
//   d2h*/dy_a^2 = (1/theta''_a) (1 - T'' / theta''_a),
//   T'' = (sum_b 1/theta''_b)^(-1), sums over the support of Q(y).
// Every entry lies in [0, 1/K]. A one-point support has no tangent
// directions; the diagonal is zero and `degenerate` is set.
struct ConjugateHessianDiag {
    std::vector<double> diag;
    bool degenerate = false;
};
ConjugateHessianDiag conjugate_hessian_diag(const PenaltyKernel& kernel,
                                            const std::vector<double>& y);

// Kernel registry used by experiment configs ("entropy", "quadratic", plus
// anything registered at startup).
PenaltyKernel kernel_by_name(const std::string& name);
void register_kernel(const PenaltyKernel& kernel);
std::vector<std::string> registered_kernel_names();

}  // namespace srl
