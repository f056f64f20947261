#include "srl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "srl/errors.hpp"

namespace srl {

struct PenaltyKernel::Fns {
    std::function<double(double)> theta, d1, d2, d3;
};

PenaltyKernel PenaltyKernel::entropy() {
    PenaltyKernel k;
    k.kind_ = Kind::Entropy;
    k.name_ = "entropy";
    k.steep_ = true;
    k.strong_convexity_ = 1.0;
    return k;
}

PenaltyKernel PenaltyKernel::quadratic() {
    PenaltyKernel k;
    k.kind_ = Kind::Quadratic;
    k.name_ = "quadratic";
    k.steep_ = false;
    k.strong_convexity_ = 1.0;
    return k;
}

PenaltyKernel PenaltyKernel::separable(std::string name,
                                       std::function<double(double)> theta,
                                       std::function<double(double)> theta_d1,
                                       std::function<double(double)> theta_d2,
                                       std::function<double(double)> theta_d3,
                                       bool steep, double strong_convexity) {
    if (strong_convexity <= 0.0)
        throw ConfigError("kernel strong convexity modulus must be > 0");
    PenaltyKernel k;
    k.kind_ = Kind::GenericSeparable;
    k.name_ = std::move(name);
    k.steep_ = steep;
    k.strong_convexity_ = strong_convexity;
    auto fns = std::make_shared<Fns>();
    fns->theta = std::move(theta);
    fns->d1 = std::move(theta_d1);
    fns->d2 = std::move(theta_d2);
    fns->d3 = std::move(theta_d3);
    k.fns_ = std::move(fns);
    return k;
}

double PenaltyKernel::theta(double z) const {
    switch (kind_) {
        case Kind::Entropy: return z > 0.0 ? z * std::log(z) : 0.0;
        case Kind::Quadratic: return 0.5 * z * z;
        case Kind::GenericSeparable: return fns_->theta(z);
    }
    return 0.0;
}

double PenaltyKernel::theta_d1(double z) const {
    switch (kind_) {
        case Kind::Entropy: return 1.0 + std::log(z);
        case Kind::Quadratic: return z;
        case Kind::GenericSeparable: return fns_->d1(z);
    }
    return 0.0;
}

double PenaltyKernel::theta_d2(double z) const {
    switch (kind_) {
        case Kind::Entropy: return 1.0 / z;
        case Kind::Quadratic: return 1.0;
        case Kind::GenericSeparable: return fns_->d2(z);
    }
    return 0.0;
}

double PenaltyKernel::theta_d3(double z) const {
    switch (kind_) {
        case Kind::Entropy: return -1.0 / (z * z);
        case Kind::Quadratic: return 0.0;
        case Kind::GenericSeparable: return fns_->d3(z);
    }
    return 0.0;
}

double PenaltyKernel::phi(double w) const {
    if (kind_ == Kind::Entropy) {
        const double v = std::exp(w - 1.0);
        return v < 1.0 ? v : 1.0;
    }
    if (kind_ == Kind::Quadratic) return std::clamp(w, 0.0, 1.0);
    // Generic: invert theta' on (0, 1] by bisection (theta' is increasing).
    if (w >= theta_d1(1.0)) return 1.0;
    double hi = 1.0;
    double lo = 0.5;
    while (theta_d1(lo) > w) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-300) return 0.0;  // steep kernel driven to the boundary
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (theta_d1(mid) > w ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double PenaltyKernel::penalty(const std::vector<double>& x) const {
    double h = 0.0;
    for (double z : x) h += theta(z);
    return h;
}

double PenaltyKernel::omega(int n) const {
    return theta(1.0) + (n - 1) * theta(0.0) - n * theta(1.0 / n);
}

void PenaltyKernel::validate() const {
    const double k = strong_convexity_;
    for (int i = 1; i <= 10'000; ++i) {
        const double z = static_cast<double>(i) / 10'000.0;
        if (!(theta_d2(z) >= k - 1e-12))
            throw ConfigError("kernel '" + name_ + "' violates theta'' >= K at z = " +
                              std::to_string(z));
    }
}

namespace {

void require_finite(const std::vector<double>& y) {
    for (double v : y)
        if (!std::isfinite(v)) throw SimulationError("choice map input is not finite");
}

void logit_map(const std::vector<double>& y, std::vector<double>& out) {
    const double m = *std::max_element(y.begin(), y.end());
    out.resize(y.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = std::exp(y[i] - m);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
}

// Euclidean projection onto the simplex by sort-and-threshold.
void project_simplex(const std::vector<double>& y, std::vector<double>& out) {
    const int n = static_cast<int>(y.size());
    std::vector<double> u(y);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (int k = 0; k < n; ++k) {
        cum += u[k];
        const double t = (cum - 1.0) / (k + 1);
        if (u[k] - t > 0.0) tau = t;
    }
    out.resize(n);
    for (int i = 0; i < n; ++i) out[i] = std::max(0.0, y[i] - tau);
}

// phi extended beyond theta's slope range so the multiplier equation stays
// monotone during bracketing: linear above theta'(1), zero below the range.
double phi_extended(const PenaltyKernel& k, double w) {
    const double top = k.theta_d1(1.0);
    if (w > top) return 1.0 + (w - top) / k.theta_d2(1.0);
    return k.phi(w);
}

double phi_extended_slope(const PenaltyKernel& k, double w, double x) {
    const double top = k.theta_d1(1.0);
    if (w > top) return 1.0 / k.theta_d2(1.0);
    if (x <= 0.0) return 0.0;  // clamped region of a non-steep kernel
    return 1.0 / k.theta_d2(x);
}

}  // namespace

std::vector<double> choice_map_separable(const PenaltyKernel& kernel,
                                         const std::vector<double>& y) {
    require_finite(y);
    const int n = static_cast<int>(y.size());
    if (n == 0) throw ConfigError("choice map needs at least one coordinate");
    if (n == 1) return {1.0};

    // Shift invariance: work with y - max(y) so kernel evaluations stay in a
    // bounded range regardless of the score spread.
    const double shift = *std::max_element(y.begin(), y.end());
    std::vector<double> ys(y);
    for (double& v : ys) v -= shift;

    // S(z) = sum_a phi(y_a - z) - 1 is decreasing; the KKT multiplier lies in
    // [max y - theta'(1), max y - theta'(1/n)] (shifted: max y = 0).
    double lo = -kernel.theta_d1(1.0);
    double hi = -kernel.theta_d1(1.0 / n);
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw SimulationError("separable choice map solver: kernel slope is not "
                              "increasing ('" + kernel.name() + "')");
    std::vector<double> x(n);
    const auto eval = [&](double z, double& slope) {
        double s = -1.0;
        slope = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] = phi_extended(kernel, ys[i] - z);
            s += x[i];
            slope += phi_extended_slope(kernel, ys[i] - z, x[i]);
        }
        return s;
    };

    double slope = 0.0;
    double z = 0.5 * (lo + hi);
    double s = eval(z, slope);
    bool converged = std::abs(s) < 1e-13;
    for (int it = 0; it < 200 && !converged; ++it) {
        (s > 0.0 ? lo : hi) = z;
        double step = slope > 0.0 ? z + s / slope : lo - 1.0;  // S' = -slope
        if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
        z = step;
        s = eval(z, slope);
        converged = std::abs(s) < 1e-13 || (hi - lo) < 1e-12 * (1.0 + std::abs(z));
    }
    if (!converged)
        throw SimulationError("separable choice map solver did not converge for kernel '" +
                              kernel.name() + "'");
    // Land exactly on the simplex.
    double sum = 0.0;
    for (double v : x) sum += v;
    for (double& v : x) v /= sum;
    return x;
}

void choice_map(const PenaltyKernel& kernel, const std::vector<double>& y,
                std::vector<double>& out) {
    require_finite(y);
    switch (kernel.kind()) {
        case PenaltyKernel::Kind::Entropy: logit_map(y, out); return;
        case PenaltyKernel::Kind::Quadratic: project_simplex(y, out); return;
        case PenaltyKernel::Kind::GenericSeparable: out = choice_map_separable(kernel, y); return;
    }
}

std::vector<double> choice_map(const PenaltyKernel& kernel, const std::vector<double>& y) {
    std::vector<double> out;
    choice_map(kernel, y, out);
    return out;
}

double conjugate_value(const PenaltyKernel& kernel, const std::vector<double>& y) {
    require_finite(y);
    if (kernel.kind() == PenaltyKernel::Kind::Entropy) {
        const double m = *std::max_element(y.begin(), y.end());
        double s = 0.0;
        for (double v : y) s += std::exp(v - m);
        return m + std::log(s);
    }
    const std::vector<double> x = choice_map(kernel, y);
    double val = -kernel.penalty(x);
    for (std::size_t i = 0; i < y.size(); ++i) val += y[i] * x[i];
    return val;
}

double fenchel_coupling(const PenaltyKernel& kernel, const std::vector<double>& p,
                        const std::vector<double>& y) {
    if (p.size() != y.size()) throw ConfigError("fenchel_coupling: dimension mismatch");
    double sum = 0.0;
    for (double v : p) {
        if (v < -1e-9) throw ConfigError("fenchel_coupling: benchmark off the simplex");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("fenchel_coupling: benchmark off the simplex");
    double f = kernel.penalty(p) + conjugate_value(kernel, y);
    for (std::size_t i = 0; i < p.size(); ++i) f -= y[i] * p[i];
    // Fenchel's inequality makes F >= 0; absorb rounding only.
    if (f < 0.0 && f > -1e-12) f = 0.0;
    return f;
}

FenchelState make_fenchel_state(const PenaltyKernel& kernel, std::vector<double> p,
                                std::vector<double> y) {
    FenchelState st;
    st.value = fenchel_coupling(kernel, p, y);
    st.benchmark = std::move(p);
    st.scores = std::move(y);
    return st;
}

ConjugateHessianDiag conjugate_hessian_diag(const PenaltyKernel& kernel,
                                            const std::vector<double>& y) {
    const std::vector<double> x = choice_map(kernel, y);
    ConjugateHessianDiag out;
    out.diag.assign(x.size(), 0.0);
    int support = 0;
    double weight_sum = 0.0;  // sum of 1/theta''
    for (double v : x)
        if (v > 0.0) {
            ++support;
            weight_sum += 1.0 / kernel.theta_d2(v);
        }
    if (support <= 1) {
        out.degenerate = true;
        return out;
    }
    const double aggregate = 1.0 / weight_sum;  // T''
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0) continue;
        const double w = 1.0 / kernel.theta_d2(x[i]);
        out.diag[i] = w * (1.0 - aggregate * w);
    }
    return out;
}

namespace {

std::map<std::string, PenaltyKernel>& kernel_registry() {
    static std::map<std::string, PenaltyKernel> reg = {
        {"entropy", PenaltyKernel::entropy()},
        {"quadratic", PenaltyKernel::quadratic()},
    };
    return reg;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

PenaltyKernel kernel_by_name(const std::string& name) {
    std::lock_guard lock(registry_mutex());
    auto& reg = kernel_registry();
    const auto it = reg.find(name);
    if (it == reg.end()) throw ConfigError("unknown kernel '" + name + "'");
    return it->second;
}

void register_kernel(const PenaltyKernel& kernel) {
    std::lock_guard lock(registry_mutex());
    kernel_registry().insert_or_assign(kernel.name(), kernel);
}

std::vector<std::string> registered_kernel_names() {
    std::lock_guard lock(registry_mutex());
    std::vector<std::string> names;
    for (const auto& [name, k] : kernel_registry()) names.push_back(name);
    return names;
}

}  // namespace srl
