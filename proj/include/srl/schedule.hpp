#pragma once

#include <cmath>
#include <string>

#include "srl/errors.hpp"

namespace srl {

// Learning parameter eta(t): either constant eta0 or the power form
// eta0 * (t + t0)^(-gamma). The power exponent is restricted to [0, 1) so
// that t * eta(t) -> infinity, which the learning guarantees require; the
// t0 > 0 offset keeps eta finite at t = 0.
class LearningSchedule {
public:
    enum class Form { Constant, Power };

    static LearningSchedule constant(double eta0) {
        return LearningSchedule(Form::Constant, eta0, 0.0, 1.0);
    }
    static LearningSchedule power(double eta0, double gamma, double t0 = 1.0) {
        return LearningSchedule(Form::Power, eta0, gamma, t0);
    }

    Form form() const { return form_; }
    double eta0() const { return eta0_; }
    double gamma() const { return gamma_; }
    double t0() const { return t0_; }
    bool vanishing() const { return form_ == Form::Power && gamma_ > 0.0; }

    double eta(double t) const {
        if (form_ == Form::Constant) return eta0_;
        return eta0_ * std::pow(t + t0_, -gamma_);
    }

    double eta_dot(double t) const {
        if (form_ == Form::Constant) return 0.0;
        return -gamma_ * eta0_ * std::pow(t + t0_, -gamma_ - 1.0);
    }

    // Closed-form integral of eta over [0, t].
    double eta_integral(double t) const {
        if (form_ == Form::Constant || gamma_ == 0.0) return eta0_ * t;
        const double e = 1.0 - gamma_;
        return eta0_ * (std::pow(t + t0_, e) - std::pow(t0_, e)) / e;
    }

    std::string describe() const {
        if (form_ == Form::Constant) return "constant eta0=" + std::to_string(eta0_);
        return "power eta0=" + std::to_string(eta0_) + " gamma=" + std::to_string(gamma_) +
               " t0=" + std::to_string(t0_);
    }

private:
    LearningSchedule(Form form, double eta0, double gamma, double t0)
        : form_(form), eta0_(eta0), gamma_(gamma), t0_(t0) {
        if (eta0 <= 0.0) throw ConfigError("learning schedule needs eta0 > 0");
        if (form == Form::Power) {
            if (gamma < 0.0 || gamma >= 1.0)
                throw ConfigError(
                    "learning schedule exponent gamma must lie in [0, 1): "
                    "t * eta(t) must diverge, and gamma = 1 gives t * t^-1 -> 1");
            if (t0 <= 0.0) throw ConfigError("learning schedule needs t0 > 0");
        }
    }

    Form form_;
    double eta0_, gamma_, t0_;
};

}  // namespace srl
