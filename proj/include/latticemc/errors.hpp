#pragma once

#include <stdexcept>
#include <string>

namespace latticemc {

enum class Errc {
    // configuration / usage
    red_detuning_required,
    invalid_angle,
    negative_rate,
    negative_probe_ratio,
    unknown_key,
    type_mismatch,
    missing_required,
    insufficient_data,
    probe_off,
    empty_records,
    io_error,
    // numerical failures
    degenerate_dynamics,
    numerical_blowup,
    ensemble_unhealthy,
    fit_diverged,
    // result guards
    diffusive_regime_not_reached,
    zero_reference,
    no_interior_maximum,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, std::string message) : std::runtime_error(std::move(message)), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

/// Process exit status for an error class: 2 config, 3 numerical, 4 result guard.
inline int exit_code_for(Errc c) {
    switch (c) {
        case Errc::degenerate_dynamics:
        case Errc::numerical_blowup:
        case Errc::ensemble_unhealthy:
        case Errc::fit_diverged:
            return 3;
        case Errc::diffusive_regime_not_reached:
        case Errc::zero_reference:
        case Errc::no_interior_maximum:
            return 4;
        default:
            return 2;
    }
}

}  // namespace latticemc
