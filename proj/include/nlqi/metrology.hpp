#pragma once

// Estimation of the collective spin J_Z from polarization rotation: the
// linear+nonlinear input-output map, analytic sensitivity, shot-noise
// Monte Carlo, and scaling-law fits.
//
// Quantum model behind these formulas: H = gamma (alpha1 + beta1 gamma S0)
// S_Z J_Z acting on the photonic Stokes operators, with coherent-state input
// noise var(S_Y) = S0/2. Photon-number units: S0 = N_L / 2.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "nlqi/errors.hpp"
#include "nlqi/numeric.hpp"
#include "nlqi/rng.hpp"

namespace nlqi {

// ---------------------------------------------------------------------------
// Beam bookkeeping (the one place SI units enter)

inline constexpr double kHbarJs = 1.054571817e-34;
inline constexpr double kImpedanceFreeSpaceOhm = 376.730313668;

struct BeamParameters {
    double omega_rad_s = 0;       // optical angular frequency
    double pulse_duration_s = 0;  // T
    double beam_area_m2 = 0;      // A
    double impedance_ohm = kImpedanceFreeSpaceOhm;

    void validate() const {
        if (!(omega_rad_s > 0) || !(pulse_duration_s > 0) || !(beam_area_m2 > 0) ||
            !(impedance_ohm > 0))
            throw DomainError("beam parameters must all be positive");
    }

    // Single-photon intensity in field-squared units, V^2/m^2 per photon.
    double gamma_si() const {
        validate();
        return kHbarJs * omega_rad_s * impedance_ohm / (2.0 * pulse_duration_s * beam_area_m2);
    }

    // Same quantity in the library's natural units (MHz^2 of Rabi-scaled
    // field squared per photon), given the reduced dipole element.
    double gamma_natural(double dipole_Cm) const {
        const double rabi_per_field = dipole_Cm / kHbarJs;  // (rad/s) per (V/m)
        return rabi_per_field * rabi_per_field * gamma_si() * 1e-12;
    }
};

// ---------------------------------------------------------------------------
// Scenario

// Which form of the shot-noise sensitivity denominator to use. Rederived
// is the variance-budget result; PaperHalf halves the nonlinear term and is
// kept for comparison plots.
enum class SensitivityConvention { Rederived, PaperHalf };

struct MetrologyScenario {
    double alpha1 = 0;  // linear Faraday coupling, MHz per MHz^2
    double beta1 = 0;   // intensity-dependent coupling, MHz per MHz^4
    double tau_us = 0;  // interaction time
    double gamma = 0;   // single-photon intensity, MHz^2 per photon
    double s0_hat = 0;  // photon-number Stokes magnitude, N_L / 2
    double jz_true = 0;
    SensitivityConvention convention = SensitivityConvention::Rederived;

    void validate() const {
        if (!(tau_us > 0) || !(gamma > 0) || !(s0_hat > 0))
            throw DomainError("scenario needs positive tau, gamma, and S0");
    }

    // d<S_Y^out>/dJ_Z for an input polarized along +X.
    double signal_slope() const {
        return tau_us * gamma * (alpha1 + beta1 * gamma * s0_hat) * s0_hat;
    }

    double rotation_angle(double jz) const {
        return tau_us * gamma * (alpha1 + beta1 * gamma * s0_hat) * jz;
    }
};

// ---------------------------------------------------------------------------
// Input-output map

struct FaradayOutput {
    double phi = 0;          // rotation angle
    double sy_out_mean = 0;  // <S_Y^out> = phi * S0
    bool small_rotation_warning = false;  // phi beyond the linearized regime
};

// The dropped S_Z^in J_X^in terms are negligible for an X-polarized coherent
// input; the exact two-mode evolution in the test suite bounds that error.
inline FaradayOutput faraday_output(const MetrologyScenario& sc) {
    sc.validate();
    FaradayOutput out;
    out.phi = sc.rotation_angle(sc.jz_true);
    out.sy_out_mean = out.phi * sc.s0_hat;
    out.small_rotation_warning = std::abs(out.phi) > 0.1;
    return out;
}

// ---------------------------------------------------------------------------
// Sensitivity

// J_Z at which the signal-to-noise ratio reaches one:
//   deltaJ = 1 / (sqrt(2) tau gamma |alpha1 sqrt(S0) + beta1 gamma S0^(3/2)|).
inline double sensitivity(const MetrologyScenario& sc) {
    sc.validate();
    if (sc.alpha1 == 0.0 && sc.beta1 == 0.0)
        throw DomainError("both couplings vanish; sensitivity is unbounded");
    const double nonlinear_factor =
        sc.convention == SensitivityConvention::PaperHalf ? 0.5 : 1.0;
    const double denom = std::sqrt(2.0) * sc.tau_us * sc.gamma *
                         std::abs(sc.alpha1 * std::sqrt(sc.s0_hat) +
                                  nonlinear_factor * sc.beta1 * sc.gamma *
                                      std::pow(sc.s0_hat, 1.5));
    if (denom == 0.0) return std::numeric_limits<double>::infinity();  // cancellation point
    return 1.0 / denom;
}

// ---------------------------------------------------------------------------
// Linear / nonlinear crossover

struct CrossoverResult {
    double s0_star = 0;  // intensity where the two denominator terms tie
    std::optional<double> cancellation_s0;  // exact cancellation (opposite signs)
};

inline CrossoverResult crossover(double alpha1, double beta1, double gamma) {
    if (!(gamma > 0)) throw DomainError("gamma must be positive");
    if (alpha1 == 0.0 || beta1 == 0.0)
        throw DomainError("crossover needs both couplings nonzero");
    CrossoverResult r;
    r.s0_star = std::abs(alpha1 / (beta1 * gamma));
    if ((alpha1 > 0) != (beta1 > 0)) r.cancellation_s0 = -alpha1 / (beta1 * gamma);
    return r;
}

// ---------------------------------------------------------------------------
// Scaling fits

// Fitted log-log slope of a sensitivity curve (N_L, deltaJ). When a finite
// crossover is supplied, every point must sit at least a decade away from it
// on a single side.
inline double scaling_exponent(const std::vector<std::pair<double, double>>& curve,
                               std::optional<double> crossover_nl = std::nullopt) {
    if (curve.size() < 10) throw DomainError("scaling fit needs at least 10 points");
    double lo = curve.front().first, hi = curve.front().first;
    for (const auto& [nl, dj] : curve) {
        if (!(nl > 0) || !(dj > 0)) throw DomainError("scaling fit needs positive data");
        lo = std::min(lo, nl);
        hi = std::max(hi, nl);
    }
    if (hi / lo < 100.0) throw DomainError("scaling fit needs at least two decades of N_L");
    if (crossover_nl && *crossover_nl > 0 && std::isfinite(*crossover_nl)) {
        const bool all_above = lo >= 10.0 * *crossover_nl;
        const bool all_below = hi <= 0.1 * *crossover_nl;
        if (!all_above && !all_below)
            throw DomainError("N_L range straddles the crossover; fit would mix regimes");
    }
    return fit_loglog_slope(curve);
}

// ---------------------------------------------------------------------------
// Monte Carlo estimator

struct MonteCarloResult {
    double mean = 0;             // estimator mean
    double stddev = 0;           // estimator sample standard deviation
    double stderr_mean = 0;      // standard error of the mean
    double stderr_stddev = 0;    // standard error of the standard deviation
    double analytic_delta = 0;   // sensitivity() for the same scenario
    int trials = 0;
    std::uint64_t seed = 0;
};

// Draw S_Y^in from the coherent-state noise, push it through the input-output
// map at the true J_Z, invert the known slope. Deterministic per (seed, i).
inline MonteCarloResult monte_carlo_estimate(const MetrologyScenario& sc, int trials,
                                             std::uint64_t seed) {
    sc.validate();
    if (trials < 100) throw DomainError("monte carlo needs at least 100 trials");
    const double slope = sc.signal_slope();
    if (slope == 0.0)
        throw DomainError("zero signal slope; J_Z cannot be estimated at this intensity");

    const double noise_sd = std::sqrt(sc.s0_hat / 2.0);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < trials; ++i) {
        const double sy_in = noise_sd * stream_gaussian(seed, static_cast<std::uint64_t>(i));
        const double sy_out = sy_in + slope * sc.jz_true;
        const double estimate = sy_out / slope;
        sum += estimate;
        sumsq += estimate * estimate;
    }
    MonteCarloResult r;
    r.trials = trials;
    r.seed = seed;
    r.mean = sum / trials;
    const double var = (sumsq - sum * sum / trials) / (trials - 1);
    r.stddev = std::sqrt(std::max(0.0, var));
    r.stderr_mean = r.stddev / std::sqrt(static_cast<double>(trials));
    r.stderr_stddev = r.stddev / std::sqrt(2.0 * (trials - 1));
    r.analytic_delta = sensitivity(sc);
    return r;
}

// ---------------------------------------------------------------------------
// Sensitivity curves (CSV payload for the CLI)

struct SensitivityCurveRow {
    double n_l = 0;
    double delta_jz_analytic = 0;
    double delta_jz_montecarlo = 0;
    double mc_stderr = 0;
};

inline std::vector<SensitivityCurveRow> sensitivity_curve(MetrologyScenario sc,
                                                          const std::vector<double>& s0_values,
                                                          int trials, std::uint64_t seed) {
    std::vector<SensitivityCurveRow> rows;
    for (size_t i = 0; i < s0_values.size(); ++i) {
        sc.s0_hat = s0_values[i];
        SensitivityCurveRow row;
        row.n_l = 2.0 * sc.s0_hat;
        row.delta_jz_analytic = sensitivity(sc);
        const MonteCarloResult mc = monte_carlo_estimate(sc, trials, stream_u64(seed, i));
        row.delta_jz_montecarlo = mc.stddev;
        row.mc_stderr = mc.stderr_stddev;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace nlqi
