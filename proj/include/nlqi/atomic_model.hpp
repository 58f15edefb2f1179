#pragma once

// 24-level model of the Rb-87 D2 transition: basis layout, rotating-frame
// energies, and the sigma+/- dipole coupling block built from angular-momentum
// algebra.
//
// Unit conventions used throughout the library: hbar = 1, all energies and
// detunings in MHz, field amplitudes pre-scaled by the reduced dipole element
// (g = D * E / hbar, in MHz) so operator matrices are directly in MHz.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlqi/errors.hpp"
#include "nlqi/wigner.hpp"

namespace nlqi {

// Detunings closer to a level than this are treated as on-resonance.
inline constexpr double kPoleTolMHz = 1e-6;

// ---------------------------------------------------------------------------
// Atomic constants (external spectroscopic data, configurable)

struct AtomicConstants {
    double dipole_Cm = 0.0;              // reduced dipole element <J||er||J'>
    double ground_splitting_MHz = 0.0;   // F=1 .. F=2 hyperfine interval
    std::array<double, 3> excited_offsets_MHz{};  // F'=1,2,3 above F'=0

    void validate() const {
        if (!(dipole_Cm > 0.0)) throw ConfigError("dipole_Cm must be positive");
        if (!(ground_splitting_MHz > 0.0))
            throw ConfigError("ground_splitting_MHz must be positive");
        double prev = 0.0;
        for (double off : excited_offsets_MHz) {
            if (!(off > prev))
                throw ConfigError("excited_offsets_MHz must be positive and strictly increasing");
            prev = off;
        }
    }

    // Published Rb-87 D2 values (Steck, "Rubidium 87 D line data").
    static AtomicConstants rb87_d2() {
        AtomicConstants c;
        c.dipole_Cm = 3.584e-29;
        c.ground_splitting_MHz = 6834.682610904290;
        c.excited_offsets_MHz = {72.2180, 229.1650, 495.8150};
        return c;
    }

    // Strict parse: exactly the three known keys, nothing else.
    static AtomicConstants from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw ConfigError("constants file: expected a JSON object");
        for (const auto& [key, value] : j.items()) {
            (void)value;
            if (key != "dipole_Cm" && key != "ground_splitting_MHz" &&
                key != "excited_offsets_MHz")
                throw ConfigError("constants file: unknown key '" + key + "'");
        }
        AtomicConstants c;
        try {
            c.dipole_Cm = j.at("dipole_Cm").get<double>();
            c.ground_splitting_MHz = j.at("ground_splitting_MHz").get<double>();
            const auto& offs = j.at("excited_offsets_MHz");
            if (!offs.is_array() || offs.size() != 3)
                throw ConfigError("constants file: excited_offsets_MHz must be an array of 3");
            for (int i = 0; i < 3; ++i) c.excited_offsets_MHz[i] = offs[i].get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("constants file: ") + e.what());
        }
        c.validate();
        return c;
    }

    static AtomicConstants from_json_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open constants file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("constants file: ") + e.what());
        }
        return from_json(j);
    }
};

// ---------------------------------------------------------------------------
// Basis layout: 8 ground states then 16 excited states

enum class Manifold { Ground, Excited };

struct BasisState {
    Manifold manifold;
    int F;   // F for ground, F' for excited
    int mF;
};

class LevelStructure {
public:
    static constexpr int kGroundDim = 8;
    static constexpr int kExcitedDim = 16;
    static constexpr int kDim = 24;
    static constexpr int kManifoldDim = 3;  // F=1 ground states, indices 0..2

    LevelStructure() {
        for (int m = -1; m <= 1; ++m) states_.push_back({Manifold::Ground, 1, m});
        for (int m = -2; m <= 2; ++m) states_.push_back({Manifold::Ground, 2, m});
        for (int f = 0; f <= 3; ++f)
            for (int m = -f; m <= f; ++m) states_.push_back({Manifold::Excited, f, m});
    }

    const std::vector<BasisState>& states() const { return states_; }
    const BasisState& state(int i) const { return states_.at(static_cast<size_t>(i)); }

    int index_of(Manifold manifold, int F, int mF) const {
        for (int i = 0; i < kDim; ++i) {
            const BasisState& s = states_[static_cast<size_t>(i)];
            if (s.manifold == manifold && s.F == F && s.mF == mF) return i;
        }
        throw DomainError("no such basis state");
    }

    static std::string state_name(const BasisState& s) {
        const char* f = s.manifold == Manifold::Ground ? "F=" : "F'=";
        return std::string(f) + std::to_string(s.F) + ",m=" + std::to_string(s.mF);
    }

private:
    std::vector<BasisState> states_;
};

// ---------------------------------------------------------------------------
// Rotating-frame detunings

struct DetuningSet {
    double delta = 0.0;                      // laser detuning from F=1 -> F'=0
    std::array<double, 4> delta_Fprime{};    // level energies in the laser frame
    double Delta = 0.0;                      // ground hyperfine splitting

    // delta_F' = omega_F' - omega with omega = omega_F'=0 + delta.
    static DetuningSet from_constants(const AtomicConstants& c, double delta) {
        c.validate();
        DetuningSet d;
        d.delta = delta;
        d.delta_Fprime[0] = -delta;
        for (int f = 1; f <= 3; ++f)
            d.delta_Fprime[f] = c.excited_offsets_MHz[static_cast<size_t>(f - 1)] - delta;
        d.Delta = c.ground_splitting_MHz;
        return d;
    }

    // Direct construction for analysis (e.g. the equal-detuning limit).
    static DetuningSet from_values(const std::array<double, 4>& delta_Fprime, double Delta) {
        DetuningSet d;
        d.delta_Fprime = delta_Fprime;
        d.Delta = Delta;
        d.delta = -delta_Fprime[0];
        return d;
    }

    double level_energy(const BasisState& s) const {
        if (s.manifold == Manifold::Ground) return s.F == 1 ? 0.0 : Delta;
        return delta_Fprime[static_cast<size_t>(s.F)];
    }

    bool pole_free() const {
        for (double d : delta_Fprime)
            if (std::abs(d) < kPoleTolMHz) return false;
        return std::abs(Delta) >= kPoleTolMHz;
    }
};

// ---------------------------------------------------------------------------
// Field and operator containers

struct FieldConfig {
    std::complex<double> g_plus{0.0, 0.0};   // sigma+ amplitude, MHz
    std::complex<double> g_minus{0.0, 0.0};  // sigma- amplitude, MHz
};

struct OperatorMatrix {
    enum class Basis { Ground3, Full24 };

    Eigen::MatrixXcd mat;
    Basis basis = Basis::Full24;

    int dim() const { return static_cast<int>(mat.rows()); }

    double hermiticity_defect() const {
        const double scale = mat.cwiseAbs().maxCoeff();
        if (scale == 0.0) return 0.0;
        return (mat - mat.adjoint()).cwiseAbs().maxCoeff() / scale;
    }
};

struct LevelModel {
    LevelStructure levels;
    DetuningSet detuning;
    OperatorMatrix h0;
    bool manifold_degenerate_with_complement = false;  // some |delta_F'| or Delta ~ 0
};

inline LevelModel build_level_structure(const AtomicConstants& constants, double delta) {
    LevelModel model;
    model.detuning = DetuningSet::from_constants(constants, delta);
    model.h0.basis = OperatorMatrix::Basis::Full24;
    model.h0.mat = Eigen::MatrixXcd::Zero(LevelStructure::kDim, LevelStructure::kDim);
    for (int i = 0; i < LevelStructure::kDim; ++i)
        model.h0.mat(i, i) = model.detuning.level_energy(model.levels.state(i));
    model.manifold_degenerate_with_complement = !model.detuning.pole_free();
    return model;
}

inline OperatorMatrix build_h0(const LevelStructure& levels, const DetuningSet& detuning) {
    OperatorMatrix h0;
    h0.basis = OperatorMatrix::Basis::Full24;
    h0.mat = Eigen::MatrixXcd::Zero(LevelStructure::kDim, LevelStructure::kDim);
    for (int i = 0; i < LevelStructure::kDim; ++i)
        h0.mat(i, i) = detuning.level_energy(levels.state(i));
    return h0;
}

// ---------------------------------------------------------------------------
// Dipole coupling

// Dimensionless factor such that the full matrix element is
// factor * D_JJ' * E_q, for the sigma_q component of a z-propagating beam.
// The electronic reduced element enters as <J'||er||J> = sqrt(2) <J||er||J'>
// for J=1/2 -> J'=3/2.
inline double dipole_element(const BasisState& ground, const BasisState& excited, int q) {
    if (q == 0)
        throw DomainError("pi polarization (q=0) is excluded for a z-propagating beam");
    if (q != 1 && q != -1) throw DomainError("q must be +1 or -1");
    if (ground.manifold != Manifold::Ground || excited.manifold != Manifold::Excited)
        throw DomainError("dipole_element expects (ground, excited) states");
    if (excited.mF - ground.mF != q) return 0.0;

    const double F = ground.F;
    const double Fp = excited.F;
    const double m = ground.mF;
    const double mp = excited.mF;
    const double J = 0.5, Jp = 1.5, I = 1.5;

    const double three_j = wigner3j(Fp, 1.0, F, -mp, q, m);
    const double six_j = wigner6j(Jp, Fp, I, F, J, 1.0);
    const double reduced = std::sqrt((2.0 * Fp + 1.0) * (2.0 * F + 1.0)) * six_j *
                           std::sqrt((2.0 * Jp + 1.0) / (2.0 * J + 1.0));

    double phase = 1.0;
    if ((static_cast<int>(std::lround(Fp - mp)) % 2 + 2) % 2 == 1) phase = -phase;
    if (ground.F % 2 == 1) phase = -phase;
    return phase * three_j * reduced;
}

// Full 24x24 perturbation: Hermitian, block-off-diagonal between ground and
// excited manifolds. Entries in MHz given Rabi-scaled field amplitudes.
inline OperatorMatrix build_perturbation(const LevelStructure& levels, const FieldConfig& field,
                                         const DetuningSet& detuning,
                                         bool allow_strong_field = false,
                                         double ceiling_divisor = 10.0) {
    if (!std::isfinite(field.g_plus.real()) || !std::isfinite(field.g_plus.imag()) ||
        !std::isfinite(field.g_minus.real()) || !std::isfinite(field.g_minus.imag()))
        throw DomainError("field amplitudes must be finite");

    if (!allow_strong_field) {
        double min_det = std::abs(detuning.delta_Fprime[0]);
        for (double d : detuning.delta_Fprime) min_det = std::min(min_det, std::abs(d));
        const double ceiling = min_det / ceiling_divisor;
        const double gmax = std::max(std::abs(field.g_plus), std::abs(field.g_minus));
        if (gmax >= ceiling)
            throw FieldCeilingError("field amplitude " + std::to_string(gmax) +
                                    " MHz exceeds the perturbative ceiling " +
                                    std::to_string(ceiling) + " MHz");
    }

    OperatorMatrix v;
    v.basis = OperatorMatrix::Basis::Full24;
    v.mat = Eigen::MatrixXcd::Zero(LevelStructure::kDim, LevelStructure::kDim);
    for (int e = LevelStructure::kGroundDim; e < LevelStructure::kDim; ++e) {
        for (int g = 0; g < LevelStructure::kGroundDim; ++g) {
            const BasisState& es = levels.state(e);
            const BasisState& gs = levels.state(g);
            const int q = es.mF - gs.mF;
            if (q != 1 && q != -1) continue;
            const double factor = dipole_element(gs, es, q);
            if (factor == 0.0) continue;
            const std::complex<double> amp = (q == 1) ? field.g_plus : field.g_minus;
            v.mat(e, g) = factor * amp;
            v.mat(g, e) = std::conj(factor * amp);
        }
    }
    return v;
}

}  // namespace nlqi
