#pragma once

// Decomposition of the effective Hamiltonian into Stokes-monomial x
// pseudo-spin components: closed-form coefficient spectra, numeric
// extraction by sampled fields and least squares, and zero crossings.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlqi/atomic_model.hpp"
#include "nlqi/errors.hpp"
#include "nlqi/klein.hpp"
#include "nlqi/numeric.hpp"
#include "nlqi/spin_stokes.hpp"

namespace nlqi {

// ---------------------------------------------------------------------------
// Closed-form spectra. Natural units: coefficients in MHz per MHz^2 (alpha)
// and MHz per MHz^4 (beta) of Stokes monomial content.

namespace closed_form {

inline double alpha1_numerator(const DetuningSet& d) {
    const double d0 = d.delta_Fprime[0], d1 = d.delta_Fprime[1], d2 = d.delta_Fprime[2];
    return 5 * d0 * d1 - 5 * d0 * d2 - 4 * d1 * d2;
}

inline double alpha2_numerator(const DetuningSet& d) {
    const double d0 = d.delta_Fprime[0], d1 = d.delta_Fprime[1], d2 = d.delta_Fprime[2];
    return d0 * d1 - 5 * d0 * d2 + 4 * d1 * d2;
}

inline double beta0J_numerator(const DetuningSet& d) {
    const double d0 = d.delta_Fprime[0], d1 = d.delta_Fprime[1], d2 = d.delta_Fprime[2];
    const double D = d.Delta;
    const double d03 = d0 * d0 * d0, d13 = d1 * d1 * d1, d23 = d2 * d2 * d2;
    return 12 * d03 * d1 * d1 * d2 * d2 - 4 * d03 * d1 * d23 + 12 * d03 * d13 * D -
           10 * d03 * d1 * d1 * d2 * D - 12 * d0 * d0 * d13 * d2 * D -
           10 * d03 * d1 * d2 * d2 * D - 12 * d0 * d13 * d2 * d2 * D +
           20 * d0 * d0 * d1 * d23 * D + 20 * d0 * d1 * d1 * d23 * D;
}

inline double beta0N_numerator(const DetuningSet& d) {
    const double d0 = d.delta_Fprime[0], d1 = d.delta_Fprime[1], d2 = d.delta_Fprime[2];
    const double d03 = d0 * d0 * d0, d13 = d1 * d1 * d1, d23 = d2 * d2 * d2;
    return -12 * d03 * d13 * d2 - 24 * d03 * d1 * d1 * d2 * d2 + 4 * d03 * d1 * d23;
}

inline double beta1_numerator(const DetuningSet& d) {
    const double d0 = d.delta_Fprime[0], d1 = d.delta_Fprime[1], d2 = d.delta_Fprime[2];
    const double D = d.Delta;
    const double d03 = d0 * d0 * d0, d13 = d1 * d1 * d1, d23 = d2 * d2 * d2;
    return -9 * d03 * d13 * d2 + 6 * d03 * d1 * d1 * d2 * d2 + 3 * d03 * d1 * d23 +
           35 * d03 * d13 * D - 5 * d03 * d1 * d1 * d2 * D - 4 * d0 * d0 * d13 * d2 * D -
           5 * d03 * d1 * d2 * d2 * D - 4 * d0 * d13 * d2 * d2 * D - 25 * d03 * d23 * D -
           20 * d0 * d0 * d1 * d23 * D - 20 * d0 * d1 * d1 * d23 * D - 16 * d13 * d23 * D;
}

inline double beta2_numerator(const DetuningSet& d) {
    const double d0 = d.delta_Fprime[0], d1 = d.delta_Fprime[1], d2 = d.delta_Fprime[2];
    const double D = d.Delta;
    const double d03 = d0 * d0 * d0, d13 = d1 * d1 * d1, d23 = d2 * d2 * d2;
    return 3 * d03 * d13 * d2 - 6 * d03 * d1 * d1 * d2 * d2 + 3 * d03 * d1 * d23 +
           7 * d03 * d13 * D - 15 * d03 * d1 * d1 * d2 * D + 16 * d0 * d0 * d13 * d2 * D -
           15 * d03 * d1 * d2 * d2 * D + 16 * d0 * d13 * d2 * d2 * D - 25 * d03 * d23 * D +
           16 * d13 * d23 * D;
}

inline void require_alpha_pole_free(const DetuningSet& d) {
    const LevelStructure levels;
    for (int f = 0; f <= 2; ++f)
        if (std::abs(d.delta_Fprime[static_cast<size_t>(f)]) < kPoleTolMHz)
            throw PoleError("F'=" + std::to_string(f),
                            d.delta_Fprime[static_cast<size_t>(f)]);
    (void)levels;
}

inline void require_beta_pole_free(const DetuningSet& d) {
    require_alpha_pole_free(d);
    if (std::abs(d.Delta) < kPoleTolMHz) throw PoleError("F=2", d.Delta);
}

inline double prefactor_B(const DetuningSet& d) {
    return -1.0 / (48.0 * d.delta_Fprime[0] * d.delta_Fprime[1] * d.delta_Fprime[2]);
}

inline double prefactor_C(const DetuningSet& d) {
    const double d0 = d.delta_Fprime[0], d1 = d.delta_Fprime[1], d2 = d.delta_Fprime[2];
    return 1.0 / (1152.0 * d0 * d0 * d0 * d1 * d1 * d1 * d2 * d2 * d2 * d.Delta);
}

}  // namespace closed_form

struct AlphaPair {
    double alpha1 = 0, alpha2 = 0;
};

struct BetaQuad {
    double beta0_J = 0, beta0_N = 0, beta1 = 0, beta2 = 0;
};

inline AlphaPair closed_form_alpha(const DetuningSet& d) {
    closed_form::require_alpha_pole_free(d);
    const double B = closed_form::prefactor_B(d);
    return {B * closed_form::alpha1_numerator(d), B * closed_form::alpha2_numerator(d)};
}

inline BetaQuad closed_form_beta(const DetuningSet& d) {
    closed_form::require_beta_pole_free(d);
    const double C = closed_form::prefactor_C(d);
    return {C * closed_form::beta0J_numerator(d), C * closed_form::beta0N_numerator(d),
            C * closed_form::beta1_numerator(d), C * closed_form::beta2_numerator(d)};
}

// ---------------------------------------------------------------------------
// Numeric extraction

struct AlphaCoefficients {
    double alpha1 = 0, alpha2 = 0;
    double alpha0_J = 0, alpha0_N = 0;  // scalar light-shift terms (S0 x j0 / identity)
    double fit_residual = 0;
};

struct BetaCoefficients {
    double beta0_J = 0, beta0_N = 0, beta1 = 0, beta2 = 0;
    double s02_J = 0, s02_N = 0;  // photon-only S0^2 remainders
    double fit_residual = 0;
};

struct TensorCoefficients {
    double delta = 0;  // laser detuning the set was evaluated at
    std::optional<AlphaCoefficients> alpha;
    std::optional<BetaCoefficients> beta;
};

inline constexpr double kDecompositionResidualTol = 1e-10;
inline constexpr double kDesignConditionMax = 1e8;

namespace detail {

// Polarization-diverse sample fields; magnitudes near one keep the design
// matrix well scaled at any detuning.
inline std::vector<FieldConfig> sample_fields(double jitter) {
    // clang-format off
    const double mag[][2] = {{1, 0},   {0, 1},    {0.7, 0.7}, {1, 0.7},  {0.8, 0.3},
                             {1.1, 0.45}, {0.5, 0.5}, {1.3, 0.2}, {0.9, 0.9}, {1.2, 0.1},
                             {0.3, 1.0}, {0.7, 0.55}, {1.0, 0.25}, {0.6, 1.1}};
    const double ph[] = {0, 0, 0, 1.57, 0.4, -1.1, 2.2, 0.9, -0.3, 0, 1.7, 2.8, -2.0, 0.6};
    // clang-format on
    std::vector<FieldConfig> out;
    for (int i = 0; i < 14; ++i) {
        const double scale = 1.0 + jitter * (0.13 * i - 0.5);
        out.push_back({std::complex<double>(mag[i][0] * scale, 0.0),
                       std::polar(mag[i][1] * scale, ph[i] + 0.7 * jitter)});
    }
    return out;
}

// Degree-1 and the independent degree-2 Stokes monomials. The degree-2 set
// omits sx^2 and sy^2: on pure fields sx^2+sy^2+sz^2 = s0^2, so keeping them
// would make the design matrix rank deficient.
inline std::vector<double> stokes_monomials(const StokesVector& s, int order) {
    if (order == 2) return {s.s0, s.sx, s.sy, s.sz};
    return {s.s0 * s.s0, s.s0 * s.sx, s.s0 * s.sy,          s.s0 * s.sz, s.sz * s.sz,
            s.sx * s.sx - s.sy * s.sy, s.sx * s.sy, s.sx * s.sz, s.sy * s.sz};
}

struct FitResult {
    // coefficient[op][monomial], ops ordered {I, j0 - 2/3 I, jz, jx, jy}
    std::vector<Eigen::VectorXd> coeff;
    double residual = 0;
};

inline FitResult fit_monomials(int order, const DetuningSet& detuning, const KleinTable& table) {
    const SpinOperatorBasis basis = SpinOperatorBasis::f1();
    // 3 j0 - 2 I is traceless with integer entries, so the projection basis
    // is trace-orthogonal exactly; the j0/identity payload is unmixed below.
    const Eigen::Matrix3cd j0_traceless = 3.0 * basis.j0 - 2.0 * basis.identity;
    const std::vector<Eigen::Matrix3cd> ops = {basis.identity, j0_traceless, basis.jz,
                                               basis.jx, basis.jy};

    for (int attempt = 0; attempt < 3; ++attempt) {
        const auto fields = sample_fields(0.05 * attempt);
        const int nf = static_cast<int>(fields.size());
        const int nm = order == 2 ? 4 : 9;

        Eigen::MatrixXd design(nf, nm);
        std::vector<Eigen::Matrix3cd> hs;
        std::vector<Eigen::VectorXd> projections(ops.size(), Eigen::VectorXd(nf));
        for (int s = 0; s < nf; ++s) {
            const auto mono =
                stokes_monomials(StokesVector::from_field(fields[static_cast<size_t>(s)]), order);
            for (int k = 0; k < nm; ++k) design(s, k) = mono[static_cast<size_t>(k)];
            const Eigen::Matrix3cd h =
                effective_hamiltonian(order, fields[static_cast<size_t>(s)], detuning, table, true)
                    .matrix.mat;
            hs.push_back(h);
            for (size_t o = 0; o < ops.size(); ++o)
                projections[o](s) =
                    ((ops[o].adjoint() * h).trace() / (ops[o].adjoint() * ops[o]).trace())
                        .real();
        }

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double cond =
            svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
        if (cond > kDesignConditionMax) continue;  // resample with jitter

        FitResult fit;
        for (size_t o = 0; o < ops.size(); ++o) fit.coeff.push_back(svd.solve(projections[o]));

        // Reconstruct each sample and measure the worst relative deviation.
        double scale = 0.0;
        for (const auto& h : hs) scale = std::max(scale, h.cwiseAbs().maxCoeff());
        double worst = 0.0;
        for (int s = 0; s < nf; ++s) {
            Eigen::Matrix3cd model = Eigen::Matrix3cd::Zero();
            for (size_t o = 0; o < ops.size(); ++o)
                for (int k = 0; k < nm; ++k)
                    model += fit.coeff[o](k) * design(s, k) * ops[o];
            worst = std::max(worst,
                             (model - hs[static_cast<size_t>(s)]).cwiseAbs().maxCoeff() / scale);
        }
        fit.residual = worst;
        if (worst > kDecompositionResidualTol)
            throw DecompositionError(
                "operator content outside the Stokes-monomial ansatz; relative residual " +
                std::to_string(worst));
        return fit;
    }
    throw DecompositionError("sample set remained ill-conditioned after resampling");
}

inline double coefficient_scale(const FitResult& fit) {
    double scale = 0.0;
    for (const auto& c : fit.coeff) scale = std::max(scale, c.cwiseAbs().maxCoeff());
    return scale;
}

inline double consistent_pair(double a, double b, double scale, const char* what) {
    if (std::abs(a - b) > 1e-8 * std::max(scale, 1e-300))
        throw DecompositionError(std::string(what) +
                                 ": transverse components disagree; ansatz violated");
    return 0.5 * (a + b);
}

}  // namespace detail

inline AlphaCoefficients extract_alpha(const DetuningSet& detuning,
                                       const KleinTable& table = KleinTable::canonical()) {
    const auto fit = detail::fit_monomials(2, detuning, table);
    // monomial order: {s0, sx, sy, sz}; ops {I, 3j0-2I, jz, jx, jy}
    AlphaCoefficients a;
    a.alpha0_J = 3.0 * fit.coeff[1](0);
    a.alpha0_N = fit.coeff[0](0) - 2.0 * fit.coeff[1](0);
    a.alpha1 = fit.coeff[2](3);
    a.alpha2 = detail::consistent_pair(fit.coeff[3](1), fit.coeff[4](2),
                                       detail::coefficient_scale(fit), "alpha2");
    a.fit_residual = fit.residual;
    return a;
}

inline BetaCoefficients extract_beta(const DetuningSet& detuning,
                                     const KleinTable& table = KleinTable::canonical()) {
    const auto fit = detail::fit_monomials(4, detuning, table);
    // monomials: {s0^2, s0 sx, s0 sy, s0 sz, sz^2, sx^2-sy^2, sx sy, sx sz, sy sz}
    BetaCoefficients b;
    b.beta0_J = 3.0 * fit.coeff[1](4);
    b.beta0_N = fit.coeff[0](4) - 2.0 * fit.coeff[1](4);
    b.beta1 = fit.coeff[2](3);
    b.beta2 = detail::consistent_pair(fit.coeff[3](1), fit.coeff[4](2),
                                      detail::coefficient_scale(fit), "beta2");
    b.s02_J = 3.0 * fit.coeff[1](0);
    b.s02_N = fit.coeff[0](0) - 2.0 * fit.coeff[1](0);
    b.fit_residual = fit.residual;
    return b;
}

inline TensorCoefficients extract_coefficients(int order, const DetuningSet& detuning,
                                               const KleinTable& table = KleinTable::canonical()) {
    TensorCoefficients t;
    t.delta = detuning.delta;
    if (order == 2)
        t.alpha = extract_alpha(detuning, table);
    else if (order == 4)
        t.beta = extract_beta(detuning, table);
    else
        throw DomainError("extraction supports orders 2 and 4");
    return t;
}

// ---------------------------------------------------------------------------
// Spectra over a detuning grid

struct SpectraRow {
    double delta = 0;
    double alpha1 = 0, alpha2 = 0;
    double beta0_J = 0, beta0_N = 0, beta1 = 0, beta2 = 0;
};

struct SpectraTable {
    std::vector<SpectraRow> rows;
    std::vector<double> masked;  // grid points skipped as pole-adjacent
};

// Laser-frame poles in user-detuning coordinates (delta such that some
// delta_F' = 0, F' <= 2; F'=3 does not couple to the F=1 manifold).
inline std::vector<double> coefficient_poles(const AtomicConstants& c) {
    return {0.0, c.excited_offsets_MHz[0], c.excited_offsets_MHz[1]};
}

inline SpectraTable spectra(const AtomicConstants& constants, double min_delta, double max_delta,
                            double step, double pole_guard = kPoleTolMHz) {
    if (!(step > 0.0) || !(min_delta <= max_delta))
        throw DomainError("spectra: need min <= max and step > 0");
    const auto poles = coefficient_poles(constants);
    SpectraTable table;
    const long n = std::lround(std::floor((max_delta - min_delta) / step)) + 1;
    for (long i = 0; i < n; ++i) {
        const double delta = min_delta + static_cast<double>(i) * step;
        bool near_pole = false;
        for (double p : poles) near_pole = near_pole || std::abs(delta - p) < pole_guard;
        if (near_pole) {
            table.masked.push_back(delta);
            continue;
        }
        const DetuningSet d = DetuningSet::from_constants(constants, delta);
        const AlphaPair a = closed_form_alpha(d);
        const BetaQuad b = closed_form_beta(d);
        table.rows.push_back({delta, a.alpha1, a.alpha2, b.beta0_J, b.beta0_N, b.beta1, b.beta2});
    }
    return table;
}

// ---------------------------------------------------------------------------
// Zero crossings

struct RootRecord {
    std::string coefficient;
    double root_MHz = 0;
    double bracket_lo = 0, bracket_hi = 0;
};

inline const std::vector<std::string>& coefficient_names() {
    static const std::vector<std::string> names = {"alpha1", "alpha2", "beta0J",
                                                   "beta0N", "beta1",  "beta2"};
    return names;
}

inline double coefficient_numerator(const AtomicConstants& constants, const std::string& name,
                                    double delta) {
    const DetuningSet d = DetuningSet::from_constants(constants, delta);
    if (name == "alpha1") return closed_form::alpha1_numerator(d);
    if (name == "alpha2") return closed_form::alpha2_numerator(d);
    if (name == "beta0J") return closed_form::beta0J_numerator(d);
    if (name == "beta0N") return closed_form::beta0N_numerator(d);
    if (name == "beta1") return closed_form::beta1_numerator(d);
    if (name == "beta2") return closed_form::beta2_numerator(d);
    throw DomainError("unknown coefficient '" + name + "'");
}

// Sign-change roots of f on [lo, hi], skipping small guards around the listed
// poles; brackets are refined by bisection to xtol.
inline std::vector<double> find_sign_change_roots(const std::function<double(double)>& f,
                                                  double lo, double hi,
                                                  const std::vector<double>& poles, double xtol,
                                                  int grid_points = 2048) {
    std::vector<double> cuts = {lo};
    for (double p : poles)
        if (p > lo && p < hi) cuts.push_back(p);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());

    std::vector<double> roots;
    const double guard = 16.0 * kPoleTolMHz;
    for (size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        double a = cuts[seg] + (seg == 0 ? 0.0 : guard);
        double b = cuts[seg + 1] - (seg + 2 == cuts.size() ? 0.0 : guard);
        if (!(b > a)) continue;
        double prev_x = a, prev_f = f(a);
        for (int i = 1; i <= grid_points; ++i) {
            const double x = a + (b - a) * i / grid_points;
            const double fx = f(x);
            if (prev_f == 0.0) {
                roots.push_back(prev_x);
            } else if (fx != 0.0 && (prev_f < 0) != (fx < 0)) {
                roots.push_back(bisect_root(f, prev_x, x, xtol));
            }
            prev_x = x;
            prev_f = fx;
        }
        if (prev_f == 0.0) roots.push_back(prev_x);
    }
    return roots;
}

// Roots of the polynomial numerator of a named coefficient; these are the
// spectrum's true zero crossings (the divergent prefactor carries no roots).
inline std::vector<RootRecord> find_roots(const AtomicConstants& constants,
                                          const std::string& coefficient, double lo, double hi,
                                          double xtol = 1e-6) {
    if (!(lo < hi)) throw DomainError("roots: need lo < hi");
    if (std::find(coefficient_names().begin(), coefficient_names().end(), coefficient) ==
        coefficient_names().end())
        throw DomainError("unknown coefficient '" + coefficient + "'");

    const auto f = [&](double delta) {
        return coefficient_numerator(constants, coefficient, delta);
    };
    const auto roots = find_sign_change_roots(f, lo, hi, coefficient_poles(constants), xtol);

    std::vector<RootRecord> records;
    for (double r : roots)
        records.push_back({coefficient, r, r - xtol, r + xtol});
    return records;
}

}  // namespace nlqi
