#pragma once

// Exact polarization dynamics in the fixed photon-number sector: a two-mode
// state resolved over the S_Z eigenbasis, diagonal one-axis-twisting
// evolution, Stokes moments, squeezing, and the quantum Fisher information
// for the S_Z^2 generator.

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "nlqi/errors.hpp"

namespace nlqi {

inline constexpr int kTwistingPhotonCap = 2000;

// Amplitudes c_k over |n_+ = k, n_- = N-k>, k = 0..N; S_Z eigenvalue k - N/2.
struct TwoModeState {
    int n_photons = 0;
    Eigen::VectorXcd amp;

    double norm() const { return amp.norm(); }
    double sz_eigenvalue(int k) const { return k - 0.5 * n_photons; }

    double sz_moment(int power) const {
        double sum = 0;
        for (int k = 0; k <= n_photons; ++k)
            sum += std::norm(amp(k)) * std::pow(sz_eigenvalue(k), power);
        return sum;
    }

    // Coherent spin state tilted by theta0 from +X toward +Z, theta0 in
    // [0, pi/2]. Amplitudes are binomial; built in log space so large N
    // does not overflow.
    static TwoModeState coherent_tilted(int n_photons, double theta0) {
        if (n_photons < 1) throw DomainError("need at least one photon");
        if (theta0 < 0.0 || theta0 > M_PI_2 + 1e-12)
            throw DomainError("tilt must lie in [0, pi/2]");
        TwoModeState s;
        s.n_photons = n_photons;
        s.amp = Eigen::VectorXcd::Zero(n_photons + 1);

        const double polar = M_PI_2 - theta0;  // polar angle from +Z
        const double c = std::cos(0.5 * polar);
        const double d = std::sin(0.5 * polar);
        if (d == 0.0) {  // fully tilted: stretched state along +Z
            s.amp(n_photons) = 1.0;
            return s;
        }
        const double lc = std::log(c), ld = std::log(d);
        for (int k = 0; k <= n_photons; ++k) {
            const double la = 0.5 * (std::lgamma(n_photons + 1.0) - std::lgamma(k + 1.0) -
                                     std::lgamma(n_photons - k + 1.0)) +
                              k * lc + (n_photons - k) * ld;
            s.amp(k) = std::exp(la);
        }
        s.amp.normalize();  // absorbs far-tail underflow
        return s;
    }

    // exp(-i chi_t S_Z^2): diagonal, exact, norm preserving.
    void apply_twist(double chi_t) {
        for (int k = 0; k <= n_photons; ++k) {
            const double m = sz_eigenvalue(k);
            amp(k) *= std::exp(std::complex<double>(0.0, -chi_t * m * m));
        }
    }
};

// ---------------------------------------------------------------------------
// Stokes moments from ladder-operator sums

struct StokesMoments {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();       // <S_X>, <S_Y>, <S_Z>
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero(); // symmetrized
    double s0 = 0;                                        // N/2, conserved
};

inline StokesMoments stokes_moments(const TwoModeState& st) {
    const int n = st.n_photons;
    auto raise_factor = [n](int k) { return std::sqrt(double(k + 1) * double(n - k)); };

    std::complex<double> p = 0;  // <S+>
    std::complex<double> t = 0;  // <S+^2>
    std::complex<double> w = 0;  // <{S_Z, S+}>/2
    double u_lower = 0;          // <S+ S->
    double u_raise = 0;          // <S- S+>
    for (int k = 0; k <= n; ++k) {
        const double prob = std::norm(st.amp(k));
        u_raise += prob * double(k + 1) * double(n - k);
        u_lower += prob * double(k) * double(n - k + 1);
        if (k + 1 <= n) {
            const std::complex<double> c1 = std::conj(st.amp(k + 1)) * st.amp(k);
            p += c1 * raise_factor(k);
            w += c1 * raise_factor(k) * 0.5 *
                 (st.sz_eigenvalue(k) + st.sz_eigenvalue(k + 1));
        }
        if (k + 2 <= n)
            t += std::conj(st.amp(k + 2)) * st.amp(k) * raise_factor(k) * raise_factor(k + 1);
    }

    StokesMoments m;
    m.s0 = 0.5 * n;
    m.mean << p.real(), p.imag(), st.sz_moment(1);

    const double sxx = (2.0 * t.real() + u_lower + u_raise) / 4.0;
    const double syy = (u_lower + u_raise - 2.0 * t.real()) / 4.0;
    const double sxy = t.imag() / 2.0;
    const double sxz = w.real();
    const double syz = w.imag();
    const double szz = st.sz_moment(2);

    m.covariance(0, 0) = sxx - m.mean(0) * m.mean(0);
    m.covariance(1, 1) = syy - m.mean(1) * m.mean(1);
    m.covariance(2, 2) = szz - m.mean(2) * m.mean(2);
    m.covariance(0, 1) = m.covariance(1, 0) = sxy - m.mean(0) * m.mean(1);
    m.covariance(0, 2) = m.covariance(2, 0) = sxz - m.mean(0) * m.mean(2);
    m.covariance(1, 2) = m.covariance(2, 1) = syz - m.mean(1) * m.mean(2);
    return m;
}

// Smallest spin-quadrature variance in the plane orthogonal to the mean spin.
// Falls back to the smallest covariance eigenvalue when the mean vanishes.
inline double min_transverse_variance(const StokesMoments& m) {
    const double len = m.mean.norm();
    if (len < 1e-9 * std::max(1.0, m.s0)) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.covariance);
        return es.eigenvalues()(0);
    }
    const Eigen::Vector3d n = m.mean / len;
    Eigen::Vector3d aux = std::abs(n(0)) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d e1 = n.cross(aux).normalized();
    const Eigen::Vector3d e2 = n.cross(e1);
    const double v11 = e1.dot(m.covariance * e1);
    const double v22 = e2.dot(m.covariance * e2);
    const double v12 = e1.dot(m.covariance * e2);
    return 0.5 * (v11 + v22) - 0.5 * std::sqrt((v11 - v22) * (v11 - v22) + 4.0 * v12 * v12);
}

// Quantum Fisher information for the generator S_Z^2 on a pure state.
inline double twisting_qfi(const TwoModeState& st) {
    const double m2 = st.sz_moment(2);
    const double m4 = st.sz_moment(4);
    return 4.0 * (m4 - m2 * m2);
}

// ---------------------------------------------------------------------------
// Full evolve-and-report pipeline

struct TwistingReport {
    int n_photons = 0;
    double chi_t = 0;
    double tilt = 0;
    StokesMoments moments;
    double min_variance = 0;
    double qfi = 0;
    TwoModeState state;
};

inline TwistingReport twisting_evolve(int n_photons, double chi_t, double theta0,
                                      int photon_cap = kTwistingPhotonCap) {
    if (n_photons > photon_cap)
        throw DomainError("photon number exceeds the dense-state cap of " +
                          std::to_string(photon_cap));
    TwistingReport rep;
    rep.n_photons = n_photons;
    rep.chi_t = chi_t;
    rep.tilt = theta0;
    rep.state = TwoModeState::coherent_tilted(n_photons, theta0);
    rep.state.apply_twist(chi_t);
    rep.moments = stokes_moments(rep.state);
    rep.min_variance = min_transverse_variance(rep.moments);
    rep.qfi = twisting_qfi(rep.state);
    return rep;
}

// ---------------------------------------------------------------------------
// Dense Stokes operators on the fixed-N sector (small N; used by the exact
// commutator and moment cross-checks)

inline Eigen::MatrixXcd stokes_operator(int n_photons, char which) {
    const int dim = n_photons + 1;
    Eigen::MatrixXcd raise = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k + 1 <= n_photons; ++k)
        raise(k + 1, k) = std::sqrt(double(k + 1) * double(n_photons - k));
    switch (which) {
        case '+': return raise;
        case 'x': return 0.5 * (raise + raise.adjoint().eval());
        case 'y': return std::complex<double>(0, -0.5) * (raise - raise.adjoint().eval());
        case 'z': {
            Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(dim, dim);
            for (int k = 0; k < dim; ++k) sz(k, k) = k - 0.5 * n_photons;
            return sz;
        }
        case '0': return 0.5 * n_photons * Eigen::MatrixXcd::Identity(dim, dim);
        default: throw DomainError("unknown Stokes operator label");
    }
}

}  // namespace nlqi
