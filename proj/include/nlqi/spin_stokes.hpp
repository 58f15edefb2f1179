#pragma once

// f=1 angular-momentum matrices, the pseudo-spin operator basis used to
// decompose the effective Hamiltonian, and classical Stokes components.
//
// Pseudo-spin convention: j_x = f_x^2 - f_y^2, j_y = f_x f_y + f_y f_x,
// j_z = f_z, j_0 = f_z^2, so that P_{m=0} = I - j_0 and the coefficient
// normalization matches the closed-form spectra.

#include <Eigen/Dense>

#include <array>
#include <complex>

#include "nlqi/atomic_model.hpp"

namespace nlqi {

struct SpinOperatorBasis {
    Eigen::Matrix3cd identity;
    Eigen::Matrix3cd fx, fy, fz;
    Eigen::Matrix3cd jx, jy, jz, j0;

    // Basis ordering m = -1, 0, +1. The j matrices equal fx^2-fy^2,
    // fx fy + fy fx, fz, fz^2; written out with exact entries.
    static SpinOperatorBasis f1() {
        SpinOperatorBasis b;
        const double r = 1.0 / std::sqrt(2.0);
        const std::complex<double> i(0.0, 1.0);
        b.identity = Eigen::Matrix3cd::Identity();
        b.fx << 0, r, 0, r, 0, r, 0, r, 0;
        b.fy << 0, i * r, 0, -i * r, 0, i * r, 0, -i * r, 0;
        b.fz = Eigen::Vector3cd(-1.0, 0.0, 1.0).asDiagonal();
        b.jx << 0, 0, 1, 0, 0, 0, 1, 0, 0;
        b.jy << 0, 0, i, 0, 0, 0, -i, 0, 0;
        b.jz = b.fz;
        b.j0 = Eigen::Vector3cd(1.0, 0.0, 1.0).asDiagonal();
        return b;
    }
};

// Classical Stokes components S_i = (g+*, g-*) sigma_i (g+, g-)^T, in MHz^2.
struct StokesVector {
    double s0 = 0, sx = 0, sy = 0, sz = 0;

    static StokesVector from_field(const FieldConfig& f) {
        StokesVector s;
        const std::complex<double> cross = std::conj(f.g_plus) * f.g_minus;
        s.s0 = std::norm(f.g_plus) + std::norm(f.g_minus);
        s.sz = std::norm(f.g_plus) - std::norm(f.g_minus);
        s.sx = 2.0 * cross.real();
        s.sy = 2.0 * cross.imag();
        return s;
    }

    // sx^2 + sy^2 + sz^2 - s0^2; identically zero for a pure field.
    double purity_defect() const { return sx * sx + sy * sy + sz * sz - s0 * s0; }
};

}  // namespace nlqi
