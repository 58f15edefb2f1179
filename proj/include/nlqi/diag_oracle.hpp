#pragma once

// Exact-diagonalization oracle for the perturbative expansion: track the
// three manifold-connected eigenvalues of h0 + eps*V and fit how fast the
// truncated expansion converges to them.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "nlqi/atomic_model.hpp"
#include "nlqi/errors.hpp"
#include "nlqi/klein.hpp"
#include "nlqi/numeric.hpp"

namespace nlqi {

struct ManifoldEigenvalues {
    std::array<double, 3> by_state{};   // assigned to m = -1, 0, +1
    std::array<double, 3> sorted{};     // ascending
    std::array<double, 3> subspace_overlap{};  // |P0 v|^2 per selected eigenvector
};

namespace detail {

// Eigen-decompose h0 + eps*V and pick the three eigenvectors with the
// largest weight on the F=1 ground subspace.
inline void manifold_spectrum(const FieldConfig& field, const DetuningSet& detuning,
                              double eps, std::array<double, 3>& values,
                              std::array<double, 3>& weights,
                              std::array<Eigen::VectorXcd, 3>& vectors) {
    const LevelStructure levels;
    const OperatorMatrix h0 = build_h0(levels, detuning);
    const OperatorMatrix v = build_perturbation(levels, field, detuning, true);
    Eigen::MatrixXcd h = h0.mat + eps * v.mat;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw DomainError("eigensolver failed");

    std::vector<std::pair<double, int>> ranked;  // (manifold weight, column)
    for (int c = 0; c < LevelStructure::kDim; ++c) {
        const double w = solver.eigenvectors().col(c).head(3).squaredNorm();
        ranked.emplace_back(w, c);
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    for (int i = 0; i < 3; ++i) {
        const int c = ranked[static_cast<size_t>(i)].second;
        values[static_cast<size_t>(i)] = solver.eigenvalues()(c);
        weights[static_cast<size_t>(i)] = ranked[static_cast<size_t>(i)].first;
        vectors[static_cast<size_t>(i)] = solver.eigenvectors().col(c);
    }
}

}  // namespace detail

// Sorted manifold eigenvalues only; no per-state assignment.
inline std::array<double, 3> manifold_eigenvalues_sorted(const FieldConfig& field,
                                                         const DetuningSet& detuning,
                                                         double eps) {
    std::array<double, 3> values{}, weights{};
    std::array<Eigen::VectorXcd, 3> vectors;
    detail::manifold_spectrum(field, detuning, eps, values, weights, vectors);
    std::sort(values.begin(), values.end());
    return values;
}

inline ManifoldEigenvalues exact_ground_manifold(const FieldConfig& field,
                                                 const DetuningSet& detuning, double eps,
                                                 double overlap_threshold = 0.9) {
    std::array<double, 3> values{}, weights{};
    std::array<Eigen::VectorXcd, 3> vectors;
    detail::manifold_spectrum(field, detuning, eps, values, weights, vectors);

    ManifoldEigenvalues out;
    std::array<int, 3> claimed{-1, -1, -1};  // manifold state -> eigenvector index
    for (int i = 0; i < 3; ++i) {
        if (weights[static_cast<size_t>(i)] < overlap_threshold)
            throw DegeneracyError("manifold overlap " +
                                  std::to_string(weights[static_cast<size_t>(i)]) +
                                  " below threshold; outside the perturbative regime");
        int best = 0;
        double best_w = 0.0;
        for (int s = 0; s < 3; ++s) {
            const double w = std::norm(vectors[static_cast<size_t>(i)](s));
            if (w > best_w) {
                best_w = w;
                best = s;
            }
        }
        if (claimed[static_cast<size_t>(best)] >= 0)
            throw DegeneracyError("two eigenvectors claim the same manifold state");
        claimed[static_cast<size_t>(best)] = i;
        out.by_state[static_cast<size_t>(best)] = values[static_cast<size_t>(i)];
        out.subspace_overlap[static_cast<size_t>(best)] = weights[static_cast<size_t>(i)];
    }
    out.sorted = values;
    std::sort(out.sorted.begin(), out.sorted.end());
    return out;
}

// ---------------------------------------------------------------------------
// Convergence scan

struct ConvergencePoint {
    double eps = 0;
    double residual = 0;
    bool dropped = false;  // at the numerical noise floor
};

struct ConvergenceScan {
    double slope = 0;  // d log10(residual) / d log10(eps)
    std::vector<ConvergencePoint> points;
    int points_used = 0;
    int points_dropped = 0;
};

// Max eigenvalue residual between exact diagonalization at eps and the sum
// of the tabulated orders; fit the log-log slope over the grid. `orders`
// may be empty (residual against the zero Hamiltonian, leading order eps^2).
inline ConvergenceScan convergence_scan(const FieldConfig& field, const DetuningSet& detuning,
                                        const std::vector<double>& eps_grid,
                                        const std::vector<int>& orders,
                                        const KleinTable& table = KleinTable::canonical()) {
    if (eps_grid.size() < 2) throw DomainError("convergence scan needs at least two eps values");
    double lo = eps_grid.front(), hi = eps_grid.front();
    for (double e : eps_grid) {
        if (!(e > 0.0)) throw DomainError("eps values must be positive");
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (hi / lo < 10.0) throw DomainError("eps grid must span at least one decade");

    std::vector<Eigen::Matrix3cd> heffs;
    for (int t : orders)
        heffs.push_back(effective_hamiltonian(t, field, detuning, table, true)
                            .matrix.mat);

    // Everything below the eigensolver's round-off on h0 is noise.
    const LevelStructure levels;
    const OperatorMatrix h0 = build_h0(levels, detuning);
    const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                               h0.mat.cwiseAbs().maxCoeff();

    ConvergenceScan scan;
    std::vector<std::pair<double, double>> fit_data;
    for (double eps : eps_grid) {
        std::array<double, 3> exact = manifold_eigenvalues_sorted(field, detuning, eps);

        Eigen::Matrix3cd model = Eigen::Matrix3cd::Zero();
        for (size_t i = 0; i < orders.size(); ++i)
            model += std::pow(eps, orders[i]) * heffs[i];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(model);
        Eigen::Vector3d approx = solver.eigenvalues();

        double residual = 0.0;
        for (int i = 0; i < 3; ++i)
            residual = std::max(residual, std::abs(exact[static_cast<size_t>(i)] - approx(i)));

        ConvergencePoint pt{eps, residual, residual < noise_floor};
        scan.points.push_back(pt);
        if (pt.dropped)
            ++scan.points_dropped;
        else
            fit_data.emplace_back(eps, residual);
    }
    scan.points_used = static_cast<int>(fit_data.size());
    if (scan.points_used < 2)
        throw DomainError("convergence scan: too few points above the noise floor");
    scan.slope = fit_loglog_slope(fit_data);
    return scan;
}

}  // namespace nlqi
