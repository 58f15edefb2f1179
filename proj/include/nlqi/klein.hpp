#pragma once

// Degenerate perturbation theory on the F=1 ground manifold: projector,
// resolvents, the operator products O_{k1..k_{t-1}}, and the order-t
// effective Hamiltonian as a tabulated rational-coefficient sum.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlqi/atomic_model.hpp"
#include "nlqi/errors.hpp"

namespace nlqi {

struct KleinTerm {
    std::vector<int> kvec;    // resolvent powers between successive V factors
    long long a_num = 0;      // rational expansion coefficient
    long long a_den = 1;

    int order() const { return static_cast<int>(kvec.size()) + 1; }
    double coeff() const { return static_cast<double>(a_num) / static_cast<double>(a_den); }
};

// Expansion coefficients of the Hermitian (canonically transformed) effective
// Hamiltonian, orders 2..4. Stored as data so alternative tables can be
// loaded and validated against the exact-diagonalization oracle.
class KleinTable {
public:
    static KleinTable canonical() {
        KleinTable t;
        t.add({{1}, 1, 1});

        t.add({{1, 1}, 1, 1});
        t.add({{2, 0}, -1, 2});
        t.add({{0, 2}, -1, 2});

        t.add({{1, 1, 1}, 1, 1});
        t.add({{2, 0, 1}, -1, 2});
        t.add({{1, 0, 2}, -1, 2});
        t.add({{2, 1, 0}, -1, 2});
        t.add({{0, 1, 2}, -1, 2});
        t.add({{1, 2, 0}, -1, 2});
        t.add({{0, 2, 1}, -1, 2});
        t.add({{3, 0, 0}, 1, 2});
        t.add({{0, 0, 3}, 1, 2});
        return t;
    }

    void add(KleinTerm term) {
        validate_term(term);
        auto& list = terms_[term.order()];
        for (const auto& existing : list)
            if (existing.kvec == term.kvec)
                throw ConfigError("klein table: duplicate index vector within an order");
        list.push_back(std::move(term));
    }

    bool has_order(int t) const { return terms_.count(t) > 0; }

    const std::vector<KleinTerm>& order(int t) const {
        auto it = terms_.find(t);
        if (it == terms_.end())
            throw DomainError("klein table: no terms for order " + std::to_string(t));
        return it->second;
    }

    std::vector<int> orders() const {
        std::vector<int> out;
        for (const auto& [t, v] : terms_) {
            (void)v;
            out.push_back(t);
        }
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [t, list] : terms_)
            for (const auto& term : list)
                arr.push_back({{"order", t},
                               {"kvec", term.kvec},
                               {"A_num", term.a_num},
                               {"A_den", term.a_den}});
        return arr;
    }

    static KleinTable from_json(const nlohmann::json& j) {
        if (!j.is_array()) throw ConfigError("klein table: expected a JSON array");
        KleinTable t;
        for (const auto& rec : j) {
            for (const auto& [key, value] : rec.items()) {
                (void)value;
                if (key != "order" && key != "kvec" && key != "A_num" && key != "A_den")
                    throw ConfigError("klein table: unknown key '" + key + "'");
            }
            KleinTerm term;
            try {
                term.kvec = rec.at("kvec").get<std::vector<int>>();
                term.a_num = rec.at("A_num").get<long long>();
                term.a_den = rec.at("A_den").get<long long>();
                if (rec.at("order").get<int>() != term.order())
                    throw ConfigError("klein table: order field disagrees with kvec length");
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("klein table: ") + e.what());
            }
            t.add(std::move(term));
        }
        return t;
    }

    static KleinTable from_json_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open klein table: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("klein table: ") + e.what());
        }
        return from_json(j);
    }

private:
    static void validate_term(const KleinTerm& term) {
        if (term.kvec.empty()) throw ConfigError("klein table: empty index vector");
        if (term.a_den == 0) throw ConfigError("klein table: zero denominator");
        int sum = 0;
        for (int k : term.kvec) {
            if (k < 0) throw ConfigError("klein table: negative resolvent power");
            sum += k;
        }
        if (sum != term.order() - 1)
            throw ConfigError("klein table: index vector must sum to order-1");
    }

    std::map<int, std::vector<KleinTerm>> terms_;
};

// ---------------------------------------------------------------------------
// Projector and resolvents

inline OperatorMatrix projector_p0(const LevelStructure& levels) {
    (void)levels;
    OperatorMatrix p;
    p.basis = OperatorMatrix::Basis::Full24;
    p.mat = Eigen::MatrixXcd::Zero(LevelStructure::kDim, LevelStructure::kDim);
    for (int i = 0; i < LevelStructure::kManifoldDim; ++i) p.mat(i, i) = 1.0;
    return p;
}

// R(0) = P0; R(k>0) is diagonal with (E0 - E_j)^-k on the complement, E0 = 0.
inline OperatorMatrix resolvent(int k, const OperatorMatrix& h0, const OperatorMatrix& p0) {
    if (k < 0) throw DomainError("resolvent power must be non-negative");
    if (k == 0) return p0;
    OperatorMatrix r;
    r.basis = OperatorMatrix::Basis::Full24;
    r.mat = Eigen::MatrixXcd::Zero(LevelStructure::kDim, LevelStructure::kDim);
    const LevelStructure levels;
    for (int i = 0; i < LevelStructure::kDim; ++i) {
        if (std::abs(p0.mat(i, i)) > 0.5) continue;  // manifold stays zero
        const double e = h0.mat(i, i).real();
        if (std::abs(e) < kPoleTolMHz)
            throw PoleError(LevelStructure::state_name(levels.state(i)), e);
        r.mat(i, i) = std::pow(-e, -k);
    }
    return r;
}

// O_{k1..k_{t-1}} = P0 V R^(k1) V ... V R^(k_{t-1}) V P0.
inline OperatorMatrix klein_operator(const std::vector<int>& kvec, const OperatorMatrix& v,
                                     const OperatorMatrix& h0, const OperatorMatrix& p0) {
    if (kvec.empty()) throw DomainError("klein operator needs at least one resolvent slot");
    Eigen::MatrixXcd acc = p0.mat * v.mat;
    for (int k : kvec) acc = acc * resolvent(k, h0, p0).mat * v.mat;
    OperatorMatrix out;
    out.basis = OperatorMatrix::Basis::Full24;
    out.mat = acc * p0.mat;
    return out;
}

// ---------------------------------------------------------------------------
// Effective Hamiltonian on the manifold

struct EffectiveHamiltonian {
    int order = 0;
    OperatorMatrix matrix;  // 3x3, ground F=1 basis ordered m = -1, 0, +1
    DetuningSet detuning;
    FieldConfig field;
};

inline constexpr double kHermiticityTol = 1e-12;

// Order-t contribution, in MHz, acting on the F=1 ground states. The
// ensemble version follows by replacing the single-atom pseudo-spin
// operators with their collective sums; it is not computed separately.
inline EffectiveHamiltonian effective_hamiltonian(int order, const FieldConfig& field,
                                                  const DetuningSet& detuning,
                                                  const KleinTable& table = KleinTable::canonical(),
                                                  bool allow_strong_field = false) {
    if (!table.has_order(order))
        throw DomainError("no expansion terms tabulated for order " + std::to_string(order));

    const LevelStructure levels;
    const OperatorMatrix h0 = build_h0(levels, detuning);
    const OperatorMatrix p0 = projector_p0(levels);
    const OperatorMatrix v = build_perturbation(levels, field, detuning, allow_strong_field);

    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(LevelStructure::kDim, LevelStructure::kDim);
    double term_scale = 0.0;  // cancellations between terms can dwarf the sum
    for (const KleinTerm& term : table.order(order)) {
        const Eigen::MatrixXcd op = klein_operator(term.kvec, v, h0, p0).mat;
        term_scale += std::abs(term.coeff()) * op.cwiseAbs().maxCoeff();
        acc += term.coeff() * op;
    }

    EffectiveHamiltonian h;
    h.order = order;
    h.detuning = detuning;
    h.field = field;
    h.matrix.basis = OperatorMatrix::Basis::Ground3;
    h.matrix.mat = acc.topLeftCorner(LevelStructure::kManifoldDim, LevelStructure::kManifoldDim);
    const double defect = (h.matrix.mat - h.matrix.mat.adjoint()).cwiseAbs().maxCoeff();
    if (term_scale > 0.0 && defect > kHermiticityTol * term_scale)
        throw DomainError("effective Hamiltonian lost hermiticity; check the expansion table");
    h.matrix.mat = 0.5 * (h.matrix.mat + h.matrix.mat.adjoint().eval());
    return h;
}

}  // namespace nlqi
