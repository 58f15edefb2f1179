#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "nlqi/spin_stokes.hpp"
#include "nlqi/tensor.hpp"

using namespace nlqi;

namespace {
const AtomicConstants kConstants = AtomicConstants::rb87_d2();

// pole-free detunings spread across the spectrum
const std::vector<double> kProbeDetunings = {-500.0, -120.0, 34.0, 150.0, 310.0, 620.0};
}  // namespace

TEST_CASE("spin operator basis algebra") {
    const auto b = SpinOperatorBasis::f1();
    const std::complex<double> i(0, 1);
    CHECK(((b.fx * b.fy - b.fy * b.fx) - i * b.fz).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(((b.fy * b.fz - b.fz * b.fy) - i * b.fx).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(((b.fz * b.fx - b.fx * b.fz) - i * b.fy).cwiseAbs().maxCoeff() < 1e-15);

    // the stored j matrices are the quadratic f combinations
    CHECK((b.jx - (b.fx * b.fx - b.fy * b.fy)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((b.jy - (b.fx * b.fy + b.fy * b.fx)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((b.j0 - b.fz * b.fz).cwiseAbs().maxCoeff() < 1e-15);

    // P(m=0) = I - j0
    Eigen::Matrix3cd pm0 = b.identity - b.j0;
    CHECK(pm0(1, 1) == std::complex<double>(1, 0));
    CHECK(std::abs(pm0(0, 0)) + std::abs(pm0(2, 2)) == 0.0);

    // the projection basis is exactly trace-orthogonal
    const Eigen::Matrix3cd j0t = 3.0 * b.j0 - 2.0 * b.identity;
    const std::vector<Eigen::Matrix3cd> ops = {b.identity, j0t, b.jz, b.jx, b.jy};
    for (size_t a = 0; a < ops.size(); ++a)
        for (size_t c = a + 1; c < ops.size(); ++c)
            CHECK(std::abs((ops[a].adjoint() * ops[c]).trace()) == 0.0);
}

TEST_CASE("stokes components") {
    const auto sp = StokesVector::from_field({{1.0, 0.0}, {0.0, 0.0}});
    CHECK(sp.s0 == 1.0);
    CHECK(sp.sz == 1.0);
    CHECK(sp.sx == 0.0);

    const double r = 1.0 / std::sqrt(2.0);
    const auto lin = StokesVector::from_field({{r, 0.0}, {r, 0.0}});
    CHECK(lin.s0 == doctest::Approx(1.0));
    CHECK(lin.sx == doctest::Approx(1.0));
    CHECK(std::abs(lin.sz) < 1e-16);

    // purity: any pure field sits on the S0 sphere
    for (double a : {0.3, 1.0, 1.7})
        for (double ph : {0.0, 0.9, -2.0}) {
            const auto s = StokesVector::from_field({{a, 0.1}, std::polar(0.6, ph)});
            CHECK(std::abs(s.purity_defect()) < 1e-12 * s.s0 * s.s0);
        }
}

TEST_CASE("closed forms at equal detuning") {
    for (double delta : {20.0, 50.0, -75.0}) {
        const auto d = DetuningSet::from_values({delta, delta, delta, delta},
                                                kConstants.ground_splitting_MHz);
        const auto a = closed_form_alpha(d);
        CHECK(a.alpha1 == doctest::Approx(1.0 / (12 * delta)).epsilon(1e-14));
        CHECK(a.alpha2 == 0.0);
        const auto b = closed_form_beta(d);
        CHECK(b.beta0_N ==
              doctest::Approx(-1.0 / (36 * delta * delta * kConstants.ground_splitting_MHz))
                  .epsilon(1e-14));
    }
}

TEST_CASE("closed-form polynomial identity") {
    for (double delta : kProbeDetunings) {
        const auto d = DetuningSet::from_constants(kConstants, delta);
        const auto a = closed_form_alpha(d);
        const double B = closed_form::prefactor_B(d);
        const double expected =
            B * (4 * d.delta_Fprime[0] * d.delta_Fprime[1] - 8 * d.delta_Fprime[1] * d.delta_Fprime[2]);
        CHECK(a.alpha1 - a.alpha2 == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("closed forms are homogeneous in the detunings") {
    const auto d = DetuningSet::from_constants(kConstants, -210.0);
    const double lambda = 3.7;
    std::array<double, 4> scaled_d{};
    for (int i = 0; i < 4; ++i) scaled_d[static_cast<size_t>(i)] = lambda * d.delta_Fprime[static_cast<size_t>(i)];
    const auto scaled = DetuningSet::from_values(scaled_d, lambda * d.Delta);

    const auto a0 = closed_form_alpha(d);
    const auto a1 = closed_form_alpha(scaled);
    CHECK(a1.alpha1 == doctest::Approx(a0.alpha1 / lambda).epsilon(1e-13));
    CHECK(a1.alpha2 == doctest::Approx(a0.alpha2 / lambda).epsilon(1e-13));

    // degree-7 numerators against a degree-10 prefactor denominator
    const auto b0 = closed_form_beta(d);
    const auto b1 = closed_form_beta(scaled);
    const double l3 = lambda * lambda * lambda;
    CHECK(b1.beta0_J == doctest::Approx(b0.beta0_J / l3).epsilon(1e-13));
    CHECK(b1.beta0_N == doctest::Approx(b0.beta0_N / l3).epsilon(1e-13));
    CHECK(b1.beta1 == doctest::Approx(b0.beta1 / l3).epsilon(1e-13));
    CHECK(b1.beta2 == doctest::Approx(b0.beta2 / l3).epsilon(1e-13));
}

TEST_CASE("closed forms reject poles") {
    CHECK_THROWS_AS(closed_form_alpha(DetuningSet::from_constants(kConstants, 0.0)), PoleError);
    CHECK_THROWS_AS(
        closed_form_beta(DetuningSet::from_values({10, 20, 30, 40}, 0.0)), PoleError);
}

TEST_CASE("extraction reproduces the closed forms") {
    for (double delta : kProbeDetunings) {
        const auto d = DetuningSet::from_constants(kConstants, delta);
        const auto ca = closed_form_alpha(d);
        const auto ea = extract_alpha(d);
        CHECK(ea.alpha1 == doctest::Approx(ca.alpha1).epsilon(1e-10));
        CHECK(ea.alpha2 == doctest::Approx(ca.alpha2).epsilon(1e-10));
        CHECK(ea.fit_residual < 1e-10);

        const auto cb = closed_form_beta(d);
        const auto eb = extract_beta(d);
        CHECK(eb.beta0_J == doctest::Approx(cb.beta0_J).epsilon(1e-8));
        CHECK(eb.beta0_N == doctest::Approx(cb.beta0_N).epsilon(1e-8));
        CHECK(eb.beta1 == doctest::Approx(cb.beta1).epsilon(1e-8));
        CHECK(eb.beta2 == doctest::Approx(cb.beta2).epsilon(1e-8));
        CHECK(eb.fit_residual < 1e-10);
    }
}

TEST_CASE("extraction at an equal-detuning point") {
    const double delta = 50.0;
    const auto d =
        DetuningSet::from_values({delta, delta, delta, delta}, kConstants.ground_splitting_MHz);
    const auto ea = extract_alpha(d);
    CHECK(ea.alpha1 == doctest::Approx(1.0 / (12 * delta)).epsilon(1e-12));
    CHECK(std::abs(ea.alpha2) < 1e-10 * std::abs(ea.alpha1));
    const auto eb = extract_beta(d);
    CHECK(eb.beta0_N ==
          doctest::Approx(-1.0 / (36 * delta * delta * kConstants.ground_splitting_MHz))
              .epsilon(1e-10));
}

TEST_CASE("extract_coefficients dispatcher") {
    const auto d = DetuningSet::from_constants(kConstants, -120.0);
    const auto t2 = extract_coefficients(2, d);
    CHECK(t2.alpha.has_value());
    CHECK_FALSE(t2.beta.has_value());
    CHECK(t2.delta == -120.0);
    const auto t4 = extract_coefficients(4, d);
    CHECK(t4.beta.has_value());
    CHECK_THROWS_AS(extract_coefficients(3, d), DomainError);
}

TEST_CASE("spectra table") {
    const auto table = spectra(kConstants, -100.0, 100.0, 10.0);
    // delta = 0 and delta = 70..80 neighborhoods are the only pole risks on
    // this grid; delta = 0 lands exactly on a pole
    CHECK(table.masked.size() == 1);
    CHECK(table.masked[0] == 0.0);
    CHECK(table.rows.size() == 20);
    for (const auto& row : table.rows) {
        const auto d = DetuningSet::from_constants(kConstants, row.delta);
        const auto a = closed_form_alpha(d);
        const auto b = closed_form_beta(d);
        CHECK(row.alpha1 == a.alpha1);
        CHECK(row.beta2 == b.beta2);
    }

    CHECK_THROWS_AS(spectra(kConstants, 10.0, -10.0, 1.0), DomainError);
    CHECK_THROWS_AS(spectra(kConstants, -10.0, 10.0, 0.0), DomainError);

    // a single grid point sitting on a pole yields an empty (fully masked) table
    const auto at_pole = spectra(kConstants, 0.0, 0.0, 1.0);
    CHECK(at_pole.rows.empty());
    CHECK(at_pole.masked.size() == 1);
}

TEST_CASE("spectra diverge toward each pole and tensorial part dies off far away") {
    const auto near_lo = DetuningSet::from_constants(kConstants, 72.218 - 0.01);
    const auto near_hi = DetuningSet::from_constants(kConstants, 72.218 + 0.01);
    const auto far = DetuningSet::from_constants(kConstants, 150.0);
    CHECK(std::abs(closed_form_alpha(near_lo).alpha1) > 100 * std::abs(closed_form_alpha(far).alpha1));
    CHECK(std::abs(closed_form_alpha(near_hi).alpha1) > 100 * std::abs(closed_form_alpha(far).alpha1));

    const auto distant = DetuningSet::from_constants(kConstants, -1.0e6);
    const auto a = closed_form_alpha(distant);
    CHECK(std::abs(a.alpha2 / a.alpha1) < 1e-3);
}

TEST_CASE("roots of the vector coupling match the quadratic formula") {
    // 5 d0 d1 - 5 d0 d2 - 4 d1 d2 as a polynomial in delta:
    //   -4 delta^2 + (9 off2 - off1) delta - 4 off1 off2
    const double off1 = kConstants.excited_offsets_MHz[0];
    const double off2 = kConstants.excited_offsets_MHz[1];
    const double a = -4, b = 9 * off2 - off1, c = -4 * off1 * off2;
    const double disc = std::sqrt(b * b - 4 * a * c);
    const double r_small = (-b + disc) / (2 * a);
    const double r_large = (-b - disc) / (2 * a);

    const auto records = find_roots(kConstants, "alpha1", -300.0, 490.0);
    REQUIRE(records.size() == 2);
    CHECK(std::abs(records[0].root_MHz - std::min(r_small, r_large)) < 2e-6);
    CHECK(std::abs(records[1].root_MHz - std::max(r_small, r_large)) < 2e-6);
    for (const auto& rec : records) {
        CHECK(rec.coefficient == "alpha1");
        CHECK(rec.bracket_lo <= rec.root_MHz);
        CHECK(rec.bracket_hi >= rec.root_MHz);
        // the closed-form value itself vanishes there while alpha2 does not
        const auto d = DetuningSet::from_constants(kConstants, rec.root_MHz);
        const auto cf = closed_form_alpha(d);
        CHECK(std::abs(cf.alpha1) < 1e-6 * std::abs(cf.alpha2));
    }
}

TEST_CASE("intensity-dependent coupling has a zero crossing in the span") {
    const auto records = find_roots(kConstants, "beta1", -300.0, 490.0);
    CHECK(records.size() >= 1);
}

TEST_CASE("root finding edge cases") {
    CHECK(find_roots(kConstants, "alpha1", 500.0, 900.0).empty());  // no crossing there
    CHECK_THROWS_AS(find_roots(kConstants, "nope", 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(find_roots(kConstants, "alpha1", 1.0, 1.0), DomainError);
}

TEST_CASE("closed-form and extraction pipelines agree on root locations") {
    const auto closed = find_roots(kConstants, "alpha1", 300.0, 490.0);
    REQUIRE(closed.size() == 1);

    const auto alpha1_extracted = [&](double delta) {
        return extract_alpha(DetuningSet::from_constants(kConstants, delta)).alpha1;
    };
    const auto extracted = find_sign_change_roots(alpha1_extracted, 300.0, 490.0,
                                                  coefficient_poles(kConstants), 1e-6, 64);
    REQUIRE(extracted.size() == 1);
    CHECK(std::abs(extracted[0] - closed[0].root_MHz) < 1e-3);
}
