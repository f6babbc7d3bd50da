// Copyright 2026 The FockForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fockforge/gates.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fockforge;

namespace {

/// v aligned to w by the global phase of <w, v>.
ComplexVector align(const ComplexVector& v, const ComplexVector& w) {
    const Complex ov = w.dot(v);
    return std::abs(ov) > 0 ? ComplexVector(v * (std::abs(ov) / ov)) : v;
}

ComplexVector random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) {
        const double re = g(rng), im = g(rng);
        v[i] = {re, im};
    }
    return v;
}

}  // namespace

TEST(phase_invariant_residual, ignores_global_phase_only) {
    std::mt19937_64 rng(1);
    ComplexMatrix b(3, 3);
    for (int c = 0; c < 3; ++c) b.col(c) = random_vector(3, rng);
    EXPECT_LE(phase_invariant_residual(std::polar(1.0, 2.3) * b, b), 1e-15);
    ComplexMatrix a = b;
    a(1, 1) *= -1.0;
    EXPECT_GT(phase_invariant_residual(a, b), 0.1);
    EXPECT_THROW(phase_invariant_residual(ComplexMatrix(2, 2), ComplexMatrix(3, 3)), std::invalid_argument);
}

TEST(su3_phase_gate, zero_phases_reach_unit_probability) {
    const Gate g = su3_phase_gate(0.0, 0.0);
    EXPECT_LT(g.report.residual, 1e-9);
    EXPECT_NEAR(g.report.success_probability, 1.0, 1e-6);
}

TEST(su3_phase_gate, sign_flip_pattern) {
    const Gate g = su3_phase_gate(0.0, kPi);
    EXPECT_LT(g.report.residual, 1e-8);
    // Same constraint family as the four-photon controlled-phase arm.
    EXPECT_GE(g.report.success_probability, 0.235);
    EXPECT_LE(g.report.success_probability, 0.25 + 1e-3);
    EXPECT_NEAR(g.report.success_probability, g.report.metric("per_sub11_squared"), 1e-8);
}

TEST(su3_phase_gate, condition_solvable_on_a_grid) {
    for (double phi1 : {0.0, 2.0, 4.0}) {
        for (double phi2 : {1.0, 3.0, 5.0}) {
            const Gate g = su3_phase_gate(phi1, phi2, 3, 20);
            EXPECT_LT(g.report.residual, 1e-8) << phi1 << " " << phi2;
            EXPECT_GT(g.report.success_probability, 0.0);
        }
    }
}

TEST(nss_gate, sign_shift_at_quarter_probability) {
    const Gate g = nss_gate_klm();
    EXPECT_LT(g.report.metric("map_residual"), 1e-6);
    EXPECT_LT(g.report.residual, 1e-6);
    EXPECT_NEAR(g.report.success_probability, 0.25, 1e-3);
    EXPECT_EQ(g.recipe.network.beam_splitter_count(), 3u);
    EXPECT_EQ(g.recipe.aux, (OccupationVector{1, 0}));
    EXPECT_EQ(g.recipe.det, (OccupationVector{1, 0}));
}

TEST(nss_gate, recipe_network_reproduces_report) {
    const Gate g = nss_gate_klm(2, 10);
    const auto y = extract_conditional_operator(compose(g.recipe.network), {0}, g.recipe.aux, g.recipe.det, 2);
    const ComplexMatrix target = g.report.target;
    EXPECT_LE(phase_invariant_residual(y.matrix() / std::sqrt(g.report.success_probability), target), 1e-6);
}

TEST(cphase, decomposition_identity) {
    // BS (N1 x N2) BS^-1 on the 2-qubit subspace equals 1 - (1 - e^{i phi}) n1 n2.
    const BeamSplitterParams split{0, 1, kPi / 4, 0.0, 0.0};
    const ModeUnitary b = bs_matrix(split, 2), bi = bs_matrix(split.inverse(), 2);
    const std::vector<OccupationVector> qubits{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    const FockBasis inner = FockBasis::per_mode_max(2, 2);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    for (int trial = 0; trial < 20; ++trial) {
        const double phi = u(rng);
        auto n = [&](int k) { return k == 2 ? std::polar(1.0, phi) : Complex(1.0); };
        for (const auto& in : qubits) {
            for (const auto& out : qubits) {
                Complex amp{};
                for (std::size_t m = 0; m < inner.size(); ++m) {
                    const auto& mid = inner[m];
                    amp += fock_lift_amplitude(bi, mid, out) * n(mid[0]) * n(mid[1]) * fock_lift_amplitude(b, in, mid);
                }
                const Complex expect = in == out ? (in == OccupationVector{1, 1} ? std::polar(1.0, phi) : 1.0) : 0.0;
                EXPECT_LE(std::abs(amp - expect), 1e-10);
            }
        }
    }
}

TEST(cphase, zero_phase_is_identity) {
    for (auto v : {CPhaseVariant::FourPhoton, CPhaseVariant::VacuumDetector}) {
        const Gate g = cphase_gate(0.0, v, 1, 10);
        EXPECT_LT(g.report.residual, 1e-9);
    }
}

TEST(cphase, four_photon_sign_flip) {
    const Gate g = cphase_gate(kPi, CPhaseVariant::FourPhoton);
    EXPECT_LT(g.report.residual, 1e-8);
    EXPECT_GE(g.report.metric("arm_probability"), 0.235);
    EXPECT_EQ(g.recipe.aux, (OccupationVector{1, 1, 1, 1}));
    EXPECT_EQ(g.recipe.det, (OccupationVector{1, 1, 1, 1}));
    EXPECT_EQ(g.recipe.network.beam_splitter_count(), 8u);
    // Arms are independent: total = arm probability squared, up to the
    // first-order effect of the arm's own constraint residual.
    EXPECT_NEAR(g.report.success_probability, g.report.metric("arm_probability_product"),
                std::sqrt(g.report.metric("arm_residual")));
}

TEST(cphase, vacuum_detector_exact_transmissions) {
    const auto [t1, t0] = vacuum_detector_transmissions();
    EXPECT_NEAR(t1, 0.476, 1e-3);
    EXPECT_NEAR(t0, 0.87, 1e-3);
    const Gate g = cphase_gate(kPi, CPhaseVariant::VacuumDetector);
    EXPECT_LT(g.report.residual, 1e-12);
    EXPECT_NEAR(g.report.metric("arm_probability"), t1 * t1, 1e-12);
    EXPECT_NEAR(g.report.success_probability, g.report.metric("arm_probability_product"), 1e-10);
    EXPECT_EQ(g.recipe.network.beam_splitter_count(), 6u);
}

TEST(cphase, vacuum_detector_rounded_transmissions) {
    for (double phase : {0.0, 0.7}) {
        const Gate g = cphase_vacuum_detector(0.476, 0.87, phase);
        EXPECT_NEAR(g.report.metric("arm_probability"), 0.23, 0.01);
        EXPECT_NEAR(g.report.success_probability, 0.053, 0.005);
        EXPECT_LT(g.report.residual, 1e-3);
    }
}

TEST(cphase, vacuum_detector_rejects_other_phases) {
    EXPECT_THROW(cphase_gate(1.0, CPhaseVariant::VacuumDetector), std::invalid_argument);
    EXPECT_THROW(cphase_vacuum_detector(0.0, 0.5), std::invalid_argument);
}

TEST(ralph_cz, forced_transmission_and_quarter_bound) {
    const RalphReport r = ralph_cz_check();
    EXPECT_NEAR(r.lambda11_analytic, 1.0 - std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(r.lambda11_optimized.real(), 1.0 - std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(r.lambda11_optimized.imag(), 0.0, 1e-6);
    EXPECT_NEAR(r.max_lambda22_squared, 0.25, 1e-3);
    EXPECT_LT(r.constraint_per33, 1e-8);
    EXPECT_LT(r.constraint_second, 1e-8);
}

TEST(swap_gate, exact_and_deterministic) {
    const Gate g = swap_gate();
    EXPECT_LT(g.report.residual, 1e-12);
    EXPECT_NEAR(g.report.success_probability, 1.0, 1e-12);
    EXPECT_LT(g.report.metric("full_space_unitarity_error"), 1e-12);
    EXPECT_LT(g.report.metric("involution_error"), 1e-12);
    EXPECT_EQ(g.report.metric("phase_polynomial_error"), 0.0);
    EXPECT_EQ(g.recipe.network.beam_splitter_count(), 2u);
    const ModeUnitary u = compose(g.recipe.network);
    EXPECT_NEAR(std::abs(fock_lift_amplitude(u, {0, 1}, {1, 0})), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(fock_lift_amplitude(u, {2, 1}, {1, 2})), 1.0, 1e-12);
}

TEST(kill_operator, projects_out_two_photons) {
    const FockOperator k = kill_operator(4);
    EXPECT_EQ(k.element({0}, {0}), Complex(1.0));
    EXPECT_EQ(k.element({1}, {1}), Complex(1.0));
    EXPECT_EQ(k.element({2}, {2}), Complex(0.0));
    EXPECT_EQ(k.element({3}, {3}), Complex(-2.0));
    EXPECT_THROW(kill_operator(1), std::invalid_argument);
}

TEST(engineer_state, single_photon) {
    const auto e = engineer_state({0.0, 1.0});
    EXPECT_NEAR(std::norm(e.state.amplitude({1})), 1.0, 1e-12);
    EXPECT_EQ(e.single_photon_sources, 1);
    EXPECT_EQ(e.coherent_sources, 0);
}

TEST(engineer_state, vacuum_plus_one) {
    const auto e = engineer_state({1.0, 1.0});
    EXPECT_GT(e.fidelity, 1.0 - 1e-8);
    ComplexVector expect = ComplexVector::Zero(static_cast<Eigen::Index>(e.state.basis.size()));
    expect[0] = expect[1] = 1.0 / std::sqrt(2.0);
    EXPECT_LE((align(e.state.amplitudes, expect) - expect).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(e.elements, 2);
}

TEST(engineer_state, random_cubics_match_weighted_target) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexVector d = random_vector(4, rng);
        const std::vector<Complex> coeffs(d.data(), d.data() + 4);
        const auto e = engineer_state(coeffs);
        ComplexVector target = ComplexVector::Zero(static_cast<Eigen::Index>(e.state.basis.size()));
        for (int k = 0; k < 4; ++k) target[k] = coeffs[static_cast<std::size_t>(k)] * std::sqrt(factorial(k));
        EXPECT_GT(fidelity(e.state, PureState(e.state.basis, target)), 1.0 - 1e-6);
        EXPECT_EQ(e.single_photon_sources, 3);
        EXPECT_LE(e.coherent_sources, 4);
        EXPECT_LE(e.elements, 6);
        EXPECT_EQ(e.roots.size(), 3u);
        EXPECT_LT(e.truncation_error, 1e-12);
    }
}

TEST(engineer_state, photon_addition_matches_conditioning) {
    // The engineering loop uses R a^dagger T^n, the conditional operator of
    // one ancilla photon and vacuum detection.
    const double t = 0.9;
    const auto y = extract_conditional_operator(bs_matrix({0, 1, std::acos(t), 0.0, 0.0}, 2), {0}, {1}, {0}, 8);
    for (int m = 0; m < 8; ++m) {
        EXPECT_NEAR(std::abs(y.matrix()(m + 1, m) - std::sqrt(1 - t * t) * std::pow(t, m) * std::sqrt(m + 1.0)), 0.0,
                    1e-12);
    }
    const std::vector<Complex> d = detail::engineering_displacements({Complex(0.3, -0.2), Complex(-0.5, 0.1)}, t);
    const ComplexVector v = detail::engineering_run(d, t, 60).v;
    // (a^dagger - r1)(a^dagger - r2)|0>.
    ComplexVector expect = ComplexVector::Zero(61);
    const Complex r1(0.3, -0.2), r2(-0.5, 0.1);
    expect[0] = r1 * r2;
    expect[1] = -(r1 + r2);
    expect[2] = std::sqrt(2.0);
    EXPECT_GT(std::norm(expect.normalized().dot(v.normalized())), 1.0 - 1e-14);
}

TEST(engineer_state, vector_displacement_matches_operator) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    ComplexVector v = ComplexVector::Zero(81);
    for (int k = 0; k <= 6; ++k) v[k] = Complex(g(rng), g(rng));
    for (const Complex alpha : {Complex(0.2, 0.1), Complex(-1.7, 0.4), Complex(0.0, 3.1)}) {
        const ComplexVector a = detail::apply_displacement(alpha, v);
        const ComplexVector b = displacement_operator(alpha, 80).matrix * v;
        EXPECT_LT((a - b).head(50).norm(), 1e-10 * v.norm());
    }
}

TEST(engineer_state, repeated_root_is_flagged) {
    const auto e = engineer_state({1.0, 2.0, 1.0});
    EXPECT_TRUE(e.ill_conditioned);
    EXPECT_GT(e.fidelity, 1.0 - 1e-6);
}

TEST(engineer_state, rejects_bad_input) {
    EXPECT_THROW(engineer_state({}), std::invalid_argument);
    EXPECT_THROW(engineer_state({1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(engineer_state(std::vector<Complex>(8, 1.0)), std::invalid_argument);
    EXPECT_THROW(engineer_state({1.0, 1.0}, 1.0), std::invalid_argument);
}

TEST(apply_creation_polynomial, constant_is_transmission_filter) {
    const FockBasis b = FockBasis::per_mode_max(1, 3);
    std::mt19937_64 rng(5);
    const PureState psi = normalized(PureState(b, random_vector(4, rng)));
    const auto r = apply_creation_polynomial({1.0}, psi);
    ComplexVector expect(4);
    for (int n = 0; n < 4; ++n) expect[n] = std::pow(r.lambda11, n) * psi.amplitudes[n];
    expect.normalize();
    EXPECT_LE((align(r.state.amplitudes, expect) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(apply_creation_polynomial, single_creation_on_vacuum) {
    const auto r = apply_creation_polynomial({0.0, 1.0}, basis_state(FockBasis::per_mode_max(1, 0), {0}));
    EXPECT_NEAR(std::norm(r.state.amplitude({1})), 1.0, 1e-12);
}

TEST(apply_creation_polynomial, matches_direct_polynomial) {
    std::mt19937_64 rng(9);
    const FockBasis b = FockBasis::per_mode_max(1, 3);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexVector d = random_vector(3, rng);
        const PureState psi = normalized(PureState(b, random_vector(4, rng)));
        const auto r = apply_creation_polynomial({d[0], d[1], d[2]}, psi);
        // Oracle: sum d_k L12^k (a^dagger)^k L11^n psi.
        ComplexVector filtered(4);
        for (int n = 0; n < 4; ++n) filtered[n] = std::pow(r.lambda11, n) * psi.amplitudes[n];
        ComplexVector expect = ComplexVector::Zero(6);
        for (int k = 0; k < 3; ++k) {
            for (int n = 0; n < 4; ++n) {
                expect[n + k] += d[k] * std::pow(r.lambda12, k) * std::sqrt(factorial(n + k) / factorial(n)) * filtered[n];
            }
        }
        expect.normalize();
        EXPECT_LT(r.ancilla_infidelity, 1e-6);
        const double tol = 1e-10 + 10.0 * std::sqrt(r.ancilla_infidelity);
        EXPECT_LE((align(r.state.amplitudes, expect) - expect).cwiseAbs().maxCoeff(), tol);
    }
}

TEST(apply_creation_polynomial, vanishing_projection_is_an_error) {
    EXPECT_THROW(apply_creation_polynomial({1.0}, basis_state(FockBasis::per_mode_max(1, 1), {1}), kPi / 2),
                 NumericError);
}

TEST(tmsv_state, limits_and_norm) {
    const PureState v = tmsv_state(0.0, 0);
    EXPECT_EQ(v.amplitude({0, 0}), Complex(1.0));
    const PureState s = tmsv_state(0.1, 12);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
    for (int n = 1; n <= 12; ++n) {
        EXPECT_NEAR(std::abs(s.amplitude({n, n}) / s.amplitude({n - 1, n - 1})), 0.1, 1e-14);
    }
    EXPECT_EQ(s.amplitude({1, 0}), Complex(0.0));
    EXPECT_THROW(tmsv_state(0.5, 5), std::invalid_argument);
    EXPECT_EQ(tmsv_cutoff(0.1), 12);
}

TEST(procrustean_filter, layer_ratio_is_lambda) {
    for (Complex lambda : {Complex(0.02, 0.0), Complex(0.0, 0.3), Complex(-1.5, 0.7)}) {
        const double q = 0.05;
        const auto f = procrustean_filter(tmsv_state(q, tmsv_cutoff(q)), lambda, q);
        EXPECT_NEAR(f.filtered.norm_squared(), 1.0, 1e-10);
        EXPECT_LE(std::abs(f.filtered.amplitude({1, 1}) / f.filtered.amplitude({0, 0}) - lambda), 1e-12);
        EXPECT_GT(f.success_probability, 0.0);
    }
}

TEST(procrustean_filter, balanced_splitter_distance) {
    // lambda = q * (layer ratio at theta = pi/4) = 0.
    const double q = 0.05;
    const auto f = procrustean_filter(tmsv_state(q, tmsv_cutoff(q)), 0.0, q);
    EXPECT_NEAR(f.transmission, std::cos(kPi / 4), 1e-15);
    EXPECT_LT(f.distance, 10 * q * q);
}

TEST(procrustean_filter, distance_shrinks_with_q) {
    const auto a = procrustean_filter(tmsv_state(0.05, tmsv_cutoff(0.05)), 1.0, 0.05);
    const auto b = procrustean_filter(tmsv_state(0.005, tmsv_cutoff(0.005)), 1.0, 0.005);
    EXPECT_LT(a.distance, 1e-2);
    EXPECT_LT(b.distance, 1e-4);
    EXPECT_LT(b.distance, a.distance);
    EXPECT_THROW(procrustean_filter(tmsv_state(0.05, 9), 1.0, 0.0), std::invalid_argument);
}

TEST(pauli_xy_gate, sigma_x_flips) {
    const Gate g = pauli_xy_gate(PauliKind::X);
    EXPECT_LT(g.report.residual, 1e-4);
    EXPECT_NEAR(std::abs(g.report.achieved(1, 0)), 1.0, 1e-4);
    EXPECT_NEAR(std::abs(g.report.achieved(0, 0)), 0.0, 1e-4);
    EXPECT_GT(g.report.success_probability, 0.0);
}

TEST(pauli_xy_gate, sigma_y_is_an_involution) {
    const Gate g = pauli_xy_gate(PauliKind::Y, 0.01, 4);
    EXPECT_LT(g.report.residual, 1e-4);
    const ComplexMatrix sq = g.report.achieved * g.report.achieved;
    EXPECT_LT(phase_invariant_residual(sq, ComplexMatrix::Identity(2, 2)), 1e-4);
    EXPECT_LT(phase_invariant_residual(g.report.achieved, g.report.target), 1e-4);
}

TEST(pauli_xy_gate, success_matches_direct_lift) {
    const double q = 0.01;
    const Gate g = pauli_xy_gate(PauliKind::X, q, 2);
    const ModeUnitary u = compose(g.recipe.network);
    const int c = tmsv_cutoff(q);
    const Complex lambda = u(1, 0) / (u(0, 1) * u(1, 2) + u(0, 2) * u(1, 1));
    const auto f = procrustean_filter(tmsv_state(q, c), lambda, q);
    // sum over signal outputs of |<m, 1, 0| U |s, n, n>|^2, averaged over s.
    double p = 0.0;
    for (int s = 0; s < 2; ++s) {
        for (int m = 0; m <= 2 * c + 1; ++m) {
            Complex amp{};
            for (int n = 0; n <= c; ++n) {
                const OccupationVector in{s, n, n}, out{m, 1, 0};
                if (in.total() != out.total()) continue;
                amp += f.filtered.amplitude({n, n}) * fock_lift_amplitude(u, in, out);
            }
            p += std::norm(amp) / 2.0;
        }
    }
    EXPECT_NEAR(g.report.success_probability, p, 1e-12);
    EXPECT_THROW(pauli_xy_gate(PauliKind::X, 0.2), std::invalid_argument);
}

TEST(hadamard_gate, ideal_controlled_sign_flip) {
    const Gate g = hadamard_gate();
    EXPECT_LT(g.report.residual, 1e-6);
    const ComplexVector plus = (ComplexVector(2) << 1.0, 1.0).finished() / std::sqrt(2.0);
    const ComplexVector minus = (ComplexVector(2) << 1.0, -1.0).finished() / std::sqrt(2.0);
    const ComplexVector c0 = g.report.achieved.col(0);
    const ComplexVector c1 = g.report.achieved.col(1);
    EXPECT_LE((align(c0, plus) - plus).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((align(c1, minus) - minus).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(g.report.metric("involution_error"), 2 * g.report.residual + 1e-15);
    EXPECT_NEAR(g.report.success_probability,
                g.report.metric("cz_success") * g.report.metric("projection_probability"), 1e-12);
}

TEST(hadamard_gate, optimized_controlled_sign_flip) {
    const Gate g = hadamard_gate(1, true, 20);
    EXPECT_LT(g.report.residual, 1e-6);
    EXPECT_NEAR(g.report.success_probability,
                g.report.metric("cz_success") * g.report.metric("projection_probability"), 1e-12);
    EXPECT_GT(g.recipe.network.beam_splitter_count(), 0u);
}

TEST(cnot_search, six_state_matrix_matches_lift) {
    const ComplexMatrix m = layer_basis_bs(std::polar(std::cos(0.4), 0.3), std::polar(std::sin(0.4), -1.2));
    EXPECT_LE(max_abs(m.adjoint() * m - ComplexMatrix::Identity(6, 6)), 1e-14);
    const auto r = cnot_obstruction_search(0, 0, 1);
    EXPECT_LT(r.lift_deviation, 1e-10);
}

TEST(cnot_search, small_budget_floor_and_control) {
    const auto r = cnot_obstruction_search(4, 6, 7);
    EXPECT_GT(r.min_residual, 0.01);
    EXPECT_FALSE(r.contradicts_no_go);
    EXPECT_LT(r.control_residual, 1e-8);
    EXPECT_GT(r.evaluations, 16);
}
