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

#include "fockforge/fock.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fockforge;

namespace {

ComplexMatrix ladder_matrix(LadderKind kind, const FockBasis& basis, int mode) {
    const auto dim = static_cast<Eigen::Index>(basis.size());
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    for (std::size_t c = 0; c < basis.size(); ++c) {
        const auto& occ = basis[c];
        const int n = occ[static_cast<std::size_t>(mode)];
        auto counts = occ.counts();
        if (kind == LadderKind::Create) {
            counts[static_cast<std::size_t>(mode)] += 1;
            if (auto r = basis.index_of(OccupationVector(counts))) m(static_cast<Eigen::Index>(*r), static_cast<Eigen::Index>(c)) = std::sqrt(n + 1.0);
        } else if (n > 0) {
            counts[static_cast<std::size_t>(mode)] -= 1;
            m(static_cast<Eigen::Index>(*basis.index_of(OccupationVector(counts))), static_cast<Eigen::Index>(c)) = std::sqrt(static_cast<double>(n));
        }
    }
    return m;
}

PureState random_state(const FockBasis& basis, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexVector v(static_cast<Eigen::Index>(basis.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = g(rng), im = g(rng);
        v[i] = {re, im};
    }
    return PureState(basis, v / v.norm());
}

}  // namespace

TEST(fock_basis, ordering_is_by_total_then_lexicographic) {
    const auto b = FockBasis::per_mode_max(2, 2);
    ASSERT_EQ(b.size(), 9u);
    EXPECT_EQ(b[0], (OccupationVector{0, 0}));
    EXPECT_EQ(b[1], (OccupationVector{0, 1}));
    EXPECT_EQ(b[2], (OccupationVector{1, 0}));
    EXPECT_EQ(b[3], (OccupationVector{0, 2}));
    EXPECT_EQ(b[4], (OccupationVector{1, 1}));
    EXPECT_EQ(b[5], (OccupationVector{2, 0}));
    EXPECT_EQ(b[8], (OccupationVector{2, 2}));
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(*b.index_of(b[i]), i);
}

TEST(fock_basis, fixed_total_sector_size) {
    const auto b = FockBasis::fixed_total(3, 4);
    EXPECT_EQ(b.size(), 15u);  // C(6, 2)
    for (const auto& o : b.states()) EXPECT_EQ(o.total(), 4);
    EXPECT_FALSE(b.contains(OccupationVector{1, 1, 1}));
}

TEST(fock_basis, rejects_negative_counts) {
    EXPECT_THROW(OccupationVector({1, -1}), std::invalid_argument);
}

TEST(ladder, create_annihilate_number_examples) {
    const auto b = FockBasis::per_mode_max(1, 4);
    auto one = apply_ladder(LadderKind::Create, 0, basis_state(b, {0}));
    EXPECT_EQ(one.amplitude({1}), Complex(1.0));
    EXPECT_DOUBLE_EQ(one.norm_squared(), 1.0);

    auto zero = apply_ladder(LadderKind::Annihilate, 0, basis_state(b, {0}));
    EXPECT_EQ(zero.norm_squared(), 0.0);

    auto three = apply_ladder(LadderKind::Number, 0, basis_state(b, {3}));
    EXPECT_EQ(three.amplitude({3}), Complex(3.0));
}

TEST(ladder, creation_beyond_cutoff_throws) {
    const auto b = FockBasis::per_mode_max(2, 2);
    EXPECT_THROW(apply_ladder(LadderKind::Create, 1, basis_state(b, {0, 2})), CutoffOverflow);
    EXPECT_THROW(apply_ladder(LadderKind::Create, 2, basis_state(b, {0, 0})), std::out_of_range);
}

TEST(ladder, fixed_total_shifts_sector) {
    const auto b = FockBasis::fixed_total(2, 1);
    auto s = apply_ladder(LadderKind::Create, 0, basis_state(b, {1, 0}));
    EXPECT_EQ(s.basis.cutoff(), 2);
    EXPECT_NEAR(std::abs(s.amplitude({2, 0}) - std::sqrt(2.0)), 0.0, 1e-15);
}

TEST(ladder, repeated_creation_gives_sqrt_factorial) {
    const int cutoff = 8;
    const auto b = FockBasis::per_mode_max(1, cutoff);
    PureState s = basis_state(b, {0});
    for (int p = 1; p <= cutoff; ++p) {
        s = apply_ladder(LadderKind::Create, 0, s);
        EXPECT_NEAR(std::abs(s.amplitude({p}) - std::sqrt(factorial(p))), 0.0, 1e-12 * std::sqrt(factorial(p)));
        EXPECT_NEAR(s.norm_squared(), factorial(p), 1e-9 * factorial(p));
    }
}

TEST(ladder, commutator_is_identity_on_interior) {
    const auto b = FockBasis::per_mode_max(2, 4);
    for (int mode = 0; mode < 2; ++mode) {
        const ComplexMatrix a = ladder_matrix(LadderKind::Annihilate, b, mode);
        const ComplexMatrix ad = ladder_matrix(LadderKind::Create, b, mode);
        const ComplexMatrix comm = a * ad - ad * a;
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (b[i][static_cast<std::size_t>(mode)] >= b.cutoff()) continue;
            for (std::size_t j = 0; j < b.size(); ++j) {
                if (b[j][static_cast<std::size_t>(mode)] >= b.cutoff()) continue;
                const Complex expect = i == j ? 1.0 : 0.0;
                EXPECT_NEAR(std::abs(comm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - expect), 0.0, 1e-14);
            }
        }
    }
}

TEST(number_polynomial, examples) {
    const auto b = FockBasis::per_mode_max(1, 4);
    const auto id = number_polynomial({1.0, 0.0, 0.0}, 0, b);
    EXPECT_EQ(max_abs(id.matrix - ComplexMatrix::Identity(5, 5)), 0.0);

    const auto kill = number_polynomial({1.0, -1.5, 0.5}, 0, b);
    EXPECT_EQ(kill.element({2}, {2}), Complex(0.0));

    const auto swap_poly = number_polynomial({1.0, -4.0, 2.0}, 0, b);
    for (int n = 0; n <= 2; ++n) EXPECT_EQ(swap_poly.element({n}, {n}), Complex(n % 2 ? -1.0 : 1.0));
}

TEST(number_polynomial, acts_only_on_its_mode_and_commutes_with_diagonals) {
    const auto b = FockBasis::per_mode_max(2, 3);
    const auto p = number_polynomial({Complex(0.3, 0.1), Complex(-1.0, 2.0), 0.25}, 1, b);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    ComplexMatrix d = ComplexMatrix::Zero(16, 16);
    for (int i = 0; i < 16; ++i) {
        const double re = u(rng), im = u(rng);
        d(i, i) = {re, im};
    }
    EXPECT_LE(max_abs(p.matrix * d - d * p.matrix), 1e-14);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double n = b[i][1];
        const Complex expect = Complex(0.3, 0.1) + Complex(-1.0, 2.0) * n + 0.25 * n * n;
        EXPECT_NEAR(std::abs(p.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) - expect), 0.0, 1e-14);
    }
}

TEST(displacement, zero_amplitude_is_identity) {
    const auto d = displacement_operator(0.0, 6);
    EXPECT_EQ(max_abs(d.matrix - ComplexMatrix::Identity(7, 7)), 0.0);
}

TEST(displacement, vacuum_overlap_matches_closed_form) {
    const auto d = displacement_operator(0.5, 16);
    EXPECT_NEAR(std::abs(d.matrix(0, 0) - std::exp(-0.125)), 0.0, 1e-15);
    // Coherent-state column: <n|alpha> = e^{-|a|^2/2} a^n / sqrt(n!).
    const Complex alpha(0.3, -0.4);
    const auto dc = displacement_operator(alpha, 18);
    for (int n = 0; n <= 18; ++n) {
        const Complex expect = std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) / std::sqrt(factorial(n));
        EXPECT_NEAR(std::abs(dc.matrix(n, 0) - expect), 0.0, 1e-15);
    }
}

TEST(displacement, roundtrip_on_guarded_block) {
    for (Complex alpha : {Complex(0.05, 0.0), Complex(0.5, 0.0), Complex(-0.7, 0.9), Complex(1.2, 0.3)}) {
        const int cutoff = 30;
        const int guard = displacement_guard_band(alpha, cutoff);
        ASSERT_GE(guard, 4);
        ASSERT_LT(guard, cutoff) << alpha;
        const int block = cutoff - guard;
        const ComplexMatrix prod =
            displacement_operator(alpha, cutoff).matrix * displacement_operator(-alpha, cutoff).matrix;
        EXPECT_LE(max_abs(prod.topLeftCorner(block, block) - ComplexMatrix::Identity(block, block)), 1e-8) << alpha;
    }
    // Small amplitudes keep the minimum band.
    EXPECT_EQ(displacement_guard_band(1e-4, 30), 4);
}

TEST(displacement, rejects_too_small_cutoff) {
    EXPECT_THROW(displacement_operator(3.0, 6), std::invalid_argument);
    EXPECT_THROW(displacement_operator(0.1, 0), std::invalid_argument);
}

TEST(tensor_product, examples) {
    const auto b1 = FockBasis::per_mode_max(1, 2);
    const auto id = FockOperator::identity(b1);
    const auto idid = tensor_product(id, id);
    EXPECT_EQ(max_abs(idid.matrix - ComplexMatrix::Identity(9, 9)), 0.0);

    const auto s = tensor_product(basis_state(b1, {1}), basis_state(b1, {0}));
    EXPECT_EQ(s.amplitude({1, 0}), Complex(1.0));
    EXPECT_EQ(s.norm_squared(), 1.0);

    const auto n = number_polynomial({0.0, 1.0}, 0, b1);
    const auto nn = tensor_product(n, n);
    const auto out = apply(nn, basis_state(nn.basis, {1, 1}));
    EXPECT_EQ(out.amplitude({1, 1}), Complex(1.0));
    EXPECT_NEAR(out.norm_squared(), 1.0, 0.0);
}

TEST(tensor_product, rejects_policy_mismatch) {
    const auto a = basis_state(FockBasis::per_mode_max(1, 2), {1});
    const auto b = basis_state(FockBasis::fixed_total(1, 1), {1});
    const auto c = basis_state(FockBasis::per_mode_max(1, 3), {1});
    EXPECT_THROW(tensor_product(a, b), std::invalid_argument);
    EXPECT_THROW(tensor_product(a, c), std::invalid_argument);
}

TEST(partial_trace, examples) {
    const auto b2 = FockBasis::per_mode_max(2, 1);
    const auto vac = partial_trace(to_density(basis_state(b2, {0, 0})), {0});
    EXPECT_EQ(vac.matrix(0, 0), Complex(1.0));
    EXPECT_EQ(vac.matrix(1, 1), Complex(0.0));

    ComplexVector bell = ComplexVector::Zero(4);
    bell[*b2.index_of({0, 0})] = 1.0 / std::sqrt(2.0);
    bell[*b2.index_of({1, 1})] = 1.0 / std::sqrt(2.0);
    const auto red = partial_trace(to_density(PureState(b2, bell)), {0});
    EXPECT_NEAR(std::abs(red.matrix(0, 0) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(red.matrix(1, 1) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(red.matrix(0, 1)), 0.0, 1e-15);

    EXPECT_THROW(partial_trace(to_density(PureState(b2, bell)), {}), std::invalid_argument);
}

TEST(partial_trace, product_state_roundtrip) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto b1 = FockBasis::per_mode_max(1, 3);
        const auto b2 = FockBasis::per_mode_max(2, 3);
        const auto x = random_state(b1, rng);
        const auto y = random_state(b2, rng);
        const auto rho = tensor_product(to_density(x), to_density(y));
        const auto first = partial_trace(rho, {0});
        EXPECT_LE(max_abs(first.matrix - to_density(x).matrix), 1e-14);
        const auto rest = partial_trace(rho, {1, 2});
        EXPECT_LE(max_abs(rest.matrix - to_density(y).matrix), 1e-14);
    }
}

TEST(partial_trace, preserves_trace_and_hermiticity) {
    std::mt19937_64 rng(5);
    const auto b = FockBasis::per_mode_max(3, 2);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_state(b, rng);
        const auto c = random_state(b, rng);
        const MixedState rho(b, 0.3 * to_density(a).matrix + 0.7 * to_density(c).matrix);
        for (std::vector<int> keep : {std::vector<int>{0}, {1, 2}, {0, 2}}) {
            const auto red = partial_trace(rho, keep);
            EXPECT_NEAR(red.trace(), rho.trace(), 1e-12);
            EXPECT_LE(max_abs(red.matrix - red.matrix.adjoint()), 1e-12);
        }
    }
}

TEST(mixed_state, rejects_invalid_matrices) {
    const auto b = FockBasis::per_mode_max(1, 1);
    ComplexMatrix m(2, 2);
    m << 0.5, Complex(0.0, 0.2), 0.0, 0.5;
    EXPECT_THROW(MixedState(b, m), std::invalid_argument);
    m << 0.7, 0.0, 0.0, 0.7;
    EXPECT_THROW(MixedState(b, m), std::invalid_argument);
    m << 1.0, 0.0, 0.0, -0.1;
    EXPECT_THROW(MixedState(b, m), std::invalid_argument);
}

TEST(pure_state, normalization_is_explicit) {
    const auto b = FockBasis::per_mode_max(1, 2);
    ComplexVector v(3);
    v << 0.3, 0.4, 0.0;
    const PureState sub(b, v);
    EXPECT_NEAR(sub.norm_squared(), 0.25, 1e-15);
    EXPECT_NEAR(normalized(sub).norm_squared(), 1.0, 1e-15);
    EXPECT_THROW(normalized(PureState(b, ComplexVector::Zero(3))), NumericError);
}
