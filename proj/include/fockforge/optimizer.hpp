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

// Seeded multi-start Nelder-Mead search over N-mode interferometers.
//
// An N-mode template carries one rotation per pair (c, j), c < j, in
// elimination order, each [[cos t, e^{ip} sin t], [-e^{-ip} sin t, cos t]],
// followed by a diagonal phase layer; that is N(N-1)/2 angles, N(N-1)/2
// phases and N output phases, enough to reach every unitary.

#pragma once

#include "fockforge/common.hpp"
#include "fockforge/conditioning.hpp"
#include "fockforge/interferometer.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace fockforge {

class ParameterVector {
  public:
    ParameterVector() = default;
    explicit ParameterVector(int modes) : modes_(modes), values_(static_cast<std::size_t>(modes * modes), 0.0) {
        if (modes < 1) throw std::invalid_argument("template needs at least one mode");
    }
    ParameterVector(int modes, std::vector<double> values) : modes_(modes), values_(std::move(values)) {
        if (modes < 1 || values_.size() != static_cast<std::size_t>(modes * modes)) {
            throw std::invalid_argument("parameter count must be modes^2");
        }
    }

    int modes() const { return modes_; }
    std::size_t pair_count() const { return static_cast<std::size_t>(modes_ * (modes_ - 1) / 2); }
    std::size_t size() const { return values_.size(); }

    double angle(std::size_t k) const { return values_[k]; }
    double phase(std::size_t k) const { return values_[pair_count() + k]; }
    double diagonal(std::size_t m) const { return values_[2 * pair_count() + m]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Every coordinate reduced to [0, 2 pi); the unitary is unchanged.
    ParameterVector wrapped() const {
        ParameterVector out = *this;
        for (double& v : out.values_) {
            v = std::fmod(v, 2 * kPi);
            if (v < 0) v += 2 * kPi;
        }
        return out;
    }

    /// Mode pairs in template order.
    static std::vector<std::pair<int, int>> pairs(int modes) {
        std::vector<std::pair<int, int>> out;
        for (int c = 0; c < modes - 1; ++c) {
            for (int j = c + 1; j < modes; ++j) out.emplace_back(c, j);
        }
        return out;
    }

  private:
    int modes_ = 0;
    std::vector<double> values_;
};

/// Mode matrix of the template: D * B_K * ... * B_1.
inline ComplexMatrix template_matrix(const ParameterVector& p) {
    const int n = p.modes();
    ComplexMatrix m = ComplexMatrix::Identity(n, n);
    const auto pairs = ParameterVector::pairs(n);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [a, b] = pairs[k];
        const double c = std::cos(p.angle(k)), s = std::sin(p.angle(k));
        const Complex e = std::polar(1.0, p.phase(k));
        for (int col = 0; col < n; ++col) {
            const Complex x = m(a, col), y = m(b, col);
            m(a, col) = c * x + e * s * y;
            m(b, col) = -std::conj(e) * s * x + c * y;
        }
    }
    for (int r = 0; r < n; ++r) m.row(r) *= std::polar(1.0, p.diagonal(static_cast<std::size_t>(r)));
    return m;
}

inline ModeUnitary template_unitary(const ParameterVector& p) { return ModeUnitary(template_matrix(p)); }

/// Same unitary as an element list with theta in [0, pi/2]: negative cosines
/// and sines are moved into phase_t and phase_r.
inline NetworkDescription template_network(const ParameterVector& p) {
    auto wrap = [](double x) {
        x = std::fmod(x, 2 * kPi);
        return x < 0 ? x + 2 * kPi : x;
    };
    NetworkDescription net{p.modes(), {}};
    const auto pairs = ParameterVector::pairs(p.modes());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double c = std::cos(p.angle(k)), s = std::sin(p.angle(k));
        BeamSplitterParams bs{pairs[k].first, pairs[k].second, std::atan2(std::abs(s), std::abs(c)),
                              c < 0 ? kPi : 0.0, wrap(p.phase(k) + (s < 0 ? kPi : 0.0))};
        net.elements.emplace_back(bs);
    }
    for (int m = 0; m < p.modes(); ++m) {
        net.elements.emplace_back(PhaseShifterParams{m, wrap(p.diagonal(static_cast<std::size_t>(m)))});
    }
    return net;
}

/// One required column of the conditional operator. Columns share one complex
/// scale; a phase-free column shares only its magnitude.
struct TargetColumn {
    OccupationVector input;
    ComplexVector output;  // over the signal basis
    bool phase_free = false;
};

struct Objective {
    std::vector<int> signal_modes{0};
    AncillaSpec aux;
    DetectionSpec det;
    int signal_cutoff = 2;
    std::vector<TargetColumn> columns;
    double probability_weight = 1.0;  // 0 disables the second phase

    FockBasis signal_basis() const {
        return FockBasis::per_mode_max(static_cast<int>(signal_modes.size()), signal_cutoff);
    }
};

/// Single-signal-mode objective |n> -> values[n] |n>.
inline Objective diagonal_objective(AncillaSpec aux, DetectionSpec det, const std::vector<Complex>& values) {
    Objective obj;
    obj.aux = std::move(aux);
    obj.det = std::move(det);
    obj.signal_cutoff = static_cast<int>(values.size()) - 1;
    for (std::size_t n = 0; n < values.size(); ++n) {
        ComplexVector t = ComplexVector::Zero(static_cast<Eigen::Index>(values.size()));
        t[static_cast<Eigen::Index>(n)] = values[n];
        obj.columns.push_back({OccupationVector{static_cast<int>(n)}, t, false});
    }
    return obj;
}

struct Evaluation {
    double residual = 1.0;
    double probability = 0.0;      // mean squared column norm
    double min_probability = 0.0;  // worst column
    double max_probability = 0.0;
    Complex scale{};               // fitted common factor
};

/// Compiled objective: amplitude plan plus stacked targets.
class ObjectiveEvaluator {
  public:
    explicit ObjectiveEvaluator(Objective objective, int modes)
        : objective_(std::move(objective)),
          modes_(modes),
          basis_(objective_.signal_basis()),
          plan_(modes, objective_.signal_modes, objective_.aux, objective_.det, basis_, column_indices()) {
        if (objective_.columns.empty()) throw std::invalid_argument("objective needs at least one column");
        for (const auto& c : objective_.columns) {
            if (static_cast<std::size_t>(c.output.size()) != basis_.size()) {
                throw std::invalid_argument("target column length does not match the signal basis");
            }
        }
    }

    const Objective& objective() const { return objective_; }
    int modes() const { return modes_; }

    Evaluation evaluate(const ComplexMatrix& lambda) const {
        const ComplexMatrix y = plan_.evaluate(lambda);
        return score(y);
    }

    /// Residual = min over the allowed scales of |y - s t|^2 / |y|^2 (1 if y = 0).
    Evaluation score(const ComplexMatrix& y) const {
        Evaluation e;
        double y2 = 0.0, t2 = 0.0, overlap = 0.0;
        Complex shared{};
        std::vector<Complex> cols_overlap(objective_.columns.size());
        double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0, psum = 0.0;
        for (std::size_t k = 0; k < objective_.columns.size(); ++k) {
            const auto& c = objective_.columns[k];
            const auto col = y.col(static_cast<Eigen::Index>(indices_[k]));
            const double n2 = col.squaredNorm();
            psum += n2;
            pmin = std::min(pmin, n2);
            pmax = std::max(pmax, n2);
            y2 += n2;
            t2 += c.output.squaredNorm();
            const Complex ov = c.output.dot(col);  // <t, y>
            cols_overlap[k] = ov;
            if (c.phase_free) {
                overlap += std::abs(ov);
            } else {
                shared += ov;
            }
        }
        overlap += std::abs(shared);
        e.probability = psum / static_cast<double>(objective_.columns.size());
        e.min_probability = pmin;
        e.max_probability = pmax;
        if (y2 == 0.0 || t2 == 0.0) return e;
        const double s = overlap / t2;
        const Complex shared_phase = std::abs(shared) > 0 ? shared / std::abs(shared) : Complex(1.0);
        e.scale = s * shared_phase;
        double dev = 0.0;
        for (std::size_t k = 0; k < objective_.columns.size(); ++k) {
            const auto& c = objective_.columns[k];
            const Complex ph = c.phase_free
                                   ? (std::abs(cols_overlap[k]) > 0 ? cols_overlap[k] / std::abs(cols_overlap[k]) : Complex(1.0))
                                   : shared_phase;
            dev += (y.col(static_cast<Eigen::Index>(indices_[k])) - (s * ph) * c.output).squaredNorm();
        }
        e.residual = dev / y2;
        return e;
    }

  private:
    std::vector<std::size_t> column_indices() {
        const FockBasis basis = objective_.signal_basis();
        indices_.clear();
        for (const auto& c : objective_.columns) {
            auto idx = basis.index_of(c.input);
            if (!idx) throw std::invalid_argument("objective input " + c.input.to_string() + " outside the signal basis");
            indices_.push_back(*idx);
        }
        return indices_;
    }

    Objective objective_;
    int modes_;
    std::vector<std::size_t> indices_;
    FockBasis basis_;
    AmplitudePlan plan_;
};

inline double constraint_residual(const ParameterVector& params, const Objective& objective) {
    return ObjectiveEvaluator(objective, params.modes()).evaluate(template_matrix(params)).residual;
}

// ---------------------------------------------------------------------------
// Nelder-Mead

struct NelderMeadOptions {
    double initial_step = 0.1;
    double min_diameter = 1e-12;
    int max_evaluations = 20000;
    double stop_below = -std::numeric_limits<double>::infinity();  // early exit on this value
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

/// Standard coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, const NelderMeadOptions& opt = {}) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opt.initial_step;
    std::vector<double> values(n + 1);
    int evals = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = f(simplex[i]);
        ++evals;
    }
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    auto point = [&](double t, const std::vector<double>& worst, std::vector<double>& out) {
        for (std::size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
    };
    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        {
            std::vector<std::vector<double>> s2;
            std::vector<double> v2;
            for (std::size_t i : order) {
                s2.push_back(std::move(simplex[i]));
                v2.push_back(values[i]);
            }
            simplex = std::move(s2);
            values = std::move(v2);
        }
        double diameter = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[0][k]));
        }
        if (diameter < opt.min_diameter || evals >= opt.max_evaluations || values[0] < opt.stop_below) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
        }
        const auto& worst = simplex[n];
        point(-1.0, worst, trial);
        const double fr = f(trial);
        ++evals;
        if (fr < values[0]) {
            point(-2.0, worst, trial2);
            const double fe = f(trial2);
            ++evals;
            if (fe < fr) {
                simplex[n] = trial2;
                values[n] = fe;
            } else {
                simplex[n] = trial;
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = trial;
            values[n] = fr;
        } else {
            const bool outside = fr < values[n];
            point(outside ? -0.5 : 0.5, worst, trial2);
            const double fc = f(trial2);
            ++evals;
            if (fc < (outside ? fr : values[n])) {
                simplex[n] = trial2;
                values[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                    values[i] = f(simplex[i]);
                    ++evals;
                }
            }
        }
    }
    return {simplex[0], values[0], evals};
}

// ---------------------------------------------------------------------------
// Multi-start search

struct OptimizerOptions {
    NelderMeadOptions local{};
    double feasibility_tolerance = 1e-10;  // phase-1 target and ranking threshold
    double infeasible_above = 1e-6;        // best residual above this is a failure
    double penalty = 1e8;
};

struct OptimizationResult {
    ParameterVector params;
    ComplexMatrix lambda;
    double residual = 1.0;
    double probability = 0.0;
    double min_probability = 0.0;
    double max_probability = 0.0;
    Complex scale{};
    int restart = -1;
    int evaluations = 0;        // spent by the winning restart
    int total_evaluations = 0;  // over all restarts
    int feasible_restarts = 0;
    bool feasible = false;
};

namespace detail {

// Feasible results first, by probability; infeasible ones by residual; ties to
// the lower restart index.
inline bool better(const OptimizationResult& a, const OptimizationResult& b, double tol) {
    const bool fa = a.residual < tol, fb = b.residual < tol;
    if (fa != fb) return fa;
    if (fa) {
        if (a.probability != b.probability) return a.probability > b.probability;
    } else if (a.residual != b.residual) {
        return a.residual < b.residual;
    }
    return a.restart < b.restart;
}

}  // namespace detail

/// One seeded restart: feasibility search, then probability maximization with
/// the residual penalized, then a feasibility polish from that point.
inline OptimizationResult optimize_restart(const ObjectiveEvaluator& eval, int modes, std::uint64_t seed,
                                           const OptimizerOptions& opt = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 2 * kPi);
    std::vector<double> x0(static_cast<std::size_t>(modes * modes));
    for (double& v : x0) v = uniform(rng);

    auto residual_of = [&](const std::vector<double>& x) {
        return eval.evaluate(template_matrix(ParameterVector(modes, x))).residual;
    };
    NelderMeadOptions phase1 = opt.local;
    phase1.stop_below = opt.feasibility_tolerance * 1e-4;
    auto r1 = nelder_mead(residual_of, x0, phase1);
    int evals = r1.evaluations;
    std::vector<double> best = r1.x;

    if (eval.objective().probability_weight > 0.0 && r1.value < opt.feasibility_tolerance) {
        const double w = eval.objective().probability_weight;
        auto penalized = [&](const std::vector<double>& x) {
            const Evaluation e = eval.evaluate(template_matrix(ParameterVector(modes, x)));
            return -w * e.probability + opt.penalty * e.residual;
        };
        auto r2 = nelder_mead(penalized, r1.x, opt.local);
        evals += r2.evaluations;
        auto r3 = nelder_mead(residual_of, r2.x, phase1);
        evals += r3.evaluations;
        if (r3.value < opt.feasibility_tolerance) best = r3.x;
    }

    OptimizationResult out;
    out.params = ParameterVector(modes, best).wrapped();
    out.lambda = template_matrix(out.params);
    const Evaluation e = eval.evaluate(out.lambda);
    out.residual = e.residual;
    out.probability = e.probability;
    out.min_probability = e.min_probability;
    out.max_probability = e.max_probability;
    out.scale = e.scale;
    out.evaluations = evals;
    out.feasible = e.residual < opt.feasibility_tolerance;
    return out;
}

/// Deterministic in (objective, seed, restarts) regardless of worker count.
/// An infeasible best result is returned with feasible = false.
inline OptimizationResult optimize_gate(const Objective& objective, int template_modes, std::uint64_t seed,
                                        int restarts, const OptimizerOptions& opt = {}) {
    if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
    const ObjectiveEvaluator eval(objective, template_modes);
    std::vector<OptimizationResult> runs(static_cast<std::size_t>(restarts));
    parallel_for(runs.size(), [&](std::size_t i) {
        runs[i] = optimize_restart(eval, template_modes, derive_seed(seed, i), opt);
        runs[i].restart = static_cast<int>(i);
    });
    OptimizationResult best = runs[0];
    int total = 0, feasible = 0;
    for (const auto& r : runs) {
        total += r.evaluations;
        feasible += r.residual < opt.feasibility_tolerance ? 1 : 0;
        if (detail::better(r, best, opt.feasibility_tolerance)) best = r;
    }
    best.total_evaluations = total;
    best.feasible_restarts = feasible;
    best.feasible = best.residual < opt.infeasible_above;
    return best;
}

}  // namespace fockforge
