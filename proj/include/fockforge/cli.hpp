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

// Command-line front end. Every subcommand writes TSV: the record type in the
// first column, numbers with 12 significant digits, LF line endings.
//
// Exit codes: 0 success, 2 bad input, 3 infeasible optimization, 4 numeric
// failure.

#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "fockforge/circuit.hpp"
#include "fockforge/common.hpp"
#include "fockforge/conditioning.hpp"
#include "fockforge/gates.hpp"
#include "fockforge/lossy.hpp"
#include "fockforge/optimizer.hpp"
#include "fockforge/permanent.hpp"

namespace fockforge {

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitInfeasible = 3, kExitNumeric = 4 };

struct RunConfig {
    int cutoff = -1;  // -1: derived from the inputs
    std::uint64_t seed = 1;
    double tolerance = 1e-12;
    int restarts = -1;  // -1: command default
};

namespace cli {

class Tsv {
public:
    Tsv(std::ostream& out, double tolerance) : out_(out), tol_(tolerance) {}

    std::string num(double x) const {
        if (std::abs(x) < tol_) return "0";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        return buf;
    }
    std::string num(int x) const { return std::to_string(x); }
    std::string num(long x) const { return std::to_string(x); }
    std::string num(std::uint64_t x) const { return std::to_string(x); }
    std::string num(const std::string& s) const { return s; }
    std::string num(const char* s) const { return s; }

    template <class... Fields>
    void row(const std::string& kind, const Fields&... f) {
        out_ << kind;
        ((out_ << '\t' << num(f)), ...);
        out_ << '\n';
    }
    void complex_row(const std::string& kind, const std::vector<std::string>& keys, Complex z) {
        out_ << kind;
        for (const auto& k : keys) out_ << '\t' << k;
        out_ << '\t' << num(z.real()) << '\t' << num(z.imag()) << '\n';
    }
    bool negligible(Complex z) const { return std::abs(z) < tol_; }

private:
    std::ostream& out_;
    double tol_;
};

inline std::string occupation(const OccupationVector& o) {
    if (o.size() == 0) return "-";
    std::string s;
    for (std::size_t m = 0; m < o.size(); ++m) s += (m ? "," : "") + std::to_string(o[m]);
    return s;
}

inline std::vector<int> int_list(const std::string& text) {
    std::vector<int> v;
    if (text.empty()) return v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int x = 0;
        const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
        if (ec != std::errc() || p != item.data() + item.size()) {
            throw std::invalid_argument("expected a comma-separated integer list, got '" + text + "'");
        }
        v.push_back(x);
    }
    return v;
}

inline Complex complex_arg(const std::string& text) {
    const auto comma = text.find(',');
    auto real = [&](const std::string& s) {
        detail::Token t{s, 1};
        try {
            return detail::parse_real(t, 1);
        } catch (const ParseError&) {
            throw std::invalid_argument("expected RE or RE,IM, got '" + text + "'");
        }
    };
    if (comma == std::string::npos) return real(text);
    return {real(text.substr(0, comma)), real(text.substr(comma + 1))};
}

inline std::string slurp(const std::string& path, std::istream& in) {
    if (path.empty() || path == "-") return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

/// Whitespace-separated matrix, one row per line, entries RE or RE,IM.
inline ComplexMatrix parse_matrix(const std::string& text) {
    std::vector<std::vector<Complex>> rows;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line = std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto tok = detail::tokenize(line);
        if (tok.empty()) continue;
        std::vector<Complex> row;
        for (const auto& t : tok) {
            const auto comma = t.text.find(',');
            if (comma == std::string_view::npos) {
                row.emplace_back(detail::parse_real(t, line_no), 0.0);
            } else {
                const detail::Token re{t.text.substr(0, comma), t.column};
                const detail::Token im{t.text.substr(comma + 1), t.column + static_cast<int>(comma) + 1};
                row.emplace_back(detail::parse_real(re, line_no), detail::parse_real(im, line_no));
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError(line_no, 1, "row has " + std::to_string(row.size()) + " entries, expected " +
                                             std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(line_no, 1, "empty matrix");
    if (rows.size() != rows.front().size()) throw ParseError(line_no, 1, "matrix is not square");
    const auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    return m;
}

inline int default_cutoff(const CircuitFile& c, const RunConfig& cfg) {
    const int declared = c.declared_photons();
    if (cfg.cutoff < 0) return std::max(2, declared);
    if (cfg.cutoff < declared) {
        throw std::invalid_argument("cutoff " + std::to_string(cfg.cutoff) + " is below the " +
                                    std::to_string(declared) + " declared input photons");
    }
    return cfg.cutoff;
}

// ---------------------------------------------------------------------------
// Subcommands

inline void run_simulate(const CircuitFile& c, const RunConfig& cfg, Tsv& t) {
    const SimulationResult r = simulate_circuit(c, default_cutoff(c, cfg));
    t.row("modes", r.remaining_modes);
    t.row("kind", r.pure ? "pure" : "mixed");
    const auto dim = static_cast<Eigen::Index>(r.states.size());
    if (r.pure) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (t.negligible(r.amplitudes[i])) continue;
            t.complex_row("amplitude", {occupation(r.states[static_cast<std::size_t>(i)])}, r.amplitudes[i]);
        }
    } else {
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                if (t.negligible(r.density(i, j))) continue;
                t.complex_row("density",
                              {occupation(r.states[static_cast<std::size_t>(i)]), occupation(r.states[static_cast<std::size_t>(j)])},
                              r.density(i, j));
            }
        }
    }
    t.row("success_probability", r.probability);
}

inline void run_condition(const CircuitFile& c, const RunConfig& cfg, Tsv& t) {
    if (c.lossy() || !c.ideal_detection()) {
        throw std::invalid_argument("condition needs a lossless circuit with ideal detectors; use simulate");
    }
    std::vector<int> photons(static_cast<std::size_t>(c.modes), 0);
    for (const auto& in : c.inputs) {
        if (in.kind != InputSpec::Kind::Fock) throw std::invalid_argument("condition accepts Fock inputs only");
        photons[static_cast<std::size_t>(in.mode)] = in.photons;
    }
    std::vector<int> detected(static_cast<std::size_t>(c.modes), -1);
    for (const auto& d : c.detections) detected[static_cast<std::size_t>(d.mode)] = d.photons;
    std::vector<int> signal, aux, det, reference;
    for (int m = 0; m < c.modes; ++m) {
        const auto k = static_cast<std::size_t>(m);
        if (detected[k] < 0) {
            signal.push_back(m);
            reference.push_back(photons[k]);
        } else {
            aux.push_back(photons[k]);
            det.push_back(detected[k]);
        }
    }
    if (signal.empty()) throw std::invalid_argument("every mode is detected; nothing to condition");
    const OccupationVector a(aux), d(det), ref(reference);
    int cutoff = cfg.cutoff;
    if (cutoff < 0) cutoff = std::max({2, ref.total(), std::abs(a.total() - d.total())});
    if (*std::max_element(reference.begin(), reference.end()) > cutoff) {
        throw std::invalid_argument("cutoff is below the reference input");
    }
    const ConditionalOperator y = extract_conditional_operator(compose(c.network()), signal, a, d, cutoff);
    const FockBasis& b = y.basis();
    for (std::size_t r = 0; r < b.size(); ++r) {
        for (std::size_t col = 0; col < b.size(); ++col) {
            const Complex z = y.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col));
            if (t.negligible(z)) continue;
            t.complex_row("entry", {occupation(b[r]), occupation(b[col])}, z);
        }
    }
    const auto col = static_cast<Eigen::Index>(*b.index_of(ref));
    t.row("reference", occupation(ref));
    t.row("success_probability", y.matrix().col(col).squaredNorm());
}

struct GateOptions {
    std::string name;
    double phi = kPi;
    double phi2 = 0.0;
    std::string variant = "four-photon";
    double q = kDefaultPauliQ;
    bool emit_circuit = false;
};

inline void emit_gate(const std::string& name, const Gate& g, Tsv& t) {
    t.row("gate", name);
    t.row("description", g.recipe.description);
    t.row("residual", g.report.residual);
    t.row("success_probability", g.report.success_probability);
    for (const auto& [k, v] : g.report.metrics) t.row("metric", k, v);
    const ComplexMatrix& a = g.report.achieved;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) t.complex_row("achieved", {std::to_string(r), std::to_string(c)}, a(r, c));
    }
}

inline void run_gate(const GateOptions& o, const RunConfig& cfg, std::ostream& out, Tsv& t) {
    const int restarts = cfg.restarts > 0 ? cfg.restarts : kDefaultGateRestarts;
    auto recipe_gate = [&]() -> std::optional<Gate> {
        if (o.name == "nss") return nss_gate_klm(cfg.seed, restarts);
        if (o.name == "su3") return su3_phase_gate(o.phi, o.phi2, cfg.seed, restarts);
        if (o.name == "swap") return swap_gate();
        if (o.name == "cphase") {
            if (o.variant != "four-photon" && o.variant != "vacuum") throw std::invalid_argument("unknown variant " + o.variant);
            return cphase_gate(o.phi, o.variant == "vacuum" ? CPhaseVariant::VacuumDetector : CPhaseVariant::FourPhoton,
                               cfg.seed, restarts);
        }
        return std::nullopt;
    };
    if (auto g = recipe_gate()) {
        if (o.emit_circuit) {
            const auto& r = g->recipe;
            out << "# " << r.description << '\n';
            out << serialize_circuit(circuit_from_recipe(r.network, r.signal_modes, r.aux, r.det));
        } else {
            emit_gate(o.name, *g, t);
        }
        return;
    }
    if (o.emit_circuit) throw std::invalid_argument("--emit-circuit needs a recipe with Fock ancillas: nss, su3, cphase or swap");
    if (o.name == "pauli-x" || o.name == "pauli-y") {
        emit_gate(o.name, pauli_xy_gate(o.name == "pauli-x" ? PauliKind::X : PauliKind::Y, o.q, cfg.seed), t);
    } else if (o.name == "hadamard") {
        emit_gate(o.name, hadamard_gate(cfg.seed), t);
    } else if (o.name == "ralph") {
        const RalphReport r = ralph_cz_check(cfg.seed, restarts);
        t.row("gate", o.name);
        t.row("lambda11_analytic", r.lambda11_analytic);
        t.row("lambda11_optimized", r.lambda11_optimized.real(), r.lambda11_optimized.imag());
        t.row("max_lambda22_squared", r.max_lambda22_squared);
        t.row("constraint_per33", r.constraint_per33);
        t.row("constraint_second", r.constraint_second);
        t.row("residual", r.optimum.residual);
        t.row("success_probability", r.optimum.probability);
    } else if (o.name == "kill") {
        const int cutoff = cfg.cutoff < 0 ? 4 : cfg.cutoff;
        const FockOperator k = kill_operator(cutoff);
        t.row("gate", o.name);
        for (int n = 0; n <= cutoff; ++n) t.row("diagonal", n, k.matrix(n, n).real());
    } else if (o.name == "cnot-search") {
        const CnotSearchReport r = cnot_obstruction_search(8, cfg.restarts > 0 ? cfg.restarts : 200, cfg.seed);
        t.row("gate", o.name);
        t.row("lift_deviation", r.lift_deviation);
        t.row("min_residual", r.min_residual);
        t.row("best_phi", r.best_phi);
        t.row("best_phi_prime", r.best_phi_prime);
        t.row("control_residual", r.control_residual);
        t.row("restarts", r.restarts);
        t.row("grid_size", r.grid_size);
        t.row("evaluations", r.evaluations);
        t.row("contradicts_no_go", r.contradicts_no_go ? 1 : 0);
    } else {
        throw std::invalid_argument("unknown gate '" + o.name + "'");
    }
}

struct OptimizeOptions {
    std::string target = "nss";
    double phi = kPi;
    double phi2 = 0.0;
    std::string aux;
    std::string det;
};

/// Returns false when no restart is feasible.
inline bool run_optimize(const OptimizeOptions& o, const RunConfig& cfg, Tsv& t) {
    std::vector<Complex> values;
    OccupationVector aux, det;
    if (o.target == "nss") {
        values = {1.0, 1.0, -1.0};
        aux = det = OccupationVector{1, 0};
    } else if (o.target == "su3") {
        values = {1.0, std::polar(1.0, o.phi), std::polar(1.0, o.phi2)};
        aux = det = OccupationVector{1, 1};
    } else if (o.target == "identity") {
        values = {1.0, 1.0, 1.0};
        aux = det = OccupationVector{1, 1};
    } else {
        throw std::invalid_argument("unknown target '" + o.target + "'");
    }
    if (!o.aux.empty()) aux = OccupationVector(int_list(o.aux));
    if (!o.det.empty()) det = OccupationVector(int_list(o.det));
    if (aux.size() != det.size()) throw std::invalid_argument("--aux and --det need the same length");
    const int modes = 1 + static_cast<int>(aux.size());
    const auto r = optimize_gate(diagonal_objective(aux, det, values), modes, cfg.seed,
                                 cfg.restarts > 0 ? cfg.restarts : kDefaultGateRestarts);
    t.row("target", o.target);
    t.row("feasible", r.feasible ? 1 : 0);
    t.row("residual", r.residual);
    t.row("success_probability", r.probability);
    t.row("restart", r.restart);
    t.row("evaluations", r.evaluations);
    t.row("total_evaluations", r.total_evaluations);
    t.row("feasible_restarts", r.feasible_restarts);
    for (Eigen::Index i = 0; i < r.lambda.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.lambda.cols(); ++j) {
            t.complex_row("lambda", {std::to_string(i), std::to_string(j)}, r.lambda(i, j));
        }
    }
    return r.feasible;
}

struct LossOptions {
    double absorption = 0.0;
    double eta = 1.0;
    std::string c0 = "0.6";
    std::string c1 = "0.8";
    std::string transmission = "closed-form";
};

/// Coefficients carry the detector efficiency: wanted eta |T22|^2, detector
/// eta times the no-absorption two-photon term, absorption eta times the
/// one-absorbed term, each per unit input weight.
inline void run_loss(const LossOptions& o, Tsv& t) {
    Complex c0 = complex_arg(o.c0), c1 = complex_arg(o.c1);
    const double norm = std::sqrt(std::norm(c0) + std::norm(c1));
    if (!(norm > 0.0)) throw std::invalid_argument("c0 and c1 cannot both vanish");
    c0 /= norm;
    c1 /= norm;
    SigmaZTransmission choice;
    if (o.transmission == "closed-form") choice = SigmaZTransmission::ClosedForm;
    else if (o.transmission == "exact") choice = SigmaZTransmission::Exact;
    else throw std::invalid_argument("transmission must be closed-form or exact");
    const NoisySigmaZReport r = noisy_sigma_z_experiment(o.absorption, o.eta, c0, c1, choice);
    t.row("absorption", r.abs_a);
    t.row("eta", r.eta);
    t.row("transmission", r.transmission);
    t.row("coefficients", r.eta * r.transmission * r.transmission, r.eta * r.detector_coefficient,
          r.eta * r.absorption_coefficient);
    t.row("closed_forms", r.closed_form_wanted, r.eta * r.closed_form_detector, r.eta * r.closed_form_absorption);
    t.row("sigma_z_condition_residual", r.sigma_z_condition_residual);
    t.row("sigma_z_fidelity", r.sigma_z_fidelity);
    t.row("decomposition_error", r.decomposition_error);
    t.row("channel_trace_error", r.channel_trace_error);
    t.row("success_probability", r.success_probability);
    const ComplexMatrix& rho = r.conditioned.matrix;
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) t.complex_row("rho", {std::to_string(i), std::to_string(j)}, rho(i, j));
    }
}

}  // namespace cli

/// Exit code for an exception escaping a subcommand.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return kExitInput;
    if (dynamic_cast<const InfeasibleError*>(&e)) return kExitInfeasible;
    if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
    if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e)) return kExitInput;
    return kExitNumeric;
}

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"FockForge: linear-optics conditional gates in truncated Fock space", "fockforge"};
    app.fallthrough();
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_option("--cutoff", cfg.cutoff, "Fock cutoff (default derived from the inputs)");
    app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    app.add_option("--tolerance", cfg.tolerance, "Magnitudes below this print as 0")->capture_default_str();
    app.add_option("--restarts", cfg.restarts, "Optimizer restarts (default per command)");

    std::string circuit_path;
    auto* simulate = app.add_subcommand("simulate", "Run a circuit file and print the heralded output state");
    simulate->add_option("circuit", circuit_path, "Circuit file (default standard input)");
    auto* condition = app.add_subcommand("condition", "Conditional operator on the undetected modes");
    condition->add_option("circuit", circuit_path, "Circuit file (default standard input)");

    cli::GateOptions gate_opt;
    auto* gate = app.add_subcommand("gate", "Named gate recipes");
    gate->add_option("--name", gate_opt.name, "nss, su3, cphase, ralph, swap, kill, pauli-x, pauli-y, hadamard, cnot-search")
        ->required();
    gate->add_option("--phi", gate_opt.phi, "Phase (su3 first phase, cphase phase)")->capture_default_str();
    gate->add_option("--phi2", gate_opt.phi2, "Second su3 phase")->capture_default_str();
    gate->add_option("--variant", gate_opt.variant, "cphase network: four-photon or vacuum")->capture_default_str();
    gate->add_option("--q", gate_opt.q, "TMSV squeezing for pauli-x, pauli-y")->capture_default_str();
    gate->add_flag("--emit-circuit", gate_opt.emit_circuit, "Print the recipe as a circuit file");

    cli::OptimizeOptions opt_opt;
    auto* optimize = app.add_subcommand("optimize", "Multistart search for a diagonal single-mode gate");
    optimize->add_option("--target", opt_opt.target, "nss, su3 or identity")->capture_default_str();
    optimize->add_option("--phi", opt_opt.phi, "First su3 phase")->capture_default_str();
    optimize->add_option("--phi2", opt_opt.phi2, "Second su3 phase")->capture_default_str();
    optimize->add_option("--aux", opt_opt.aux, "Ancilla photons, e.g. 1,0");
    optimize->add_option("--det", opt_opt.det, "Detected photons, e.g. 1,0");

    cli::LossOptions loss_opt;
    auto* loss = app.add_subcommand("loss", "Sign flip through an absorbing splitter and an inefficient detector");
    loss->add_option("--absorption", loss_opt.absorption, "|A| of the slab, in [0, 1)")->capture_default_str();
    loss->add_option("--eta", loss_opt.eta, "Detector efficiency, in (0, 1]")->capture_default_str();
    loss->add_option("--c0", loss_opt.c0, "Vacuum amplitude RE[,IM]")->capture_default_str();
    loss->add_option("--c1", loss_opt.c1, "One-photon amplitude RE[,IM]")->capture_default_str();
    loss->add_option("--transmission", loss_opt.transmission, "closed-form or exact")->capture_default_str();

    int prop = 0, n_aux = 1, dim = 3, samples = 1000;
    bool appendix = false;
    auto* verify = app.add_subcommand("verify", "Numeric checks against analytic forms");
    auto* prop_opt = verify->add_option("--prop", prop, "Proposition 1, 2 or 3");
    verify->add_option("--aux", n_aux, "Ancilla photons for --prop")->capture_default_str();
    auto* app_flag = verify->add_flag("--appendix", appendix, "Permanent bounds on random unitaries");
    verify->add_option("--dim", dim, "Dimension for --appendix")->capture_default_str();
    verify->add_option("--samples", samples, "Samples for --appendix")->capture_default_str();
    prop_opt->excludes(app_flag);

    std::string matrix_path, delete_rows, delete_cols, row_mult, col_mult;
    auto* perm = app.add_subcommand("perm", "Permanent of a matrix read as whitespace-separated rows");
    perm->add_option("matrix", matrix_path, "Matrix file (default standard input)");
    perm->add_option("--delete-rows", delete_rows, "Rows removed before the permanent, e.g. 0,2");
    perm->add_option("--delete-cols", delete_cols, "Columns removed before the permanent");
    perm->add_option("--rows", row_mult, "Row multiplicities for a repeated-index permanent");
    perm->add_option("--cols", col_mult, "Column multiplicities for a repeated-index permanent");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        cli::Tsv t(out, cfg.tolerance);
        if (!(cfg.tolerance >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
        if (simulate->parsed()) {
            cli::run_simulate(parse_circuit(cli::slurp(circuit_path, in)), cfg, t);
        } else if (condition->parsed()) {
            cli::run_condition(parse_circuit(cli::slurp(circuit_path, in)), cfg, t);
        } else if (gate->parsed()) {
            cli::run_gate(gate_opt, cfg, out, t);
        } else if (optimize->parsed()) {
            if (!cli::run_optimize(opt_opt, cfg, t)) {
                err << "error: no restart reached the constraint tolerance\n";
                return kExitInfeasible;
            }
        } else if (loss->parsed()) {
            cli::run_loss(loss_opt, t);
        } else if (verify->parsed()) {
            if (appendix) {
                const AppendixReport r = check_appendix_bounds(dim, samples, cfg.seed);
                t.row("appendix", r.dimension, r.samples, r.max_permanent, r.max_principal_subpermanent,
                      r.marcus_newman_violations, r.min_sub11, r.max_sub11, r.product_bound_violations);
            } else if (prop_opt->count() > 0) {
                const int cutoff = cfg.cutoff < 0 ? n_aux + 4 : cfg.cutoff;
                const PropositionReport r = verify_proposition(prop, n_aux, cfg.seed, cutoff);
                t.row("proposition", r.which, r.n_aux, r.seed_used, r.reseeds, r.max_deviation);
            } else {
                throw std::invalid_argument("verify needs --prop or --appendix");
            }
        } else if (perm->parsed()) {
            const ComplexMatrix m = cli::parse_matrix(cli::slurp(matrix_path, in));
            const bool repeated = !row_mult.empty() || !col_mult.empty();
            const bool deleted = !delete_rows.empty() || !delete_cols.empty();
            if (repeated && deleted) throw std::invalid_argument("multiplicities and deletions are exclusive");
            Complex p;
            if (repeated) {
                const auto ones = std::vector<int>(static_cast<std::size_t>(m.rows()), 1);
                const OccupationVector rows(row_mult.empty() ? ones : cli::int_list(row_mult));
                const OccupationVector cols(col_mult.empty() ? ones : cli::int_list(col_mult));
                p = repeated_index_permanent(m, rows, cols);
            } else if (deleted) {
                p = subpermanent(m, cli::int_list(delete_rows), cli::int_list(delete_cols));
            } else {
                p = permanent_ryser(m);
                if (m.rows() <= kMaxNaiveDimension) {
                    const Complex q = permanent_naive(m);
                    t.row("naive", q.real(), q.imag());
                }
            }
            t.row("permanent", p.real(), p.imag());
            t.row("abs", std::abs(p));
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace fockforge
