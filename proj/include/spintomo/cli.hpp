#pragma once

// Command-line front end. run() is the whole program; tools/spintomo.cpp only
// forwards argv so the same entry point is exercised in-process by tests.
//
// Exit codes: 0 success, 2 invalid input, 3 witness undefined / vacuum,
// 4 internal numerical failure.

#include "CLI11.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spintomo/error.hpp"
#include "spintomo/io.hpp"
#include "spintomo/jsmap.hpp"
#include "spintomo/qstate.hpp"
#include "spintomo/su2.hpp"
#include "spintomo/tomography.hpp"
#include "spintomo/witness.hpp"

namespace spintomo::cli {

enum ExitCode : int { ok = 0, invalid_input = 2, witness_undefined = 3, numerical_failure = 4 };

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::WitnessUndefined:
        case ErrorKind::VacuumUndetectable: return witness_undefined;
        case ErrorKind::ConvergenceFailure:
        case ErrorKind::NumericalFailure: return numerical_failure;
        default: return invalid_input;
    }
}

struct RunConfig {
    std::string in;
    std::string witness_in;
    std::string out;
    std::uint64_t seed = 0;
    std::string j;
    int dim = 0;
    bool pure = false;
    int n_beta = 0;
    int n_alpha = 0;
    int n_gamma = 0;
    double step = 0.02;
    int n_max = 30;
    int samples = 1000;
    int n_a = -1;
    int n_b = -1;
};

namespace detail {

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "'");
    return in;
}

inline DensityMatrix read_density(const RunConfig& cfg) {
    auto in = open_input(cfg.in);
    DensityMatrix rho = io::density_from_json(in);
    if (!cfg.j.empty() && HalfInt::parse(cfg.j) != rho.spin())
        throw Error(ErrorKind::DimensionMismatch, "state has j=" + rho.spin().str() + ", --j says " + cfg.j);
    return rho;
}

inline GridOrders orders_for(const RunConfig& cfg, Spin j) {
    GridOrders orders = default_orders(j);
    if (cfg.n_beta > 0) orders.n_beta = cfg.n_beta;
    if (cfg.n_alpha > 0) orders.n_alpha = cfg.n_alpha;
    if (cfg.n_gamma > 0) orders.n_gamma = cfg.n_gamma;
    return orders;
}

inline std::string json_text(const io::json& value) { return io::to_json_string(value); }

}  // namespace detail

inline std::string state_validate(const RunConfig& cfg) {
    DensityMatrix rho = detail::read_density(cfg);
    Diagonalization d = diagonalize(rho);
    io::json report;
    report["valid"] = true;
    report["dim"] = rho.dim();
    report["j"] = rho.spin().value();
    report["trace"] = rho.matrix().trace().real();
    report["purity"] = purity(rho);
    report["eigenvalues"] = std::vector<double>(d.eigenvalues.data(), d.eigenvalues.data() + d.eigenvalues.size());
    return detail::json_text(report);
}

inline std::string state_random(const RunConfig& cfg) {
    int n = cfg.dim;
    if (!cfg.j.empty()) {
        const int from_j = dimension(checked_spin(HalfInt::parse(cfg.j)));
        if (n > 0 && n != from_j) throw Error(ErrorKind::DimensionMismatch, "--dim and --j disagree");
        n = from_j;
    }
    if (n < 1) throw Error(ErrorKind::InvalidInput, "give --dim or --j");
    DensityMatrix rho = cfg.pure ? random_pure(n, cfg.seed) : random_density(n, cfg.seed);
    return detail::json_text(io::density_to_json(rho));
}

inline std::string tomogram_sample_cmd(const RunConfig& cfg) {
    DensityMatrix rho = detail::read_density(cfg);
    QuadratureGrid grid = quadrature_grid(rho.spin(), detail::orders_for(cfg, rho.spin()));
    std::ostringstream out;
    io::write_tomogram_csv(out, tomogram_sample(rho, grid));
    return out.str();
}

inline std::string tomogram_reconstruct_cmd(const RunConfig& cfg) {
    auto in = detail::open_input(cfg.in);
    Tomogram t = io::read_tomogram_csv(in);
    ReconstructionMap map = build_reconstruction_map(t.spin(), t.grid());
    return detail::json_text(io::density_to_json(reconstruct(t, map)));
}

inline std::string witness_build_cmd(const RunConfig& cfg) {
    DensityMatrix rho = detail::read_density(cfg);
    WitnessPair pair = build_witness(rho);
    return detail::json_text(io::witness_to_json(pair, witness_expectation(rho, pair)));
}

inline std::string witness_eval_cmd(const RunConfig& cfg) {
    DensityMatrix rho = detail::read_density(cfg);
    auto in = detail::open_input(cfg.witness_in);
    WitnessPair pair = io::witness_from_json(io::parse_json_text(in));
    PremiseReport premises = verify_premises(pair);
    io::json out;
    out["dim"] = pair.dim;
    out["expectation"] = witness_expectation(rho, pair);
    out["tomographic"] = witness_expectation_tomographic(rho, pair);
    if (pair.dim >= 2) out["bound"] = witness_bound(pair.dim);
    out["premises"] = io::json{{"minA", premises.min_a},
                               {"minB", premises.min_b},
                               {"minBminusA", premises.min_b_minus_a},
                               {"pass", premises.pass}};
    return detail::json_text(out);
}

inline std::string scan_qutrit_cmd(const RunConfig& cfg) {
    std::ostringstream out;
    io::write_qutrit_csv(out, qutrit_scan(cfg.step));
    return out.str();
}

inline std::string scan_maxwitness_cmd(const RunConfig& cfg) {
    std::ostringstream out;
    io::write_maxwitness_csv(out, max_witness_scan(cfg.n_max, cfg.seed, cfg.samples));
    return out.str();
}

inline std::string js_lift_cmd(const RunConfig& cfg) {
    auto in = detail::open_input(cfg.in);
    ComplexMatrix op = io::matrix_from_json(io::parse_json_text(in));
    Spin j = cfg.j.empty() ? spin_from_dim(static_cast<int>(op.rows())) : checked_spin(HalfInt::parse(cfg.j));
    return detail::json_text(io::sector_to_json(lift_operator(j, op)));
}

inline std::string js_witness_cmd(const RunConfig& cfg) {
    if (cfg.n_a < 0 || cfg.n_b < 0) throw Error(ErrorKind::InvalidInput, "--na and --nb are required and nonnegative");
    return detail::json_text(io::two_mode_witness_to_json(two_mode_witness({cfg.n_a, cfg.n_b})));
}

/// `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Spin tomograms and quantumness witnesses for qudits and two-mode light", "spintomo"};
    app.require_subcommand(1);

    std::function<std::string(const RunConfig&)> action;
    auto verb = [&](CLI::App* group, const char* name, const char* help, std::string (*fn)(const RunConfig&)) {
        CLI::App* sub = group->add_subcommand(name, help);
        sub->callback([&action, fn] { action = fn; });
        sub->add_option("--out", cfg.out, "write output to this path instead of stdout");
        return sub;
    };

    CLI::App* state = app.add_subcommand("state", "density-matrix utilities")->require_subcommand(1);
    auto* validate_cmd = verb(state, "validate", "certify a density-matrix JSON file", state_validate);
    validate_cmd->add_option("--in", cfg.in, "density-matrix JSON")->required();
    validate_cmd->add_option("--j", cfg.j, "expected spin (e.g. 3/2)");
    auto* random_cmd = verb(state, "random", "seeded random state", state_random);
    random_cmd->add_option("--dim", cfg.dim, "dimension N")->check(CLI::Range(1, tol::max_dim));
    random_cmd->add_option("--j", cfg.j, "spin (alternative to --dim)");
    random_cmd->add_option("--seed", cfg.seed, "random seed");
    random_cmd->add_flag("--pure", cfg.pure, "random pure state instead of Hilbert-Schmidt mixed state");

    CLI::App* tomogram = app.add_subcommand("tomogram", "spin tomograms")->require_subcommand(1);
    auto* sample_cmd = verb(tomogram, "sample", "sample a state's tomogram on the Euler-angle grid", tomogram_sample_cmd);
    sample_cmd->add_option("--in", cfg.in, "density-matrix JSON")->required();
    sample_cmd->add_option("--nbeta", cfg.n_beta, "Gauss-Legendre nodes in cos(beta)");
    sample_cmd->add_option("--nalpha", cfg.n_alpha, "uniform nodes in alpha");
    sample_cmd->add_option("--ngamma", cfg.n_gamma, "uniform nodes in gamma");
    auto* recon_cmd = verb(tomogram, "reconstruct", "reconstruct the density matrix from a tomogram CSV",
                           tomogram_reconstruct_cmd);
    recon_cmd->add_option("--in", cfg.in, "tomogram CSV")->required();

    CLI::App* witness = app.add_subcommand("witness", "quantumness witnesses")->require_subcommand(1);
    auto* build_cmd = verb(witness, "build", "build the witness for a state", witness_build_cmd);
    build_cmd->add_option("--in", cfg.in, "density-matrix JSON")->required();
    auto* eval_cmd = verb(witness, "eval", "evaluate a witness on a state", witness_eval_cmd);
    eval_cmd->add_option("--in", cfg.in, "density-matrix JSON")->required();
    eval_cmd->add_option("--witness", cfg.witness_in, "witness JSON")->required();

    CLI::App* scan = app.add_subcommand("scan", "witness scans")->require_subcommand(1);
    auto* qutrit_cmd = verb(scan, "qutrit", "witness value over the qutrit simplex", scan_qutrit_cmd);
    qutrit_cmd->add_option("--step", cfg.step, "lattice spacing in (0, 0.1]");
    auto* max_cmd = verb(scan, "maxwitness", "pure-state and sampled witness maxima per N", scan_maxwitness_cmd);
    max_cmd->add_option("--nmax", cfg.n_max, "largest N")->check(CLI::Range(2, tol::max_dim));
    max_cmd->add_option("--seed", cfg.seed, "random seed");
    max_cmd->add_option("--samples", cfg.samples, "random diagonal states per N")->check(CLI::PositiveNumber);

    CLI::App* js = app.add_subcommand("js", "Jordan-Schwinger two-mode mapping")->require_subcommand(1);
    auto* lift_cmd = verb(js, "lift", "lift a qudit operator JSON to its photon-number sector", js_lift_cmd);
    lift_cmd->add_option("--in", cfg.in, "operator JSON {dim, re, im}")->required();
    lift_cmd->add_option("--j", cfg.j, "spin (defaults to (dim-1)/2)");
    auto* jsw_cmd = verb(js, "witness", "witness for the two-mode Fock state |na, nb>", js_witness_cmd);
    jsw_cmd->add_option("--na", cfg.n_a, "photons in mode a")->required();
    jsw_cmd->add_option("--nb", cfg.n_b, "photons in mode b")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        std::string message = e.what();
        std::replace(message.begin(), message.end(), '\n', ' ');
        err << "error: InvalidInput: " << message << "\n";
        return invalid_input;
    }

    try {
        if (!action) throw Error(ErrorKind::InvalidInput, "no command given");
        std::string text = action(cfg);
        if (cfg.out.empty()) {
            out << text;
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) throw Error(ErrorKind::InvalidInput, "cannot write '" + cfg.out + "'");
            file << text;
        }
        return ok;
    } catch (const Error& e) {
        std::string message = e.what();
        std::replace(message.begin(), message.end(), '\n', ' ');
        err << "error: " << message << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: NumericalFailure: " << e.what() << "\n";
        return numerical_failure;
    }
}

}  // namespace spintomo::cli
