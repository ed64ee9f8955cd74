// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "spintomo/io.hpp"
#include "spintomo/spintomo.hpp"

using namespace spintomo;
namespace fs = std::filesystem;

namespace {

const fs::path work_dir = SPINTOMO_WORK_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::string fmt(double x) { return io::format_double(x); }

std::string state_text(const std::vector<double>& r) {
    std::string s = "r=(";
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + fmt(r[i]);
    return s + ")";
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI binary with stdout/stderr sent to files; returns its exit status.
int run_cli(const std::string& args, const fs::path& stdout_path, const fs::path& stderr_path) {
    std::string cmd = shell_quote(SPINTOMO_CLI_PATH) + " " + args + " > " + shell_quote(stdout_path.string()) + " 2> " +
                      shell_quote(stderr_path.string());
    int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<double>> read_csv(const fs::path& p, const std::string& header, Outcome& o) {
    std::ifstream in(p);
    std::string line;
    std::vector<std::vector<double>> rows;
    if (!std::getline(in, line) || line != header) {
        o.fail("header of " + p.filename().string() + " is '" + line + "'");
        return rows;
    }
    while (std::getline(in, line)) {
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
        rows.push_back(std::move(cells));
    }
    return rows;
}

// ---------------------------------------------------------------------------

Outcome bound_holds() {
    Outcome o;
    int checked = 0;
    double worst_margin = -1.0;
    for (int n = 2; n <= 16; ++n) {
        Rng rng(1000 + static_cast<std::uint64_t>(n));
        int taken = 0;
        while (taken < 1000) {
            DiagonalState state(rng.simplex(n));
            if (state.purity_gap() <= 1e-6) continue;
            ++taken;
            const WitnessPair pair = build_witness_diag(state);
            ComplexMatrix rho = ComplexMatrix::Zero(n, n);
            for (int i = 0; i < n; ++i) rho(i, i) = state.r()[static_cast<std::size_t>(i)];
            const double value = witness_expectation(validate(rho), pair);
            const double bound = witness_bound(n);
            worst_margin = std::max(worst_margin, value - bound);
            if (!(value < bound + 1e-12))
                o.fail("N=" + std::to_string(n) + " " + state_text(state.r()) + " value " + fmt(value) + " >= bound " +
                       fmt(bound));
            ++checked;
        }
    }
    if (o.pass)
        o.detail = std::to_string(checked) + " states, largest value - bound = " + fmt(worst_margin);
    return o;
}

Outcome fig2() {
    Outcome o;
    const fs::path csv = work_dir / "fig2.csv";
    int code = run_cli("scan maxwitness --nmax 30 --out " + shell_quote(csv.string()), work_dir / "fig2.stdout",
                       work_dir / "fig2.stderr");
    if (code != 0) {
        o.fail("CLI exit " + std::to_string(code) + ": " + slurp(work_dir / "fig2.stderr"));
        return o;
    }
    auto rows = read_csv(csv, "N,pure_value,grid_max,bound", o);
    if (!o.pass) return o;
    if (rows.size() != 29) o.fail("expected 29 rows, got " + std::to_string(rows.size()));
    const double exact = 3.0 / 8 - std::sqrt(7.0) / 4;
    if (rows.empty() || rows[0][0] != 2 || std::abs(rows[0][1] - exact) > 1e-12)
        o.fail("N=2 pure value " + (rows.empty() ? std::string("missing") : fmt(rows[0][1])) + " vs " + fmt(exact));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 4) {
            o.fail("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) + " fields");
            break;
        }
        if (i > 0 && !(rows[i][1] > rows[i - 1][1])) o.fail("pure values not increasing at N=" + fmt(rows[i][0]));
        if (!(rows[i][1] < rows[i][3])) o.fail("pure value not below bound at N=" + fmt(rows[i][0]));
    }
    if (o.pass) {
        const double last = rows.back()[1];
        if (!(std::abs(last + 1.0 / 16) < 0.02)) o.fail("value(30) = " + fmt(last));
        else o.detail = "value(2) = " + fmt(rows[0][1]) + ", value(30) = " + fmt(last);
    }
    return o;
}

Outcome fig1() {
    Outcome o;
    const fs::path csv = work_dir / "fig1.csv";
    int code = run_cli("scan qutrit --step 0.02 --out " + shell_quote(csv.string()), work_dir / "fig1.stdout",
                       work_dir / "fig1.stderr");
    if (code != 0) {
        o.fail("CLI exit " + std::to_string(code) + ": " + slurp(work_dir / "fig1.stderr"));
        return o;
    }
    auto rows = read_csv(csv, "r1,r2,value", o);
    if (!o.pass) return o;
    const double pure = pure_state_expectation(3);
    int vertices = 0;
    double top = -1e300;
    for (const auto& row : rows) {
        const double r1 = row[0], r2 = row[1], value = row[2];
        const double r3 = std::max(0.0, 1.0 - r1 - r2);
        const double s = std::pow(r1 - 1.0 / 3, 2) + std::pow(r2 - 1.0 / 3, 2) + std::pow(r3 - 1.0 / 3, 2);
        top = std::max(top, value);
        if (s <= 2.5e-3) o.fail("row inside the excluded hole at (" + fmt(r1) + "," + fmt(r2) + ")");
        if (!(value < -3.0 / 32)) o.fail("value " + fmt(value) + " at (" + fmt(r1) + "," + fmt(r2) + ")");
        const bool vertex = (std::abs(r1 - 1) < 1e-12 && r2 < 1e-12) || (std::abs(r2 - 1) < 1e-12 && r1 < 1e-12) ||
                            (r1 < 1e-12 && r2 < 1e-12);
        if (vertex) {
            ++vertices;
            if (std::abs(value - pure) > 1e-10) o.fail("vertex value " + fmt(value) + " vs closed form " + fmt(pure));
        }
    }
    if (vertices != 3) o.fail("found " + std::to_string(vertices) + " vertices");
    if (o.pass) o.detail = std::to_string(rows.size()) + " points, max value " + fmt(top);
    return o;
}

struct NormalizationLog {
    int tomograms = 0;
    double worst_row = 0.0;
    double worst_column = 0.0;
    double min_value = 1.0;
    double max_value = 0.0;
    Outcome outcome;

    void record(const Tomogram& t) {
        ++tomograms;
        worst_row = std::max(worst_row, t.row_sum_error());
        worst_column = std::max(worst_column, t.column_sum_error());
        min_value = std::min(min_value, t.values().minCoeff());
        max_value = std::max(max_value, t.values().maxCoeff());
        if (t.row_sum_error() > 1e-10) outcome.fail("row-sum error " + fmt(t.row_sum_error()));
        if (t.column_sum_error() > 1e-8) outcome.fail("column-sum error " + fmt(t.column_sum_error()));
        if (t.values().minCoeff() < -1e-12 || t.values().maxCoeff() > 1 + 1e-12) outcome.fail("value outside [0, 1]");
    }
};

Outcome round_trip(NormalizationLog& log) {
    Outcome o;
    double worst = 0.0;
    for (int twice = 1; twice <= 5; ++twice) {
        const Spin j = Spin::from_twice(twice);
        const QuadratureGrid grid = quadrature_grid(j);
        const ReconstructionMap map = build_reconstruction_map(j, grid);
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            DensityMatrix rho = random_density(dimension(j), 5000 + seed);
            Tomogram t = tomogram_sample(rho, grid);
            log.record(t);
            const double err = max_abs(reconstruct_operator(t, map) - rho.matrix());
            worst = std::max(worst, err);
            if (err > 1e-8) o.fail("j=" + j.str() + " seed " + std::to_string(5000 + seed) + " error " + fmt(err));
        }
    }
    if (o.pass) o.detail = "250 states, max error " + fmt(worst);
    return o;
}

Outcome pairing(NormalizationLog& log) {
    Outcome o;
    double worst = 0.0;
    int cases = 0;
    for (int twice = 1; twice <= 3; ++twice) {
        const Spin j = Spin::from_twice(twice);
        const int n = dimension(j);
        const QuadratureGrid grid = quadrature_grid(j);
        const ReconstructionMap map = build_reconstruction_map(j, grid);
        const int count = twice == 3 ? 34 : 33;
        for (int c = 0; c < count; ++c, ++cases) {
            DensityMatrix rho = random_density(n, 7000 + static_cast<std::uint64_t>(cases));
            Rng rng(9000 + static_cast<std::uint64_t>(cases));
            ComplexMatrix a(n, n);
            for (int r = 0; r < n; ++r) {
                a(r, r) = 2 * rng.uniform() - 1;
                for (int k = r + 1; k < n; ++k) {
                    a(r, k) = Complex(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
                    a(k, r) = std::conj(a(r, k));
                }
            }
            Tomogram t = tomogram_sample(rho, grid);
            log.record(t);
            const double err = std::abs(pair_average(t, dual_symbol(a, map)) - (rho.matrix() * a).trace().real());
            worst = std::max(worst, err);
            if (err > 1e-8) o.fail("case " + std::to_string(cases) + " j=" + j.str() + " error " + fmt(err));
        }
    }
    if (o.pass) o.detail = std::to_string(cases) + " cases, max error " + fmt(worst);
    return o;
}

Outcome normalizations(NormalizationLog& log) {
    for (int twice = 6; twice <= 10; ++twice) {
        const Spin j = Spin::from_twice(twice);
        const QuadratureGrid grid = quadrature_grid(j);
        for (std::uint64_t seed = 0; seed < 10; ++seed) log.record(tomogram_sample(random_density(dimension(j), seed), grid));
        log.record(tomogram_sample(random_pure(dimension(j), 99), grid));
    }
    Outcome o = log.outcome;
    if (o.pass)
        o.detail = std::to_string(log.tomograms) + " tomograms, row-sum " + fmt(log.worst_row) + ", column-sum " +
                   fmt(log.worst_column) + ", range [" + fmt(log.min_value) + ", " + fmt(log.max_value) + "]";
    return o;
}

Outcome representations() {
    Outcome o;
    double worst = 0.0;
    int cases = 0;
    for (int n = 2; n <= 6; ++n)
        for (int c = 0; c < 20; ++c, ++cases) {
            DensityMatrix rho = random_density(n, 11000 + static_cast<std::uint64_t>(cases));
            WitnessPair pair = build_witness(rho);
            const double direct = witness_expectation(rho, pair);
            const double tomo = witness_expectation_tomographic(rho, pair);
            const double closed = closed_form_expectation(*pair.source);
            const double mean_direct = (rho.matrix() * pair.A).trace().real();
            const double mean_tomo = tomographic_mean(rho, pair.A);
            const double err = std::max({std::abs(direct - tomo), std::abs(direct - closed), std::abs(tomo - closed),
                                         std::abs(mean_direct - mean_tomo)});
            worst = std::max(worst, err);
            if (err > 1e-10)
                o.fail("N=" + std::to_string(n) + " case " + std::to_string(cases) + " direct " + fmt(direct) +
                       " tomographic " + fmt(tomo) + " closed " + fmt(closed));
        }
    if (o.pass) o.detail = std::to_string(cases) + " cases, max disagreement " + fmt(worst);
    return o;
}

Outcome classical() {
    Outcome o;
    Rng rng(31337);
    double lowest = 1e300;
    for (int t = 0; t < 10000; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform() * 7) % 7;
        std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = 10.0 * rng.uniform();
            b[i] = a[i] + 10.0 * rng.uniform();
        }
        std::vector<double> p = rng.simplex(n);
        const double value = classical_witness_value(ClassicalState(p), ClassicalObservable(a), ClassicalObservable(b));
        lowest = std::min(lowest, value);
        if (value < -1e-12) o.fail("triple " + std::to_string(t) + " " + state_text(p) + " value " + fmt(value));
    }
    if (o.pass) o.detail = "10000 triples, min value " + fmt(lowest);
    return o;
}

Outcome jordan_schwinger() {
    Outcome o;
    double worst_comm = 0.0;
    for (int twice = 0; twice <= 6; ++twice) {
        SectorGenerators g = sector_generators(Spin::from_twice(twice));
        const ComplexMatrix& p = g.jplus.matrix();
        const ComplexMatrix& m = g.jminus.matrix();
        const ComplexMatrix& z = g.jz.matrix();
        const double err = std::max({max_abs(p * m - m * p - 2.0 * z), max_abs(z * p - p * z - p),
                                     max_abs(z * m - m * z + m)});
        worst_comm = std::max(worst_comm, err);
        if (err > 1e-12) o.fail("commutator error " + fmt(err) + " at 2j=" + std::to_string(twice));
    }
    double worst_lift = 0.0;
    int labels = 0;
    for (int total = 1; total <= 8; ++total)
        for (int na = 0; na <= total; ++na, ++labels) {
            TwoModeWitness w = two_mode_witness({na, total - na});
            const double err = std::abs(w.expectation - w.qudit_expectation);
            worst_lift = std::max(worst_lift, err);
            if (err > 1e-12) o.fail("|" + std::to_string(na) + "," + std::to_string(total - na) + "> lift error " + fmt(err));
            if (!(w.expectation < witness_bound(total + 1)))
                o.fail("|" + std::to_string(na) + "," + std::to_string(total - na) + "> not below bound");
        }
    int code = run_cli("js witness --na 0 --nb 0", work_dir / "vacuum.stdout", work_dir / "vacuum.stderr");
    const std::string err = slurp(work_dir / "vacuum.stderr");
    if (code != 3) o.fail("vacuum exit code " + std::to_string(code));
    if (err.rfind("error: VacuumUndetectable:", 0) != 0) o.fail("vacuum stderr '" + err + "'");
    if (o.pass)
        o.detail = "commutators " + fmt(worst_comm) + ", " + std::to_string(labels) + " labels lift error " +
                   fmt(worst_lift) + ", vacuum exit 3";
    return o;
}

Outcome determinism() {
    Outcome o;
    const fs::path in = work_dir / "det_state.json";
    const std::vector<std::string> commands = {
        "state random --dim 4 --seed 5",
        "state validate --in " + shell_quote(in.string()),
        "tomogram sample --in " + shell_quote(in.string()),
        "witness build --in " + shell_quote(in.string()),
        "scan qutrit --step 0.05",
        "scan maxwitness --nmax 12 --seed 3",
        "js witness --na 3 --nb 2",
    };
    if (run_cli(commands[0] + " --out " + shell_quote(in.string()), work_dir / "det.stdout", work_dir / "det.stderr") != 0) {
        o.fail("could not create input state");
        return o;
    }
    int compared = 0;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const fs::path a = work_dir / ("det_" + std::to_string(i) + "_a.out");
        const fs::path b = work_dir / ("det_" + std::to_string(i) + "_b.out");
        const int ca = run_cli(commands[i], a, work_dir / "det_a.stderr");
        const int cb = run_cli(commands[i], b, work_dir / "det_b.stderr");
        if (ca != 0 || cb != 0) {
            o.fail("'" + commands[i] + "' exited " + std::to_string(ca) + "/" + std::to_string(cb));
            continue;
        }
        const std::string ta = slurp(a), tb = slurp(b);
        if (ta.empty() || ta != tb) o.fail("'" + commands[i] + "' outputs differ");
        ++compared;
    }
    if (o.pass) o.detail = std::to_string(compared) + " commands byte-identical across two runs";
    return o;
}

}  // namespace

int main() {
    fs::create_directories(work_dir);
    NormalizationLog log;

    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria = {
        {"witness-bound", bound_holds},
        {"max-witness-scan", fig2},
        {"qutrit-scan", fig1},
        {"tomography-round-trip", [&] { return round_trip(log); }},
        {"pairing-identity", [&] { return pairing(log); }},
        {"normalizations", [&] { return normalizations(log); }},
        {"representation-agreement", representations},
        {"classical-model", classical},
        {"jordan-schwinger", jordan_schwinger},
        {"determinism", determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2fs", secs);
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " (" << timing << "): " << o.detail << std::endl;
        if (!o.pass) ++failures;
    }
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
