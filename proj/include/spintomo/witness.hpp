#pragma once

// Quantumness witnesses W = B^2 - A^2 with A >= 0 and B - A >= 0: the
// classical simplex model, the explicit construction for a given qudit state,
// premise certificates, and expectation values in the matrix and tomographic
// representations.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spintomo/error.hpp"
#include "spintomo/qstate.hpp"
#include "spintomo/rng.hpp"
#include "spintomo/tomography.hpp"

namespace spintomo {

namespace witness_tol {
inline constexpr double simplex = 1e-12;
inline constexpr double mixed = 1e-8;       // gate on s = Tr rho^2 - 1/N
inline constexpr double scan_hole = 2.5e-3;  // qutrit scan exclusion on s
inline constexpr double premise = 1e-10;
inline constexpr double rank_one = 1e-8;
inline constexpr double cross_check = 1e-10;
}  // namespace witness_tol

// ---------------------------------------------------------------------------
// Classical statistical model

class ClassicalState {
public:
    explicit ClassicalState(std::vector<double> p) : p_(std::move(p)) {
        if (p_.empty()) throw Error(ErrorKind::InvalidInput, "empty probability vector");
        double total = 0.0;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            if (!std::isfinite(p_[i]) || p_[i] < 0.0)
                throw Error(ErrorKind::InvalidInput, "probability " + std::to_string(i) + " is negative or non-finite");
            total += p_[i];
        }
        if (std::abs(total - 1.0) > witness_tol::simplex)
            throw Error(ErrorKind::InvalidInput, "probabilities sum to " + std::to_string(total));
    }

    const std::vector<double>& probabilities() const { return p_; }
    std::size_t size() const { return p_.size(); }

private:
    std::vector<double> p_;
};

class ClassicalObservable {
public:
    explicit ClassicalObservable(std::vector<double> outcomes) : outcomes_(std::move(outcomes)) {
        for (double x : outcomes_)
            if (!std::isfinite(x)) throw Error(ErrorKind::InvalidInput, "observable outcome is non-finite");
    }

    const std::vector<double>& outcomes() const { return outcomes_; }
    std::size_t size() const { return outcomes_.size(); }
    double operator[](std::size_t i) const { return outcomes_[i]; }

private:
    std::vector<double> outcomes_;
};

inline double classical_mean(const ClassicalState& p, const ClassicalObservable& a) {
    if (p.size() != a.size())
        throw Error(ErrorKind::LengthMismatch, "state has " + std::to_string(p.size()) + " outcomes, observable " +
                                                   std::to_string(a.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += p.probabilities()[i] * a[i];
    return sum;
}

/// <B^2>_cl - <A^2>_cl, evaluated as Tr(P Q) with P the N x 2 matrix whose
/// columns both equal p and Q the 2 x N matrix with rows B_i^2 and -A_i^2.
inline double classical_witness_value(const ClassicalState& p, const ClassicalObservable& a,
                                      const ClassicalObservable& b) {
    const std::size_t n = p.size();
    if (a.size() != n || b.size() != n) throw Error(ErrorKind::LengthMismatch, "observable lengths differ from state");
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < 0.0)
            throw Error(ErrorKind::PremiseViolated, "A_" + std::to_string(i + 1) + " = " + std::to_string(a[i]) + " < 0");
        if (b[i] < a[i])
            throw Error(ErrorKind::PremiseViolated, "B_" + std::to_string(i + 1) + " < A_" + std::to_string(i + 1));
    }
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd left(dim, 2);
    Eigen::MatrixXd right(2, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto s = static_cast<std::size_t>(i);
        left(i, 0) = left(i, 1) = p.probabilities()[s];
        right(0, i) = b[s] * b[s];
        right(1, i) = -a[s] * a[s];
    }
    const double matrix_form = (left * right).trace();

    double scalar_form = 0.0;
    for (std::size_t i = 0; i < n; ++i) scalar_form += p.probabilities()[i] * (b[i] * b[i] - a[i] * a[i]);
    const double scale = std::max(1.0, std::abs(scalar_form));
    if (std::abs(matrix_form - scalar_form) > 1e-12 * scale)
        throw Error(ErrorKind::NumericalFailure, "matrix and scalar classical forms disagree");
    return matrix_form;
}

// ---------------------------------------------------------------------------
// Explicit witness construction

struct WitnessConstants {
    double a;
    double b;
};

/// a = 3N / (4(N-1)), b = 1 / (4(N-1))
inline WitnessConstants witness_constants(int n) {
    if (n < 2) throw Error(ErrorKind::DimensionMismatch, "witness needs N >= 2");
    return {3.0 * n / (4.0 * (n - 1)), 1.0 / (4.0 * (n - 1))};
}

/// -N / (16 (N-1))
inline double witness_bound(int n) {
    if (n < 2) throw Error(ErrorKind::DimensionMismatch, "witness needs N >= 2");
    return -static_cast<double>(n) / (16.0 * (n - 1));
}

/// M = N I - (all-ones)
inline ComplexMatrix offset_matrix(int n) {
    return static_cast<double>(n) * ComplexMatrix::Identity(n, n) - ComplexMatrix::Ones(n, n);
}

/// Diagonal of rho_d on the simplex, with its purity gap s = Tr rho_d^2 - 1/N.
class DiagonalState {
public:
    explicit DiagonalState(std::vector<double> r) : r_(std::move(r)) {
        ClassicalState check(r_);
        const double n = static_cast<double>(r_.size());
        s_ = 0.0;
        for (double x : r_) s_ += (x - 1.0 / n) * (x - 1.0 / n);
    }

    const std::vector<double>& r() const { return r_; }
    int dim() const { return static_cast<int>(r_.size()); }
    double purity_gap() const { return s_; }

private:
    std::vector<double> r_;
    double s_ = 0.0;
};

struct WitnessPair {
    int dim = 0;
    double a = 0.0;
    double b = 0.0;
    ComplexMatrix A;
    ComplexMatrix B;
    ComplexMatrix W;         // B^2 - A^2
    ComplexMatrix rotation;  // A = u A_d u^dagger (identity for the diagonal construction)
    std::optional<DiagonalState> source;  // spectrum the pair was built from

    /// Wraps arbitrary operators; no premise is checked.
    static WitnessPair from_operators(const ComplexMatrix& a_op, const ComplexMatrix& b_op) {
        require_square_finite(a_op, "A");
        require_square_finite(b_op, "B");
        if (a_op.rows() != b_op.rows()) throw Error(ErrorKind::DimensionMismatch, "A and B differ in dimension");
        WitnessPair pair;
        pair.dim = static_cast<int>(a_op.rows());
        if (pair.dim >= 2) {
            auto c = witness_constants(pair.dim);
            pair.a = c.a;
            pair.b = c.b;
        }
        pair.A = a_op;
        pair.B = b_op;
        pair.W = b_op * b_op - a_op * a_op;
        pair.rotation = ComplexMatrix::Identity(pair.dim, pair.dim);
        return pair;
    }
};

struct PremiseReport {
    double min_a = 0.0;
    double min_b = 0.0;
    double min_b_minus_a = 0.0;
    bool pass = false;
    std::string failing;    // "A", "B" or "B-A" when !pass
    int failing_index = -1;  // descending-order index of the first negative eigenvalue
};

inline PremiseReport verify_premises(const WitnessPair& pair) {
    PremiseReport report;
    struct Item {
        const char* name;
        ComplexMatrix op;
        double* slot;
    };
    Item items[] = {{"A", pair.A, &report.min_a}, {"B", pair.B, &report.min_b}, {"B-A", pair.B - pair.A,
                                                                                   &report.min_b_minus_a}};
    report.pass = true;
    for (auto& item : items) {
        RealVector ev = hermitian_eigenvalues(item.op);
        *item.slot = ev(ev.size() - 1);
        const double floor = -witness_tol::premise * tolerance_scale(item.op);
        if (report.pass) {
            for (Eigen::Index k = 0; k < ev.size(); ++k)
                if (ev(k) < floor) {
                    report.pass = false;
                    report.failing = item.name;
                    report.failing_index = static_cast<int>(k);
                    break;
                }
        }
    }
    return report;
}

/// Closed-form Tr(rho_d (B_d^2 - A_d^2)) for the pair built from rho_d itself:
///   b/s * { 2N(1 - a s) + b N (N-1) s - 2 sum_k r_k v_k sum_l v_l },
/// v_i = (1 - a (r_i - 1/N))^{1/2}.
inline double closed_form_expectation(const DiagonalState& state) {
    const int n = state.dim();
    const auto [a, b] = witness_constants(n);
    const double s = state.purity_gap();
    if (s <= witness_tol::mixed)
        throw Error(ErrorKind::WitnessUndefined, "state is within 1e-8 of the maximally mixed state");
    double sum_rv = 0.0, sum_v = 0.0;
    for (double r : state.r()) {
        const double v = std::sqrt(1.0 - a * (r - 1.0 / n));
        sum_rv += r * v;
        sum_v += v;
    }
    return b / s * (2.0 * n * (1.0 - a * s) + b * n * (n - 1) * s - 2.0 * sum_rv * sum_v);
}

/// Closed form at a pure basis state (r = e_1).
inline double pure_state_expectation(int n) {
    std::vector<double> r(static_cast<std::size_t>(n), 0.0);
    r[0] = 1.0;
    return closed_form_expectation(DiagonalState(std::move(r)));
}

namespace detail {

inline void certify(const WitnessPair& pair) {
    PremiseReport report = verify_premises(pair);
    if (!report.pass)
        throw Error(ErrorKind::NumericalFailure, "built witness violates premise on " + report.failing);
    ComplexMatrix gap = pair.B - pair.A - pair.b * pair.rotation * offset_matrix(pair.dim) * pair.rotation.adjoint();
    if (max_abs(gap) > witness_tol::premise * tolerance_scale(pair.B))
        throw Error(ErrorKind::NumericalFailure, "B - A differs from b u M u^dagger");
    RealVector ev = hermitian_eigenvalues(pair.A);
    if (ev.size() > 1 && ev(1) > witness_tol::rank_one * std::max(1.0, ev(0)))
        throw Error(ErrorKind::NumericalFailure, "A is not rank one");
}

// A_d, B_d and W_d = b(A_d M + M A_d) + b^2 M^2, all real symmetric.
inline WitnessPair diagonal_pair(const DiagonalState& state) {
    const int n = state.dim();
    const auto [a, b] = witness_constants(n);
    const double s = state.purity_gap();
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
        const double radicand = 1.0 - a * (state.r()[static_cast<std::size_t>(i)] - 1.0 / n);
        if (radicand < 0.25 - 1e-12) throw Error(ErrorKind::NumericalFailure, "radicand below 1/4");
        v(i) = std::sqrt(radicand);
    }
    WitnessPair pair;
    pair.dim = n;
    pair.a = a;
    pair.b = b;
    pair.A = v * v.transpose() / s;
    const ComplexMatrix m = offset_matrix(n);
    pair.B = pair.A + b * m;
    pair.W = b * (pair.A * m + m * pair.A) + (b * b * n) * m;  // M^2 = N M
    pair.rotation = ComplexMatrix::Identity(n, n);
    pair.source = state;
    return pair;
}

}  // namespace detail

inline WitnessPair build_witness_diag(const DiagonalState& state) {
    if (state.dim() < 2) throw Error(ErrorKind::WitnessUndefined, "a one-level system has no witness");
    if (state.purity_gap() <= witness_tol::mixed)
        throw Error(ErrorKind::WitnessUndefined, "state is within 1e-8 of the maximally mixed state");
    WitnessPair pair = detail::diagonal_pair(state);
    detail::certify(pair);
    return pair;
}

/// Witness for an arbitrary state: the diagonal construction on the spectrum,
/// rotated back by the diagonalizing unitary.
inline WitnessPair build_witness(const DensityMatrix& rho) {
    if (rho.dim() < 2) throw Error(ErrorKind::WitnessUndefined, "a one-level system has no witness");
    if (purity_gap(rho) <= witness_tol::mixed)
        throw Error(ErrorKind::WitnessUndefined, "state is within 1e-8 of the maximally mixed state");
    Diagonalization diag = diagonalize(rho);
    std::vector<double> r(static_cast<std::size_t>(rho.dim()));
    double total = 0.0;
    for (int i = 0; i < rho.dim(); ++i) total += (r[static_cast<std::size_t>(i)] = std::max(0.0, diag.eigenvalues(i)));
    for (double& x : r) x /= total;
    WitnessPair pair = detail::diagonal_pair(DiagonalState(std::move(r)));
    const ComplexMatrix& u = diag.rotation;
    pair.A = u * pair.A * u.adjoint();
    pair.B = u * pair.B * u.adjoint();
    pair.W = u * pair.W * u.adjoint();
    for (ComplexMatrix* op : {&pair.A, &pair.B, &pair.W}) *op = 0.5 * (*op + op->adjoint());
    pair.rotation = u;
    detail::certify(pair);
    return pair;
}

/// Tr(rho (B^2 - A^2)). When rho is the state the pair was built from, the
/// value is cross-checked against the closed form.
inline double witness_expectation(const DensityMatrix& rho, const WitnessPair& pair) {
    if (rho.dim() != pair.dim)
        throw Error(ErrorKind::DimensionMismatch, "state dimension " + std::to_string(rho.dim()) + ", witness " +
                                                      std::to_string(pair.dim));
    const double value = (rho.matrix() * pair.W).trace().real();
    if (pair.source) {
        const auto& r = pair.source->r();
        ComplexMatrix own = pair.rotation * Eigen::Map<const Eigen::VectorXd>(r.data(), pair.dim).cast<Complex>().asDiagonal() *
                            pair.rotation.adjoint();
        if (max_abs(own - rho.matrix()) <= 1e-12) {
            const double closed = closed_form_expectation(*pair.source);
            if (std::abs(closed - value) > witness_tol::cross_check * tolerance_scale(pair.W))
                throw Error(ErrorKind::NumericalFailure, "matrix trace " + std::to_string(value) +
                                                             " disagrees with closed form " + std::to_string(closed));
        }
    }
    return value;
}

/// Sum_m w(m, u_B) B_m^2 - sum_m w(m, u_A) A_m^2 with A = u_A^dagger diag(A_m) u_A.
inline double witness_expectation_tomographic(const DensityMatrix& rho, const WitnessPair& pair) {
    if (rho.dim() != pair.dim) throw Error(ErrorKind::DimensionMismatch, "state and witness dimensions differ");
    auto squared_mean = [&](const ComplexMatrix& op) {
        Diagonalization d = eigh(op);
        const ComplexMatrix u = d.rotation.adjoint();
        double sum = 0.0;
        for (int k = 0; k < rho.dim(); ++k)
            sum += tomogram_eval(rho, magnetic_at(rho.spin(), k), u) * d.eigenvalues(k) * d.eigenvalues(k);
        return sum;
    };
    return squared_mean(pair.B) - squared_mean(pair.A);
}

/// Sum_m w(m, u_A) A_m, the tomographic form of <A>.
inline double tomographic_mean(const DensityMatrix& rho, const ComplexMatrix& op) {
    if (rho.dim() != op.rows()) throw Error(ErrorKind::DimensionMismatch, "state and operator dimensions differ");
    Diagonalization d = eigh(op);
    const ComplexMatrix u = d.rotation.adjoint();
    double sum = 0.0;
    for (int k = 0; k < rho.dim(); ++k) sum += tomogram_eval(rho, magnetic_at(rho.spin(), k), u) * d.eigenvalues(k);
    return sum;
}

// ---------------------------------------------------------------------------
// Scans

struct QutritScanRow {
    double r1;
    double r2;
    double value;
};

/// Witness value over the qutrit simplex r = (r1, r2, 1 - r1 - r2) on a
/// square lattice of spacing `step`, skipping s <= 2.5e-3 around I/3.
/// Rows are ordered by r1 then r2.
inline std::vector<QutritScanRow> qutrit_scan(double step) {
    if (!(step > 0.0) || step > 0.1) throw Error(ErrorKind::InvalidInput, "step must be in (0, 0.1]");
    const int count = static_cast<int>(std::floor(1.0 / step + 1e-9));
    std::vector<QutritScanRow> rows;
    for (int i = 0; i <= count; ++i) {
        for (int k = 0; i + k <= count; ++k) {
            const double r1 = i * step;
            const double r2 = k * step;
            const double r3 = std::max(0.0, 1.0 - r1 - r2);
            if (r1 + r2 > 1.0 + 1e-12) continue;
            DiagonalState state({r1, r2, r3});
            if (state.purity_gap() <= witness_tol::scan_hole) continue;
            const double value = closed_form_expectation(state);
            if (!(value < witness_bound(3)))
                throw Error(ErrorKind::NumericalFailure, "qutrit witness value " + std::to_string(value) + " at r=(" +
                                                             std::to_string(r1) + "," + std::to_string(r2) + "," +
                                                             std::to_string(r3) + ") is not below -3/32");
            rows.push_back({r1, r2, value});
        }
    }
    return rows;
}

struct MaxWitnessRow {
    int n;
    double pure_value;
    double grid_max;
    double bound;
};

/// Per N: the pure-basis-state value, the maximum over `samples` uniformly
/// random diagonal states, and the bound -N/(16(N-1)).
inline std::vector<MaxWitnessRow> max_witness_scan(int n_max, std::uint64_t seed = 0, int samples = 1000) {
    if (n_max < 2) throw Error(ErrorKind::InvalidInput, "nmax must be at least 2");
    if (n_max > tol::max_dim) throw Error(ErrorKind::InvalidInput, "nmax above supported maximum");
    if (samples < 1) throw Error(ErrorKind::InvalidInput, "need at least one sample");
    std::vector<MaxWitnessRow> rows;
    for (int n = 2; n <= n_max; ++n) {
        Rng rng(seed + static_cast<std::uint64_t>(n));
        const double pure = pure_state_expectation(n);
        double best = -std::numeric_limits<double>::infinity();
        int taken = 0;
        while (taken < samples) {
            DiagonalState state(rng.simplex(n));
            if (state.purity_gap() <= witness_tol::mixed) continue;
            best = std::max(best, closed_form_expectation(state));
            ++taken;
        }
        const double bound = witness_bound(n);
        if (best > pure + 1e-9)
            throw Error(ErrorKind::NumericalFailure, "N=" + std::to_string(n) + ": sampled value " + std::to_string(best) +
                                                         " exceeds pure-state value " + std::to_string(pure));
        if (!(pure < bound))
            throw Error(ErrorKind::NumericalFailure, "N=" + std::to_string(n) + ": pure-state value not below bound");
        rows.push_back({n, pure, best, bound});
    }
    return rows;
}

}  // namespace spintomo
