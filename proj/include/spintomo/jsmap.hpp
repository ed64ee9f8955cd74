#pragma once

// Jordan-Schwinger correspondence between spin-j qudits and two-mode
// photon-number states. Two-mode operators live on one total-photon sector
// {|n_a, n_b> : n_a + n_b = 2j}, ordered by n_a descending.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "spintomo/error.hpp"
#include "spintomo/half_int.hpp"
#include "spintomo/qstate.hpp"
#include "spintomo/witness.hpp"

namespace spintomo {

struct FockLabel {
    int n_a = 0;
    int n_b = 0;

    bool operator==(const FockLabel&) const = default;
};

struct SpinLabel {
    Spin j;
    HalfInt m;

    bool operator==(const SpinLabel&) const = default;
};

inline SpinLabel fock_to_spin(FockLabel f) {
    if (f.n_a < 0 || f.n_b < 0) throw Error(ErrorKind::InvalidInput, "photon numbers must be nonnegative");
    return {Spin::from_twice(f.n_a + f.n_b), HalfInt::from_twice(f.n_a - f.n_b)};
}

inline FockLabel spin_to_fock(Spin j, HalfInt m) {
    if (!is_valid_projection(j, m))
        throw Error(ErrorKind::InvalidSpinLabel, "(j, m) = (" + j.str() + ", " + m.str() + ") is not a spin label");
    return {(j.twice() + m.twice()) / 2, (j.twice() - m.twice()) / 2};
}

class SectorOperator {
public:
    SectorOperator(Spin j, ComplexMatrix matrix) : j_(checked_spin(j)), matrix_(std::move(matrix)) {
        if (matrix_.rows() != dimension(j_) || matrix_.cols() != dimension(j_))
            throw Error(ErrorKind::DimensionMismatch, "sector j=" + j_.str() + " needs a " +
                                                          std::to_string(dimension(j_)) + "x" +
                                                          std::to_string(dimension(j_)) + " matrix");
    }

    Spin spin() const { return j_; }
    int total_photons() const { return j_.twice(); }
    int dim() const { return dimension(j_); }
    const ComplexMatrix& matrix() const { return matrix_; }

    std::vector<FockLabel> basis() const {
        std::vector<FockLabel> labels;
        for (int k = 0; k < dim(); ++k) labels.push_back({total_photons() - k, k});
        return labels;
    }

    /// Position of |n_a, n_b> in this sector's basis.
    int index_of(FockLabel f) const {
        if (f.n_a < 0 || f.n_b < 0 || f.n_a + f.n_b != total_photons())
            throw Error(ErrorKind::InvalidInput, "label outside the " + std::to_string(total_photons()) + "-photon sector");
        return f.n_b;
    }

private:
    Spin j_;
    ComplexMatrix matrix_;
};

struct SectorGenerators {
    SectorOperator jplus;
    SectorOperator jminus;
    SectorOperator jz;
};

/// a^dagger b, a b^dagger and (a^dagger a - b^dagger b)/2 restricted to the
/// 2j-photon sector, built from the bosonic matrix elements
/// a^dagger|n> = sqrt(n+1)|n+1>, b|n> = sqrt(n)|n-1>.
inline SectorGenerators sector_generators(Spin j) {
    checked_spin(j);
    const int n = dimension(j);
    const int total = j.twice();
    ComplexMatrix plus = ComplexMatrix::Zero(n, n);
    ComplexMatrix minus = ComplexMatrix::Zero(n, n);
    ComplexMatrix z = ComplexMatrix::Zero(n, n);
    for (int col = 0; col < n; ++col) {
        const int na = total - col;
        const int nb = col;
        z(col, col) = 0.5 * (na - nb);
        if (nb > 0) plus(col - 1, col) = std::sqrt(static_cast<double>(na + 1) * nb);   // -> |na+1, nb-1>
        if (na > 0) minus(col + 1, col) = std::sqrt(static_cast<double>(na) * (nb + 1));  // -> |na-1, nb+1>
    }
    return {SectorOperator(j, plus), SectorOperator(j, minus), SectorOperator(j, z)};
}

/// Relabels |j m> as |j+m, j-m>; the matrix is unchanged in this ordering.
inline SectorOperator lift_operator(Spin j, const ComplexMatrix& qudit_op) {
    checked_spin(j);
    if (qudit_op.rows() != dimension(j) || qudit_op.cols() != dimension(j))
        throw Error(ErrorKind::DimensionMismatch, "operator is " + std::to_string(qudit_op.rows()) + "x" +
                                                      std::to_string(qudit_op.cols()) + ", spin " + j.str() +
                                                      " needs " + std::to_string(dimension(j)));
    return SectorOperator(j, qudit_op);
}

struct TwoModeWitness {
    FockLabel label;
    SpinLabel spin;
    WitnessPair qudit;   // witness for |j m>
    SectorOperator A;    // lifted operators
    SectorOperator B;
    SectorOperator W;
    double qudit_expectation;
    double expectation;  // <n_a n_b| W |n_a n_b>
};

/// Maps |n_a n_b> to |j m>, builds the witness for that pure qudit state,
/// lifts it to the photon-number sector and evaluates it on |n_a n_b>.
inline TwoModeWitness two_mode_witness(FockLabel f) {
    if (f.n_a == 0 && f.n_b == 0)
        throw Error(ErrorKind::VacuumUndetectable, "the vacuum maps to the one-level j=0 system, which has no witness");
    const SpinLabel spin = fock_to_spin(f);
    const int n = dimension(spin.j);
    const int index = basis_index(spin.j, spin.m);

    std::vector<double> r(static_cast<std::size_t>(n), 0.0);
    r[static_cast<std::size_t>(index)] = 1.0;
    WitnessPair pair = build_witness_diag(DiagonalState(r));
    const double qudit_value = witness_expectation(basis_state(spin.j, index), pair);

    SectorOperator a = lift_operator(spin.j, pair.A);
    SectorOperator b = lift_operator(spin.j, pair.B);
    SectorOperator w = lift_operator(spin.j, pair.W);
    const int pos = w.index_of(f);
    const double value = w.matrix()(pos, pos).real();
    return {f, spin, std::move(pair), std::move(a), std::move(b), std::move(w), qudit_value, value};
}

}  // namespace spintomo
