#pragma once

// Core state algebra: density-matrix validation, Hermitian spectra with a
// deterministic eigenvector convention, purity, and seeded random states.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spintomo/error.hpp"
#include "spintomo/half_int.hpp"
#include "spintomo/rng.hpp"

namespace spintomo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double reassembly = 1e-10;
inline constexpr double degenerate_gap = 1e-9;
inline constexpr int max_dim = 64;
}  // namespace tol

inline double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Scale used for absolute tolerances on operators whose entries may be large.
inline double tolerance_scale(const ComplexMatrix& m) { return std::max(1.0, max_abs(m)); }

inline void require_square_finite(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + " is not square (" + std::to_string(m.rows()) +
                                                      "x" + std::to_string(m.cols()) + ")");
    if (m.rows() == 0) throw Error(ErrorKind::DimensionMismatch, std::string(what) + " is empty");
    if (!m.allFinite()) throw Error(ErrorKind::InvalidInput, std::string(what) + " has non-finite entries");
}

inline double hermiticity_error(const ComplexMatrix& m) { return max_abs(m - m.adjoint()); }

inline bool is_unitary(const ComplexMatrix& u, double tolerance = tol::unitary) {
    if (u.rows() != u.cols()) return false;
    auto id = ComplexMatrix::Identity(u.rows(), u.cols());
    return max_abs(u * u.adjoint() - id) <= tolerance;
}

/// Eigendecomposition X = rotation * diag(eigenvalues) * rotation^dagger.
struct Diagonalization {
    RealVector eigenvalues;  // descending
    ComplexMatrix rotation;  // columns are eigenvectors

    ComplexMatrix reassemble() const {
        return rotation * eigenvalues.cast<Complex>().asDiagonal() * rotation.adjoint();
    }
};

namespace detail {

inline int largest_component(const Eigen::VectorXcd& v) {
    int best = 0;
    double best_abs = -1.0;
    for (int i = 0; i < v.size(); ++i) {
        double a = std::abs(v(i));
        if (a > best_abs + 1e-12) {
            best_abs = a;
            best = i;
        }
    }
    return best;
}

inline ComplexMatrix phase_fixed(ComplexMatrix vectors) {
    for (Eigen::Index t = 0; t < vectors.cols(); ++t) {
        const int lead = largest_component(vectors.col(t));
        vectors.col(t) *= std::conj(vectors(lead, t) / std::abs(vectors(lead, t)));
        vectors(lead, t) = std::abs(vectors(lead, t));
    }
    return vectors;
}

// Replaces the columns of `vectors` (an orthonormal basis of one eigenspace)
// with a basis that depends only on the eigenspace itself.
inline ComplexMatrix canonical_eigenbasis(const ComplexMatrix& vectors) {
    const auto n = vectors.rows();
    const auto k = vectors.cols();
    ComplexMatrix projector = vectors * vectors.adjoint();
    ComplexMatrix basis(n, k);
    for (Eigen::Index t = 0; t < k; ++t) {
        double pick_norm = -1.0;
        Eigen::VectorXcd pick_vec;
        for (Eigen::Index c = 0; c < n; ++c) {
            Eigen::VectorXcd r = projector.col(c);
            if (t > 0) r -= basis.leftCols(t) * (basis.leftCols(t).adjoint() * r);
            double norm = r.norm();
            if (norm > pick_norm + 1e-12) {
                pick_norm = norm;
                pick_vec = std::move(r);
            }
        }
        basis.col(t) = pick_vec / pick_norm;
    }
    std::vector<std::pair<int, Eigen::Index>> order;
    for (Eigen::Index t = 0; t < k; ++t) {
        int lead = largest_component(basis.col(t));
        Complex phase = basis(lead, t) / std::abs(basis(lead, t));
        basis.col(t) *= std::conj(phase);
        basis(lead, t) = std::abs(basis(lead, t));
        order.emplace_back(lead, t);
    }
    std::stable_sort(order.begin(), order.end(), [](auto& x, auto& y) { return x.first < y.first; });
    ComplexMatrix sorted(n, k);
    for (Eigen::Index t = 0; t < k; ++t) sorted.col(t) = basis.col(order[static_cast<std::size_t>(t)].second);
    return sorted;
}

}  // namespace detail

/// Hermitian eigendecomposition with descending eigenvalues. Inside a cluster
/// of eigenvalues closer than the degeneracy gap, eigenvectors are ordered by
/// the position of their largest-magnitude component, which is made real
/// positive. A cluster whose spread would show in the reassembly keeps the
/// solver's vectors, phase-fixed the same way.
inline Diagonalization eigh(const ComplexMatrix& x) {
    require_square_finite(x, "matrix");
    const double scale = tolerance_scale(x);
    if (hermiticity_error(x) > tol::hermitian * scale)
        throw Error(ErrorKind::NotHermitian, "eigh requires a Hermitian matrix");
    ComplexMatrix h = 0.5 * (x + x.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");

    const auto n = h.rows();
    Diagonalization out;
    out.eigenvalues = solver.eigenvalues().reverse();
    ComplexMatrix vecs = solver.eigenvectors().rowwise().reverse();
    out.rotation.resize(n, n);

    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && out.eigenvalues(end - 1) - out.eigenvalues(end) < tol::degenerate_gap * scale) ++end;
        const Eigen::Index width = end - start;
        ComplexMatrix raw = vecs.middleCols(start, width);
        ComplexMatrix canon = detail::canonical_eigenbasis(raw);
        // the canonical mix is used only where the cluster is degenerate to reassembly precision
        const auto values = out.eigenvalues.segment(start, width).cast<Complex>().asDiagonal();
        const double mix_error =
            width > 1 ? max_abs(canon * values * canon.adjoint() - raw * values * raw.adjoint()) : 0.0;
        out.rotation.middleCols(start, width) =
            mix_error <= 0.1 * tol::reassembly * scale ? canon : detail::phase_fixed(raw);
        start = end;
    }

    if (!is_unitary(out.rotation) || max_abs(out.reassemble() - h) > tol::reassembly * scale)
        throw Error(ErrorKind::ConvergenceFailure, "eigendecomposition residual above tolerance");
    return out;
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& x) { return eigh(x).eigenvalues; }

/// Certified spin-j state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
public:
    Spin spin() const { return spin_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }
    const ComplexMatrix& matrix() const { return matrix_; }
    Complex operator()(int i, int k) const { return matrix_(i, k); }

private:
    DensityMatrix(Spin j, ComplexMatrix m) : spin_(j), matrix_(std::move(m)) {}
    friend DensityMatrix validate(const ComplexMatrix& raw, Spin j);

    Spin spin_;
    ComplexMatrix matrix_;
};

inline DensityMatrix validate(const ComplexMatrix& raw, Spin j) {
    require_square_finite(raw, "density matrix");
    if (j.twice() < 0 || raw.rows() != dimension(j))
        throw Error(ErrorKind::DimensionMismatch, "matrix is " + std::to_string(raw.rows()) + "x" +
                                                      std::to_string(raw.cols()) + " but j=" + j.str() + " needs " +
                                                      std::to_string(dimension(j)));
    if (raw.rows() > tol::max_dim)
        throw Error(ErrorKind::DimensionMismatch, "dimension above supported maximum " + std::to_string(tol::max_dim));
    double herm = hermiticity_error(raw);
    if (herm > tol::hermitian) throw Error(ErrorKind::NotHermitian, "max |rho_ik - conj(rho_ki)| = " + std::to_string(herm));
    double trace_err = std::abs(raw.trace() - Complex(1.0, 0.0));
    if (trace_err > tol::trace) throw Error(ErrorKind::TraceNotOne, "|Tr rho - 1| = " + std::to_string(trace_err));
    ComplexMatrix h = 0.5 * (raw + raw.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "eigenvalue check did not converge");
    double smallest = solver.eigenvalues()(0);
    if (smallest < -tol::psd) throw Error(ErrorKind::NotPositive, "smallest eigenvalue " + std::to_string(smallest));
    return DensityMatrix(j, std::move(h));
}

inline DensityMatrix validate(const ComplexMatrix& raw) {
    require_square_finite(raw, "density matrix");
    return validate(raw, spin_from_dim(static_cast<int>(raw.rows())));
}

inline double purity(const DensityMatrix& rho) {
    // Tr(rho^2) = sum |rho_ik|^2 for Hermitian rho
    return rho.matrix().squaredNorm();
}

inline double purity_gap(const DensityMatrix& rho) { return purity(rho) - 1.0 / rho.dim(); }

inline Diagonalization diagonalize(const DensityMatrix& rho) { return eigh(rho.matrix()); }

inline DensityMatrix maximally_mixed(Spin j) {
    const int n = dimension(j);
    return validate(ComplexMatrix::Identity(n, n) / static_cast<double>(n), j);
}

/// Projector onto the basis state with index k (m = j - k).
inline DensityMatrix basis_state(Spin j, int index) {
    const int n = dimension(j);
    if (index < 0 || index >= n) throw Error(ErrorKind::InvalidSpinLabel, "basis index out of range");
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m(index, index) = 1.0;
    return validate(m, j);
}

inline DensityMatrix diagonal_state(const std::vector<double>& r) {
    const int n = static_cast<int>(r.size());
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = r[static_cast<std::size_t>(i)];
    return validate(m);
}

namespace detail {
inline ComplexMatrix ginibre(Rng& rng, int rows, int cols) {
    ComplexMatrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            double re = rng.normal();
            double im = rng.normal();
            g(i, k) = Complex(re, im);
        }
    return g;
}

inline void require_dim(int n) {
    if (n < 1 || n > tol::max_dim)
        throw Error(ErrorKind::InvalidInput, "dimension must be in [1, " + std::to_string(tol::max_dim) + "]");
}
}  // namespace detail

/// Hilbert-Schmidt random state: G with iid standard complex Gaussian
/// entries, rho = G G^dagger / Tr(G G^dagger).
inline DensityMatrix random_density(int n, std::uint64_t seed) {
    detail::require_dim(n);
    Rng rng(seed);
    ComplexMatrix g = detail::ginibre(rng, n, n);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint());
    rho.diagonal() = rho.diagonal().real().cast<Complex>();
    // renormalize after symmetrization so the trace is 1 to rounding
    rho /= rho.trace().real();
    return validate(rho, spin_from_dim(n));
}

inline DensityMatrix random_pure(int n, std::uint64_t seed) {
    detail::require_dim(n);
    Rng rng(seed);
    Eigen::VectorXcd v = detail::ginibre(rng, n, 1).col(0);
    v.normalize();
    ComplexMatrix rho = v * v.adjoint();
    rho.diagonal() = rho.diagonal().real().cast<Complex>();
    return validate(rho, spin_from_dim(n));
}

/// Haar-random unitary (QR of a Ginibre matrix with phase-fixed R diagonal).
inline ComplexMatrix random_unitary(int n, std::uint64_t seed) {
    detail::require_dim(n);
    Rng rng(seed);
    ComplexMatrix g = detail::ginibre(rng, n, n);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
        Complex d = r(k, k);
        if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
    }
    return q;
}

inline DensityMatrix rotate(const DensityMatrix& rho, const ComplexMatrix& u) {
    ComplexMatrix m = u * rho.matrix() * u.adjoint();
    m = 0.5 * (m + m.adjoint());
    m /= m.trace().real();
    return validate(m, rho.spin());
}

}  // namespace spintomo
