#pragma once

// Spin tomograms w(m, u) = <j m| u rho u^dagger |j m>, their grid samples, the
// grid quantizer used for reconstruction, dual symbols and the tomographic
// trace pairing.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "spintomo/error.hpp"
#include "spintomo/half_int.hpp"
#include "spintomo/qstate.hpp"
#include "spintomo/su2.hpp"

namespace spintomo {

namespace tomo_tol {
inline constexpr double value_slack = 1e-12;
inline constexpr double row_sum = 1e-10;
inline constexpr double column_sum = 1e-8;
inline constexpr double kernel_cutoff = 1e-10;
}  // namespace tomo_tol

/// Rank-1 projector u^dagger |j m><j m| u.
struct Dequantizer {
    Spin j;
    HalfInt m;
    ComplexMatrix u;
    ComplexMatrix op;
};

namespace detail {
inline void require_unitary(const ComplexMatrix& u, int n) {
    if (u.rows() != n || u.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "unitary must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!u.allFinite() || !is_unitary(u)) throw Error(ErrorKind::NotUnitary, "matrix is not unitary within 1e-10");
}

inline void require_projection(Spin j, HalfInt m) {
    if (!is_valid_projection(j, m))
        throw Error(ErrorKind::InvalidSpinLabel, "m=" + m.str() + " is not a projection of j=" + j.str());
}
}  // namespace detail

inline Dequantizer make_dequantizer(Spin j, HalfInt m, const ComplexMatrix& u) {
    detail::require_projection(j, m);
    detail::require_unitary(u, dimension(j));
    Eigen::VectorXcd row = u.row(basis_index(j, m)).adjoint();
    return {j, m, u, row * row.adjoint()};
}

inline double tomogram_eval(const DensityMatrix& rho, HalfInt m, const ComplexMatrix& u) {
    const Spin j = rho.spin();
    detail::require_projection(j, m);
    detail::require_unitary(u, rho.dim());
    Eigen::RowVectorXcd row = u.row(basis_index(j, m));
    return (row * rho.matrix() * row.adjoint())(0, 0).real();
}

/// Grid-sampled tomogram: values(k, node) with k the descending-m index.
class Tomogram {
public:
    /// Certifies the probability and normalization invariants.
    static Tomogram from_values(QuadratureGrid grid, Eigen::MatrixXd values) {
        Tomogram t(std::move(grid), std::move(values));
        t.check_invariants();
        return t;
    }

    Spin spin() const { return grid_.spin(); }
    int dim() const { return dimension(grid_.spin()); }
    const QuadratureGrid& grid() const { return grid_; }
    const Eigen::MatrixXd& values() const { return values_; }
    double operator()(int k, std::size_t node) const { return values_(k, static_cast<Eigen::Index>(node)); }

    /// max over nodes of |sum_m w - 1|
    double row_sum_error() const { return (values_.colwise().sum().array() - 1.0).abs().maxCoeff(); }

    /// max over m of |(2j+1) sum_node weight w - 1|
    double column_sum_error() const {
        Eigen::Map<const Eigen::VectorXd> w(grid_.weights().data(), static_cast<Eigen::Index>(grid_.size()));
        Eigen::VectorXd integrals = values_ * w * static_cast<double>(dim());
        return (integrals.array() - 1.0).abs().maxCoeff();
    }

private:
    Tomogram(QuadratureGrid grid, Eigen::MatrixXd values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.rows() != dim() || values_.cols() != static_cast<Eigen::Index>(grid_.size()))
            throw Error(ErrorKind::DimensionMismatch, "tomogram table does not match grid");
    }

    void check_invariants() const {
        if (!values_.allFinite()) throw Error(ErrorKind::InvalidInput, "tomogram has non-finite values");
        if (values_.minCoeff() < -tomo_tol::value_slack || values_.maxCoeff() > 1.0 + tomo_tol::value_slack)
            throw Error(ErrorKind::InvalidInput, "tomogram value outside [0, 1]");
        if (double e = row_sum_error(); e > tomo_tol::row_sum)
            throw Error(ErrorKind::InvalidInput, "sum over m differs from 1 by " + std::to_string(e));
        if (double e = column_sum_error(); e > tomo_tol::column_sum)
            throw Error(ErrorKind::InvalidInput, "group-integral normalization off by " + std::to_string(e));
    }

    QuadratureGrid grid_;
    Eigen::MatrixXd values_;
};

inline Tomogram tomogram_sample(const DensityMatrix& rho, const QuadratureGrid& grid) {
    if (grid.spin() != rho.spin())
        throw Error(ErrorKind::GridMismatch, "grid built for j=" + grid.spin().str() + ", state has j=" + rho.spin().str());
    const int n = rho.dim();
    Eigen::MatrixXd values(n, static_cast<Eigen::Index>(grid.size()));
    IrrepSweep irrep(rho.spin());
    for (std::size_t node = 0; node < grid.size(); ++node) {
        ComplexMatrix u = irrep(grid.nodes()[node]);
        ComplexMatrix rotated = u * rho.matrix() * u.adjoint();
        values.col(static_cast<Eigen::Index>(node)) = rotated.diagonal().real();
    }
    try {
        return Tomogram::from_values(grid, std::move(values));
    } catch (const Error& e) {
        throw Error(ErrorKind::NumericalFailure, std::string("sampled tomogram failed its invariants: ") + e.what());
    }
}

// Orthonormal (Hilbert-Schmidt) basis of N x N Hermitian matrices:
// index a*N+a -> e_a e_a^T; for a < b, a*N+b -> symmetric pair / sqrt2 and
// b*N+a -> antisymmetric pair (-i e_a e_b^T + i e_b e_a^T) / sqrt2.
namespace hermitian_basis {

inline Eigen::VectorXd coordinates(const ComplexMatrix& x) {
    const auto n = x.rows();
    Eigen::VectorXd c(n * n);
    const double r2 = std::sqrt(2.0);
    for (Eigen::Index a = 0; a < n; ++a) {
        c(a * n + a) = x(a, a).real();
        for (Eigen::Index b = a + 1; b < n; ++b) {
            // Tr(E X) for the symmetric and antisymmetric elements
            c(a * n + b) = r2 * x(b, a).real();
            c(b * n + a) = r2 * x(b, a).imag();
        }
    }
    return c;
}

inline ComplexMatrix from_coordinates(const Eigen::VectorXd& c, Eigen::Index n) {
    ComplexMatrix x(n, n);
    const double inv_r2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index a = 0; a < n; ++a) {
        x(a, a) = c(a * n + a);
        for (Eigen::Index b = a + 1; b < n; ++b) {
            Complex lower(c(a * n + b) * inv_r2, c(b * n + a) * inv_r2);
            x(b, a) = lower;
            x(a, b) = std::conj(lower);
        }
    }
    return x;
}

/// Coordinates of the sampling functional X -> <k| u X u^dagger |k>.
inline Eigen::VectorXd sampling_row(const ComplexMatrix& u, Eigen::Index k) {
    const auto n = u.cols();
    Eigen::VectorXd c(n * n);
    const double r2 = std::sqrt(2.0);
    for (Eigen::Index a = 0; a < n; ++a) {
        c(a * n + a) = std::norm(u(k, a));
        for (Eigen::Index b = a + 1; b < n; ++b) {
            Complex z = u(k, a) * std::conj(u(k, b));
            c(a * n + b) = r2 * z.real();
            c(b * n + a) = r2 * z.imag();
        }
    }
    return c;
}

}  // namespace hermitian_basis

/// Grid quantizer: Hermitian kernels K(m, node) with
/// sum_m sum_node weight * w_rho(m, node) * K(m, node) = rho for every state.
/// K is the weighted least-squares inverse of the sampling map on the space of
/// Hermitian operators, stored as coordinates in hermitian_basis.
class ReconstructionMap {
public:
    Spin spin() const { return grid_.spin(); }
    int dim() const { return dimension(grid_.spin()); }
    const QuadratureGrid& grid() const { return grid_; }

    /// coefficients(p, k*G + node): coordinate p of K(m_k, node)
    const Eigen::MatrixXd& coefficients() const { return coefficients_; }

    ComplexMatrix kernel(int k, std::size_t node) const {
        const auto col = static_cast<Eigen::Index>(k * grid_.size() + node);
        return hermitian_basis::from_coordinates(coefficients_.col(col), dim());
    }

    /// Singular values of the weighted sampling map, descending.
    const Eigen::VectorXd& spectrum() const { return spectrum_; }

private:
    ReconstructionMap(QuadratureGrid grid, Eigen::MatrixXd coefficients, Eigen::VectorXd spectrum)
        : grid_(std::move(grid)), coefficients_(std::move(coefficients)), spectrum_(std::move(spectrum)) {}
    friend ReconstructionMap build_reconstruction_map(Spin j, const QuadratureGrid& grid);

    QuadratureGrid grid_;
    Eigen::MatrixXd coefficients_;
    Eigen::VectorXd spectrum_;
};

inline ReconstructionMap build_reconstruction_map(Spin j, const QuadratureGrid& grid) {
    if (grid.spin() != j) throw Error(ErrorKind::GridMismatch, "grid built for j=" + grid.spin().str());
    const int n = dimension(j);
    const Eigen::Index dims = static_cast<Eigen::Index>(n) * n;
    const auto nodes = static_cast<Eigen::Index>(grid.size());
    const Eigen::Index samples = n * nodes;

    // sampling matrix, one row per (k, node)
    Eigen::MatrixXd s(samples, dims);
    Eigen::VectorXd w(samples);
    IrrepSweep irrep(j);
    for (Eigen::Index node = 0; node < nodes; ++node) {
        ComplexMatrix u = irrep(grid.nodes()[static_cast<std::size_t>(node)]);
        for (int k = 0; k < n; ++k) {
            s.row(k * nodes + node) = hermitian_basis::sampling_row(u, k).transpose();
            w(k * nodes + node) = grid.weights()[static_cast<std::size_t>(node)];
        }
    }

    Eigen::MatrixXd normal = s.transpose() * w.asDiagonal() * s;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(normal);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "normal-equation eigensolve failed");
    Eigen::VectorXd lambda = solver.eigenvalues();
    const double top = lambda.maxCoeff();
    const double cutoff = tomo_tol::kernel_cutoff * top;
    Eigen::Index kept = (lambda.array() > cutoff).count();
    if (kept < dims)
        throw Error(ErrorKind::RankDeficient, "sampling map resolves " + std::to_string(kept) + " of " +
                                                  std::to_string(dims) + " operator dimensions");
    Eigen::MatrixXd inverse = solver.eigenvectors() * lambda.cwiseInverse().asDiagonal() *
                              solver.eigenvectors().transpose();
    Eigen::MatrixXd coefficients = inverse * s.transpose();
    Eigen::VectorXd spectrum = lambda.reverse().cwiseSqrt();
    return ReconstructionMap(grid, std::move(coefficients), std::move(spectrum));
}

namespace detail {
inline void require_same_grid(const QuadratureGrid& a, const QuadratureGrid& b) {
    if (!(a == b)) throw Error(ErrorKind::GridMismatch, "tables were built on different grids");
}

inline Eigen::VectorXd weighted_samples(const Tomogram& t) {
    const auto nodes = static_cast<Eigen::Index>(t.grid().size());
    Eigen::VectorXd flat(t.dim() * nodes);
    for (int k = 0; k < t.dim(); ++k)
        for (Eigen::Index node = 0; node < nodes; ++node)
            flat(k * nodes + node) = t.values()(k, node) * t.grid().weights()[static_cast<std::size_t>(node)];
    return flat;
}
}  // namespace detail

inline ComplexMatrix reconstruct_operator(const Tomogram& t, const ReconstructionMap& map) {
    detail::require_same_grid(t.grid(), map.grid());
    Eigen::VectorXd coords = map.coefficients() * detail::weighted_samples(t);
    return hermitian_basis::from_coordinates(coords, t.dim());
}

inline DensityMatrix reconstruct(const Tomogram& t, const ReconstructionMap& map) {
    return validate(reconstruct_operator(t, map), t.spin());
}

/// w_A^d(m, node) = Tr(A K(m, node)).
class DualSymbol {
public:
    DualSymbol(QuadratureGrid grid, Eigen::MatrixXd values) : grid_(std::move(grid)), values_(std::move(values)) {}

    Spin spin() const { return grid_.spin(); }
    const QuadratureGrid& grid() const { return grid_; }
    const Eigen::MatrixXd& values() const { return values_; }

private:
    QuadratureGrid grid_;
    Eigen::MatrixXd values_;
};

inline DualSymbol dual_symbol(const ComplexMatrix& a, const ReconstructionMap& map) {
    if (a.rows() != map.dim() || a.cols() != map.dim())
        throw Error(ErrorKind::DimensionMismatch, "operator must be " + std::to_string(map.dim()) + "x" +
                                                      std::to_string(map.dim()));
    require_square_finite(a, "operator");
    if (hermiticity_error(a) > tol::hermitian * tolerance_scale(a))
        throw Error(ErrorKind::NotHermitian, "dual symbols are defined here for Hermitian operators");
    // Tr(A E_p) are exactly the Hermitian-basis coordinates of A
    Eigen::VectorXd flat = map.coefficients().transpose() * hermitian_basis::coordinates(0.5 * (a + a.adjoint()));
    const auto nodes = static_cast<Eigen::Index>(map.grid().size());
    Eigen::MatrixXd values(map.dim(), nodes);
    for (int k = 0; k < map.dim(); ++k) values.row(k) = flat.segment(k * nodes, nodes).transpose();
    return DualSymbol(map.grid(), std::move(values));
}

inline double pair_average(const Tomogram& t, const DualSymbol& d) {
    detail::require_same_grid(t.grid(), d.grid());
    Eigen::Map<const Eigen::VectorXd> w(t.grid().weights().data(), static_cast<Eigen::Index>(t.grid().size()));
    return ((t.values().array() * d.values().array()).matrix() * w).sum();
}

}  // namespace spintomo
