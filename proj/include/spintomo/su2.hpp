#pragma once

// SU(2) irreducible representation matrices in the |j m> basis (m descending)
// and product quadrature grids for the normalized Euler-angle group integral.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spintomo/error.hpp"
#include "spintomo/half_int.hpp"
#include "spintomo/qstate.hpp"

namespace spintomo {

struct EulerAngles {
    double alpha = 0.0;  // [0, 2pi)
    double beta = 0.0;   // [0, pi]
    double gamma = 0.0;  // [0, 2pi)

    bool in_range() const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        return alpha >= 0.0 && alpha < two_pi && beta >= 0.0 && beta <= std::numbers::pi && gamma >= 0.0 &&
               gamma < two_pi;
    }

    bool operator==(const EulerAngles&) const = default;
};

/// Wigner small-d element d^j_{m'm}(beta) from the factorial sum, evaluated
/// with log-factorials and accumulated in long double.
inline double wigner_small_d(Spin j, HalfInt row_m, HalfInt col_m, double beta) {
    if (!is_valid_projection(j, row_m) || !is_valid_projection(j, col_m))
        throw Error(ErrorKind::InvalidSpinLabel, "projection outside spin multiplet");
    using ld = long double;
    const int jp = (j.twice() + row_m.twice()) / 2;  // j + m'
    const int jm = (j.twice() - row_m.twice()) / 2;  // j - m'
    const int ip = (j.twice() + col_m.twice()) / 2;  // j + m
    const int im = (j.twice() - col_m.twice()) / 2;  // j - m
    const ld c = std::cos(0.5L * static_cast<ld>(beta));
    const ld s = std::sin(0.5L * static_cast<ld>(beta));
    const ld log_norm = 0.5L * (std::lgamma(jp + 1.0L) + std::lgamma(jm + 1.0L) + std::lgamma(ip + 1.0L) +
                                std::lgamma(im + 1.0L));
    const int k_min = std::max(0, ip - jp);
    const int k_max = std::min(ip, jm);
    ld sum = 0.0L;
    for (int k = k_min; k <= k_max; ++k) {
        const ld log_den = std::lgamma(ip - k + 1.0L) + std::lgamma(k + 1.0L) + std::lgamma(jm - k + 1.0L) +
                           std::lgamma(k + jp - ip + 1.0L);
        const int sign_exp = k + jp - ip;  // k - m + m'
        const ld sign = (sign_exp % 2 == 0) ? 1.0L : -1.0L;
        const int cos_pow = ip + jm - 2 * k;
        const int sin_pow = 2 * k + jp - ip;
        sum += sign * std::exp(log_norm - log_den) * std::pow(c, cos_pow) * std::pow(s, sin_pow);
    }
    return static_cast<double>(sum);
}

inline Eigen::MatrixXd wigner_small_d_matrix(Spin j, double beta) {
    checked_spin(j);
    const int n = dimension(j);
    Eigen::MatrixXd d(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) d(r, c) = wigner_small_d(j, magnetic_at(j, r), magnetic_at(j, c), beta);
    return d;
}

namespace detail {
inline ComplexMatrix apply_phases(Spin j, const Eigen::MatrixXd& d, double alpha, double gamma) {
    const int n = dimension(j);
    ComplexMatrix u(n, n);
    for (int r = 0; r < n; ++r) {
        const double mr = magnetic_at(j, r).value();
        for (int c = 0; c < n; ++c) {
            const double mc = magnetic_at(j, c).value();
            u(r, c) = std::polar(1.0, -(mr * alpha + mc * gamma)) * d(r, c);
        }
    }
    return u;
}
}  // namespace detail

/// D^j_{m'm}(alpha, beta, gamma) = exp(-i m' alpha) d^j_{m'm}(beta) exp(-i m gamma).
inline ComplexMatrix irrep_matrix(Spin j, const EulerAngles& angles) {
    checked_spin(j);
    if (!angles.in_range()) throw Error(ErrorKind::InvalidInput, "Euler angles out of range");
    return detail::apply_phases(j, wigner_small_d_matrix(j, angles.beta), angles.alpha, angles.gamma);
}

/// irrep_matrix over a run of nodes; d(beta) is reused while beta repeats.
class IrrepSweep {
public:
    explicit IrrepSweep(Spin j) : j_(checked_spin(j)) {}

    ComplexMatrix operator()(const EulerAngles& angles) {
        if (!angles.in_range()) throw Error(ErrorKind::InvalidInput, "Euler angles out of range");
        if (!cached_ || angles.beta != beta_) {
            d_ = wigner_small_d_matrix(j_, angles.beta);
            beta_ = angles.beta;
            cached_ = true;
        }
        return detail::apply_phases(j_, d_, angles.alpha, angles.gamma);
    }

private:
    Spin j_;
    bool cached_ = false;
    double beta_ = 0.0;
    Eigen::MatrixXd d_;
};

/// Spin operators in the descending-m basis.
struct SpinOperators {
    ComplexMatrix jz;
    ComplexMatrix jplus;
    ComplexMatrix jminus;

    ComplexMatrix jx() const { return 0.5 * (jplus + jminus); }
    ComplexMatrix jy() const { return Complex(0.0, -0.5) * (jplus - jminus); }
};

inline SpinOperators spin_operators(Spin j) {
    checked_spin(j);
    const int n = dimension(j);
    SpinOperators ops{ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n)};
    const double jv = j.value();
    for (int k = 0; k < n; ++k) {
        const double m = magnetic_at(j, k).value();
        ops.jz(k, k) = m;
        // <m+1|J+|m> sits one row above column k
        if (k > 0) ops.jplus(k - 1, k) = std::sqrt((jv - m) * (jv + m + 1.0));
    }
    ops.jminus = ops.jplus.adjoint();
    return ops;
}

struct GridOrders {
    int n_beta = 0;
    int n_alpha = 0;
    int n_gamma = 0;

    bool operator==(const GridOrders&) const = default;
};

inline GridOrders default_orders(Spin j) {
    return {j.twice() + 2, 2 * j.twice() + 2, 2 * j.twice() + 2};
}

inline GridOrders minimum_orders(Spin j) {
    return {j.twice() + 1, 2 * j.twice() + 1, 2 * j.twice() + 1};
}

/// Nodes and weights discretizing (1/8pi^2) dalpha sin(beta) dbeta dgamma.
class QuadratureGrid {
public:
    QuadratureGrid(Spin j, std::vector<EulerAngles> nodes, std::vector<double> weights)
        : j_(checked_spin(j)), nodes_(std::move(nodes)), weights_(std::move(weights)) {
        if (nodes_.size() != weights_.size())
            throw Error(ErrorKind::InvalidInput, "grid node and weight counts differ");
        if (nodes_.empty()) throw Error(ErrorKind::InvalidInput, "grid has no nodes");
        double total = 0.0;
        for (double w : weights_) {
            if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidInput, "grid weights must be positive");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw Error(ErrorKind::InvalidInput, "grid weights sum to " + std::to_string(total) + ", expected 1");
        for (const auto& node : nodes_)
            if (!node.in_range()) throw Error(ErrorKind::InvalidInput, "grid node outside Euler-angle ranges");
    }

    Spin spin() const { return j_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<EulerAngles>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    bool operator==(const QuadratureGrid&) const = default;

private:
    Spin j_;
    std::vector<EulerAngles> nodes_;
    std::vector<double> weights_;
};

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch), nodes ascending.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "Gauss-Legendre eigensolve failed");
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double v0 = solver.eigenvectors()(0, i);
        nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        weights[static_cast<std::size_t>(i)] = 2.0 * v0 * v0;
    }
}

/// Gauss-Legendre in cos(beta), uniform periodic nodes in alpha and gamma.
/// Node order: beta (ascending) outermost, then alpha, then gamma.
inline QuadratureGrid quadrature_grid(Spin j, GridOrders orders) {
    checked_spin(j);
    const GridOrders lo = minimum_orders(j);
    if (orders.n_beta < lo.n_beta || orders.n_alpha < lo.n_alpha || orders.n_gamma < lo.n_gamma)
        throw Error(ErrorKind::GridTooCoarse, "orders (" + std::to_string(orders.n_beta) + "," +
                                                  std::to_string(orders.n_alpha) + "," + std::to_string(orders.n_gamma) +
                                                  ") below minimum (" + std::to_string(lo.n_beta) + "," +
                                                  std::to_string(lo.n_alpha) + "," + std::to_string(lo.n_gamma) +
                                                  ") for j=" + j.str());
    std::vector<double> x, wx;
    gauss_legendre(orders.n_beta, x, wx);
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<EulerAngles> nodes;
    std::vector<double> weights;
    const std::size_t total = static_cast<std::size_t>(orders.n_beta) * orders.n_alpha * orders.n_gamma;
    nodes.reserve(total);
    weights.reserve(total);
    const double periodic = 1.0 / (static_cast<double>(orders.n_alpha) * orders.n_gamma);
    for (int ib = orders.n_beta - 1; ib >= 0; --ib) {
        const double beta = std::acos(std::clamp(x[static_cast<std::size_t>(ib)], -1.0, 1.0));
        const double wb = 0.5 * wx[static_cast<std::size_t>(ib)] * periodic;
        for (int ia = 0; ia < orders.n_alpha; ++ia)
            for (int ig = 0; ig < orders.n_gamma; ++ig) {
                nodes.push_back({two_pi * ia / orders.n_alpha, beta, two_pi * ig / orders.n_gamma});
                weights.push_back(wb);
            }
    }
    return QuadratureGrid(j, std::move(nodes), std::move(weights));
}

inline QuadratureGrid quadrature_grid(Spin j) { return quadrature_grid(j, default_orders(j)); }

}  // namespace spintomo
