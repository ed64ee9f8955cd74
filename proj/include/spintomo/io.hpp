#pragma once

// File formats: density/operator JSON, witness JSON, tomogram CSV and scan
// CSVs. Every float is written with 17 significant digits.

#include "json.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spintomo/error.hpp"
#include "spintomo/jsmap.hpp"
#include "spintomo/qstate.hpp"
#include "spintomo/su2.hpp"
#include "spintomo/tomography.hpp"
#include "spintomo/witness.hpp"

namespace spintomo::io {

using json = nlohmann::ordered_json;

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline bool is_scalar(const json& v) { return !v.is_array() && !v.is_object(); }

inline void write_scalar(std::ostream& out, const json& v) {
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw Error(ErrorKind::NumericalFailure, "cannot serialize a non-finite value");
        out << format_double(x);
    } else {
        out << v.dump();
    }
}

inline void write_value(std::ostream& out, const json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent), ' ');
    if (v.is_object()) {
        if (v.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out << ",\n";
            first = false;
            out << pad << json(it.key()).dump() << ": ";
            write_value(out, it.value(), indent + 2);
        }
        out << "\n" << close_pad << "}";
    } else if (v.is_array()) {
        bool flat = true;
        for (const auto& e : v) flat = flat && is_scalar(e);
        if (flat) {
            out << "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out << ", ";
                write_scalar(out, v[i]);
            }
            out << "]";
            return;
        }
        out << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out << ",\n";
            out << pad;
            write_value(out, v[i], indent + 2);
        }
        out << "\n" << close_pad << "]";
    } else {
        write_scalar(out, v);
    }
}

}  // namespace detail

/// Writes `value` with keys in insertion order and floats as %.17g.
inline void write_json(std::ostream& out, const json& value) {
    detail::write_value(out, value, 0);
    out << "\n";
}

inline std::string to_json_string(const json& value) {
    std::ostringstream out;
    write_json(out, value);
    return out.str();
}

using ordered = json;

// ---------------------------------------------------------------------------
// matrices

inline ordered matrix_parts(const ComplexMatrix& m) {
    ordered re = ordered::array(), im = ordered::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered re_row = ordered::array(), im_row = ordered::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            re_row.push_back(m(i, k).real());
            im_row.push_back(m(i, k).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return ordered{{"re", std::move(re)}, {"im", std::move(im)}};
}

/// {"dim": N, "re": [[...]], "im": [[...]]}
inline ordered matrix_to_json(const ComplexMatrix& m) {
    ordered out;
    out["dim"] = m.rows();
    ordered parts = matrix_parts(m);
    out["re"] = std::move(parts["re"]);
    out["im"] = std::move(parts["im"]);
    return out;
}

namespace detail {
template <class Json>
Eigen::MatrixXd real_table(const Json& v, std::size_t dim, const char* name) {
    if (!v.is_array() || v.size() != dim)
        throw Error(ErrorKind::InvalidInput, std::string("'") + name + "' must be an array of " + std::to_string(dim) + " rows");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        const auto& row = v[i];
        if (!row.is_array() || row.size() != dim)
            throw Error(ErrorKind::InvalidInput, std::string("'") + name + "' row " + std::to_string(i) +
                                                     " is ragged (expected " + std::to_string(dim) + " entries)");
        for (std::size_t k = 0; k < dim; ++k) {
            if (!row[k].is_number()) throw Error(ErrorKind::InvalidInput, std::string("'") + name + "' has a non-number");
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].template get<double>();
        }
    }
    return out;
}
}  // namespace detail

/// Parses {"re", "im"} (plus "dim" when present); "im" may be omitted for a
/// real matrix. Ragged or mis-sized arrays are rejected.
template <class Json>
ComplexMatrix matrix_from_json(const Json& v) {
    if (!v.is_object() || !v.contains("re")) throw Error(ErrorKind::InvalidInput, "matrix JSON needs an 're' field");
    std::size_t dim = 0;
    if (v.contains("dim")) {
        if (!v["dim"].is_number_integer() || v["dim"].template get<long long>() < 1)
            throw Error(ErrorKind::InvalidInput, "'dim' must be a positive integer");
        dim = static_cast<std::size_t>(v["dim"].template get<long long>());
    } else {
        if (!v["re"].is_array()) throw Error(ErrorKind::InvalidInput, "'re' must be an array");
        dim = v["re"].size();
    }
    if (dim < 1 || dim > static_cast<std::size_t>(tol::max_dim))
        throw Error(ErrorKind::InvalidInput, "dimension must be in [1, 64]");
    Eigen::MatrixXd re = detail::real_table(v["re"], dim, "re");
    Eigen::MatrixXd im = v.contains("im") ? detail::real_table(v["im"], dim, "im")
                                          : Eigen::MatrixXd::Zero(re.rows(), re.cols()).eval();
    ComplexMatrix m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

inline ordered parse_json_text(std::istream& in) {
    try {
        return ordered::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
    }
}

inline DensityMatrix density_from_json(std::istream& in) { return validate(matrix_from_json(parse_json_text(in))); }

inline ordered density_to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix()); }

// ---------------------------------------------------------------------------
// witness

inline ordered witness_to_json(const WitnessPair& pair, double expectation) {
    PremiseReport premises = verify_premises(pair);
    ordered out;
    out["dim"] = pair.dim;
    out["a"] = pair.a;
    out["b"] = pair.b;
    out["A"] = matrix_parts(pair.A);
    out["B"] = matrix_parts(pair.B);
    out["expectation"] = expectation;
    out["bound"] = witness_bound(pair.dim);
    out["premises"] = ordered{{"minA", premises.min_a}, {"minB", premises.min_b}, {"minBminusA", premises.min_b_minus_a}};
    return out;
}

inline WitnessPair witness_from_json(const ordered& v) {
    if (!v.is_object() || !v.contains("A") || !v.contains("B"))
        throw Error(ErrorKind::InvalidInput, "witness JSON needs 'A' and 'B'");
    ComplexMatrix a = matrix_from_json(v["A"]);
    ComplexMatrix b = matrix_from_json(v["B"]);
    if (v.contains("dim") && v["dim"].is_number_integer() && v["dim"].get<long long>() != a.rows())
        throw Error(ErrorKind::InvalidInput, "'dim' does not match the operator size");
    return WitnessPair::from_operators(a, b);
}

inline ordered sector_to_json(const SectorOperator& op) {
    ordered out;
    out["j"] = op.spin().value();
    out["total_photons"] = op.total_photons();
    ordered basis = ordered::array();
    for (auto f : op.basis()) basis.push_back(ordered::array({f.n_a, f.n_b}));
    out["basis"] = std::move(basis);
    ordered parts = matrix_parts(op.matrix());
    out["re"] = std::move(parts["re"]);
    out["im"] = std::move(parts["im"]);
    return out;
}

inline ordered two_mode_witness_to_json(const TwoModeWitness& w) {
    ordered out = witness_to_json(w.qudit, w.expectation);
    out["n_a"] = w.label.n_a;
    out["n_b"] = w.label.n_b;
    out["j"] = w.spin.j.value();
    out["m"] = w.spin.m.value();
    out["qudit_expectation"] = w.qudit_expectation;
    out["W"] = sector_to_json(w.W);
    return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* tomogram_header = "m,alpha,beta,gamma,weight,value";
inline constexpr const char* qutrit_header = "r1,r2,value";
inline constexpr const char* maxwitness_header = "N,pure_value,grid_max,bound";

/// One row per (m, node); m descending, nodes in grid order within each m.
inline void write_tomogram_csv(std::ostream& out, const Tomogram& t) {
    out << tomogram_header << "\n";
    const auto& grid = t.grid();
    for (int k = 0; k < t.dim(); ++k) {
        const std::string m = format_double(magnetic_at(t.spin(), k).value());
        for (std::size_t node = 0; node < grid.size(); ++node) {
            const auto& e = grid.nodes()[node];
            out << m << ',' << format_double(e.alpha) << ',' << format_double(e.beta) << ',' << format_double(e.gamma)
                << ',' << format_double(grid.weights()[node]) << ',' << format_double(t(k, node)) << "\n";
        }
    }
}

namespace detail {
inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_double(const std::string& text) {
    try {
        std::size_t used = 0;
        double x = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(x)) throw Error(ErrorKind::InvalidInput, "bad number '" + text + "'");
        return x;
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidInput, "bad number '" + text + "'");
    }
}

inline std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}
}  // namespace detail

inline Tomogram read_tomogram_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::strip_cr(line) != tomogram_header)
        throw Error(ErrorKind::InvalidInput, std::string("tomogram CSV header must be '") + tomogram_header + "'");
    struct Row {
        HalfInt m;
        EulerAngles node;
        double weight;
        double value;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        auto cells = detail::split_csv(line);
        if (cells.size() != 6) throw Error(ErrorKind::InvalidInput, "tomogram CSV row needs 6 fields: '" + line + "'");
        rows.push_back({HalfInt::parse(cells[0]),
                        {detail::parse_double(cells[1]), detail::parse_double(cells[2]), detail::parse_double(cells[3])},
                        detail::parse_double(cells[4]),
                        detail::parse_double(cells[5])});
    }
    if (rows.empty()) throw Error(ErrorKind::InvalidInput, "tomogram CSV has no rows");
    const HalfInt top = rows.front().m;
    if (top.twice() < 0) throw Error(ErrorKind::InvalidInput, "first row must carry m = j");
    const Spin j = top;
    const int n = dimension(j);
    if (rows.size() % static_cast<std::size_t>(n) != 0)
        throw Error(ErrorKind::InvalidInput, "row count is not a multiple of 2j+1");
    const std::size_t nodes = rows.size() / static_cast<std::size_t>(n);
    std::vector<EulerAngles> grid_nodes;
    std::vector<double> weights;
    Eigen::MatrixXd values(n, static_cast<Eigen::Index>(nodes));
    for (int k = 0; k < n; ++k) {
        for (std::size_t node = 0; node < nodes; ++node) {
            const Row& row = rows[static_cast<std::size_t>(k) * nodes + node];
            if (row.m != magnetic_at(j, k))
                throw Error(ErrorKind::InvalidInput, "rows must be grouped by m descending from m = j");
            if (k == 0) {
                grid_nodes.push_back(row.node);
                weights.push_back(row.weight);
            } else if (!(grid_nodes[node] == row.node) || weights[node] != row.weight) {
                throw Error(ErrorKind::InvalidInput, "every m block must list the same nodes in the same order");
            }
            values(k, static_cast<Eigen::Index>(node)) = row.value;
        }
    }
    return Tomogram::from_values(QuadratureGrid(j, std::move(grid_nodes), std::move(weights)), std::move(values));
}

inline void write_qutrit_csv(std::ostream& out, const std::vector<QutritScanRow>& rows) {
    out << qutrit_header << "\n";
    for (const auto& r : rows) out << format_double(r.r1) << ',' << format_double(r.r2) << ',' << format_double(r.value) << "\n";
}

inline void write_maxwitness_csv(std::ostream& out, const std::vector<MaxWitnessRow>& rows) {
    out << maxwitness_header << "\n";
    for (const auto& r : rows)
        out << r.n << ',' << format_double(r.pure_value) << ',' << format_double(r.grid_max) << ','
            << format_double(r.bound) << "\n";
}

}  // namespace spintomo::io
