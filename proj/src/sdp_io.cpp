// Text dump of a ConicProblem:
//
//   conic-problem 1
//   psd_dim <n>
//   num_free <k>
//   num_constraints <m>
//   objective <max|min> <constant>
//   X <row> <col> <value>        lower-triangle entries, row >= col
//   y <index> <value>
//   end
//   constraint <eq|le> <rhs>     repeated m times, same body
//   ...
//   end
//
// Matrix entries are symmetric: "X 2 0 v" stands for both (2,0) and (0,2).

#include "cdpep/sdp.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cdpep::sdp {

namespace {

void write_body(std::ostream& os, const SparseSym& x, const Eigen::VectorXd& y) {
    for (const auto& e : x.entries()) fmt::print(os, "X {} {} {:.17g}\n", e.row, e.col, e.value);
    for (Eigen::Index k = 0; k < y.size(); ++k)
        if (y(k) != 0.0) fmt::print(os, "y {} {:.17g}\n", k, y(k));
    os << "end\n";
}

std::string expect_word(std::istream& is) {
    std::string w;
    if (!(is >> w)) throw std::runtime_error("read_problem: unexpected end of input");
    return w;
}

template <class T>
T expect_value(std::istream& is, const char* what) {
    T v{};
    if (!(is >> v)) throw std::runtime_error(fmt::format("read_problem: expected {}", what));
    return v;
}

void expect_key(std::istream& is, const std::string& key) {
    const auto w = expect_word(is);
    if (w != key) throw std::runtime_error(fmt::format("read_problem: expected '{}', got '{}'", key, w));
}

void read_body(std::istream& is, int dim, int nf, SparseSym& x, Eigen::VectorXd& y) {
    std::vector<SymEntry> es;
    y = Eigen::VectorXd::Zero(nf);
    for (;;) {
        const auto w = expect_word(is);
        if (w == "end") break;
        if (w == "X") {
            const int r = expect_value<int>(is, "row index");
            const int c = expect_value<int>(is, "column index");
            const double v = expect_value<double>(is, "value");
            if (r < 0 || c < 0 || r >= dim || c >= dim) throw std::runtime_error("read_problem: X index out of range");
            es.push_back({r, c, v});
        } else if (w == "y") {
            const int k = expect_value<int>(is, "free index");
            const double v = expect_value<double>(is, "value");
            if (k < 0 || k >= nf) throw std::runtime_error("read_problem: y index out of range");
            y(k) += v;
        } else {
            throw std::runtime_error(fmt::format("read_problem: unexpected token '{}'", w));
        }
    }
    x = SparseSym(std::move(es));
}

} // namespace

void write_problem(std::ostream& os, const ConicProblem& p) {
    os << "conic-problem 1\n";
    fmt::print(os, "psd_dim {}\nnum_free {}\nnum_constraints {}\n", p.psd_dim, p.num_free, p.constraints.size());
    fmt::print(os, "objective {} {:.17g}\n", p.objective.sense == ObjectiveSense::maximize ? "max" : "min",
               p.objective.constant);
    write_body(os, p.objective.coeff_x, p.objective.coeff_y);
    for (const auto& c : p.constraints) {
        fmt::print(os, "constraint {} {:.17g}\n", c.sense == Sense::eq ? "eq" : "le", c.rhs);
        write_body(os, c.coeff_x, c.coeff_y);
    }
}

ConicProblem read_problem(std::istream& is) {
    expect_key(is, "conic-problem");
    if (expect_value<int>(is, "format version") != 1) throw std::runtime_error("read_problem: unsupported version");
    ConicProblem p;
    expect_key(is, "psd_dim");
    p.psd_dim = expect_value<int>(is, "psd_dim");
    expect_key(is, "num_free");
    p.num_free = expect_value<int>(is, "num_free");
    expect_key(is, "num_constraints");
    const auto m = expect_value<long>(is, "num_constraints");
    if (p.psd_dim < 1 || p.num_free < 0 || m < 0) throw std::runtime_error("read_problem: invalid dimensions");
    expect_key(is, "objective");
    const auto sense = expect_word(is);
    if (sense != "max" && sense != "min") throw std::runtime_error("read_problem: objective sense must be max or min");
    p.objective.sense = sense == "max" ? ObjectiveSense::maximize : ObjectiveSense::minimize;
    p.objective.constant = expect_value<double>(is, "objective constant");
    read_body(is, p.psd_dim, p.num_free, p.objective.coeff_x, p.objective.coeff_y);
    p.constraints.resize(static_cast<std::size_t>(m));
    for (auto& c : p.constraints) {
        expect_key(is, "constraint");
        const auto s = expect_word(is);
        if (s != "eq" && s != "le") throw std::runtime_error("read_problem: constraint sense must be eq or le");
        c.sense = s == "eq" ? Sense::eq : Sense::le;
        c.rhs = expect_value<double>(is, "rhs");
        read_body(is, p.psd_dim, p.num_free, c.coeff_x, c.coeff_y);
    }
    p.validate();
    return p;
}

} // namespace cdpep::sdp
