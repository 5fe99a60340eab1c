// Plain text instance format:
//
//   n
//   A, one row per line
//   b
//   x0
//
// Values are written with 17 significant digits so a round trip is exact.

#include "cdpep/empirical.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace cdpep::empirical {

namespace {

void write_row(std::ostream& os, const double* data, Eigen::Index n, Eigen::Index stride) {
    for (Eigen::Index j = 0; j < n; ++j) os << (j ? " " : "") << fmt::format("{:.17g}", data[j * stride]);
    os << '\n';
}

double read_value(std::istream& is, const char* what) {
    double v = 0.0;
    if (!(is >> v)) throw std::runtime_error(fmt::format("read_instance: could not read {}", what));
    return v;
}

} // namespace

void write_instance(std::ostream& os, const QuadraticInstance& inst) {
    const Eigen::Index n = inst.n();
    os << n << '\n';
    for (Eigen::Index i = 0; i < n; ++i) write_row(os, inst.A().data() + i, n, n);
    write_row(os, inst.b().data(), n, 1);
    write_row(os, inst.x0().data(), n, 1);
}

QuadraticInstance read_instance(std::istream& is) {
    long n = 0;
    if (!(is >> n) || n < 1) throw std::runtime_error("read_instance: missing or invalid dimension");
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n), x0(n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) A(i, j) = read_value(is, "A");
    for (long i = 0; i < n; ++i) b(i) = read_value(is, "b");
    for (long i = 0; i < n; ++i) x0(i) = read_value(is, "x0");
    return QuadraticInstance(std::move(A), std::move(b), std::move(x0));
}

void save_instance(const std::string& path, const QuadraticInstance& inst) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error(fmt::format("cannot open {} for writing", path));
    write_instance(os, inst);
    if (!os) throw std::runtime_error(fmt::format("write to {} failed", path));
}

QuadraticInstance load_instance(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error(fmt::format("cannot open {}", path));
    return read_instance(is);
}

} // namespace cdpep::empirical
