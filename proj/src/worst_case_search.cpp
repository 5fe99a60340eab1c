#include "cdpep/empirical.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdpep::empirical {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

QuadraticInstance build_instance(const SamplerSpec& spec, const Eigen::VectorXd& spectrum, const Eigen::MatrixXd& Q,
                                 const Eigen::VectorXd& direction, const Eigen::VectorXd& xstar) {
    const int n = spec.n;
    require(spectrum.size() == n && Q.rows() == n && Q.cols() == n && direction.size() == n && xstar.size() == n,
            "build_instance: dimension mismatch");
    Eigen::MatrixXd A = Q * spectrum.cwiseMax(0.0).cwiseMin(spec.L).asDiagonal() * Q.transpose();
    A = 0.5 * (A + A.transpose()).eval();
    if (!spec.ell.empty()) {
        require(static_cast<int>(spec.ell.size()) == n, "build_instance: ell has the wrong length");
        // S A S with S <= I keeps the spectrum inside [0, L].
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) s(i) = A(i, i) > spec.ell[i] ? std::sqrt(spec.ell[i] / A(i, i)) : 1.0;
        A = s.asDiagonal() * A * s.asDiagonal();
    }
    for (int i = 0; i < n; ++i)
        if (!(A(i, i) > 1e-12)) throw std::domain_error("build_instance: degenerate diagonal");
    const Eigen::VectorXd b = A * xstar;
    QuadraticInstance inst(A, b, xstar + direction);
    const double d2 = inst.start_distance2(spec.norm);
    if (!(d2 > 1e-24)) throw std::domain_error("build_instance: start point is already optimal");
    return inst.with_start(inst.xstar() + std::sqrt(spec.delta / d2) * (inst.x0() - inst.xstar()));
}

namespace {

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd G(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) G(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    // Sign fix so the distribution is Haar.
    for (int j = 0; j < n; ++j)
        if (qr.matrixQR()(j, j) < 0.0) Q.col(j) = -Q.col(j);
    return Q;
}

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
}

struct Draw {
    Eigen::VectorXd spectrum, direction, xstar;
    Eigen::MatrixXd Q;
};

Draw draw(const SamplerSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, spec.L);
    Draw d;
    d.spectrum.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) d.spectrum(i) = unif(rng);
    if (spec.singular) d.spectrum(0) = 0.0;
    d.Q = random_orthogonal(spec.n, rng);
    d.direction = random_vector(spec.n, rng);
    d.xstar = random_vector(spec.n, rng);
    return d;
}

} // namespace

QuadraticInstance sample_instance(const SamplerSpec& spec, std::mt19937_64& rng) {
    require(spec.n >= 1, "sample_instance: n must be positive");
    require(spec.L > 0.0 && spec.delta > 0.0, "sample_instance: L and delta must be positive");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const Draw d = draw(spec, rng);
        try {
            return build_instance(spec, d.spectrum, d.Q, d.direction, d.xstar);
        } catch (const std::domain_error&) {
            // rejected draw
        }
    }
    throw std::runtime_error("sample_instance: no admissible draw after 1000 attempts");
}

double evaluate(const SearchTarget& t, const QuadraticInstance& inst, std::uint64_t seed) {
    switch (t.method) {
    case Method::rcd: {
        std::uint64_t count = 1;
        bool small = true;
        for (int k = 0; k < t.N && small; ++k) {
            count *= static_cast<std::uint64_t>(inst.n());
            small = count <= kEnumerationCap;
        }
        if (small) return run_rcd_exact(inst, t.steps, t.N);
        return run_rcd_mc(inst, t.steps, t.N, t.mc_samples, seed).mean;
    }
    case Method::ccd:
        return run_ccd(inst, t.steps, t.N);
    case Method::gauss_seidel:
        return run_gauss_seidel(inst, t.N).back();
    }
    return 0.0;
}

namespace {

SamplerSpec sampler_for(const SearchTarget& t) {
    SamplerSpec s;
    s.n = t.n;
    s.delta = t.delta;
    if (t.method == Method::gauss_seidel) {
        // Only lambda_max(D^{-1}A) matters; any scale works.
        s.L = 1.0;
        s.norm = Norm::diagonal;
    } else {
        s.L = t.L;
        s.ell = t.ell;
    }
    return s;
}

bool admissible(const SearchTarget& t, const QuadraticInstance& inst) {
    const double slack = 1e-9;
    if (t.method == Method::gauss_seidel) return inst.lambda_max_scaled() <= t.L * (1.0 + slack);
    if (inst.L() > t.L * (1.0 + slack)) return false;
    for (int i = 0; i < inst.n(); ++i)
        if (!t.ell.empty() && inst.A()(i, i) > t.ell[i] * (1.0 + slack)) return false;
    return true;
}

} // namespace

SearchResult worst_case_search(const SearchTarget& t, double bound, int budget, std::uint64_t seed, double slack) {
    require(t.n >= 1 && t.N >= 0, "worst_case_search: invalid target");
    require(budget >= 0, "worst_case_search: budget must be nonnegative");
    if (t.method != Method::gauss_seidel) {
        require(static_cast<int>(t.steps.size()) == t.N, "worst_case_search: steps must have length N");
        require(t.ell.empty() || static_cast<int>(t.ell.size()) == t.n, "worst_case_search: ell has the wrong length");
    }
    std::mt19937_64 rng(seed);
    const SamplerSpec spec = sampler_for(t);
    std::lognormal_distribution<double> jitter(0.0, 0.3);

    SearchResult res;
    res.best_gap = -std::numeric_limits<double>::infinity();
    auto consider = [&](const QuadraticInstance& inst) {
        const double g = evaluate(t, inst, seed + static_cast<std::uint64_t>(res.evaluations));
        ++res.evaluations;
        if (g > res.best_gap) {
            res.best_gap = g;
            res.instance = inst;
        }
        return g;
    };
    auto fresh = [&](Draw& d) -> std::optional<QuadraticInstance> {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            d = draw(spec, rng);
            try {
                auto inst = build_instance(spec, d.spectrum, d.Q, d.direction, d.xstar);
                if (admissible(t, inst)) return inst;
            } catch (const std::domain_error&) {
            }
        }
        return std::nullopt;
    };

    // Greedy climb with multiplicative perturbations of the spectrum and
    // the start direction; every 50th evaluation restarts from a fresh draw.
    Draw cur;
    auto inst = fresh(cur);
    if (!inst) throw std::runtime_error("worst_case_search: no admissible instance found");
    double cur_gap = consider(*inst);
    for (int e = 1; e <= budget; ++e) {
        if (e % 50 == 0) {
            inst = fresh(cur);
            if (inst) cur_gap = consider(*inst);
            continue;
        }
        Draw cand = cur;
        for (int i = 0; i < t.n; ++i) {
            cand.spectrum(i) = std::min(spec.L, cand.spectrum(i) * jitter(rng));
            cand.direction(i) *= jitter(rng);
        }
        try {
            auto next = build_instance(spec, cand.spectrum, cand.Q, cand.direction, cand.xstar);
            if (!admissible(t, next)) continue;
            const double g = consider(next);
            if (g > cur_gap) {
                cur_gap = g;
                cur = std::move(cand);
            }
        } catch (const std::domain_error&) {
        }
    }
    res.consistent = res.best_gap <= bound + slack;
    return res;
}

} // namespace cdpep::empirical
