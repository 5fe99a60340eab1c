// Infeasible primal-dual interior-point method (HKM direction with
// Mehrotra predictor-corrector) on the standardized maximization form.

#include "sdp_detail.hpp"

#include "cdpep/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cdpep::sdp::detail {

namespace {

constexpr double kStepFraction = 0.9;

Eigen::MatrixXd sym(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

// Largest alpha with S + alpha dS psd, for positive definite S. Falls back to
// a clipped eigendecomposition when S is too close to singular for Cholesky.
double max_step(const Eigen::MatrixXd& S, const Eigen::MatrixXd& dS) {
    Eigen::MatrixXd t;
    Eigen::LLT<Eigen::MatrixXd> chol(S);
    if (chol.info() == Eigen::Success) {
        t = chol.matrixL().solve(dS);
        t = chol.matrixL().solve(t.transpose()).eval();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        const double floor = std::max(1e-300, 1e-15 * es.eigenvalues().cwiseAbs().maxCoeff());
        const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd R = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
        t = R * dS * R;
    }
    const double lmin = linalg::min_eigenvalue_dense(sym(t));
    return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

bool positive_definite(const Eigen::MatrixXd& S) { return Eigen::LLT<Eigen::MatrixXd>(S).info() == Eigen::Success; }

double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
    return a;
}

struct Direction {
    Eigen::MatrixXd dX;
    Eigen::MatrixXd dZ;
    Eigen::VectorXd dy;
    Eigen::VectorXd dlam;
    Eigen::VectorXd ds;
};

class Ipm {
public:
    Ipm(const Standardized& s, const SolverConfig& cfg)
        : s_(s), cfg_(cfg), n_(s.n), m_(s.m()), nf_(s.nf), pattern_(s.A, s.n) {
        for (int i = 0; i < m_; ++i)
            if (s_.is_le[i]) le_.push_back(i);
        const double init = std::max(10.0, std::sqrt(static_cast<double>(n_)));
        X_ = init * Eigen::MatrixXd::Identity(n_, n_);
        Z_ = init * Eigen::MatrixXd::Identity(n_, n_);
        y_ = Eigen::VectorXd::Zero(nf_);
        lam_ = Eigen::VectorXd::Zero(m_);
        s_le_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(le_.size()), init);
        for (std::size_t k = 0; k < le_.size(); ++k) lam_(le_[k]) = init;
        Cd_ = Eigen::MatrixXd::Zero(n_, n_);
        s_.C.add_to(Cd_, 1.0);
        b_norm_ = s_.b.norm();
        c_norm_ = s_.C.frobenius_norm() + s_.cy.norm();
    }

    // Runs until the scaled measures drop below `target`; returns false on breakdown.
    bool run(double target, int max_iter, int& iters) {
        for (; iters < max_iter; ++iters) {
            compute_residuals();
            if (cfg_.verbose) {
                std::fprintf(stderr, "ipm %3d  pobj %+.10e  dobj %+.10e  pinf %.2e  dinf %.2e  gap %.2e  mu %.2e\n",
                             iters, pobj_, dobj_, pinf_, dinf_, relgap_, mu_);
            }
            const double worst = std::max({pinf_, dinf_, relgap_});
            if (worst < best_worst_) {
                best_worst_ = worst;
                best_ = {X_, y_, lam_};
            }
            if (worst <= target) return true;
            if (!std::isfinite(mu_) || X_.norm() > 1e14 || lam_.norm() > 1e14) {
                diverged_ = true;
                return false;
            }
            if (!step()) return false;
        }
        return false;
    }

    // Best iterate seen so far by the internal measure.
    const Eigen::MatrixXd& X() const { return best_.X; }
    const Eigen::VectorXd& y() const { return best_.y; }
    const Eigen::VectorXd& lambda() const { return best_.lam; }
    bool diverged() const { return diverged_; }

private:
    void compute_residuals() {
        Eigen::VectorXd ax;
        kernels::apply_parallel(s_.A, X_, ax);
        rp_ = s_.b - ax - s_.Ay * y_;
        for (std::size_t k = 0; k < le_.size(); ++k) rp_(le_[k]) -= s_le_(static_cast<Eigen::Index>(k));
        Rd_ = -Cd_ - Z_;
        for (int i = 0; i < m_; ++i) s_.A[i].add_to(Rd_, lam_(i));
        ry_ = s_.cy - s_.Ay.transpose() * lam_;
        pobj_ = s_.C.dot(X_) + s_.cy.dot(y_);
        dobj_ = s_.b.dot(lam_);
        double comp = (X_.cwiseProduct(Z_)).sum();
        for (std::size_t k = 0; k < le_.size(); ++k) comp += s_le_(static_cast<Eigen::Index>(k)) * lam_(le_[k]);
        mu_ = comp / static_cast<double>(n_ + static_cast<int>(le_.size()));
        pinf_ = rp_.norm() / (1.0 + b_norm_);
        dinf_ = std::max(Rd_.norm(), ry_.norm()) / (1.0 + c_norm_);
        relgap_ = std::abs(pobj_ - dobj_) / (1.0 + std::abs(pobj_) + std::abs(dobj_));
    }

    bool factor() {
        Eigen::LLT<Eigen::MatrixXd> zc(Z_);
        if (zc.info() != Eigen::Success) {
            if (cfg_.verbose) std::fprintf(stderr, "      Z lost definiteness\n");
            return false;
        }
        W_ = zc.solve(Eigen::MatrixXd::Identity(n_, n_));
        W_ = sym(W_);
        kernels::schur_parallel(pattern_, X_, W_, K_);
        D_ = Eigen::VectorXd::Zero(m_);
        for (std::size_t k = 0; k < le_.size(); ++k) D_(le_[k]) = s_le_(static_cast<Eigen::Index>(k)) / lam_(le_[k]);
        K_.diagonal() += D_;
        // Symmetric Jacobi scaling before factoring: the diagonal spreads over
        // many orders of magnitude close to the optimum.
        kscale_ = K_.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd Ks = kscale_.asDiagonal() * K_ * kscale_.asDiagonal();
        // K is psd in exact arithmetic; a tiny shift of the unit-diagonal
        // matrix absorbs roundoff and refinement corrects for it.
        double shift = 0.0;
        for (Kc_.compute(Ks); Kc_.info() != Eigen::Success; Kc_.compute(Ks)) {
            const double next = shift == 0.0 ? 1e-14 : shift * 10.0;
            if (next > 1e-4) {
                if (cfg_.verbose) std::fprintf(stderr, "      Schur factorization failed\n");
                return false;
            }
            Ks.diagonal().array() += next - shift;
            shift = next;
        }
        if (nf_ > 0) {
            V_ = solve_K(s_.Ay);
            Eigen::MatrixXd S = s_.Ay.transpose() * V_;
            Sc_.compute(sym(S));
        }
        return true;
    }

    template <typename Rhs>
    Eigen::MatrixXd solve_K(const Rhs& h) const {
        const Eigen::MatrixXd t = kscale_.asDiagonal() * h;
        const Eigen::MatrixXd u = Kc_.solve(t);
        return kscale_.asDiagonal() * u;
    }

    // K dlam - Ay dy = h, Ay^T dlam = r
    void solve_reduced(const Eigen::VectorXd& h, const Eigen::VectorXd& r, Eigen::VectorXd& dlam,
                       Eigen::VectorXd& dy) const {
        const Eigen::VectorXd u = solve_K(h);
        if (nf_ > 0) {
            dy = Sc_.solve(r - s_.Ay.transpose() * u);
            dlam = u + V_ * dy;
        } else {
            dy = Eigen::VectorXd::Zero(0);
            dlam = u;
        }
    }

    // Rc = sigma mu I - X Z - corr, gs = (sigma mu - s lam - corr_s) / lam
    Direction direction(const Eigen::MatrixXd& Rc, const Eigen::VectorXd& gs) const {
        Direction d;
        const Eigen::MatrixXd G = Rc * W_;
        const Eigen::MatrixXd H = sym(G - X_ * Rd_ * W_);
        Eigen::VectorXd h;
        kernels::apply_parallel(s_.A, H, h);
        for (std::size_t k = 0; k < le_.size(); ++k) h(le_[k]) += gs(static_cast<Eigen::Index>(k));
        h -= rp_;
        solve_reduced(h, ry_, d.dlam, d.dy);
        // Iterative refinement; the Schur complement is badly conditioned near
        // the optimum.
        double res = std::numeric_limits<double>::infinity();
        Eigen::VectorXd prev_lam, prev_y;
        for (int pass = 0; pass < 6; ++pass) {
            const Eigen::VectorXd r1 = h - K_ * d.dlam + s_.Ay * d.dy;
            const Eigen::VectorXd r2 = ry_ - s_.Ay.transpose() * d.dlam;
            const double next = std::hypot(r1.norm(), r2.norm());
            if (next >= res) {
                d.dlam = prev_lam;
                d.dy = prev_y;
                break;
            }
            if (next > 0.5 * res || next <= 1e-15 * (1.0 + h.norm())) break;
            res = next;
            prev_lam = d.dlam;
            prev_y = d.dy;
            Eigen::VectorXd c1, c2;
            solve_reduced(r1, r2, c1, c2);
            d.dlam += c1;
            d.dy += c2;
        }
        auto expand = [&] {
            d.dZ = Rd_;
            for (int i = 0; i < m_; ++i) s_.A[i].add_to(d.dZ, d.dlam(i));
            d.dX = sym(G - X_ * d.dZ * W_);
            d.ds.resize(static_cast<Eigen::Index>(le_.size()));
            for (std::size_t k = 0; k < le_.size(); ++k) {
                const auto kk = static_cast<Eigen::Index>(k);
                d.ds(kk) = gs(kk) - D_(le_[k]) * d.dlam(le_[k]);
            }
        };
        expand();
        // Forming dX through W loses accuracy once Z is nearly singular, so
        // refine against the primal equation as actually satisfied.
        auto primal_error = [&](Eigen::VectorXd& ep, Eigen::VectorXd& r2) {
            kernels::apply_parallel(s_.A, d.dX, ep);
            ep += s_.Ay * d.dy - rp_;
            for (std::size_t k = 0; k < le_.size(); ++k) ep(le_[k]) += d.ds(static_cast<Eigen::Index>(k));
            r2 = ry_ - s_.Ay.transpose() * d.dlam;
            return std::hypot(ep.norm(), r2.norm());
        };
        Eigen::VectorXd ep, r2;
        double perr = primal_error(ep, r2);
        for (int pass = 0; pass < 3 && perr > 1e-15 * (1.0 + rp_.norm()); ++pass) {
            const Direction keep = d;
            Eigen::VectorXd c1, c2;
            solve_reduced(ep, r2, c1, c2);
            d.dlam += c1;
            d.dy += c2;
            expand();
            const double e = primal_error(ep, r2);
            if (e >= perr) {
                d = keep;
                break;
            }
            const bool slow = e > 0.5 * perr;
            perr = e;
            if (slow) break;
        }
        return d;
    }

    void step_lengths(const Direction& d, double& ap, double& ad) const {
        ap = std::min(max_step(X_, d.dX), max_step(s_le_, d.ds));
        Eigen::VectorXd lam_le(static_cast<Eigen::Index>(le_.size())), dlam_le(lam_le.size());
        for (std::size_t k = 0; k < le_.size(); ++k) {
            lam_le(static_cast<Eigen::Index>(k)) = lam_(le_[k]);
            dlam_le(static_cast<Eigen::Index>(k)) = d.dlam(le_[k]);
        }
        ad = std::min(max_step(Z_, d.dZ), max_step(lam_le, dlam_le));
    }

    bool step() {
        if (!factor()) return false;
        const auto nle = static_cast<Eigen::Index>(le_.size());
        Eigen::VectorXd lam_le(nle);
        for (Eigen::Index k = 0; k < nle; ++k) lam_le(k) = lam_(le_[static_cast<std::size_t>(k)]);

        // Predictor (affine scaling).
        const Eigen::MatrixXd XZ = X_ * Z_;
        Eigen::VectorXd gs_aff = -s_le_;
        const Direction aff = direction(-XZ, gs_aff);
        double ap = 0.0, ad = 0.0;
        step_lengths(aff, ap, ad);
        ap = std::min(1.0, ap);
        ad = std::min(1.0, ad);
        double comp_aff = ((X_ + ap * aff.dX).cwiseProduct(Z_ + ad * aff.dZ)).sum();
        for (Eigen::Index k = 0; k < nle; ++k) {
            comp_aff += (s_le_(k) + ap * aff.ds(k)) * (lam_le(k) + ad * aff.dlam(le_[static_cast<std::size_t>(k)]));
        }
        const double mu_aff = comp_aff / static_cast<double>(n_ + nle);
        // Damp the centering exponent when the affine step is short.
        const double amin = std::min(ap, ad);
        const double expon = amin < 1.0 / std::sqrt(3.0) ? 1.0 : std::clamp(3.0 * amin * amin, 1.0, 3.0);
        double sigma = std::pow(std::max(0.0, mu_aff) / mu_, expon);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Corrector.
        const double smu = sigma * mu_;
        Eigen::MatrixXd Rc = smu * Eigen::MatrixXd::Identity(n_, n_) - XZ - aff.dX * aff.dZ;
        Eigen::VectorXd gs(nle);
        for (Eigen::Index k = 0; k < nle; ++k) {
            const double dl = aff.dlam(le_[static_cast<std::size_t>(k)]);
            gs(k) = (smu - s_le_(k) * lam_le(k) - aff.ds(k) * dl) / lam_le(k);
        }
        const Direction d = direction(Rc, gs);
        step_lengths(d, ap, ad);
        ap = std::min(1.0, gamma_ * ap);
        ad = std::min(1.0, gamma_ * ad);
        if (!(ap > 0.0) || !(ad > 0.0) || !std::isfinite(ap) || !std::isfinite(ad)) {
            if (cfg_.verbose) std::fprintf(stderr, "      step breakdown ap %.3e ad %.3e\n", ap, ad);
            return false;
        }
        // Both blocks must stay numerically positive definite.
        for (int back = 0; back < 30 && !positive_definite(X_ + ap * d.dX); ++back) ap *= 0.8;
        for (int back = 0; back < 30 && !positive_definite(Z_ + ad * d.dZ); ++back) ad *= 0.8;

        X_ += ap * d.dX;
        y_ += ap * d.dy;
        s_le_ += ap * d.ds;
        Z_ += ad * d.dZ;
        lam_ += ad * d.dlam;
        gamma_ = kStepFraction + 0.09 * std::min(ap, ad);
        if (cfg_.verbose) std::fprintf(stderr, "      ap %.3e ad %.3e sigma %.3e\n", ap, ad, sigma);
        if (std::max(ap, ad) < 1e-10) return false;
        return true;
    }

    const Standardized& s_;
    const SolverConfig& cfg_;
    int n_, m_, nf_;
    kernels::SchurPattern pattern_;
    std::vector<int> le_;

    Eigen::MatrixXd X_, Z_, Cd_, W_, Rd_, K_, V_;
    Eigen::VectorXd y_, lam_, s_le_, rp_, ry_, D_;
    Eigen::LLT<Eigen::MatrixXd> Kc_;
    Eigen::VectorXd kscale_;
    Eigen::LDLT<Eigen::MatrixXd> Sc_;

    double b_norm_ = 0.0, c_norm_ = 0.0;
    double pobj_ = 0.0, dobj_ = 0.0, mu_ = 0.0, pinf_ = 0.0, dinf_ = 0.0, relgap_ = 0.0;
    struct Snapshot {
        Eigen::MatrixXd X;
        Eigen::VectorXd y, lam;
    } best_;
    double best_worst_ = std::numeric_limits<double>::infinity();
    double gamma_ = kStepFraction;
    bool diverged_ = false;
};

} // namespace

Solution solve_ipm(const ConicProblem& p, const SolverConfig& cfg) {
    const Standardized s = standardize(p, cfg.equilibrate);
    Ipm ipm(s, cfg);
    int iters = 0;
    bool converged = false;
    Solution best;
    double best_worst = std::numeric_limits<double>::infinity();
    // Tighten the internal target until the independently recomputed
    // residuals meet the tolerance.
    for (double target = cfg.tol; target >= cfg.tol * 1e-4; target *= 0.1) {
        const bool ok = ipm.run(target, cfg.ipm_max_iter, iters);
        Solution sol = unscale(p, s, ipm.X(), ipm.y(), ipm.lambda());
        sol.iterations = iters;
        finalize(p, cfg, sol, ok);
        const double worst = std::max({sol.primal_res, sol.dual_res, std::abs(sol.gap)});
        if (worst < best_worst) {
            best_worst = worst;
            best = std::move(sol);
        }
        converged = ok;
        if (!ok || best.status == Status::optimal) break;
    }
    if (s.inconsistent || ipm.diverged()) best.status = Status::infeasible_suspect;
    (void)converged;
    return best;
}

} // namespace cdpep::sdp::detail
