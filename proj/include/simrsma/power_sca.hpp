// SPDX-License-Identifier: Apache-2.0
//
// simrsma - max-min fair wave-domain beamforming for stacked-metasurface RSMA downlinks
// Copyright (C) 2026 the simrsma authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "simrsma/rate_engine.hpp"

namespace simrsma {

namespace barrier {

/// One concave inequality g(x) >= 0 of the form
///   g(x) = lin.x + off + sum_t weight_t * ln(lin_t.x + off_t).
/// Every constraint of the power subproblems fits this shape.
struct LogTerm {
    double weight = 0.0;
    Eigen::VectorXd lin;
    double off = 0.0;
};

struct Constraint {
    Eigen::VectorXd lin;
    double off = 0.0;
    std::vector<LogTerm> logs;

    bool domain_ok(const Eigen::VectorXd& x) const {
        for (const auto& t : logs)
            if (t.lin.dot(x) + t.off <= 0.0) return false;
        return true;
    }

    double value(const Eigen::VectorXd& x) const {
        double v = lin.dot(x) + off;
        for (const auto& t : logs) v += t.weight * std::log(t.lin.dot(x) + t.off);
        return v;
    }

    void accumulate(const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
        grad = lin;
        hess.setZero();
        for (const auto& t : logs) {
            const double z = t.lin.dot(x) + t.off;
            grad += (t.weight / z) * t.lin;
            hess.noalias() -= (t.weight / (z * z)) * (t.lin * t.lin.transpose());
        }
    }
};

struct Result {
    Eigen::VectorXd x;
    bool ok = false;
    double gap = std::numeric_limits<double>::infinity();
    int newton_iters = 0;
};

/// Maximize c.x subject to g_i(x) >= 0 by a logarithmic-barrier Newton method.
/// The path parameter grows by a factor of 10 per stage until the duality gap
/// bound m / tau drops below gap_tol. x0 must be strictly feasible.
inline Result maximize(const Eigen::VectorXd& c, const std::vector<Constraint>& cons, const Eigen::VectorXd& x0,
                       double gap_tol = 1e-9) {
    Result res;
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(cons.size());
    Eigen::VectorXd x = x0;

    auto feasible = [&](const Eigen::VectorXd& p) {
        for (const auto& con : cons)
            if (!con.domain_ok(p) || con.value(p) <= 0.0) return false;
        return true;
    };
    if (!feasible(x)) return res;

    auto barrier_value = [&](double tau, const Eigen::VectorXd& p) {
        double v = tau * c.dot(p);
        for (const auto& con : cons) v += std::log(con.value(p));
        return v;
    };

    Eigen::VectorXd cgrad(n);
    Eigen::MatrixXd chess(n, n);
    double tau = 1.0;
    while (true) {
        for (int it = 0; it < 60; ++it) {
            Eigen::VectorXd grad = tau * c;
            Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
            for (const auto& con : cons) {
                const double g = con.value(x);
                con.accumulate(x, cgrad, chess);
                grad += cgrad / g;
                hess += chess / g - (cgrad * cgrad.transpose()) / (g * g);
            }

            Eigen::MatrixXd neg = -hess;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
            Eigen::VectorXd step;
            if (ldlt.info() == Eigen::Success) step = ldlt.solve(grad);
            if (ldlt.info() != Eigen::Success || !step.allFinite()) {
                neg += (1e-10 * (1.0 + neg.diagonal().cwiseAbs().maxCoeff())) * Eigen::MatrixXd::Identity(n, n);
                step = neg.ldlt().solve(grad);
                if (!step.allFinite()) return res;
            }

            const double decrement = 0.5 * grad.dot(step);
            if (decrement < 1e-13) break;

            const double base = barrier_value(tau, x);
            double s = 1.0;
            bool moved = false;
            for (int half = 0; half < 60; ++half) {
                Eigen::VectorXd trial = x + s * step;
                if (feasible(trial) && barrier_value(tau, trial) >= base + 0.25 * s * grad.dot(step)) {
                    x = trial;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            ++res.newton_iters;
            if (!moved) break;
        }
        res.gap = m / tau;
        if (res.gap < gap_tol) break;
        tau *= 10.0;
    }

    res.x = x;
    res.ok = true;
    return res;
}

} // namespace barrier

/// First-order surrogate of the interference logs eta_{c,k}, eta_{p,k} around
/// an expansion point. Affine in the private powers; tight (value and
/// gradient) at the expansion point.
struct SurrogateModel {
    Eigen::MatrixXd gains;    // K x N
    Eigen::VectorXd p_expand; // K+1: [p_c, p_1..p_K]
    double sigma2 = 0.0;
    Eigen::VectorXd eta_c_const; // K
    Eigen::MatrixXd eta_c_coef;  // K x K, d eta_c / d p_j
    Eigen::VectorXd eta_p_const; // K
    Eigen::MatrixXd eta_p_coef;  // K x K, zero on the diagonal

    int users() const { return static_cast<int>(eta_c_const.size()); }

    double eta_c_tilde(int k, const Eigen::VectorXd& p_priv) const {
        return eta_c_const(k) + eta_c_coef.row(k).dot(p_priv - p_expand.tail(users()));
    }
    double eta_p_tilde(int k, const Eigen::VectorXd& p_priv) const {
        return eta_p_const(k) + eta_p_coef.row(k).dot(p_priv - p_expand.tail(users()));
    }
    double common_rate_tilde(int k, double p_c, const Eigen::VectorXd& p_priv) const {
        double z = p_c * gains(k, 0) + sigma2;
        for (int j = 0; j < users(); ++j) z += p_priv(j) * gains(k, j + 1);
        return std::log2(z) - eta_c_tilde(k, p_priv);
    }
    double private_rate_tilde(int k, const Eigen::VectorXd& p_priv) const {
        double z = sigma2;
        for (int j = 0; j < users(); ++j) z += p_priv(j) * gains(k, j + 1);
        return std::log2(z) - eta_p_tilde(k, p_priv);
    }
};

/// eta_{delta,k} = log2(sum_{j in K_delta(k)} p_j G[k][j] + sigma^2); the
/// index set runs over private streams only (common power never interferes).
inline double exact_eta(const Eigen::MatrixXd& gains, const PowerAllocation& pa, double noise, int k, Stream stream) {
    double z = noise;
    for (int j = 0; j < pa.p.size(); ++j) {
        if (stream == Stream::priv && j == k) continue;
        z += pa.p(j) * gains(k, j + 1);
    }
    return std::log2(z);
}

inline SurrogateModel linearize(const Eigen::MatrixXd& gains, const Eigen::VectorXd& p_expand, double noise) {
    const int users = static_cast<int>(gains.rows());
    SurrogateModel model;
    model.gains = gains;
    model.p_expand = p_expand;
    model.sigma2 = noise;
    model.eta_c_const.resize(users);
    model.eta_p_const.resize(users);
    model.eta_c_coef.resize(users, users);
    model.eta_p_coef.resize(users, users);

    const double ln2 = std::numbers::ln2;
    const Eigen::VectorXd p_priv = p_expand.tail(users);
    for (int k = 0; k < users; ++k) {
        double dc = noise;
        double dp = noise;
        for (int j = 0; j < users; ++j) {
            dc += p_priv(j) * gains(k, j + 1);
            if (j != k) dp += p_priv(j) * gains(k, j + 1);
        }
        model.eta_c_const(k) = std::log2(dc);
        model.eta_p_const(k) = std::log2(dp);
        for (int j = 0; j < users; ++j) {
            model.eta_c_coef(k, j) = gains(k, j + 1) / (ln2 * dc);
            model.eta_p_coef(k, j) = j == k ? 0.0 : gains(k, j + 1) / (ln2 * dp);
        }
    }
    return model;
}

struct SubproblemSolution {
    double p_c = 0.0;
    Eigen::VectorXd p;
    Eigen::VectorXd r_c;
    double t = 0.0;
    int newton_iters = 0;
    double gap = std::numeric_limits<double>::infinity();
    bool ok = false;
};

namespace detail {

/// (A_k) r_k + R~_{p,k} - t >= 0 for the layout x = [p_c, p, r, t].
inline barrier::Constraint private_rate_floor(const SurrogateModel& m, int k, int n) {
    const int users = m.users();
    barrier::Constraint con;
    con.lin = Eigen::VectorXd::Zero(n);
    con.lin(1 + users + k) = 1.0;
    con.lin(n - 1) = -1.0;
    const Eigen::VectorXd pbar = m.p_expand.tail(users);
    con.off = -m.eta_p_const(k) + m.eta_p_coef.row(k).dot(pbar);
    for (int j = 0; j < users; ++j) con.lin(1 + j) -= m.eta_p_coef(k, j);
    barrier::LogTerm log;
    log.weight = 1.0 / std::numbers::ln2;
    log.lin = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < users; ++j) log.lin(1 + j) = m.gains(k, j + 1);
    log.off = m.sigma2;
    con.logs.push_back(std::move(log));
    return con;
}

/// (B_k) R~_{c,k} - sum_j r_j >= 0.
inline barrier::Constraint common_rate_budget(const SurrogateModel& m, int k, int n) {
    const int users = m.users();
    barrier::Constraint con;
    con.lin = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < users; ++j) con.lin(1 + users + j) = -1.0;
    const Eigen::VectorXd pbar = m.p_expand.tail(users);
    con.off = -m.eta_c_const(k) + m.eta_c_coef.row(k).dot(pbar);
    for (int j = 0; j < users; ++j) con.lin(1 + j) -= m.eta_c_coef(k, j);
    barrier::LogTerm log;
    log.weight = 1.0 / std::numbers::ln2;
    log.lin = Eigen::VectorXd::Zero(n);
    log.lin(0) = m.gains(k, 0);
    for (int j = 0; j < users; ++j) log.lin(1 + j) = m.gains(k, j + 1);
    log.off = m.sigma2;
    con.logs.push_back(std::move(log));
    return con;
}

inline barrier::Constraint nonneg(int idx, int n) {
    barrier::Constraint con;
    con.lin = Eigen::VectorXd::Zero(n);
    con.lin(idx) = 1.0;
    return con;
}

inline barrier::Constraint power_budget(double p_max, int vars_from, int vars_count, int n) {
    barrier::Constraint con;
    con.lin = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < vars_count; ++i) con.lin(vars_from + i) = -1.0;
    con.off = p_max;
    return con;
}

} // namespace detail

/// Solves the convexified max-min subproblem
///   max t  s.t.  r_k + R~_{p,k} >= t,  sum r <= R~_{c,k},  r >= 0,
///                p_c + sum p <= P_max,  p >= 0
/// over x = [p_c, p, r, t] via the barrier method. Falls back to a point near
/// uniform powers when the expansion point cannot seed a strictly interior
/// start.
inline SubproblemSolution solve_inner(const SurrogateModel& model, double p_max) {
    const int users = model.users();
    const int n = 2 * users + 2;

    std::vector<barrier::Constraint> cons;
    for (int k = 0; k < users; ++k) cons.push_back(detail::private_rate_floor(model, k, n));
    for (int k = 0; k < users; ++k) cons.push_back(detail::common_rate_budget(model, k, n));
    for (int k = 0; k < users; ++k) cons.push_back(detail::nonneg(1 + users + k, n));
    cons.push_back(detail::power_budget(p_max, 0, users + 1, n));
    for (int i = 0; i <= users; ++i) cons.push_back(detail::nonneg(i, n));

    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(n - 1) = 1.0;

    auto build_start = [&](const Eigen::VectorXd& powers) -> Eigen::VectorXd {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        x.head(users + 1) = powers;
        const double p_c = powers(0);
        const Eigen::VectorXd p_priv = powers.tail(users);
        double rc_min = std::numeric_limits<double>::infinity();
        for (int k = 0; k < users; ++k) rc_min = std::min(rc_min, model.common_rate_tilde(k, p_c, p_priv));
        if (rc_min > 0.0)
            for (int k = 0; k < users; ++k) x(1 + users + k) = 0.1 * rc_min / users;
        else
            return Eigen::VectorXd(); // no strictly interior r exists from here
        double t0 = std::numeric_limits<double>::infinity();
        for (int k = 0; k < users; ++k)
            t0 = std::min(t0, x(1 + users + k) + model.private_rate_tilde(k, p_priv));
        x(n - 1) = t0 - std::max(1e-3, 0.01 * std::abs(t0));
        return x;
    };

    // Start near the expansion point, pulled off the boundary.
    const double share = p_max / (users + 1);
    Eigen::VectorXd powers = 0.99 * model.p_expand + Eigen::VectorXd::Constant(users + 1, 0.005 * share);
    Eigen::VectorXd x0 = build_start(powers);
    barrier::Result br;
    if (x0.size()) br = barrier::maximize(c, cons, x0);
    if (!br.ok) {
        // analytic fallback: interior uniform split
        Eigen::VectorXd uniform = Eigen::VectorXd::Constant(users + 1, 0.9 * share);
        x0 = build_start(uniform);
        if (x0.size()) br = barrier::maximize(c, cons, x0);
    }

    SubproblemSolution sol;
    if (!br.ok) return sol;
    sol.p_c = br.x(0);
    sol.p = br.x.segment(1, users);
    sol.r_c = br.x.segment(1 + users, users);
    sol.t = br.x(n - 1);
    sol.newton_iters = br.newton_iters;
    sol.gap = br.gap;
    sol.ok = true;
    return sol;
}

struct ScaResult {
    PowerAllocation pa;
    std::vector<double> trace; // exact min-rate at the initial point and each iterate
    int iterations = 0;
    bool ok = true;
};

inline double exact_min_rate(const Eigen::MatrixXd& gains, const PowerAllocation& pa, double noise) {
    return rate_report(gains, pa, noise).min_rate;
}

/// Clamp the common split to the exact decodable budget. The surrogate
/// underestimates R_{c,k}, so this almost never fires, but it guarantees the
/// exact constraint at machine precision.
inline void repair_common_split(const Eigen::MatrixXd& gains, PowerAllocation& pa, double noise) {
    const double sum = pa.common_rate_sum();
    if (sum <= 0.0) return;
    double rc_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < gains.rows(); ++k)
        rc_min = std::min(rc_min, rate_bits(sinr(gains, pa, noise, k, Stream::common)));
    if (sum > rc_min) pa.r_c *= std::max(0.0, rc_min) / sum;
}

/// Successive convex approximation for the power/common-rate subproblem at
/// fixed phases: linearize around the incumbent, solve the barrier subproblem,
/// and keep the best exact-objective iterate.
inline ScaResult sca_loop(const Eigen::MatrixXd& gains, double noise, double p_max, const PowerAllocation& init,
                          double tol, int max_iter) {
    ScaResult res;
    PowerAllocation current = init;
    repair_common_split(gains, current, noise);
    double value = exact_min_rate(gains, current, noise);
    res.pa = current;
    double best = value;
    res.trace.push_back(value);

    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd p_expand(current.p.size() + 1);
        p_expand(0) = current.p_c;
        p_expand.tail(current.p.size()) = current.p;
        SubproblemSolution sol = solve_inner(linearize(gains, p_expand, noise), p_max);
        if (!sol.ok) {
            res.ok = res.trace.size() > 1;
            break;
        }
        PowerAllocation cand;
        cand.p_c = sol.p_c;
        cand.p = sol.p;
        cand.r_c = sol.r_c;
        repair_common_split(gains, cand, noise);
        const double cand_value = exact_min_rate(gains, cand, noise);
        res.trace.push_back(cand_value);
        ++res.iterations;
        const double improvement = cand_value - value;
        current = cand;
        value = cand_value;
        if (cand_value > best) {
            best = cand_value;
            res.pa = cand;
        }
        if (improvement < tol * std::max(std::abs(value), 1e-9)) break;
    }
    return res;
}

} // namespace simrsma
