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

#include <catch2/catch_amalgamated.hpp>

#include "simrsma/power_sca.hpp"

using namespace simrsma;

namespace {

SystemConfig tiny_config(int users, int atoms, int layers) {
    SystemConfig cfg;
    cfg.set_users(users);
    cfg.atoms_per_layer = atoms;
    cfg.layers = layers;
    return cfg;
}

Eigen::MatrixXd gains_for(std::uint64_t seed, int users, int atoms, int layers) {
    auto cfg = tiny_config(users, atoms, layers);
    auto chan = make_channel(seed, cfg);
    return effective_gains(uniform_random_phases(seed + 1, layers, atoms), chan);
}

PowerAllocation make_pa(double p_c, std::initializer_list<double> p) {
    PowerAllocation pa;
    pa.p_c = p_c;
    pa.p = Eigen::VectorXd(static_cast<Eigen::Index>(p.size()));
    int i = 0;
    for (double v : p) pa.p(i++) = v;
    pa.r_c = Eigen::VectorXd::Zero(pa.p.size());
    return pa;
}

} // namespace

TEST_CASE("exact_eta reduces to log2 noise with all powers off") {
    auto gains = gains_for(1, 2, 4, 2);
    auto pa = make_pa(0.0, {0.0, 0.0});
    const double noise = 1e-13;
    REQUIRE_THAT(exact_eta(gains, pa, noise, 0, Stream::common), Catch::Matchers::WithinRel(std::log2(noise), 1e-14));
    REQUIRE_THAT(exact_eta(gains, pa, noise, 1, Stream::priv), Catch::Matchers::WithinRel(std::log2(noise), 1e-14));
}

TEST_CASE("rate decomposition identity: log-difference equals log(1+SINR)") {
    auto gains = gains_for(2, 3, 9, 2);
    auto pa = make_pa(0.02, {0.03, 0.01, 0.015});
    const double noise = 1e-13;
    for (int k = 0; k < 3; ++k) {
        double full = noise;
        for (int j = 0; j < 3; ++j) full += pa.p(j) * gains(k, j + 1);
        const double rp_decomposed = std::log2(full) - exact_eta(gains, pa, noise, k, Stream::priv);
        REQUIRE_THAT(rp_decomposed, Catch::Matchers::WithinRel(rate_bits(sinr(gains, pa, noise, k, Stream::priv)), 1e-12));
        const double rc_decomposed =
            std::log2(pa.p_c * gains(k, 0) + full) - exact_eta(gains, pa, noise, k, Stream::common);
        REQUIRE_THAT(rc_decomposed, Catch::Matchers::WithinRel(rate_bits(sinr(gains, pa, noise, k, Stream::common)), 1e-12));
    }
}

TEST_CASE("exact_eta matches an independent formula evaluation") {
    auto gains = gains_for(3, 2, 4, 2);
    auto pa = make_pa(0.01, {0.04, 0.02});
    const double noise = 1e-13;
    // direct transcription for user 0
    const double expect_c = std::log2(0.04 * gains(0, 1) + 0.02 * gains(0, 2) + noise);
    const double expect_p = std::log2(0.02 * gains(0, 2) + noise);
    REQUIRE_THAT(exact_eta(gains, pa, noise, 0, Stream::common), Catch::Matchers::WithinRel(expect_c, 1e-14));
    REQUIRE_THAT(exact_eta(gains, pa, noise, 0, Stream::priv), Catch::Matchers::WithinRel(expect_p, 1e-14));
}

TEST_CASE("surrogate is tight at the expansion point") {
    auto gains = gains_for(4, 3, 9, 2);
    Eigen::VectorXd p_expand(4);
    p_expand << 0.01, 0.03, 0.02, 0.015;
    auto model = linearize(gains, p_expand, 1e-13);
    auto pa = make_pa(p_expand(0), {p_expand(1), p_expand(2), p_expand(3)});
    for (int k = 0; k < 3; ++k) {
        REQUIRE_THAT(model.eta_c_tilde(k, pa.p),
                     Catch::Matchers::WithinRel(exact_eta(gains, pa, 1e-13, k, Stream::common), 1e-13));
        REQUIRE_THAT(model.eta_p_tilde(k, pa.p),
                     Catch::Matchers::WithinRel(exact_eta(gains, pa, 1e-13, k, Stream::priv), 1e-13));
    }
}

TEST_CASE("tangent surrogate overestimates eta everywhere") {
    auto gains = gains_for(5, 2, 4, 2);
    Eigen::VectorXd p_expand(3);
    p_expand << 0.02, 0.03, 0.04;
    auto model = linearize(gains, p_expand, 1e-13);
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> uni(0.0, 0.1);
    for (int trial = 0; trial < 200; ++trial) {
        auto pa = make_pa(uni(gen), {uni(gen), uni(gen)});
        for (int k = 0; k < 2; ++k) {
            REQUIRE(model.eta_c_tilde(k, pa.p) >= exact_eta(gains, pa, 1e-13, k, Stream::common) - 1e-12);
            REQUIRE(model.eta_p_tilde(k, pa.p) >= exact_eta(gains, pa, 1e-13, k, Stream::priv) - 1e-12);
        }
    }
}

TEST_CASE("surrogate gradient matches central finite differences") {
    auto gains = gains_for(6, 3, 9, 2);
    Eigen::VectorXd p_expand(4);
    p_expand << 0.015, 0.02, 0.03, 0.025;
    const double noise = 1e-13;
    auto model = linearize(gains, p_expand, noise);
    const double step = 1e-5 * 0.1;
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) {
            auto up = make_pa(p_expand(0), {p_expand(1), p_expand(2), p_expand(3)});
            auto dn = up;
            up.p(j) += step;
            dn.p(j) -= step;
            const double fd_c =
                (exact_eta(gains, up, noise, k, Stream::common) - exact_eta(gains, dn, noise, k, Stream::common)) /
                (2 * step);
            REQUIRE_THAT(model.eta_c_coef(k, j), Catch::Matchers::WithinRel(fd_c, 1e-6));
            const double fd_p =
                (exact_eta(gains, up, noise, k, Stream::priv) - exact_eta(gains, dn, noise, k, Stream::priv)) /
                (2 * step);
            if (j == k)
                REQUIRE(model.eta_p_coef(k, j) == 0.0);
            else
                REQUIRE_THAT(model.eta_p_coef(k, j), Catch::Matchers::WithinRel(fd_p, 1e-6));
        }
}

TEST_CASE("solve_inner matches the K=1 surrogate grid-search oracle") {
    auto gains = gains_for(7, 1, 4, 2);
    const double noise = 1e-13;
    const double p_max = 0.1;
    Eigen::VectorXd p_expand(2);
    p_expand << 0.03, 0.05;
    auto model = linearize(gains, p_expand, noise);
    auto sol = solve_inner(model, p_max);
    REQUIRE(sol.ok);

    // Grid over (p_c, p_1) at 1e-3 * P_max; optimal r is the full surrogate
    // common rate, so the objective at a grid point is R~_c + R~_p.
    const double step = 1e-3 * p_max;
    double best = -1e30;
    double best_pc = 0, best_p1 = 0;
    Eigen::VectorXd p1v(1);
    for (double pc = 0.0; pc <= p_max + 1e-15; pc += step)
        for (double p1 = 0.0; p1 <= p_max - pc + 1e-15; p1 += step) {
            p1v(0) = p1;
            const double rc = model.common_rate_tilde(0, pc, p1v);
            if (rc < 0.0) continue;
            const double v = rc + model.private_rate_tilde(0, p1v);
            if (v > best) {
                best = v;
                best_pc = pc;
                best_p1 = p1;
            }
        }
    // local slope at the grid argmax bounds the discretization error
    p1v(0) = best_p1;
    const double at_best = model.common_rate_tilde(0, best_pc, p1v) + model.private_rate_tilde(0, p1v);
    double slope = 0.0;
    for (double dpc : {-step, step})
        for (double dp1 : {-step, step}) {
            const double pc = std::clamp(best_pc + dpc, 0.0, p_max);
            const double p1 = std::clamp(best_p1 + dp1, 0.0, p_max - pc);
            p1v(0) = p1;
            const double v = model.common_rate_tilde(0, pc, p1v) + model.private_rate_tilde(0, p1v);
            slope = std::max(slope, std::abs(v - at_best));
        }
    REQUIRE_THAT(sol.t, Catch::Matchers::WithinAbs(best, 2 * slope + 1e-6));
}

TEST_CASE("solve_inner saturates the budget on an interference-free instance") {
    Eigen::MatrixXd gains(2, 3);
    gains << 2e-10, 3e-10, 0.0, //
        1.5e-10, 0.0, 2.5e-10;
    Eigen::VectorXd p_expand = Eigen::VectorXd::Constant(3, 0.1 / 3);
    auto model = linearize(gains, p_expand, 1e-13);
    auto sol = solve_inner(model, 0.1);
    REQUIRE(sol.ok);
    REQUIRE(sol.p_c + sol.p.sum() >= 0.1 - 1e-6);
    REQUIRE(sol.p_c + sol.p.sum() <= 0.1 + 1e-12);
}

TEST_CASE("solve_inner epigraph variable equals the surrogate min-rate") {
    auto gains = gains_for(8, 2, 9, 2);
    Eigen::VectorXd p_expand = Eigen::VectorXd::Constant(3, 0.1 / 3);
    auto model = linearize(gains, p_expand, 1e-13);
    auto sol = solve_inner(model, 0.1);
    REQUIRE(sol.ok);
    double min_rate = 1e30;
    for (int k = 0; k < 2; ++k) min_rate = std::min(min_rate, sol.r_c(k) + model.private_rate_tilde(k, sol.p));
    REQUIRE_THAT(sol.t, Catch::Matchers::WithinAbs(min_rate, 1e-8));
}

TEST_CASE("sca_loop trace never decreases and iterates stay feasible") {
    const double noise = 1e-13;
    const double p_max = 0.1;
    for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
        auto gains = gains_for(seed, 3, 9, 2);
        SystemConfig cfg = tiny_config(3, 9, 2);
        cfg.max_power = p_max;
        auto res = sca_loop(gains, noise, p_max, uniform_power(cfg), 1e-4, 50);
        REQUIRE(res.ok);
        for (std::size_t i = 1; i < res.trace.size(); ++i) REQUIRE(res.trace[i] >= res.trace[i - 1] - 1e-8);
        REQUIRE(res.pa.total_power() <= p_max + 1e-9);
        auto rep = rate_report(gains, res.pa, noise);
        REQUIRE(decodability_slack(rep, res.pa.r_c) >= -1e-6);
    }
}

TEST_CASE("sca_loop reaches the random-search oracle on a K=2 instance") {
    auto gains = gains_for(30, 2, 4, 2);
    const double noise = 1e-13;
    const double p_max = 0.1;
    SystemConfig cfg = tiny_config(2, 4, 2);
    cfg.max_power = p_max;
    auto res = sca_loop(gains, noise, p_max, uniform_power(cfg), 1e-4, 50);
    REQUIRE(res.ok);

    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    double best = -1e30;
    for (int s = 0; s < 100000; ++s) {
        Eigen::VectorXd e(3);
        for (int i = 0; i < 3; ++i) e(i) = expo(gen);
        e *= p_max * std::pow(uni(gen), 1.0 / 3.0) / e.sum();
        PowerAllocation pa;
        pa.p_c = e(0);
        pa.p = e.tail(2);
        pa.r_c = Eigen::VectorXd::Zero(2);
        auto rep = rate_report(gains, pa, noise);
        const double budget = rep.common_capacity * uni(gen);
        const double f = uni(gen);
        pa.r_c(0) = budget * f;
        pa.r_c(1) = budget * (1.0 - f);
        best = std::max(best, std::min(pa.r_c(0) + rep.private_rate(0), pa.r_c(1) + rep.private_rate(1)));
    }
    REQUIRE(exact_min_rate(gains, res.pa, noise) >= 0.99 * best);
}

TEST_CASE("sca_loop restarted at its own optimum stops after one iteration") {
    auto gains = gains_for(31, 2, 9, 2);
    SystemConfig cfg = tiny_config(2, 9, 2);
    auto first = sca_loop(gains, cfg.noise_power, cfg.max_power, uniform_power(cfg), 1e-4, 50);
    REQUIRE(first.ok);
    auto second = sca_loop(gains, cfg.noise_power, cfg.max_power, first.pa, 1e-4, 50);
    REQUIRE(second.iterations == 1);
    REQUIRE(second.pa.total_power() <= cfg.max_power + 1e-9);
}

TEST_CASE("sca_loop matches the K=1 exact grid-search oracle") {
    auto gains = gains_for(32, 1, 4, 2);
    const double noise = 1e-13;
    const double p_max = 0.1;
    SystemConfig cfg = tiny_config(1, 4, 2);
    cfg.max_power = p_max;
    auto res = sca_loop(gains, noise, p_max, uniform_power(cfg), 1e-5, 100);
    REQUIRE(res.ok);
    const double sca_value = exact_min_rate(gains, res.pa, noise);

    auto exact_value = [&](double pc, double p1) {
        const double rc = std::log2(1.0 + pc * gains(0, 0) / (p1 * gains(0, 1) + noise));
        const double rp = std::log2(1.0 + p1 * gains(0, 1) / noise);
        return rc + rp;
    };
    const double step = 1e-3 * p_max;
    double best = -1e30, best_pc = 0, best_p1 = 0;
    for (double pc = 0.0; pc <= p_max + 1e-15; pc += step)
        for (double p1 = 0.0; p1 <= p_max - pc + 1e-15; p1 += step) {
            const double v = exact_value(pc, p1);
            if (v > best) {
                best = v;
                best_pc = pc;
                best_p1 = p1;
            }
        }
    double slope = 0.0;
    for (double dpc : {-step, step})
        for (double dp1 : {-step, step}) {
            const double pc = std::clamp(best_pc + dpc, 0.0, p_max);
            const double p1 = std::clamp(best_p1 + dp1, 0.0, p_max - pc);
            slope = std::max(slope, std::abs(exact_value(pc, p1) - best));
        }
    REQUIRE_THAT(sca_value, Catch::Matchers::WithinAbs(best, 2 * slope + 1e-6));
}
