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
#include <stdexcept>

#include "simrsma/channel.hpp"
#include "simrsma/rng.hpp"

namespace simrsma {

/// Stacked unit-modulus phase vector, layer-major:
/// [theta_{1,1} .. theta_{1,M}, theta_{2,1}, .., theta_{L,M}].
struct PhaseConfiguration {
    Eigen::VectorXcd theta;
    int layers = 0;
    int atoms = 0;

    Eigen::VectorXcd::ConstSegmentReturnType layer(int l) const { return theta.segment(l * atoms, atoms); }
    Eigen::VectorXcd::SegmentReturnType layer(int l) { return theta.segment(l * atoms, atoms); }

    double max_modulus_deviation() const {
        double dev = 0.0;
        for (int i = 0; i < theta.size(); ++i) dev = std::max(dev, std::abs(std::abs(theta(i)) - 1.0));
        return dev;
    }
};

inline PhaseConfiguration uniform_random_phases(std::uint64_t seed, int layers, int atoms) {
    PhaseConfiguration pc;
    pc.layers = layers;
    pc.atoms = atoms;
    pc.theta.resize(static_cast<Eigen::Index>(layers) * atoms);
    std::mt19937_64 gen(splitmix64(seed));
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < pc.theta.size(); ++i) pc.theta(i) = std::polar(1.0, uni(gen));
    return pc;
}

inline PhaseConfiguration unit_phases(int layers, int atoms) {
    PhaseConfiguration pc;
    pc.layers = layers;
    pc.atoms = atoms;
    pc.theta = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(layers) * atoms);
    return pc;
}

/// Transmit powers and the common-rate split. p_c rides the dedicated common
/// antenna (column 0 of Q1); p(k) rides user k's private antenna (column k+1).
struct PowerAllocation {
    double p_c = 0.0;
    Eigen::VectorXd p;   // K private powers
    Eigen::VectorXd r_c; // K common-rate portions, bits/s/Hz

    double total_power() const { return p_c + p.sum(); }
    double common_rate_sum() const { return r_c.size() ? r_c.sum() : 0.0; }
};

inline PowerAllocation uniform_power(const SystemConfig& cfg) {
    PowerAllocation pa;
    const double share = cfg.max_power / cfg.num_antennas;
    pa.p_c = share;
    pa.p = Eigen::VectorXd::Constant(cfg.num_users, share);
    pa.r_c = Eigen::VectorXd::Zero(cfg.num_users);
    return pa;
}

/// F = Theta_L Q_L ... Theta_2 Q_2 Theta_1. For L = 1 this is just diag(theta).
inline Eigen::MatrixXcd wave_response(const PhaseConfiguration& phases, const ChannelRealization& chan) {
    const int m = chan.atoms();
    if (phases.atoms != m || phases.layers != chan.layers())
        throw std::logic_error("wave_response: phase/channel dimension mismatch");
    Eigen::MatrixXcd f = phases.layer(0).asDiagonal();
    for (int l = 1; l < phases.layers; ++l)
        f = phases.layer(l).asDiagonal() * (chan.q_inter[l - 1] * f).eval();
    return f;
}

/// Complex end-to-end amplitudes a_{k,j} = h_k^H F q_j, K x N.
inline Eigen::MatrixXcd effective_amplitudes(const Eigen::MatrixXcd& f, const ChannelRealization& chan) {
    const int k = chan.users();
    Eigen::MatrixXcd amps(k, chan.antennas());
    for (int u = 0; u < k; ++u) amps.row(u) = (chan.h[u].adjoint() * f) * chan.q1;
    return amps;
}

/// Effective gain matrix G[k][j] = |h_k^H F q_j|^2. Column 0 is the common
/// antenna; column j+1 is user j's private antenna.
inline Eigen::MatrixXd effective_gains(const Eigen::MatrixXcd& f, const ChannelRealization& chan) {
    return effective_amplitudes(f, chan).cwiseAbs2();
}

inline Eigen::MatrixXd effective_gains(const PhaseConfiguration& phases, const ChannelRealization& chan) {
    return effective_gains(wave_response(phases, chan), chan);
}

enum class Stream { common, priv };

inline double sinr(const Eigen::MatrixXd& gains, const PowerAllocation& pa, double noise, int k, Stream stream) {
    const int users = static_cast<int>(gains.rows());
    if (pa.p_c < 0.0 || (pa.p.size() && pa.p.minCoeff() < 0.0))
        throw std::invalid_argument("sinr: negative power");
    double interference = noise;
    for (int j = 0; j < users; ++j) {
        if (stream == Stream::priv && j == k) continue;
        interference += pa.p(j) * gains(k, j + 1);
    }
    const double signal = stream == Stream::common ? pa.p_c * gains(k, 0) : pa.p(k) * gains(k, k + 1);
    return signal / interference;
}

inline double rate_bits(double sinr_value) { return std::log2(1.0 + sinr_value); }

/// Jain's fairness index (sum r)^2 / (K sum r^2); 1 by convention when all
/// rates are zero.
inline double jain_index(const Eigen::VectorXd& rates) {
    const double s = rates.sum();
    const double q = rates.squaredNorm();
    if (q <= 0.0) return 1.0;
    return s * s / (rates.size() * q);
}

/// Per-user common/private/total rates for one (theta, p, r_c) triple.
struct RateReport {
    Eigen::VectorXd common_rate;  // R_{c,k}
    Eigen::VectorXd private_rate; // R_{p,k}
    double common_capacity = 0.0; // min_k R_{c,k}
    Eigen::VectorXd total_rate;   // R_k = r_{c,k} + R_{p,k}
    double min_rate = 0.0;
    double sum_rate = 0.0;
    double jain = 1.0;
};

inline RateReport rate_report(const Eigen::MatrixXd& gains, const PowerAllocation& pa, double noise) {
    const int users = static_cast<int>(gains.rows());
    RateReport rep;
    rep.common_rate.resize(users);
    rep.private_rate.resize(users);
    rep.total_rate.resize(users);
    for (int k = 0; k < users; ++k) {
        rep.common_rate(k) = rate_bits(sinr(gains, pa, noise, k, Stream::common));
        rep.private_rate(k) = rate_bits(sinr(gains, pa, noise, k, Stream::priv));
        rep.total_rate(k) = pa.r_c(k) + rep.private_rate(k);
    }
    rep.common_capacity = rep.common_rate.minCoeff();
    rep.min_rate = rep.total_rate.minCoeff();
    rep.sum_rate = rep.total_rate.sum();
    rep.jain = jain_index(rep.total_rate);
    return rep;
}

/// min_k R_{c,k} - sum_k r_{c,k}; nonnegative iff the common split is decodable.
inline double decodability_slack(const RateReport& rep, const Eigen::VectorXd& r_c) {
    return rep.common_capacity - r_c.sum();
}

} // namespace simrsma
