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
#include <Eigen/Eigenvalues>
#include <random>
#include <stdexcept>
#include <vector>

#include "simrsma/geometry.hpp"
#include "simrsma/rng.hpp"

namespace simrsma {

/// One sampled propagation environment. Transmission matrices are
/// deterministic given the geometry; the user channels are correlated
/// Rayleigh draws h_k ~ CN(0, zeta_k T). Immutable after construction.
struct ChannelRealization {
    Eigen::MatrixXcd q1;                   // M x N BS-to-SIM matrix
    std::vector<Eigen::MatrixXcd> q_inter; // Q_l, l = 2..L
    std::vector<Eigen::VectorXcd> h;       // K SIM-to-user channels, length M
    Eigen::MatrixXd corr;                  // T, M x M
    Eigen::VectorXd pathloss;              // zeta_k, length K

    int atoms() const { return static_cast<int>(q1.rows()); }
    int antennas() const { return static_cast<int>(q1.cols()); }
    int layers() const { return static_cast<int>(q_inter.size()) + 1; }
    int users() const { return static_cast<int>(h.size()); }
};

/// Symmetric PSD square root with clipping of tiny negative eigenvalues.
/// An eigenvalue below -1e-8 signals a broken correlation model and throws.
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    if (es.info() != Eigen::Success) throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    if (lam.minCoeff() < -1e-8)
        throw std::runtime_error("psd_sqrt: correlation matrix has eigenvalue below -1e-8");
    for (int i = 0; i < lam.size(); ++i) lam(i) = lam(i) > 0.0 ? std::sqrt(lam(i)) : 0.0;
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

inline Eigen::VectorXd pathloss_vector(const Geometry& geo, const SystemConfig& cfg) {
    const Eigen::Vector3d origin = geo.final_layer_center();
    Eigen::VectorXd zeta(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k) {
        const double d = (geo.user_positions[k] - origin).norm();
        zeta(k) = cfg.pathloss_ref * std::pow(d / cfg.ref_distance, -cfg.pathloss_exp);
    }
    return zeta;
}

/// Draws h_k = sqrt(zeta_k) * T^{1/2} w_k with w_k standard circularly
/// symmetric complex Gaussian. Reproducible: same seed, same realization.
inline ChannelRealization sample_channels(std::uint64_t seed, const Geometry& geo, const SystemConfig& cfg,
                                          const Eigen::MatrixXd& corr) {
    ChannelRealization chan;
    auto tm = build_transmission_matrices(geo, cfg);
    chan.q1 = std::move(tm.q1);
    chan.q_inter = std::move(tm.q_inter);
    chan.corr = corr;
    chan.pathloss = pathloss_vector(geo, cfg);

    const Eigen::MatrixXd root = psd_sqrt(corr);
    const int m = cfg.atoms_per_layer;

    std::mt19937_64 gen(splitmix64(seed));
    std::normal_distribution<double> normal(0.0, 1.0);
    chan.h.reserve(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k) {
        Eigen::VectorXcd w(m);
        for (int i = 0; i < m; ++i) {
            const double re = normal(gen);
            const double im = normal(gen);
            w(i) = std::complex<double>(re, im) * std::numbers::sqrt2 / 2.0;
        }
        chan.h.push_back(std::sqrt(chan.pathloss(k)) * (root * w));
    }
    return chan;
}

/// Convenience wrapper: geometry, correlation, and channel draw in one call.
inline ChannelRealization make_channel(std::uint64_t seed, const SystemConfig& cfg) {
    const Geometry geo = build_geometry(cfg);
    return sample_channels(seed, geo, cfg, correlation_matrix(geo, cfg.wavelength));
}

} // namespace simrsma
