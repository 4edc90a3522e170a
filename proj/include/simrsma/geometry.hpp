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
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "simrsma/config.hpp"

namespace simrsma {

/// Deterministic element positions: N antennas, L x M meta-atoms, K users.
struct Geometry {
    std::vector<Eigen::Vector3d> antenna_positions;              // N
    std::vector<std::vector<Eigen::Vector3d>> atom_positions;    // L layers of M atoms
    std::vector<Eigen::Vector3d> user_positions;                 // K

    int num_layers() const { return static_cast<int>(atom_positions.size()); }
    int atoms_per_layer() const { return atom_positions.empty() ? 0 : static_cast<int>(atom_positions.front().size()); }

    /// Center of the user-facing (last) layer; path-loss distances are measured from here.
    Eigen::Vector3d final_layer_center() const {
        Eigen::Vector3d c = Eigen::Vector3d::Zero();
        const auto& layer = atom_positions.back();
        for (const auto& p : layer) c += p;
        return c / static_cast<double>(layer.size());
    }
};

/// Antennas centered on the x-axis at z = bs_height with lambda/2 pitch; layers
/// stacked above that plane at multiples of sim_thickness / L; users on the
/// y-axis at {0, d_u, 2*d_u, ...} on the ground plane.
inline Geometry build_geometry(const SystemConfig& cfg) {
    cfg.validate();
    Geometry geo;

    const int n = cfg.num_antennas;
    const double ant_pitch = cfg.wavelength / 2.0;
    geo.antenna_positions.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double x = (i - 0.5 * (n - 1)) * ant_pitch;
        geo.antenna_positions.emplace_back(x, 0.0, cfg.bs_height);
    }

    const int side = cfg.grid_side();
    const double pitch = cfg.atom_spacing;
    const double dz = cfg.layer_spacing();
    geo.atom_positions.resize(cfg.layers);
    for (int l = 0; l < cfg.layers; ++l) {
        const double z = cfg.bs_height + (l + 1) * dz;
        auto& layer = geo.atom_positions[l];
        layer.reserve(cfg.atoms_per_layer);
        for (int row = 0; row < side; ++row) {
            const double y = (row - 0.5 * (side - 1)) * pitch;
            for (int col = 0; col < side; ++col) {
                const double x = (col - 0.5 * (side - 1)) * pitch;
                layer.emplace_back(x, y, z);
            }
        }
    }

    geo.user_positions.reserve(cfg.num_users);
    for (int k = 0; k < cfg.num_users; ++k)
        geo.user_positions.emplace_back(0.0, k * cfg.user_spacing, 0.0);

    return geo;
}

/// Rayleigh-Sommerfeld transmission coefficient between two elements:
///   (A_t cos(psi) / d) * (1/(2 pi d) - j/lambda) * exp(j 2 pi d / lambda)
/// with d the separation and psi the angle to the propagation (z) axis.
inline std::complex<double> rs_coefficient(const Eigen::Vector3d& src, const Eigen::Vector3d& dst,
                                           double wavelength, double atom_area) {
    const Eigen::Vector3d diff = dst - src;
    const double d = diff.norm();
    if (d <= 0.0) throw std::domain_error("rs_coefficient: coincident source and destination");
    const double cos_psi = std::abs(diff.z()) / d;
    const double two_pi = 2.0 * std::numbers::pi;
    const std::complex<double> radial(1.0 / (two_pi * d), -1.0 / wavelength);
    const std::complex<double> phase = std::polar(1.0, two_pi * d / wavelength);
    return (atom_area * cos_psi / d) * radial * phase;
}

struct TransmissionMatrices {
    Eigen::MatrixXcd q1;                   // M x N, column n = antenna n to layer 1
    std::vector<Eigen::MatrixXcd> q_inter; // Q_l for l = 2..L, each M x M
};

inline TransmissionMatrices build_transmission_matrices(const Geometry& geo, const SystemConfig& cfg) {
    const int m = cfg.atoms_per_layer;
    const int n = cfg.num_antennas;
    TransmissionMatrices tm;

    tm.q1.resize(m, n);
    for (int col = 0; col < n; ++col)
        for (int row = 0; row < m; ++row)
            tm.q1(row, col) =
                rs_coefficient(geo.antenna_positions[col], geo.atom_positions[0][row], cfg.wavelength, cfg.atom_area);

    tm.q_inter.reserve(std::max(0, cfg.layers - 1));
    for (int l = 1; l < cfg.layers; ++l) {
        Eigen::MatrixXcd q(m, m);
        for (int col = 0; col < m; ++col)
            for (int row = 0; row < m; ++row)
                q(row, col) = rs_coefficient(geo.atom_positions[l - 1][col], geo.atom_positions[l][row],
                                             cfg.wavelength, cfg.atom_area);
        tm.q_inter.push_back(std::move(q));
    }
    return tm;
}

inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

/// Spatial correlation of the user-facing layer under isotropic scattering:
/// T[m,m'] = sinc(2 d_{m,m'} / lambda).
inline Eigen::MatrixXd correlation_matrix(const Geometry& geo, double wavelength) {
    const auto& layer = geo.atom_positions.back();
    const int m = static_cast<int>(layer.size());
    Eigen::MatrixXd t(m, m);
    for (int i = 0; i < m; ++i) {
        t(i, i) = 1.0;
        for (int j = i + 1; j < m; ++j) {
            const double d = (layer[i] - layer[j]).norm();
            const double v = sinc(2.0 * d / wavelength);
            t(i, j) = v;
            t(j, i) = v;
        }
    }
    return t;
}

} // namespace simrsma
