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

#include <cmath>
#include <stdexcept>
#include <string>

namespace simrsma {

inline constexpr double kSpeedOfLight = 299792458.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// All physical and solver constants for one system instance.
///
/// Geometry convention: BS antennas lie on the x-axis at height bs_height,
/// metasurface layers are stacked along +z above the antenna plane with
/// inter-layer spacing sim_thickness / layers, and users sit on the ground
/// (z = 0) along the y-axis starting at y = 0.
struct SystemConfig {
    int num_users = 3;        // K
    int num_antennas = 4;     // N, must equal K + 1 (one common + K private)
    int layers = 2;           // L
    int atoms_per_layer = 36; // M, perfect square (sqrt(M) x sqrt(M) grid)

    double wavelength = kSpeedOfLight / 28e9;             // carrier 28 GHz
    double atom_area = wavelength * wavelength / 4.0;     // lambda^2 / 4
    double atom_spacing = wavelength / 2.0;               // within-layer grid pitch
    double sim_thickness = 5.0 * wavelength;              // total stack depth
    double bs_height = 5.0;                               // meters
    double user_spacing = 5.0;                            // meters along y

    double max_power = dbm_to_watt(20.0);                 // watts
    double noise_power = dbm_to_watt(-100.0);             // watts per user
    double pathloss_ref = db_to_linear(-60.0);            // beta_0, linear
    double ref_distance = 1.0;                            // d_0, meters
    double pathloss_exp = 3.5;

    // Smooth phase objective: sharpness, penalty and reward weights.
    // Requires 0 < reward_weight < penalty_weight.
    double lse_sharpness = 10.0;  // beta
    double penalty_weight = 10.0; // mu
    double reward_weight = 0.1;   // eta

    double sca_tol = 1e-4;
    int sca_max_iter = 50;
    double rcg_tol = 1e-6;
    int rcg_max_iter = 200;
    double ao_tol = 1e-3;
    int ao_max_iter = 20;

    void set_carrier(double hz) {
        wavelength = kSpeedOfLight / hz;
        atom_area = wavelength * wavelength / 4.0;
        atom_spacing = wavelength / 2.0;
        sim_thickness = 5.0 * wavelength;
    }

    void set_users(int k) {
        num_users = k;
        num_antennas = k + 1;
    }

    /// Desk-scale defaults used throughout the test harness (M = 36, L = 2, K = 3).
    static SystemConfig desk_default() { return SystemConfig{}; }

    /// Full-scale configuration (M = 64) matching the reference setup.
    static SystemConfig paper_default() {
        SystemConfig c;
        c.atoms_per_layer = 64;
        return c;
    }

    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemConfig: " + msg); };
        if (num_users < 1) fail("num_users must be positive");
        if (num_antennas != num_users + 1) fail("num_antennas must equal num_users + 1");
        if (layers < 1) fail("layers must be positive");
        if (atoms_per_layer < 1) fail("atoms_per_layer must be positive");
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(atoms_per_layer))));
        if (side * side != atoms_per_layer) fail("atoms_per_layer must be a perfect square");
        if (wavelength <= 0.0) fail("wavelength must be positive");
        if (atom_area <= 0.0) fail("atom_area must be positive");
        if (atom_spacing <= 0.0) fail("atom_spacing must be positive");
        if (sim_thickness <= 0.0) fail("sim_thickness must be positive");
        if (bs_height <= 0.0) fail("bs_height must be positive");
        if (user_spacing <= 0.0) fail("user_spacing must be positive");
        if (max_power <= 0.0) fail("max_power must be positive");
        if (noise_power <= 0.0) fail("noise_power must be positive");
        if (pathloss_ref <= 0.0) fail("pathloss_ref must be positive");
        if (ref_distance <= 0.0) fail("ref_distance must be positive");
        if (lse_sharpness <= 0.0) fail("lse_sharpness must be positive");
        if (!(reward_weight > 0.0 && reward_weight < penalty_weight))
            fail("requires 0 < reward_weight < penalty_weight");
        if (sca_tol <= 0.0 || rcg_tol <= 0.0 || ao_tol <= 0.0) fail("tolerances must be positive");
        if (sca_max_iter < 1 || rcg_max_iter < 1 || ao_max_iter < 1) fail("iteration caps must be positive");
    }

    int grid_side() const { return static_cast<int>(std::lround(std::sqrt(static_cast<double>(atoms_per_layer)))); }
    double layer_spacing() const { return sim_thickness / layers; }
};

} // namespace simrsma
