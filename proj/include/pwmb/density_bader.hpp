#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pwmb/lattice.hpp"
#include "pwmb/pwio.hpp"

namespace pwmb {

struct VolumetricDensity {
    RealSpaceGrid grid;         // real non-negative values, electrons/Bohr^3
    double total_charge = 0.0;  // grid integral

    double value(std::size_t idx) const { return grid.values[idx].real(); }
};

// rho(r) = sum_t f_t |psi_t(r)|^2 sampled on `dims`; occupancies covers every
// orbital (environment orbitals at 2, active at solver output, rest 0).
VolumetricDensity assemble_density(const PlaneWaveOrbitalSet& orbitals,
                                   const CrystalCell& cell,
                                   const std::vector<double>& occupancies,
                                   const std::array<int, 3>& dims, bool parallel = true);

struct BaderOptions {
    double vacuum_threshold = 1e-6;  // e/Bohr^3, on the basin peak density
    double capture_radius = -1.0;    // Bohr; < 0 -> half the minimum grid spacing
};

struct BaderPartition {
    std::vector<int> labels;      // per grid point: atom index, or -1 for vacuum
    std::vector<double> charges;  // Q_I, electrons
    double vacuum_charge = 0.0;
};

// Near-grid steepest ascent: every point follows the density gradient (with
// off-lattice correction vectors) to a local maximum and inherits that basin.
// A maximum within the capture radius of a nucleus (nearest nucleus as
// fallback) labels the basin with that atom; basins peaking below the vacuum
// threshold are vacuum. Two nuclei resolving to one maximum is an error.
BaderPartition bader_partition(const VolumetricDensity& density, const CrystalCell& cell,
                               const BaderOptions& options = {}, bool parallel = true);

// BEC_I = Z_I - Q_I
std::vector<double> excess_charges(const BaderPartition& partition,
                                   const std::vector<double>& z_valence);

// Cube-style volumetric text format (two comment lines, atom count + origin,
// voxel vectors, atom records, z-fastest values).
void write_cube(const std::filesystem::path& path, const VolumetricDensity& density,
                const CrystalCell& cell, const std::vector<double>& z_valence);
VolumetricDensity read_cube(const std::filesystem::path& path, CrystalCell& cell_out);

// CSV report: atom,species,Z,Q,BEC
void write_charges_csv(const std::filesystem::path& path, const CrystalCell& cell,
                       const std::vector<double>& z_valence,
                       const BaderPartition& partition,
                       const std::vector<double>& excess);

}  // namespace pwmb
