#include "pwmb/density_bader.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pwmb {

VolumetricDensity assemble_density(const PlaneWaveOrbitalSet& orbitals,
                                   const CrystalCell& cell,
                                   const std::vector<double>& occupancies,
                                   const std::array<int, 3>& dims, bool parallel) {
    if (int(occupancies.size()) != orbitals.n_orbitals())
        throw InputError("assemble_density: one occupancy per orbital required");
    for (std::size_t t = 0; t < occupancies.size(); ++t)
        if (occupancies[t] < 0.0 || occupancies[t] > 2.0 + 1e-8)
            throw InputError("assemble_density: occupancy of orbital " +
                             std::to_string(t) + " outside [0, 2]");
    check_grid_dims(cell, dims, 2.0 * orbitals.g_cut());

    VolumetricDensity out;
    out.grid.dims = dims;
    out.grid.cell = cell;
    out.grid.values.assign(std::size_t(dims[0]) * dims[1] * dims[2], cplx(0.0));
    const std::int64_t npts = std::int64_t(out.grid.values.size());
    for (int t = 0; t < orbitals.n_orbitals(); ++t) {
        const double f = occupancies[t];
        if (f <= 1e-12) continue;
        RealSpaceGrid psi = orbital_to_real_space(orbitals, t, dims, cell);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
        for (std::int64_t i = 0; i < npts; ++i)
            out.grid.values[i] += f * std::norm(psi.values[i]);
    }
    const double w = out.grid.point_weight();
    double total = 0.0;
    for (std::int64_t i = 0; i < npts; ++i) {
        const double v = out.grid.values[i].real();
        if (v < -1e-10)
            throw NumericalError("assemble_density: negative density on the grid");
        total += v * w;
    }
    out.total_charge = total;
    return out;
}

namespace {

struct AscentContext {
    const std::vector<double>* rho;
    std::array<int, 3> dims;
    // columns: fractional-gradient -> grid-step conversion diag(n) A^-1 A^-T,
    // folded below into a single 3x3 acting on the finite-difference vector
    double conv[3][3];
    std::int64_t max_steps;
};

inline int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

inline std::size_t flat(const std::array<int, 3>& d, int i, int j, int k) {
    return (std::size_t(i) * d[1] + j) * d[2] + k;
}

// Trajectory from one grid point to its local maximum; returns the flat index
// of the maximum. Deterministic and independent per starting point.
std::size_t ascend(const AscentContext& ctx, int i0, int j0, int k0) {
    const auto& d = ctx.dims;
    const std::vector<double>& rho = *ctx.rho;
    int p[3] = {i0, j0, k0};
    double corr[3] = {0.0, 0.0, 0.0};
    for (std::int64_t step = 0; step < ctx.max_steps; ++step) {
        const double here = rho[flat(d, p[0], p[1], p[2])];
        // centered difference per fractional coordinate
        double du[3];
        for (int a = 0; a < 3; ++a) {
            int hi[3] = {p[0], p[1], p[2]}, lo[3] = {p[0], p[1], p[2]};
            hi[a] = wrap(p[a] + 1, d[a]);
            lo[a] = wrap(p[a] - 1, d[a]);
            du[a] = 0.5 * double(d[a]) *
                    (rho[flat(d, hi[0], hi[1], hi[2])] - rho[flat(d, lo[0], lo[1], lo[2])]);
        }
        double dir[3];
        for (int a = 0; a < 3; ++a)
            dir[a] = ctx.conv[a][0] * du[0] + ctx.conv[a][1] * du[1] + ctx.conv[a][2] * du[2];
        const double dmax =
            std::max({std::abs(dir[0]), std::abs(dir[1]), std::abs(dir[2])});
        bool moved = false;
        if (dmax > 0.0) {
            int stepv[3];
            for (int a = 0; a < 3; ++a) {
                dir[a] /= dmax;
                stepv[a] = int(std::lround(dir[a] + corr[a]));
                stepv[a] = std::clamp(stepv[a], -1, 1);
            }
            if (stepv[0] || stepv[1] || stepv[2]) {
                const int q[3] = {wrap(p[0] + stepv[0], d[0]), wrap(p[1] + stepv[1], d[1]),
                                  wrap(p[2] + stepv[2], d[2])};
                if (rho[flat(d, q[0], q[1], q[2])] > here) {
                    for (int a = 0; a < 3; ++a) {
                        corr[a] += dir[a] - stepv[a];
                        p[a] = q[a];
                    }
                    moved = true;
                }
            }
        }
        if (!moved) {
            // ridge or flat gradient: fall back to the best of the 26 neighbors
            double best = here;
            int bq[3] = {p[0], p[1], p[2]};
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    for (int dk = -1; dk <= 1; ++dk) {
                        if (!di && !dj && !dk) continue;
                        const int q[3] = {wrap(p[0] + di, d[0]), wrap(p[1] + dj, d[1]),
                                          wrap(p[2] + dk, d[2])};
                        const double v = rho[flat(d, q[0], q[1], q[2])];
                        if (v > best) {
                            best = v;
                            bq[0] = q[0];
                            bq[1] = q[1];
                            bq[2] = q[2];
                        }
                    }
            if (best <= here) return flat(d, p[0], p[1], p[2]);  // local maximum
            p[0] = bq[0];
            p[1] = bq[1];
            p[2] = bq[2];
            corr[0] = corr[1] = corr[2] = 0.0;
        }
    }
    throw NumericalError("bader_partition: ascent trajectory did not terminate");
}

Mat3 inverse(const Mat3& m) {
    const double det = m.det();
    if (std::abs(det) < 1e-300) throw NumericalError("singular lattice matrix");
    const Vec3 r0 = cross(m.col[1], m.col[2]) * (1.0 / det);
    const Vec3 r1 = cross(m.col[2], m.col[0]) * (1.0 / det);
    const Vec3 r2 = cross(m.col[0], m.col[1]) * (1.0 / det);
    // rows r0,r1,r2 -> store as columns of the inverse transposed? build directly
    Mat3 inv;
    inv.col[0] = {r0.x, r1.x, r2.x};
    inv.col[1] = {r0.y, r1.y, r2.y};
    inv.col[2] = {r0.z, r1.z, r2.z};
    return inv;
}

}  // namespace

BaderPartition bader_partition(const VolumetricDensity& density, const CrystalCell& cell,
                               const BaderOptions& options, bool parallel) {
    const auto& dims = density.grid.dims;
    const std::size_t npts = density.grid.size();
    if (npts == 0) throw InputError("bader_partition: empty density grid");
    if (cell.atoms.empty()) throw InputError("bader_partition: no atoms");

    std::vector<double> rho(npts);
    double peak = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        rho[i] = density.grid.values[i].real();
        peak = std::max(peak, rho[i]);
    }
    if (peak <= 0.0) throw InputError("bader_partition: density vanishes everywhere");

    AscentContext ctx;
    ctx.rho = &rho;
    ctx.dims = dims;
    ctx.max_steps = 100 * std::int64_t(dims[0] + dims[1] + dims[2]);
    {
        // dir = diag(n) A^-1 A^-T du maps the fractional-coordinate gradient
        // to an uphill direction in grid-index space
        const Mat3 ainv = inverse(cell.lattice);
        double m[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k)
                    s += ainv.col[k][r] * ainv.col[k][c];  // (A^-1 A^-T)_rc
                m[r][c] = s;
            }
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) ctx.conv[r][c] = double(dims[r]) * m[r][c];
    }

    double capture = options.capture_radius;
    if (capture < 0.0) {
        double spacing = 1e300;
        for (int a = 0; a < 3; ++a)
            spacing = std::min(spacing, cell.lattice.col[a].norm() / double(dims[a]));
        capture = 0.5 * spacing;
    }

    auto label_of_max = [&](std::size_t mflat) -> int {
        if (rho[mflat] < options.vacuum_threshold) return -1;
        const int i = int(mflat / (std::size_t(dims[1]) * dims[2]));
        const int j = int((mflat / dims[2]) % dims[1]);
        const int k = int(mflat % dims[2]);
        const Vec3 pos = density.grid.point(i, j, k);
        int best = -1, captured = -1;
        double best_d = 1e300, captured_d = 1e300;
        for (std::size_t a = 0; a < cell.atoms.size(); ++a) {
            const double dist = cell.min_image_distance(pos, cell.atoms[a].position);
            if (dist < best_d) {
                best_d = dist;
                best = int(a);
            }
            if (dist <= capture && dist < captured_d) {
                captured_d = dist;
                captured = int(a);
            }
        }
        return captured >= 0 ? captured : best;
    };

    BaderPartition part;
    part.labels.assign(npts, -1);
    std::vector<std::size_t> maxima(npts);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
#endif
    for (std::int64_t idx = 0; idx < std::int64_t(npts); ++idx) {
        const int i = int(idx / (std::size_t(dims[1]) * dims[2]));
        const int j = int((idx / dims[2]) % dims[1]);
        const int k = int(idx % dims[2]);
        const std::size_t m = ascend(ctx, i, j, k);
        maxima[idx] = m;
        part.labels[idx] = label_of_max(m);
    }

    // each nucleus must sit in its own basin
    std::map<std::size_t, int> nucleus_basin;
    for (std::size_t a = 0; a < cell.atoms.size(); ++a) {
        const Vec3 frac = cell.to_fractional(cell.atoms[a].position);
        const int i = wrap(int(std::lround(frac.x * dims[0])), dims[0]);
        const int j = wrap(int(std::lround(frac.y * dims[1])), dims[1]);
        const int k = wrap(int(std::lround(frac.z * dims[2])), dims[2]);
        const std::size_t m = maxima[flat(dims, i, j, k)];
        auto [it, inserted] = nucleus_basin.emplace(m, int(a));
        if (!inserted)
            throw NumericalError("unresolved basin: atoms " + std::to_string(it->second) +
                                 " and " + std::to_string(a) + " share one maximum "
                                 "(grid too coarse)");
    }

    part.charges.assign(cell.atoms.size(), 0.0);
    const double w = density.grid.point_weight();
    for (std::size_t idx = 0; idx < npts; ++idx) {
        if (part.labels[idx] >= 0)
            part.charges[part.labels[idx]] += rho[idx] * w;
        else
            part.vacuum_charge += rho[idx] * w;
    }
    return part;
}

std::vector<double> excess_charges(const BaderPartition& partition,
                                   const std::vector<double>& z_valence) {
    if (z_valence.size() != partition.charges.size())
        throw InputError("excess_charges: one valence charge per atom required");
    std::vector<double> bec(z_valence.size());
    for (std::size_t i = 0; i < bec.size(); ++i)
        bec[i] = z_valence[i] - partition.charges[i];
    return bec;
}

void write_cube(const std::filesystem::path& path, const VolumetricDensity& density,
                const CrystalCell& cell, const std::vector<double>& z_valence) {
    if (z_valence.size() != cell.atoms.size())
        throw InputError("write_cube: one valence charge per atom required");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path.string() + " for writing");
    char buf[256];
    f << "valence charge density\n";
    f << "order: x outer, z fastest; units Bohr\n";
    const auto& d = density.grid.dims;
    std::snprintf(buf, sizeof(buf), "%5d %15.8e %15.8e %15.8e\n",
                  int(cell.atoms.size()), 0.0, 0.0, 0.0);
    f << buf;
    for (int a = 0; a < 3; ++a) {
        const Vec3 v = cell.lattice.col[a] * (1.0 / d[a]);
        std::snprintf(buf, sizeof(buf), "%5d %15.8e %15.8e %15.8e\n", d[a], v.x, v.y, v.z);
        f << buf;
    }
    for (std::size_t a = 0; a < cell.atoms.size(); ++a) {
        const Vec3& p = cell.atoms[a].position;
        std::snprintf(buf, sizeof(buf), "%5d %15.8e %15.8e %15.8e %15.8e\n",
                      int(std::lround(z_valence[a])), z_valence[a], p.x, p.y, p.z);
        f << buf;
    }
    int col = 0;
    for (int i = 0; i < d[0]; ++i)
        for (int j = 0; j < d[1]; ++j)
            for (int k = 0; k < d[2]; ++k) {
                std::snprintf(buf, sizeof(buf), " %17.10e",
                              density.grid.values[density.grid.index(i, j, k)].real());
                f << buf;
                if (++col == 6) {
                    f << "\n";
                    col = 0;
                }
            }
    if (col) f << "\n";
}

VolumetricDensity read_cube(const std::filesystem::path& path, CrystalCell& cell_out) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path.string());
    std::string line;
    std::getline(f, line);
    std::getline(f, line);
    int natoms = 0;
    double ox, oy, oz;
    f >> natoms >> ox >> oy >> oz;
    if (!f || natoms < 0) throw InputError("cube: malformed atom count line");
    VolumetricDensity out;
    for (int a = 0; a < 3; ++a) {
        int n;
        Vec3 v;
        f >> n >> v.x >> v.y >> v.z;
        if (!f || n <= 0) throw InputError("cube: malformed voxel line");
        out.grid.dims[a] = n;
        cell_out.lattice.col[a] = v * double(n);
    }
    cell_out.atoms.clear();
    for (int a = 0; a < natoms; ++a) {
        int zn;
        double zq;
        Vec3 p;
        f >> zn >> zq >> p.x >> p.y >> p.z;
        if (!f) throw InputError("cube: malformed atom record");
        Atom atom;
        atom.species = "Z" + std::to_string(zn);
        atom.position = p;
        cell_out.atoms.push_back(atom);
    }
    out.grid.cell = cell_out;
    out.grid.values.resize(out.grid.size());
    double total = 0.0;
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        double v;
        if (!(f >> v)) throw InputError("cube: truncated value block");
        out.grid.values[i] = cplx(v, 0.0);
        total += v;
    }
    out.total_charge = total * out.grid.point_weight();
    return out;
}

void write_charges_csv(const std::filesystem::path& path, const CrystalCell& cell,
                       const std::vector<double>& z_valence,
                       const BaderPartition& partition,
                       const std::vector<double>& excess) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path.string() + " for writing");
    f << "atom,species,Z,Q,BEC\n";
    char buf[256];
    for (std::size_t a = 0; a < cell.atoms.size(); ++a) {
        std::snprintf(buf, sizeof(buf), "%zu,%s,%.4f,%.6f,%.6f\n", a,
                      cell.atoms[a].species.c_str(), z_valence[a], partition.charges[a],
                      excess[a]);
        f << buf;
    }
}

}  // namespace pwmb
