#include "pwmb/matelems.hpp"

#include <algorithm>
#include <map>

#include "pwmb/sphharm.hpp"

namespace pwmb {

std::size_t TwoBodyTensor::canonical_index(int t, int u, int v, int w, bool& conj) const {
    const std::size_t direct = std::min(flat(t, u, v, w), flat(u, t, w, v));
    const std::size_t conjugated = std::min(flat(w, v, u, t), flat(v, w, t, u));
    conj = conjugated < direct;
    return std::min(direct, conjugated);
}

std::size_t TwoBodyTensor::n_unique() const {
    std::size_t count = 0;
    for (int t = 0; t < n_; ++t)
        for (int u = 0; u < n_; ++u)
            for (int v = 0; v < n_; ++v)
                for (int w = 0; w < n_; ++w)
                    if (is_canonical(t, u, v, w)) ++count;
    return count;
}

OneBodyMatrix kinetic_matrix(const PlaneWaveOrbitalSet& orbitals) {
    const int n = orbitals.n_orbitals();
    const int ng = orbitals.n_gvecs();
    std::vector<double> g2(ng);
    for (int g = 0; g < ng; ++g) g2[g] = orbitals.g_cartesian(g).norm2();
    OneBodyMatrix T(n, n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int t = 0; t < n; ++t)
        for (int u = t; u < n; ++u) {
            cplx acc(0.0);
            for (int g = 0; g < ng; ++g)
                acc += std::conj(orbitals.coeff(g, t)) * orbitals.coeff(g, u) * g2[g];
            T(t, u) = 0.5 * acc;
            T(u, t) = 0.5 * std::conj(acc);
        }
    return T;
}

double local_radial_transform(const NormConservingPseudopotential& pp, double q) {
    const std::size_t n = pp.r_grid.size();
    const double z = pp.z_valence;
    if (q == 0.0) {
        // int r^2 (V_loc + Z/r) dr; the integrand is Z r near the origin where
        // erf regularization is irrelevant
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = pp.r_grid[i];
            f[i] = r * r * pp.v_local[i] + z * r;
        }
        return pp.radial_integral(f);
    }
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = pp.r_grid[i];
        const double short_range =
            r * pp.v_local[i] + (r > 0.0 ? z * std::erf(r) : 0.0);
        f[i] = short_range * (r > 0.0 ? std::sin(q * r) / q : 0.0);
    }
    const double r_max = pp.r_grid.back();
    const double tail = r_max * pp.v_local.back() + z * std::erf(r_max);
    if (std::abs(tail) > 1e-6)
        throw NumericalError("pseudopotential '" + pp.element +
                             "': local potential tail not decayed at mesh end");
    return pp.radial_integral(f);
}

namespace {

// Spherically symmetric part of <G1|V_loc|G2> (everything except the structure
// phase), as a function of q = |G1 - G2|.
double local_pp_shape(const NormConservingPseudopotential& pp, double q,
                      const CrystalCell& cell) {
    const double pref = 4.0 * kPi / cell.volume();
    if (q < 1e-12) return pref * local_radial_transform(pp, 0.0);
    const double q2 = q * q;
    return pref * (-pp.z_valence * std::exp(-q2 / 4.0) / q2 +
                   local_radial_transform(pp, q));
}

}  // namespace

cplx local_pp_pw(const NormConservingPseudopotential& pp, const Vec3& r_atom,
                 const Vec3& delta_g, const CrystalCell& cell) {
    const double q = delta_g.norm();
    const cplx phase = std::exp(cplx(0.0, -delta_g.dot(r_atom)));
    return phase * local_pp_shape(pp, q, cell);
}

double projector_form_factor(const NormConservingPseudopotential& pp, int ip, double x) {
    const auto& proj = pp.projectors[ip];
    const std::size_t n = pp.r_grid.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = pp.r_grid[i];
        f[i] = r * r * proj.beta[i] * spherical_bessel(proj.l, x * r);
    }
    return pp.radial_integral(f);
}

cplx nonlocal_pp_pw(const NormConservingPseudopotential& pp, const Vec3& r_atom,
                    const Vec3& g1, const Vec3& g2, const CrystalCell& cell) {
    const double x1 = g1.norm(), x2 = g2.norm();
    cplx sum(0.0);
    for (const auto& [l, block] : pp.d_blocks) {
        const auto& rows = pp.projector_index.at(l);
        const int nb = int(rows.size());
        std::vector<double> f1(nb), f2(nb);
        for (int i = 0; i < nb; ++i) {
            f1[i] = projector_form_factor(pp, rows[i], x1);
            f2[i] = projector_form_factor(pp, rows[i], x2);
        }
        cplx angular(0.0);
        for (int m = -l; m <= l; ++m)
            angular += spherical_harmonic(l, m, g1) *
                       std::conj(spherical_harmonic(l, m, g2));
        // D is block-diagonal in l and independent of m, so the m sum factors
        cplx radial(0.0);
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j)
                radial += block[std::size_t(i) * nb + j] * f1[i] * f2[j];
        sum += angular * radial;
    }
    const double pref = 16.0 * kPi * kPi / cell.volume();
    const Vec3 dg = g1 - g2;
    return pref * std::exp(cplx(0.0, -dg.dot(r_atom))) * sum;
}

namespace {

struct PairSpectra {
    std::vector<Miller> g_list;   // doubled sphere
    std::vector<int> neg_index;   // index of -G
    std::vector<double> g2;
    // spectra[i * n + j] populated for i <= j over positions in `indices`
    std::vector<std::vector<cplx>> spectra;
    int n = 0;

    const std::vector<cplx>& upper(int i, int j) const {
        return spectra[std::size_t(i) * n + j];
    }
    // rho~_{indices[i], indices[j]}(G_k); uses rho~_ji(G) = conj(rho~_ij(-G))
    cplx rho(int i, int j, int k) const {
        if (i <= j) return upper(i, j)[k];
        return std::conj(upper(j, i)[neg_index[k]]);
    }
};

PairSpectra compute_pair_spectra(const PlaneWaveOrbitalSet& orbitals,
                                 const CrystalCell& cell,
                                 const std::vector<int>& indices, bool parallel) {
    PairSpectra ps;
    ps.n = int(indices.size());
    ReciprocalBasis doubled{orbitals.b_vectors, 2.0 * orbitals.g_cut()};
    ps.g_list = generate_g_sphere(doubled);
    const auto dims = fft_grid_dims(cell, 2.0 * orbitals.g_cut());

    std::map<Miller, int> where;
    for (int k = 0; k < int(ps.g_list.size()); ++k) where[ps.g_list[k]] = k;
    ps.neg_index.resize(ps.g_list.size());
    ps.g2.resize(ps.g_list.size());
    for (int k = 0; k < int(ps.g_list.size()); ++k) {
        const Miller& m = ps.g_list[k];
        ps.neg_index[k] = where.at({-m[0], -m[1], -m[2]});
        ps.g2[k] = doubled.cartesian(m).norm2();
    }

    ps.spectra.resize(std::size_t(ps.n) * ps.n);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < ps.n; ++i)
        for (int j = i; j < ps.n; ++j) pairs.emplace_back(i, j);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int p = 0; p < int(pairs.size()); ++p) {
        const auto [i, j] = pairs[p];
        ps.spectra[std::size_t(i) * ps.n + j] = pair_density_spectrum(
            orbitals, indices[i], indices[j], dims, cell, ps.g_list);
    }
    return ps;
}

TwoBodyTensor two_body_impl(const PlaneWaveOrbitalSet& orbitals, const CrystalCell& cell,
                            const std::vector<int>& indices, bool parallel) {
    for (int t : indices)
        if (t < 0 || t >= orbitals.n_orbitals())
            throw InputError("two_body_ks: orbital index out of range");
    const int n = int(indices.size());
    const PairSpectra ps = compute_pair_spectra(orbitals, cell, indices, parallel);
    const int ng = int(ps.g_list.size());
    const double pref = 4.0 * kPi * cell.volume();

    TwoBodyTensor h4(n);
    std::vector<std::array<int, 4>> work;
    for (int t = 0; t < n; ++t)
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                for (int w = 0; w < n; ++w)
                    if (h4.is_canonical(t, u, v, w)) work.push_back({t, u, v, w});
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int q = 0; q < int(work.size()); ++q) {
        const auto [t, u, v, w] = work[q];
        cplx acc(0.0);
        for (int k = 0; k < ng; ++k) {
            if (ps.g2[k] < 1e-12) continue;  // G = 0 excluded
            acc += ps.rho(t, w, ps.neg_index[k]) * ps.rho(u, v, k) / ps.g2[k];
        }
        h4.set(t, u, v, w, pref * acc);
    }
    return h4;
}

}  // namespace

TwoBodyTensor two_body_ks(const PlaneWaveOrbitalSet& orbitals, const CrystalCell& cell,
                          const std::vector<int>& indices) {
    return two_body_impl(orbitals, cell, indices, true);
}

TwoBodyTensor two_body_ks_serial(const PlaneWaveOrbitalSet& orbitals,
                                 const CrystalCell& cell,
                                 const std::vector<int>& indices) {
    return two_body_impl(orbitals, cell, indices, false);
}

OneBodyMatrix one_body_ks(const PlaneWaveOrbitalSet& orbitals, const CrystalCell& cell,
                          const std::vector<const NormConservingPseudopotential*>& pps) {
    if (pps.size() != cell.atoms.size())
        throw InputError("one_body_ks: one pseudopotential per atom required");
    const int n = orbitals.n_orbitals();
    const int ng = orbitals.n_gvecs();
    OneBodyMatrix h = kinetic_matrix(orbitals);

    // local part: h_loc(t,u) = sum_dG V~_loc(dG) V rho~_tu(-dG)
    std::vector<int> all(n);
    for (int t = 0; t < n; ++t) all[t] = t;
    const PairSpectra ps = compute_pair_spectra(orbitals, cell, all, true);
    const int ngd = int(ps.g_list.size());

    std::vector<cplx> vtot(ngd, cplx(0.0));
    {
        // shapes keyed by (species, |dG|^2); radial transforms are cheap but
        // shared across atoms of one species and across dG of equal length
        std::map<const NormConservingPseudopotential*, std::map<double, double>> cache;
        for (std::size_t a = 0; a < pps.size(); ++a) {
            auto& per_species = cache[pps[a]];
            for (int k = 0; k < ngd; ++k)
                if (!per_species.count(ps.g2[k]))
                    per_species.emplace(ps.g2[k],
                                        local_pp_shape(*pps[a], std::sqrt(ps.g2[k]), cell));
        }
        ReciprocalBasis doubled{orbitals.b_vectors, 2.0 * orbitals.g_cut()};
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int k = 0; k < ngd; ++k) {
            const Vec3 dg = doubled.cartesian(ps.g_list[k]);
            cplx acc(0.0);
            for (std::size_t a = 0; a < pps.size(); ++a)
                acc += cache.at(pps[a]).at(ps.g2[k]) *
                       std::exp(cplx(0.0, -dg.dot(cell.atoms[a].position)));
            vtot[k] = acc;
        }
    }
    const double vol = cell.volume();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int t = 0; t < n; ++t)
        for (int u = t; u < n; ++u) {
            cplx acc(0.0);
            for (int k = 0; k < ngd; ++k) acc += vtot[k] * ps.rho(t, u, ps.neg_index[k]);
            h(t, u) += vol * acc;
            if (u != t) h(u, t) += vol * std::conj(acc);
        }

    // non-local part via projector vectors
    std::vector<double> gnorm(ng);
    std::vector<Vec3> gcart(ng);
    for (int g = 0; g < ng; ++g) {
        gcart[g] = orbitals.g_cartesian(g);
        gnorm[g] = gcart[g].norm();
    }
    const double pref = 16.0 * kPi * kPi / vol;
    for (std::size_t a = 0; a < pps.size(); ++a) {
        const auto& pp = *pps[a];
        const Vec3& ra = cell.atoms[a].position;
        std::vector<cplx> site_phase(ng);
        for (int g = 0; g < ng; ++g) site_phase[g] = std::exp(cplx(0.0, gcart[g].dot(ra)));
        for (const auto& [l, block] : pp.d_blocks) {
            const auto& rows = pp.projector_index.at(l);
            const int nb = int(rows.size());
            // F_il(|G|) per projector, cached over repeated |G|
            std::vector<std::vector<double>> form(nb, std::vector<double>(ng));
            for (int i = 0; i < nb; ++i) {
                std::map<double, double> ff;
                for (int g = 0; g < ng; ++g)
                    if (!ff.count(gnorm[g]))
                        ff.emplace(gnorm[g], projector_form_factor(pp, rows[i], gnorm[g]));
                for (int g = 0; g < ng; ++g) form[i][g] = ff.at(gnorm[g]);
            }
            // P[i][m+l][t] = sum_G c_{G,t} conj(Y_lm) F_il e^{iG.R}
            std::vector<std::vector<std::vector<cplx>>> P(
                nb, std::vector<std::vector<cplx>>(2 * l + 1, std::vector<cplx>(n)));
            for (int m = -l; m <= l; ++m) {
                std::vector<cplx> ylm(ng);
                for (int g = 0; g < ng; ++g)
                    ylm[g] = std::conj(spherical_harmonic(l, m, gcart[g]));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (int t = 0; t < n; ++t)
                    for (int i = 0; i < nb; ++i) {
                        cplx acc(0.0);
                        for (int g = 0; g < ng; ++g)
                            acc += orbitals.coeff(g, t) * ylm[g] * form[i][g] *
                                   site_phase[g];
                        P[i][m + l][t] = acc;
                    }
            }
            for (int t = 0; t < n; ++t)
                for (int u = t; u < n; ++u) {
                    cplx acc(0.0);
                    for (int i = 0; i < nb; ++i)
                        for (int j = 0; j < nb; ++j) {
                            const double d = block[std::size_t(i) * nb + j];
                            if (d == 0.0) continue;
                            for (int m = 0; m <= 2 * l; ++m)
                                acc += d * std::conj(P[i][m][t]) * P[j][m][u];
                        }
                    h(t, u) += pref * acc;
                    if (u != t) h(u, t) += pref * std::conj(acc);
                }
        }
    }
    return h;
}

}  // namespace pwmb
