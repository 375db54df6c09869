#include "pwmb/solver.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <random>

#include <Eigen/Dense>

namespace pwmb {

namespace {

inline int popcount(std::uint32_t v) { return std::popcount(v); }

inline cplx i_pow(int p) {
    switch (p & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Pauli string in raw X^x Z^z form with a complex coefficient (no i factors
// folded in); used only while building the mapping.
struct RawPauli {
    std::uint32_t x = 0, z = 0;
    cplx c;
};

std::vector<RawPauli> ladder(int k, bool dagger) {
    const std::uint32_t below = (1u << k) - 1;
    const double sign = dagger ? 0.5 : -0.5;
    return {{1u << k, below, cplx(0.5, 0.0)},
            {1u << k, below | (1u << k), cplx(sign, 0.0)}};
}

std::vector<RawPauli> multiply(const std::vector<RawPauli>& a,
                               const std::vector<RawPauli>& b) {
    std::vector<RawPauli> out;
    out.reserve(a.size() * b.size());
    for (const auto& p : a)
        for (const auto& q : b) {
            const double sign = (popcount(p.z & q.x) & 1) ? -1.0 : 1.0;
            out.push_back({p.x ^ q.x, p.z ^ q.z, p.c * q.c * sign});
        }
    return out;
}

}  // namespace

Statevector Statevector::basis_state(int n_qubits, std::uint32_t bits) {
    Statevector s;
    s.n_qubits = n_qubits;
    s.amplitudes.assign(std::size_t(1) << n_qubits, cplx(0.0));
    s.amplitudes[bits] = cplx(1.0, 0.0);
    return s;
}

double Statevector::norm() const {
    double n2 = 0.0;
    for (const cplx& a : amplitudes) n2 += std::norm(a);
    return std::sqrt(n2);
}

QubitHamiltonian jordan_wigner(const ActiveSpaceHamiltonian& ham, int max_orbitals) {
    const int n = ham.n_active;
    if (n <= 0) throw InputError("jordan_wigner: empty active space");
    if (n > max_orbitals)
        throw InputError("jordan_wigner: " + std::to_string(n) +
                         " active orbitals exceed the qubit budget of " +
                         std::to_string(2 * max_orbitals) + " qubits");
    const int nq = 2 * n;

    std::map<std::uint64_t, cplx> acc;
    auto add = [&acc](const std::vector<RawPauli>& ops, cplx weight) {
        for (const auto& p : ops)
            acc[(std::uint64_t(p.x) << 32) | p.z] += weight * p.c;
    };

    acc[0] += cplx(ham.e_const, 0.0);

    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < n; ++t)
            for (int u = 0; u < n; ++u) {
                const cplx h = ham.h_eff(t, u);
                if (std::abs(h) < 1e-16) continue;
                add(multiply(ladder(t + s * n, true), ladder(u + s * n, false)), h);
            }

    for (int s = 0; s < 2; ++s)
        for (int tau = 0; tau < 2; ++tau)
            for (int t = 0; t < n; ++t)
                for (int u = 0; u < n; ++u) {
                    // a+_{t,s} a+_{u,tau} vanishes for equal spin orbitals
                    if (s == tau && t == u) continue;
                    const auto left =
                        multiply(ladder(t + s * n, true), ladder(u + tau * n, true));
                    for (int v = 0; v < n; ++v)
                        for (int w = 0; w < n; ++w) {
                            if (s == tau && v == w) continue;
                            const cplx h = 0.5 * ham.h4(t, u, v, w);
                            if (std::abs(h) < 1e-16) continue;
                            add(multiply(left, multiply(ladder(v + tau * n, false),
                                                        ladder(w + s * n, false))),
                                h);
                        }
                }

    QubitHamiltonian qh;
    qh.n_qubits = nq;
    for (const auto& [key, c] : acc) {
        const std::uint32_t x = std::uint32_t(key >> 32);
        const std::uint32_t z = std::uint32_t(key & 0xffffffffu);
        const cplx c_std = c * i_pow(-popcount(x & z) & 3);
        if (std::abs(c_std.imag()) > 1e-10 * std::max(1.0, std::abs(c_std.real())) &&
            std::abs(c_std.imag()) > 1e-12)
            throw NumericalError("jordan_wigner: non-Hermitian input matrix elements");
        if (std::abs(c_std.real()) < 1e-14) continue;
        qh.terms.push_back({x, z, c_std.real()});
    }
    return qh;
}

void apply_hamiltonian(const QubitHamiltonian& qh, const Statevector& in, Statevector& out,
                       bool parallel) {
    const std::size_t dim = in.amplitudes.size();
    out.n_qubits = in.n_qubits;
    out.amplitudes.assign(dim, cplx(0.0));
    for (const PauliTerm& term : qh.terms) {
        const cplx factor = term.coeff * i_pow(popcount(term.x & term.z));
        const std::uint32_t x = term.x, z = term.z;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
        for (std::int64_t i = 0; i < std::int64_t(dim); ++i) {
            const double sign = (popcount(z & std::uint32_t(i)) & 1) ? -1.0 : 1.0;
            out.amplitudes[std::uint32_t(i) ^ x] += factor * sign * in.amplitudes[i];
        }
    }
}

double expectation(const QubitHamiltonian& qh, const Statevector& state, bool parallel) {
    Statevector hs;
    apply_hamiltonian(qh, state, hs, parallel);
    cplx e(0.0);
    for (std::size_t i = 0; i < state.amplitudes.size(); ++i)
        e += std::conj(state.amplitudes[i]) * hs.amplitudes[i];
    return e.real();
}

GroundState exact_ground_state(const QubitHamiltonian& qh, int n_electrons) {
    if (qh.n_qubits > 14)
        throw InputError("exact_ground_state: limited to 14 qubits");
    if (n_electrons < 0 || n_electrons > qh.n_qubits)
        throw InputError("exact_ground_state: electron count out of range");
    const std::uint32_t full = std::uint32_t(1) << qh.n_qubits;
    std::vector<std::uint32_t> basis;
    std::vector<int> where(full, -1);
    for (std::uint32_t s = 0; s < full; ++s)
        if (popcount(s) == n_electrons) {
            where[s] = int(basis.size());
            basis.push_back(s);
        }
    const int dim = int(basis.size());

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        const std::uint32_t s = basis[j];
        for (const PauliTerm& term : qh.terms) {
            const std::uint32_t r = s ^ term.x;
            if (popcount(r) != n_electrons) continue;  // block restriction
            const double sign = (popcount(term.z & s) & 1) ? -1.0 : 1.0;
            H(where[r], j) += term.coeff * i_pow(popcount(term.x & term.z)) * sign;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success)
        throw NumericalError("exact_ground_state: eigensolver failed");

    GroundState gs;
    gs.energy = es.eigenvalues()(0);
    gs.state.n_qubits = qh.n_qubits;
    gs.state.amplitudes.assign(full, cplx(0.0));
    const auto vec = es.eigenvectors().col(0);
    int dominant = 0;
    for (int i = 1; i < dim; ++i)
        if (std::abs(vec(i)) > std::abs(vec(dominant))) dominant = i;
    cplx phase(1.0, 0.0);
    if (std::abs(vec(dominant)) > 0.0)
        phase = std::conj(vec(dominant)) / std::abs(vec(dominant));
    for (int i = 0; i < dim; ++i) gs.state.amplitudes[basis[i]] = phase * vec(i);
    return gs;
}

UccsdAnsatz UccsdAnsatz::standard(int n_orbitals, int n_electrons, int repetitions) {
    if (n_electrons % 2 != 0)
        throw InputError("uccsd: odd electron counts are not supported");
    if (n_electrons < 0 || n_electrons > 2 * n_orbitals)
        throw InputError("uccsd: electron count out of range");
    if (repetitions < 1) throw InputError("uccsd: repetitions must be positive");
    UccsdAnsatz a;
    a.n_orbitals = n_orbitals;
    a.n_electrons = n_electrons;
    a.repetitions = repetitions;
    const int n_occ = n_electrons / 2;
    std::vector<int> occ, vir;
    for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < n_occ; ++t) occ.push_back(t + s * n_orbitals);
        for (int t = n_occ; t < n_orbitals; ++t) vir.push_back(t + s * n_orbitals);
    }
    auto spin = [n_orbitals](int q) { return q >= n_orbitals ? 1 : 0; };
    for (int i : occ)
        for (int p : vir)
            if (spin(i) == spin(p)) a.singles.push_back({i, p});
    for (std::size_t ii = 0; ii < occ.size(); ++ii)
        for (std::size_t jj = ii + 1; jj < occ.size(); ++jj)
            for (std::size_t pp = 0; pp < vir.size(); ++pp)
                for (std::size_t qq = pp + 1; qq < vir.size(); ++qq) {
                    const int i = occ[ii], j = occ[jj], p = vir[pp], q = vir[qq];
                    if (spin(i) + spin(j) != spin(p) + spin(q)) continue;
                    a.doubles.push_back({i, j, p, q});
                }
    return a;
}

std::uint32_t UccsdAnsatz::reference_bits() const {
    std::uint32_t bits = 0;
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < n_electrons / 2; ++t) bits |= 1u << (t + s * n_orbitals);
    return bits;
}

namespace {

// One Trotter factor in application order; {i, j, p, q} for doubles,
// {i, -1, p, -1} for singles.
struct Factor {
    bool is_double = false;
    int i = 0, j = 0, p = 0, q = 0;
};

std::vector<Factor> factor_sequence(const UccsdAnsatz& a) {
    std::vector<Factor> seq;
    for (int r = 0; r < a.repetitions; ++r) {
        for (const auto& d : a.doubles) seq.push_back({true, d[0], d[1], d[2], d[3]});
        for (const auto& s : a.singles) seq.push_back({false, s[0], -1, s[1], -1});
    }
    return seq;
}

inline int parity_below(std::uint32_t state, int k) {
    return popcount(state & ((1u << k) - 1));
}

// occupancy mask and JW sign of E|s> = a+_p (a+_q) (a_j) a_i |s>
inline double excitation_sign(const Factor& f, std::uint32_t s) {
    int par = parity_below(s, f.i);
    std::uint32_t cur = s ^ (1u << f.i);
    if (f.is_double) {
        par += parity_below(cur, f.j);
        cur ^= 1u << f.j;
        par += parity_below(cur, f.q);
        cur |= 1u << f.q;
    }
    par += parity_below(cur, f.p);
    return (par & 1) ? -1.0 : 1.0;
}

inline bool couples(const Factor& f, std::uint32_t s) {
    if (!(s & (1u << f.i)) || (s & (1u << f.p))) return false;
    if (f.is_double && (!(s & (1u << f.j)) || (s & (1u << f.q)))) return false;
    return true;
}

inline std::uint32_t flip_mask(const Factor& f) {
    std::uint32_t m = (1u << f.i) | (1u << f.p);
    if (f.is_double) m |= (1u << f.j) | (1u << f.q);
    return m;
}

void apply_factor(std::vector<cplx>& a, const Factor& f, double theta, bool parallel) {
    const double c = std::cos(theta), s = std::sin(theta);
    const std::uint32_t mask = flip_mask(f);
    const std::int64_t dim = std::int64_t(a.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::int64_t idx = 0; idx < dim; ++idx) {
        const std::uint32_t st = std::uint32_t(idx);
        if (!couples(f, st)) continue;
        const std::uint32_t sp = st ^ mask;
        const double sg = excitation_sign(f, st);
        const cplx as = a[st], asp = a[sp];
        a[sp] = c * asp + sg * s * as;
        a[st] = c * as - sg * s * asp;
    }
}

// out += (E - E+) in, out pre-zeroed
void apply_generator(const std::vector<cplx>& in, std::vector<cplx>& out, const Factor& f,
                     bool parallel) {
    const std::uint32_t mask = flip_mask(f);
    const std::int64_t dim = std::int64_t(in.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::int64_t idx = 0; idx < dim; ++idx) {
        const std::uint32_t st = std::uint32_t(idx);
        if (!couples(f, st)) continue;
        const std::uint32_t sp = st ^ mask;
        const double sg = excitation_sign(f, st);
        out[sp] = sg * in[st];
        out[st] = -sg * in[sp];
    }
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct VqeObjective {
    const QubitHamiltonian& qh;
    const UccsdAnsatz& ansatz;
    std::vector<Factor> factors;
    std::uint32_t reference;
    bool parallel;

    VqeObjective(const QubitHamiltonian& qh_, const UccsdAnsatz& a, bool par)
        : qh(qh_), ansatz(a), factors(factor_sequence(a)),
          reference(a.reference_bits()), parallel(par) {}

    Statevector state(const std::vector<double>& theta) const {
        Statevector psi = Statevector::basis_state(qh.n_qubits, reference);
        for (std::size_t k = 0; k < factors.size(); ++k)
            apply_factor(psi.amplitudes, factors[k], theta[k], parallel);
        return psi;
    }

    double eval(const std::vector<double>& theta, std::vector<double>& grad) const {
        Statevector psi = state(theta);
        Statevector b;
        apply_hamiltonian(qh, psi, b, parallel);
        const double energy = dot(psi.amplitudes, b.amplitudes).real();

        grad.assign(theta.size(), 0.0);
        std::vector<cplx> phi = std::move(psi.amplitudes);
        std::vector<cplx> adj = std::move(b.amplitudes);
        std::vector<cplx> gphi(phi.size(), cplx(0.0));
        for (int k = int(factors.size()) - 1; k >= 0; --k) {
            std::fill(gphi.begin(), gphi.end(), cplx(0.0));
            apply_generator(phi, gphi, factors[k], parallel);
            grad[k] = 2.0 * dot(adj, gphi).real();
            apply_factor(phi, factors[k], -theta[k], parallel);
            apply_factor(adj, factors[k], -theta[k], parallel);
        }
        return energy;
    }
};

// strong-Wolfe zoom phase (bisection refinement)
bool wolfe_zoom(const VqeObjective& obj, const std::vector<double>& theta0,
                const std::vector<double>& d, double f0, double dphi0, double alpha_lo,
                double f_lo, double alpha_hi, double& alpha_out, double& f_out,
                std::vector<double>& g_out, std::vector<double>& theta_out) {
    const double c1 = 1e-4, c2 = 0.9;
    const int n = int(theta0.size());
    for (int it = 0; it < 40; ++it) {
        const double alpha = 0.5 * (alpha_lo + alpha_hi);
        for (int i = 0; i < n; ++i) theta_out[i] = theta0[i] + alpha * d[i];
        const double f = obj.eval(theta_out, g_out);
        double dphi = 0.0;
        for (int i = 0; i < n; ++i) dphi += g_out[i] * d[i];
        if (f > f0 + c1 * alpha * dphi0 || f >= f_lo) {
            alpha_hi = alpha;
        } else {
            if (std::abs(dphi) <= -c2 * dphi0) {
                alpha_out = alpha;
                f_out = f;
                return true;
            }
            if (dphi * (alpha_hi - alpha_lo) >= 0.0) alpha_hi = alpha_lo;
            alpha_lo = alpha;
            f_lo = f;
        }
        if (std::abs(alpha_hi - alpha_lo) < 1e-14) break;
    }
    return false;
}

bool wolfe_search(const VqeObjective& obj, const std::vector<double>& theta0,
                  const std::vector<double>& d, double f0, double dphi0,
                  double& alpha_out, double& f_out, std::vector<double>& g_out,
                  std::vector<double>& theta_out) {
    const double c1 = 1e-4, c2 = 0.9;
    const int n = int(theta0.size());
    double alpha_prev = 0.0, f_prev = f0;
    double alpha = 1.0;
    for (int it = 0; it < 25; ++it) {
        for (int i = 0; i < n; ++i) theta_out[i] = theta0[i] + alpha * d[i];
        const double f = obj.eval(theta_out, g_out);
        double dphi = 0.0;
        for (int i = 0; i < n; ++i) dphi += g_out[i] * d[i];
        if (f > f0 + c1 * alpha * dphi0 || (it > 0 && f >= f_prev))
            return wolfe_zoom(obj, theta0, d, f0, dphi0, alpha_prev, f_prev, alpha,
                              alpha_out, f_out, g_out, theta_out);
        if (std::abs(dphi) <= -c2 * dphi0) {
            alpha_out = alpha;
            f_out = f;
            return true;
        }
        if (dphi >= 0.0)
            return wolfe_zoom(obj, theta0, d, f0, dphi0, alpha, f, alpha_prev, alpha_out,
                              f_out, g_out, theta_out);
        alpha_prev = alpha;
        f_prev = f;
        alpha = std::min(2.0 * alpha, 1e4);
    }
    return false;
}

}  // namespace

Statevector apply_uccsd(const UccsdAnsatz& ansatz, const std::vector<double>& theta,
                        const Statevector& in, bool parallel) {
    if (int(theta.size()) != ansatz.n_parameters())
        throw InputError("apply_uccsd: parameter vector length mismatch");
    if (in.n_qubits != 2 * ansatz.n_orbitals)
        throw InputError("apply_uccsd: statevector dimension mismatch");
    Statevector out = in;
    const auto factors = factor_sequence(ansatz);
    for (std::size_t k = 0; k < factors.size(); ++k)
        apply_factor(out.amplitudes, factors[k], theta[k], parallel);
    return out;
}

std::vector<double> vqe_gradient(const QubitHamiltonian& qh, const UccsdAnsatz& ansatz,
                                 const std::vector<double>& theta, bool parallel) {
    if (int(theta.size()) != ansatz.n_parameters())
        throw InputError("vqe_gradient: parameter vector length mismatch");
    VqeObjective obj(qh, ansatz, parallel);
    std::vector<double> grad;
    obj.eval(theta, grad);
    return grad;
}

VqeResult vqe_minimize(const QubitHamiltonian& qh, const UccsdAnsatz& ansatz,
                       const VqeOptions& options) {
    if (qh.n_qubits != 2 * ansatz.n_orbitals)
        throw InputError("vqe_minimize: ansatz does not match the Hamiltonian");
    VqeObjective obj(qh, ansatz, options.parallel);
    const int K = ansatz.n_parameters();

    std::vector<double> theta(K, 0.0);
    if (options.perturbation > 0.0) {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (double& t : theta) t = options.perturbation * u(rng);
    }

    VqeResult res;
    std::vector<double> g(K);
    double f = obj.eval(theta, g);
    res.trace.push_back({0, f, l2(g)});
    std::vector<double> best_theta = theta;
    double best_f = f;

    const int m = 10;
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    std::vector<double> d(K), theta_new(K), g_new(K);
    int iter = 0;
    bool converged = false;
    for (iter = 1; iter <= options.max_iterations; ++iter) {
        const double gnorm = l2(g);
        if (gnorm <= options.grad_tol) {
            converged = true;
            break;
        }
        // two-loop recursion
        d = g;
        std::vector<double> alpha_buf(s_hist.size());
        for (int i = int(s_hist.size()) - 1; i >= 0; --i) {
            double a = 0.0;
            for (int k = 0; k < K; ++k) a += s_hist[i][k] * d[k];
            a *= rho_hist[i];
            alpha_buf[i] = a;
            for (int k = 0; k < K; ++k) d[k] -= a * y_hist[i][k];
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            const auto& sl = s_hist.back();
            const auto& yl = y_hist.back();
            for (int k = 0; k < K; ++k) {
                sy += sl[k] * yl[k];
                yy += yl[k] * yl[k];
            }
            const double scale = sy / std::max(yy, 1e-300);
            for (int k = 0; k < K; ++k) d[k] *= scale;
        }
        for (int i = 0; i < int(s_hist.size()); ++i) {
            double b = 0.0;
            for (int k = 0; k < K; ++k) b += y_hist[i][k] * d[k];
            b *= rho_hist[i];
            for (int k = 0; k < K; ++k) d[k] += (alpha_buf[i] - b) * s_hist[i][k];
        }
        for (int k = 0; k < K; ++k) d[k] = -d[k];

        double dphi0 = 0.0;
        for (int k = 0; k < K; ++k) dphi0 += d[k] * g[k];
        bool steepest = false;
        if (!(dphi0 < 0.0)) {
            for (int k = 0; k < K; ++k) d[k] = -g[k];
            dphi0 = -gnorm * gnorm;
            steepest = true;
        }

        double alpha = 0.0, f_new = 0.0;
        bool ok = wolfe_search(obj, theta, d, f, dphi0, alpha, f_new, g_new, theta_new);
        if (!ok && !steepest) {
            for (int k = 0; k < K; ++k) d[k] = -g[k];
            dphi0 = -gnorm * gnorm;
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            ok = wolfe_search(obj, theta, d, f, dphi0, alpha, f_new, g_new, theta_new);
        }
        if (!ok) break;  // line search stalled, report best-so-far

        std::vector<double> s(K), y(K);
        double sy = 0.0;
        for (int k = 0; k < K; ++k) {
            s[k] = theta_new[k] - theta[k];
            y[k] = g_new[k] - g[k];
            sy += s[k] * y[k];
        }
        if (sy > 1e-12 * l2(s) * l2(y)) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (int(s_hist.size()) > m) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        theta = theta_new;
        f = f_new;
        g = g_new;
        res.trace.push_back({iter, f, l2(g)});
        if (f < best_f) {
            best_f = f;
            best_theta = theta;
        }
    }

    res.theta = best_theta;
    res.energy = best_f;
    res.state = obj.state(best_theta);
    res.converged = converged;
    res.n_iterations = std::min(iter, options.max_iterations);
    std::vector<double> g_best(K);
    obj.eval(best_theta, g_best);
    res.grad_norm = l2(g_best);
    return res;
}

std::vector<double> occupancies(const Statevector& state) {
    if (state.n_qubits % 2 != 0)
        throw InputError("occupancies: even qubit count required");
    const int n = state.n_qubits / 2;
    std::vector<double> f(n, 0.0);
    for (std::size_t s = 0; s < state.amplitudes.size(); ++s) {
        const double w = std::norm(state.amplitudes[s]);
        if (w == 0.0) continue;
        for (int t = 0; t < n; ++t) {
            const int occ = ((s >> t) & 1) + ((s >> (t + n)) & 1);
            f[t] += w * occ;
        }
    }
    return f;
}

}  // namespace pwmb
