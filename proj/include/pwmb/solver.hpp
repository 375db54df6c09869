#pragma once

#include <cstdint>
#include <vector>

#include "pwmb/activespace.hpp"

namespace pwmb {

// One Hermitian Pauli string: coeff * i^popcount(x&z) * X^x Z^z, where bit k
// of x / z selects X / Z on qubit k (both bits set -> Y).
struct PauliTerm {
    std::uint32_t x = 0;
    std::uint32_t z = 0;
    double coeff = 0.0;
};

// Qubit ordering is spin-blocked: qubits 0..n-1 are spin-up spatial orbitals
// in active order, qubits n..2n-1 spin-down.
struct QubitHamiltonian {
    int n_qubits = 0;
    std::vector<PauliTerm> terms;
};

struct Statevector {
    int n_qubits = 0;
    std::vector<cplx> amplitudes;

    static Statevector basis_state(int n_qubits, std::uint32_t bits);
    double norm() const;
};

// Maps the second-quantized Hamiltonian (spin-orbital expansion of h_eff and
// h4 plus e_const) through a+_k -> (1/2)(X - iY)_k Z_{k-1}...Z_0. Like terms
// are merged and coefficients below 1e-14 pruned; terms sorted by (x, z).
QubitHamiltonian jordan_wigner(const ActiveSpaceHamiltonian& ham, int max_orbitals = 14);

void apply_hamiltonian(const QubitHamiltonian& qh, const Statevector& in, Statevector& out,
                       bool parallel = true);
double expectation(const QubitHamiltonian& qh, const Statevector& state,
                   bool parallel = true);

struct GroundState {
    double energy = 0.0;
    Statevector state;
};

// Lowest eigenpair in the fixed-particle-number sector; the dominant amplitude
// (lowest index on ties) is phase-fixed to positive real.
GroundState exact_ground_state(const QubitHamiltonian& qh, int n_electrons);

// Particle-number preserving UCCSD. Excitations are stored as spin-orbital
// indices (spatial t, spin s -> t + s * n_orbitals). Application order per
// repetition: all doubles in list order, then all singles in list order (the
// rightmost factors of the Trotter product act first); theta is laid out in
// application order.
struct UccsdAnsatz {
    int n_orbitals = 0;
    int n_electrons = 0;
    int repetitions = 1;
    std::vector<std::array<int, 2>> singles;  // {occupied, virtual}
    std::vector<std::array<int, 4>> doubles;  // {i, j, p, q}, i < j occ, p < q virt

    static UccsdAnsatz standard(int n_orbitals, int n_electrons, int repetitions = 1);

    int n_parameters() const {
        return repetitions * int(singles.size() + doubles.size());
    }
    std::uint32_t reference_bits() const;
};

// exp(theta (E - E+)) factors applied as exact Givens rotations between the
// determinant pairs coupled by each excitation.
Statevector apply_uccsd(const UccsdAnsatz& ansatz, const std::vector<double>& theta,
                        const Statevector& in, bool parallel = true);

struct VqeOptions {
    int max_iterations = 2000;
    double grad_tol = 1e-8;       // Hartree, on the gradient 2-norm
    std::uint64_t seed = 0;
    double perturbation = 0.0;    // magnitude of the seeded theta_0 jitter
    bool parallel = true;
};

struct VqeIterate {
    int iteration = 0;
    double energy = 0.0;
    double grad_norm = 0.0;
};

struct VqeResult {
    double energy = 0.0;
    std::vector<double> theta;
    Statevector state;
    std::vector<VqeIterate> trace;
    bool converged = false;
    int n_iterations = 0;
    double grad_norm = 0.0;
};

// E(theta) = <psi(theta)|H|psi(theta)> minimized by limited-memory
// quasi-Newton with a strong-Wolfe line search; gradients are analytic
// (adjoint backward sweep through the factor product). Non-convergence
// returns the best iterate with converged = false.
VqeResult vqe_minimize(const QubitHamiltonian& qh, const UccsdAnsatz& ansatz,
                       const VqeOptions& options = {});

// Gradient of E(theta), exposed for verification.
std::vector<double> vqe_gradient(const QubitHamiltonian& qh, const UccsdAnsatz& ansatz,
                                 const std::vector<double>& theta, bool parallel = true);

// f_t = <n_{t,up}> + <n_{t,down}> with n = (I - Z)/2 per qubit.
std::vector<double> occupancies(const Statevector& state);

}  // namespace pwmb
