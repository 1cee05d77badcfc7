#pragma once

// Finite-dimensional system side.  Hamiltonians carry their
// eigendecomposition so time evolution is exact up to roundoff rather than
// integrator-limited; this module is the propagation oracle for everything
// built on top of it.  hbar = 1 throughout.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace pwak {

struct Hamiltonian {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // unitary, columns match eigenvalues
  int dim() const { return static_cast<int>(matrix.rows()); }
};

// Validates Hermiticity; throws std::invalid_argument reporting the largest
// |m - m^dag| entry when it exceeds 1e-12 relative to max|m|.
Hamiltonian make_hamiltonian(const Eigen::MatrixXcd& m);

Hamiltonian zero_hamiltonian(int dim);
Hamiltonian qubit_hamiltonian(double omega0);                // diag(0, omega0)
Hamiltonian oscillator_hamiltonian(int dim, double omega0);  // (k + 1/2) omega0
// (A + A^dag)/2 with i.i.d. standard complex normal entries; the generator is
// hand-rolled on top of mt19937_64 so a seed means the same matrix everywhere.
Hamiltonian random_hermitian(int dim, std::uint64_t seed);

// |psi(t)> = V e^{-i E t} V^dag |psi0>
Eigen::VectorXcd evolve(const Hamiltonian& h,
                        const Eigen::Ref<const Eigen::VectorXcd>& psi0, double t);

}  // namespace pwak
