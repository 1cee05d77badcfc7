#include "pwak/hamiltonian.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pwak {

namespace {

Hamiltonian from_validated(Eigen::MatrixXcd m) {
  Hamiltonian h;
  h.matrix = std::move(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("make_hamiltonian: eigendecomposition failed");
  h.eigenvalues = es.eigenvalues();
  h.eigenvectors = es.eigenvectors();
  return h;
}

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller on raw 53-bit draws; std::normal_distribution is not
  // reproducible across standard libraries.
  const double u1 = 1.0 - (rng() >> 11) * 0x1.0p-53;  // (0, 1]
  const double u2 = (rng() >> 11) * 0x1.0p-53;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

Hamiltonian make_hamiltonian(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("make_hamiltonian: matrix must be square and nonempty");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  Eigen::Index worst_r = 0, worst_c = 0;
  const double asym =
      (m - m.adjoint()).cwiseAbs().maxCoeff(&worst_r, &worst_c);
  if (asym > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "make_hamiltonian: matrix is not Hermitian; |m - m^dag| reaches "
        << asym << " at (" << worst_r << ", " << worst_c << ")";
    throw std::invalid_argument(msg.str());
  }
  return from_validated(m);
}

Hamiltonian zero_hamiltonian(int dim) {
  if (dim < 1) throw std::invalid_argument("zero_hamiltonian: dim must be >= 1");
  return from_validated(Eigen::MatrixXcd::Zero(dim, dim));
}

Hamiltonian qubit_hamiltonian(double omega0) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(1, 1) = omega0;
  return from_validated(std::move(m));
}

Hamiltonian oscillator_hamiltonian(int dim, double omega0) {
  if (dim < 1)
    throw std::invalid_argument("oscillator_hamiltonian: dim must be >= 1");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) m(k, k) = (k + 0.5) * omega0;
  return from_validated(std::move(m));
}

Hamiltonian random_hermitian(int dim, std::uint64_t seed) {
  if (dim < 1)
    throw std::invalid_argument("random_hermitian: dim must be >= 1");
  std::mt19937_64 rng(seed);
  Eigen::MatrixXcd a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      a(r, c) = std::complex<double>(re, im) / std::sqrt(2.0);
    }
  return from_validated((a + a.adjoint()) / 2.0);
}

Eigen::VectorXcd evolve(const Hamiltonian& h,
                        const Eigen::Ref<const Eigen::VectorXcd>& psi0, double t) {
  if (psi0.size() != h.dim())
    throw std::invalid_argument("evolve: state dimension mismatch");
  Eigen::VectorXcd phases(h.dim());
  for (int k = 0; k < h.dim(); ++k)
    phases[k] = std::exp(std::complex<double>(0.0, -t * h.eigenvalues[k]));
  return h.eigenvectors *
         phases.cwiseProduct(h.eigenvectors.adjoint() * psi0);
}

}  // namespace pwak
