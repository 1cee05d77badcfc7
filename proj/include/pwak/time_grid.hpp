#pragma once

// Uniform clock grid on [-L/2, L/2) and its Fourier dual.
//
// Conventions, pinned once because every sign downstream depends on them:
//   t_k = (k - N/2) dt,  dt = L/N            (t_{N/2} = 0 exactly)
//   w_j = (j - N/2) 2pi/L, monotone          (Nyquist appears only as -pi N/L)
//   analysis:   G_j = dt/sqrt(2pi) sum_k e^{-i w_j t_k} g_k
//   synthesis:  g_k = dw/sqrt(2pi) sum_j e^{+i w_j t_k} G_j
// Both directions are unitary for the dt/dw quadrature inner products
// (dt * dw * N = 2pi).  Under this convention the frequency operator acts as
// -i d/dt on interior states, a row evolving as e^{-i w0 t} has its spectral
// line at w = -w0, and [T, Omega] = i.  Flipping the kernel sign flips all
// three at once.

#include <Eigen/Dense>

#include <complex>

namespace pwak {

struct TimeGrid {
  int n_points = 0;
  double window = 0.0;
  Eigen::VectorXd times;
  Eigen::VectorXd freqs;

  double dt() const { return window / n_points; }
  double domega() const { return 2.0 * M_PI / window; }
  double nyquist() const { return M_PI * n_points / window; }
};

// n_points even and >= 4, window > 0; throws std::invalid_argument otherwise.
TimeGrid make_grid(int n_points, double window);

// dt-weighted quadrature inner product (antilinear in the first argument).
std::complex<double> quad_inner(const TimeGrid& g,
                                const Eigen::Ref<const Eigen::VectorXcd>& a,
                                const Eigen::Ref<const Eigen::VectorXcd>& b);
double quad_norm(const TimeGrid& g, const Eigen::Ref<const Eigen::VectorXcd>& a);

Eigen::VectorXcd to_freq(const TimeGrid& g, const Eigen::Ref<const Eigen::VectorXcd>& time_amps);
Eigen::VectorXcd to_time(const TimeGrid& g, const Eigen::Ref<const Eigen::VectorXcd>& freq_amps);

// T: multiply by t_k pointwise.
Eigen::VectorXcd apply_time_operator(const TimeGrid& g,
                                     const Eigen::Ref<const Eigen::VectorXcd>& v);
// Omega: multiply by w_j between the transforms; equals -i d/dt spectrally.
Eigen::VectorXcd apply_frequency_operator(const TimeGrid& g,
                                          const Eigen::Ref<const Eigen::VectorXcd>& v);

// Largest |amplitude| over the outer edge_fraction of the window per side,
// relative to the global maximum.  Operator identities that integrate by
// parts only hold when this is negligible.
double edge_amplitude_ratio(const TimeGrid& g,
                            const Eigen::Ref<const Eigen::VectorXcd>& v,
                            double edge_fraction = 0.1);

struct CommutatorSandwich {
  std::complex<double> value;  // <v|(T Omega - Omega T)|v>, ~ i for interior v
  bool boundary_ok = true;     // edge_amplitude_ratio stayed below 1e-8
  double edge_ratio = 0.0;
};

// Pre: v normalized in the quadrature norm.  A state with weight at the
// window edges gets boundary_ok = false and typically a value far from i.
CommutatorSandwich commutator_sandwich(const TimeGrid& g,
                                       const Eigen::Ref<const Eigen::VectorXcd>& v,
                                       double edge_fraction = 0.1);

}  // namespace pwak
