#pragma once

// Clock (x) system history states.  amps is n_points x dim with row k the
// system state at t_k, stored unweighted; every inner product inserts the dt
// quadrature weight explicitly.  The raw product-form history built from a
// normalized system state therefore has squared norm L, and conditioning on
// a clock time is row extraction plus renormalization.

#include "pwak/hamiltonian.hpp"
#include "pwak/time_grid.hpp"

#include <string>
#include <vector>

namespace pwak {

enum class NormTag { raw, unit };

struct HistoryState {
  TimeGrid grid;
  Eigen::MatrixXcd amps;  // n_points x dim
  NormTag tag = NormTag::raw;
  int dim() const { return static_cast<int>(amps.cols()); }
};

std::complex<double> inner(const HistoryState& a, const HistoryState& b);
double norm(const HistoryState& a);

// Rows evolve(h, psi0, t_k).  Pre: psi0 normalized, max |eigenvalue| below
// the grid Nyquist frequency (checked; throws otherwise).
HistoryState build_history(const TimeGrid& g, const Hamiltonian& h,
                           const Eigen::Ref<const Eigen::VectorXcd>& psi0);

// J = Omega (x) 1 + 1 (x) H, applied matrix-free: per-column spectral
// multiplier on the clock index plus per-row H.
struct ConstraintOperator {
  TimeGrid grid;
  Hamiltonian h;
};
HistoryState apply_constraint(const ConstraintOperator& j, const HistoryState& psi);

// T (x) 1: scale row k by t_k.
HistoryState apply_time_operator(const HistoryState& psi);

struct ConditionResult {
  Eigen::VectorXcd state;  // renormalized row
  double row_norm;         // Euclidean norm before renormalization
};
// Throws std::domain_error when the row norm is below 1e-14.
ConditionResult condition(const HistoryState& psi, int k);

// max over interior rows of the Euclidean norm of (-i D_t + H) applied to
// the history, D_t the spectral derivative along the clock index; the outer
// edge_fraction per side is excluded.  This operator is exactly the
// constraint, so Schroedinger recovery and constraint annihilation are the
// same statement.  Rows must be effectively window-periodic (frequencies on
// the 2pi/L lattice, or an envelope vanishing at the edges) for the residual
// to converge; a wrap discontinuity leaves an N-independent interior floor.
double schrodinger_residual(const HistoryState& psi, const Hamiltonian& h,
                            double edge_fraction = 0.1);

struct SpectralLine {
  double eigenvalue;         // system eigenvalue w_k
  double line_freq;          // expected location -w_k
  double captured_fraction;  // omega-mass within one lattice spacing
};
struct SpectralSupportReport {
  std::vector<SpectralLine> lines;
  Eigen::VectorXd omega_mass;   // domega-weighted |amplitude|^2 summed over the system index
  double total_captured = 0.0;  // union mass over all line windows
  bool nyquist_ok = true;       // all |w_k| at least one spacing below Nyquist
};
SpectralSupportReport spectral_support(const HistoryState& psi, const Hamiltonian& h);

// Columnar export: header k,t,re_0,im_0,...  one row per grid point.
void write_history_csv(const std::string& path, const HistoryState& psi);

}  // namespace pwak
