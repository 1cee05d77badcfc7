#pragma once

// Weyl sequences for the constraint: a forward history multiplied by a slow
// clock envelope.  The envelope makes the state normalizable at the price of
// a constraint violation that shrinks as the envelope widens, while the
// first-moment identities <T J> - <J T> = i stay pinned.  That combination —
// approximate null vectors of J coexisting with a canonical commutator — is
// the quantitative core of the Pauli-objection analysis.
//
// gaussian: f(t) = (2/(pi n))^{1/4} e^{-t^2/n}, unit L2 norm; on a window
// with L >= 10 sqrt(n) the edge amplitude is < e^{-25} and every
// integration-by-parts identity holds to roundoff.
// box: f(t) = beta(t/m)/sqrt(m), beta the unit indicator with value 1/2 at
// an on-grid jump; discontinuous, so constraint norms scale as 1/(m dt) and
// only weak (smeared) matrix elements converge.

#include "pwak/history.hpp"

#include <optional>
#include <vector>

namespace pwak {

enum class WeylKind { gaussian, box };

struct WeylState {
  WeylKind kind = WeylKind::gaussian;
  double parameter = 0.0;    // gaussian: n; box: support length m
  HistoryState state;        // envelope * forward history
  Eigen::VectorXd envelope;  // f(t_k)
  bool edge_on_grid = true;  // box only: +-m/2 landed on grid points
};

// Pre: gaussian needs window >= 10 sqrt(n), box needs m <= 0.8 window
// (throws std::invalid_argument naming the required window).  psi0 and h as
// in build_history.
WeylState make_weyl(WeylKind kind, double parameter, const TimeGrid& g,
                    const Hamiltonian& h,
                    const Eigen::Ref<const Eigen::VectorXcd>& psi0);

struct WeylReport {
  WeylKind kind = WeylKind::gaussian;
  double parameter = 0.0;
  double norm_sq = 0.0;
  double constraint_norm_sq = 0.0;        // ||J psi||^2
  double t_amplified_norm_sq = 0.0;       // ||T J psi||^2
  std::complex<double> sandwich_tj;       // <psi| T J |psi>
  std::complex<double> sandwich_jt;       // <psi| J T |psi>
  std::complex<double> commutator_check;  // sandwich_tj - sandwich_jt, ~ i
  double eigen_residual_sq_at_jt = 0.0;   // ||(J T - <J T>) psi||^2
  double eigen_residual_sq_at_zero = 0.0; // ||J T psi||^2
  // closed-form values for the gaussian family, empty for box
  std::optional<double> target_constraint;   // 1/n
  std::optional<double> target_t_amplified;  // 3/4
  std::optional<double> target_residual;     // 1/2
  bool boundary_ok = true;
  double edge_ratio = 0.0;
};
WeylReport weyl_report(const WeylState& w, const Hamiltonian& h);

// Weak-limit probe: J and T J matrix elements of an *unnormalized* box
// history beta(t/m) psi(t) against a product test state theta (x) phi0.
// Integration by parts collapses both to boundary terms in the overlap
// c(t) = <phi0|psi(t)>:
//   a_pred = i [ theta*( m/2) c( m/2) - theta*(-m/2) c(-m/2) ]
//   b_pred = i (m/2) [ theta*( m/2) c( m/2) + theta*(-m/2) c(-m/2) ]
// so a test function decaying past |t| = m/2 sends both to zero even though
// the strong (norm) residual diverges like 1/(m dt).
struct WeakProbeRow {
  double m = 0.0;
  std::complex<double> a;       // <theta phi0 | J   beta psi>
  std::complex<double> a_pred;  // boundary prediction
  std::complex<double> b;       // <theta phi0 | T J beta psi>
  std::complex<double> b_pred;
  bool edge_on_grid = true;
  double overlap_drift = 0.0;  // |c(m/2) - c(-m/2)|
};
std::vector<WeakProbeRow> weak_convergence_probe(
    const TimeGrid& g, const Hamiltonian& h,
    const Eigen::Ref<const Eigen::VectorXcd>& psi0,
    const Eigen::Ref<const Eigen::VectorXcd>& phi0,
    const Eigen::Ref<const Eigen::VectorXcd>& theta_clock,
    const std::vector<double>& m_values);

}  // namespace pwak
