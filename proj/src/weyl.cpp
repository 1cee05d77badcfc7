#include "pwak/weyl.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pwak {

namespace {

// indicator of [-m/2, m/2] on the grid, value 1/2 at an on-grid jump
Eigen::VectorXd box_profile(const TimeGrid& g, double m, bool* edge_on_grid) {
  const double tol = 1e-9 * std::max(1.0, m);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(g.n_points);
  bool on_grid = false;
  for (int k = 0; k < g.n_points; ++k) {
    const double d = std::abs(g.times[k]) - 0.5 * m;
    if (std::abs(d) <= tol) {
      f[k] = 0.5;
      on_grid = true;
    } else if (d < 0.0) {
      f[k] = 1.0;
    }
  }
  if (edge_on_grid) *edge_on_grid = on_grid;
  return f;
}

}  // namespace

WeylState make_weyl(WeylKind kind, double parameter, const TimeGrid& g,
                    const Hamiltonian& h,
                    const Eigen::Ref<const Eigen::VectorXcd>& psi0) {
  if (!(parameter > 0.0))
    throw std::invalid_argument("make_weyl: parameter must be positive");
  WeylState w;
  w.kind = kind;
  w.parameter = parameter;
  if (kind == WeylKind::gaussian) {
    const double needed = 10.0 * std::sqrt(parameter);
    if (g.window < needed) {
      std::ostringstream msg;
      msg << "make_weyl: window " << g.window << " too small for n = "
          << parameter << "; need window >= 10 sqrt(n) = " << needed;
      throw std::invalid_argument(msg.str());
    }
    const double amp = std::pow(2.0 / (M_PI * parameter), 0.25);
    w.envelope = (amp * (-g.times.array().square() / parameter).exp()).matrix();
  } else {
    if (parameter > 0.8 * g.window) {
      std::ostringstream msg;
      msg << "make_weyl: box length " << parameter << " exceeds 0.8 * window"
          << "; need window >= " << parameter / 0.8;
      throw std::invalid_argument(msg.str());
    }
    w.envelope = box_profile(g, parameter, &w.edge_on_grid) / std::sqrt(parameter);
  }
  w.state = build_history(g, h, psi0);
  w.state.amps.array().colwise() *= w.envelope.cast<std::complex<double>>().array();
  w.state.tag = NormTag::unit;
  return w;
}

WeylReport weyl_report(const WeylState& w, const Hamiltonian& h) {
  const TimeGrid& g = w.state.grid;
  const ConstraintOperator j{g, h};
  const HistoryState jpsi = apply_constraint(j, w.state);
  const HistoryState tjpsi = apply_time_operator(jpsi);
  const HistoryState jtpsi = apply_constraint(j, apply_time_operator(w.state));

  WeylReport r;
  r.kind = w.kind;
  r.parameter = w.parameter;
  r.norm_sq = g.dt() * w.state.amps.squaredNorm();
  r.constraint_norm_sq = g.dt() * jpsi.amps.squaredNorm();
  r.t_amplified_norm_sq = g.dt() * tjpsi.amps.squaredNorm();
  r.sandwich_tj = inner(w.state, tjpsi);
  r.sandwich_jt = inner(w.state, jtpsi);
  r.commutator_check = r.sandwich_tj - r.sandwich_jt;
  r.eigen_residual_sq_at_jt =
      g.dt() * (jtpsi.amps - r.sandwich_jt * w.state.amps).squaredNorm();
  r.eigen_residual_sq_at_zero = g.dt() * jtpsi.amps.squaredNorm();
  if (w.kind == WeylKind::gaussian) {
    r.target_constraint = 1.0 / w.parameter;
    r.target_t_amplified = 0.75;
    r.target_residual = 0.5;
  }
  Eigen::VectorXcd row_norms(g.n_points);
  for (int k = 0; k < g.n_points; ++k) row_norms[k] = w.state.amps.row(k).norm();
  r.edge_ratio = edge_amplitude_ratio(g, row_norms);
  r.boundary_ok = r.edge_ratio < 1e-8;
  return r;
}

std::vector<WeakProbeRow> weak_convergence_probe(
    const TimeGrid& g, const Hamiltonian& h,
    const Eigen::Ref<const Eigen::VectorXcd>& psi0,
    const Eigen::Ref<const Eigen::VectorXcd>& phi0,
    const Eigen::Ref<const Eigen::VectorXcd>& theta_clock,
    const std::vector<double>& m_values) {
  if (theta_clock.size() != g.n_points)
    throw std::invalid_argument("weak_convergence_probe: theta size mismatch");
  const HistoryState hist = build_history(g, h, psi0);
  const ConstraintOperator j{g, h};
  const std::complex<double> iu(0.0, 1.0);

  std::vector<WeakProbeRow> rows;
  rows.reserve(m_values.size());
  for (double m : m_values) {
    if (!(m > 0.0) || m > 0.8 * g.window)
      throw std::invalid_argument("weak_convergence_probe: m outside (0, 0.8 window]");
    WeakProbeRow row;
    row.m = m;

    HistoryState boxed = hist;
    Eigen::VectorXd beta = box_profile(g, m, &row.edge_on_grid);
    boxed.amps.array().colwise() *= beta.cast<std::complex<double>>().array();

    const HistoryState jboxed = apply_constraint(j, boxed);
    const Eigen::VectorXcd ja = jboxed.amps * phi0.conjugate();
    row.a = quad_inner(g, theta_clock, ja);
    row.b = quad_inner(g, theta_clock, apply_time_operator(g, ja));

    // boundary samples at the nearest grid rows to +-m/2
    const int half_steps = static_cast<int>(std::lround(0.5 * m / g.dt()));
    const int kp = g.n_points / 2 + half_steps;
    const int km = g.n_points / 2 - half_steps;
    const std::complex<double> cp = phi0.dot(hist.amps.row(kp).transpose());
    const std::complex<double> cm = phi0.dot(hist.amps.row(km).transpose());
    const std::complex<double> tp = std::conj(theta_clock[kp]);
    const std::complex<double> tm = std::conj(theta_clock[km]);
    row.a_pred = iu * (tp * cp - tm * cm);
    row.b_pred = iu * 0.5 * m * (tp * cp + tm * cm);
    row.overlap_drift = std::abs(cp - cm);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pwak
