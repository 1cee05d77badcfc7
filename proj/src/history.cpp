#include "pwak/history.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pwak {

namespace {

void require_same_shape(const HistoryState& a, const HistoryState& b) {
  if (a.grid.n_points != b.grid.n_points || a.dim() != b.dim() ||
      a.grid.window != b.grid.window)
    throw std::invalid_argument("history states live on different grids");
}

}  // namespace

std::complex<double> inner(const HistoryState& a, const HistoryState& b) {
  require_same_shape(a, b);
  return a.grid.dt() * (a.amps.conjugate().cwiseProduct(b.amps)).sum();
}

double norm(const HistoryState& a) { return std::sqrt(a.grid.dt()) * a.amps.norm(); }

HistoryState build_history(const TimeGrid& g, const Hamiltonian& h,
                           const Eigen::Ref<const Eigen::VectorXcd>& psi0) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("build_history: psi0 must be normalized");
  const double wmax = h.eigenvalues.cwiseAbs().maxCoeff();
  if (wmax >= g.nyquist())
    throw std::invalid_argument(
        "build_history: system eigenfrequency exceeds the grid Nyquist frequency");
  HistoryState psi;
  psi.grid = g;
  psi.tag = NormTag::raw;
  // rows are V (e^{-i E t_k} . c) with c = V^dag psi0, assembled as one
  // product: amps = E V^T, E_{ka} = c_a e^{-i w_a t_k}
  const Eigen::VectorXcd c = h.eigenvectors.adjoint() * psi0;
  Eigen::MatrixXcd e(g.n_points, h.dim());
  for (int a = 0; a < h.dim(); ++a) {
    const double w = h.eigenvalues[a];
    for (int k = 0; k < g.n_points; ++k)
      e(k, a) = c[a] * std::exp(std::complex<double>(0.0, -w * g.times[k]));
  }
  psi.amps = e * h.eigenvectors.transpose();
  return psi;
}

HistoryState apply_constraint(const ConstraintOperator& j, const HistoryState& psi) {
  if (j.h.dim() != psi.dim())
    throw std::invalid_argument("apply_constraint: dimension mismatch");
  HistoryState out = psi;
  for (int a = 0; a < psi.dim(); ++a)
    out.amps.col(a) = apply_frequency_operator(psi.grid, psi.amps.col(a));
  out.amps += psi.amps * j.h.matrix.transpose();
  return out;
}

HistoryState apply_time_operator(const HistoryState& psi) {
  HistoryState out = psi;
  out.amps.array().colwise() *=
      psi.grid.times.cast<std::complex<double>>().array();
  return out;
}

ConditionResult condition(const HistoryState& psi, int k) {
  if (k < 0 || k >= psi.grid.n_points)
    throw std::out_of_range("condition: clock index out of range");
  ConditionResult r;
  r.row_norm = psi.amps.row(k).norm();
  if (r.row_norm < 1e-14)
    throw std::domain_error("condition: row norm vanishes; state undefined at this clock time");
  r.state = psi.amps.row(k).transpose() / r.row_norm;
  return r;
}

double schrodinger_residual(const HistoryState& psi, const Hamiltonian& h,
                            double edge_fraction) {
  const HistoryState res = apply_constraint({psi.grid, h}, psi);
  const int n = psi.grid.n_points;
  const int band = std::max(1, static_cast<int>(n * edge_fraction));
  double worst = 0.0;
  for (int k = band; k < n - band; ++k)
    worst = std::max(worst, res.amps.row(k).norm());
  return worst;
}

SpectralSupportReport spectral_support(const HistoryState& psi, const Hamiltonian& h) {
  const TimeGrid& g = psi.grid;
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(g.n_points);
  for (int a = 0; a < psi.dim(); ++a)
    mass += g.domega() * to_freq(g, psi.amps.col(a)).cwiseAbs2();
  const double total = mass.sum();

  SpectralSupportReport rep;
  rep.omega_mass = mass;
  const double spacing = g.domega() * (1.0 + 1e-9);
  std::vector<bool> captured(g.n_points, false);
  for (int a = 0; a < h.dim(); ++a) {
    const double w = h.eigenvalues[a];
    SpectralLine line{w, -w + 0.0, 0.0};  // + 0.0 normalizes -0
    for (int j = 0; j < g.n_points; ++j) {
      if (std::abs(g.freqs[j] + w) <= spacing) {
        line.captured_fraction += mass[j];
        captured[j] = true;
      }
    }
    line.captured_fraction = total > 0.0 ? line.captured_fraction / total : 0.0;
    if (std::abs(w) > g.nyquist() - g.domega()) rep.nyquist_ok = false;
    rep.lines.push_back(line);
  }
  double in_windows = 0.0;
  for (int j = 0; j < g.n_points; ++j)
    if (captured[j]) in_windows += mass[j];
  rep.total_captured = total > 0.0 ? in_windows / total : 0.0;
  return rep;
}

void write_history_csv(const std::string& path, const HistoryState& psi) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_history_csv: cannot open " + path);
  out << "k,t";
  for (int a = 0; a < psi.dim(); ++a) out << ",re_" << a << ",im_" << a;
  out << "\n";
  char buf[32];
  for (int k = 0; k < psi.grid.n_points; ++k) {
    out << k;
    std::snprintf(buf, sizeof buf, ",%.12g", psi.grid.times[k]);
    out << buf;
    for (int a = 0; a < psi.dim(); ++a) {
      std::snprintf(buf, sizeof buf, ",%.12g", psi.amps(k, a).real());
      out << buf;
      std::snprintf(buf, sizeof buf, ",%.12g", psi.amps(k, a).imag());
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace pwak
