#include "pwak/bandwidth.hpp"

#include <cmath>
#include <stdexcept>

namespace pwak {

namespace {

void normalize(const TimeGrid& g, SpectralAmplitude& phi) {
  const double mass = g.domega() * phi.values.squaredNorm();
  if (!(mass > 0.0))
    throw std::invalid_argument("spectral amplitude has no mass on the lattice");
  phi.values /= std::sqrt(mass);
}

}  // namespace

SpectralAmplitude gaussian_amplitude(const TimeGrid& g, double width, double center) {
  if (!(width > 0.0))
    throw std::invalid_argument("gaussian_amplitude: width must be positive");
  SpectralAmplitude phi;
  phi.width = width;
  phi.center = center;
  phi.shape = AmplitudeShape::gaussian;
  phi.values =
      (-(g.freqs.array() - center).square() / (4.0 * width * width)).exp()
          .cast<std::complex<double>>()
          .matrix();
  normalize(g, phi);
  return phi;
}

SpectralAmplitude box_amplitude(const TimeGrid& g, double width, double center) {
  if (!(width > 0.0))
    throw std::invalid_argument("box_amplitude: width must be positive");
  SpectralAmplitude phi;
  phi.width = width;
  phi.center = center;
  phi.shape = AmplitudeShape::box;
  const double half = 0.5 * std::sqrt(12.0) * width;
  phi.values.setZero(g.n_points);
  for (int j = 0; j < g.n_points; ++j)
    if (std::abs(g.freqs[j] - center) <= half) phi.values[j] = 1.0;
  normalize(g, phi);
  return phi;
}

SpectralAmplitude custom_amplitude(const TimeGrid& g,
                                   const Eigen::Ref<const Eigen::VectorXcd>& values,
                                   double width, double center) {
  if (values.size() != g.n_points)
    throw std::invalid_argument("custom_amplitude: size does not match the grid");
  SpectralAmplitude phi;
  phi.width = width;
  phi.center = center;
  phi.shape = AmplitudeShape::custom;
  phi.values = values;
  normalize(g, phi);
  return phi;
}

double measured_std(const TimeGrid& g, const SpectralAmplitude& phi) {
  const Eigen::VectorXd p = g.domega() * phi.values.cwiseAbs2();
  const double mean = p.dot(g.freqs);
  return std::sqrt(p.dot((g.freqs.array() - mean).square().matrix()));
}

HistoryState smear_history(const SpectralAmplitude& phi, const HistoryState& psi) {
  if (phi.values.size() != psi.grid.n_points)
    throw std::invalid_argument("smear_history: amplitude grid mismatch");
  HistoryState out = psi;
  for (int a = 0; a < psi.dim(); ++a)
    out.amps.col(a) =
        to_time(psi.grid, phi.values.cwiseProduct(to_freq(psi.grid, psi.amps.col(a))));
  return out;
}

HistoryState build_bandlimited_history(const TimeGrid& g, const Hamiltonian& h,
                                       const Eigen::Ref<const Eigen::VectorXcd>& psi0,
                                       const SpectralAmplitude& phi) {
  return smear_history(phi, build_history(g, h, psi0));
}

Autocorrelation autocorrelation(const HistoryState& psi, double max_tau,
                                double edge_fraction) {
  const TimeGrid& g = psi.grid;
  const int band = std::max(1, static_cast<int>(g.n_points * edge_fraction));
  const int lo = band;
  const int hi = g.n_points - band;
  const int d_max = static_cast<int>(std::lround(max_tau / g.dt()));
  const int n_rows = hi - lo - d_max;
  if (d_max < 1 || n_rows < 2)
    throw std::invalid_argument("autocorrelation: max_tau leaves no interior block");

  Autocorrelation ac;
  ac.tau.setLinSpaced(d_max + 1, 0.0, d_max * g.dt());
  ac.c.resize(d_max + 1);
  const Eigen::MatrixXcd base = psi.amps.middleRows(lo, n_rows).conjugate();
  for (int d = 0; d <= d_max; ++d)
    ac.c[d] = base.cwiseProduct(psi.amps.middleRows(lo + d, n_rows)).sum();
  const std::complex<double> denom = ac.c[0];
  if (!(std::abs(denom) > 0.0))
    throw std::invalid_argument("autocorrelation: state vanishes on the block");
  ac.c /= denom;
  return ac;
}

ResolutionEstimate resolution_estimate(const Autocorrelation& ac, double width) {
  if (!(width > 0.0))
    throw std::invalid_argument("resolution_estimate: width must be positive");
  ResolutionEstimate r;
  r.bound = 0.5 / width;
  const int n = static_cast<int>(ac.tau.size());
  r.half_overlap_time = ac.tau[n - 1];
  r.low_overlap_time = ac.tau[n - 1];
  bool low_found = false;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 1; i < n; ++i) {
    const double mag = std::abs(ac.c[i]);
    const double prev = std::abs(ac.c[i - 1]);
    if (!r.crossed_half && mag < 0.5) {
      const double frac = (prev - 0.5) / (prev - mag);
      r.half_overlap_time = ac.tau[i - 1] + frac * (ac.tau[i] - ac.tau[i - 1]);
      r.crossed_half = true;
    }
    if (!low_found && mag < 0.05) {
      r.low_overlap_time = ac.tau[i];
      low_found = true;
    }
    if (mag > 0.15 && mag < 0.95) {
      const double x = 0.5 * ac.tau[i] * ac.tau[i];
      sxx += x * x;
      sxy += x * -std::log(mag);
    }
  }
  if (sxx > 0.0 && sxy > 0.0) r.gaussian_width = std::sqrt(sxx / sxy);
  return r;
}

double smeared_schrodinger_residual(const SpectralAmplitude& phi,
                                    const HistoryState& psi, const Hamiltonian& h,
                                    double edge_fraction) {
  return schrodinger_residual(smear_history(phi, psi), h, edge_fraction);
}

}  // namespace pwak
