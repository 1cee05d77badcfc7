#pragma once

// Finite-bandwidth clock readout.  A spectral window phi on the frequency
// lattice multiplies each system column in the omega domain — equivalently,
// circular convolution of the clock rows with the window's time profile.
// The autocorrelation of the smeared history measures how far apart two
// clock readings must sit before their records decorrelate: the usable time
// resolution.  For power-spectrum std `width` this is bounded below by
// 1/(2 width), and equals 1/width exactly for a gaussian window.

#include "pwak/history.hpp"

namespace pwak {

enum class AmplitudeShape { gaussian, box, custom };

struct SpectralAmplitude {
  Eigen::VectorXcd values;  // on grid.freqs, normalized: domega sum |phi|^2 = 1
  double width = 0.0;       // power-spectrum standard deviation parameter
  double center = 0.0;
  AmplitudeShape shape = AmplitudeShape::custom;
};

// |phi(w)|^2 gaussian with std = width around center.
SpectralAmplitude gaussian_amplitude(const TimeGrid& g, double width, double center);
// indicator of full width sqrt(12) * width: same power std as the gaussian
SpectralAmplitude box_amplitude(const TimeGrid& g, double width, double center);
// arbitrary profile, normalized here; width/center recorded, not enforced
SpectralAmplitude custom_amplitude(const TimeGrid& g,
                                   const Eigen::Ref<const Eigen::VectorXcd>& values,
                                   double width, double center);

// power-weighted standard deviation of the profile on the lattice
double measured_std(const TimeGrid& g, const SpectralAmplitude& phi);

HistoryState smear_history(const SpectralAmplitude& phi, const HistoryState& psi);
HistoryState build_bandlimited_history(const TimeGrid& g, const Hamiltonian& h,
                                       const Eigen::Ref<const Eigen::VectorXcd>& psi0,
                                       const SpectralAmplitude& phi);

struct Autocorrelation {
  Eigen::VectorXd tau;  // lags d * dt, d = 0..d_max
  Eigen::VectorXcd c;   // row-overlap at each lag, normalized so c[0] = 1
};
// Correlates a fixed interior block of rows against its lag-shifted copy;
// the outer edge_fraction per side never enters.  Throws when max_tau
// leaves no interior block.
Autocorrelation autocorrelation(const HistoryState& psi, double max_tau,
                                double edge_fraction = 0.1);

struct ResolutionEstimate {
  double half_overlap_time = 0.0;  // first |c| = 1/2 crossing, interpolated
  double low_overlap_time = 0.0;   // first lag with |c| < 0.05
  double gaussian_width = 0.0;     // from -ln|c| ~ tau^2/(2 w^2), 0 when unfit
  double bound = 0.0;              // 1/(2 width)
  bool crossed_half = false;
};
ResolutionEstimate resolution_estimate(const Autocorrelation& ac, double width);

// Residual of the smeared history.  The window acts as a spectral mollifier:
// a line slightly off the 2pi/L lattice leaves an N-independent residual
// floor in the sharp history that the smeared one does not see.
double smeared_schrodinger_residual(const SpectralAmplitude& phi,
                                    const HistoryState& psi, const Hamiltonian& h,
                                    double edge_fraction = 0.1);

}  // namespace pwak
