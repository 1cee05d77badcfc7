#include "pwak/time_grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

namespace pwak {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// e^{-i w_j t_k} = s_N (-1)^j (-1)^k e^{-2pi i jk/N} with s_N = (-i)^N, so the
// centered transforms reduce to plain DFTs conjugated by alternating signs.
// For even N, s_N = +1 when N % 4 == 0 and -1 otherwise.
double quarter_sign(int n) { return n % 4 == 0 ? 1.0 : -1.0; }

Eigen::VectorXcd alternate(const Eigen::Ref<const Eigen::VectorXcd>& v) {
  Eigen::VectorXcd out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = (k & 1) ? -v[k] : v[k];
  return out;
}

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace

TimeGrid make_grid(int n_points, double window) {
  if (n_points < 4 || n_points % 2 != 0)
    throw std::invalid_argument("make_grid: n_points must be even and >= 4");
  if (!(window > 0.0))
    throw std::invalid_argument("make_grid: window must be positive");
  TimeGrid g;
  g.n_points = n_points;
  g.window = window;
  g.times.resize(n_points);
  g.freqs.resize(n_points);
  const double dt = window / n_points;
  const double dw = kTwoPi / window;
  for (int k = 0; k < n_points; ++k) {
    g.times[k] = (k - n_points / 2) * dt;
    g.freqs[k] = (k - n_points / 2) * dw;
  }
  return g;
}

std::complex<double> quad_inner(const TimeGrid& g,
                                const Eigen::Ref<const Eigen::VectorXcd>& a,
                                const Eigen::Ref<const Eigen::VectorXcd>& b) {
  return g.dt() * a.dot(b);  // Eigen's dot conjugates the first factor
}

double quad_norm(const TimeGrid& g, const Eigen::Ref<const Eigen::VectorXcd>& a) {
  return std::sqrt(g.dt()) * a.norm();
}

Eigen::VectorXcd to_freq(const TimeGrid& g,
                         const Eigen::Ref<const Eigen::VectorXcd>& time_amps) {
  Eigen::VectorXcd twisted = alternate(time_amps);
  Eigen::VectorXcd out(time_amps.size());
  fft_engine().fwd(out, twisted);
  const double scale = quarter_sign(g.n_points) * g.dt() / std::sqrt(kTwoPi);
  return scale * alternate(out);
}

Eigen::VectorXcd to_time(const TimeGrid& g,
                         const Eigen::Ref<const Eigen::VectorXcd>& freq_amps) {
  Eigen::VectorXcd twisted = alternate(freq_amps);
  Eigen::VectorXcd out(freq_amps.size());
  fft_engine().inv(out, twisted);  // includes the 1/N
  const double scale =
      quarter_sign(g.n_points) * g.n_points * g.domega() / std::sqrt(kTwoPi);
  return scale * alternate(out);
}

Eigen::VectorXcd apply_time_operator(const TimeGrid& g,
                                     const Eigen::Ref<const Eigen::VectorXcd>& v) {
  return v.cwiseProduct(g.times.cast<std::complex<double>>());
}

Eigen::VectorXcd apply_frequency_operator(
    const TimeGrid& g, const Eigen::Ref<const Eigen::VectorXcd>& v) {
  Eigen::VectorXcd hat = to_freq(g, v);
  hat.array() *= g.freqs.array();
  return to_time(g, hat);
}

double edge_amplitude_ratio(const TimeGrid& g,
                            const Eigen::Ref<const Eigen::VectorXcd>& v,
                            double edge_fraction) {
  const int n = g.n_points;
  const int band = std::max(1, static_cast<int>(n * edge_fraction));
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  const double lead = v.head(band).cwiseAbs().maxCoeff();
  const double tail = v.tail(band).cwiseAbs().maxCoeff();
  return std::max(lead, tail) / peak;
}

CommutatorSandwich commutator_sandwich(const TimeGrid& g,
                                       const Eigen::Ref<const Eigen::VectorXcd>& v,
                                       double edge_fraction) {
  CommutatorSandwich r;
  r.edge_ratio = edge_amplitude_ratio(g, v, edge_fraction);
  r.boundary_ok = r.edge_ratio < 1e-8;
  const Eigen::VectorXcd om_v = apply_frequency_operator(g, v);
  const Eigen::VectorXcd t_v = apply_time_operator(g, v);
  r.value = quad_inner(g, v, apply_time_operator(g, om_v)) -
            quad_inner(g, v, apply_frequency_operator(g, t_v));
  return r;
}

}  // namespace pwak
