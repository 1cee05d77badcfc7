#include "pwak/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pwak {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using cplx = std::complex<double>;

std::string fmt(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.12g", x);
  return b;
}

const json& require_key(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key))
    throw std::runtime_error("config: missing " + ctx + "." + key);
  return j.at(key);
}

double as_double(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw std::runtime_error("config: " + ctx + " must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& ctx) {
  return static_cast<int>(std::llround(as_double(j, ctx)));
}

TimeGrid parse_grid(const json& j) {
  return make_grid(as_int(require_key(j, "n_points", "grid"), "grid.n_points"),
                   as_double(require_key(j, "window", "grid"), "grid.window"));
}

cplx parse_entry(const json& v, const std::string& ctx) {
  if (v.is_number()) return cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2)
    return cplx(as_double(v[0], ctx), as_double(v[1], ctx));
  throw std::runtime_error("config: " + ctx + " entries must be numbers or [re, im]");
}

Hamiltonian parse_system(const json& j) {
  const std::string preset = require_key(j, "preset", "system").get<std::string>();
  if (preset == "zero")
    return zero_hamiltonian(as_int(require_key(j, "dim", "system"), "system.dim"));
  if (preset == "qubit")
    return qubit_hamiltonian(as_double(require_key(j, "omega0", "system"), "system.omega0"));
  if (preset == "oscillator")
    return oscillator_hamiltonian(as_int(require_key(j, "dim", "system"), "system.dim"),
                                  as_double(require_key(j, "omega0", "system"), "system.omega0"));
  if (preset == "random") {
    if (!j.contains("seed"))
      throw std::runtime_error("config: system.seed is required for the random preset");
    return random_hermitian(as_int(require_key(j, "dim", "system"), "system.dim"),
                            j.at("seed").get<std::uint64_t>());
  }
  if (preset == "custom") {
    const json& rows = require_key(j, "matrix", "system");
    const int d = static_cast<int>(rows.size());
    Eigen::MatrixXcd m(d, d);
    for (int r = 0; r < d; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != d)
        throw std::runtime_error("config: system.matrix must be square");
      for (int c = 0; c < d; ++c) m(r, c) = parse_entry(rows[r][c], "system.matrix");
    }
    return make_hamiltonian(m);
  }
  throw std::runtime_error("config: unknown system.preset '" + preset + "'");
}

Eigen::VectorXcd parse_state(const json& v, const Hamiltonian& h, const std::string& ctx) {
  const int d = h.dim();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "uniform")
      return Eigen::VectorXcd::Constant(d, cplx(1.0 / std::sqrt(double(d)), 0.0));
    if (s == "ground") return h.eigenvectors.col(0);
    throw std::runtime_error("config: " + ctx + " must be \"uniform\", \"ground\" or an array");
  }
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    throw std::runtime_error("config: " + ctx + " must have " + std::to_string(d) + " entries");
  Eigen::VectorXcd psi(d);
  for (int a = 0; a < d; ++a) psi[a] = parse_entry(v[a], ctx);
  const double nrm = psi.norm();
  if (!(nrm > 1e-12)) throw std::runtime_error("config: " + ctx + " is numerically zero");
  return psi / nrm;
}

Eigen::VectorXcd make_theta(const TimeGrid& g, const json& desc) {
  const std::string type = require_key(desc, "type", "thetas[]").get<std::string>();
  Eigen::VectorXd v(g.n_points);
  if (type == "gaussian") {
    const double c = as_double(require_key(desc, "center", "thetas[]"), "theta.center");
    const double w = as_double(require_key(desc, "width", "thetas[]"), "theta.width");
    if (!(w > 0.0)) throw std::runtime_error("config: theta.width must be positive");
    v = (-(g.times.array() - c).square() / (2.0 * w * w)).exp().matrix();
  } else if (type == "power") {
    const double eps = as_double(require_key(desc, "epsilon", "thetas[]"), "theta.epsilon");
    if (!(eps > 0.0)) throw std::runtime_error("config: theta.epsilon must be positive");
    v = (1.0 + g.times.array().square()).pow(-(0.5 + eps)).matrix();
  } else {
    throw std::runtime_error("config: unknown theta type '" + type + "'");
  }
  Eigen::VectorXcd out = v.cast<cplx>();
  return out / quad_norm(g, out);
}

double std_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - (rng() >> 11) * 0x1.0p-53;
  const double u2 = (rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// dense (N d)^2 realization of Omega (x) 1 + 1 (x) H against the matrix-free
// path, worst entry deviation over seeded random states
double dense_constraint_deviation(const TimeGrid& g, const Hamiltonian& h,
                                  int n_states, std::uint64_t seed) {
  const int n = g.n_points, d = h.dim(), nd = n * d;
  const double s = 1.0 / std::sqrt(2.0 * M_PI);
  Eigen::MatrixXcd ana(n, n), syn(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double phase = g.freqs[j] * g.times[k];
      ana(j, k) = g.dt() * s * std::exp(cplx(0.0, -phase));
      syn(k, j) = g.domega() * s * std::exp(cplx(0.0, phase));
    }
  const Eigen::MatrixXcd omega = syn * g.freqs.cast<cplx>().asDiagonal() * ana;
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(nd, nd);
  for (int k = 0; k < n; ++k)
    for (int k2 = 0; k2 < n; ++k2)
      for (int a = 0; a < d; ++a) big(k * d + a, k2 * d + a) += omega(k, k2);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) big(k * d + a, k * d + b) += h.matrix(a, b);

  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s_i = 0; s_i < n_states; ++s_i) {
    HistoryState psi;
    psi.grid = g;
    psi.amps.resize(n, d);
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < d; ++a) psi.amps(k, a) = cplx(std_normal(rng), std_normal(rng));
    psi.amps /= psi.amps.norm();
    Eigen::VectorXcd x(nd);
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < d; ++a) x[k * d + a] = psi.amps(k, a);
    const Eigen::VectorXcd want = big * x;
    const HistoryState got = apply_constraint({g, h}, psi);
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < d; ++a)
        worst = std::max(worst, std::abs(got.amps(k, a) - want[k * d + a]));
  }
  return worst;
}

CheckResult check_abs(std::string name, double value, double target, double tol,
                      std::string detail) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.target = target;
  c.tolerance = tol;
  c.pass = std::abs(value - target) <= tol;
  c.detail = std::move(detail);
  return c;
}

CheckResult check_le(std::string name, double value, double bound, std::string detail) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = bound;
  c.pass = value <= bound;
  c.detail = std::move(detail) + " (pass when <= " + fmt(bound) + ")";
  return c;
}

CheckResult check_ge(std::string name, double value, double bound, std::string detail) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = bound;
  c.pass = value >= bound;
  c.detail = std::move(detail) + " (pass when >= " + fmt(bound) + ")";
  return c;
}

CheckResult check_range(std::string name, double value, double lo, double hi,
                        std::string detail) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.pass = value >= lo && value <= hi;
  c.detail = std::move(detail) + " (pass within [" + fmt(lo) + ", " + fmt(hi) + "])";
  return c;
}

CheckResult reported(std::string name, double value, std::string detail) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.pass = true;
  c.detail = "reported, not asserted: " + std::move(detail);
  return c;
}

using FileList = std::vector<std::pair<std::string, std::string>>;

// ---------------------------------------------------------------- scenarios

void run_pauli(const ScenarioConfig& cfg, RunOutcome& out, json& data, FileList&) {
  const TimeGrid g = parse_grid(require_key(cfg.raw, "grid", "config"));
  const Hamiltonian h = parse_system(require_key(cfg.raw, "system", "config"));
  const Eigen::VectorXcd psi0 =
      parse_state(require_key(cfg.raw, "initial_state", "config"), h, "initial_state");
  const double n = cfg.raw.contains("weyl_n") ? as_double(cfg.raw.at("weyl_n"), "weyl_n") : 4.0;
  const cplx iu(0.0, 1.0);

  const WeylState w = make_weyl(WeylKind::gaussian, n, g, h, psi0);
  const auto cs = commutator_sandwich(g, w.envelope.cast<cplx>());
  out.checks.push_back(check_le("clock_commutator_dev", std::abs(cs.value - iu), 1e-4,
                                "|<[T, Omega]> - i| on the gaussian clock envelope"));

  const WeylReport rep = weyl_report(w, h);
  out.checks.push_back(check_abs("weyl_constraint_scaled", n * rep.constraint_norm_sq, 1.0,
                                 0.02, "n ||J Psi||^2"));
  out.checks.push_back(
      check_abs("weyl_t_amplified", rep.t_amplified_norm_sq, 0.75, 0.0075, "||T J Psi||^2"));
  out.checks.push_back(
      check_abs("sandwich_tj_mag", std::abs(rep.sandwich_tj), 0.5, 0.005, "|<T J>|"));
  out.checks.push_back(
      check_abs("sandwich_jt_mag", std::abs(rep.sandwich_jt), 0.5, 0.005, "|<J T>|"));
  out.checks.push_back(check_le("sandwich_tj_re", std::abs(rep.sandwich_tj.real()), 1e-3,
                                "<T J> purely imaginary"));
  out.checks.push_back(check_le("sandwich_jt_re", std::abs(rep.sandwich_jt.real()), 1e-3,
                                "<J T> purely imaginary"));
  out.checks.push_back(check_le("commutator_diff_dev", std::abs(rep.commutator_check - iu),
                                1e-2, "<T J> - <J T> vs i; ordering of the signs reported, not asserted"));
  out.checks.push_back(reported("eigen_residual_at_jt", rep.eigen_residual_sq_at_jt,
                                "||(J T - <J T>) Psi||^2 has closed-form floor 1/2; no lambda "
                                "makes T Psi an approximate eigenvector"));

  // [T (x) 1, 1 (x) H] vanishes identically: different tensor factors
  const Eigen::MatrixXcd ht = w.state.amps * h.matrix.transpose();
  HistoryState th = w.state;
  th.amps = ht;
  const Eigen::MatrixXcd order_a = apply_time_operator(th).amps;
  const Eigen::MatrixXcd order_b =
      apply_time_operator(w.state).amps * h.matrix.transpose();
  out.checks.push_back(check_le("peres_commutator",
                                std::sqrt(g.dt()) * (order_a - order_b).norm(), 1e-12,
                                "||[T (x) 1, 1 (x) H] Psi||"));

  const HistoryState hist = build_history(g, h, psi0);
  double fmin = 1.0;
  for (int k = 0; k < g.n_points; ++k) {
    const Eigen::VectorXcd ref = evolve(h, psi0, g.times[k]);
    fmin = std::min(fmin, std::abs(ref.dot(condition(hist, k).state)));
  }
  out.checks.push_back(check_ge("conditioning_fidelity_min", fmin, 1.0 - 1e-10,
                                "conditioned rows vs eigendecomposition propagation"));

  out.checks.push_back(check_le(
      "dense_constraint_match",
      dense_constraint_deviation(make_grid(16, 8.0), qubit_hamiltonian(1.0), 20, 12345),
      1e-12, "matrix-free constraint vs dense kron matrix at N = 16, d = 2"));

  data["weyl_report"] = {{"n", n},
                         {"norm_sq", rep.norm_sq},
                         {"constraint_norm_sq", rep.constraint_norm_sq},
                         {"t_amplified_norm_sq", rep.t_amplified_norm_sq},
                         {"sandwich_tj", {rep.sandwich_tj.real(), rep.sandwich_tj.imag()}},
                         {"sandwich_jt", {rep.sandwich_jt.real(), rep.sandwich_jt.imag()}},
                         {"eigen_residual_sq_at_jt", rep.eigen_residual_sq_at_jt},
                         {"eigen_residual_sq_at_zero", rep.eigen_residual_sq_at_zero},
                         {"edge_ratio", rep.edge_ratio}};
}

void run_weyl_sweep(const ScenarioConfig& cfg, RunOutcome& out, json& data, FileList& files) {
  const json& sweep = require_key(cfg.raw, "sweep", "config");
  const std::string family = require_key(sweep, "family", "sweep").get<std::string>();
  const Hamiltonian h = parse_system(require_key(cfg.raw, "system", "config"));
  const Eigen::VectorXcd psi0 =
      parse_state(require_key(cfg.raw, "initial_state", "config"), h, "initial_state");
  const std::vector<double> values =
      require_key(sweep, "values", "sweep").get<std::vector<double>>();
  const cplx iu(0.0, 1.0);

  std::string csv =
      "family,parameter,n_points,window,norm_sq,constraint_norm_sq,constraint_times_parameter,"
      "t_amplified_norm_sq,sandwich_tj_re,sandwich_tj_im,sandwich_jt_re,sandwich_jt_im,"
      "diff_re,diff_im,eigen_residual_at_jt,eigen_residual_at_zero,edge_ratio,edge_on_grid\n";
  json table = json::array();
  std::vector<double> constraint_seq, amplified_seq;

  for (double p : values) {
    TimeGrid g;
    WeylState w;
    if (family == "gaussian") {
      const double dt = as_double(require_key(sweep, "dt", "sweep"), "sweep.dt");
      const double wf = as_double(require_key(sweep, "window_factor", "sweep"), "sweep.window_factor");
      const double window = wf * std::sqrt(p);
      int n_pts = static_cast<int>(std::llround(window / dt));
      if (n_pts % 2) ++n_pts;
      g = make_grid(n_pts, window);
      w = make_weyl(WeylKind::gaussian, p, g, h, psi0);
    } else if (family == "box") {
      g = parse_grid(require_key(cfg.raw, "grid", "config"));
      w = make_weyl(WeylKind::box, p, g, h, psi0);
    } else {
      throw std::runtime_error("config: unknown sweep.family '" + family + "'");
    }
    const WeylReport rep = weyl_report(w, h);
    const std::string tag = "[" + family + " " + fmt(p) + "]";
    constraint_seq.push_back(rep.constraint_norm_sq);
    amplified_seq.push_back(rep.t_amplified_norm_sq);

    if (family == "gaussian") {
      out.checks.push_back(check_abs("constraint_scaled" + tag, p * rep.constraint_norm_sq,
                                     1.0, 0.02, "n ||J Psi||^2"));
      out.checks.push_back(check_abs("t_amplified" + tag, rep.t_amplified_norm_sq, 0.75,
                                     0.0075, "||T J Psi||^2"));
      out.checks.push_back(
          check_abs("sandwich_tj_mag" + tag, std::abs(rep.sandwich_tj), 0.5, 0.005, "|<T J>|"));
      out.checks.push_back(
          check_abs("sandwich_jt_mag" + tag, std::abs(rep.sandwich_jt), 0.5, 0.005, "|<J T>|"));
      out.checks.push_back(check_le("sandwich_tj_re" + tag, std::abs(rep.sandwich_tj.real()),
                                    1e-3, "<T J> purely imaginary"));
      out.checks.push_back(check_le("sandwich_jt_re" + tag, std::abs(rep.sandwich_jt.real()),
                                    1e-3, "<J T> purely imaginary"));
      out.checks.push_back(check_le("commutator_diff_dev" + tag,
                                    std::abs(rep.commutator_check - iu), 1e-2,
                                    "<T J> - <J T> vs i"));
      out.checks.push_back(reported("eigen_residual_at_jt" + tag, rep.eigen_residual_sq_at_jt,
                                    "closed-form floor 1/2"));
    } else {
      out.checks.push_back(check_abs("box_norm_closed_form" + tag, rep.norm_sq,
                                     1.0 - g.dt() / (2.0 * p), 1e-9,
                                     "||Psi||^2 = 1 - dt/(2 m) with half-weight edges"));
      out.checks.push_back(check_ge("box_edge_on_grid" + tag, w.edge_on_grid ? 1.0 : 0.0, 1.0,
                                    "+-m/2 land on grid points"));
      out.checks.push_back(reported("commutator_diff_im" + tag, rep.commutator_check.imag(),
                                    "box edges break integration by parts; value not pinned"));
    }

    csv += family + "," + fmt(p) + "," + std::to_string(g.n_points) + "," + fmt(g.window) +
           "," + fmt(rep.norm_sq) + "," + fmt(rep.constraint_norm_sq) + "," +
           fmt(p * rep.constraint_norm_sq) + "," + fmt(rep.t_amplified_norm_sq) + "," +
           fmt(rep.sandwich_tj.real()) + "," + fmt(rep.sandwich_tj.imag()) + "," +
           fmt(rep.sandwich_jt.real()) + "," + fmt(rep.sandwich_jt.imag()) + "," +
           fmt(rep.commutator_check.real()) + "," + fmt(rep.commutator_check.imag()) + "," +
           fmt(rep.eigen_residual_sq_at_jt) + "," + fmt(rep.eigen_residual_sq_at_zero) + "," +
           fmt(rep.edge_ratio) + "," + (w.edge_on_grid ? "1" : "0") + "\n";
    table.push_back({{"parameter", p},
                     {"n_points", g.n_points},
                     {"window", g.window},
                     {"norm_sq", rep.norm_sq},
                     {"constraint_norm_sq", rep.constraint_norm_sq},
                     {"t_amplified_norm_sq", rep.t_amplified_norm_sq},
                     {"eigen_residual_sq_at_jt", rep.eigen_residual_sq_at_jt}});
  }

  double worst_down = 0.0;  // constraint norm must strictly shrink along the sweep
  for (size_t i = 1; i < constraint_seq.size(); ++i)
    worst_down = std::max(worst_down, constraint_seq[i] / constraint_seq[i - 1]);
  out.checks.push_back(check_le("constraint_monotone_ratio", worst_down, 1.0,
                                "||J Psi||^2 decreasing along the sweep"));
  if (family == "box") {
    double worst_up = amplified_seq.empty() ? 1.0 : 1e300;
    for (size_t i = 1; i < amplified_seq.size(); ++i)
      worst_up = std::min(worst_up, amplified_seq[i] / amplified_seq[i - 1]);
    if (amplified_seq.size() < 2) worst_up = 1.0;
    out.checks.push_back(check_ge("t_amplified_monotone_ratio", worst_up, 1.0,
                                  "||T J Psi||^2 growing with the box length"));
  }

  data["family"] = family;
  data["sweep"] = table;
  files.emplace_back("weyl_sweep.csv", csv);
}

void run_recovery(const ScenarioConfig& cfg, RunOutcome& out, json& data, FileList& files) {
  const TimeGrid g = parse_grid(require_key(cfg.raw, "grid", "config"));
  const Hamiltonian h = parse_system(require_key(cfg.raw, "system", "config"));
  const Eigen::VectorXcd psi0 =
      parse_state(require_key(cfg.raw, "initial_state", "config"), h, "initial_state");
  const HistoryState hist = build_history(g, h, psi0);

  const double residual = schrodinger_residual(hist, h);
  out.checks.push_back(check_le("interior_residual", residual, 1e-6,
                                "max interior row norm of (-i D_t + H) Psi"));

  std::string csv = "k,t,row_norm,fidelity\n";
  double fmin = 1.0, norm_dev = 0.0;
  int worst_k = 0;
  for (int k = 0; k < g.n_points; ++k) {
    const ConditionResult c = condition(hist, k);
    const double fid = std::abs(evolve(h, psi0, g.times[k]).dot(c.state));
    if (fid < fmin) {
      fmin = fid;
      worst_k = k;
    }
    norm_dev = std::max(norm_dev, std::abs(c.row_norm - 1.0));
    csv += std::to_string(k) + "," + fmt(g.times[k]) + "," + fmt(c.row_norm) + "," +
           fmt(fid) + "\n";
  }
  out.checks.push_back(check_ge("conditioning_fidelity_min", fmin, 1.0 - 1e-10,
                                "worst row at k = " + std::to_string(worst_k)));
  out.checks.push_back(check_le("row_norm_dev", norm_dev, 1e-12,
                                "product-form rows keep unit Euclidean norm"));

  data["interior_residual"] = residual;
  data["fidelity_min"] = fmin;
  data["worst_k"] = worst_k;
  files.emplace_back("recovery.csv", csv);
}

void run_support(const ScenarioConfig& cfg, RunOutcome& out, json& data, FileList& files) {
  const TimeGrid g = parse_grid(require_key(cfg.raw, "grid", "config"));
  const Hamiltonian h = parse_system(require_key(cfg.raw, "system", "config"));
  const Eigen::VectorXcd psi0 =
      parse_state(require_key(cfg.raw, "initial_state", "config"), h, "initial_state");
  const HistoryState hist = build_history(g, h, psi0);
  const SpectralSupportReport rep = spectral_support(hist, h);

  out.checks.push_back(check_ge("total_captured", rep.total_captured, 0.99,
                                "omega-mass within one lattice spacing of the lines"));
  out.checks.push_back(check_ge("nyquist_ok", rep.nyquist_ok ? 1.0 : 0.0, 1.0,
                                "every |eigenvalue| at least one spacing below Nyquist"));
  json lines = json::array();
  for (const SpectralLine& l : rep.lines) {
    out.checks.push_back(reported("line_captured[w=" + fmt(l.eigenvalue) + "]",
                                  l.captured_fraction,
                                  "mass near omega = " + fmt(l.line_freq)));
    lines.push_back({{"eigenvalue", l.eigenvalue},
                     {"line_freq", l.line_freq},
                     {"captured_fraction", l.captured_fraction}});
  }

  std::string csv = "j,omega,mass\n";
  for (int j = 0; j < g.n_points; ++j)
    csv += std::to_string(j) + "," + fmt(g.freqs[j]) + "," + fmt(rep.omega_mass[j]) + "\n";
  files.emplace_back("spectrum.csv", csv);
  data["total_captured"] = rep.total_captured;
  data["nyquist_ok"] = rep.nyquist_ok;
  data["lines"] = lines;
}

void run_bandwidth(const ScenarioConfig& cfg, RunOutcome& out, json& data, FileList& files) {
  const TimeGrid g = parse_grid(require_key(cfg.raw, "grid", "config"));
  const Hamiltonian h = parse_system(require_key(cfg.raw, "system", "config"));
  const Eigen::VectorXcd psi0 =
      parse_state(require_key(cfg.raw, "initial_state", "config"), h, "initial_state");
  const std::vector<double> widths =
      require_key(cfg.raw, "widths", "config").get<std::vector<double>>();
  const json& phi_spec = require_key(cfg.raw, "phi", "config");
  const std::string shape = require_key(phi_spec, "shape", "phi").get<std::string>();
  double center = 0.0;
  if (phi_spec.contains("center") && phi_spec.at("center").is_number())
    center = phi_spec.at("center").get<double>();
  else
    center = -h.eigenvalues.mean();  // "auto": sit on the negated line comb
  const double tau_factor =
      cfg.raw.contains("max_tau_factor") ? as_double(cfg.raw.at("max_tau_factor"), "max_tau_factor") : 4.0;
  const double half_target = std::sqrt(2.0 * std::log(2.0));

  const HistoryState sharp = build_history(g, h, psi0);
  std::string csv =
      "width,measured_std,half_overlap_time,low_overlap_time,gaussian_width,width_product,"
      "bound,crossed_half\n";
  std::string ac_csv = "width,tau,abs_c\n";
  json table = json::array();
  std::vector<double> halfs;

  for (double wdt : widths) {
    const SpectralAmplitude phi = shape == "box" ? box_amplitude(g, wdt, center)
                                                 : gaussian_amplitude(g, wdt, center);
    const std::string tag = "[w=" + fmt(wdt) + "]";
    const double mstd = measured_std(g, phi);
    out.checks.push_back(check_le("measured_std_dev" + tag, std::abs(mstd / wdt - 1.0), 0.02,
                                  "lattice std of |phi|^2 vs width parameter"));

    const HistoryState smeared = smear_history(phi, sharp);
    const Autocorrelation ac = autocorrelation(smeared, tau_factor / wdt);
    const ResolutionEstimate res = resolution_estimate(ac, wdt);
    halfs.push_back(res.half_overlap_time);

    out.checks.push_back(check_ge("crossed_half" + tag, res.crossed_half ? 1.0 : 0.0, 1.0,
                                  "|c| dropped below 1/2 within the scan"));
    if (shape == "gaussian") {
      out.checks.push_back(check_abs("width_product" + tag, res.gaussian_width * wdt, 1.0,
                                     0.05, "fitted |c| time width times bandwidth"));
      out.checks.push_back(check_abs("half_overlap_scaled" + tag,
                                     res.half_overlap_time * wdt, half_target,
                                     0.02 * half_target, "vs sqrt(2 ln 2) / width"));
    } else {
      out.checks.push_back(reported("width_product" + tag, res.gaussian_width * wdt,
                                    "gaussian fit of a non-gaussian window"));
    }
    out.checks.push_back(check_ge("half_ge_bound" + tag, res.half_overlap_time, res.bound,
                                  "resolution bounded by 1/(2 width)"));

    csv += fmt(wdt) + "," + fmt(mstd) + "," + fmt(res.half_overlap_time) + "," +
           fmt(res.low_overlap_time) + "," + fmt(res.gaussian_width) + "," +
           fmt(res.gaussian_width * wdt) + "," + fmt(res.bound) + "," +
           (res.crossed_half ? "1" : "0") + "\n";
    for (int i = 0; i < ac.tau.size(); ++i)
      ac_csv += fmt(wdt) + "," + fmt(ac.tau[i]) + "," + fmt(std::abs(ac.c[i])) + "\n";
    table.push_back({{"width", wdt},
                     {"measured_std", mstd},
                     {"half_overlap_time", res.half_overlap_time},
                     {"low_overlap_time", res.low_overlap_time},
                     {"gaussian_width", res.gaussian_width},
                     {"bound", res.bound}});
  }

  double worst = 0.0;
  for (size_t i = 1; i < halfs.size(); ++i)
    worst = std::max(worst, halfs[i] / halfs[i - 1]);
  out.checks.push_back(check_le("half_monotone_ratio", worst, 1.0,
                                "resolution time shrinking as bandwidth grows"));

  if (cfg.raw.contains("residual_probe")) {
    const json& pr = cfg.raw.at("residual_probe");
    const TimeGrid pg = make_grid(as_int(require_key(pr, "n_points", "residual_probe"), "probe.n_points"),
                                  as_double(require_key(pr, "window", "residual_probe"), "probe.window"));
    const int bins = as_int(require_key(pr, "omega0_bins", "residual_probe"), "probe.omega0_bins");
    const double detune = as_double(require_key(pr, "detune", "residual_probe"), "probe.detune");
    const double pw = as_double(require_key(pr, "width", "residual_probe"), "probe.width");
    const double w0 = bins * pg.domega() * (1.0 + detune);
    const Hamiltonian ph = qubit_hamiltonian(w0);
    const Eigen::VectorXcd pstate = Eigen::VectorXcd::Constant(2, cplx(1.0 / std::sqrt(2.0), 0.0));
    const HistoryState phist = build_history(pg, ph, pstate);
    const double sharp_res = schrodinger_residual(phist, ph);
    const SpectralAmplitude pphi = gaussian_amplitude(pg, pw, -0.5 * w0);
    const double smeared_res = smeared_schrodinger_residual(pphi, phist, ph);
    out.checks.push_back(reported("probe_sharp_residual", sharp_res,
                                  "detuned line leaves an N-independent wrap-leakage floor"));
    out.checks.push_back(check_le("probe_smeared_ratio", smeared_res / sharp_res, 10.0,
                                  "mollified residual never exceeds 10x the sharp one"));
    out.checks.push_back(check_le("probe_smeared_abs", smeared_res, 1e-9,
                                  "the spectral window collapses the detuning floor"));
    data["residual_probe"] = {{"omega0", w0},
                              {"sharp_residual", sharp_res},
                              {"smeared_residual", smeared_res}};
  }

  data["sweep"] = table;
  files.emplace_back("bandwidth.csv", csv);
  files.emplace_back("autocorrelation.csv", ac_csv);
}

void run_weak(const ScenarioConfig& cfg, RunOutcome& out, json& data, FileList& files) {
  const TimeGrid g = parse_grid(require_key(cfg.raw, "grid", "config"));
  const Hamiltonian h = parse_system(require_key(cfg.raw, "system", "config"));
  const Eigen::VectorXcd psi0 =
      parse_state(require_key(cfg.raw, "initial_state", "config"), h, "initial_state");
  const Eigen::VectorXcd phi0 =
      cfg.raw.contains("phi0") ? parse_state(cfg.raw.at("phi0"), h, "phi0") : psi0;
  const std::vector<double> m_values =
      require_key(cfg.raw, "m_values", "config").get<std::vector<double>>();
  const json& thetas = require_key(cfg.raw, "thetas", "config");

  std::string csv =
      "theta,m,abs_a,abs_a_pred,abs_b,abs_b_pred,b_ratio,overlap_drift,edge_on_grid\n";
  json blocks = json::array();

  for (const json& desc : thetas) {
    const std::string type = require_key(desc, "type", "thetas[]").get<std::string>();
    const Eigen::VectorXcd theta = make_theta(g, desc);
    const std::vector<WeakProbeRow> rows =
        weak_convergence_probe(g, h, psi0, phi0, theta, m_values);

    json jrows = json::array();
    for (size_t i = 0; i < rows.size(); ++i) {
      const WeakProbeRow& r = rows[i];
      const std::string tag = "[" + type + " m=" + fmt(r.m) + "]";
      const double b_ratio =
          std::abs(r.b_pred) > 0.0 ? std::abs(r.b) / std::abs(r.b_pred) : 0.0;

      if (type == "gaussian") {
        if (i > 0)
          out.checks.push_back(check_le("a_decay" + tag, std::abs(r.a),
                                        std::abs(rows[i - 1].a) / 10.0,
                                        "|<theta phi0|J beta psi>| falls 10x per doubling of m"));
        if (std::abs(r.a_pred) > 1e-6)
          out.checks.push_back(check_le("a_match" + tag, std::abs(r.a - r.a_pred),
                                        0.02 * std::abs(r.a_pred),
                                        "boundary-term prediction for the J element"));
        if (std::abs(r.b_pred) > 1e-6)
          out.checks.push_back(check_le("b_match" + tag, std::abs(r.b - r.b_pred),
                                        0.02 * std::abs(r.b_pred),
                                        "boundary-term prediction for the T J element"));
      } else {
        out.checks.push_back(check_range("b_ratio" + tag, b_ratio, 0.5, 2.0,
                                         "slow theta keeps the T J element pinned to the "
                                         "boundary prediction"));
      }

      csv += type + "," + fmt(r.m) + "," + fmt(std::abs(r.a)) + "," +
             fmt(std::abs(r.a_pred)) + "," + fmt(std::abs(r.b)) + "," +
             fmt(std::abs(r.b_pred)) + "," + fmt(b_ratio) + "," + fmt(r.overlap_drift) +
             "," + (r.edge_on_grid ? "1" : "0") + "\n";
      jrows.push_back({{"m", r.m},
                       {"abs_a", std::abs(r.a)},
                       {"abs_a_pred", std::abs(r.a_pred)},
                       {"abs_b", std::abs(r.b)},
                       {"abs_b_pred", std::abs(r.b_pred)},
                       {"overlap_drift", r.overlap_drift}});
    }
    blocks.push_back({{"theta", type}, {"rows", jrows}});
  }

  data["thetas"] = blocks;
  files.emplace_back("weak.csv", csv);
}

// ----------------------------------------------------------------- plumbing

void write_text(const fs::path& p, const std::string& content) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

std::string checks_csv(const RunOutcome& out) {
  std::string s = "name,value,target,tolerance,pass\n";
  for (const CheckResult& c : out.checks)
    s += c.name + "," + fmt(c.value) + "," + (c.target ? fmt(*c.target) : "") + "," +
         fmt(c.tolerance) + "," + (c.pass ? "1" : "0") + "\n";
  return s;
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  ScenarioConfig cfg;
  try {
    cfg.raw = json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error("config: parse failure in " + path + ": " + e.what());
  }
  if (!cfg.raw.is_object()) throw std::runtime_error("config: top level must be an object");
  cfg.source_path = path;
  cfg.scenario = require_key(cfg.raw, "scenario", "config").get<std::string>();
  cfg.name = cfg.raw.value("name", "");
  cfg.timestamp = cfg.raw.value("timestamp", true);
  return cfg;
}

ValidationReport validate_config(const ScenarioConfig& cfg) {
  ValidationReport rep;
  std::vector<std::pair<std::string, std::string>> table;
  auto row = [&](const std::string& k, const std::string& v) { table.emplace_back(k, v); };
  auto fatal = [&](const std::string& m) { rep.issues.push_back({true, m}); };
  auto warn = [&](const std::string& m) { rep.issues.push_back({false, m}); };

  row("scenario", cfg.scenario);
  if (!cfg.name.empty()) row("name", cfg.name);
  if (!cfg.source_path.empty()) row("config", cfg.source_path);

  const std::vector<std::string> known = {"pauli-check",      "weyl-sweep",
                                          "schrodinger-recovery", "spectral-support",
                                          "bandwidth-sweep",  "weak-convergence"};
  if (std::find(known.begin(), known.end(), cfg.scenario) == known.end()) {
    std::string all;
    for (const std::string& k : known) all += (all.empty() ? "" : ", ") + k;
    fatal("unknown scenario '" + cfg.scenario + "'; known: " + all);
  }

  try {
    std::optional<TimeGrid> grid;
    if (cfg.raw.contains("grid")) {
      grid = parse_grid(cfg.raw.at("grid"));
      row("grid", "N = " + std::to_string(grid->n_points) + ", L = " + fmt(grid->window) +
                      "  (dt = " + fmt(grid->dt()) + ", domega = " + fmt(grid->domega()) +
                      ", nyquist = " + fmt(grid->nyquist()) + ")");
    }
    std::optional<Hamiltonian> h;
    if (cfg.raw.contains("system")) {
      h = parse_system(cfg.raw.at("system"));
      row("system", cfg.raw.at("system").value("preset", "custom") + ", dim " +
                        std::to_string(h->dim()) + ", eigenvalues in [" +
                        fmt(h->eigenvalues.minCoeff()) + ", " + fmt(h->eigenvalues.maxCoeff()) +
                        "]");
      if (cfg.raw.contains("initial_state")) {
        parse_state(cfg.raw.at("initial_state"), *h, "initial_state");
        row("initial state", cfg.raw.at("initial_state").is_string()
                                 ? cfg.raw.at("initial_state").get<std::string>()
                                 : std::string("explicit vector"));
      }
    }
    if (grid && h) {
      const double wmax = h->eigenvalues.cwiseAbs().maxCoeff();
      if (wmax >= grid->nyquist())
        fatal("max |eigenvalue| " + fmt(wmax) + " reaches the Nyquist frequency " +
              fmt(grid->nyquist()) + "; enlarge N or shrink the window");
      if (cfg.scenario == "schrodinger-recovery" || cfg.scenario == "spectral-support") {
        for (int a = 0; a < h->dim(); ++a) {
          const double bins = h->eigenvalues[a] / grid->domega();
          if (std::abs(bins - std::round(bins)) > 1e-9 * std::max(1.0, std::abs(bins)))
            warn("eigenvalue " + fmt(h->eigenvalues[a]) +
                 " is off the 2 pi / window lattice; raw-history residual and support "
                 "develop an N-independent wrap-leakage floor");
        }
      }
    }

    if (cfg.scenario == "pauli-check") {
      const double n = cfg.raw.contains("weyl_n") ? as_double(cfg.raw.at("weyl_n"), "weyl_n") : 4.0;
      row("weyl family", "gaussian, n = " + fmt(n) + "  (needs window >= " + fmt(10.0 * std::sqrt(n)) + ")");
      if (!(n > 0.0)) fatal("weyl_n must be positive");
      else if (grid && grid->window < 10.0 * std::sqrt(n))
        fatal("window " + fmt(grid->window) + " below 10 sqrt(n) = " + fmt(10.0 * std::sqrt(n)));
    } else if (cfg.scenario == "weyl-sweep") {
      const json& sweep = require_key(cfg.raw, "sweep", "config");
      const std::string family = require_key(sweep, "family", "sweep").get<std::string>();
      const std::vector<double> values =
          require_key(sweep, "values", "sweep").get<std::vector<double>>();
      if (values.empty()) fatal("sweep.values is empty");
      if (!std::is_sorted(values.begin(), values.end()))
        warn("sweep.values not ascending; monotonicity checks follow the given order");
      if (family == "gaussian") {
        const double dt = as_double(require_key(sweep, "dt", "sweep"), "sweep.dt");
        const double wf = as_double(require_key(sweep, "window_factor", "sweep"), "sweep.window_factor");
        if (!(dt > 0.0)) fatal("sweep.dt must be positive");
        if (wf < 10.0) fatal("sweep.window_factor below 10: gaussian envelope would touch the window edge");
        std::string derived;
        for (double n : values) {
          int np = static_cast<int>(std::llround(wf * std::sqrt(n) / dt));
          if (np % 2) {
            ++np;
            warn("derived n_points odd for n = " + fmt(n) + "; bumped to " + std::to_string(np));
          }
          derived += "n = " + fmt(n) + " -> N = " + std::to_string(np) +
                     ", L = " + fmt(wf * std::sqrt(n)) + "; ";
        }
        row("sweep", derived);
      } else if (family == "box") {
        if (!grid) fatal("box sweep requires a top-level grid");
        std::string derived;
        for (double m : values) {
          if (grid && m > 0.8 * grid->window)
            fatal("box length " + fmt(m) + " exceeds 0.8 window = " + fmt(0.8 * grid->window));
          if (grid) {
            const double steps = 0.5 * m / grid->dt();
            if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
              warn("box edge +-" + fmt(0.5 * m) + " off the grid; half-weight endpoint skipped");
          }
          derived += "m = " + fmt(m) + "; ";
        }
        row("sweep", "box on the fixed grid: " + derived);
      } else {
        fatal("unknown sweep.family '" + family + "'");
      }
    } else if (cfg.scenario == "bandwidth-sweep") {
      const std::vector<double> widths =
          require_key(cfg.raw, "widths", "config").get<std::vector<double>>();
      std::string ws;
      for (double w : widths) {
        if (!(w > 0.0)) fatal("widths must be positive");
        else if (grid && w < 2.0 * grid->domega())
          warn("width " + fmt(w) + " under two lattice spacings; |phi|^2 badly resolved");
        ws += fmt(w) + " ";
      }
      row("widths", ws);
      const json& phi = require_key(cfg.raw, "phi", "config");
      const std::string shape = require_key(phi, "shape", "phi").get<std::string>();
      if (shape != "gaussian" && shape != "box") fatal("phi.shape must be gaussian or box");
      std::string center = "auto";
      if (phi.contains("center") && phi.at("center").is_number())
        center = fmt(phi.at("center").get<double>());
      else if (h)
        center = "auto (" + fmt(-h->eigenvalues.mean()) + ")";
      row("phi", shape + ", center " + center);
      if (cfg.raw.contains("residual_probe")) {
        const json& pr = cfg.raw.at("residual_probe");
        const TimeGrid pg = make_grid(as_int(require_key(pr, "n_points", "residual_probe"), "probe.n_points"),
                                      as_double(require_key(pr, "window", "residual_probe"), "probe.window"));
        const int bins = as_int(require_key(pr, "omega0_bins", "residual_probe"), "probe.omega0_bins");
        const double detune = as_double(require_key(pr, "detune", "residual_probe"), "probe.detune");
        if (bins < 1) fatal("residual_probe.omega0_bins must be >= 1");
        const double w0 = bins * pg.domega() * (1.0 + detune);
        if (w0 >= pg.nyquist()) fatal("residual_probe omega0 reaches the probe Nyquist");
        row("residual probe", "N = " + std::to_string(pg.n_points) + ", L = " + fmt(pg.window) +
                                  ", omega0 = " + fmt(w0) + " (detune " + fmt(detune) + ")");
      }
    } else if (cfg.scenario == "weak-convergence") {
      const std::vector<double> ms =
          require_key(cfg.raw, "m_values", "config").get<std::vector<double>>();
      std::string msr;
      for (double m : ms) {
        if (grid && (!(m > 0.0) || m > 0.8 * grid->window))
          fatal("m = " + fmt(m) + " outside (0, 0.8 window]");
        else if (grid) {
          const double steps = 0.5 * m / grid->dt();
          if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
            warn("box edge +-" + fmt(0.5 * m) + " off the grid; boundary sampling rounds to "
                 "the nearest row");
        }
        msr += fmt(m) + " ";
      }
      row("m values", msr);
      const json& thetas = require_key(cfg.raw, "thetas", "config");
      if (!thetas.is_array() || thetas.empty()) fatal("thetas must be a non-empty array");
      else {
        std::string ts;
        for (const json& t : thetas) {
          const std::string type = require_key(t, "type", "thetas[]").get<std::string>();
          if (type != "gaussian" && type != "power") fatal("unknown theta type '" + type + "'");
          ts += type + " ";
        }
        row("thetas", ts);
      }
      if (cfg.raw.contains("phi0") && h) parse_state(cfg.raw.at("phi0"), *h, "phi0");
    }
  } catch (const std::exception& e) {
    fatal(e.what());
  }

  size_t pad = 0;
  for (const auto& [k, v] : table) pad = std::max(pad, k.size());
  for (const auto& [k, v] : table)
    rep.table += k + std::string(pad - k.size() + 2, ' ') + v + "\n";
  rep.ok = std::none_of(rep.issues.begin(), rep.issues.end(),
                        [](const ValidationIssue& i) { return i.fatal; });
  return rep;
}

std::string summary_text(const RunOutcome& out) {
  std::string s = "scenario: " + out.scenario;
  if (!out.name.empty()) s += "  (" + out.name + ")";
  s += "\n\n";
  int fails = 0;
  for (const CheckResult& c : out.checks) {
    s += c.pass ? "[PASS] " : "[FAIL] ";
    s += c.name + " = " + fmt(c.value);
    if (c.target) s += "  [target " + fmt(*c.target) + " +- " + fmt(c.tolerance) + "]";
    if (!c.detail.empty()) s += "  -- " + c.detail;
    s += "\n";
    fails += c.pass ? 0 : 1;
  }
  if (!out.warnings.empty()) {
    s += "\nwarnings:\n";
    for (const std::string& w : out.warnings) s += "  - " + w + "\n";
  }
  s += "\nresult: ";
  if (fails == 0)
    s += "ALL " + std::to_string(out.checks.size()) + " CHECKS PASSED\n";
  else
    s += std::to_string(fails) + " OF " + std::to_string(out.checks.size()) +
         " CHECKS FAILED\n";
  return s;
}

RunOutcome run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
  const ValidationReport v = validate_config(cfg);
  RunOutcome out;
  out.scenario = cfg.scenario;
  out.name = cfg.name;
  for (const ValidationIssue& issue : v.issues) {
    if (issue.fatal) throw std::runtime_error("config: " + issue.message);
    out.warnings.push_back(issue.message);
  }

  json data = json::object();
  FileList files;
  if (cfg.scenario == "pauli-check") run_pauli(cfg, out, data, files);
  else if (cfg.scenario == "weyl-sweep") run_weyl_sweep(cfg, out, data, files);
  else if (cfg.scenario == "schrodinger-recovery") run_recovery(cfg, out, data, files);
  else if (cfg.scenario == "spectral-support") run_support(cfg, out, data, files);
  else if (cfg.scenario == "bandwidth-sweep") run_bandwidth(cfg, out, data, files);
  else if (cfg.scenario == "weak-convergence") run_weak(cfg, out, data, files);

  bool all = true;
  for (const CheckResult& c : out.checks) all = all && c.pass;
  out.exit_code = all ? 0 : 2;

  fs::create_directories(out_dir);
  json root = json::object();
  root["schema_version"] = 1;
  root["scenario"] = out.scenario;
  root["name"] = out.name;
  if (cfg.timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    root["generated_at"] = buf;
  }
  root["parameters"] = cfg.raw;
  json jchecks = json::array();
  for (const CheckResult& c : out.checks) {
    json jc = json::object();
    jc["name"] = c.name;
    jc["value"] = c.value;
    if (c.target) jc["target"] = *c.target;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    jc["detail"] = c.detail;
    jchecks.push_back(std::move(jc));
  }
  root["checks"] = std::move(jchecks);
  root["warnings"] = out.warnings;
  root["all_pass"] = all;
  root["data"] = std::move(data);

  write_text(fs::path(out_dir) / "results.json", root.dump(2) + "\n");
  write_text(fs::path(out_dir) / "summary.txt", summary_text(out));
  write_text(fs::path(out_dir) / "checks.csv", checks_csv(out));
  for (const auto& [name, content] : files) write_text(fs::path(out_dir) / name, content);
  return out;
}

}  // namespace pwak
