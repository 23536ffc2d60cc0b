// redset: bounds on ground-state energy densities of translation-invariant
// spin chains, membership queries, the exact XY oracle and the relation probe.
//
// Exit codes: 0 ok, 1 NonMember, 2 Undecided, 3 input error, 4 invariant
// violation or internal failure.

#include "redset/redset.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace redset;

constexpr int kExitOk = 0;
constexpr int kExitNonMember = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitInput = 3;
constexpr int kExitInvariant = 4;

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "a:b" (inclusive) or "a,b,c"; empty string means none.
std::vector<int> parse_int_range(const std::string& spec, const std::string& flag) {
  std::vector<int> out;
  if (spec.empty()) return out;
  try {
    if (auto colon = spec.find(':'); colon != std::string::npos) {
      const int a = std::stoi(spec.substr(0, colon));
      const int b = std::stoi(spec.substr(colon + 1));
      if (b < a) throw InputError(flag + ": empty range '" + spec + "'");
      for (int v = a; v <= b; ++v) out.push_back(v);
      return out;
    }
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  } catch (const std::logic_error&) {
    throw InputError(flag + ": cannot parse '" + spec + "'");
  }
  return out;
}

/// "a:b:step" (inclusive of b up to rounding) or "a,b,c".
std::vector<double> parse_real_grid(const std::string& spec, const std::string& flag) {
  std::vector<double> out;
  try {
    std::vector<std::string> parts;
    const char sep = spec.find(':') != std::string::npos ? ':' : ',';
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, sep)) parts.push_back(tok);
    if (sep == ',') {
      for (const auto& p : parts) out.push_back(std::stod(p));
      return out;
    }
    if (parts.size() != 3) throw InputError(flag + ": expected start:stop:step");
    const double a = std::stod(parts[0]), b = std::stod(parts[1]), h = std::stod(parts[2]);
    if (!(h > 0.0) || b < a) throw InputError(flag + ": bad grid '" + spec + "'");
    const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9)) + 1;
    if (count > 100000) throw InputError(flag + ": grid too large");
    for (long k = 0; k < count; ++k) out.push_back(a + static_cast<double>(k) * h);
  } catch (const std::logic_error&) {
    throw InputError(flag + ": cannot parse '" + spec + "'");
  }
  return out;
}

void check_caps(const std::vector<int>& values, int lo, int hi, const std::string& flag) {
  for (int v : values) {
    if (v < lo || v > hi) {
      throw InputError(flag + ": " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
    }
  }
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

/// Writes to the named file, or stdout when the path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct ModelSpec {
  std::string kind = "zz";
  double gamma = 0.0;
  std::string file;

  PauliTwoBodyHamiltonian hamiltonian() const {
    if (kind == "zz") return zz_model();
    if (kind == "heisenberg") return heisenberg_model();
    if (kind == "xy") {
      if (!(std::abs(gamma) <= 1.0)) throw InputError("--gamma must satisfy |gamma| <= 1");
      return xy_hamiltonian(gamma);
    }
    if (kind == "file") {
      if (file.empty()) throw InputError("--model file needs --hamiltonian");
      return read_hamiltonian_file(file);
    }
    throw InputError("unknown model '" + kind + "'");
  }
  std::string name() const { return kind == "file" ? "file:" + file : kind; }
  std::optional<double> gamma_column() const { return kind == "xy" ? std::optional<double>(gamma) : std::nullopt; }
};

// ---------------------------------------------------------------- bounds

struct BoundsConfig {
  ModelSpec model;
  std::string open_n = "", ring_n = "", marginal_n = "", mps_d = "";
  int restarts = 16;
  std::uint64_t seed = 1;
  std::string output;
  std::string tensors_out;
  bool timings = false;
};

int cmd_bounds(const BoundsConfig& cfg) {
  const auto h = cfg.model.hamiltonian();
  const auto open_n = parse_int_range(cfg.open_n, "--open-n");
  const auto ring_n = parse_int_range(cfg.ring_n, "--ring-n");
  const auto marg_n = parse_int_range(cfg.marginal_n, "--marginal-n");
  const auto mps_d = parse_int_range(cfg.mps_d, "--mps-d");
  check_caps(open_n, 3, kMaxChainSites, "--open-n");
  check_caps(ring_n, 3, kMaxChainSites, "--ring-n");
  check_caps(marg_n, 2, 6, "--marginal-n");
  check_caps(mps_d, 1, 8, "--mps-d");
  if (cfg.restarts < 1) throw InputError("--restarts must be >= 1");

  using Clock = std::chrono::steady_clock;
  struct Cell {
    LowerBoundMethod method;
    int n;
  };
  std::vector<Cell> cells;
  for (int n : open_n) cells.push_back({LowerBoundMethod::open_chain, n});
  for (int n : ring_n) cells.push_back({LowerBoundMethod::ring, n});
  for (int n : marg_n) cells.push_back({LowerBoundMethod::marginal_relaxation, n});

  std::vector<BoundsRow> lower(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const auto t0 = Clock::now();
    ChainBoundOptions copt;
    copt.seed = cfg.seed;
    LowerBoundCertificate c;
    switch (cells[i].method) {
      case LowerBoundMethod::open_chain: c = open_chain_lower_bound(h, cells[i].n, copt); break;
      case LowerBoundMethod::ring: c = ring_lower_bound(h, cells[i].n, copt); break;
      case LowerBoundMethod::marginal_relaxation: c = marginal_relaxation_bound(h, cells[i].n); break;
    }
    lower[i] = {cfg.model.name(), cfg.model.gamma_column(), to_string(c.method), c.n, c.value, c.slack,
                std::chrono::duration<double>(Clock::now() - t0).count(), cfg.seed, BoundSide::lower};
  });

  BoundsReport report;
  for (auto& r : lower) report.add(std::move(r));

  nlohmann::json tensors = nlohmann::json::object();
  if (!mps_d.empty()) {
    const int dmax = *std::max_element(mps_d.begin(), mps_d.end());
    MpsOptions mopt;
    mopt.restarts = cfg.restarts;
    mopt.seed = cfg.seed;
    const auto t0 = Clock::now();
    const auto seq = mps_upper_bound_sequence(h, dmax, mopt);
    const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    for (int D : mps_d) {
      const auto& b = seq[static_cast<std::size_t>(D - 1)];
      report.add({cfg.model.name(), cfg.model.gamma_column(), "mps", D, b.value, 0.0, seconds, cfg.seed,
                  BoundSide::upper});
      auto entry = mps_to_json(b.tensors);
      entry["value"] = b.value;
      entry["restart"] = b.restart;
      tensors[std::to_string(D)] = std::move(entry);
    }
  }

  report.sort();
  if (auto violation = report.sandwich_violation()) throw InvariantViolation("sandwich violated: " + *violation);

  Output out(cfg.output);
  write_comment_header(out.stream(),
                       {{"command", "bounds"},
                        {"config", "model=" + cfg.model.name() +
                                       (cfg.model.kind == "xy" ? " gamma=" + format_real(cfg.model.gamma) : "") +
                                       " open_n=" + join(open_n) + " ring_n=" + join(ring_n) +
                                       " marginal_n=" + join(marg_n) + " mps_d=" + join(mps_d) +
                                       " restarts=" + std::to_string(cfg.restarts) +
                                       " timings=" + (cfg.timings ? "true" : "false")},
                        {"seed", std::to_string(cfg.seed)}});
  report.write_body(out.stream(), cfg.timings);

  if (!cfg.tensors_out.empty()) {
    std::ofstream tf(cfg.tensors_out);
    if (!tf) throw InputError("cannot write " + cfg.tensors_out);
    tf << tensors.dump(2) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- membership

struct MembershipConfig {
  std::string state;
  int n = 2;
  FeasibilityOptions feas;
  std::string witness;
};

int cmd_membership(const MembershipConfig& cfg) {
  const auto rho = read_density_file(cfg.state);
  if (rho.sites() != 2) throw InputError("membership needs a two-site state");
  if (cfg.n < 2) throw InputError("--n must be >= 2");
  if (cfg.n + 1 > 8) throw InputError("--n too large: at most 8 sites");
  const auto v = membership(rho, cfg.n, cfg.feas);
  nlohmann::json j;
  j["status"] = to_string(v.status);
  j["distance"] = v.distance_estimate;
  j["iterations"] = v.iterations;
  j["N"] = cfg.n;
  if (v.witness && !cfg.witness.empty()) {
    write_density_file(cfg.witness, v.witness->op());
    j["witness_path"] = cfg.witness;
  }
  std::cout << j.dump() << '\n';
  switch (v.status) {
    case MembershipStatus::Member: return kExitOk;
    case MembershipStatus::NonMember: return kExitNonMember;
    case MembershipStatus::Undecided: return kExitUndecided;
  }
  return kExitInvariant;
}

// ---------------------------------------------------------------- xy family

std::vector<int> default_calibration_n() { return {14, 16}; }

int cmd_xy(const std::string& grid, std::optional<double> scale, const std::string& output) {
  const auto gammas = parse_real_grid(grid, "--gamma-grid");
  for (double g : gammas) {
    if (!(std::abs(g) <= 1.0 + 1e-12)) throw InputError("--gamma-grid: |gamma| must be <= 1");
  }
  std::string origin = "given";
  double s = 0.0;
  if (scale) {
    s = *scale;
  } else {
    const auto cal = calibrate_scale(default_calibration_gammas(), default_calibration_n());
    s = cal.s;
    origin = std::string("calibrated") + (cal.reliable ? "" : " (unreliable)");
  }
  Output out(output);
  write_comment_header(out.stream(), {{"command", "xy"}, {"config", "gamma_grid=" + grid}, {"s", format_real(s) + " " + origin}});
  out.stream() << "gamma,E_of_z,eps_paper,eps_calibrated,s\n";
  for (double g : gammas) {
    g = std::max(-1.0, std::min(1.0, g));
    const auto p = xy_point(g, s);
    out.stream() << format_real(g) << ',' << format_real(elliptic_E_agm(std::sqrt(p.z_squared))) << ','
                 << format_real(p.eps_paper) << ',' << format_real(p.eps_calibrated) << ',' << format_real(s)
                 << '\n';
  }
  return kExitOk;
}

int cmd_ode_check(const std::string& grid, double step, HypergeometricParams params, const std::string& output) {
  const auto ms = parse_real_grid(grid, "--m-grid");
  if (!(step > 0.0)) throw InputError("--step must be positive");
  Output out(output);
  write_comment_header(out.stream(), {{"command", "ode-check"},
                                      {"config", "m_grid=" + grid + " step=" + format_real(step) +
                                                     " a=" + format_real(params.a) + " b=" + format_real(params.b) +
                                                     " c=" + format_real(params.c)}});
  out.stream() << "m,residual,step\n";
  for (double m : ms) {
    double r = 0.0;
    try {
      r = hypergeom_ode_residual(m, step, params);
    } catch (const std::domain_error& e) {
      throw InputError(e.what());
    }
    out.stream() << format_real(m) << ',' << format_real(r) << ',' << format_real(step) << '\n';
  }
  return kExitOk;
}

int cmd_calibrate(const std::string& gammas_spec, const std::string& n_spec, std::uint64_t seed,
                  const std::string& output) {
  const auto gammas = gammas_spec.empty() ? default_calibration_gammas() : parse_real_grid(gammas_spec, "--gammas");
  const auto ns = parse_int_range(n_spec, "--n-list");
  CalibrationResult cal;
  try {
    cal = calibrate_scale(gammas, ns, seed);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  Output out(output);
  write_comment_header(out.stream(), {{"command", "calibrate"},
                                      {"config", "gammas=" + (gammas_spec.empty() ? std::string("default") : gammas_spec) + " n_list=" + join(ns)},
                                      {"seed", std::to_string(seed)},
                                      {"s", format_real(cal.s)},
                                      {"max_residual", format_real(cal.max_residual)},
                                      {"reliable", cal.reliable ? "true" : "false"}});
  out.stream() << "gamma,ed_extrapolated,uncertainty,eps_paper,scale,residual\n";
  for (const auto& e : cal.entries) {
    out.stream() << format_real(e.gamma) << ',' << format_real(e.extrapolated) << ',' << format_real(e.uncertainty)
                 << ',' << format_real(e.eps_paper) << ',' << format_real(e.scale) << ',' << format_real(e.residual)
                 << '\n';
  }
  return kExitOk;
}

int cmd_probe(const std::string& target_name, int dmax, int samples, std::uint64_t seed, std::optional<double> scale,
              const std::string& output) {
  ProbeTarget target;
  try {
    target = probe_target_from_string(target_name);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (dmax < 1 || dmax > 12) throw InputError("--dmax must be in [1, 12]");
  double s = 1.0;
  if (target == ProbeTarget::eps_calibrated) {
    s = scale ? *scale : calibrate_scale(default_calibration_gammas(), default_calibration_n()).s;
  }
  std::vector<ProbeRow> rows;
  try {
    rows = probe_sweep(target, dmax, samples, seed, s);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const auto [lo, hi] = probe_interval(target);
  Output out(output);
  out.stream() << "# evidence_only=true\n";
  write_comment_header(out.stream(), {{"command", "probe"},
                                      {"config", "target=" + target_name + " dmax=" + std::to_string(dmax) +
                                                     " samples=" + std::to_string(samples) + " interval=[" +
                                                     format_real(lo) + "," + format_real(hi) + "]"},
                                      {"seed", std::to_string(seed)}});
  out.stream() << "target,D,sigma_min,residual_max,relation_found\n";
  for (const auto& r : rows) {
    out.stream() << to_string(r.target) << ',' << r.result.degree << ',' << format_real(r.result.sigma_min) << ','
                 << format_real(r.result.residual_max) << ',' << (r.result.relation_found ? "true" : "false") << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-sided bounds on ground-state energy densities of translation-invariant spin chains"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  BoundsConfig bcfg;
  auto* bounds = app.add_subcommand("bounds", "Lower (open chain, ring, marginal relaxation) and MPS upper bounds");
  bounds->add_option("--model", bcfg.model.kind, "zz, heisenberg, xy or file")->capture_default_str();
  bounds->add_option("--gamma", bcfg.model.gamma, "Anisotropy for --model xy")->capture_default_str();
  bounds->add_option("--hamiltonian", bcfg.model.file, "Hamiltonian JSON for --model file");
  bounds->add_option("--open-n", bcfg.open_n, "Open-chain sizes, a:b or list");
  bounds->add_option("--ring-n", bcfg.ring_n, "Ring sizes, a:b or list");
  bounds->add_option("--marginal-n", bcfg.marginal_n, "Marginal relaxation levels, a:b or list");
  bounds->add_option("--mps-d", bcfg.mps_d, "MPS bond dimensions, a:b or list");
  bounds->add_option("--restarts", bcfg.restarts, "Nelder-Mead restarts per bond dimension")->capture_default_str();
  bounds->add_option("--seed", bcfg.seed, "Seed")->capture_default_str();
  bounds->add_option("-o,--output", bcfg.output, "CSV output path (default stdout)");
  bounds->add_option("--tensors-out", bcfg.tensors_out, "Write optimal MPS tensors as JSON");
  bounds->add_flag("--timings", bcfg.timings, "Fill the seconds column");

  MembershipConfig mcfg;
  auto* mem = app.add_subcommand("membership", "Extendibility of a two-site state to N+1 sites");
  mem->add_option("--state", mcfg.state, "Density-matrix text file")->required();
  mem->add_option("--n", mcfg.n, "Level N")->capture_default_str();
  mem->add_option("--tol-feas", mcfg.feas.tol_feas)->capture_default_str();
  mem->add_option("--tol-reject", mcfg.feas.tol_reject)->capture_default_str();
  mem->add_option("--max-iter", mcfg.feas.max_iter)->capture_default_str();
  mem->add_option("--witness", mcfg.witness, "Write the extension here when Member");

  std::string xy_grid = "0:1:0.1", xy_output;
  std::optional<double> xy_scale;
  auto* xy = app.add_subcommand("xy", "Exact XY energy density on a gamma grid");
  xy->add_option("--gamma-grid", xy_grid, "start:stop:step or list")->capture_default_str();
  xy->add_option("--scale", xy_scale, "Scale s (default: calibrated against exact diagonalization)");
  xy->add_option("-o,--output", xy_output);

  std::string ode_grid = "0.05:0.9:0.05", ode_output;
  double ode_step = 1e-4;
  HypergeometricParams ode_params;
  auto* ode = app.add_subcommand("ode-check", "Finite-difference residual of the hypergeometric ODE");
  ode->add_option("--m-grid", ode_grid)->capture_default_str();
  ode->add_option("--step", ode_step)->capture_default_str();
  ode->add_option("--a", ode_params.a)->capture_default_str();
  ode->add_option("--b", ode_params.b)->capture_default_str();
  ode->add_option("--c", ode_params.c)->capture_default_str();
  ode->add_option("-o,--output", ode_output);

  std::string cal_gammas, cal_n = "14,16", cal_output;
  std::uint64_t cal_seed = 1;
  auto* cal = app.add_subcommand("calibrate", "Fit the scale s against exact diagonalization of rings");
  cal->add_option("--gammas", cal_gammas, "Gamma list or grid (default 0,0.2,0.4,0.5,0.6,0.8,0.9)");
  cal->add_option("--n-list", cal_n, "Even ring sizes")->capture_default_str();
  cal->add_option("--seed", cal_seed)->capture_default_str();
  cal->add_option("-o,--output", cal_output);

  std::string probe_target = "eps_paper", probe_output;
  int probe_dmax = 6, probe_samples = 200;
  std::uint64_t probe_seed = 0;
  std::optional<double> probe_scale;
  auto* probe = app.add_subcommand("probe", "Search for low-degree polynomial relations (evidence only)");
  probe->add_option("--target", probe_target,
                    "eps_paper, eps_calibrated, control_x2, control_sqrt or control_exp")->capture_default_str();
  probe->add_option("--dmax", probe_dmax)->capture_default_str();
  probe->add_option("--samples", probe_samples)->capture_default_str();
  probe->add_option("--seed", probe_seed, "0 gives classical Chebyshev nodes")->capture_default_str();
  probe->add_option("--scale", probe_scale, "Scale for eps_calibrated");
  probe->add_option("-o,--output", probe_output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*bounds) return cmd_bounds(bcfg);
    if (*mem) return cmd_membership(mcfg);
    if (*xy) return cmd_xy(xy_grid, xy_scale, xy_output);
    if (*ode) return cmd_ode_check(ode_grid, ode_step, ode_params, ode_output);
    if (*cal) return cmd_calibrate(cal_gammas, cal_n, cal_seed, cal_output);
    if (*probe) return cmd_probe(probe_target, probe_dmax, probe_samples, probe_seed, probe_scale, probe_output);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitInvariant;
}
