// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "redset/redset.hpp"

#include "cli_runner.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace redset;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

int failures = 0;

void report(int id, const std::string& name, Outcome& o, double secs, double limit) {
  if (limit > 0 && secs > limit) o.require(false, "runtime " + fmt(secs) + " s over " + fmt(limit) + " s");
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << " (" << fmt(secs) << " s)"
            << o.detail.str() << std::endl;
  if (!o.pass) ++failures;
}

void criterion_elliptic() {
  const auto t0 = Clock::now();
  Outcome o;
  double worst = 0.0;
  for (double z : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999}) {
    auto f = [z](double k) { return std::sqrt(1.0 - z * z * std::sin(k) * std::sin(k)); };
    const double q =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi / 2, 15, 1e-15);
    worst = std::max(worst, std::abs(elliptic_E_agm(z) - q));
  }
  o.require(worst < 1e-11, "AGM vs quadrature");
  o.require(std::abs(elliptic_E_agm(0.0) - std::numbers::pi / 2) < 1e-13, "E(0) = pi/2");
  o.require(std::abs(elliptic_E_agm(1.0) - 1.0) < 1e-13, "E(1) = 1");
  o.detail << " max|AGM - quadrature| = " << fmt(worst);
  report(1, "elliptic integral", o, seconds_since(t0), 1.0);
}

void criterion_ode() {
  const auto t0 = Clock::now();
  Outcome o;
  double worst = 0.0, control_min = 1e300;
  for (int i = 1; i <= 18; ++i) {
    const double m = 0.05 * i;
    worst = std::max(worst, hypergeom_ode_residual(m, 1e-4));
    control_min = std::min(control_min, hypergeom_ode_residual(m, 1e-4, {0.5, 0.5, 1.0}));
  }
  o.require(worst < 1e-5, "residual < 1e-5");
  o.require(control_min > 1e-2, "wrong-constants control > 1e-2");
  o.detail << " max residual " << fmt(worst) << ", control min " << fmt(control_min);
  report(2, "hypergeometric ODE", o, seconds_since(t0), 1.0);
}

void criterion_zz() {
  const auto t0 = Clock::now();
  Outcome o;
  const double lb = open_chain_lower_bound(zz_model(), 12).value;
  const auto ub = mps_upper_bound_sequence(zz_model(), 2);
  o.require(std::abs(lb + 1.0) < 1e-9, "open chain N=12 = -1");
  o.require(std::abs(ub[0].value) < 1e-6, "MPS D=1 = 0");
  o.require(std::abs(ub[1].value + 1.0) < 1e-6, "MPS D=2 = -1");
  o.detail << " LB(12) " << format_real(lb) << ", UB(D=1) " << fmt(ub[0].value) << ", UB(D=2) "
           << format_real(ub[1].value);
  report(3, "ZZ battery", o, seconds_since(t0), 30.0);
}

// MPS sequences shared between criteria 4 and 6.
std::map<std::string, std::vector<MpsBound>> mps_cache;

const std::vector<MpsBound>& mps_sequence(const std::string& key, const PauliTwoBodyHamiltonian& h) {
  auto it = mps_cache.find(key);
  if (it == mps_cache.end()) it = mps_cache.emplace(key, mps_upper_bound_sequence(h, 4)).first;
  return it->second;
}

std::string xy_key(double g) { return "xy" + fmt(g); }

void criterion_xy_sandwich() {
  const auto t0 = Clock::now();
  Outcome o;
  const auto cal = calibrate_scale(default_calibration_gammas(), {14, 16});
  const double s = cal.s;
  o.detail << " s = " << format_real(s) << ";";
  std::vector<double> scales;
  for (double g : {0.0, 0.5, 0.9}) {
    const auto h = xy_hamiltonian(g);
    const double target = s * xy_energy_density_paper(g);
    const auto lb = open_chain_lower_bound(h, 14);
    const double ub = mps_sequence(xy_key(g), h).back().value;
    const std::string tag = "gamma=" + fmt(g);
    o.require(lb.value - lb.slack <= target, tag + " LB <= s eps");
    o.require(target <= ub, tag + " s eps <= UB");
    o.require(ub - lb.value < 0.08 * std::abs(target), tag + " gap < 8%");
    for (const auto& e : cal.entries) {
      if (e.gamma == g) scales.push_back(e.scale);
    }
    o.detail << " gamma " << fmt(g) << ": LB " << fmt(lb.value) << " <= " << fmt(target) << " <= UB " << fmt(ub)
             << " (gap " << fmt(100 * (ub - lb.value) / std::abs(target)) << "%);";
  }
  const auto [mn, mx] = std::minmax_element(scales.begin(), scales.end());
  o.require(scales.size() == 3 && (*mx - *mn) < 0.01 * std::abs(*mn), "per-gamma scales within 1%");
  o.detail << " per-gamma scale spread " << fmt((*mx - *mn) / std::abs(*mn));
  report(4, "XY sandwich", o, seconds_since(t0), 600.0);
}

void criterion_membership() {
  const auto t0 = Clock::now();
  Outcome o;
  const auto mixed = DensityMatrix::maximally_mixed(2, 2);
  for (int n = 2; n <= 5; ++n) {
    o.require(membership(mixed, n).status == MembershipStatus::Member, "I/4 Member at N=" + std::to_string(n));
  }
  const auto v01 = membership(DensityMatrix::pure(2, 2, basis_state(2, {0, 1})), 2);
  o.require(v01.status == MembershipStatus::NonMember && v01.iterations == 0, "|01><01| NonMember by precheck");
  CVector sv = CVector::Zero(4);
  sv(1) = 1.0;
  sv(2) = -1.0;
  const auto vs = membership(DensityMatrix::pure(2, 2, sv), 2);
  o.require(vs.status == MembershipStatus::NonMember && vs.distance_estimate > 1e-2, "singlet NonMember at N=2");
  int members = 0;
  for (std::uint64_t k = 1; k <= 10; ++k) {
    const int D = 1 + static_cast<int>(k % 3);
    const auto rho = two_site_reduced_state(UniformMPS::random(2, D, k));
    for (int n = 2; n <= 4; ++n) {
      const bool ok = membership(rho, n).status == MembershipStatus::Member;
      members += ok;
      o.require(ok, "MPS state " + std::to_string(k) + " Member at N=" + std::to_string(n));
    }
  }
  o.detail << " singlet distance " << fmt(vs.distance_estimate) << "; MPS states Member " << members << "/30";
  report(5, "membership oracle", o, seconds_since(t0), 300.0);
}

void criterion_hierarchy() {
  const auto t0 = Clock::now();
  Outcome o;
  struct Model {
    std::string key;
    PauliTwoBodyHamiltonian h;
  };
  const std::vector<Model> models{{"zz", zz_model()}, {"heisenberg", heisenberg_model()}, {xy_key(0.5), xy_hamiltonian(0.5)}};
  for (const auto& m : models) {
    BoundsReport rep;
    std::vector<LowerBoundCertificate> relax;
    for (int n = 2; n <= 5; ++n) relax.push_back(marginal_relaxation_bound(m.h, n));
    for (std::size_t i = 0; i + 1 < relax.size(); ++i) {
      o.require(relax[i + 1].value + relax[i + 1].slack >= relax[i].value - relax[i].slack,
                m.key + " relaxation monotone at N=" + std::to_string(relax[i + 1].n));
    }
    const auto& ub = mps_sequence(m.key, m.h);
    for (std::size_t i = 0; i + 1 < ub.size(); ++i) {
      o.require(ub[i + 1].value <= ub[i].value, m.key + " MPS monotone at D=" + std::to_string(i + 2));
    }
    for (const auto& r : relax) rep.add({m.key, {}, "marginal_relaxation", r.n, r.value, r.slack, 0, 0, BoundSide::lower});
    for (int n : {4, 8, 12}) {
      const auto b = open_chain_lower_bound(m.h, n);
      rep.add({m.key, {}, "open_chain", n, b.value, b.slack, 0, 0, BoundSide::lower});
      const auto rb = ring_lower_bound(m.h, n);
      rep.add({m.key, {}, "ring", n, rb.value, rb.slack, 0, 0, BoundSide::lower});
    }
    for (std::size_t i = 0; i < ub.size(); ++i) {
      rep.add({m.key, {}, "mps", static_cast<int>(i) + 1, ub[i].value, 0, 0, 0, BoundSide::upper});
    }
    const auto violation = rep.sandwich_violation();
    o.require(!violation, m.key + " sandwich: " + violation.value_or(""));
    // The gate must catch a lower bound placed above an upper bound.
    BoundsReport bad = rep;
    bad.add({m.key, {}, "open_chain", 99, ub.back().value + 1.0, 0, 0, 0, BoundSide::lower});
    o.require(bad.sandwich_violation().has_value(), m.key + " sandwich gate detects violation");
    o.detail << " " << m.key << ": relaxation";
    for (const auto& r : relax) o.detail << ' ' << fmt(r.value);
    o.detail << ", MPS";
    for (const auto& b : ub) o.detail << ' ' << fmt(b.value);
    o.detail << ';';
  }
  report(6, "hierarchy properties", o, seconds_since(t0), 0.0);
}

void criterion_probe() {
  const auto t0 = Clock::now();
  Outcome o;
  for (auto t : {ProbeTarget::control_x2, ProbeTarget::control_sqrt}) {
    const auto rows = probe_sweep(t, 2, 200, 0);
    o.require(!rows[0].result.relation_found, std::string(to_string(t)) + " no relation at D=1");
    o.require(rows[1].result.relation_found, std::string(to_string(t)) + " relation at D=2");
  }
  const auto rows = probe_sweep(ProbeTarget::eps_paper, 6, 200, 0);
  o.detail << " eps_paper sigma_min by D:";
  for (const auto& r : rows) {
    o.require(r.result.evidence_only, "evidence_only flag");
    o.require(!r.result.relation_found, "eps_paper no relation at D=" + std::to_string(r.result.degree));
    o.detail << ' ' << fmt(r.result.sigma_min) << (r.result.relation_found ? "*" : "");
  }
  report(7, "probe separation", o, seconds_since(t0), 60.0);
}

void criterion_reproducibility() {
  const auto t0 = Clock::now();
  Outcome o;
  const std::vector<std::string> runs{
      "bounds --model xy --gamma 0.5 --open-n 4:8 --ring-n 4:6 --marginal-n 2:3 --mps-d 1:2 --restarts 4 --seed 7",
      "bounds --model heisenberg --open-n 6 --mps-d 1:3 --restarts 3 --seed 11",
      "probe --target eps_paper --dmax 4",
      "calibrate --gammas 0.5,0.9 --n-list 8,10"};
  for (const auto& args : runs) {
    const auto a = run_cli(args, "REDSET_THREADS=1");
    const auto b = run_cli(args, "REDSET_THREADS=1");
    const auto c = run_cli(args, "REDSET_THREADS=4");
    const auto body = csv_body(a.out);
    const std::string cmd = args.substr(0, args.find(' '));
    o.require(a.exit_code == 0 && b.exit_code == 0 && c.exit_code == 0, cmd + " exit codes");
    o.require(count_lines(body) > 1, cmd + " produced rows");
    o.require(body == csv_body(b.out), cmd + " identical across runs");
    o.require(body == csv_body(c.out), cmd + " identical for REDSET_THREADS 1 and 4");
  }
  o.detail << " " << runs.size() << " commands x 3 runs";
  report(8, "reproducibility", o, seconds_since(t0), 0.0);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion_elliptic,  criterion_ode,        criterion_zz,
                                                    criterion_xy_sandwich, criterion_membership, criterion_hierarchy,
                                                    criterion_probe,     criterion_reproducibility};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      std::cout << "FAIL  " << i + 1 << ". raised: " << e.what() << std::endl;
      ++failures;
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures;
}
