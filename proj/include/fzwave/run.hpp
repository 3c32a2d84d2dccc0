#pragma once

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fzwave/config.hpp"
#include "fzwave/diagnostics.hpp"
#include "fzwave/stress.hpp"

namespace fzwave {

struct CheckOutcome {
  std::string verdict;  // pass | fail | skipped
  double margin = 0.0;
  double tolerance = 0.0;
};

struct RunArtifacts {
  RunConfig cfg;
  ModalBasis basis;
  KernelTable table;
  InitialData data;
  LoadSpec load;
  ModalTrajectory traj;
  EnergyReport energy;
  std::vector<Snapshot> snaps;
  std::vector<StressSnapshot> stress;
  std::vector<std::pair<std::string, CheckOutcome>> checks;
  int exit_code = 0;
};

inline RunArtifacts execute_run(const RunConfig& rc) {
  RunArtifacts art;
  art.cfg = rc;
  art.basis = solve_eigenpairs(rc.model, rc.scheme.n_modes);
  art.data = realize_data(rc, art.basis);
  art.load = realize_load(rc.load, rc.model, art.basis);
  art.table = build_kernel_table(rc.model.alpha, 1.0, rc.scheme.dt,
                                 rc.scheme.n_steps());
  const ModalSource src = assemble_modal_source(
      art.data, art.load, rc.model, art.basis, art.table, rc.scheme.n_steps());
  art.traj = integrate(rc.model, art.basis, art.data, src, art.table,
                       rc.scheme);
  art.energy = energy_report(art.traj, art.data, art.load, rc.model, art.table);

  const std::vector<double> kappa0 = compute_kappa0(art.data, rc.model);
  try {
    art.snaps = reconstruct_fields(art.traj, rc.snapshot_times);
    art.stress = reconstruct_stress(art.traj, kappa0, rc.model,
                                    rc.snapshot_times);
  } catch (const std::invalid_argument& err) {
    config_error("output.snapshot_times", err.what());
  }

  const InequalityVerdict verdict = check_energy_inequality(art.energy, 1.01);
  art.checks.push_back({"energy_inequality",
                        {verdict.pass ? "pass" : "fail", verdict.max_ratio,
                         1.01}});

  double min_diss = 0.0;
  for (double d : art.energy.dissipation_lb) min_diss = std::min(min_diss, d);
  art.checks.push_back({"dissipation_nonnegative",
                        {min_diss >= -1e-12 ? "pass" : "fail", min_diss,
                         1e-12}});

  // The trapezoid scheme conserves the discrete energy only in the
  // memory-free limit tau = 1; otherwise the drift is reported but skipped.
  const double drift = conservation_drift(art.energy);
  const bool conservative = rc.model.tau == 1.0 &&
                            rc.scheme.scheme == TimeScheme::trapezoid &&
                            rc.load.preset == "zero";
  art.checks.push_back(
      {"conservation",
       {conservative ? (drift <= 1e-3 ? "pass" : "fail") : "skipped", drift,
        1e-3}});

  // Initial-stress attainment is exact only when the basis spans the whole
  // interior space; on truncated bases the defect is reported but skipped.
  const std::vector<double> s_eff = effective_stress(art.data, rc.model);
  const auto sig0 = reconstruct_stress(art.traj, kappa0, rc.model, {0.0});
  double defect = 0.0;
  for (int e = 0; e < rc.model.n_elements; ++e)
    defect = std::max(defect, std::abs(sig0[0].sigma[e] - s_eff[e]));
  const bool full_rank = rc.scheme.n_modes == rc.model.n_elements - 1;
  art.checks.push_back(
      {"stress_initial",
       {full_rank ? (defect <= 1e-12 ? "pass" : "fail") : "skipped", defect,
        1e-12}});

  for (const auto& [name, c] : art.checks)
    if (c.verdict == "fail") art.exit_code = 1;
  return art;
}

namespace run_detail {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_energy_csv(const RunArtifacts& art, const std::string& path) {
  std::ofstream out(path);
  out << "time,kinetic,strain_mu,strain_lambda,dissipation_lb,total,A_t,bound\n";
  const EnergyReport& r = art.energy;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    const double total = r.kinetic[k] + r.strain_mu[k] + r.strain_lambda[k];
    out << fmt(r.times[k]) << ',' << fmt(r.kinetic[k]) << ','
        << fmt(r.strain_mu[k]) << ',' << fmt(r.strain_lambda[k]) << ','
        << fmt(r.dissipation_lb[k]) << ',' << fmt(total) << ','
        << fmt(r.a_t[k]) << ',' << fmt(r.bound[k]) << '\n';
  }
}

// Fields are sampled at element midpoints so displacement, velocity, and
// strain share one abscissa.
inline void write_snapshots_csv(const RunArtifacts& art,
                                const std::string& path) {
  std::ofstream out(path);
  out << "time,x,u,u_dot,strain\n";
  const int n = art.cfg.model.n_elements;
  const double h = art.cfg.model.h();
  for (const Snapshot& s : art.snaps) {
    auto at = [&](const NodalField& f, int i) {
      return (i == 0 || i == n) ? 0.0 : f[i - 1];
    };
    for (int e = 0; e < n; ++e) {
      const double x = (e + 0.5) * h;
      const double u = 0.5 * (at(s.u, e) + at(s.u, e + 1));
      const double v = 0.5 * (at(s.u_dot, e) + at(s.u_dot, e + 1));
      out << fmt(s.time) << ',' << fmt(x) << ',' << fmt(u) << ',' << fmt(v)
          << ',' << fmt(s.strain[e]) << '\n';
    }
  }
}

inline void write_stress_csv(const RunArtifacts& art, const std::string& path) {
  std::ofstream out(path);
  out << "time,element_midpoint_x,sigma,hooke_part,memory_part,relaxation_part\n";
  const double h = art.cfg.model.h();
  for (const StressSnapshot& s : art.stress)
    for (int e = 0; e < art.cfg.model.n_elements; ++e)
      out << fmt(s.time) << ',' << fmt((e + 0.5) * h) << ',' << fmt(s.sigma[e])
          << ',' << fmt(s.hooke_part[e]) << ',' << fmt(s.memory_part[e]) << ','
          << fmt(s.relaxation_part[e]) << '\n';
}

inline json build_report(const RunArtifacts& art) {
  json rep;
  rep["schema"] = "fzwave-report/1";
  json meta;
  meta["tool"] = "fzwave";
  meta["seed"] = art.cfg.seed;
  meta["threads"] = worker_count(art.cfg.scheme.n_modes);
  meta["generated_at_unix"] = static_cast<long>(std::time(nullptr));
  rep["metadata"] = meta;
  rep["config"] = art.cfg.echo;
  json checks = json::object();
  for (const auto& [name, c] : art.checks) {
    json jc;
    jc["verdict"] = c.verdict;
    jc["margin"] = c.margin;
    jc["tolerance"] = c.tolerance;
    checks[name] = jc;
  }
  rep["checks"] = checks;
  const EnergyReport& r = art.energy;
  double peak = 0.0, peak_time = 0.0;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    const double total = r.kinetic[k] + r.strain_mu[k] + r.strain_lambda[k];
    if (total > peak) {
      peak = total;
      peak_time = r.times[k];
    }
  }
  json en;
  en["initial"] = r.kinetic.front() + r.strain_mu.front() +
                  r.strain_lambda.front();
  en["final"] = r.kinetic.back() + r.strain_mu.back() + r.strain_lambda.back();
  en["peak"] = peak;
  en["peak_time"] = peak_time;
  en["dissipation_final"] = r.dissipation_lb.back();
  en["bound_final"] = r.bound.back();
  rep["energy"] = en;
  rep["exit_code"] = art.exit_code;
  return rep;
}

}  // namespace run_detail

inline void write_outputs(const RunArtifacts& art) {
  namespace fs = std::filesystem;
  const fs::path dir(art.cfg.out_dir);
  fs::create_directories(dir);
  run_detail::write_energy_csv(art, (dir / "energy.csv").string());
  run_detail::write_snapshots_csv(art, (dir / "snapshots.csv").string());
  run_detail::write_stress_csv(art, (dir / "stress.csv").string());
  std::ofstream rep(dir / "report.json");
  rep << run_detail::build_report(art).dump(2) << '\n';
}

inline int run_command(const std::string& config_path, std::ostream& out,
                       std::ostream& err) {
  try {
    const RunConfig rc = load_run_config(config_path);
    const RunArtifacts art = execute_run(rc);
    write_outputs(art);
    for (const auto& [name, c] : art.checks)
      out << name << ": " << c.verdict << " (margin " << c.margin << ")\n";
    out << "outputs written to " << rc.out_dir << "\n";
    return art.exit_code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int study_command(const std::string& config_path, int levels,
                         std::ostream& out, std::ostream& err) {
  try {
    const RunConfig rc = load_run_config(config_path);
    if (levels < 1) throw std::invalid_argument("levels must be >= 1");
    if (levels == 1)
      err << "warning: a single refinement level yields no observed orders\n";

    const ModalBasis basis = solve_eigenpairs(rc.model, rc.scheme.n_modes);
    const InitialData data = realize_data(rc, basis);
    const LoadSpec load = realize_load(rc.load, rc.model, basis);

    struct Level {
      double dt = 0.0;
      double energy = 0.0;
      std::vector<double> beta_T, gamma_T;
    };
    std::vector<Level> rows(levels);
    for (int l = 0; l < levels; ++l) {
      SchemeConfig sc = rc.scheme;
      sc.dt = rc.scheme.dt / double(1 << l);
      const KernelTable table =
          build_kernel_table(rc.model.alpha, 1.0, sc.dt, sc.n_steps());
      const ModalSource src = assemble_modal_source(data, load, rc.model,
                                                    basis, table,
                                                    sc.n_steps());
      const ModalTrajectory traj =
          integrate(rc.model, basis, data, src, table, sc);
      const EnergyReport er =
          energy_report(traj, data, load, rc.model, table);
      rows[l].dt = sc.dt;
      rows[l].energy = er.kinetic.back() + er.strain_mu.back() +
                       er.strain_lambda.back();
      const int n = sc.n_steps();
      for (int m = 0; m < sc.n_modes; ++m) {
        rows[l].beta_T.push_back(traj.beta[m][n]);
        rows[l].gamma_T.push_back(traj.gamma[m][n]);
      }
    }

    auto field_gap = [](const std::vector<double>& a,
                        const std::vector<double>& b) {
      double s = 0.0;
      for (std::size_t m = 0; m < a.size(); ++m)
        s += (a[m] - b[m]) * (a[m] - b[m]);
      return std::sqrt(s);
    };
    std::vector<double> eu(levels, 0.0), ev(levels, 0.0), ee(levels, 0.0);
    for (int l = 1; l < levels; ++l) {
      eu[l] = field_gap(rows[l].beta_T, rows[l - 1].beta_T);
      ev[l] = field_gap(rows[l].gamma_T, rows[l - 1].gamma_T);
      ee[l] = std::abs(rows[l].energy - rows[l - 1].energy);
    }
    auto order = [](double coarse, double fine) {
      return fine > 0.0 ? std::log2(coarse / fine)
                        : std::numeric_limits<double>::quiet_NaN();
    };

    namespace fs = std::filesystem;
    fs::create_directories(rc.out_dir);
    std::ofstream csv(fs::path(rc.out_dir) / "study.csv");
    csv << "level,dt,energy,err_u,err_v,order_u,order_v\n";
    out << "level  dt            energy            order_u   order_v\n";
    for (int l = 0; l < levels; ++l) {
      csv << l << ',' << run_detail::fmt(rows[l].dt) << ','
          << run_detail::fmt(rows[l].energy) << ',';
      if (l >= 1)
        csv << run_detail::fmt(eu[l]) << ',' << run_detail::fmt(ev[l]);
      else
        csv << ',';
      csv << ',';
      char line[160];
      if (l >= 2) {
        const double ou = order(eu[l - 1], eu[l]);
        const double ov = order(ev[l - 1], ev[l]);
        csv << run_detail::fmt(ou) << ',' << run_detail::fmt(ov);
        std::snprintf(line, sizeof line, "%-6d %-13.6g %-17.10g %-9.3g %-9.3g",
                      l, rows[l].dt, rows[l].energy, ou, ov);
      } else {
        csv << ',';
        std::snprintf(line, sizeof line, "%-6d %-13.6g %-17.10g %-9s %-9s", l,
                      rows[l].dt, rows[l].energy, "-", "-");
      }
      csv << '\n';
      out << line << '\n';
    }
    out << "study table written to " << rc.out_dir << "/study.csv\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int table_mlf_command(double alpha, double gamma, double dt, int n,
                             std::ostream& out, std::ostream& err) {
  try {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    const KernelParams kp{alpha, gamma};
    out << "t,e,e_dot,e_int\n";
    for (int k = 0; k <= n; ++k) {
      const double t = k * dt;
      out << run_detail::fmt(t) << ',' << run_detail::fmt(e_kernel(t, kp))
          << ',';
      if (k == 0 && alpha < 1.0)
        out << "nan";  // the rate diverges like t^(alpha-1) at the origin
      else
        out << run_detail::fmt(e_kernel_derivative(t, kp));
      out << ',' << run_detail::fmt(e_kernel_integral(t, kp)) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int check_command(long seed, std::ostream& out, std::ostream& err) {
  try {
    std::mt19937 rng(static_cast<unsigned long>(seed));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    bool all_ok = true;

    int trials = 0, passed = 0;
    for (double alpha : {0.3, 0.7}) {
      const KernelTable table = build_kernel_table(alpha, 1.0, 0.01, 40);
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(40);
        for (auto& x : v) x = dist(rng);
        ++trials;
        if (lemma1_check(v, table, 40).pass) ++passed;
      }
    }
    out << "memory-positivity suite: " << passed << "/" << trials
        << " trials pass\n";
    all_ok = all_ok && passed == trials;

    bool rejected = false;
    try {
      KernelTable flipped = build_kernel_table(0.5, 1.0, 0.01, 10);
      for (auto& w : flipped.weights) w = -w;
      lemma1_check(std::vector<double>(10, 1.0), flipped, 10);
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
    out << "sign-flipped kernel control: "
        << (rejected ? "rejected" : "NOT rejected") << "\n";
    all_ok = all_ok && rejected;

    const double inf = std::numeric_limits<double>::infinity();
    const double triples[4][3] = {
        {1.0, 2.0, 2.0}, {1.0, 1.0, 1.0}, {2.0, 2.0, inf}, {1.0, inf, inf}};
    trials = 0;
    passed = 0;
    for (const auto& pq : triples)
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> f(20), g(20);
        for (auto& x : f) x = dist(rng);
        for (auto& x : g) x = dist(rng);
        ++trials;
        if (lemma2_check(f, g, 0.05, pq[0], pq[1], pq[2]).pass) ++passed;
      }
    out << "convolution-norm suite: " << passed << "/" << trials
        << " trials pass\n";
    all_ok = all_ok && passed == trials;

    rejected = false;
    try {
      lemma2_check(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0),
                   0.1, 1.0, 2.0, 3.0);
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
    out << "exponent-relation control: "
        << (rejected ? "rejected" : "NOT rejected") << "\n";
    all_ok = all_ok && rejected;

    out << (all_ok ? "all checks pass\n" : "checks FAILED\n");
    return all_ok ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fzwave
