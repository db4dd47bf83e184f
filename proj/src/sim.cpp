#include "flexsim/sim.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

namespace flexsim {

namespace {

constexpr std::array<const char*, 5> kParamNames{"rhoA", "Ib22", "Ib33", "EIy", "EIz"};
constexpr std::array<const char*, 6> kTwistNames{"wx", "wy", "wz", "vx", "vy", "vz"};

char axis_letter(int a) { return "xyz"[a]; }

class CsvWriter {
 public:
  CsvWriter() = default;
  void open(const std::filesystem::path& path, const std::string& schema, const std::vector<std::string>& cols) {
    out_.open(path, std::ios::binary);
    if (!out_) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    fmt::format_to(std::back_inserter(buf_), "# schema: {}\n{}\n", schema, fmt::join(cols, ","));
  }
  bool is_open() const { return out_.is_open(); }
  void row(const std::vector<double>& values) {
    if (!out_.is_open()) return;
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) buf_.push_back(',');
      fmt::format_to(std::back_inserter(buf_), "{}", values[i]);
    }
    buf_.push_back('\n');
    if (buf_.size() > (1u << 20)) flush();
  }
  void flush() {
    if (!out_.is_open()) return;
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
    out_.flush();
  }

 private:
  std::ofstream out_;
  fmt::memory_buffer buf_;
};

struct AdaptChannels {
  Vec5 Gamma = Vec5::Zero();
  Mat95 Ybar = Mat95::Zero();
};

AdaptChannels adaptation_channels(const LinkModel& link, const LinkMotion& x, const Evaluation& ev, int i,
                                  const Mat6& M_true, const Vec3& g, const Vec5& s_hat, double noise,
                                  std::mt19937_64& rng) {
  const Twist& Vdot = ev.Vdot[i];
  Vec6 lhs = M_true * Vdot + bias_Hc(link, x, g);
  Vec3 z = measured_strain_channel(link, x, Vdot, ev.qdd[i], ev.Q_J[i], g);
  if (noise > 0.0) {
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int k = 0; k < 6; ++k) lhs[k] += noise * std::abs(lhs[k]) * nd(rng);
    for (int k = 0; k < 3; ++k) z[k] += noise * std::abs(z[k]) * nd(rng);
  }
  const RegressorV rv = regressor_V(link, x, Vdot, g);
  const Mat32 Yxi = regressor_xi(link, x.q);
  const Residuals r = residuals(rv.Y, rv.y0, lhs, Yxi, z, s_hat);
  return {lumped_gamma(rv.Y, r.eps_V, Yxi, r.eps_xi), stacked_regressor(rv.Y, Yxi)};
}

double window_max(const std::vector<double>& t, const std::vector<double>& v, double a, double b) {
  double m = 0.0;
  for (size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= a && t[k] <= b) m = std::max(m, v[k]);
  }
  return m;
}

}  // namespace

std::vector<std::string> log_columns(const Chain& chain) {
  std::vector<std::string> c{"t"};
  const int nl = chain.n_links();
  for (int i = 1; i <= nl; ++i) {
    for (const char* n : kTwistNames) c.push_back(fmt::format("V{}_{}", i, n));
  }
  for (int i = 1; i <= nl; ++i) {
    for (const char* n : kTwistNames) c.push_back(fmt::format("eV{}_{}", i, n));
  }
  for (const char* suffix : {"", "_d"}) {
    for (const char* n : {"theta1y", "theta1z", "theta2z"}) c.push_back(fmt::format("{}{}", n, suffix));
  }
  for (size_t j = 0; j < chain.joints.size(); ++j) {
    const JointSpec& js = chain.joints[j];
    for (int m = 0; m < 3; ++m) {
      if (!js.free[m]) continue;
      const char a = axis_letter(js.sequence[m]);
      c.push_back(fmt::format("q{}{}", j + 1, a));
      c.push_back(fmt::format("q{}{}_d", j + 1, a));
      c.push_back(fmt::format("tau{}{}", j + 1, a));
    }
  }
  for (int i = 1; i <= nl; ++i) {
    for (int a = 0; a < 3; ++a) c.push_back(fmt::format("tip{}_{}", i, axis_letter(a)));
  }
  for (int i = 1; i <= nl; ++i) {
    for (const char* n : kParamNames) c.push_back(fmt::format("shat{}_{}", i, n));
    for (const char* n : kParamNames) c.push_back(fmt::format("es{}_{}", i, n));
  }
  for (int i = 1; i <= nl; ++i) {
    c.push_back(fmt::format("nu{}", i));
    c.push_back(fmt::format("nua{}", i));
    c.push_back(fmt::format("p{}", i));
    c.push_back(fmt::format("E{}", i));
    c.push_back(fmt::format("pe{}", i));
  }
  for (const char* n : {"V", "Va", "sum_p", "residual", "cond", "tracking_error"}) c.push_back(n);
  return c;
}

int auto_substeps(const Chain& chain, double dt) {
  double w = 0.0;
  for (const auto& l : chain.links) {
    if (l.n() > 0) w = std::max(w, std::sqrt(l.basis.omega_sq().maxCoeff()));
  }
  return std::max(1, static_cast<int>(std::ceil(dt * w / kStepFrequencyLimit)));
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
  if (auto errs = validate_scenario(cfg); !errs.empty()) throw ConfigError(errs);
  const auto wall0 = std::chrono::steady_clock::now();

  const Chain chain = build_chain(cfg);
  const GainSet gains = build_gains(cfg);
  const TrajectorySpec traj = effective_trajectory(cfg);
  const int nl = chain.n_links();
  const int nj = static_cast<int>(chain.joints.size());
  const bool adaptive = cfg.controller == ControllerKind::SlpcAdaptive;
  const Vec3 g = chain.g_eq;
  const double dt = cfg.dt;

  RunResult result;
  RunSummary& sum = result.summary;
  RunTrace& tr = result.trace;
  sum.name = cfg.name;
  sum.controller = controller_name(cfg.controller);
  sum.seed = cfg.seed;
  sum.dt = dt;
  sum.t_f = cfg.t_f;
  sum.envelope_t0 = 3.0 * traj.tau_blend;
  sum.peak_tip_deformation.assign(nl, Vec3::Zero());
  tr.elastic_energy.resize(nl);
  tr.tip_deformation.resize(nl);
  tr.s_hat.resize(nl);
  tr.pe_lambda_min.resize(nl);

  std::vector<Mat6> M(nl);
  for (int i = 0; i < nl; ++i) {
    M[i] = inertia_matrix(chain.links[i]);
    sum.alpha.push_back(lyapunov(Twist::Zero(), M[i], gains.K[i]).alpha);
  }
  const std::vector<Vec5> s_true = true_parameters(chain);
  std::vector<AdaptState> adapt = initial_adaptation(cfg, chain);
  if (!adaptive) {
    for (int i = 0; i < nl; ++i) adapt[i].s_hat = s_true[i];
  }
  const double pe_window = cfg.adaptation.pe_window > 0.0 ? cfg.adaptation.pe_window
                                                          : 2.0 * std::numbers::pi / traj.omega_d;
  std::vector<PeGramian> pe(nl, PeGramian(pe_window, dt));
  std::mt19937_64 rng(cfg.seed);

  VecX free_d = scenario_to_free(chain, cfg.initial_angles);
  ChainState s = initial_state(chain, joint_angles_from_free(chain, free_d));
  TwistRateEstimator rate_est(dt);
  const int substeps = cfg.substeps > 0 ? cfg.substeps : auto_substeps(chain, dt);
  const double h = dt / substeps;
  sum.substeps = substeps;
  const double rate_gain = -std::expm1(-cfg.deflection_rate_cutoff * dt);
  Vec3 delta_dot_f = Vec3::Zero();

  CsvWriter log, defo;
  std::filesystem::path out_dir;
  if (!opt.out_dir.empty()) {
    out_dir = opt.out_dir;
    std::filesystem::create_directories(out_dir);
    log.open(out_dir / "log.csv", kLogSchema, log_columns(chain));
    defo.open(out_dir / "deformation.csv", kDeformationSchema, {"t", "link", "xi", "rx", "ry", "rz"});
  }
  const long n_steps = std::lround(cfg.t_f / dt);
  const long defo_stride = std::max(1L, std::lround(cfg.deformation_interval / dt));

  std::vector<double> Vdot_d_max(nl, 0.0);
  double omega_max = 0.0, v_max = 0.0, q_max = 0.0;
  double rms_acc = 0.0;
  long rms_n = 0;
  std::vector<double> row;

  try {
    for (long k = 0; k < n_steps; ++k) {
      const double t = k * dt;
      s.t = t;

      // Reference.
      Deflection defl = deflection_estimate(chain, s);
      if (cfg.deflection_rate_cutoff > 0.0) {
        if (k == 0) delta_dot_f = defl.delta_dot;
        delta_dot_f += rate_gain * (defl.delta_dot - delta_dot_f);
        defl.delta_dot = delta_dot_f;
      }
      AngleReference ar = corrected_joint_reference(traj, defl, t);
      // fdd_ref leaves out the measured deflection rate; only it is differentiated for the feedforward.
      VecX fdd, fdd_ref;
      if (cfg.ik == IkMode::ClosedForm) {
        free_d = scenario_to_free(chain, ar.q);
        fdd = scenario_to_free(chain, ar.qd);
        fdd_ref = scenario_to_free(chain, corrected_joint_reference(traj, {defl.delta, Vec3::Zero()}, t).qd);
      } else {
        const EndpointSample e = endpoint_reference(traj, t);
        fdd = general_joint_rates(chain, free_d, e.pdot - defl.delta_dot);
        fdd_ref = general_joint_rates(chain, free_d, e.pdot);
        ar.q = free_to_scenario(chain, free_d);
        ar.qd = free_to_scenario(chain, fdd);
      }
      const std::vector<Twist> Vd = desired_twists(chain, s, fdd);
      const std::vector<Vec6> Vdd = rate_est.push(desired_twists(chain, s, fdd_ref, false));

      // Control.
      std::vector<LinkMotion> x(nl);
      for (int i = 0; i < nl; ++i) x[i] = s.links[i].motion();
      ChainInputs in = zero_inputs(chain);
      if (cfg.controller == ControllerKind::Pd) {
        const VecX f = free_coordinates(chain, s);
        const VecX fr = free_coordinate_rates(chain, s);
        const VecX tau = saturate(pd_joint(free_d, f, fdd, fr, gains.Kp, gains.Kd), gains.saturation);
        int idx = 0;
        for (int j = 0; j < nj; ++j) {
          const int n = chain.joints[j].n_free();
          in.joint_torques[j] = tau.segment(idx, n);
          idx += n;
        }
      } else {
        std::vector<Wrench> W(nl);
        for (int i = 0; i < nl; ++i) {
          switch (cfg.controller) {
            case ControllerKind::Slpc:
              W[i] = slpc_nominal(chain.links[i], x[i], g, Vd[i], Vdd[i], gains.K[i]);
              break;
            case ControllerKind::SlpcAdaptive:
              W[i] = slpc_adaptive(chain.links[i], DynParams::from_vec(adapt[i].s_hat), x[i], g, Vd[i], Vdd[i],
                                   gains.K[i]);
              break;
            default:
              W[i] = ptc(Vd[i], s.links[i].V, gains.K[i]);
          }
        }
        in.joint_torques = wrench_to_actuation(chain, s, W, gains.saturation).torques;
      }

      // Plant and shadow evaluation along the desired twists.
      StepResult step = solve_constrained_step(chain, s, in, h);
      for (int m = 1; m < substeps; ++m) step.next = solve_constrained_step(chain, step.next, in, h).next;
      const Evaluation& ev = step.eval;
      ChainState sd = s;
      for (int i = 0; i < nl; ++i) sd.links[i].V = Vd[i];
      const Evaluation evd = evaluate(chain, sd, in);

      std::vector<Twist> eV(nl);
      for (int i = 0; i < nl; ++i) eV[i] = Vd[i] - s.links[i].V;
      const PowerResiduals pr = power_residuals(chain, s, ev, evd, eV);
      const double tele_tol = 1e-6 * pr.max_abs + 1e-9;
      const double tele_ratio = std::abs(pr.sum) / tele_tol;
      sum.max_telescoping_ratio = std::max(sum.max_telescoping_ratio, tele_ratio);
      if (tele_ratio > 1.0) ++sum.telescoping_violations;

      // Monitors.
      const std::vector<Vec5> s_hat_now = [&] {
        std::vector<Vec5> v;
        for (const auto& a : adapt) v.push_back(a.s_hat);
        return v;
      }();
      double V_total = 0.0, Va_total = 0.0;
      std::vector<double> nu(nl), nua(nl), energy(nl), pe_now(nl, std::numeric_limits<double>::quiet_NaN());
      std::vector<Vec3> tip(nl);
      for (int i = 0; i < nl; ++i) {
        nu[i] = lyapunov(eV[i], M[i], gains.K[i]).nu;
        nua[i] = augmented_lyapunov(nu[i], s_true[i] - s_hat_now[i], adapt[i].Lambda);
        V_total += nu[i];
        Va_total += nua[i];
        const LinkModel& lm = chain.links[i];
        energy[i] = elastic_energy(lm.basis, s.links[i].q, s.links[i].qd, ang(s.links[i].V));
        tip[i] = lm.n() ? eval_deformation(lm.basis, s.links[i].q, lm.params.c).r[0] : Vec3::Zero();
        sum.peak_tip_deformation[i] = sum.peak_tip_deformation[i].cwiseMax(tip[i].cwiseAbs());
        Vdot_d_max[i] = std::max(Vdot_d_max[i], Vdd[i].norm());
        omega_max = std::max(omega_max, ang(s.links[i].V).cwiseAbs().maxCoeff());
        v_max = std::max(v_max, lin(s.links[i].V).cwiseAbs().maxCoeff());
        if (lm.n()) q_max = std::max(q_max, s.links[i].q.cwiseAbs().maxCoeff());
      }
      double residual = 0.0;
      for (const auto& r : ev.velocity_residual) {
        if (r.size()) residual = std::max(residual, r.cwiseAbs().maxCoeff());
      }
      sum.max_constraint_residual = std::max(sum.max_constraint_residual, residual);
      double max_tau = 0.0;
      for (const auto& tj : in.joint_torques) {
        if (tj.size()) max_tau = std::max(max_tau, tj.cwiseAbs().maxCoeff());
      }
      sum.max_abs_torque = std::max(sum.max_abs_torque, max_tau);
      sum.max_reference_condition = std::max(sum.max_reference_condition, ev.condition);

      const Vec3 theta = free_to_scenario(chain, free_coordinates(chain, s));
      const double track = (ar.q - theta).norm();
      sum.max_tracking_error = std::max(sum.max_tracking_error, track);
      if (t >= sum.rms_from) {
        rms_acc += track * track;
        ++rms_n;
      }

      // Adaptation, using the accelerations measured over this sample.
      if (adaptive) {
        for (int i = 0; i < nl; ++i) {
          const AdaptChannels ch = adaptation_channels(chain.links[i], x[i], ev, i, M[i], g, adapt[i].s_hat,
                                                       cfg.adaptation.noise, rng);
          pe[i].push(ch.Ybar);
          if (pe[i].ready()) pe_now[i] = pe[i].lambda_min();
          adapt[i] = update(adapt[i], ch.Gamma, ch.Ybar, dt);
        }
      }

      tr.t.push_back(t);
      tr.V_total.push_back(V_total);
      tr.Va_total.push_back(Va_total);
      tr.sum_p.push_back(pr.sum);
      tr.max_p.push_back(pr.max_abs);
      tr.constraint_residual.push_back(residual);
      tr.max_torque.push_back(max_tau);
      tr.tracking_error.push_back(track);
      for (int i = 0; i < nl; ++i) {
        tr.elastic_energy[i].push_back(energy[i]);
        tr.tip_deformation[i].push_back(tip[i]);
        tr.s_hat[i].push_back(s_hat_now[i]);
        tr.pe_lambda_min[i].push_back(pe_now[i]);
      }

      if (log.is_open() && k % cfg.decimation == 0) {
        row.clear();
        row.push_back(t);
        for (int i = 0; i < nl; ++i) row.insert(row.end(), s.links[i].V.data(), s.links[i].V.data() + 6);
        for (int i = 0; i < nl; ++i) row.insert(row.end(), eV[i].data(), eV[i].data() + 6);
        row.insert(row.end(), theta.data(), theta.data() + 3);
        row.insert(row.end(), ar.q.data(), ar.q.data() + 3);
        const VecX f = free_coordinates(chain, s);
        int idx = 0;
        for (int j = 0; j < nj; ++j) {
          for (int m = 0; m < chain.joints[j].n_free(); ++m, ++idx) {
            row.push_back(f[idx]);
            row.push_back(free_d[idx]);
            row.push_back(in.joint_torques[j][m]);
          }
        }
        for (int i = 0; i < nl; ++i) row.insert(row.end(), tip[i].data(), tip[i].data() + 3);
        for (int i = 0; i < nl; ++i) {
          row.insert(row.end(), s_hat_now[i].data(), s_hat_now[i].data() + 5);
          const Vec5 es = (s_hat_now[i] - s_true[i]).cwiseQuotient(s_true[i]);
          row.insert(row.end(), es.data(), es.data() + 5);
        }
        for (int i = 0; i < nl; ++i) {
          row.push_back(nu[i]);
          row.push_back(nua[i]);
          row.push_back(pr.p[i]);
          row.push_back(energy[i]);
          row.push_back(pe_now[i]);
        }
        row.push_back(V_total);
        row.push_back(Va_total);
        row.push_back(pr.sum);
        row.push_back(residual);
        row.push_back(ev.condition);
        row.push_back(track);
        log.row(row);
      }
      if (defo.is_open() && k % defo_stride == 0) {
        for (int i = 0; i < nl; ++i) {
          const LinkModel& lm = chain.links[i];
          for (int m = 0; m < cfg.deformation_points; ++m) {
            const double xi = lm.params.a + lm.params.l() * m / (cfg.deformation_points - 1);
            const Vec3 r = lm.n() ? eval_deformation(lm.basis, s.links[i].q, xi).r[0] : Vec3::Zero();
            defo.row({t, static_cast<double>(i + 1), xi, r.x(), r.y(), r.z()});
          }
        }
      }

      if (cfg.ik == IkMode::Pinv) free_d += dt * fdd;
      s = std::move(step.next);
      ++sum.samples;
    }
  } catch (const NumericalError& e) {
    sum.exit_code = 3;
    sum.error = e.what();
  }
  log.flush();
  defo.flush();

  // Run-level checks.
  if (rms_n > 0) sum.rms_tracking = std::sqrt(rms_acc / rms_n);
  const double e_begin = std::min(5.0, 0.2 * cfg.t_f);
  const double mid = 0.5 * (e_begin + cfg.t_f);
  for (int i = 0; i < nl; ++i) {
    const auto& E = tr.elastic_energy[i];
    sum.energy_max.push_back(E.empty() ? 0.0 : *std::max_element(E.begin(), E.end()));
    sum.energy_max_early.push_back(window_max(tr.t, E, e_begin, mid));
    sum.energy_max_late.push_back(window_max(tr.t, E, mid, cfg.t_f));
  }
  const double alpha_min = sum.alpha.empty() ? 0.0 : *std::min_element(sum.alpha.begin(), sum.alpha.end());
  sum.envelope_violations = decay_envelope_check(tr.t, tr.V_total, alpha_min, 0.0, sum.envelope_t0, 0.05).violations;

  if (adaptive) {
    AdaptiveSummary as;
    as.pe_active_begin = pe_window;
    as.pe_active_end = std::min(12.0, cfg.t_f);
    for (int i = 0; i < nl; ++i) {
      as.final_error.push_back((adapt[i].s_hat - s_true[i]).cwiseQuotient(s_true[i]));
      Vec5 t2 = Vec5::Zero(), t5 = Vec5::Zero(), t10 = Vec5::Zero();
      double pe_min = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < tr.t.size(); ++k) {
        const Vec5& sh = tr.s_hat[i][k];
        if ((sh.array() < adapt[i].bounds.lo.array()).any() || (sh.array() > adapt[i].bounds.hi.array()).any()) {
          as.bounds_respected = false;
        }
        const Vec5 err = (sh - s_true[i]).cwiseQuotient(s_true[i]).cwiseAbs();
        for (int p = 0; p < 5; ++p) {
          if (err[p] > 0.02) t2[p] = tr.t[k] + dt;
          if (err[p] > 0.05) t5[p] = tr.t[k] + dt;
          if (err[p] > 0.10) t10[p] = tr.t[k] + dt;
        }
        if (tr.t[k] >= as.pe_active_begin && tr.t[k] <= as.pe_active_end && !std::isnan(tr.pe_lambda_min[i][k])) {
          pe_min = std::min(pe_min, tr.pe_lambda_min[i][k]);
        }
      }
      as.settle_time_2.push_back(t2);
      as.settle_time_5.push_back(t5);
      as.settle_time_10.push_back(t10);
      as.pe_min_active.push_back(std::isfinite(pe_min) ? pe_min : 0.0);
    }
    if (opt.bound_constants && sum.exit_code == 0) {
      // Young's parameter epsilon = beta_i / 2, beta_i from the windowed Gramian.
      as.mu = std::numeric_limits<double>::infinity();
      for (int i = 0; i < nl; ++i) {
        const double beta = 2.0 * as.pe_min_active[i] / pe_window / adapt[i].Lambda.maxCoeff();
        const double eps = beta > 0.0 ? 0.5 * beta : 1.0;
        OperatingEnvelope env;
        env.omega_max = std::max(omega_max, 1e-3);
        env.v_max = std::max(v_max, 1e-3);
        env.q_max = std::max(q_max, 1e-6);
        env.seed = cfg.seed;
        const BoundConstants bc = adaptive_bound_constants(chain.links[i], gains.K[i], adapt[i].Lambda, Vdot_d_max[i],
                                                           adapt[i].bounds, g, env, eps);
        as.bounds_constants.push_back(bc);
        as.c_Q += bc.c_Q;
        as.mu = std::min(as.mu, beta > 0.0 ? std::min(sum.alpha[i], 0.5 * beta) : 0.0);
      }
      as.envelope_violations =
          decay_envelope_check(tr.t, tr.Va_total, as.mu, as.c_Q, sum.envelope_t0, 0.05).violations;
    }
    sum.adaptive = as;
  }

  sum.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  if (!out_dir.empty()) {
    std::ofstream js(out_dir / "summary.json");
    js << summary_json(sum) << "\n";
  }
  if (!opt.keep_trace) tr = RunTrace{};
  return result;
}

std::vector<RunResult> run_compare(const ScenarioConfig& cfg, const RunOptions& opt) {
  std::vector<RunResult> results(cfg.compare.size());
  std::vector<std::exception_ptr> errors(cfg.compare.size());
  std::vector<std::thread> threads;
  for (size_t r = 0; r < cfg.compare.size(); ++r) {
    threads.emplace_back([&, r] {
      try {
        ScenarioConfig c = cfg;
        c.controller = cfg.compare[r];
        c.compare.clear();
        c.name = fmt::format("{}-{}", cfg.name, controller_name(c.controller));
        RunOptions o = opt;
        if (!opt.out_dir.empty()) o.out_dir = (std::filesystem::path(opt.out_dir) / controller_name(c.controller)).string();
        results[r] = run_scenario(c, o);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::string summary_json(const RunSummary& s) {
  using nlohmann::json;
  auto vec = [](const auto& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json j;
  j["name"] = s.name;
  j["controller"] = s.controller;
  j["seed"] = s.seed;
  j["dt"] = s.dt;
  j["substeps"] = s.substeps;
  j["t_f"] = s.t_f;
  j["samples"] = s.samples;
  j["exit_code"] = s.exit_code;
  j["error"] = s.error;
  j["wall_time_s"] = s.wall_time;
  j["max_abs_torque"] = s.max_abs_torque;
  json tips = json::array();
  for (const auto& p : s.peak_tip_deformation) tips.push_back(vec(p));
  j["peak_tip_deformation"] = tips;
  j["elastic_energy_max"] = s.energy_max;
  j["elastic_energy_max_early"] = s.energy_max_early;
  j["elastic_energy_max_late"] = s.energy_max_late;
  j["max_constraint_residual"] = s.max_constraint_residual;
  j["telescoping_violations"] = s.telescoping_violations;
  j["max_telescoping_ratio"] = s.max_telescoping_ratio;
  j["alpha"] = s.alpha;
  j["envelope_violations"] = s.envelope_violations;
  j["envelope_t0"] = s.envelope_t0;
  j["rms_tracking"] = s.rms_tracking;
  j["rms_from"] = s.rms_from;
  j["max_tracking_error"] = s.max_tracking_error;
  j["max_condition"] = s.max_reference_condition;
  if (s.adaptive) {
    const AdaptiveSummary& a = *s.adaptive;
    json ja;
    auto rows = [&](const std::vector<Vec5>& v) {
      json arr = json::array();
      for (const auto& r : v) arr.push_back(vec(r));
      return arr;
    };
    ja["parameters"] = kParamNames;
    ja["final_error"] = rows(a.final_error);
    ja["settle_time_2pct"] = rows(a.settle_time_2);
    ja["settle_time_5pct"] = rows(a.settle_time_5);
    ja["settle_time_10pct"] = rows(a.settle_time_10);
    ja["bounds_respected"] = a.bounds_respected;
    ja["pe_min_active"] = a.pe_min_active;
    ja["pe_active_window"] = {a.pe_active_begin, a.pe_active_end};
    json bc = json::array();
    for (const auto& b : a.bounds_constants) bc.push_back({{"c_M", b.c_M}, {"c_H", b.c_H}, {"c_Q", b.c_Q}});
    ja["bound_constants"] = bc;
    ja["mu"] = a.mu;
    ja["c_Q"] = a.c_Q;
    ja["envelope_violations"] = a.envelope_violations;
    j["adaptive"] = ja;
  }
  return j.dump(2);
}

}  // namespace flexsim
