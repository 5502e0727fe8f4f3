#include "mfch/flow.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "mfch/billiard.hpp"

namespace mfch {

void variational_derivative(const FieldState& state, const Potential& pot,
                            const Solenoidal& V, const SpectralGrid& sg,
                            std::vector<double>& mu1, std::vector<double>& mu2) {
  if (!state.finite()) throw InvalidStateError("field contains non-finite values");
  const double eps = state.params.epsilon;
  const double eta1 = state.params.eta1, eta2 = state.params.eta2;
  const size_t nc = state.cells();
  std::vector<double> lap1, lap2;
  sg.laplacian(state.u1, lap1);
  sg.laplacian(state.u2, lap2);

  // G = eps^2 Lap u - grad W(u) + eps V(u)
  std::vector<double> G1(nc), G2(nc);
  std::vector<double> gw1(nc), gw2(nc);  // grad W, reused below
  std::vector<Mat2> hw(nc);
  std::vector<Mat2> jv(nc);
  for (size_t i = 0; i < nc; ++i) {
    Vec2 u(state.u1[i], state.u2[i]);
    EvalResult w = pot.eval_extended(u, 2);
    Vec2 vv = V.value(u);
    gw1[i] = w.grad[0];
    gw2[i] = w.grad[1];
    hw[i] = w.hess;
    jv[i] = V.jacobian(u);
    G1[i] = eps * eps * lap1[i] - w.grad[0] + eps * vv[0];
    G2[i] = eps * eps * lap2[i] - w.grad[1] + eps * vv[1];
  }

  std::vector<double> lg1, lg2;
  sg.laplacian(G1, lg1);
  sg.laplacian(G2, lg2);

  mu1.resize(nc);
  mu2.resize(nc);
  for (size_t i = 0; i < nc; ++i) {
    Vec2 G(G1[i], G2[i]);
    Vec2 a = hw[i] * G;
    Vec2 b = jv[i].transpose() * G;
    mu1[i] = eps * eps * lg1[i] - a[0] + eps * b[0] +
             eps * eps * (eps * eps * eta1 * lap1[i] - eta2 * gw1[i]);
    mu2[i] = eps * eps * lg2[i] - a[1] + eps * b[1] +
             eps * eps * (eps * eps * eta1 * lap2[i] - eta2 * gw2[i]);
  }
}

LayerSignal measure_layer(const FieldState& f, const LayerProbe& probe) {
  const int n = probe.samples;
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) {
    double th = 2 * kPi * j / n;
    Vec2 x = probe.center + probe.radius * Vec2(std::cos(th), std::sin(th));
    // bilinear periodic interpolation
    double fx = x[0] / f.dx(), fy = x[1] / f.dy();
    int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
    double tx = fx - ix, ty = fy - iy;
    auto at = [&](int a, int b, const std::vector<double>& u) {
      a = ((a % f.nx) + f.nx) % f.nx;
      b = ((b % f.ny) + f.ny) % f.ny;
      return u[static_cast<size_t>(b) * f.nx + a];
    };
    double v1 = (1 - tx) * (1 - ty) * at(ix, iy, f.u1) +
                tx * (1 - ty) * at(ix + 1, iy, f.u1) +
                (1 - tx) * ty * at(ix, iy + 1, f.u1) +
                tx * ty * at(ix + 1, iy + 1, f.u1);
    double v2 = (1 - tx) * (1 - ty) * at(ix, iy, f.u2) +
                tx * (1 - ty) * at(ix + 1, iy, f.u2) +
                (1 - tx) * ty * at(ix, iy + 1, f.u2) +
                tx * ty * at(ix + 1, iy + 1, f.u2);
    w[j] = probe.direction[0] * v1 + probe.direction[1] * v2;
  }
  LayerSignal sig;
  for (int k = 2; k <= probe.kmax; ++k) {
    double re = 0, im = 0;
    for (int j = 0; j < n; ++j) {
      double ph = 2 * kPi * k * j / n;
      re += w[j] * std::cos(ph);
      im -= w[j] * std::sin(ph);
    }
    double amp = 2 * std::hypot(re, im) / n;
    if (amp > sig.amplitude) {
      sig.amplitude = amp;
      sig.k_dominant = k;
    }
  }
  return sig;
}

Flow2D::Flow2D(FieldState init, const Potential& pot, const Solenoidal& V,
               SolverConfig cfg)
    : state_(std::move(init)),
      pot_(&pot),
      V_(&V),
      cfg_(cfg),
      sg_(state_.nx, state_.ny, state_.Lx, state_.Ly),
      dt_(cfg.dt) {
  rb_ = dynamic_cast<const RegularizedBilliard*>(pot_);
  if (cfg_.scheme == SolverConfig::Scheme::SemiImplicit) {
    sigma_ = 0;
  } else if (cfg_.sigma >= 0) {
    sigma_ = cfg_.sigma;
  } else {
    double lmax = 0;
    for (size_t i = 0; i < state_.cells(); ++i) {
      Vec2 u(state_.u1[i], state_.u2[i]);
      EvalResult w = pot_->eval_extended(u, 2);
      Eigen::SelfAdjointEigenSolver<Mat2> es(w.hess);
      lmax = std::max(lmax, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    sigma_ = 2 * lmax * lmax;
  }
  if (cfg_.dealias) {
    std::vector<std::complex<double>> h1, h2;
    sg_.forward(state_.u1, h1);
    sg_.forward(state_.u2, h2);
    sg_.dealias(h1);
    sg_.dealias(h2);
    sg_.inverse(h1, state_.u1);
    sg_.inverse(h2, state_.u2);
  }
  const double eps = state_.params.epsilon;
  double kmax2 = sg_.k2(sg_.nkx() - 1, state_.ny / 2);
  diag_.dt_max_reported =
      2.0 / std::max(1e-12, kmax2 * (2 * eps * eps * kmax2 * std::sqrt(sigma_ / 2) +
                                     sigma_));
  record();
}

double Flow2D::energy() const { return energy_full(state_, *pot_, *V_); }

void Flow2D::record() {
  diag_.t.push_back(state_.time);
  diag_.energy.push_back(energy());
  Vec2 m = state_.mass();
  diag_.mass1.push_back(m[0]);
  diag_.mass2.push_back(m[1]);
  diag_.maxu.push_back(state_.max_abs());
  if (probe_inner_) {
    auto s = measure_layer(state_, *probe_inner_);
    diag_.amp_inner.push_back(s.amplitude);
    diag_.k_inner.push_back(s.k_dominant);
  }
  if (probe_outer_) {
    auto s = measure_layer(state_, *probe_outer_);
    diag_.amp_outer.push_back(s.amplitude);
    diag_.k_outer.push_back(s.k_dominant);
  }
  for (size_t i = 0; i < state_.cells(); ++i)
    if (state_.u1[i] < -1e-9 || state_.u2[i] < -1e-9) ++diag_.excursions;
}

void Flow2D::set_probes(const LayerProbe& inner, const LayerProbe& outer) {
  probe_inner_ = inner;
  probe_outer_ = outer;
}

void Flow2D::step() {
  const double eps = state_.params.epsilon;
  const double e4 = std::pow(eps, 4);
  double E0 = diag_.energy.back();

  for (int attempt = 0;; ++attempt) {
    std::vector<double> mu1, mu2;
    variational_derivative(state_, *pot_, *V_, sg_, mu1, mu2);
    std::vector<std::complex<double>> mh1, mh2, uh1, uh2;
    sg_.forward(mu1, mh1);
    sg_.forward(mu2, mh2);
    sg_.forward(state_.u1, uh1);
    sg_.forward(state_.u2, uh2);
    const int nk = sg_.nkx();
    for (int iy = 0; iy < state_.ny; ++iy) {
      for (int ikx = 0; ikx < nk; ++ikx) {
        size_t idx = static_cast<size_t>(iy) * nk + ikx;
        double k2 = sg_.k2(ikx, iy);
        double k4 = k2 * k2;
        std::complex<double> mu_exp1 = mh1[idx] - (e4 * k4 + sigma_) * uh1[idx];
        std::complex<double> mu_exp2 = mh2[idx] - (e4 * k4 + sigma_) * uh2[idx];
        double denom = 1.0 + dt_ * (e4 * k4 * k2 + sigma_ * k2);
        uh1[idx] = (uh1[idx] + dt_ * (-k2) * mu_exp1) / denom;
        uh2[idx] = (uh2[idx] + dt_ * (-k2) * mu_exp2) / denom;
      }
    }
    if (cfg_.dealias) {
      sg_.dealias(uh1);
      sg_.dealias(uh2);
    }
    FieldState trial = state_;
    sg_.inverse(uh1, trial.u1);
    sg_.inverse(uh2, trial.u2);
    trial.time = state_.time + dt_;
    if (!trial.finite())
      throw BlowupError("time step produced non-finite values at t = " +
                        std::to_string(state_.time));
    double E1 = energy_full(trial, *pot_, *V_);
    if (E1 <= E0 + cfg_.energy_tol * std::abs(E0)) {
      state_ = std::move(trial);
      ++steps_;
      record();
      return;
    }
    if (attempt >= cfg_.max_halvings)
      throw BlowupError("energy increase persists after dt halvings at t = " +
                        std::to_string(state_.time));
    dt_ *= 0.5;
    ++diag_.halvings;
  }
}

void Flow2D::run(const std::function<void(const FieldState&, long)>& on_snapshot) {
  while (state_.time < cfg_.t_end - 1e-12) {
    step();
    if (cfg_.snapshot_every > 0 && steps_ % cfg_.snapshot_every == 0 &&
        on_snapshot)
      on_snapshot(state_, steps_);
  }
}

// ---------------------------------------------------------------------------
// the pearling experiment
// ---------------------------------------------------------------------------

namespace {

InterfaceGeometry perturbed_circle(const Vec2& center, double R, double l0,
                                   double amp, unsigned long seed, int nodes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const int kmax = 40;
  std::vector<double> a(kmax + 1, 0.0), ph(kmax + 1, 0.0);
  for (int k = 2; k <= kmax; ++k) {
    a[k] = amp * uni(rng);
    ph[k] = kPi * uni(rng);
  }
  Eigen::Matrix<double, Eigen::Dynamic, 2> pts(nodes, 2);
  for (int i = 0; i < nodes; ++i) {
    double th = 2 * kPi * i / nodes;
    double r = R;
    for (int k = 2; k <= kmax; ++k) r += R * a[k] * std::cos(k * th + ph[k]);
    pts.row(i) = (center + r * Vec2(std::cos(th), std::sin(th))).transpose();
  }
  return make_curve(pts, l0);
}

}  // namespace

PearlingRun pearling_experiment(const std::string& offset,
                                const PearlingSetup& setup,
                                const std::string& out_dir) {
  if (offset != "above" && offset != "tuned" && offset != "below")
    throw ParameterError("pearling offset must be above|tuned|below");

  // AB-type two-collision billiard and its bilayer profile; asymmetric
  // collision points give distinct striations
  Vec2 c1(0.62, 0.12), c2(0.18, 0.55);
  BilliardSpec spec = raytrace_collision_curve(c1, c2);
  Mollifier mol = Mollifier::polynomial();
  auto trace = trace_homoclinic(spec, std::atan2(c1[1], c1[0]), 4);
  if (!trace.homoclinic) throw SpecInconsistencyError("pearling: trace failed");
  const auto& orbit = *trace.orbit;

  Grid1D pgrid;
  pgrid.L = 16;
  pgrid.nodes = 8001;
  // recentre so the two collisions straddle z = 0
  double zshift = 0.5 * (orbit.collisions[0].z + orbit.collisions[1].z);
  BilliardHomoclinic centered = orbit;
  for (auto& s : centered.segments) {
    s.z0 -= zshift;
    s.z1 -= zshift;
  }
  for (auto& c : centered.collisions) c.z -= zshift;
  auto profile =
      solve_billiard_homoclinic(spec, setup.delta, centered, pgrid, mol);

  ModelParams params;
  params.epsilon = setup.epsilon;
  params.eta1 = setup.eta1;
  params.eta2 = setup.eta2;
  params.domain_size = {2 * kPi, 2 * kPi};

  Vec2 center(kPi, kPi);
  auto geom = perturbed_circle(center, setup.circle_radius, setup.l0,
                               setup.seed_amplitude, setup.seed, 1024);
  FieldState f = dress(geom, profile, params, setup.grid, setup.grid);

  double factor = 1.0;
  if (offset == "above") factor = 1.0 + 0.5 * setup.epsilon;
  if (offset == "below") factor = 1.0 - 0.5 * setup.epsilon;
  for (auto& v : f.u1) v *= factor;
  for (auto& v : f.u2) v *= factor;

  SolverConfig cfg;
  cfg.dt = setup.dt;
  cfg.t_end = setup.t_end;
  cfg.dealias = true;
  cfg.snapshot_every =
      out_dir.empty() ? 0 : std::max(1, static_cast<int>(0.5 / setup.dt));

  RegularizedBilliard pot(spec, setup.delta, mol);
  RotationalV V;
  Flow2D flow(std::move(f), pot, V, cfg);

  // probes on the two striation circles (collision radii along the normal
  // coordinate, measured in the collision-normal component)
  LayerProbe inner, outer;
  double z1 = profile.collision_times.size() > 0 ? profile.collision_times[0]
                                                 : centered.collisions[0].z;
  double z2 = profile.collision_times.size() > 1 ? profile.collision_times[1]
                                                 : centered.collisions[1].z;
  inner.center = center;
  inner.radius = setup.circle_radius + setup.epsilon * std::min(z1, z2);
  inner.direction = centered.collisions[0].normal;
  outer.center = center;
  outer.radius = setup.circle_radius + setup.epsilon * std::max(z1, z2);
  outer.direction = centered.collisions[1].normal;
  flow.set_probes(inner, outer);

  long snap_id = 0;
  auto on_snap = [&](const FieldState& s, long) {
    if (out_dir.empty()) return;
    std::string base = out_dir + "/" + offset + "_" + std::to_string(snap_id++);
    write_mfch(s, base + ".mfch");
    write_pgm(s, 0, base + "_u1.pgm");
    write_pgm(s, 1, base + "_u2.pgm");
  };
  flow.run(on_snap);

  PearlingRun run;
  run.offset = offset;
  run.diag = flow.diagnostics();
  double floor = 1e-12;
  double a0i = std::max(run.diag.amp_inner.front(), floor);
  double a0o = std::max(run.diag.amp_outer.front(), floor);
  for (size_t i = 0; i < run.diag.amp_inner.size(); ++i) {
    run.growth_inner = std::max(run.growth_inner, run.diag.amp_inner[i] / a0i);
    run.growth_outer = std::max(run.growth_outer, run.diag.amp_outer[i] / a0o);
  }
  run.pearled_inner = run.growth_inner >= setup.growth_flag;
  run.pearled_outer = run.growth_outer >= setup.growth_flag;
  run.k_inner = run.diag.k_inner.back();
  run.k_outer = run.diag.k_outer.back();
  if (!out_dir.empty())
    write_diagnostics_csv(run.diag, out_dir + "/" + offset + "_diagnostics.csv");
  return run;
}

void write_diagnostics_csv(const Diagnostics& d, const std::string& path) {
  std::ofstream f(path);
  f.precision(17);
  f << "t,energy,mass1,mass2,maxu";
  bool probes = !d.amp_inner.empty();
  if (probes) f << ",mode_inner,mode_outer,k_inner,k_outer";
  f << "\n";
  for (size_t i = 0; i < d.t.size(); ++i) {
    f << d.t[i] << ',' << d.energy[i] << ',' << d.mass1[i] << ',' << d.mass2[i]
      << ',' << d.maxu[i];
    if (probes)
      f << ',' << d.amp_inner[i] << ',' << d.amp_outer[i] << ',' << d.k_inner[i]
        << ',' << d.k_outer[i];
    f << '\n';
  }
}

}  // namespace mfch
