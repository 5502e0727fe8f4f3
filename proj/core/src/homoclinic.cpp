#include "mfch/homoclinic.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "mfch/linalg.hpp"

namespace mfch {

double default_halflength(const Potential& pot) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(pot.hess0());
  return 20.0 / std::sqrt(es.eigenvalues().minCoeff());
}

Vec2 HomoclinicProfile::sample(double zq) const {
  double h = grid.h();
  double x = (zq + grid.L) / h;
  int n = grid.nodes;
  if (x <= 0) return u.row(0);
  if (x >= n - 1) return u.row(n - 1);
  int i = static_cast<int>(x);
  double t = x - i;
  auto row = [&](int k) -> Vec2 {
    k = std::clamp(k, 0, n - 1);
    return u.row(k);
  };
  Vec2 p0 = row(i - 1), p1 = row(i), p2 = row(i + 1), p3 = row(i + 2);
  // Catmull-Rom
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * (t * t) +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * (t * t * t));
}

namespace {

struct BorderedProblem {
  const Potential* pot = nullptr;
  const Solenoidal* V = nullptr;
  double epsilon = 0;
  Vec2 E = Vec2::Zero();   // eps^2 E right-hand side
  Vec2 u_inf = Vec2::Zero();
  Mat2 S;                  // boundary projection matrix
  bool solve_a = false;    // border unknown is the Melnikov parameter
  double a0_guess = 0;
  bool pin_rotation = false;
  Grid1D grid;
  ProfileData guess;       // phase reference
};

Vec2 f_term(const BorderedProblem& P, const Vec2& u) {
  Vec2 f = P.pot->eval_extended(u, 1).grad;
  if (P.epsilon != 0) {
    if (P.V) f -= P.epsilon * P.V->value(u);
    f += P.epsilon * P.epsilon * P.E;
  }
  return f;
}

Mat2 f_jac(const BorderedProblem& P, const Vec2& u) {
  Mat2 J = P.pot->eval_extended(u, 2).hess;
  if (P.epsilon != 0 && P.V) J -= P.epsilon * P.V->jacobian(u);
  return J;
}

struct NewtonResult {
  ProfileData u;
  double border1 = 0;  // a (or the artificial multiplier)
  double sv0 = 0, sv1 = 0;
  double residual = 0;
  int iters = 0;
};

// Assemble and solve the bordered collocation system by damped Newton.
NewtonResult bordered_newton(const BorderedProblem& P, const SolveOptions& opts,
                             bool kernel_diagnostic) {
  const int n = P.grid.nodes;
  const double h = P.grid.h();
  const int nb = 1 + (P.pin_rotation ? 1 : 0);
  const int dim = 2 * n + nb;

  // phase reference derivative and normalized border columns
  ProfileData gd(n, 2);
  for (int i = 1; i + 1 < n; ++i)
    gd.row(i) = (P.guess.row(i + 1) - P.guess.row(i - 1)) / (2 * h);
  gd.row(0) = (P.guess.row(1) - P.guess.row(0)) / h;
  gd.row(n - 1) = (P.guess.row(n - 1) - P.guess.row(n - 2)) / h;
  double gd_norm = std::sqrt(gd.squaredNorm() * h);
  ProfileData ghat = gd / std::max(gd_norm, 1e-300);
  ProfileData rhat(n, 2);
  for (int i = 0; i < n; ++i) rhat.row(i) = Vec2(-P.guess(i, 1), P.guess(i, 0));
  double r_norm = std::sqrt(rhat.squaredNorm() * h);
  rhat /= std::max(r_norm, 1e-300);

  Eigen::VectorXd X(dim);
  for (int i = 0; i < n; ++i) {
    X[2 * i] = P.guess(i, 0);
    X[2 * i + 1] = P.guess(i, 1);
  }
  X[2 * n] = P.solve_a ? P.a0_guess : 0.0;
  if (nb > 1) X[2 * n + 1] = 0.0;

  auto residual = [&](const Eigen::VectorXd& Xc) {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(dim);
    auto u_at = [&](int i) -> Vec2 { return Vec2(Xc[2 * i], Xc[2 * i + 1]); };
    double a = P.solve_a ? Xc[2 * n] : 0.0;
    double b1 = P.solve_a ? 0.0 : Xc[2 * n];
    double b2 = nb > 1 ? Xc[2 * n + 1] : 0.0;

    Vec2 fm = f_term(P, u_at(0));
    Vec2 fc = f_term(P, u_at(1));
    for (int i = 1; i + 1 < n; ++i) {
      Vec2 fp = f_term(P, u_at(i + 1));
      Vec2 d2 = (u_at(i - 1) - 2 * u_at(i) + u_at(i + 1)) / (h * h);
      Vec2 d0 = (u_at(i + 1) - u_at(i - 1)) / (2 * h);
      Vec2 r = d2 - (fm + 10 * fc + fp) / 12.0;
      if (P.epsilon != 0) r += P.epsilon * a * d0;
      r += b1 * Vec2(ghat.row(i)) + b2 * Vec2(rhat.row(i));
      F[2 * i] = r[0];
      F[2 * i + 1] = r[1];
      fm = fc;
      fc = fp;
    }
    // projection boundary conditions
    Vec2 bl = (-3 * u_at(0) + 4 * u_at(1) - u_at(2)) / (2 * h) -
              P.S * (u_at(0) - P.u_inf);
    Vec2 br = (3 * u_at(n - 1) - 4 * u_at(n - 2) + u_at(n - 3)) / (2 * h) +
              P.S * (u_at(n - 1) - P.u_inf);
    F[0] = bl[0];
    F[1] = bl[1];
    F[2 * (n - 1)] = br[0];
    F[2 * (n - 1) + 1] = br[1];
    // phase condition(s)
    double ph = 0;
    for (int i = 0; i < n; ++i) {
      double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
      ph += w * (u_at(i) - Vec2(P.guess.row(i))).dot(gd.row(i));
    }
    F[2 * n] = ph;
    if (nb > 1) {
      double ph2 = 0;
      for (int i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        ph2 += w * (u_at(i) - Vec2(P.guess.row(i))).dot(rhat.row(i));
      }
      F[2 * n + 1] = ph2;
    }
    return F;
  };

  auto assemble = [&](const Eigen::VectorXd& Xc, bool with_border) {
    std::vector<Eigen::Triplet<double>> T;
    T.reserve(static_cast<size_t>(n) * 30);
    auto u_at = [&](int i) -> Vec2 { return Vec2(Xc[2 * i], Xc[2 * i + 1]); };
    double a = P.solve_a ? Xc[2 * n] : 0.0;
    auto put = [&](int r, int c, double v) { T.emplace_back(r, c, v); };
    auto put_block = [&](int ri, int ci, const Mat2& M) {
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          if (M(p, q) != 0) put(2 * ri + p, 2 * ci + q, M(p, q));
    };
    const int nbord = with_border ? nb : 1;
    const int d = 2 * n + nbord;

    Mat2 I = Mat2::Identity();
    for (int i = 1; i + 1 < n; ++i) {
      Mat2 Jm = f_jac(P, u_at(i - 1));
      Mat2 Jc = f_jac(P, u_at(i));
      Mat2 Jp = f_jac(P, u_at(i + 1));
      double ea = P.epsilon * a;
      put_block(i, i - 1, I / (h * h) - Jm / 12.0 - (ea / (2 * h)) * I);
      put_block(i, i, -2 * I / (h * h) - (10.0 / 12.0) * Jc);
      put_block(i, i + 1, I / (h * h) - Jp / 12.0 + (ea / (2 * h)) * I);
      // border columns
      if (P.solve_a && P.epsilon != 0) {
        Vec2 d0 = (u_at(i + 1) - u_at(i - 1)) / (2 * h);
        put(2 * i, 2 * n, P.epsilon * d0[0]);
        put(2 * i + 1, 2 * n, P.epsilon * d0[1]);
      } else if (!P.solve_a) {
        put(2 * i, 2 * n, ghat(i, 0));
        put(2 * i + 1, 2 * n, ghat(i, 1));
      }
      if (with_border && nb > 1) {
        put(2 * i, 2 * n + 1, rhat(i, 0));
        put(2 * i + 1, 2 * n + 1, rhat(i, 1));
      }
    }
    put_block(0, 0, -(3.0 / (2 * h)) * I - P.S);
    put_block(0, 1, (2.0 / h) * I);
    put_block(0, 2, -(1.0 / (2 * h)) * I);
    put_block(n - 1, n - 1, (3.0 / (2 * h)) * I + P.S);
    put_block(n - 1, n - 2, -(2.0 / h) * I);
    put_block(n - 1, n - 3, (1.0 / (2 * h)) * I);
    for (int i = 0; i < n; ++i) {
      double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
      put(2 * n, 2 * i, w * gd(i, 0));
      put(2 * n, 2 * i + 1, w * gd(i, 1));
      if (with_border && nb > 1) {
        put(2 * n + 1, 2 * i, w * rhat(i, 0));
        put(2 * n + 1, 2 * i + 1, w * rhat(i, 1));
      }
    }
    Eigen::SparseMatrix<double> J(d, d);
    J.setFromTriplets(T.begin(), T.end());
    return J;
  };

  Eigen::VectorXd F = residual(X);
  double fn = F.lpNorm<Eigen::Infinity>();
  NewtonResult out;
  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    if (fn <= opts.tol) {
      converged = true;
      out.iters = it;
      break;
    }
    Eigen::SparseMatrix<double> J = assemble(X, true);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw ConvergenceError("newton: singular collocation Jacobian");
    Eigen::VectorXd dX = lu.solve(F);
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 6; ++bt) {
      Eigen::VectorXd Xn = X - lambda * dX;
      Eigen::VectorXd Fn = residual(Xn);
      double fnn = Fn.lpNorm<Eigen::Infinity>();
      if (fnn < fn || (bt == 0 && fnn < 1e3 * fn && it < 3)) {
        X = Xn;
        F = Fn;
        fn = fnn;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      //: a residual pinned at the roundoff floor of the 1/h^2 stencil
      // counts as converged
      double umax = X.head(2 * n).cwiseAbs().maxCoeff();
      double floor_res = 64 * 2.2e-16 * (1 + umax) / (h * h);
      if (fn <= std::max(opts.tol, floor_res) && it >= 1) {
        converged = true;
        out.iters = it;
        break;
      }
      throw ConvergenceError("newton: line search failed at residual " +
                             std::to_string(fn));
    }
  }
  if (!converged && fn > opts.tol) {
    double umax = X.head(2 * n).cwiseAbs().maxCoeff();
    double floor_res = 64 * 2.2e-16 * (1 + umax) / (h * h);
    if (fn > std::max(opts.tol, floor_res))
      throw ConvergenceError("newton: no convergence, residual " +
                             std::to_string(fn));
  }

  out.u.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    out.u(i, 0) = X[2 * i];
    out.u(i, 1) = X[2 * i + 1];
  }
  out.border1 = X[2 * n];
  out.residual = fn;
  if (out.u.cwiseAbs().maxCoeff() < opts.nontrivial_floor)
    throw ConvergenceError("newton: converged to the trivial zero solution");

  if (kernel_diagnostic) {
    // singular values of the single-bordered Jacobian (translation pinned,
    // any further near-kernel flags a degenerate family)
    Eigen::SparseMatrix<double> J1 = assemble(X, false);
    auto [s0, s1] = smallest_singular_values(J1);
    out.sv0 = s0;
    out.sv1 = s1;
  }
  return out;
}

double trapz(const Eigen::VectorXd& f, double h) {
  double s = 0.5 * (f[0] + f[f.size() - 1]);
  for (int i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

}  // namespace

void finalize_profile(HomoclinicProfile& p, const Potential& pot,
                      double band_delta) {
  const int n = p.grid.nodes;
  const double h = p.grid.h();
  p.du.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      p.du.row(i) = (p.u.row(i - 2) - 8 * p.u.row(i - 1) + 8 * p.u.row(i + 1) -
                     p.u.row(i + 2)) /
                    (12 * h);
    } else if (i >= 1 && i + 1 < n) {
      p.du.row(i) = (p.u.row(i + 1) - p.u.row(i - 1)) / (2 * h);
    } else if (i == 0) {
      p.du.row(i) = (p.u.row(1) - p.u.row(0)) / h;
    } else {
      p.du.row(i) = (p.u.row(n - 1) - p.u.row(n - 2)) / h;
    }
  }

  Eigen::VectorXd f1(n), f2(n), fz1(n), fz2(n), fsq(n), fW(n), fdu(n);
  for (int i = 0; i < n; ++i) {
    double z = p.grid.z(i);
    Vec2 u = p.u.row(i);
    Vec2 uf = u - p.far_field;
    f1[i] = uf[0];
    f2[i] = uf[1];
    fz1[i] = z * uf[0];
    fz2[i] = z * uf[1];
    fsq[i] = uf.squaredNorm();
    fdu[i] = Vec2(p.du.row(i)).squaredNorm();
    fW[i] = pot.eval_extended(u, 0).value;
  }
  p.M = Vec2(trapz(f1, h), trapz(f2, h));
  p.zM = Vec2(trapz(fz1, h), trapz(fz2, h));
  p.M2 = trapz(fsq, h);
  // for eps = 0 profiles the Hamiltonian identity |phi'|^2/2 = W(phi)
  // evaluates M1 without numerical differentiation
  p.M1 = (p.epsilon == 0) ? 2.0 * trapz(fW, h) : trapz(fdu, h);

  // second-order evaluation defect of the stored profile (the compact
  // scheme solves to a tighter tolerance; this is the plain central-stencil
  // measure whose 4x decay under grid halving certifies the order)
  if (p.epsilon == 0) {
    double res = 0;
    for (int i = 1; i + 1 < n; ++i) {
      Vec2 d2 =
          (Vec2(p.u.row(i - 1)) - 2 * Vec2(p.u.row(i)) + Vec2(p.u.row(i + 1))) /
          (h * h);
      Vec2 g = pot.eval_extended(p.u.row(i), 1).grad;
      res = std::max(res, (d2 - g).lpNorm<Eigen::Infinity>());
    }
    p.defect2 = res;
  }

  // collision times: interior critical points of rho(u(z)) inside the band
  p.collision_times.clear();
  if (band_delta > 0) {
    if (auto* rb = dynamic_cast<const RegularizedBilliard*>(&pot)) {
      const auto& rho = *rb->spec().rho;
      std::vector<double> rv(n);
      for (int i = 0; i < n; ++i) rv[i] = rho.value(p.u.row(i).transpose());
      for (int i = 1; i + 2 < n; ++i) {
        if (std::abs(rv[i]) > band_delta) continue;
        double d0 = rv[i + 1] - rv[i - 1];
        double d1 = rv[i + 2] - rv[i];
        if (d0 <= 0 && d1 > 0) {
          double f = d0 / (d0 - d1);
          p.collision_times.push_back(p.grid.z(i) + f * h);
        }
      }
    }
  }
}

HomoclinicProfile solve_homoclinic(const Potential& pot, const Grid1D& grid,
                                   const ProfileData& guess,
                                   const SolveOptions& opts) {
  if (guess.rows() != grid.nodes)
    throw ParameterError("guess does not match the grid");
  Eigen::SelfAdjointEigenSolver<Mat2> es(pot.hess0());
  if (es.eigenvalues().minCoeff() <= 0)
    throw ParameterError("potential Hessian at the origin must be positive definite");

  BorderedProblem P;
  P.pot = &pot;
  P.grid = grid;
  P.guess = guess;
  P.S = spd_sqrt(pot.hess0());
  P.pin_rotation = opts.pin_rotation;
  auto res = bordered_newton(P, opts, opts.kernel_diagnostic);

  HomoclinicProfile p;
  p.grid = grid;
  p.u = res.u;
  p.epsilon = 0;
  p.far_field = Vec2::Zero();
  p.sv_small[0] = res.sv0;
  p.sv_small[1] = res.sv1;
  p.degenerate_family = res.sv0 < 1e-6 * std::max(1.0, res.sv1);
  p.potential_tag = pot.name();
  p.residual_norm = res.residual;
  finalize_profile(p, pot, 0.0);
  return p;
}

double melnikov_a0(const HomoclinicProfile& profile, const Solenoidal& V) {
  if (profile.epsilon != 0)
    throw ParameterError("melnikov_a0 requires an eps = 0 profile");
  if (!(profile.M1 > 0)) throw ParameterError("melnikov_a0 requires M1 > 0");
  const int n = profile.grid.nodes;
  const double h = profile.grid.h();
  double I = 0;
  for (int i = 1; i + 1 < n; ++i) {
    Vec2 d0 = (Vec2(profile.u.row(i + 1)) - Vec2(profile.u.row(i - 1))) / (2 * h);
    I += h * V.value(profile.u.row(i)).dot(d0);
  }
  return -I / profile.M1;
}

Vec2 whisker_equilibrium(const Potential& pot, const Solenoidal& V,
                         const Vec2& m, double epsilon) {
  Mat2 W0 = pot.hess0();
  Vec2 E = -W0.inverse() * m;
  Vec2 x = epsilon * epsilon * (W0.inverse() * W0.inverse() * m);
  for (int it = 0; it < 50; ++it) {
    Vec2 F = pot.grad(x) - epsilon * V.value(x) + epsilon * epsilon * E;
    if (F.norm() < 1e-14) break;
    Mat2 J = pot.hess(x) - epsilon * V.jacobian(x);
    x -= J.inverse() * F;
  }
  return x;
}

HomoclinicProfile continue_epsilon(const Potential& pot,
                                   const HomoclinicProfile& profile0,
                                   const Solenoidal& V, const Vec2& m,
                                   double epsilon, const SolveOptions& opts) {
  double a0 = melnikov_a0(profile0, V);
  if (epsilon == 0) {
    HomoclinicProfile p = profile0;
    p.melnikov_a = a0;
    return p;
  }
  Mat2 W0 = pot.hess0();
  Vec2 E = -W0.inverse() * m;

  ProfileData u = profile0.u;
  double a = a0;
  double eps_done = 0;
  double step = epsilon;
  int halvings = 0;
  HomoclinicProfile p;
  while (eps_done < epsilon - 1e-15) {
    double eps_try = std::min(epsilon, eps_done + step);
    BorderedProblem P;
    P.pot = &pot;
    P.V = &V;
    P.epsilon = eps_try;
    P.E = E;
    P.u_inf = whisker_equilibrium(pot, V, m, eps_try);
    P.S = spd_sqrt(Mat2(0.5 * (pot.hess(P.u_inf) + pot.hess(P.u_inf).transpose())));
    P.solve_a = true;
    P.a0_guess = a;
    P.pin_rotation = opts.pin_rotation;
    P.grid = profile0.grid;
    // shift the guess onto the new far field
    P.guess = u;
    Vec2 prev_inf = (eps_done == 0) ? profile0.far_field
                                    : whisker_equilibrium(pot, V, m, eps_done);
    for (int i = 0; i < P.guess.rows(); ++i)
      P.guess.row(i) += (P.u_inf - prev_inf).transpose();
    try {
      auto res = bordered_newton(P, opts, opts.kernel_diagnostic && eps_try == epsilon);
      u = res.u;
      a = res.border1;
      eps_done = eps_try;
      if (eps_try == epsilon) {
        p.grid = profile0.grid;
        p.u = u;
        p.epsilon = epsilon;
        p.far_field = P.u_inf;
        p.melnikov_a = a;
        p.sv_small[0] = res.sv0;
        p.sv_small[1] = res.sv1;
        p.residual_norm = res.residual;
        p.potential_tag = pot.name();
      }
    } catch (const ConvergenceError&) {
      step *= 0.5;
      if (++halvings > 12)
        throw ConvergenceError(
            "epsilon continuation stalled at eps = " + std::to_string(eps_done));
    }
  }
  finalize_profile(p, pot, profile0.delta);
  p.delta = profile0.delta;
  p.mollifier_tag = profile0.mollifier_tag;
  // defect of the whisker ODE under the plain second-order stencil
  const int n = p.grid.nodes;
  const double h = p.grid.h();
  double res = 0;
  for (int i = 1; i + 1 < n; ++i) {
    Vec2 d2 = (Vec2(p.u.row(i - 1)) - 2 * Vec2(p.u.row(i)) + Vec2(p.u.row(i + 1))) / (h * h);
    Vec2 d0 = (Vec2(p.u.row(i + 1)) - Vec2(p.u.row(i - 1))) / (2 * h);
    Vec2 r = d2 + epsilon * p.melnikov_a * d0 - pot.eval_extended(p.u.row(i), 1).grad +
             epsilon * V.value(p.u.row(i)) - epsilon * epsilon * E;
    res = std::max(res, r.lpNorm<Eigen::Infinity>());
  }
  p.defect2 = res;
  return p;
}

CorrectorPair correctors(const Potential& pot, const HomoclinicProfile& phi,
                         const Solenoidal& V, const Vec2& m, double eta1,
                         double eta2) {
  if (phi.epsilon != 0)
    throw ParameterError("correctors are defined about an eps = 0 profile");
  const int n = phi.grid.nodes;
  const double h = phi.grid.h();
  Mat2 W0 = pot.hess0();
  CorrectorPair out;
  out.E = -W0.inverse() * m;
  out.B = W0.inverse() * (W0.inverse() * m);
  double a0 = melnikov_a0(phi, V);

  // bordered linear operator [L0, ghat; <phi',.>, 0]
  ProfileData gd(n, 2);
  for (int i = 1; i + 1 < n; ++i)
    gd.row(i) = (phi.u.row(i + 1) - phi.u.row(i - 1)) / (2 * h);
  gd.row(0) = (phi.u.row(1) - phi.u.row(0)) / h;
  gd.row(n - 1) = (phi.u.row(n - 1) - phi.u.row(n - 2)) / h;
  double gn = std::sqrt(gd.squaredNorm() * h);
  ProfileData ghat = gd / std::max(gn, 1e-300);

  Mat2 S = spd_sqrt(W0);
  Mat2 I = Mat2::Identity();
  const int dim = 2 * n + 1;
  std::vector<Eigen::Triplet<double>> T;
  auto put = [&](int r, int c, double v) { T.emplace_back(r, c, v); };
  auto put_block = [&](int ri, int ci, const Mat2& M) {
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        if (M(p, q) != 0) put(2 * ri + p, 2 * ci + q, M(p, q));
  };
  for (int i = 1; i + 1 < n; ++i) {
    Mat2 Jm = pot.eval_extended(phi.u.row(i - 1), 2).hess;
    Mat2 Jc = pot.eval_extended(phi.u.row(i), 2).hess;
    Mat2 Jp = pot.eval_extended(phi.u.row(i + 1), 2).hess;
    put_block(i, i - 1, I / (h * h) - Jm / 12.0);
    put_block(i, i, -2 * I / (h * h) - (10.0 / 12.0) * Jc);
    put_block(i, i + 1, I / (h * h) - Jp / 12.0);
    put(2 * i, 2 * n, ghat(i, 0));
    put(2 * i + 1, 2 * n, ghat(i, 1));
  }
  put_block(0, 0, -(3.0 / (2 * h)) * I - S);
  put_block(0, 1, (2.0 / h) * I);
  put_block(0, 2, -(1.0 / (2 * h)) * I);
  put_block(n - 1, n - 1, (3.0 / (2 * h)) * I + S);
  put_block(n - 1, n - 2, -(2.0 / h) * I);
  put_block(n - 1, n - 3, (1.0 / (2 * h)) * I);
  for (int i = 0; i < n; ++i) {
    double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    put(2 * n, 2 * i, w * gd(i, 0));
    put(2 * n, 2 * i + 1, w * gd(i, 1));
  }
  Eigen::SparseMatrix<double> A(dim, dim);
  A.setFromTriplets(T.begin(), T.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw ConvergenceError("corrector operator is singular (kernel dimension > 1?)");

  auto solve_with_rhs = [&](const ProfileData& rhs, const Vec2& far) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    for (int i = 1; i + 1 < n; ++i) {
      Vec2 w = (Vec2(rhs.row(i - 1)) + 10 * Vec2(rhs.row(i)) + Vec2(rhs.row(i + 1))) / 12.0;
      b[2 * i] = w[0];
      b[2 * i + 1] = w[1];
    }
    Vec2 bl = -S * far;  // move the affine boundary term to the rhs
    Vec2 br = -S * far;
    b[0] = bl[0];
    b[1] = bl[1];
    b[2 * (n - 1)] = -br[0];
    b[2 * (n - 1) + 1] = -br[1];
    Eigen::VectorXd x = lu.solve(b);
    ProfileData out_(n, 2);
    for (int i = 0; i < n; ++i) {
      out_(i, 0) = x[2 * i];
      out_(i, 1) = x[2 * i + 1];
    }
    return out_;
  };

  ProfileData rhs_zeta(n, 2), rhs_phi1(n, 2);
  for (int i = 0; i < n; ++i) {
    Vec2 u = phi.u.row(i);
    rhs_zeta.row(i) = ((eta2 - eta1) * pot.eval_extended(u, 1).grad + m).transpose();
    Vec2 d0 = gd.row(i);
    rhs_phi1.row(i) = (-(V.value(u) + a0 * d0)).transpose();
  }
  out.zeta = solve_with_rhs(rhs_zeta, out.E);
  out.phi1 = solve_with_rhs(rhs_phi1, Vec2::Zero());

  Eigen::VectorXd t1(n), t2(n);
  for (int i = 0; i < n; ++i) {
    t1[i] = out.phi1(i, 0);
    t2[i] = out.phi1(i, 1);
  }
  out.int_phi1 = Vec2(trapz(t1, h), trapz(t2, h));
  for (int i = 0; i < n; ++i) {
    double z = phi.grid.z(i);
    t1[i] = z * phi.u(i, 0);
    t2[i] = z * phi.u(i, 1);
  }
  out.int_z_phi = Vec2(trapz(t1, h), trapz(t2, h));
  return out;
}

namespace {

// Head-on one-collision orbits run along a fixed ray on which the
// regularized potential is radial, so the profile is available by 1-D
// quadrature: dr/dz = -+ sqrt(2 B_delta(r e)), turning where B vanishes.
ProfileData radial_headon_guess(const BilliardSpec& spec, double delta,
                                const Mollifier& mol, double theta,
                                const Grid1D& grid) {
  RegularizedBilliard pot(spec, delta, mol);
  Vec2 e(std::cos(theta), std::sin(theta));
  auto B = [&](double r) { return pot.eval_global(r * e, 0).value; };
  // turning radius: zero of B on the approach side of the band
  double lo = 0.5 * spec.R0, hi = lo;
  double step = 1e-3;
  while (B(hi) > 0 && hi < 3.0) hi += step;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    (B(mid) > 0 ? lo : hi) = mid;
  }
  double rt = 0.5 * (lo + hi);
  // z(r) outward-to-inward with the sqrt turning handled by substitution
  // r = rt - s^2
  int m = 4000;
  double smax = std::sqrt(rt - 1e-9);
  std::vector<double> rs(m + 1), zs(m + 1);
  rs[0] = rt;
  zs[0] = 0.0;
  auto integrand = [&](double s) {
    double r = rt - s * s;
    double b = std::max(B(r), 1e-300);
    return 2 * s / std::sqrt(2 * b);
  };
  for (int i = 1; i <= m; ++i) {
    double s0 = smax * (i - 1) / m, s1 = smax * i / m;
    double mid = 0.5 * (s0 + s1);
    double seg = ((s1 - s0) / 6.0) *
                 (integrand(s0) + 4 * integrand(mid) + integrand(s1));
    rs[i] = rt - s1 * s1;
    zs[i] = zs[i - 1] + seg;  // time from the turning point, moving inward
  }
  ProfileData out(grid.nodes, 2);
  for (int i = 0; i < grid.nodes; ++i) {
    double t = std::abs(grid.z(i));  // head-on orbit is even about z = 0
    double r;
    if (t >= zs[m]) {
      r = rs[m] * std::exp(-1.4142135623730951 * (t - zs[m]));
    } else {
      auto it = std::upper_bound(zs.begin(), zs.end(), t);
      int k = std::min<int>(m - 1, std::max<long>(0, it - zs.begin() - 1));
      double f = (t - zs[k]) / std::max(zs[k + 1] - zs[k], 1e-300);
      r = rs[k] * (1 - f) + rs[k + 1] * f;
    }
    out.row(i) = (r * e).transpose();
  }
  return out;
}

}  // namespace

ProfileData billiard_limit_guess(const BilliardSpec& spec,
                                 const BilliardHomoclinic& orbit,
                                 const Grid1D& grid, double delta) {
  const int n = grid.nodes;
  ProfileData raw(n, 2);
  for (int i = 0; i < n; ++i)
    raw.row(i) = orbit.at(grid.z(i), spec).transpose();
  // mollify the reflection corners
  double w = std::max(delta, 4 * grid.h());
  int k = std::max(1, static_cast<int>(std::ceil(w / grid.h())));
  Mollifier mol = Mollifier::polynomial();
  std::vector<double> ker(2 * k + 1);
  double s = 0;
  for (int j = -k; j <= k; ++j) {
    ker[j + k] = mol.value(static_cast<double>(j) / k);
    s += ker[j + k];
  }
  for (auto& v : ker) v /= s;
  ProfileData out(n, 2);
  for (int i = 0; i < n; ++i) {
    Vec2 acc = Vec2::Zero();
    for (int j = -k; j <= k; ++j) {
      int idx = std::clamp(i + j, 0, n - 1);
      acc += ker[j + k] * Vec2(raw.row(idx));
    }
    out.row(i) = acc.transpose();
  }
  return out;
}

HomoclinicProfile solve_billiard_homoclinic(const BilliardSpec& spec,
                                            double delta,
                                            const BilliardHomoclinic& orbit,
                                            const Grid1D& grid,
                                            const Mollifier& mol, double tol) {
  if (!(delta > 0) || delta > spec.delta0)
    throw ParameterError("delta must lie in (0, delta0]");
  std::vector<double> ladder{delta};
  while (ladder.back() * 2 <= 0.4 * spec.delta0) ladder.push_back(ladder.back() * 2);
  std::reverse(ladder.begin(), ladder.end());

  SolveOptions opts;
  opts.tol = tol;
  opts.pin_rotation = spec.tag.rfind("universal", 0) == 0;

  // head-on single collisions admit an exact 1-D quadrature along their
  // ray; start there and skip the ladder
  bool headon = orbit.n_collisions() == 1 &&
                (orbit.collisions[0].v_plus + orbit.collisions[0].v_minus)
                        .norm() < 1e-8;
  if (headon) ladder = {delta};

  ProfileData guess =
      headon ? radial_headon_guess(spec, delta, mol, orbit.entry_angle, grid)
             : billiard_limit_guess(spec, orbit, grid, ladder.front());
  HomoclinicProfile p;
  for (size_t k = 0; k < ladder.size(); ++k) {
    RegularizedBilliard pot(spec, ladder[k], mol);
    opts.kernel_diagnostic = (k + 1 == ladder.size());
    p = solve_homoclinic(pot, grid, guess, opts);
    guess = p.u;
  }
  RegularizedBilliard pot(spec, delta, mol);
  p.delta = delta;
  p.mollifier_tag = mol.name();
  finalize_profile(p, pot, delta);
  return p;
}

std::vector<FamilyMember> family_sweep(const BilliardSpec& spec, double delta,
                                       double theta_min, double theta_max,
                                       int count, const Grid1D& grid,
                                       const Mollifier& mol) {
  std::vector<FamilyMember> out;
  for (int k = 0; k < count; ++k) {
    double th = theta_min + (theta_max - theta_min) * k / std::max(1, count - 1);
    FamilyMember fm;
    fm.theta = th;
    fm.converged = false;
    fm.sv0 = fm.sv1 = 0;
    fm.collision_time = 0;
    try {
      auto tr = trace_homoclinic(spec, th, 8);
      if (!tr.homoclinic) {
        out.push_back(fm);
        continue;
      }
      auto p = solve_billiard_homoclinic(spec, delta, *tr.orbit, grid, mol);
      fm.converged = true;
      fm.sv0 = p.sv_small[0];
      fm.sv1 = p.sv_small[1];
      fm.collision_time =
          p.collision_times.empty() ? 0 : p.collision_times.front();
    } catch (const Error&) {
      // partial sweep: angle recorded as unconverged
    }
    out.push_back(fm);
  }
  return out;
}

void write_profile(const HomoclinicProfile& p, const std::string& csv_path,
                   const std::string& json_path) {
  std::ofstream f(csv_path);
  f.precision(17);
  f << "z,u1,u2,du1,du2\n";
  for (int i = 0; i < p.grid.nodes; ++i)
    f << p.grid.z(i) << ',' << p.u(i, 0) << ',' << p.u(i, 1) << ','
      << p.du(i, 0) << ',' << p.du(i, 1) << '\n';
  std::ofstream g(json_path);
  g.precision(17);
  g << "{\n  \"M\": [" << p.M[0] << ", " << p.M[1] << "],\n"
    << "  \"M1\": " << p.M1 << ",\n  \"M2\": " << p.M2 << ",\n"
    << "  \"zM\": [" << p.zM[0] << ", " << p.zM[1] << "],\n"
    << "  \"a\": " << p.melnikov_a << ",\n  \"epsilon\": " << p.epsilon
    << ",\n  \"delta\": " << p.delta << ",\n  \"residual\": "
    << p.residual_norm << ",\n  \"far_field\": [" << p.far_field[0] << ", "
    << p.far_field[1] << "],\n  \"collision_times\": [";
  for (size_t i = 0; i < p.collision_times.size(); ++i)
    g << (i ? ", " : "") << p.collision_times[i];
  g << "],\n  \"potential\": \"" << p.potential_tag << "\",\n"
    << "  \"mollifier\": \"" << p.mollifier_tag << "\"\n}\n";
}

}  // namespace mfch
