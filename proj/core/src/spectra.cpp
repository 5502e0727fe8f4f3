#include "mfch/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace mfch {

BandedSymmetric assemble_linearization(const HomoclinicProfile& profile,
                                       const Potential& pot) {
  const int n = profile.grid.nodes;
  const double h = profile.grid.h();
  if (profile.u.rows() != n) throw ParameterError("profile/grid shape mismatch");
  BandedSymmetric A(2 * n, 2);
  Mat2 Hf = pot.eval_extended(profile.far_field, 2).hess;
  Mat2 S = spd_sqrt(Mat2(0.5 * (Hf + Hf.transpose())));
  const double ih2 = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    Mat2 Q = pot.eval_extended(profile.u.row(i), 2).hess;
    Q = 0.5 * (Q + Q.transpose());
    Mat2 diag = -Q;
    if (i == 0 || i == n - 1) {
      diag -= Mat2(ih2 * Mat2::Identity() + S / h);
    } else {
      diag -= 2 * ih2 * Mat2::Identity();
    }
    for (int p = 0; p < 2; ++p)
      for (int q = p; q < 2; ++q) A.at(2 * i + q, 2 * i + p) += diag(q, p);
    if (i + 1 < n) {
      A.at(2 * (i + 1), 2 * i) += ih2;
      A.at(2 * (i + 1) + 1, 2 * i + 1) += ih2;
    }
  }
  return A;
}

std::vector<EigenPair> eigen_top(const BandedSymmetric& A, int k) {
  auto vals = A.top_eigenvalues(k);
  std::vector<EigenPair> out;
  for (auto it = vals.rbegin(); it != vals.rend(); ++it) {
    EigenPair ep;
    ep.lambda = *it;
    ep.vec = A.eigenvector(*it);
    out.push_back(std::move(ep));
  }
  return out;  // descending
}

// ---------------------------------------------------------------------------
// limit collision operators
// ---------------------------------------------------------------------------

LimitCollisionOperator LimitCollisionOperator::from_event(
    const CollisionEvent& ev, const BilliardSpec& spec, const Mollifier& m) {
  LimitCollisionOperator op;
  op.Z = ev.Z;
  op.b_sum = spec.b_plus + spec.b_minus;
  op.grad_rho = ev.grad_rho;
  op.mol = m;
  op.T = 10.0 / std::abs(ev.Z);
  return op;
}

namespace {

// Rescaled collision-layer trajectory n(zt): the inner orbit decelerates
// into the mollified jump and turns where its normal kinetic energy is
// exhausted, n'^2/2 = Z^2/2 - b_sum g^2 (1 - H(n)).
class LayerOrbit {
 public:
  LayerOrbit(double Z, double b_sum, double g2, const Mollifier& mol)
      : Z_(Z) {
    double Ht = 1.0 - Z * Z / (2 * b_sum * g2);
    double lo = -1, hi = 1;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      (mol.primitive(mid) < Ht ? lo : hi) = mid;
    }
    nt_ = 0.5 * (lo + hi);
    auto W = [&](double n) {
      return Z * Z - 2 * b_sum * g2 * (1.0 - mol.primitive(n));
    };
    const int m = 8000;
    double smax = std::sqrt(std::max(1.0 - nt_, 0.0));
    ns_.resize(m + 1);
    zs_.resize(m + 1);
    ns_[0] = nt_;
    zs_[0] = 0;
    auto integrand = [&](double s) {
      double n = nt_ + s * s;
      return 2 * s / std::sqrt(std::max(W(n), 1e-300));
    };
    for (int i = 1; i <= m; ++i) {
      double s0 = smax * (i - 1) / m, s1 = smax * i / m;
      double mid = 0.5 * (s0 + s1);
      zs_[i] = zs_[i - 1] + ((s1 - s0) / 6.0) *
                                (integrand(s0) + 4 * integrand(mid) +
                                 integrand(s1));
      ns_[i] = nt_ + s1 * s1;
    }
    zexit_ = zs_[m];
  }

  double at(double zt) const {
    zt = std::abs(zt);
    if (zt >= zexit_) return 1.0 + Z_ * (zt - zexit_);
    auto it = std::upper_bound(zs_.begin(), zs_.end(), zt);
    int k = std::min<int>(static_cast<int>(zs_.size()) - 2,
                          std::max<long>(0, it - zs_.begin() - 1));
    double f = (zt - zs_[k]) / std::max(zs_[k + 1] - zs_[k], 1e-300);
    return ns_[k] * (1 - f) + ns_[k + 1] * f;
  }

 private:
  double Z_, nt_ = 0, zexit_ = 0;
  std::vector<double> ns_, zs_;
};

BandedSymmetric scalar_matrix(const LimitCollisionOperator& op,
                              bool linearized) {
  int n = op.nodes;
  double h = 2 * op.T / (n - 1);
  double g2 = op.grad_rho.squaredNorm();
  LayerOrbit layer(op.Z, op.b_sum, g2, op.mol);
  BandedSymmetric A(n, 1);
  for (int i = 0; i < n; ++i) {
    double zt = -op.T + i * h;
    double coord = linearized ? op.Z * std::abs(zt) : layer.at(zt);
    double q = op.b_sum * op.mol.deriv(coord) * g2;
    A.at(i, i) = -2.0 / (h * h) - q;
    if (i + 1 < n) A.at(i + 1, i) = 1.0 / (h * h);
  }
  return A;
}

BandedSymmetric full_matrix(const LimitCollisionOperator& op) {
  int n = op.nodes;
  double h = 2 * op.T / (n - 1);
  double g2 = op.grad_rho.squaredNorm();
  Mat2 G = op.grad_rho * op.grad_rho.transpose();
  LayerOrbit layer(op.Z, op.b_sum, g2, op.mol);
  BandedSymmetric A(2 * n, 2);
  for (int i = 0; i < n; ++i) {
    double zt = -op.T + i * h;
    Mat2 Q = op.b_sum * op.mol.deriv(layer.at(zt)) * G;
    Mat2 diag = -Q - 2.0 / (h * h) * Mat2::Identity();
    for (int p = 0; p < 2; ++p)
      for (int q = p; q < 2; ++q) A.at(2 * i + q, 2 * i + p) += diag(q, p);
    if (i + 1 < n) {
      A.at(2 * (i + 1), 2 * i) += 1.0 / (h * h);
      A.at(2 * (i + 1) + 1, 2 * i + 1) += 1.0 / (h * h);
    }
  }
  return A;
}

}  // namespace

double LimitCollisionOperator::nu_scalar() const {
  auto vals = scalar_matrix(*this, false).eigenvalues_above(0.0);
  if (vals.empty())
    throw Error("limit collision operator has no positive eigenvalue");
  return vals.back();
}

double LimitCollisionOperator::nu_linearized() const {
  auto vals = scalar_matrix(*this, true).eigenvalues_above(0.0);
  if (vals.empty())
    throw Error("limit collision operator has no positive eigenvalue");
  return vals.back();
}

double LimitCollisionOperator::nu_2d() const {
  auto vals = full_matrix(*this).eigenvalues_above(0.0);
  if (vals.empty())
    throw Error("limit collision operator has no positive eigenvalue");
  return vals.back();
}

int LimitCollisionOperator::ground_state_sign_changes() const {
  auto A = scalar_matrix(*this, false);
  double nu = nu_scalar();
  Eigen::VectorXd v = A.eigenvector(nu);
  int flips = 0;
  double prev = 0;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < 1e-8 * v.cwiseAbs().maxCoeff()) continue;
    if (prev != 0 && v[i] * prev < 0) ++flips;
    prev = v[i];
  }
  return flips;
}

// ---------------------------------------------------------------------------
// collision analysis
// ---------------------------------------------------------------------------

SpectralReport collision_analysis(const HomoclinicProfile& profile,
                                  const RegularizedBilliard& pot,
                                  const BilliardHomoclinic& orbit,
                                  double cutoff_c) {
  const int n = profile.grid.nodes;
  const double h = profile.grid.h();
  const double delta = pot.delta();
  SpectralReport rep;
  rep.delta = delta;
  rep.mollifier_tag = pot.mollifier().name();
  rep.expected_collisions = orbit.n_collisions();

  // limit-operator references
  std::vector<double> nus;
  for (const auto& ev : orbit.collisions) {
    auto op = LimitCollisionOperator::from_event(ev, pot.spec(), pot.mollifier());
    nus.push_back(op.nu_scalar());
    rep.nu_linearized_refs.push_back(op.nu_linearized());
  }
  rep.nu_refs = nus;
  double numin = *std::min_element(nus.begin(), nus.end());
  rep.cutoff_c = cutoff_c > 0 ? cutoff_c : 0.25 * numin;
  rep.cutoff = rep.cutoff_c / (delta * delta);

  // collision intervals from the profile
  const auto& rho = *pot.spec().rho;
  std::vector<char> in_band(n, 0);
  for (int i = 0; i < n; ++i)
    in_band[i] = std::abs(rho.value(profile.u.row(i).transpose())) <= delta;
  for (int i = 0; i < n;) {
    if (!in_band[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && in_band[j + 1]) ++j;
    CollisionInterval K;
    K.z_lo = profile.grid.z(i);
    K.z_hi = profile.grid.z(j);
    for (double zc : profile.collision_times)
      if (zc >= K.z_lo - h && zc <= K.z_hi + h) K.z_collision = zc;
    rep.intervals.push_back(K);
    i = j + 1;
  }

  // spectrum above the cutoff
  BandedSymmetric A = assemble_linearization(profile, pot);
  rep.eigenvalues_above_cutoff = A.eigenvalues_above(rep.cutoff);
  std::sort(rep.eigenvalues_above_cutoff.rbegin(),
            rep.eigenvalues_above_cutoff.rend());
  rep.theorem_count_ok = static_cast<int>(rep.eigenvalues_above_cutoff.size()) ==
                         rep.expected_collisions;

  for (double lam : rep.eigenvalues_above_cutoff) {
    Eigen::VectorXd v = A.eigenvector(lam);
    CollisionEigen ce;
    ce.lambda = lam;
    double total = v.squaredNorm();
    double best = 0;
    for (size_t kidx = 0; kidx < rep.intervals.size(); ++kidx) {
      const auto& K = rep.intervals[kidx];
      double mass = 0;
      for (int i = 0; i < n; ++i) {
        double z = profile.grid.z(i);
        if (z >= K.z_lo - delta && z <= K.z_hi + delta)
          mass += v.segment<2>(2 * i).squaredNorm();
      }
      double frac = mass / total;
      if (frac > best) {
        best = frac;
        ce.interval = static_cast<int>(kidx);
      }
    }
    ce.localization = best;
    rep.collision_eigs.push_back(ce);
  }

  // kernel residual |L dz psi| / |dz psi| over interior nodes
  Eigen::VectorXd dpsi(2 * n);
  for (int i = 0; i < n; ++i) {
    dpsi[2 * i] = profile.du(i, 0);
    dpsi[2 * i + 1] = profile.du(i, 1);
  }
  Eigen::VectorXd r = A.apply(dpsi);
  double num = 0, den = 0;
  for (int i = 2; i + 2 < n; ++i) {
    num += r.segment<2>(2 * i).squaredNorm();
    den += dpsi.segment<2>(2 * i).squaredNorm();
  }
  rep.kernel_residual = std::sqrt(num / den);

  Eigen::SelfAdjointEigenSolver<Mat2> es(
      pot.eval_extended(profile.far_field, 2).hess);
  rep.ess_edge = -es.eigenvalues().minCoeff();
  return rep;
}

// ---------------------------------------------------------------------------
// pearling predictor
// ---------------------------------------------------------------------------

double PearlingGeometry::beta(int k) const {
  if (kind == Kind::Circle) {
    double q = k / scale;
    return -q * q;
  }
  double q = 2 * kPi * k / scale;
  return -q * q;
}

std::vector<PearlingMode> pearling_predictor(const std::vector<double>& lambdas,
                                             double epsilon,
                                             const PearlingGeometry& geom,
                                             double tol) {
  if (!(epsilon > 0)) throw ParameterError("pearling predictor requires eps > 0");
  std::vector<PearlingMode> out;
  for (double lam : lambdas) {
    if (lam < 0)
      throw ParameterError("only nonnegative through-plane eigenvalues can pearl");
    PearlingMode pm;
    pm.lambda = lam;
    double factor = geom.kind == PearlingGeometry::Kind::Circle
                        ? geom.scale
                        : geom.scale / (2 * kPi);
    pm.k_star = factor * std::sqrt(lam) / epsilon;
    double window = tol * std::sqrt(epsilon);
    int kmax = static_cast<int>(pm.k_star + 10 +
                                std::sqrt(window) / epsilon * factor);
    for (int k = 0; k <= kmax + 5; ++k) {
      double res = lam + epsilon * epsilon * geom.beta(k);
      if (std::abs(res) <= window) pm.flagged.push_back(k);
    }
    out.push_back(std::move(pm));
  }
  return out;
}

void write_spectral_report(const SpectralReport& rep,
                           const std::string& json_path) {
  std::ofstream f(json_path);
  f.precision(17);
  f << "{\n  \"delta\": " << rep.delta << ",\n  \"cutoff_c\": " << rep.cutoff_c
    << ",\n  \"cutoff\": " << rep.cutoff
    << ",\n  \"expected_collisions\": " << rep.expected_collisions
    << ",\n  \"theorem_count_ok\": " << (rep.theorem_count_ok ? "true" : "false")
    << ",\n  \"kernel_residual\": " << rep.kernel_residual
    << ",\n  \"ess_edge\": " << rep.ess_edge << ",\n  \"mollifier\": \""
    << rep.mollifier_tag << "\",\n  \"nu_refs\": [";
  for (size_t i = 0; i < rep.nu_refs.size(); ++i)
    f << (i ? ", " : "") << rep.nu_refs[i];
  f << "],\n  \"nu_linearized_refs\": [";
  for (size_t i = 0; i < rep.nu_linearized_refs.size(); ++i)
    f << (i ? ", " : "") << rep.nu_linearized_refs[i];
  f << "],\n  \"eigenvalues\": [";
  for (size_t i = 0; i < rep.collision_eigs.size(); ++i) {
    const auto& ce = rep.collision_eigs[i];
    f << (i ? ", " : "") << "{\"lambda\": " << ce.lambda
      << ", \"lambda_delta2\": " << ce.lambda * rep.delta * rep.delta
      << ", \"interval\": " << ce.interval
      << ", \"localization\": " << ce.localization << "}";
  }
  f << "],\n  \"intervals\": [";
  for (size_t i = 0; i < rep.intervals.size(); ++i)
    f << (i ? ", " : "") << "[" << rep.intervals[i].z_lo << ", "
      << rep.intervals[i].z_hi << "]";
  f << "]\n}\n";
}

}  // namespace mfch
