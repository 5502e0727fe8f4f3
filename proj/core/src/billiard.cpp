#include "mfch/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mfch/quintic.hpp"

namespace mfch {

Vec2 reflect(const Vec2& v_minus, const Vec2& n) {
  double vn = n.dot(v_minus);
  if (std::abs(vn) < 1e-12 * v_minus.norm())
    throw DegenerateCollisionError("tangential collision: reflection undefined");
  return v_minus - 2 * vn * n;
}

// ---------------------------------------------------------------------------
// quadrant transit clock: z(r) = -int_r^R0 dr'/sqrt(2 b(r')), exact
// exponential in the quadratic core
// ---------------------------------------------------------------------------

namespace {

class QuadrantClock {
 public:
  explicit QuadrantClock(const BilliardSpec& spec) : spec_(&spec) {
    rq_ = spec.r_quad;
    R0_ = spec.R0;
    int n = 4000;  // composite Simpson nodes over [rq, R0]
    rs_.resize(n + 1);
    zs_.resize(n + 1);
    double h = (R0_ - rq_) / n;
    rs_[n] = R0_;
    zs_[n] = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      double a = rq_ + i * h, b = a + h;
      double m = 0.5 * (a + b);
      double seg = (h / 6.0) * (speed_inv(a) + 4 * speed_inv(m) + speed_inv(b));
      rs_[i] = a;
      zs_[i] = zs_[i + 1] - seg;
    }
    z_quad_ = zs_[0];
  }

  // time at radius r (z = 0 at the quadrant exit r = R0)
  double z_of_r(double r) const {
    if (r >= R0_) return 0.0;
    if (r <= rq_) return z_quad_ - std::log(rq_ / std::max(r, 1e-300)) / kSqrt2;
    auto it = std::upper_bound(rs_.begin(), rs_.end(), r);
    int i = std::min<int>(rs_.size() - 2, std::max<long>(0, it - rs_.begin() - 1));
    double f = (r - rs_[i]) / (rs_[i + 1] - rs_[i]);
    return zs_[i] * (1 - f) + zs_[i + 1] * f;
  }

  double r_of_z(double z) const {
    if (z >= 0) return R0_;
    if (z <= z_quad_) return rq_ * std::exp(kSqrt2 * (z - z_quad_));
    auto it = std::upper_bound(zs_.begin(), zs_.end(), z);
    int i = std::min<int>(zs_.size() - 2, std::max<long>(0, it - zs_.begin() - 1));
    double f = (z - zs_[i]) / (zs_[i + 1] - zs_[i]);
    double r = rs_[i] * (1 - f) + rs_[i + 1] * f;
    // one Newton step on z(r) - z = 0 with dz/dr = 1/sqrt(2 b)
    r -= (z_of_r(r) - z) * std::sqrt(2 * spec_->radial(r));
    return std::clamp(r, 1e-300, R0_);
  }

  double z_quad() const { return z_quad_; }

 private:
  double speed_inv(double r) const {
    return 1.0 / std::sqrt(2.0 * spec_->radial(r));
  }
  static constexpr double kSqrt2 = 1.4142135623730951;
  const BilliardSpec* spec_;
  double rq_, R0_, z_quad_;
  std::vector<double> rs_, zs_;
};

// first root of rho along p + t d on (t_lo, t_hi]; dense scan + bisection
std::optional<double> first_rho_root(const LevelSet& rho, const Vec2& p,
                                     const Vec2& d, double t_lo, double t_hi) {
  if (t_hi <= t_lo) return std::nullopt;
  int n = std::max(64, static_cast<int>((t_hi - t_lo) / 5e-4));
  double prev_t = t_lo;
  double prev_v = rho.value(p + t_lo * d);
  for (int i = 1; i <= n; ++i) {
    double t = t_lo + (t_hi - t_lo) * i / n;
    double v = rho.value(p + t * d);
    if (prev_v > 0 && v <= 0) {
      double a = prev_t, b = t;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (a + b);
        if (rho.value(p + mid * d) > 0)
          a = mid;
        else
          b = mid;
      }
      return 0.5 * (a + b);
    }
    prev_t = t;
    prev_v = v;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// orbit sampling
// ---------------------------------------------------------------------------

namespace {

class OrbitSampler {
 public:
  OrbitSampler(const BilliardHomoclinic& h, const BilliardSpec& spec)
      : h_(&h), spec_(&spec), clock_(spec) {}

  Vec2 u(double z) const {
    const auto& segs = h_->segments;
    if (segs.empty()) return Vec2::Zero();
    if (z <= segs.front().z0) return point_on_radial(segs.front(), z);
    if (z >= segs.back().z1) return point_on_radial(segs.back(), z);
    for (const auto& s : segs) {
      if (z <= s.z1) {
        if (s.kind == BilliardHomoclinic::Segment::Kind::Straight) {
          double f = (z - s.z0) / (s.z1 - s.z0);
          return s.p0 * (1 - f) + s.p1 * f;
        }
        return point_on_radial(s, z);
      }
    }
    return segs.back().p1;
  }

  Vec2 v(double z) const {
    const auto& segs = h_->segments;
    for (size_t i = 0; i < segs.size(); ++i) {
      const auto& s = segs[i];
      if (z <= s.z1 || i + 1 == segs.size()) {
        if (s.kind == BilliardHomoclinic::Segment::Kind::Straight) {
          Vec2 d = (s.p1 - s.p0).normalized();
          return std::sqrt(2 * spec_->b_plus) * d;
        }
        Vec2 p = point_on_radial(s, z);
        double r = p.norm();
        double sp = std::sqrt(2 * spec_->radial(r));
        Vec2 dir = (s.p1 - s.p0);  // inward or outward
        Vec2 uh = r > 0 ? Vec2(p / r) : Vec2(1, 0);
        double sgn = dir.dot(s.p1.norm() > s.p0.norm() ? uh : Vec2(-uh)) >= 0
                         ? (s.p1.norm() > s.p0.norm() ? 1.0 : -1.0)
                         : 1.0;
        return sgn * sp * uh;
      }
    }
    return Vec2::Zero();
  }

 private:
  Vec2 point_on_radial(const BilliardHomoclinic::Segment& s, double z) const {
    bool outgoing = s.p1.norm() > s.p0.norm();
    Vec2 uh = (outgoing ? s.p1 : s.p0).normalized();
    // clock time is 0 at r = R0; segment endpoint times give the offset
    double zR0 = outgoing ? s.z1 : s.z0;
    double tau = outgoing ? (z - zR0) : (zR0 - z);
    return clock_.r_of_z(tau) * uh;
  }

  const BilliardHomoclinic* h_;
  const BilliardSpec* spec_;
  QuadrantClock clock_;
};

}  // namespace

Vec2 BilliardHomoclinic::at(double z, const BilliardSpec& spec) const {
  return OrbitSampler(*this, spec).u(z);
}

double BilliardHomoclinic::energy_defect(const BilliardSpec& spec,
                                         int samples) const {
  OrbitSampler s(*this, spec);
  double z0 = segments.front().z0, z1 = segments.back().z1;
  double worst = 0;
  for (int i = 0; i <= samples; ++i) {
    double z = z0 + (z1 - z0) * i / samples;
    // skip the immediate vicinity of collisions (velocity jumps there)
    bool near_col = false;
    for (const auto& c : collisions)
      if (std::abs(z - c.z) < 1e-3) near_col = true;
    if (near_col) continue;
    Vec2 u = s.u(z), v = s.v(z);
    double B = spec.eval(u, 0).value;
    worst = std::max(worst, std::abs(0.5 * v.squaredNorm() - B));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// tracing
// ---------------------------------------------------------------------------

TraceResult trace_homoclinic(const BilliardSpec& spec, double exit_angle,
                             int max_collisions, double return_tol) {
  if (exit_angle < -1e-12 || exit_angle > kPi / 2 + 1e-12)
    throw ParameterError("exit ray must lie inside the physical quadrant");
  TraceResult result;
  BilliardHomoclinic orbit;
  orbit.entry_angle = exit_angle;

  const double speed = std::sqrt(2 * spec.b_plus);
  QuadrantClock clock(spec);
  const double rmin = orbit.quad_clip_radius;

  Vec2 dir(std::cos(exit_angle), std::sin(exit_angle));
  Vec2 p = spec.R0 * dir;
  double z = 0.0;  // provisional time, shifted so z = 0 at first collision

  orbit.segments.push_back({BilliardHomoclinic::Segment::Kind::RadialArc,
                            rmin * dir, p, z + clock.z_of_r(rmin), z});

  for (int leg = 0; leg <= max_collisions; ++leg) {
    double t_ca = -p.dot(dir);
    double d_min = (p + std::max(t_ca, 0.0) * dir).norm();
    double t_quad = -1;
    if (t_ca > 0 && d_min < spec.R0) {
      t_quad = t_ca - std::sqrt(spec.R0 * spec.R0 - d_min * d_min);
    }
    double t_escape = 4.0;  // beyond the far structure of every level set
    double t_hi = t_quad > 0 ? t_quad : t_escape;

    auto root = first_rho_root(*spec.rho, p, dir, 1e-9, t_hi);
    if (root) {
      if (leg == max_collisions) {
        result.homoclinic = false;
        result.collision_count = orbit.n_collisions();
        result.reason = "max collision count exceeded";
        result.miss_distance = d_min;
        return result;
      }
      double t = *root;
      Vec2 c = p + t * dir;
      Vec2 grho = spec.rho->grad(c);
      Vec2 n = grho.normalized();
      Vec2 vm = speed * dir;
      if (std::abs(n.dot(dir)) < 1e-8)
        throw DegenerateCollisionError("tangential collision at traced point");
      Vec2 vp = reflect(vm, n);

      CollisionEvent ev;
      ev.z = z + t / speed;
      ev.point = c;
      ev.normal = n;
      ev.v_minus = vm;
      ev.v_plus = vp;
      ev.grad_rho = grho;
      ev.Z = 0.5 * (vp - vm).dot(grho);
      orbit.collisions.push_back(ev);

      orbit.segments.push_back({BilliardHomoclinic::Segment::Kind::Straight, p,
                                c, z, ev.z});
      p = c;
      z = ev.z;
      dir = vp.normalized();
      continue;
    }

    if (t_quad > 0) {
      // ray enters the quadrant; homoclinic iff it aims at the origin
      result.miss_distance = d_min;
      result.collision_count = orbit.n_collisions();
      if (d_min <= return_tol && orbit.n_collisions() >= 1) {
        Vec2 q = p + t_quad * dir;
        double zq = z + t_quad / speed;
        orbit.segments.push_back({BilliardHomoclinic::Segment::Kind::Straight,
                                  p, q, z, zq});
        orbit.segments.push_back({BilliardHomoclinic::Segment::Kind::RadialArc,
                                  q, rmin * q.normalized(), zq,
                                  zq - clock.z_of_r(rmin)});
        orbit.exit_angle = std::atan2(q[1], q[0]);
        // shift times so the first collision sits at z = 0
        double shift = orbit.collisions.front().z;
        for (auto& s : orbit.segments) {
          s.z0 -= shift;
          s.z1 -= shift;
        }
        for (auto& cev : orbit.collisions) cev.z -= shift;
        result.homoclinic = true;
        result.orbit = std::move(orbit);
        return result;
      }
      result.homoclinic = false;
      result.reason = orbit.n_collisions() == 0
                          ? "ray re-enters quadrant without any collision"
                          : "return ray misses the origin";
      return result;
    }

    result.homoclinic = false;
    result.collision_count = orbit.n_collisions();
    result.miss_distance = d_min;
    result.reason = "trajectory escapes the billiard structure";
    return result;
  }
  result.reason = "max collision count exceeded";
  return result;
}

// ---------------------------------------------------------------------------
// ray-traced collision curves
// ---------------------------------------------------------------------------

namespace {

class BlendedArcsLevelSet final : public LevelSet {
 public:
  BlendedArcsLevelSet(Vec2 o1, double R1, Vec2 o2, double R2, Vec2 mid,
                      Vec2 axis, double width)
      : o1_(o1), R1_(R1), o2_(o2), R2_(R2), mid_(mid), axis_(axis), w_(width) {}

  double value(const Vec2& u) const override {
    double s = axis_.dot(u - mid_) / w_;
    double sig = smoothstep5(s);
    return (1 - sig) * rho1(u) + sig * rho2(u);
  }

  Vec2 grad(const Vec2& u) const override {
    double s = axis_.dot(u - mid_) / w_;
    double sig = smoothstep5(s);
    double dsig = smoothstep5_d(s) / w_;
    return (1 - sig) * g1(u) + sig * g2(u) + dsig * (rho2(u) - rho1(u)) * axis_;
  }

  Mat2 hess(const Vec2& u) const override {
    double s = axis_.dot(u - mid_) / w_;
    double sig = smoothstep5(s);
    double dsig = smoothstep5_d(s) / w_;
    double ddsig = smoothstep5_dd(s) / (w_ * w_);
    Vec2 dg = g2(u) - g1(u);
    Mat2 h = (1 - sig) * h1(u) + sig * h2(u);
    h += dsig * (axis_ * dg.transpose() + dg * axis_.transpose());
    h += ddsig * (rho2(u) - rho1(u)) * axis_ * axis_.transpose();
    return h;
  }

 private:
  double rho1(const Vec2& u) const { return (u - o1_).norm() - R1_; }
  double rho2(const Vec2& u) const { return (u - o2_).norm() - R2_; }
  Vec2 g1(const Vec2& u) const { return (u - o1_).normalized(); }
  Vec2 g2(const Vec2& u) const { return (u - o2_).normalized(); }
  Mat2 h1(const Vec2& u) const {
    Vec2 r = u - o1_;
    double n = r.norm();
    Vec2 rh = r / n;
    return (Mat2::Identity() - rh * rh.transpose()) / n;
  }
  Mat2 h2(const Vec2& u) const {
    Vec2 r = u - o2_;
    double n = r.norm();
    Vec2 rh = r / n;
    return (Mat2::Identity() - rh * rh.transpose()) / n;
  }

  Vec2 o1_;
  double R1_;
  Vec2 o2_;
  double R2_;
  Vec2 mid_, axis_;
  double w_;
};

}  // namespace

BilliardSpec raytrace_collision_curve(const Vec2& c1, const Vec2& c2,
                                      double arc_halfwidth) {
  const double R0 = 0.25;
  if ((c1 - c2).norm() < 1e-8)
    throw ParameterError("raytrace requires two distinct collision points");
  if (c1.norm() <= R0 || c2.norm() <= R0)
    throw ParameterError("collision points must lie in the billiard region");
  if (c1[0] < 0 || c1[1] < 0 || c2[0] < 0 || c2[1] < 0)
    throw ParameterError("collision points must lie in the physical quadrant");

  Vec2 e0 = c1.normalized();
  Vec2 e1 = (c2 - c1).normalized();
  Vec2 e2 = (-c2).normalized();

  Vec2 n1raw = e1 - e0;
  Vec2 n2raw = e2 - e1;
  if (n1raw.norm() < 1e-10 || n2raw.norm() < 1e-10)
    throw ConstructionError("collinear legs: reflection normal undefined");
  Vec2 n1 = n1raw.normalized();
  Vec2 n2 = n2raw.normalized();
  if (std::abs(n1.dot(e0)) < 1e-6 || std::abs(n2.dot(e1)) < 1e-6)
    throw ConstructionError("required normal is tangential to a leg");

  double gap = 0.5 * (c2 - c1).norm();
  double w = arc_halfwidth > 0 ? arc_halfwidth : 0.8 * gap;
  if (w > 0.95 * gap)
    throw ParameterError("arc halfwidth too large: blend would reach the collision points");

  double Rarc = 1.2 * gap;
  Vec2 o1 = c1 - Rarc * n1;
  Vec2 o2 = c2 - Rarc * n2;
  Vec2 mid = 0.5 * (c1 + c2);
  Vec2 axis = (c2 - c1).normalized();

  BilliardSpec spec;
  spec.R0 = R0;
  spec.b_plus = 0.25;
  spec.b_minus = 0.25;
  spec.r_quad = 0.15;
  spec.rho = std::make_shared<BlendedArcsLevelSet>(o1, Rarc, o2, Rarc, mid,
                                                   axis, w);
  spec.tag = "raytraced";

  // delta0 from quadrant clearance and mid-leg clearance
  double dmin = 1e9;
  for (int i = 0; i <= 720; ++i) {
    double a = (kPi / 2) * i / 720.0;
    Vec2 u(R0 * std::cos(a), R0 * std::sin(a));
    dmin = std::min(dmin, std::abs(spec.rho->value(u)));
  }
  // collision intervals stay disjoint as long as the band does not swallow
  // the middle of the flight leg
  for (int i = 0; i <= 200; ++i) {
    double f = 0.4 + 0.2 * i / 200.0;
    Vec2 u = c1 * (1 - f) + c2 * f;
    dmin = std::min(dmin, std::abs(spec.rho->value(u)));
  }
  spec.delta0 = 0.95 * dmin;
  spec.validate();

  // self-consistency: the triangle must be the traced orbit
  auto tr = trace_homoclinic(spec, std::atan2(c1[1], c1[0]), 4);
  if (!tr.homoclinic || tr.orbit->n_collisions() != 2)
    throw SpecInconsistencyError("ray-traced spec does not reproduce the triangle orbit");
  if ((tr.orbit->collisions[0].point - c1).norm() > 1e-7 ||
      (tr.orbit->collisions[1].point - c2).norm() > 1e-7)
    throw SpecInconsistencyError("traced collision points drifted from the prescribed ones");
  return spec;
}

// ---------------------------------------------------------------------------
// transversality proxy
// ---------------------------------------------------------------------------

std::string TransversalityReport::describe() const {
  switch (verdict) {
    case Verdict::Transversal: return "transversal";
    case Verdict::DegenerateFamily: return "degenerate-family";
    case Verdict::NonHomoclinic: return "non-homoclinic";
  }
  return "?";
}

TransversalityReport verify_transversality_proxy(const BilliardHomoclinic& h,
                                                 const BilliardSpec& spec,
                                                 int perturbation_count) {
  TransversalityReport rep;
  double theta0 = h.entry_angle;
  auto base = trace_homoclinic(spec, theta0, 8);
  if (!base.homoclinic) {
    rep.verdict = TransversalityReport::Verdict::NonHomoclinic;
    return rep;
  }
  perturbation_count = std::max(2, perturbation_count);
  for (int k = 0; k < perturbation_count; ++k) {
    double eta = std::pow(10.0, -3 - k);
    double miss = 0;
    for (double sgn : {-1.0, 1.0}) {
      auto t = trace_homoclinic(spec, theta0 + sgn * eta, 8);
      miss = std::max(miss, t.miss_distance);
    }
    rep.etas.push_back(eta);
    rep.misses.push_back(miss);
  }
  double mmax = *std::max_element(rep.misses.begin(), rep.misses.end());
  if (mmax < 1e-9) {
    rep.verdict = TransversalityReport::Verdict::DegenerateFamily;
    rep.fitted_exponent = 0;
    return rep;
  }
  // least-squares slope of log(miss) vs log(eta)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = rep.etas.size();
  for (int i = 0; i < n; ++i) {
    double x = std::log(rep.etas[i]);
    double y = std::log(std::max(rep.misses[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.verdict = (rep.fitted_exponent >= 0.8 && rep.fitted_exponent <= 1.2)
                    ? TransversalityReport::Verdict::Transversal
                    : TransversalityReport::Verdict::DegenerateFamily;
  return rep;
}

void write_homoclinic_csv(const BilliardHomoclinic& h, const BilliardSpec& spec,
                          const std::string& traj_path,
                          const std::string& collision_path, int samples) {
  OrbitSampler s(h, spec);
  std::ofstream f(traj_path);
  f.precision(17);
  f << "z,u1,u2,v1,v2,segment_id\n";
  double z0 = h.segments.front().z0, z1 = h.segments.back().z1;
  for (int i = 0; i <= samples; ++i) {
    double z = z0 + (z1 - z0) * i / samples;
    Vec2 u = s.u(z), v = s.v(z);
    int seg = 0;
    for (size_t k = 0; k < h.segments.size(); ++k)
      if (z >= h.segments[k].z0) seg = static_cast<int>(k);
    f << z << ',' << u[0] << ',' << u[1] << ',' << v[0] << ',' << v[1] << ','
      << seg << '\n';
  }
  std::ofstream g(collision_path);
  g.precision(17);
  g << "z,c1,c2,n1,n2,Z\n";
  for (const auto& c : h.collisions)
    g << c.z << ',' << c.point[0] << ',' << c.point[1] << ',' << c.normal[0]
      << ',' << c.normal[1] << ',' << c.Z << '\n';
}

}  // namespace mfch
