#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfch/dressing.hpp"
#include "mfch/fft.hpp"
#include "mfch/field.hpp"
#include "mfch/potentials.hpp"

namespace mfch {

struct SolverConfig {
  double dt = 5e-4;
  double t_end = 1.0;
  enum class Scheme { SemiImplicit, StabilizedSemiImplicit };
  Scheme scheme = Scheme::StabilizedSemiImplicit;
  double sigma = -1;  // < 0: 2 (max |hess| along the initial field)^2
  int snapshot_every = 0;
  bool dealias = true;
  double energy_tol = 1e-10;  // relative increase triggering dt halving
  int max_halvings = 10;
};

/// Angular probe along one striation circle.
struct LayerProbe {
  Vec2 center = Vec2::Zero();
  double radius = 1;
  Vec2 direction = Vec2::UnitX();  // component of u sampled (collision normal)
  int samples = 512;
  int kmax = 64;
};

struct LayerSignal {
  int k_dominant = 0;    // dominant angular mode with k >= 2
  double amplitude = 0;  // |Fourier amplitude| of the dominant mode
};

LayerSignal measure_layer(const FieldState& f, const LayerProbe& probe);

struct Diagnostics {
  std::vector<double> t, energy, mass1, mass2, maxu;
  std::vector<double> amp_inner, amp_outer;
  std::vector<int> k_inner, k_outer;
  long excursions = 0;       // cells observed outside the physical domain
  double dt_max_reported = 0;
  int halvings = 0;
};

/// Variational derivative of the mFCH energy (spectral Laplacians,
/// pointwise nonlinear terms).  Exact discrete gradient of energy_full.
void variational_derivative(const FieldState& state, const Potential& pot,
                            const Solenoidal& V, const SpectralGrid& sg,
                            std::vector<double>& mu1, std::vector<double>& mu2);

/// H^{-1} gradient-flow stepper u_t = Lap mu with first-order semi-implicit
/// splitting; the (eps^4 Lap^2 + sigma) Lap part is implicit.
class Flow2D {
 public:
  Flow2D(FieldState init, const Potential& pot, const Solenoidal& V,
         SolverConfig cfg);

  const FieldState& state() const { return state_; }
  const Diagnostics& diagnostics() const { return diag_; }
  double sigma() const { return sigma_; }

  void set_probes(const LayerProbe& inner, const LayerProbe& outer);

  /// Advance one accepted step (dt halves on an energy increase).
  void step();

  /// Run to t_end; on_snapshot fires every snapshot_every accepted steps.
  void run(const std::function<void(const FieldState&, long)>& on_snapshot = {});

  double energy() const;

 private:
  void record();

  FieldState state_;
  const Potential* pot_;
  const Solenoidal* V_;
  SolverConfig cfg_;
  SpectralGrid sg_;
  double sigma_ = 0;
  double dt_ = 0;
  long steps_ = 0;
  Diagnostics diag_;
  std::optional<LayerProbe> probe_inner_, probe_outer_;
  const RegularizedBilliard* rb_ = nullptr;
};

/// Outcome of one pearling run.
struct PearlingRun {
  std::string offset;      // above | tuned | below
  Diagnostics diag;
  double growth_inner = 1, growth_outer = 1;
  bool pearled_inner = false, pearled_outer = false;
  int k_inner = 0, k_outer = 0;
};

struct PearlingSetup {
  double epsilon = 0.2;
  double delta = 0.2;
  double eta1 = 1, eta2 = 1;
  int grid = 256;
  double circle_radius = 1.6;
  double l0 = 0.5;
  double seed_amplitude = 1e-4;
  unsigned long seed = 2024;
  double dt = 2e-4;
  double t_end = 6.0;
  double growth_flag = 10.0;
};

/// The layer-localized pearling experiment on the AB-type two-collision
/// bilayer: dress a perturbed circle, offset the total mass, run the flow
/// and watch the angular spectrum of each striation.
PearlingRun pearling_experiment(const std::string& offset,
                                const PearlingSetup& setup,
                                const std::string& out_dir = "");

void write_diagnostics_csv(const Diagnostics& d, const std::string& path);

}  // namespace mfch
