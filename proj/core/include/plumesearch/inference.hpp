#pragma once

#include <span>
#include <vector>

#include "plumesearch/plume.hpp"
#include "plumesearch/rng.hpp"

namespace plumesearch {

struct NormalSpec {
  double mean = 0.0;
  double stddev = 1.0;
};

// Priors over the source term. Location/dispersion parameters are Gaussian;
// the release rate is Gamma(shape, scale). The release-rate prior is stated
// in kg/s in the reference configuration, so q_scale defaults to 1000 g/s.
struct PriorSpec {
  NormalSpec x_s{600.0, 100.0};
  NormalSpec y_s{400.0, 100.0};
  NormalSpec z_s{1.0, 0.5};
  double q_shape = 2.0;
  double q_scale = 1000.0;  // g/s
  NormalSpec u{2.5, 2.0};
  NormalSpec phi{270.0, 10.0};
  NormalSpec d{1.0, 2.0};
  NormalSpec tau{8.0, 2.0};
};

// Weighted-sample posterior over source terms. Weights sum to 1 after every
// update; particle count is fixed for the lifetime of the filter.
struct ParticleSet {
  std::vector<SourceTerm> particles;
  std::vector<double> weights;

  int size() const { return static_cast<int>(particles.size()); }
  double ess() const;  // 1 / sum(w^2)
};

// Sensor likelihood: log-normal around the modelled concentration with the
// density censored at the detection threshold.
struct LikelihoodModel {
  double sigma = 0.3;       // log-space std dev
  double threshold = 0.01;  // g/m^3
  double rho_min = 2.5;     // singularity clamp, cell_size/2
};

struct FilterConfig {
  int n = 20000;
  double eta = 0.5;          // resample when ESS/n drops below this
  double jitter_scale = 0.01;  // fraction of each prior scale
};

struct UpdateResult {
  bool degenerate = false;  // all likelihoods were zero; weights left as-is
  bool resampled = false;
};

// n independent prior draws with uniform weights. Positivity of q, d, tau
// (and u >= 0) is enforced by redraw.
ParticleSet init_prior(const PriorSpec& spec, int n, Rng& rng);

// Density of the measurement under theta. Detections use the log-normal
// density at z.value; non-detections use the probability that a draw falls
// below the threshold. Always finite and >= 0.
double likelihood(const Measurement& z, const SourceTerm& theta, const LikelihoodModel& model);

// Bayes reweight with externally supplied likelihoods; returns true if they
// were all zero (weights then left unchanged).
bool reweight(ParticleSet& ps, std::span<const double> likelihoods);

// One sequential update: reweight by the measurement likelihood, then
// systematic-resample with jitter when ESS/n < eta.
UpdateResult update(ParticleSet& ps, const Measurement& z, const LikelihoodModel& model, const FilterConfig& config,
                    const PriorSpec& prior, Rng& rng);

// Systematic resampling to uniform weights plus a small Gaussian jitter per
// parameter (1% of prior scale by default); phi is wrapped circularly and
// positive parameters are reflected.
void resample_systematic(ParticleSet& ps, const FilterConfig& config, const PriorSpec& prior, Rng& rng);

WorldPoint posterior_mean_location(const ParticleSet& ps);
double location_std(const ParticleSet& ps);
double weighted_rmse(const ParticleSet& ps, const WorldPoint& s_true);

// Weighted circular mean of the wind direction, degrees in [0, 360).
double posterior_mean_phi(const ParticleSet& ps);

}  // namespace plumesearch
