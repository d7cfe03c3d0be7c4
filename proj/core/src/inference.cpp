#include "plumesearch/inference.hpp"

#include <cmath>
#include <stdexcept>

namespace plumesearch {

namespace {

constexpr double kPi = 3.14159265358979323846;

double positive_normal_draw(const NormalSpec& s, Rng& rng, bool strict) {
  std::normal_distribution<double> dist(s.mean, s.stddev);
  for (int tries = 0; tries < 1000; ++tries) {
    const double v = dist(rng);
    if (strict ? v > 0.0 : v >= 0.0) return v;
  }
  return strict ? s.stddev * 1e-6 : 0.0;  // pathological spec; keep going
}

// Standard normal CDF.
double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

double ParticleSet::ess() const {
  double sum_sq = 0.0;
  for (double w : weights) sum_sq += w * w;
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

ParticleSet init_prior(const PriorSpec& spec, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("init_prior: n must be >= 1");
  std::normal_distribution<double> nx(spec.x_s.mean, spec.x_s.stddev);
  std::normal_distribution<double> ny(spec.y_s.mean, spec.y_s.stddev);
  std::normal_distribution<double> nz(spec.z_s.mean, spec.z_s.stddev);
  std::gamma_distribution<double> nq(spec.q_shape, spec.q_scale);
  std::normal_distribution<double> nphi(spec.phi.mean, spec.phi.stddev);

  ParticleSet ps;
  ps.particles.resize(static_cast<std::size_t>(n));
  ps.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
  for (SourceTerm& t : ps.particles) {
    t.s_x = nx(rng);
    t.s_y = ny(rng);
    t.s_z = nz(rng);
    do {
      t.q = nq(rng);
    } while (!(t.q > 0.0));
    t.u = positive_normal_draw(spec.u, rng, false);
    t.phi = wrap_degrees_360(nphi(rng));
    t.d = positive_normal_draw(spec.d, rng, true);
    t.tau = positive_normal_draw(spec.tau, rng, true);
  }
  return ps;
}

double likelihood(const Measurement& z, const SourceTerm& theta, const LikelihoodModel& model) {
  const double log_c = log_expected_concentration(z.position, theta, model.rho_min);
  if (z.detected) {
    if (!(z.value > 0.0)) return 0.0;
    const double t = (std::log(z.value) - log_c) / model.sigma;
    return std::exp(-0.5 * t * t) / (z.value * model.sigma * std::sqrt(2.0 * kPi));
  }
  if (!(model.threshold > 0.0)) return 0.0;  // a zero threshold detects everything
  return phi_cdf((std::log(model.threshold) - log_c) / model.sigma);
}

bool reweight(ParticleSet& ps, std::span<const double> likelihoods) {
  double total = 0.0;
  for (int i = 0; i < ps.size(); ++i) total += ps.weights[i] * likelihoods[i];
  if (!(total > 0.0) || !std::isfinite(total)) return true;
  for (int i = 0; i < ps.size(); ++i) ps.weights[i] = ps.weights[i] * likelihoods[i] / total;
  // Renormalise once more to absorb rounding in the running sum.
  double check = 0.0;
  for (double w : ps.weights) check += w;
  for (double& w : ps.weights) w /= check;
  return false;
}

void resample_systematic(ParticleSet& ps, const FilterConfig& config, const PriorSpec& prior, Rng& rng) {
  const int n = ps.size();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double step = 1.0 / n;
  const double start = unit(rng) * step;

  std::vector<SourceTerm> next;
  next.reserve(static_cast<std::size_t>(n));
  double cum = ps.weights[0];
  int i = 0;
  for (int j = 0; j < n; ++j) {
    const double u = start + j * step;
    while (u > cum && i < n - 1) {
      ++i;
      cum += ps.weights[i];
    }
    next.push_back(ps.particles[i]);
  }
  ps.particles = std::move(next);
  std::fill(ps.weights.begin(), ps.weights.end(), step);

  // Jitter against impoverishment under the constant-state transition.
  if (config.jitter_scale > 0.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double js = config.jitter_scale;
    for (SourceTerm& t : ps.particles) {
      t.s_x += js * prior.x_s.stddev * gauss(rng);
      t.s_y += js * prior.y_s.stddev * gauss(rng);
      t.s_z += js * prior.z_s.stddev * gauss(rng);
      t.q = std::abs(t.q + js * prior.q_scale * gauss(rng));
      t.u = std::abs(t.u + js * prior.u.stddev * gauss(rng));
      t.phi = wrap_degrees_360(t.phi + js * prior.phi.stddev * gauss(rng));
      t.d = std::abs(t.d + js * prior.d.stddev * gauss(rng));
      t.tau = std::abs(t.tau + js * prior.tau.stddev * gauss(rng));
    }
  }
}

UpdateResult update(ParticleSet& ps, const Measurement& z, const LikelihoodModel& model, const FilterConfig& config,
                    const PriorSpec& prior, Rng& rng) {
  std::vector<double> lik(static_cast<std::size_t>(ps.size()));
  for (int i = 0; i < ps.size(); ++i) lik[i] = likelihood(z, ps.particles[i], model);

  UpdateResult result;
  result.degenerate = reweight(ps, lik);
  if (ps.ess() / ps.size() < config.eta) {
    resample_systematic(ps, config, prior, rng);
    result.resampled = true;
  }
  return result;
}

WorldPoint posterior_mean_location(const ParticleSet& ps) {
  WorldPoint mean;
  for (int i = 0; i < ps.size(); ++i) {
    mean.x += ps.weights[i] * ps.particles[i].s_x;
    mean.y += ps.weights[i] * ps.particles[i].s_y;
  }
  return mean;
}

double location_std(const ParticleSet& ps) {
  const WorldPoint mean = posterior_mean_location(ps);
  double var = 0.0;
  for (int i = 0; i < ps.size(); ++i) {
    const double dx = ps.particles[i].s_x - mean.x;
    const double dy = ps.particles[i].s_y - mean.y;
    var += ps.weights[i] * (dx * dx + dy * dy);
  }
  return std::sqrt(var);
}

double weighted_rmse(const ParticleSet& ps, const WorldPoint& s_true) {
  double acc = 0.0;
  for (int i = 0; i < ps.size(); ++i) {
    const double dx = ps.particles[i].s_x - s_true.x;
    const double dy = ps.particles[i].s_y - s_true.y;
    acc += ps.weights[i] * (dx * dx + dy * dy);
  }
  return std::sqrt(acc);
}

double posterior_mean_phi(const ParticleSet& ps) {
  double s = 0.0, c = 0.0;
  for (int i = 0; i < ps.size(); ++i) {
    const double r = ps.particles[i].phi * kDegToRad;
    s += ps.weights[i] * std::sin(r);
    c += ps.weights[i] * std::cos(r);
  }
  return wrap_degrees_360(std::atan2(s, c) / kDegToRad);
}

}  // namespace plumesearch
