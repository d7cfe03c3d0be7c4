#include "plumesearch/search_utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plumesearch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double current_weight_entropy(const ParticleSet& ps) {
  double h = 0.0;
  for (double w : ps.weights) {
    if (w > 0.0) h += w * std::log(w);
  }
  return h;
}

// Sum of p*log(p) for the hypothetical posterior given one measurement,
// computed from cached log-concentrations. Mirrors inference::likelihood up
// to factors constant across particles, which cancel in the normalisation.
// Returns the current-weight entropy when every likelihood vanishes.
double reweight_entropy(const ParticleSet& ps, const Measurement& z, std::span<const double> log_c,
                        std::span<const double> censor, const LikelihoodModel& model, bool& degenerate) {
  const int n = ps.size();
  degenerate = false;

  if (!z.detected) {
    double sum = 0.0, acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = ps.weights[static_cast<std::size_t>(i)] * censor[static_cast<std::size_t>(i)];
      if (u > 0.0) {
        sum += u;
        acc += u * std::log(u);
      }
    }
    if (!(sum > 0.0)) {
      degenerate = true;
      return current_weight_entropy(ps);
    }
    return acc / sum - std::log(sum);
  }

  const double log_z = std::log(z.value);
  const double inv_two_sigma_sq = 1.0 / (2.0 * model.sigma * model.sigma);
  thread_local std::vector<double> log_u;
  log_u.resize(static_cast<std::size_t>(n));
  double max_lu = -kInf;
  for (int i = 0; i < n; ++i) {
    const double w = ps.weights[static_cast<std::size_t>(i)];
    if (w > 0.0) {
      const double t = log_z - log_c[static_cast<std::size_t>(i)];
      log_u[static_cast<std::size_t>(i)] = std::log(w) - t * t * inv_two_sigma_sq;
      max_lu = std::max(max_lu, log_u[static_cast<std::size_t>(i)]);
    } else {
      log_u[static_cast<std::size_t>(i)] = -kInf;
    }
  }
  if (!std::isfinite(max_lu)) {
    degenerate = true;
    return current_weight_entropy(ps);
  }
  double sum = 0.0, acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double lu = log_u[static_cast<std::size_t>(i)] - max_lu;
    if (lu > -700.0) {
      const double u = std::exp(lu);
      sum += u;
      acc += u * lu;
    }
  }
  return acc / sum - std::log(sum);
}

struct CandidateCache {
  std::vector<double> log_c;   // per particle, at the candidate point
  std::vector<double> censor;  // P(draw below threshold), per particle
};

void fill_cache(CandidateCache& cache, const ParticleSet& ps, const WorldPoint& x, const LikelihoodModel& model,
                bool need_censor) {
  const int n = ps.size();
  cache.log_c.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    cache.log_c[static_cast<std::size_t>(i)] =
        log_expected_concentration(x, ps.particles[static_cast<std::size_t>(i)], model.rho_min);
  }
  cache.censor.resize(static_cast<std::size_t>(n));
  if (need_censor) {
    const double log_t = std::log(model.threshold);
    for (int i = 0; i < n; ++i) {
      cache.censor[static_cast<std::size_t>(i)] = phi_cdf((log_t - cache.log_c[static_cast<std::size_t>(i)]) / model.sigma);
    }
  }
}

Measurement predicted_measurement(double log_c, double noise, const WorldPoint& x, const LikelihoodModel& model) {
  const double value = std::exp(log_c + model.sigma * noise);
  Measurement z;
  z.position = x;
  z.detected = value >= model.threshold;
  z.value = z.detected ? value : 0.0;
  return z;
}

double utility_from_cache(const ParticleSet& ps, std::span<const Measurement> z_hat, const CandidateCache& cache,
                          const LikelihoodModel& model, int* degenerate_terms) {
  const int n_z = static_cast<int>(z_hat.size());
  double psi = 0.0;
  double censored_entropy = 0.0;
  bool censored_done = false;
  for (int l = 0; l < n_z; ++l) {
    const Measurement& z = z_hat[static_cast<std::size_t>(l)];
    bool degenerate = false;
    double h;
    if (!z.detected) {
      // Every non-detection yields the same hypothetical posterior.
      if (!censored_done) {
        censored_entropy = reweight_entropy(ps, z, cache.log_c, cache.censor, model, degenerate);
        censored_done = true;
        if (degenerate && degenerate_terms) ++*degenerate_terms;
      }
      h = censored_entropy;
    } else {
      h = reweight_entropy(ps, z, cache.log_c, cache.censor, model, degenerate);
      if (degenerate && degenerate_terms) ++*degenerate_terms;
    }
    psi += h;
  }
  return psi / n_z;
}

}  // namespace

PredictiveDraws make_predictive_draws(const ParticleSet& ps, int n_z, bool noiseless, Rng& rng) {
  if (n_z < 1) throw std::invalid_argument("predictive draws: n_z must be >= 1");
  PredictiveDraws draws;
  draws.indices.reserve(static_cast<std::size_t>(n_z));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Categorical resampling by inverse CDF over the running weight sum.
  std::vector<double> cum(ps.weights.size());
  double run = 0.0;
  for (std::size_t i = 0; i < ps.weights.size(); ++i) {
    run += ps.weights[i];
    cum[i] = run;
  }
  cum.back() = 1.0;
  for (int l = 0; l < n_z; ++l) {
    const double u = unit(rng);
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    draws.indices.push_back(static_cast<int>(std::min<std::size_t>(it - cum.begin(), cum.size() - 1)));
  }
  if (!noiseless) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    draws.noise.reserve(static_cast<std::size_t>(n_z));
    for (int l = 0; l < n_z; ++l) draws.noise.push_back(gauss(rng));
  }
  return draws;
}

PredictiveSet predictive_measurements(const ParticleSet& ps, const WorldPoint& x_cand, int n_z,
                                      const LikelihoodModel& model, bool noiseless, Rng& rng) {
  if (n_z > ps.size()) throw std::invalid_argument("predictive_measurements: n_z must not exceed the particle count");
  const PredictiveDraws draws = make_predictive_draws(ps, n_z, noiseless, rng);
  PredictiveSet set;
  set.hypotheses.reserve(static_cast<std::size_t>(n_z));
  set.predicted.reserve(static_cast<std::size_t>(n_z));
  for (int l = 0; l < n_z; ++l) {
    const SourceTerm& theta = ps.particles[static_cast<std::size_t>(draws.indices[static_cast<std::size_t>(l)])];
    set.hypotheses.push_back(theta);
    const double log_c = log_expected_concentration(x_cand, theta, model.rho_min);
    const double noise = noiseless ? 0.0 : draws.noise[static_cast<std::size_t>(l)];
    set.predicted.push_back(predicted_measurement(log_c, noise, x_cand, model));
  }
  return set;
}

double entrotaxis_utility(const ParticleSet& ps, std::span<const Measurement> z_hat, const LikelihoodModel& model,
                          int* degenerate_terms) {
  if (z_hat.empty()) throw std::invalid_argument("entrotaxis_utility: empty measurement set");
  const WorldPoint& x = z_hat.front().position;
  bool any_censored = false;
  for (const Measurement& z : z_hat) any_censored |= !z.detected;
  thread_local CandidateCache cache;
  fill_cache(cache, ps, x, model, any_censored);
  return utility_from_cache(ps, z_hat, cache, model, degenerate_terms);
}

double entrotaxis_utility(const ParticleSet& ps, const WorldPoint& x_cand, const PredictiveDraws& draws,
                          const LikelihoodModel& model, int* degenerate_terms) {
  thread_local CandidateCache cache;
  fill_cache(cache, ps, x_cand, model, true);
  const int n_z = static_cast<int>(draws.indices.size());
  std::vector<Measurement> z_hat;
  z_hat.reserve(static_cast<std::size_t>(n_z));
  for (int l = 0; l < n_z; ++l) {
    const double log_c = cache.log_c[static_cast<std::size_t>(draws.indices[static_cast<std::size_t>(l)])];
    const double noise = draws.noise.empty() ? 0.0 : draws.noise[static_cast<std::size_t>(l)];
    z_hat.push_back(predicted_measurement(log_c, noise, x_cand, model));
  }
  return utility_from_cache(ps, z_hat, cache, model, degenerate_terms);
}

double entrotaxis_utility(const ParticleSet& ps, const WorldPoint& x_cand, int n_z, const LikelihoodModel& model,
                          bool noiseless, Rng& rng, int* degenerate_terms) {
  const PredictiveDraws draws = make_predictive_draws(ps, n_z, noiseless, rng);
  return entrotaxis_utility(ps, x_cand, draws, model, degenerate_terms);
}

int select_candidate(std::span<const WorldPoint> endpoints, std::span<const double> lengths, const ParticleSet& ps,
                     int n_z, const LikelihoodModel& model, bool noiseless, Rng& rng,
                     std::vector<double>* utilities, int* degenerate_terms) {
  if (endpoints.empty()) throw std::invalid_argument("select_candidate: empty candidate set");
  const PredictiveDraws draws = make_predictive_draws(ps, n_z, noiseless, rng);

  // The winner is the candidate with the largest expected entropy reduction,
  // i.e. the largest mean sum of w*log(w) over its hypothetical posteriors.
  // An uninformative candidate scores exactly the current-weight entropy and
  // can never beat an informative one.
  int best = -1;
  double best_psi = -kInf;
  if (utilities) utilities->clear();
  for (std::size_t k = 0; k < endpoints.size(); ++k) {
    const double psi = entrotaxis_utility(ps, endpoints[k], draws, model, degenerate_terms);
    if (utilities) utilities->push_back(psi);
    if (best < 0) {
      best = static_cast<int>(k);
      best_psi = psi;
      continue;
    }
    const bool better =
        psi > best_psi ||
        (psi == best_psi &&
         (lengths[k] < lengths[static_cast<std::size_t>(best)] ||
          (lengths[k] == lengths[static_cast<std::size_t>(best)] &&
           (endpoints[k].x < endpoints[static_cast<std::size_t>(best)].x ||
            (endpoints[k].x == endpoints[static_cast<std::size_t>(best)].x &&
             endpoints[k].y < endpoints[static_cast<std::size_t>(best)].y)))));
    if (better) {
      best = static_cast<int>(k);
      best_psi = psi;
    }
  }
  return best;
}

const CandidatePath& select_path(std::span<const CandidatePath> sigma, const ParticleSet& ps, int n_z,
                                 const LikelihoodModel& model, bool noiseless, Rng& rng,
                                 std::vector<double>* utilities, int* degenerate_terms) {
  if (sigma.empty()) throw std::runtime_error("select_path: empty candidate set");
  std::vector<WorldPoint> endpoints;
  std::vector<double> lengths;
  endpoints.reserve(sigma.size());
  lengths.reserve(sigma.size());
  for (const CandidatePath& path : sigma) {
    endpoints.push_back(path.terminal());
    lengths.push_back(path.length);
  }
  const int k = select_candidate(endpoints, lengths, ps, n_z, model, noiseless, rng, utilities, degenerate_terms);
  return sigma[static_cast<std::size_t>(k)];
}

}  // namespace plumesearch
