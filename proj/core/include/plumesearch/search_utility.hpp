#pragma once

#include <span>
#include <vector>

#include "plumesearch/inference.hpp"
#include "plumesearch/informed_tree.hpp"

namespace plumesearch {

// Posterior hypotheses resampled for predictive modelling, with the measurement
// each would produce at a candidate point.
struct PredictiveSet {
  std::vector<SourceTerm> hypotheses;   // equal weight 1/n_z
  std::vector<Measurement> predicted;   // all at the candidate position
};

// Hypothesis indices and measurement-noise draws shared by every candidate of
// one planning step (common random numbers keep the argmin comparison tight).
struct PredictiveDraws {
  std::vector<int> indices;   // categorical draws proportional to weight
  std::vector<double> noise;  // standard normals; empty when predicting noiselessly
};

PredictiveDraws make_predictive_draws(const ParticleSet& ps, int n_z, bool noiseless, Rng& rng);

PredictiveSet predictive_measurements(const ParticleSet& ps, const WorldPoint& x_cand, int n_z,
                                      const LikelihoodModel& model, bool noiseless, Rng& rng);

// Entrotaxis utility Psi: mean over hypothetical measurements of the
// reweighted particle set's sum of w*log(w) (the negative posterior entropy).
// Minimising Psi maximises expected posterior entropy. Bounded to
// [-log n, 0]. Hypothetical measurements whose likelihood vanishes for every
// particle contribute the entropy of the current weights; such terms are
// counted in *degenerate_terms when given.
double entrotaxis_utility(const ParticleSet& ps, std::span<const Measurement> z_hat, const LikelihoodModel& model,
                          int* degenerate_terms = nullptr);
double entrotaxis_utility(const ParticleSet& ps, const WorldPoint& x_cand, const PredictiveDraws& draws,
                          const LikelihoodModel& model, int* degenerate_terms = nullptr);
double entrotaxis_utility(const ParticleSet& ps, const WorldPoint& x_cand, int n_z, const LikelihoodModel& model,
                          bool noiseless, Rng& rng, int* degenerate_terms = nullptr);

// Index of the candidate with the largest expected entropy reduction, i.e.
// the largest Psi (clean-air candidates score exactly the current-weight
// entropy, the attainable minimum, so informative candidates win). Ties fall
// to the shorter candidate, then to the lexicographically smaller endpoint,
// so the winner does not depend on candidate order.
int select_candidate(std::span<const WorldPoint> endpoints, std::span<const double> lengths, const ParticleSet& ps,
                     int n_z, const LikelihoodModel& model, bool noiseless, Rng& rng,
                     std::vector<double>* utilities = nullptr, int* degenerate_terms = nullptr);

// The IPP selection over candidate paths.
const CandidatePath& select_path(std::span<const CandidatePath> sigma, const ParticleSet& ps, int n_z,
                                 const LikelihoodModel& model, bool noiseless, Rng& rng,
                                 std::vector<double>* utilities = nullptr, int* degenerate_terms = nullptr);

}  // namespace plumesearch
