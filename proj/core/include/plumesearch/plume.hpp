#pragma once

#include <string>
#include <vector>

#include "plumesearch/grid_map.hpp"
#include "plumesearch/rng.hpp"
#include "plumesearch/wind_sampler.hpp"

namespace plumesearch {

// Release hypothesis: location, rate and the dispersion parameters of the
// isotropic plume model. Q is in g/s and concentrations in g/m^3 throughout;
// s_z is carried for prior fidelity but the model is evaluated in 2D.
struct SourceTerm {
  double s_x = 0.0;   // m
  double s_y = 0.0;   // m
  double s_z = 0.0;   // m, nuisance parameter
  double q = 1.0;     // g/s
  double u = 0.0;     // wind speed m/s
  double phi = 0.0;   // wind direction deg, [0, 360)
  double d = 1.0;     // diffusivity m^2/s
  double tau = 1.0;   // particle lifetime s
};

struct Measurement {
  double value = 0.0;  // g/m^3, 0 when not detected
  bool detected = false;
  WorldPoint position;
  int step_index = 0;
};

// Plume length scale lambda = sqrt(d*tau / (1 + u^2*tau/(4d))).
// Non-increasing in u; equals sqrt(d*tau) in still air.
double plume_lambda(double d, double tau, double u);

// Expected concentration of the isotropic plume at p:
//   C = Q / (4 pi d rho_c) * exp(-rho_c/lambda + u*dw/(2d))
// with rho_c = max(||p - s||, rho_min) and dw the downwind component of
// p - s. The printed form of the model carries sign/grouping typos in its
// advection exponentials; this is the standard isotropic-plume form, which
// satisfies C <= Q / (4 pi d rho_c) because 1/lambda >= u/(2d).
double expected_concentration(const WorldPoint& p, const SourceTerm& theta, double rho_min);
double log_expected_concentration(const WorldPoint& p, const SourceTerm& theta, double rho_min);

enum class PlumeMode { analytic, geodesic, replay };

PlumeMode plume_mode_from_string(const std::string& s);
std::string to_string(PlumeMode mode);

struct ReplayFrame {
  double time_s = 0.0;
  std::vector<double> values;  // rows x cols, row-major, row 0 = smallest y
};

// Ground-truth concentration surrogate. analytic: the plume model itself.
// geodesic: the model with obstacle-aware distances, so the plume bends
// around buildings. replay: bilinear interpolation of externally supplied
// frames. Multiplicative log-normal noise (sigma = noise_sigma) applies to
// the analytic and geodesic modes.
class GroundTruthField {
 public:
  static GroundTruthField make(PlumeMode mode, const SourceTerm& source, double noise_sigma,
                               const OccupancyGrid& grid, std::vector<ReplayFrame> frames = {});

  PlumeMode mode() const { return mode_; }
  const SourceTerm& source() const { return source_; }
  double noise_sigma() const { return noise_sigma_; }

  double concentration(const OccupancyGrid& grid, const WorldPoint& p, Rng& rng, double time_s = 0.0) const;

 private:
  PlumeMode mode_ = PlumeMode::analytic;
  SourceTerm source_;
  double noise_sigma_ = 0.0;
  double rho_min_ = 0.5;
  CostField source_dist_;          // geodesic distance from the source cell
  CostField inlet_cost_;           // obstacle-aware cost from the wind inlet
  double inlet_cost_at_source_ = 0.0;
  std::vector<ReplayFrame> frames_;
};

double true_concentration(const GroundTruthField& field, const OccupancyGrid& grid, const WorldPoint& p, Rng& rng,
                          double time_s = 0.0);

// Thresholded sensor: detections report the (noisy) concentration, readings
// below the threshold report 0. The comparison is closed (value >= threshold
// detects).
Measurement sample_measurement(const GroundTruthField& field, const OccupancyGrid& grid, const WorldPoint& p,
                               double sensor_threshold, Rng& rng, double time_s = 0.0, int step_index = 0);

// Replay ingestion: index file of "<time_s> <csv_path>" lines, one frame CSV
// per line (rows x cols comma-separated values, row 0 first).
std::vector<ReplayFrame> load_replay_frames(const std::string& index_path, const OccupancyGrid& grid);

}  // namespace plumesearch
