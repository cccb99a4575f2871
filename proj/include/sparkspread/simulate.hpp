#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparkspread/models.hpp"

namespace sparkspread {

// Uniform grid of n_steps intervals covering [start, end].
struct TimeGrid {
  double start = 0.0;
  double end = 1.0;
  int n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double start_, double end_, int n_steps_);

  void validate() const;
  double step() const { return (end - start) / n_steps; }
  int n_points() const { return n_steps + 1; }
  double time(int i) const { return start + i * step(); }
};

// n_paths simulated trajectories sampled on a common grid, row-major.
struct PathSet {
  TimeGrid grid;
  int n_paths = 0;
  std::vector<double> values;  // n_paths * grid.n_points()
  std::string model_tag;
  std::uint64_t seed = 0;
  // How per-path substreams derive from seed; see docs/formats.md.
  std::string stream_policy = "philox4x32-10/path-substream";

  double at(int path, int i) const {
    return values[std::size_t(path) * grid.n_points() + i];
  }
  double& at(int path, int i) {
    return values[std::size_t(path) * grid.n_points() + i];
  }

  // One row per path; header row carries the grid times.
  void write_csv(std::ostream& os) const;

  // Compact dump: magic "SPPS", version, counts, then little-endian IEEE
  // doubles row-major. Layout documented in docs/formats.md.
  void write_binary(std::ostream& os) const;
  static PathSet read_binary(std::istream& is);
};

struct PathPair {
  PathSet electricity;
  PathSet gas;
};

// Correlated two-factor jump-diffusion paths for both commodities on the
// given grid. X factors advance by the exact OU transition; Y factors decay
// and collect that step's compound-Poisson jumps at the step end. The two
// per-step Gaussians share correlation rho; jump processes are independent.
// Path p consumes only the substream (seed, p), so the first paths are
// unchanged when n_paths grows and results do not depend on threading.
PathPair simulate_two_factor(const TwoFactorJumpParams& params_e,
                             const TwoFactorJumpParams& params_g, double rho,
                             const TimeGrid& grid, int n_paths,
                             std::uint64_t seed);

struct TerminalSamples {
  std::vector<double> electricity;
  std::vector<double> gas;
};

// Exact terminal draws of two correlated lognormal jump-diffusions at T.
TerminalSamples simulate_merton(const MertonParams& params_e,
                                const MertonParams& params_g, double rho,
                                double horizon, int n_paths,
                                std::uint64_t seed);

// Path version used by the averaged-forward pipeline. Lognormal increments
// are exact over any step, so values at grid.time(0) are reached by one
// exact step of length grid.start - start_time (no draws when zero).
PathPair simulate_merton_paths(const MertonParams& params_e,
                               const MertonParams& params_g, double rho,
                               double start_time, const TimeGrid& grid,
                               int n_paths, std::uint64_t seed);

// Per-path delivery-window average: (1/N) sum over grid points t_i in
// [tau1, tau2] of e^{-r_f (t_i - tau1)} S(t_i); the exponential factor is
// dropped when discount_inside_average is false.
std::vector<double> forward_from_paths(const PathSet& paths, const Contract& c,
                                       bool discount_inside_average = true);

}  // namespace sparkspread
