#include "sparkspread/simulate.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "sparkspread/common.hpp"
#include "sparkspread/math.hpp"
#include "sparkspread/rng.hpp"
#include "sparkspread/threads.hpp"

namespace sparkspread {

TimeGrid::TimeGrid(double start_, double end_, int n_steps_)
    : start(start_), end(end_), n_steps(n_steps_) {
  validate();
}

void TimeGrid::validate() const {
  require(n_steps >= 1, "grid: need at least one step");
  require(end > start, "grid: end must exceed start");
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary PathSet layout assumes a little-endian host");

constexpr char kMagic[4] = {'S', 'P', 'P', 'S'};
constexpr std::uint32_t kVersion = 1;
constexpr long kPathChunk = 1024;

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double read_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

// Shortest round-trip decimal for doubles in text exports.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void PathSet::write_csv(std::ostream& os) const {
  os << "path";
  for (int i = 0; i < grid.n_points(); ++i) {
    os << ',' << format_double(grid.time(i));
  }
  os << '\n';
  for (int p = 0; p < n_paths; ++p) {
    os << p;
    for (int i = 0; i < grid.n_points(); ++i) {
      os << ',' << format_double(at(p, i));
    }
    os << '\n';
  }
}

void PathSet::write_binary(std::ostream& os) const {
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u64(os, seed);
  write_f64(os, grid.start);
  write_f64(os, grid.end);
  write_u32(os, std::uint32_t(grid.n_steps));
  write_u32(os, std::uint32_t(n_paths));
  write_u32(os, std::uint32_t(model_tag.size()));
  os.write(model_tag.data(), std::streamsize(model_tag.size()));
  write_u32(os, std::uint32_t(stream_policy.size()));
  os.write(stream_policy.data(), std::streamsize(stream_policy.size()));
  os.write(reinterpret_cast<const char*>(values.data()),
           std::streamsize(values.size() * sizeof(double)));
}

PathSet PathSet::read_binary(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  require(is.good() && std::memcmp(magic, kMagic, 4) == 0,
          "path file: bad magic");
  const std::uint32_t version = read_u32(is);
  require(version == kVersion, "path file: unsupported version");
  PathSet ps;
  ps.seed = read_u64(is);
  ps.grid.start = read_f64(is);
  ps.grid.end = read_f64(is);
  ps.grid.n_steps = int(read_u32(is));
  ps.n_paths = int(read_u32(is));
  const std::uint32_t tag_len = read_u32(is);
  require(is.good() && tag_len <= 4096, "path file: corrupt header");
  ps.model_tag.resize(tag_len);
  is.read(ps.model_tag.data(), tag_len);
  const std::uint32_t policy_len = read_u32(is);
  require(is.good() && policy_len <= 4096, "path file: corrupt header");
  ps.stream_policy.resize(policy_len);
  is.read(ps.stream_policy.data(), policy_len);
  ps.grid.validate();
  require(ps.n_paths >= 0, "path file: negative path count");
  ps.values.resize(std::size_t(ps.n_paths) * ps.grid.n_points());
  is.read(reinterpret_cast<char*>(ps.values.data()),
          std::streamsize(ps.values.size() * sizeof(double)));
  require(is.good(), "path file: truncated payload");
  return ps;
}

namespace {

struct TwoFactorStepper {
  const TwoFactorJumpParams& p;
  double decay_x, sd_x, decay_y, jump_rate;

  TwoFactorStepper(const TwoFactorJumpParams& params, double dt)
      : p(params),
        decay_x(std::exp(-params.alpha * dt)),
        sd_x(std::sqrt(ou_moments(params.alpha, params.sigma, 0.0, dt).variance)),
        decay_y(std::exp(-params.beta * dt)),
        jump_rate(params.jump_intensity * dt) {}

  void advance(double z, RandomStream& rs, double& x, double& y) const {
    x = x * decay_x + sd_x * z;
    y *= decay_y;
    const int n_jumps = rs.poisson(jump_rate);
    for (int j = 0; j < n_jumps; ++j) {
      y += p.eta * (p.jump_mean + p.jump_sd * rs.normal());
    }
  }
};

}  // namespace

PathPair simulate_two_factor(const TwoFactorJumpParams& params_e,
                             const TwoFactorJumpParams& params_g, double rho,
                             const TimeGrid& grid, int n_paths,
                             std::uint64_t seed) {
  params_e.validate();
  params_g.validate();
  grid.validate();
  require(std::abs(rho) <= 1.0, "simulate_two_factor: rho must lie in [-1, 1]");
  require(n_paths >= 1, "simulate_two_factor: need at least one path");

  const int n_pts = grid.n_points();
  std::vector<double> level_e(n_pts), log_level_g(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    const double t = grid.time(i);
    level_e[i] = params_e.seasonal(t);
    const double lg = params_g.seasonal(t);
    require(lg > 0.0, "simulate_two_factor: gas seasonal level must be "
                      "positive on the whole grid");
    log_level_g[i] = std::log(lg);
  }

  PathPair out;
  out.electricity.grid = grid;
  out.electricity.n_paths = n_paths;
  out.electricity.values.resize(std::size_t(n_paths) * n_pts);
  out.electricity.model_tag = "two_factor/electricity";
  out.electricity.seed = seed;
  out.gas = out.electricity;
  out.gas.model_tag = "two_factor/gas";

  const double dt = grid.step();
  const TwoFactorStepper step_e(params_e, dt);
  const TwoFactorStepper step_g(params_g, dt);
  const double rho_perp = std::sqrt(1.0 - rho * rho);

  parallel_chunks(n_paths, kPathChunk, [&](long, long begin, long end) {
    for (long path = begin; path < end; ++path) {
      RandomStream rs(seed, std::uint64_t(path));
      double xe = params_e.x0, ye = params_e.y0;
      double xg = params_g.x0, yg = params_g.y0;
      out.electricity.at(int(path), 0) = level_e[0] + xe + ye;
      out.gas.at(int(path), 0) = std::exp(log_level_g[0] + xg + yg);
      for (int i = 1; i < n_pts; ++i) {
        const double ze = rs.normal();
        const double zg = rho * ze + rho_perp * rs.normal();
        step_e.advance(ze, rs, xe, ye);
        step_g.advance(zg, rs, xg, yg);
        out.electricity.at(int(path), i) = level_e[i] + xe + ye;
        out.gas.at(int(path), i) = std::exp(log_level_g[i] + xg + yg);
      }
    }
  });
  return out;
}

namespace {

struct MertonStepper {
  double drift, sd, jump_rate, m, s;

  MertonStepper(const MertonParams& p, double dt)
      : drift((p.r - p.q - 0.5 * p.sigma * p.sigma - p.lambda * p.kappa()) * dt),
        sd(p.sigma * std::sqrt(dt)),
        jump_rate(p.lambda * dt),
        m(p.m),
        s(p.s) {}

  // log-spot increment over the step given the diffusion Gaussian z
  double increment(double z, RandomStream& rs) const {
    double d = drift + sd * z;
    const int n_jumps = rs.poisson(jump_rate);
    for (int j = 0; j < n_jumps; ++j) {
      d += m + s * rs.normal();
    }
    return d;
  }
};

}  // namespace

TerminalSamples simulate_merton(const MertonParams& params_e,
                                const MertonParams& params_g, double rho,
                                double horizon, int n_paths,
                                std::uint64_t seed) {
  params_e.validate();
  params_g.validate();
  require(horizon > 0.0, "simulate_merton: horizon must be positive");
  require(std::abs(rho) <= 1.0, "simulate_merton: rho must lie in [-1, 1]");
  require(n_paths >= 1, "simulate_merton: need at least one path");

  TerminalSamples out;
  out.electricity.resize(n_paths);
  out.gas.resize(n_paths);
  const MertonStepper step_e(params_e, horizon);
  const MertonStepper step_g(params_g, horizon);
  const double log_s0_e = std::log(params_e.s0);
  const double log_s0_g = std::log(params_g.s0);
  const double rho_perp = std::sqrt(1.0 - rho * rho);

  parallel_chunks(n_paths, kPathChunk, [&](long, long begin, long end) {
    for (long path = begin; path < end; ++path) {
      RandomStream rs(seed, std::uint64_t(path));
      const double ze = rs.normal();
      const double zg = rho * ze + rho_perp * rs.normal();
      out.electricity[path] = std::exp(log_s0_e + step_e.increment(ze, rs));
      out.gas[path] = std::exp(log_s0_g + step_g.increment(zg, rs));
    }
  });
  return out;
}

PathPair simulate_merton_paths(const MertonParams& params_e,
                               const MertonParams& params_g, double rho,
                               double start_time, const TimeGrid& grid,
                               int n_paths, std::uint64_t seed) {
  params_e.validate();
  params_g.validate();
  grid.validate();
  require(std::abs(rho) <= 1.0, "simulate_merton_paths: rho must lie in [-1, 1]");
  require(n_paths >= 1, "simulate_merton_paths: need at least one path");
  const double warmup = grid.start - start_time;
  require(warmup >= 0.0, "simulate_merton_paths: grid starts before start_time");

  const int n_pts = grid.n_points();
  PathPair out;
  out.electricity.grid = grid;
  out.electricity.n_paths = n_paths;
  out.electricity.values.resize(std::size_t(n_paths) * n_pts);
  out.electricity.model_tag = "merton/electricity";
  out.electricity.seed = seed;
  out.gas = out.electricity;
  out.gas.model_tag = "merton/gas";

  const double dt = grid.step();
  const MertonStepper step_e(params_e, dt);
  const MertonStepper step_g(params_g, dt);
  const MertonStepper warm_e(params_e, warmup > 0.0 ? warmup : 1.0);
  const MertonStepper warm_g(params_g, warmup > 0.0 ? warmup : 1.0);
  const double rho_perp = std::sqrt(1.0 - rho * rho);

  parallel_chunks(n_paths, kPathChunk, [&](long, long begin, long end) {
    for (long path = begin; path < end; ++path) {
      RandomStream rs(seed, std::uint64_t(path));
      double log_e = std::log(params_e.s0);
      double log_g = std::log(params_g.s0);
      if (warmup > 0.0) {
        const double ze = rs.normal();
        const double zg = rho * ze + rho_perp * rs.normal();
        log_e += warm_e.increment(ze, rs);
        log_g += warm_g.increment(zg, rs);
      }
      out.electricity.at(int(path), 0) = std::exp(log_e);
      out.gas.at(int(path), 0) = std::exp(log_g);
      for (int i = 1; i < n_pts; ++i) {
        const double ze = rs.normal();
        const double zg = rho * ze + rho_perp * rs.normal();
        log_e += step_e.increment(ze, rs);
        log_g += step_g.increment(zg, rs);
        out.electricity.at(int(path), i) = std::exp(log_e);
        out.gas.at(int(path), i) = std::exp(log_g);
      }
    }
  });
  return out;
}

std::vector<double> forward_from_paths(const PathSet& paths, const Contract& c,
                                       bool discount_inside_average) {
  c.validate();
  paths.grid.validate();
  const double eps =
      1e-9 * std::max({1.0, std::abs(c.tau1), std::abs(c.tau2)});
  require(c.tau1 >= paths.grid.start - eps && c.tau2 <= paths.grid.end + eps,
          "forward_from_paths: delivery window outside the path grid");

  std::vector<int> idx;
  std::vector<double> disc;
  for (int i = 0; i < paths.grid.n_points(); ++i) {
    const double t = paths.grid.time(i);
    if (t >= c.tau1 - eps && t <= c.tau2 + eps) {
      idx.push_back(i);
      disc.push_back(discount_inside_average
                         ? std::exp(-c.r_f * (t - c.tau1))
                         : 1.0);
    }
  }
  require(!idx.empty(), "forward_from_paths: no grid points in the delivery window");

  std::vector<double> fwd(paths.n_paths);
  std::vector<double> terms(idx.size());
  for (int p = 0; p < paths.n_paths; ++p) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      terms[j] = disc[j] * paths.at(p, idx[j]);
    }
    fwd[p] = neumaier_sum(terms) / double(idx.size());
  }
  return fwd;
}

}  // namespace sparkspread
