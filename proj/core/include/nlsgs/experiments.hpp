#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlsgs/action_min.hpp"
#include "nlsgs/energy_min.hpp"
#include "nlsgs/geometry.hpp"

namespace nlsgs {

struct ExperimentConfig
{
  double p = 4.0;
  /// Uniform mesh size of the polygon triangulation.
  double h = 1.0 / 64;
  /// Mesh size near the smallest-angle vertex is at most apex_h_factor / sqrt(lambda).
  double apex_h_factor = 0.1;
  /// Radius of the refined disk, in units of 1 / sqrt(lambda).
  double refine_radius_factor = 6.0;
  /// Extra refinement levels near the smallest-angle vertex for energy solves.
  int energy_corner_levels = 0;
  std::uint64_t seed = 1;
  /// Reseeded solves per grid point used to estimate the mass noise.
  int noise_solves = 3;
  /// Lower bound of the noise, relative to the mass.
  double noise_floor = 1e-6;
  double witness_factor = 3.0;
  double jump_factor = 3.0;
  /// Truncated sectors: R = sector_radius_factor / sqrt(lambda), graded
  /// towards the apex inside sector_fine_factor / sqrt(lambda).
  double sector_radius_factor = 30.0;
  double sector_fine_factor = 6.0;
  double sector_coarse_h = 1.0;
  FlowParams flow;
  ActionParams action;

  /// Keys as in the member names; flow.* and action.* address the solver
  /// parameters. Unknown keys throw InvalidInput.
  static ExperimentConfig from_map(const std::map<std::string, std::string> &kv);
  void set(const std::string &key, const std::string &value);
};

/// "lo:hi:n" (linear) or "lo:hi:n:geom" (geometric). n = 0 gives an empty grid.
std::vector<double> parse_grid(const std::string &spec);

/// Polygon triangulation refined near the smallest-angle vertex so the local
/// mesh size resolves frequency lambda.
TriMesh mesh_for_lambda(const Polygon &polygon, double lambda, const ExperimentConfig &config);
/// Triangulation used by the energy solves.
TriMesh mesh_for_energy(const Polygon &polygon, const ExperimentConfig &config);

/// "flat", "vertex-<k>" (nearest corner to the maximum) or "interior".
std::string classify_branch(const Field &u);

struct SweepRecord
{
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  double parameter = 0.0;
  bool ok = false;
  bool unbounded = false;
  std::string error;
  double level = nan;
  double mass = nan;
  double lambda_u = nan;
  double m_lo = nan;
  double m_hi = nan;
  double residual = nan;
  double nehari_residual = nan;
  double noise = 0.0;
  int iterations = 0;
  std::size_t starts_converged = 0;
  std::string start_label;
  std::string branch;
  /// Lambda sweeps: envelope wider than the noise. Mass sweeps: a lambda_u
  /// jump between this row and the next.
  bool flagged = false;
};

/// One action solve per lambda (rows run in parallel, output in grid order).
std::vector<SweepRecord> sweep_lambda(std::shared_ptr<const FemSpace> space, double p,
                                      const std::vector<double> &grid,
                                      const ExperimentConfig &config);

/// One energy solve per mu. Flags a row when log(lambda_u) rises to the next
/// row by more than jump_factor times the median |log gap| and lambda_u rises
/// by more than jump_factor times the noise.
std::vector<SweepRecord> sweep_mass(std::shared_ptr<const FemSpace> space, double p,
                                    const std::vector<double> &grid,
                                    const ExperimentConfig &config);

/// Intervals [mu_i, mu_{i+1}] of flagged mass-sweep rows.
std::vector<std::pair<double, double>> jump_intervals(const std::vector<SweepRecord> &records);

struct NonMonotoneWitness
{
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double margin = 0.0;
  double noise = 0.0;
};

/// Best pair lambda1 < lambda2 by m_lo(lambda1) - m_hi(lambda2). The noise of a
/// pair is the larger record noise unless `noise` is non-negative.
std::optional<NonMonotoneWitness> detect_nonmonotone(const std::vector<SweepRecord> &records,
                                                     double factor = 3.0, double noise = -1.0);

struct DerivativeRow
{
  double lambda = 0.0;
  double slope = 0.0;
  double half_mass = 0.0;
  double relative_error = 0.0;
  /// False when the envelope is not a singleton or the stencil mixes branches.
  bool checked = false;
};

/// Three-point nonuniform central differences of the level at interior rows.
std::vector<DerivativeRow> derivative_check(const std::vector<SweepRecord> &records);

struct RobustnessCheck
{
  std::string variant;
  double m1 = 0.0;
  double m2 = 0.0;
  double margin = 0.0;
  bool survives = false;
};

/// Re-solves the witness pair on a uniformly refined mesh, with a halved
/// initial step, and with a new seed.
std::vector<RobustnessCheck> check_witness(const Polygon &polygon, double p,
                                           const NonMonotoneWitness &witness,
                                           double lambda_max, const ExperimentConfig &config);

struct NonuniquenessResult
{
  double p = 0.0;
  std::vector<SweepRecord> lambda_sweep;
  std::optional<NonMonotoneWitness> witness;
  std::vector<RobustnessCheck> checks;
  std::vector<SweepRecord> mass_sweep;
  std::vector<std::pair<double, double>> jumps;
  bool jump_matches = false;
  bool confirmed() const;
};

/// Geometric lambda grid, refinement around the largest mass drop, witness
/// search, robustness checks and the independent mass sweep.
NonuniquenessResult run_nonuniqueness(const Polygon &polygon, double p,
                                      const ExperimentConfig &config, double lambda_lo = 2.0,
                                      double lambda_hi = 60.0, int points = 12,
                                      int mass_points = 16);

struct AsymptoticsRow
{
  double lambda = 0.0;
  double level = 0.0;
  double reference = 0.0;
  double gap = 0.0;           ///< |level - reference| / lambda
  double relative_gap = 0.0;  ///< |level - reference| / reference
  double mass = 0.0;
  double mass_error = 0.0;  ///< |mass - mu_bar_alpha| / mu_bar_alpha
  std::size_t nodes = 0;
};

struct AsymptoticsTable
{
  double alpha = 0.0;
  std::vector<AsymptoticsRow> rows;
  bool gap_decreasing = true;
  bool mass_error_decreasing = true;
};

/// p = 4 action solves with the mesh refined per lambda near the smallest angle.
AsymptoticsTable run_asymptotics(const Polygon &polygon, const std::vector<double> &lambdas,
                                 const ExperimentConfig &config);

struct CriticalMassRow
{
  double mu = 0.0;
  double ratio = 0.0;  ///< mu / mu_bar_alpha
  bool bounded = false;
  double level = SweepRecord::nan;
  double lambda_u = SweepRecord::nan;
  std::string start_label;
  /// Verdict with the flow step halved.
  bool bounded_halved = false;
  bool stable() const { return bounded == bounded_halved; }
};

struct CriticalMassTable
{
  double mu_bar_alpha = 0.0;
  std::vector<CriticalMassRow> rows;
  /// Bounded with negative level for ratio <= 0.95, unbounded for ratio >= 1.05.
  bool dichotomy_holds() const;
};

CriticalMassTable run_critical_mass(const Polygon &polygon, const std::vector<double> &mus,
                                    const ExperimentConfig &config);

struct CrossSolverResult
{
  double mu = 0.0;
  double lambda_u = 0.0;
  double energy_level = 0.0;
  std::string energy_start;
  double action_mass = 0.0;
  std::string action_start;
  double relative_error = 0.0;
};

/// Energy ground state at mass mu, then an action solve at its lambda_u.
CrossSolverResult run_cross_solver(const Polygon &polygon, double p, double mu,
                                   const ExperimentConfig &config);

struct SectorLevelResult
{
  double alpha = 0.0;
  double lambda = 0.0;
  double level = 0.0;
  double ratio = 0.0;     ///< level / (lambda mu_bar / 2)
  double expected = 0.0;  ///< alpha / (2 pi)
  double relative_error = 0.0;
  double mass = 0.0;
  std::size_t nodes = 0;
};

/// p = 4 action level on the truncated sector, started from the apex soliton.
SectorLevelResult run_sector_level(double alpha, double lambda, const ExperimentConfig &config);

void write_lambda_csv(std::ostream &out, const std::vector<SweepRecord> &records);
void write_mass_csv(std::ostream &out, const std::vector<SweepRecord> &records);
void write_asymptotics_csv(std::ostream &out, const AsymptoticsTable &table);
void write_critical_mass_csv(std::ostream &out, const CriticalMassTable &table);

}  // namespace nlsgs
