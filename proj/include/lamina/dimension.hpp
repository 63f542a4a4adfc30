#pragma once

// Limit sets of fiber representations, box counting, and iterated function
// systems extracted from the holonomy.

#include <optional>
#include <string>
#include <vector>

#include "lamina/estimators.hpp"
#include "lamina/suspension.hpp"

namespace lamina {

struct LimitSetOptions {
  /// A branch stops once its map g (det 1) has |g|^2 > 1 / resolution in
  /// the Frobenius norm: g then squeezes the sphere, away from a small cap,
  /// into a set of diameter about `resolution`.
  double resolution = 1e-10;
  /// Points closer than this on the sphere are merged.
  double dedup = 1e-10;
  std::size_t max_points = 2000000;
};

struct LimitSetSample {
  std::vector<ProjectivePoint> points;
  std::vector<int> lengths;  // word length behind each point
  int word_length = 0;       // depth cap of the enumeration
  FiberRepresentation group;
  double resolution = 0.0;
};

/// Images of `base` under all reduced words (over generators with a
/// nontrivial image) of length `depth`, a branch ending early once its map
/// contracts below the resolution. Each group element is visited once.
/// depth <= 14.
LimitSetSample sample_limit_set(const FiberRepresentation& rep, int depth, const ProjectivePoint& base,
                                const LimitSetOptions& opt = {});

struct DimensionReport {
  double box_dimension = 0.0;
  double fit_r_squared = 0.0;
  std::vector<double> radii_used;
  std::vector<std::size_t> box_counts;
  std::optional<double> moran_dimension;
  bool degenerate = false;
  std::vector<std::string> warnings;
};

/// Slope of log N(r) against log(1/r), N(r) the number of grid cubes of
/// side r in R^3 met by the points on the unit sphere. Needs >= 8 radii
/// spanning two decades.
DimensionReport box_counting(const std::vector<ProjectivePoint>& points, const std::vector<double>& radii);

struct IFSMap {
  Word word;
  MoebiusMap map;
  double log_ratio = 0.0;  // mean log |h'| over the chart disc
  Circle image;            // exact image of the chart disc
};

/// Contractions of a chart disc D(center, radius) in the affine coordinate.
struct IFSSystem {
  Complex chart_center;
  double chart_radius = 0.0;
  std::vector<IFSMap> maps;
  double kappa = 0.0;           // max |log|h'(z)| - log|h'(center)|| over samples
  double min_separation = 0.0;  // smallest sampled gap between two images

  std::vector<double> log_ratios() const;
};

/// Keeps the candidate words whose holonomy maps D strictly inside itself
/// (margin 1e-6) with images disjoint from every map kept before. Images
/// under 1e-13 of the chart radius are dropped: their separation is below
/// double resolution. Throws EmptySystemError when nothing survives.
IFSSystem build_holonomy_ifs(const SuspensionFoliation& f, Complex center, double radius,
                             const std::vector<Word>& candidates);

/// System given directly by contraction ratios (similarities, kappa = 0).
IFSSystem ifs_from_ratios(const std::vector<double>& ratios);

/// Re-verifies containment and pairwise disjointness from the stored maps.
bool recheck_ifs(const IFSSystem& ifs);

/// All reduced words of the given length over generators with nontrivial
/// image, in lexicographic order.
std::vector<Word> reduced_words(const FiberRepresentation& rep, int length);

/// First-return words for `letter`: maps applying `letter` last, preceded
/// only by letters other than `letter`, reduced, and not starting with its
/// inverse; lengths 1..max_length. Their images of a chart around the
/// attracting fixed point of `letter` are disjoint cylinders, and the
/// attractor of the whole (infinite) family is the part of the limit set
/// inside the chart.
std::vector<Word> first_return_words(const FiberRepresentation& rep, const Letter& letter, int max_length);

/// Chart for a Schottky preset: centred at the attracting fixed point of
/// a1's image, radius half the distance to the nearest circle other than
/// the one around that point.
struct Chart {
  Complex center;
  double radius = 0.0;
};
Chart schottky_chart(const SuspensionFoliation& f);

struct MoranResult {
  double dimension = 0.0;
  double lower = 0.0;  // ratios shrunk by e^-kappa
  double upper = 0.0;  // ratios grown by e^kappa; 2 when some ratio reaches 1
  double residual = 0.0;
};

/// Solves sum r_i^s = 1 by bisection. Rejects single-map systems and
/// ratios outside (0, 1).
double solve_moran(const std::vector<double>& ratios);
MoranResult moran_dimension(const IFSSystem& ifs);

struct InequalityReport {
  double d_hat = 0.0;
  double h_hat = 0.0;
  double lambda_hat = 0.0;
  double ratio = 0.0;   // h / |lambda|
  double margin = 0.0;  // d - (h / |lambda| - tolerance)
  double tolerance = 0.1;
  bool pass = false;
  std::string entropy_source;
  std::vector<std::string> notes;
};

/// Checks d >= h / |lambda| - tolerance. Throws DependencyError when an
/// estimate is missing and ParameterError when lambda >= 0 or h <= 0.
InequalityReport check_dimension_inequality(std::optional<double> d_hat, std::optional<double> h_hat,
                                            std::optional<double> lambda_hat, double tolerance = 0.1);

/// Resolution and radius grids matched to the spread of a preset's limit
/// set: the circle is sampled densely, Schottky sets need far finer scales.
struct PresetScales {
  double resolution;
  std::vector<double> box_radii;
  std::vector<double> measure_radii;
};
PresetScales preset_scales(const SuspensionFoliation& f);

struct InequalityParams {
  double horizon = 50.0;
  std::size_t N = 2048;
  std::size_t harmonic_N = 4096;
  double step = 1e-2;
  std::uint64_t seed = 1;
  int depth = 12;
  double resolution = 0.0;  // 0: a preset-dependent default
  int threads = 0;
};

struct InequalityRun {
  InequalityReport report;
  EstimatorReport lyapunov;
  std::optional<EntropyReport> entropy;
  std::optional<LocalDimensionReport> harmonic_dimension;
  DimensionReport box;
};

/// Estimates lambda, h and the transverse dimension, then checks the
/// inequality. Leaves that are discs use the heat-kernel entropy; otherwise
/// h is taken as dim(harmonic measure) * |lambda|.
InequalityRun verify_dimension_inequality(const SuspensionFoliation& f, const InequalityParams& p);

}  // namespace lamina
