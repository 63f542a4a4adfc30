#include "lamina/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>
#include <unordered_set>

#include "lamina/errors.hpp"
#include "lamina/parallel.hpp"

namespace lamina {

namespace {

struct CellHash {
  std::size_t operator()(const std::tuple<long long, long long, long long>& k) const {
    const auto [a, b, c] = k;
    std::size_t h = static_cast<std::size_t>(a) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::size_t>(b) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(c) + 0x94D049BB133111EBULL + (h << 6) + (h >> 2);
    return h;
  }
};

using Cell = std::tuple<long long, long long, long long>;

Cell cell_of(const std::array<double, 3>& x, double side) {
  return {static_cast<long long>(std::floor(x[0] / side)), static_cast<long long>(std::floor(x[1] / side)),
          static_cast<long long>(std::floor(x[2] / side))};
}

// Quantized matrix up to sign, identifying group elements.
using ElementKey = std::array<long long, 8>;

struct ElementHash {
  std::size_t operator()(const ElementKey& k) const {
    std::size_t h = 0;
    for (long long v : k) h ^= static_cast<std::size_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

ElementKey element_key(const MoebiusMap& g) {
  std::array<Complex, 4> e{g.a(), g.b(), g.c(), g.d()};
  const auto big = *std::max_element(e.begin(), e.end(), [](Complex x, Complex y) { return std::abs(x) < std::abs(y); });
  const bool flip = big.real() < 0.0 || (big.real() == 0.0 && big.imag() < 0.0);
  const double grid = 1e-7 * std::max(1.0, std::abs(big));
  ElementKey key{};
  for (int i = 0; i < 4; ++i) {
    const Complex v = flip ? -e[i] : e[i];
    key[2 * i] = std::llround(v.real() / grid);
    key[2 * i + 1] = std::llround(v.imag() / grid);
  }
  return key;
}

std::vector<Letter> active_letters(const FiberRepresentation& rep) {
  std::vector<Letter> out;
  for (int k = 0; k < 4; ++k) {
    if (rep.is_identity(k)) continue;
    out.push_back({k, false});
    out.push_back({k, true});
  }
  return out;
}

// Image of the closed disc D(p, R) under h (det 1), or nullopt when the
// pole of h lies in the disc (then the image is not a bounded disc). With
// D = |cp + d|^2 - |c|^2 R^2 the image has centre
// ((ap + b) conj(cp + d) - a conj(c) R^2) / D and radius R / D.
std::optional<Circle> image_disc(const MoebiusMap& h, Complex p, double R) {
  const Complex a = h.a(), b = h.b(), c = h.c(), d = h.d();
  const Complex q = c * p + d;
  const double den = std::norm(q) - std::norm(c) * R * R;
  if (!(den > 1e-12 * std::norm(q))) return std::nullopt;
  const Complex center = ((a * p + b) * std::conj(q) - a * std::conj(c) * R * R) / den;
  return Circle{center, R / den};
}

double log_norm2(const MoebiusMap& g) {
  return std::log(std::norm(g.a()) + std::norm(g.b()) + std::norm(g.c()) + std::norm(g.d()));
}

double log_abs_derivative(const MoebiusMap& h, Complex z) {
  return std::log(std::abs(h.det())) - 2.0 * std::log(std::abs(h.c() * z + h.d()));
}

constexpr double kContainMargin = 1e-6;
constexpr int kBoundarySamples = 1000;
// Images smaller than this fraction of the chart cannot be told apart in
// double precision once their centres sit at distance O(1) from 0.
constexpr double kMinImageRatio = 1e-13;

bool contained(const Circle& img, Complex p, double R) {
  return std::abs(img.center - p) + img.radius <= R - kContainMargin;
}

bool disjoint(const Circle& a, const Circle& b) { return std::abs(a.center - b.center) > a.radius + b.radius; }

// Smallest gap between a sampled boundary point of one image and another
// image disc. Pairs whose discs are far apart relative to their size are
// settled by the exact disc distance.
double sampled_separation(const IFSSystem& ifs) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = ifs.maps.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Circle& ci = ifs.maps[i].image;
    std::vector<std::size_t> near;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Circle& cj = ifs.maps[j].image;
      const double gap = std::abs(ci.center - cj.center) - ci.radius - cj.radius;
      if (gap < ci.radius + cj.radius) {
        near.push_back(j);
      } else {
        best = std::min(best, gap);
      }
    }
    if (near.empty()) continue;
    for (int k = 0; k < kBoundarySamples; ++k) {
      const Complex z = ifs.chart_center + std::polar(ifs.chart_radius, 2.0 * std::numbers::pi * k / kBoundarySamples);
      const Complex w = ifs.maps[i].map.apply(z);
      for (std::size_t j : near) {
        best = std::min(best, std::abs(w - ifs.maps[j].image.center) - ifs.maps[j].image.radius);
      }
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Limit sets

LimitSetSample sample_limit_set(const FiberRepresentation& rep, int depth, const ProjectivePoint& base,
                                const LimitSetOptions& opt) {
  if (depth < 0 || depth > 14) throw ParameterError("limit-set depth must lie in [0, 14]");
  if (!(opt.resolution > 0.0) || !(opt.dedup > 0.0)) throw ParameterError("resolution and dedup must be positive");
  LimitSetSample out;
  out.word_length = depth;
  out.group = rep;
  out.resolution = opt.resolution;
  const std::vector<Letter> letters = active_letters(rep);
  const double log_res = std::log(opt.resolution);

  std::unordered_set<Cell, CellHash> seen;
  auto record = [&](const ProjectivePoint& p, int len) {
    if (seen.insert(cell_of(p.sphere(), opt.dedup)).second) {
      out.points.push_back(p);
      out.lengths.push_back(len);
      if (out.points.size() > opt.max_points) {
        throw ParameterError("limit-set sample exceeds " + std::to_string(opt.max_points) +
                             " points; use a coarser resolution or smaller depth");
      }
    }
  };

  // Breadth-first over word length, visiting each group element once:
  // for groups with relations (the Fuchsian case) distinct reduced words
  // often give the same element.
  struct Node {
    MoebiusMap map;
    int last;  // index into letters, -1 at the root
  };
  std::unordered_set<ElementKey, ElementHash> visited;
  std::vector<Node> level{{MoebiusMap::identity(), -1}};
  visited.insert(element_key(level.front().map));
  for (int len = 0; !level.empty(); ++len) {
    std::vector<Node> next;
    for (const Node& node : level) {
      const bool leaf = letters.empty() || len == depth || (len > 0 && -log_norm2(node.map) < log_res);
      if (leaf) {
        record(node.map.apply(base), len);
        continue;
      }
      for (int k = 0; k < static_cast<int>(letters.size()); ++k) {
        if (node.last >= 0 && letters[k] == letters[node.last].inverted()) continue;
        MoebiusMap child = node.map * rep.image(letters[k]);
        if (!visited.insert(element_key(child)).second) continue;
        next.push_back({std::move(child), k});
      }
    }
    level = std::move(next);
  }
  return out;
}

DimensionReport box_counting(const std::vector<ProjectivePoint>& points, const std::vector<double>& radii) {
  if (radii.size() < 8) throw ParameterError("box counting needs at least 8 radii");
  const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12)) {
    throw ParameterError("box-counting radii must be positive and span two decades");
  }
  if (points.empty()) throw ParameterError("box counting needs at least one point");
  DimensionReport rep;
  if (points.size() < 1000) rep.warnings.push_back("fewer than 1000 points");
  std::vector<std::array<double, 3>> xs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) xs[i] = points[i].sphere();

  std::vector<double> lx, ly;
  for (double r : radii) {
    std::unordered_set<Cell, CellHash> cells;
    for (const auto& x : xs) cells.insert(cell_of(x, r));
    rep.radii_used.push_back(r);
    rep.box_counts.push_back(cells.size());
    lx.push_back(std::log(1.0 / r));
    ly.push_back(std::log(static_cast<double>(cells.size())));
  }
  const std::size_t at_largest = rep.box_counts[std::distance(radii.begin(), hi)];
  if (at_largest < 2) {
    rep.degenerate = true;
    rep.warnings.push_back("fewer than two boxes at the largest radius");
  }
  const LinearFit fit = fit_line(lx, ly);
  rep.box_dimension = fit.slope;
  rep.fit_r_squared = fit.r_squared;
  return rep;
}

// ---------------------------------------------------------------------------
// Iterated function systems

std::vector<double> IFSSystem::log_ratios() const {
  std::vector<double> out;
  for (const auto& m : maps) out.push_back(m.log_ratio);
  return out;
}

IFSSystem build_holonomy_ifs(const SuspensionFoliation& f, Complex center, double radius,
                             const std::vector<Word>& candidates) {
  if (!(radius > 0.0)) throw ParameterError("chart radius must be positive");
  IFSSystem ifs;
  ifs.chart_center = center;
  ifs.chart_radius = radius;
  for (const Word& w : candidates) {
    const MoebiusMap h = f.rep().evaluate(w);
    const auto img = image_disc(h, center, radius);
    if (!img || !contained(*img, center, radius) || img->radius < kMinImageRatio * radius) continue;
    const bool clear = std::all_of(ifs.maps.begin(), ifs.maps.end(),
                                   [&](const IFSMap& m) { return disjoint(m.image, *img); });
    if (!clear) continue;
    ifs.maps.push_back({w, h, std::log(img->radius / radius), *img});
  }
  if (ifs.maps.empty()) throw EmptySystemError("no candidate holonomy map contracts the chart disc");

  // Distortion over a polar grid of the disc, relative to the centre.
  for (const IFSMap& m : ifs.maps) {
    const double at_center = log_abs_derivative(m.map, center);
    for (int ring = 1; ring <= 8; ++ring) {
      for (int k = 0; k < 64; ++k) {
        const Complex z = center + std::polar(radius * ring / 8.0, 2.0 * std::numbers::pi * k / 64.0);
        ifs.kappa = std::max(ifs.kappa, std::abs(log_abs_derivative(m.map, z) - at_center));
      }
    }
  }
  ifs.min_separation = ifs.maps.size() > 1 ? sampled_separation(ifs) : std::numeric_limits<double>::infinity();
  return ifs;
}

IFSSystem ifs_from_ratios(const std::vector<double>& ratios) {
  IFSSystem ifs;
  ifs.chart_center = 0.0;
  ifs.chart_radius = 1.0;
  // Similarities z -> r z + shift laid out along the real axis; they are
  // only used for the ratios, not for geometry.
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("contraction ratios must lie in (0, 1)");
    const MoebiusMap m{r, 0.0, 0.0, 1.0};
    ifs.maps.push_back({{}, m, std::log(r), {0.0, r}});
  }
  return ifs;
}

bool recheck_ifs(const IFSSystem& ifs) {
  std::vector<Circle> imgs;
  for (const IFSMap& m : ifs.maps) {
    const auto img = image_disc(m.map, ifs.chart_center, ifs.chart_radius);
    if (!img || !contained(*img, ifs.chart_center, ifs.chart_radius)) return false;
    for (const Circle& c : imgs) {
      if (!disjoint(c, *img)) return false;
    }
    imgs.push_back(*img);
  }
  return ifs.maps.size() < 2 || sampled_separation(ifs) > 0.0;
}

std::vector<Word> reduced_words(const FiberRepresentation& rep, int length) {
  const std::vector<Letter> letters = active_letters(rep);
  std::vector<Word> out{{}};
  for (int k = 0; k < length; ++k) {
    std::vector<Word> next;
    for (const Word& w : out) {
      for (const Letter& l : letters) {
        if (!w.empty() && w.back() == l.inverted()) continue;
        Word x = w;
        x.push_back(l);
        next.push_back(std::move(x));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Word> first_return_words(const FiberRepresentation& rep, const Letter& letter, int max_length) {
  const std::vector<Letter> letters = active_letters(rep);
  std::vector<Word> out;
  // Grow the letters applied before `letter`, most recent first, as
  // reduced words avoiding `letter` itself.
  std::vector<Word> prefixes{{}};
  for (int len = 1; len <= max_length; ++len) {
    for (const Word& p : prefixes) {
      if (!p.empty() && p.back() == letter.inverted()) continue;
      if (!p.empty() && p.front() == letter.inverted()) continue;
      Word w = p;
      w.push_back(letter);
      out.push_back(std::move(w));
    }
    std::vector<Word> next;
    for (const Word& p : prefixes) {
      for (const Letter& l : letters) {
        if (l == letter) continue;
        if (!p.empty() && p.back() == l.inverted()) continue;
        Word x = p;
        x.push_back(l);
        next.push_back(std::move(x));
      }
    }
    prefixes = std::move(next);
  }
  return out;
}

Chart schottky_chart(const SuspensionFoliation& f) {
  const auto& circles = f.circles();
  if (circles.size() != 4) throw ParameterError("schottky chart needs a Schottky preset");
  const MoebiusMap& A = f.rep().images()[0];
  // Fixed points solve c z^2 + (d - a) z - b = 0; the attracting one has
  // |cz + d| > 1.
  const Complex a = A.a(), b = A.b(), c = A.c(), d = A.d();
  const Complex disc = std::sqrt((d - a) * (d - a) + 4.0 * b * c);
  const Complex z1 = (a - d + disc) / (2.0 * c), z2 = (a - d - disc) / (2.0 * c);
  const Complex fixed = std::abs(c * z1 + d) > std::abs(c * z2 + d) ? z1 : z2;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < circles.size(); ++k) {
    if (k == 1) continue;  // the attracting circle of a1's image
    gap = std::min(gap, std::abs(fixed - circles[k].center) - circles[k].radius);
  }
  return {fixed, 0.5 * gap};
}

double solve_moran(const std::vector<double>& ratios) {
  if (ratios.size() < 2) throw ParameterError("single-map systems have no similarity dimension");
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("contraction ratios must lie in (0, 1)");
  }
  auto excess = [&](double s) {
    std::vector<double> terms(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) terms[i] = std::pow(ratios[i], s);
    return pairwise_sum(terms) - 1.0;
  };
  double lo = 0.0, hi = 1.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("similarity dimension bracket diverged");
  }
  while (hi - lo > 1e-13 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MoranResult moran_dimension(const IFSSystem& ifs) {
  if (ifs.maps.empty()) throw ParameterError("empty iterated function system");
  std::vector<double> r, lower, upper;
  bool capped = false;
  for (double lr : ifs.log_ratios()) {
    r.push_back(std::exp(lr));
    lower.push_back(std::exp(lr - ifs.kappa));
    const double u = std::exp(lr + ifs.kappa);
    if (u >= 1.0) capped = true;
    upper.push_back(u);
  }
  MoranResult out;
  out.dimension = solve_moran(r);
  double sum = 0.0;
  for (double x : r) sum += std::pow(x, out.dimension);
  out.residual = std::abs(sum - 1.0);
  out.lower = solve_moran(lower);
  out.upper = capped ? 2.0 : std::min(2.0, solve_moran(upper));
  return out;
}

// ---------------------------------------------------------------------------
// The inequality dim >= h / |lambda|

InequalityReport check_dimension_inequality(std::optional<double> d_hat, std::optional<double> h_hat,
                                            std::optional<double> lambda_hat, double tolerance) {
  if (!d_hat || !h_hat || !lambda_hat) {
    throw DependencyError("dimension inequality needs dimension, entropy and exponent estimates");
  }
  if (!(*lambda_hat < 0.0)) throw ParameterError("dimension inequality needs a negative exponent");
  if (!(*h_hat > 0.0)) throw ParameterError("dimension inequality needs a positive entropy");
  InequalityReport rep;
  rep.d_hat = *d_hat;
  rep.h_hat = *h_hat;
  rep.lambda_hat = *lambda_hat;
  rep.tolerance = tolerance;
  rep.ratio = *h_hat / std::abs(*lambda_hat);
  rep.margin = rep.d_hat - (rep.ratio - tolerance);
  rep.pass = rep.margin >= 0.0;
  return rep;
}

PresetScales preset_scales(const SuspensionFoliation& f) {
  if (f.fiber_type() == FiberType::circle) {
    return {1e-6, geometric_radii(1e-1, 1e-3, 9), geometric_radii(3e-1, 3e-3, 9)};
  }
  return {1e-12, geometric_radii(1e-3, 1e-8, 11), geometric_radii(1e-1, 1e-5, 9)};
}

InequalityRun verify_dimension_inequality(const SuspensionFoliation& f, const InequalityParams& p) {
  EstimatorOptions opt;
  opt.step = p.step;
  opt.threads = p.threads;
  const PresetScales sc = preset_scales(f);

  InequalityRun run;
  run.lyapunov = lyapunov_exponent(f, p.horizon, p.N, p.seed, opt);
  const double lambda = run.lyapunov.value;

  std::optional<double> h;
  std::string source;
  if (f.leaves_simply_connected()) {
    run.entropy = kaimanovich_entropy(f, p.horizon, p.N, p.seed, opt);
    h = run.entropy->estimate.value;
    source = "heat-kernel entropy of disc leaves";
  } else {
    const FiberHistogram hm = harmonic_measure(f, p.horizon, p.harmonic_N, 64, p.seed, opt);
    run.harmonic_dimension = local_dimension(hm.points, sc.measure_radii);
    h = run.harmonic_dimension->slope * std::abs(lambda);
    source = "dimension of the harmonic measure times |lambda|";
  }

  LimitSetOptions lo;
  lo.resolution = p.resolution > 0.0 ? p.resolution : sc.resolution;
  const LimitSetSample sample = sample_limit_set(f.rep(), p.depth, ProjectivePoint::from_complex(0.0), lo);
  run.box = box_counting(sample.points, sc.box_radii);

  run.report = check_dimension_inequality(run.box.box_dimension, h, lambda);
  run.report.entropy_source = source;
  if (std::abs(run.report.d_hat - run.report.ratio) < 0.1) run.report.notes.push_back("near equality");
  if (run.box.degenerate) run.report.notes.push_back("degenerate box-counting fit");
  if (run.harmonic_dimension && run.harmonic_dimension->low_confidence) {
    run.report.notes.push_back("low-confidence harmonic-measure dimension fit");
  }
  return run;
}

}  // namespace lamina
