#include "chainforge/corpus.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "chainforge/io.hpp"
#include "chainforge/systolic.hpp"

namespace chainforge {

namespace {

// mt19937_64 output is fixed by the standard; map it to a range by hand.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t range) { return rng() % range; }

FiniteMetricSpace arc_metric(const std::vector<long>& positions, long circumference) {
  const std::size_t n = positions.size();
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long gap = std::labs(positions[i] - positions[j]);
      d[i][j] = std::min(gap, circumference - gap);
    }
  return FiniteMetricSpace(std::move(d));
}

std::vector<std::vector<Rational>> clifford_coords(std::size_t a, std::size_t b) {
  const double pi = std::acos(-1.0);
  const double ra = 1.0 / (2.0 * std::sin(pi / static_cast<double>(a)));
  const double rb = 1.0 / (2.0 * std::sin(pi / static_cast<double>(b)));
  std::vector<std::vector<Rational>> coords;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      double s = 2 * pi * static_cast<double>(i) / static_cast<double>(a);
      double t = 2 * pi * static_cast<double>(j) / static_cast<double>(b);
      coords.push_back({rational_from_double(ra * std::cos(s)), rational_from_double(ra * std::sin(s)),
                        rational_from_double(rb * std::cos(t)), rational_from_double(rb * std::sin(t))});
    }
  return coords;
}

std::vector<std::vector<Rational>> grid_coords(std::size_t a, std::size_t b) {
  std::vector<std::vector<Rational>> coords;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j)
      coords.push_back({Rational(static_cast<long>(i)), Rational(static_cast<long>(j)), Rational(0)});
  return coords;
}

}  // namespace

std::vector<CorpusFile> corpus_files(const CorpusOptions& o) {
  std::vector<CorpusFile> files;
  std::mt19937_64 rng(o.seed);

  for (std::size_t n : o.circle_sizes) {
    if (n < 3) throw InputError("circle sizes must be at least 3");
    std::vector<long> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = static_cast<long>(i);
    files.push_back({"circle_" + std::to_string(n) + ".csv", "polygon metric", "",
                     write_metric_csv(arc_metric(pos, static_cast<long>(n)))});
    // random distinct positions on a circle of circumference 100 n
    const long circumference = 100 * static_cast<long>(n);
    std::set<long> chosen;
    while (chosen.size() < n) chosen.insert(static_cast<long>(draw(rng, static_cast<std::uint64_t>(circumference))));
    std::vector<long> sampled(chosen.begin(), chosen.end());
    files.push_back({"sampled_circle_" + std::to_string(n) + ".csv", "sampled circle metric", "",
                     write_metric_csv(arc_metric(sampled, circumference))});
  }

  for (std::size_t k : o.torus_sizes)
    files.push_back({"torus_" + std::to_string(k) + ".off", "flat torus", "euclidean",
                     write_off(clifford_coords(k, k), square_torus_triangles(k, k))});
  files.push_back({"thin_torus_3x12.off", "thin torus", "euclidean",
                   write_off(clifford_coords(3, 12), square_torus_triangles(3, 12))});
  files.push_back({"hex_torus_6.off", "hexagonal torus", "unit", write_off(clifford_coords(6, 6), hex_torus_triangles(6))});

  std::vector<std::vector<Rational>> simplex_coords(6, std::vector<Rational>(6, Rational(0)));
  for (std::size_t i = 0; i < 6; ++i) simplex_coords[i][i] = 1;
  files.push_back({"rp2_6.off", "projective plane", "unit", write_off(simplex_coords, rp2_six_triangles())});
  files.push_back({"klein_4x4.off", "Klein bottle", "unit", write_off(grid_coords(4, 4), klein_bottle_triangles(4, 4))});
  std::vector<std::vector<Rational>> tetra{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  files.push_back({"sphere_tetra.off", "sphere", "euclidean",
                   write_off(tetra, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}})});

  for (std::size_t r = 0; r < o.random_metrics; ++r) {
    const std::size_t n = 8 + draw(rng, 5);
    std::set<std::pair<long, long>> pts;
    while (pts.size() < n)
      pts.emplace(static_cast<long>(draw(rng, 20)), static_cast<long>(draw(rng, 20)));
    std::vector<std::pair<long, long>> p(pts.begin(), pts.end());
    std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::labs(p[i].first - p[j].first) + std::labs(p[i].second - p[j].second);
    files.push_back({"random_l1_" + std::to_string(r) + ".csv", "random metric for Rips", "",
                     write_metric_csv(FiniteMetricSpace(std::move(d)))});
  }
  return files;
}

std::vector<CorpusFile> write_corpus(const CorpusOptions& o, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError(dir + ": cannot create directory");
  auto files = corpus_files(o);
  Json manifest;
  manifest["seed"] = o.seed;
  Json list = Json::array();
  for (const auto& f : files) {
    write_file((std::filesystem::path(dir) / f.name).string(), f.bytes);
    Json entry;
    entry["name"] = f.name;
    entry["kind"] = f.kind;
    if (!f.edge_metric.empty()) entry["edge_metric"] = f.edge_metric;
    entry["sha256"] = sha256_hex(f.bytes);
    list.push_back(std::move(entry));
  }
  manifest["files"] = std::move(list);
  write_file((std::filesystem::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  return files;
}

}  // namespace chainforge
