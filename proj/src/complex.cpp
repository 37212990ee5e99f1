#include "chainforge/complex.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

namespace chainforge {

std::string to_string(const Simplex& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

namespace {

std::string describe(const Simplex& s) { return to_string(s); }

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("chain coefficient overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("chain coefficient overflow");
  return r;
}

Rational factorial(int k) {
  Rational f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

Rational determinant(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(m[pivot][col]) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (sgn(m[r][col]) == 0) continue;
      Rational f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

}  // namespace

std::size_t SimplexHash::operator()(const Simplex& s) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (Vertex v : s) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

int canonicalize(Simplex& s) {
  int sign = 1;
  // insertion sort; tuples are short
  for (std::size_t i = 1; i < s.size(); ++i) {
    for (std::size_t j = i; j > 0 && s[j - 1] > s[j]; --j) {
      std::swap(s[j - 1], s[j]);
      sign = -sign;
    }
  }
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] == s[i - 1]) return 0;
  return sign;
}

Rational cayley_menger_squared_volume(const std::vector<std::vector<Rational>>& sq) {
  const std::size_t n = sq.size();  // k + 1 vertices
  if (n <= 1) return 1;
  const int k = static_cast<int>(n) - 1;
  std::vector<std::vector<Rational>> cm(n + 1, std::vector<Rational>(n + 1));
  for (std::size_t i = 1; i <= n; ++i) {
    cm[0][i] = 1;
    cm[i][0] = 1;
    for (std::size_t j = 1; j <= n; ++j) cm[i][j] = sq[i - 1][j - 1];
  }
  Rational det = determinant(std::move(cm));
  Rational scale = factorial(k);
  scale *= scale;
  mpz_class two_k = mpz_class(1) << k;
  scale *= Rational(two_k);
  Rational v2 = det / scale;
  if ((k + 1) % 2 == 1) v2 = -v2;
  return v2;
}

std::shared_ptr<const WeightedComplex> WeightedComplex::build(std::size_t n_vertices,
                                                              std::vector<Simplex> simplices,
                                                              Geometry geometry) {
  std::shared_ptr<WeightedComplex> c(new WeightedComplex());
  std::vector<std::set<Simplex>> by_dim(1);
  for (Vertex v = 0; v < n_vertices; ++v) by_dim[0].insert(Simplex{v});
  for (auto& s : simplices) {
    if (s.empty()) continue;
    if (canonicalize(s) == 0) throw InputError("degenerate simplex " + describe(s));
    if (s.back() >= n_vertices) throw InputError("simplex " + describe(s) + " uses unknown vertex");
    // all nonempty subsets
    const std::size_t m = s.size();
    if (m > 24) throw InputError("simplex dimension too large");
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      Simplex face;
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (1u << i)) face.push_back(s[i]);
      if (by_dim.size() < face.size()) by_dim.resize(face.size());
      by_dim[face.size() - 1].insert(std::move(face));
    }
  }
  c->simplices_.resize(by_dim.size());
  for (std::size_t d = 0; d < by_dim.size(); ++d)
    c->simplices_[d].assign(by_dim[d].begin(), by_dim[d].end());
  c->attach_geometry(std::move(geometry), n_vertices);
  c->index_and_link();
  c->compute_weights(false);
  return c;
}

std::shared_ptr<const WeightedComplex> WeightedComplex::build_closed(
    std::vector<std::vector<Simplex>> by_dim, Geometry geometry, bool parallel) {
  std::shared_ptr<WeightedComplex> c(new WeightedComplex());
  c->simplices_ = std::move(by_dim);
  while (!c->simplices_.empty() && c->simplices_.back().empty()) c->simplices_.pop_back();
  const std::size_t n = c->simplices_.empty() ? 0 : c->simplices_[0].size();
  for (std::size_t i = 0; i < n; ++i)
    if (c->simplices_[0][i] != Simplex{static_cast<Vertex>(i)})
      throw InputError("vertex list must be 0..n-1");
  c->attach_geometry(std::move(geometry), n);
  c->index_and_link();
  c->compute_weights(parallel);
  return c;
}

void WeightedComplex::attach_geometry(Geometry geometry, std::size_t n_vertices) {
  coords_ = std::move(geometry.coords);
  metric_ = std::move(geometry.metric);
  if (!coords_.empty() && coords_.size() != n_vertices)
    throw InputError("coordinate count does not match vertex count");
  if (metric_ && metric_->size() != n_vertices)
    throw InputError("metric size does not match vertex count");
  if (!metric_ && !coords_.empty()) {
    std::vector<std::vector<Rational>> rows(n_vertices, std::vector<Rational>(n_vertices));
    for (std::size_t i = 0; i < n_vertices; ++i)
      for (std::size_t j = i + 1; j < n_vertices; ++j) {
        Rational sq = 0;
        for (std::size_t t = 0; t < coords_[i].size(); ++t) {
          Rational diff = coords_[i][t] - coords_[j][t];
          sq += diff * diff;
        }
        rows[i][j] = rows[j][i] = sqrt_rounded(sq);
      }
    metric_ = std::make_shared<FiniteMetricSpace>(std::move(rows),
                                                  FiniteMetricSpace::Check::kSkipTriangle);
  }
}

void WeightedComplex::compute_weights(bool parallel) {
  weights_.assign(simplices_.size(), {});
  if (simplices_.empty()) return;
  weights_[0].assign(simplices_[0].size(), Rational(1));
  for (std::size_t d = 1; d < simplices_.size(); ++d) {
    if (!metric_) throw InputError("complex with simplices needs coordinates, a metric or weights");
    auto& w = weights_[d];
    w.resize(simplices_[d].size());
    const long long count = static_cast<long long>(simplices_[d].size());
    bool failed = false;
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
    for (long long ii = 0; ii < count; ++ii) {
      const std::size_t i = static_cast<std::size_t>(ii);
      const Simplex& s = simplices_[d][i];
      std::vector<std::vector<Rational>> sq(s.size(), std::vector<Rational>(s.size()));
      for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = a + 1; b < s.size(); ++b) {
          Rational v;
          if (!coords_.empty()) {
            v = 0;
            for (std::size_t t = 0; t < coords_[s[a]].size(); ++t) {
              Rational diff = coords_[s[a]][t] - coords_[s[b]][t];
              v += diff * diff;
            }
          } else {
            const Rational& dist = (*metric_)(s[a], s[b]);
            v = dist * dist;
          }
          sq[a][b] = sq[b][a] = v;
        }
      Rational v2 = cayley_menger_squared_volume(sq);
      if (sgn(v2) > 0) {
        w[i] = sqrt_rounded(v2);
      } else {
        Rational diam = diameter(static_cast<int>(d), i);
        Rational p = 1;
        for (std::size_t t = 0; t < d; ++t) p *= diam;
        w[i] = p / factorial(static_cast<int>(d));
      }
      if (sgn(w[i]) <= 0) {
#pragma omp atomic write
        failed = true;
      }
    }
    if (failed) throw InputError("complex contains a simplex of zero volume");
  }
}

std::shared_ptr<const WeightedComplex> WeightedComplex::build_weighted(
    std::size_t n_vertices, const std::vector<std::pair<Simplex, Rational>>& weighted,
    Geometry geometry) {
  std::shared_ptr<WeightedComplex> c(new WeightedComplex());
  std::vector<std::map<Simplex, Rational>> by_dim(1);
  for (Vertex v = 0; v < n_vertices; ++v) by_dim[0][Simplex{v}] = 1;
  for (const auto& [raw, w] : weighted) {
    Simplex s = raw;
    if (s.empty()) continue;
    if (canonicalize(s) == 0) throw InputError("degenerate simplex " + describe(s));
    if (s.back() >= n_vertices) throw InputError("simplex " + describe(s) + " uses unknown vertex");
    if (s.size() == 1) {
      if (w != 1) throw InputError("0-simplex weight must be 1");
      continue;
    }
    if (sgn(w) <= 0) throw InputError("non-positive weight on " + describe(s));
    if (by_dim.size() < s.size()) by_dim.resize(s.size());
    by_dim[s.size() - 1][s] = w;
  }
  c->simplices_.resize(by_dim.size());
  c->weights_.resize(by_dim.size());
  for (std::size_t d = 0; d < by_dim.size(); ++d)
    for (auto& [s, w] : by_dim[d]) {
      c->simplices_[d].push_back(s);
      c->weights_[d].push_back(w);
    }
  c->attach_geometry(std::move(geometry), n_vertices);
  c->index_and_link();
  return c;
}

void WeightedComplex::index_and_link() {
  index_.assign(simplices_.size(), {});
  faces_.assign(simplices_.size(), {});
  for (std::size_t d = 0; d < simplices_.size(); ++d) {
    index_[d].reserve(simplices_[d].size());
    for (std::size_t i = 0; i < simplices_[d].size(); ++i) index_[d].emplace(simplices_[d][i], i);
  }
  for (std::size_t d = 1; d < simplices_.size(); ++d) {
    auto& f = faces_[d];
    f.reserve(simplices_[d].size() * (d + 1));
    for (const Simplex& s : simplices_[d]) {
      for (std::size_t j = 0; j <= d; ++j) {
        Simplex face;
        face.reserve(d);
        for (std::size_t t = 0; t <= d; ++t)
          if (t != j) face.push_back(s[t]);
        auto it = index_[d - 1].find(face);
        if (it == index_[d - 1].end())
          throw InputError("complex is not downward closed: missing face " + describe(face));
        f.push_back(static_cast<std::uint32_t>(it->second));
      }
    }
  }
}

std::size_t WeightedComplex::count(int dim) const {
  if (dim < 0 || dim > dimension()) return 0;
  return simplices_[dim].size();
}

std::size_t WeightedComplex::total_count() const {
  std::size_t n = 0;
  for (const auto& s : simplices_) n += s.size();
  return n;
}

const std::vector<Simplex>& WeightedComplex::simplices(int dim) const {
  static const std::vector<Simplex> empty;
  if (dim < 0 || dim > dimension()) return empty;
  return simplices_[dim];
}

std::optional<std::size_t> WeightedComplex::find(const Simplex& s) const {
  if (s.empty()) return std::nullopt;
  const std::size_t d = s.size() - 1;
  if (d >= index_.size()) return std::nullopt;
  auto it = index_[d].find(s);
  if (it == index_[d].end()) return std::nullopt;
  return it->second;
}

std::size_t WeightedComplex::index_of(const Simplex& s) const {
  auto i = find(s);
  if (!i) throw InputError("simplex " + describe(s) + " is not in the complex");
  return *i;
}

std::span<const std::uint32_t> WeightedComplex::faces(int dim, std::size_t index) const {
  const std::size_t k = static_cast<std::size_t>(dim) + 1;
  return std::span<const std::uint32_t>(faces_[dim].data() + index * k, k);
}

const FiniteMetricSpace& WeightedComplex::metric() const {
  if (!metric_) throw InputError("complex has no metric");
  return *metric_;
}

Rational WeightedComplex::diameter(int dim, std::size_t index) const {
  const Simplex& s = simplices_[dim][index];
  const auto& m = metric();
  Rational best = 0;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b)
      if (m(s[a], s[b]) > best) best = m(s[a], s[b]);
  return best;
}

bool WeightedComplex::is_subcomplex_of(const WeightedComplex& other) const {
  for (const auto& level : simplices_)
    for (const auto& s : level)
      if (!other.find(s)) return false;
  return true;
}

std::int64_t symmetric_residue(std::int64_t c, int p) {
  std::int64_t r = c % p;
  if (r < 0) r += p;
  if (2 * r > p) r -= p;
  return r;
}

Chain::Chain(ComplexPtr complex, int dim, Modulus modulus)
    : complex_(std::move(complex)), dim_(dim), modulus_(modulus) {
  if (!complex_) throw InputError("chain needs a complex");
  if (dim < 0) throw InputError("chain dimension must be nonnegative");
  if (modulus_ && *modulus_ < 2) throw InputError("modulus must be at least 2");
}

Chain Chain::from_terms(ComplexPtr complex, int dim,
                        const std::vector<std::pair<Simplex, std::int64_t>>& terms,
                        Modulus modulus) {
  Chain c(std::move(complex), dim, modulus);
  for (const auto& [raw, coeff] : terms) {
    Simplex s = raw;
    if (static_cast<int>(s.size()) != dim + 1)
      throw InputError("simplex " + describe(raw) + " has wrong dimension for a " +
                       std::to_string(dim) + "-chain");
    int sign = canonicalize(s);
    if (sign == 0) throw InputError("degenerate simplex " + describe(raw));
    c.add_term(c.complex_->index_of(s), checked_mul(sign, coeff));
  }
  return c;
}

Chain Chain::all_simplices(ComplexPtr complex, int dim, Modulus modulus) {
  Chain c(complex, dim, modulus);
  for (std::size_t i = 0; i < complex->count(dim); ++i) c.add_term(i, 1);
  return c;
}

std::int64_t Chain::coefficient(std::size_t index) const {
  auto it = coeffs_.find(index);
  return it == coeffs_.end() ? 0 : it->second;
}

void Chain::add_term(std::size_t index, std::int64_t c) {
  if (index >= complex_->count(dim_)) throw InputError("simplex index out of range");
  if (c == 0) return;
  auto [it, inserted] = coeffs_.try_emplace(index, 0);
  std::int64_t v = checked_add(it->second, c);
  if (modulus_) v = symmetric_residue(v, *modulus_);
  if (v == 0)
    coeffs_.erase(it);
  else
    it->second = v;
}

std::vector<Vertex> Chain::support_vertices() const {
  std::vector<Vertex> out;
  for (const auto& [i, c] : coeffs_)
    for (Vertex v : complex_->simplex(dim_, i)) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::int64_t Chain::max_abs_coefficient() const {
  std::int64_t m = 0;
  for (const auto& [i, c] : coeffs_) m = std::max(m, c < 0 ? -c : c);
  return m;
}

std::int64_t Chain::l1_norm() const {
  std::int64_t m = 0;
  for (const auto& [i, c] : coeffs_) m = checked_add(m, c < 0 ? -c : c);
  return m;
}

void Chain::require_compatible(const Chain& other) const {
  if (complex_ != other.complex_) throw InputError("chains live on different complexes");
  if (dim_ != other.dim_) throw InputError("chain dimensions differ");
  if (modulus_ != other.modulus_) throw InputError("chain moduli differ");
}

Chain Chain::operator-() const {
  Chain out(complex_, dim_, modulus_);
  for (const auto& [i, c] : coeffs_) out.add_term(i, -c);
  return out;
}

Chain& Chain::operator+=(const Chain& other) {
  require_compatible(other);
  for (const auto& [i, c] : other.coeffs_) add_term(i, c);
  return *this;
}

Chain& Chain::operator-=(const Chain& other) {
  require_compatible(other);
  for (const auto& [i, c] : other.coeffs_) add_term(i, -c);
  return *this;
}

Chain operator*(std::int64_t s, const Chain& c) {
  Chain out(c.complex_, c.dim_, c.modulus_);
  for (const auto& [i, v] : c.coeffs_) out.add_term(i, checked_mul(s, v));
  return out;
}

bool operator==(const Chain& a, const Chain& b) {
  return a.complex_ == b.complex_ && a.dim_ == b.dim_ && a.modulus_ == b.modulus_ &&
         a.coeffs_ == b.coeffs_;
}

Chain Chain::with_modulus(Modulus m) const {
  Chain out(complex_, dim_, m);
  for (const auto& [i, c] : coeffs_) out.add_term(i, c);
  return out;
}

Chain boundary(const Chain& t) {
  if (t.dim() == 0) throw InputError("no boundary in dimension 0");
  Chain out(t.complex_ptr(), t.dim() - 1, t.modulus());
  const auto& cx = t.complex();
  for (const auto& [i, c] : t.coeffs()) {
    auto f = cx.faces(t.dim(), i);
    for (std::size_t j = 0; j < f.size(); ++j) out.add_term(f[j], (j % 2 == 0) ? c : -c);
  }
  return out;
}

Chain reduce_mod_p(const Chain& t, int p) {
  if (p < 2) throw InputError("modulus must be at least 2");
  if (t.modulus()) throw InputError("reduce_mod_p expects an integer chain");
  return t.with_modulus(p);
}

bool congruent_mod(const Chain& a, const Chain& b, int p) {
  Chain diff = a.with_modulus(std::nullopt) - b.with_modulus(std::nullopt);
  for (const auto& [i, c] : diff.coeffs())
    if (c % p != 0) return false;
  return true;
}

SimplicialMap::SimplicialMap(ComplexPtr source, ComplexPtr target, std::vector<Vertex> vertex_map)
    : source_(std::move(source)), target_(std::move(target)), map_(std::move(vertex_map)) {
  if (map_.size() != source_->vertex_count())
    throw InputError("vertex map size does not match source vertex count");
  for (Vertex v : map_)
    if (v >= target_->vertex_count()) throw InputError("vertex map points outside the target");
  for (int d = 0; d <= source_->dimension(); ++d)
    for (const Simplex& s : source_->simplices(d)) {
      Simplex img;
      for (Vertex v : s) img.push_back(map_[v]);
      std::sort(img.begin(), img.end());
      img.erase(std::unique(img.begin(), img.end()), img.end());
      if (!target_->find(img))
        throw InputError("map not simplicial: image of " + describe(s) + " is not a simplex");
    }
}

std::optional<Rational> SimplicialMap::expansion(int dim, std::size_t index) const {
  Simplex img;
  for (Vertex v : source_->simplex(dim, index)) img.push_back(map_[v]);
  if (canonicalize(img) == 0) return std::nullopt;
  return target_->weight(dim, target_->index_of(img)) / source_->weight(dim, index);
}

Rational SimplicialMap::max_expansion(int dim) const {
  Rational best = 0;
  for (std::size_t i = 0; i < source_->count(dim); ++i)
    if (auto e = expansion(dim, i); e && *e > best) best = *e;
  return best;
}

Chain pushforward(const SimplicialMap& f, const Chain& t) {
  if (t.complex_ptr() != f.source()) throw InputError("chain does not live on the map's source");
  Chain out(f.target(), t.dim(), t.modulus());
  for (const auto& [i, c] : t.coeffs()) {
    Simplex img;
    for (Vertex v : t.complex().simplex(t.dim(), i)) img.push_back(f(v));
    int sign = canonicalize(img);
    if (sign == 0) continue;
    out.add_term(f.target()->index_of(img), sign * c);
  }
  return out;
}

}  // namespace chainforge
