#include "chainforge/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "chainforge/metric.hpp"

namespace chainforge {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path + ": cannot write file");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

std::vector<Token> tokenize(std::string_view text, char separator = ' ') {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c)) || c == separator) {
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '#' &&
             text[j] != separator)
        ++j;
      out.push_back({std::string(text.substr(i, j - i)), line});
      i = j;
    }
  }
  return out;
}

class TokenStream {
 public:
  TokenStream(std::vector<Token> tokens, std::string name) : tokens_(std::move(tokens)), name_(std::move(name)) {}

  [[noreturn]] void fail(const std::string& message) const {
    std::size_t line = pos_ < tokens_.size() ? tokens_[pos_].line : (tokens_.empty() ? 1 : tokens_.back().line);
    throw InputError(name_ + ":" + std::to_string(line) + ": " + message);
  }

  const Token& next(const char* what) {
    if (pos_ >= tokens_.size()) fail(std::string("unexpected end of file, expected ") + what);
    return tokens_[pos_++];
  }

  std::size_t count(const char* what) {
    const Token& t = next(what);
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) {
      --pos_;
      fail(std::string("expected ") + what + ", got '" + t.text + "'");
    }
    return v;
  }

  Rational number(const char* what) {
    const Token& t = next(what);
    try {
      return parse_rational(t.text);
    } catch (const InputError&) {
      --pos_;
      fail(std::string("expected ") + what + ", got '" + t.text + "'");
    }
  }

  bool done() const { return pos_ >= tokens_.size(); }
  const std::string& name() const { return name_; }
  // line of the next token, 0 at the end
  std::size_t line() const { return pos_ < tokens_.size() ? tokens_[pos_].line : 0; }
  void skip_rest_of(std::size_t line) {
    while (pos_ < tokens_.size() && tokens_[pos_].line == line) ++pos_;
  }
  [[noreturn]] void fail_at(std::size_t line, const std::string& message) const {
    throw InputError(name_ + ":" + std::to_string(line) + ": " + message);
  }

 private:
  std::vector<Token> tokens_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::string decimal(const Rational& q) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, to_double(q));
  return std::string(buf, p);
}

std::string wrap(const std::string& name, const std::exception& e) { return name + ": " + e.what(); }

}  // namespace

ComplexPtr parse_off(std::string_view text, const std::string& name, EdgeMetric metric) {
  TokenStream ts(tokenize(text), name);
  const Token& head = ts.next("OFF header");
  std::size_t dim = 3;
  if (head.text == "nOFF") {
    dim = ts.count("dimension");
  } else if (head.text != "OFF") {
    throw InputError(name + ":" + std::to_string(head.line) + ": expected OFF or nOFF header");
  }
  const std::size_t nv = ts.count("vertex count");
  const std::size_t nf = ts.count("face count");
  ts.count("edge count");
  std::vector<std::vector<Rational>> coords(nv, std::vector<Rational>(dim));
  for (auto& c : coords) {
    const std::size_t line = ts.line();
    for (auto& x : c) {
      if (ts.line() != line) ts.fail_at(line, "expected " + std::to_string(dim) + " coordinates");
      x = ts.number("coordinate");
    }
    if (ts.line() == line) ts.fail_at(line, "expected " + std::to_string(dim) + " coordinates");
  }
  std::vector<Simplex> faces;
  for (std::size_t f = 0; f < nf; ++f) {
    const std::size_t line = ts.line();
    const std::size_t m = ts.count("face size");
    if (m == 0) ts.fail_at(line, "empty face");
    Simplex s(m);
    for (auto& v : s) {
      if (ts.line() != line) ts.fail_at(line, "face lists fewer than " + std::to_string(m) + " vertices");
      std::size_t idx = ts.count("vertex index");
      if (idx >= nv) ts.fail("vertex index " + std::to_string(idx) + " out of range");
      v = static_cast<Vertex>(idx);
    }
    ts.skip_rest_of(line);  // optional color values
    Simplex sorted = s;
    if (canonicalize(sorted) == 0) ts.fail_at(line, "face repeats a vertex");
    faces.push_back(std::move(s));
  }
  if (!ts.done()) ts.fail("trailing data after faces");
  try {
    Geometry g;
    if (metric == EdgeMetric::kEuclidean) {
      g.coords = std::move(coords);
    } else {
      std::vector<std::pair<std::pair<std::size_t, std::size_t>, Rational>> edges;
      for (const Simplex& f : faces)
        for (std::size_t i = 0; i < f.size(); ++i)
          for (std::size_t j = i + 1; j < f.size(); ++j) edges.push_back({{f[i], f[j]}, Rational(1)});
      g.metric = std::make_shared<const FiniteMetricSpace>(shortest_path_metric(nv, edges));
    }
    return WeightedComplex::build(nv, std::move(faces), std::move(g));
  } catch (const InputError& e) {
    throw InputError(wrap(name, e));
  }
}

std::string write_off(const std::vector<std::vector<Rational>>& coords, const std::vector<Simplex>& faces) {
  std::ostringstream os;
  const std::size_t dim = coords.empty() ? 3 : coords[0].size();
  if (dim == 3)
    os << "OFF\n";
  else
    os << "nOFF\n" << dim << "\n";
  os << coords.size() << ' ' << faces.size() << " 0\n";
  for (const auto& c : coords) {
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << decimal(c[i]);
    os << '\n';
  }
  for (const auto& f : faces) {
    os << f.size();
    for (Vertex v : f) os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

FiniteMetricSpace parse_metric_csv(std::string_view text, const std::string& name) {
  std::vector<std::vector<Rational>> rows;
  std::size_t line = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    std::string_view row = text.substr(start, end - start);
    start = end + 1;
    if (auto hash = row.find('#'); hash != std::string_view::npos) row = row.substr(0, hash);
    auto tokens = tokenize(row, ',');
    if (tokens.empty()) continue;
    std::vector<Rational> values;
    for (const auto& t : tokens) {
      try {
        values.push_back(parse_rational(t.text));
      } catch (const InputError&) {
        throw InputError(name + ":" + std::to_string(line) + ": bad distance '" + t.text + "'");
      }
    }
    if (!rows.empty() && values.size() != rows[0].size())
      throw InputError(name + ":" + std::to_string(line) + ": expected " + std::to_string(rows[0].size()) +
                       " entries, got " + std::to_string(values.size()));
    rows.push_back(std::move(values));
    if (end == text.size()) break;
  }
  if (rows.empty()) throw InputError(name + ":1: empty distance matrix");
  if (rows.size() != rows[0].size())
    throw InputError(name + ":" + std::to_string(line) + ": matrix is " + std::to_string(rows.size()) + "x" +
                     std::to_string(rows[0].size()) + ", expected square");
  try {
    return FiniteMetricSpace(std::move(rows));
  } catch (const InputError& e) {
    throw InputError(wrap(name, e));
  }
}

std::string write_metric_csv(const FiniteMetricSpace& space) {
  std::ostringstream os;
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = 0; j < space.size(); ++j) os << (j ? "," : "") << to_exact_string(space(i, j));
    os << '\n';
  }
  return os.str();
}

Json parse_json(std::string_view text, const std::string& name) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw InputError(name + ":" + std::to_string(line) + ": invalid JSON");
  }
}

Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) return rational_from_double(j.get<double>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const InputError&) {
    }
  }
  throw InputError(where + ": expected a number or \"p/q\" string");
}

Json rational_json(const Rational& q) {
  Json j;
  j["exact"] = to_exact_string(q);
  j["decimal"] = to_double(q);
  return j;
}

namespace {

Simplex simplex_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw InputError(where + ": expected a vertex tuple");
  Simplex s;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long>() < 0) throw InputError(where + ": bad vertex index");
    s.push_back(static_cast<Vertex>(v.get<long>()));
  }
  return s;
}

Json simplex_json(const Simplex& s) {
  Json j = Json::array();
  for (Vertex v : s) j.push_back(v);
  return j;
}

}  // namespace

Chain chain_from_json(const Json& j, const ComplexPtr& complex, const std::string& name) {
  if (!j.is_object()) throw InputError(name + ": chain must be a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) throw InputError(name + ": chain needs an integer \"dim\"");
  const int dim = j["dim"].get<int>();
  Modulus modulus;
  if (j.contains("modulus") && !j["modulus"].is_null()) {
    if (!j["modulus"].is_number_integer()) throw InputError(name + ": \"modulus\" must be an integer or null");
    modulus = j["modulus"].get<int>();
  }
  std::vector<std::pair<Simplex, std::int64_t>> terms;
  if (j.contains("coeffs")) {
    if (!j["coeffs"].is_array()) throw InputError(name + ": \"coeffs\" must be an array");
    std::size_t idx = 0;
    for (const auto& term : j["coeffs"]) {
      const std::string where = name + ": coeffs[" + std::to_string(idx++) + "]";
      if (!term.is_array() || term.size() != 2 || !term[1].is_number_integer())
        throw InputError(where + ": expected [vertex-tuple, integer]");
      terms.emplace_back(simplex_from_json(term[0], where), term[1].get<std::int64_t>());
    }
  }
  try {
    return Chain::from_terms(complex, dim, terms, modulus);
  } catch (const InputError& e) {
    throw InputError(wrap(name, e));
  }
}

Json chain_to_json(const Chain& c) {
  Json j;
  j["dim"] = c.dim();
  j["modulus"] = c.modulus() ? Json(*c.modulus()) : Json(nullptr);
  Json coeffs = Json::array();
  for (const auto& [i, v] : c.coeffs()) coeffs.push_back(Json::array({simplex_json(c.complex().simplex(c.dim(), i)), v}));
  j["coeffs"] = std::move(coeffs);
  return j;
}

Json fractional_chain_to_json(const FractionalChain& c, const WeightedComplex& cx, int dim) {
  Json coeffs = Json::array();
  for (const auto& [i, v] : c) coeffs.push_back(Json::array({simplex_json(cx.simplex(dim, i)), to_exact_string(v)}));
  Json j;
  j["dim"] = dim;
  j["coeffs"] = std::move(coeffs);
  return j;
}

ComplexPtr complex_from_json(const Json& j, const std::string& name) {
  if (!j.is_object()) throw InputError(name + ": complex must be a JSON object");
  if (!j.contains("n_vertices") || !j["n_vertices"].is_number_integer() || j["n_vertices"].get<long>() < 0)
    throw InputError(name + ": complex needs a nonnegative \"n_vertices\"");
  const std::size_t n = j["n_vertices"].get<std::size_t>();
  std::vector<Simplex> simplices;
  if (j.contains("simplices")) {
    if (!j["simplices"].is_array()) throw InputError(name + ": \"simplices\" must be an array");
    std::size_t idx = 0;
    for (const auto& s : j["simplices"])
      simplices.push_back(simplex_from_json(s, name + ": simplices[" + std::to_string(idx++) + "]"));
  }
  Geometry g;
  if (j.contains("coords")) {
    for (const auto& row : j["coords"]) {
      std::vector<Rational> c;
      for (const auto& x : row) c.push_back(rational_from_json(x, name + ": coords"));
      g.coords.push_back(std::move(c));
    }
  }
  try {
    if (j.contains("metric")) {
      std::vector<std::vector<Rational>> rows;
      for (const auto& row : j["metric"]) {
        std::vector<Rational> r;
        for (const auto& x : row) r.push_back(rational_from_json(x, name + ": metric"));
        rows.push_back(std::move(r));
      }
      g.metric = std::make_shared<const FiniteMetricSpace>(std::move(rows));
    }
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      if (!w.is_array() || w.size() != simplices.size())
        throw InputError("\"weights\" must list one weight per simplex");
      std::vector<std::pair<Simplex, Rational>> weighted;
      for (std::size_t i = 0; i < simplices.size(); ++i)
        weighted.emplace_back(simplices[i], rational_from_json(w[i], name + ": weights"));
      return WeightedComplex::build_weighted(n, weighted, std::move(g));
    }
    return WeightedComplex::build(n, std::move(simplices), std::move(g));
  } catch (const InputError& e) {
    throw InputError(wrap(name, e));
  }
}

Json complex_to_json(const WeightedComplex& cx) {
  Json j;
  j["n_vertices"] = cx.vertex_count();
  Json simplices = Json::array(), weights = Json::array();
  for (int d = 1; d <= cx.dimension(); ++d)
    for (std::size_t i = 0; i < cx.count(d); ++i) {
      simplices.push_back(simplex_json(cx.simplex(d, i)));
      weights.push_back(to_exact_string(cx.weight(d, i)));
    }
  j["simplices"] = std::move(simplices);
  j["weights"] = std::move(weights);
  if (cx.has_metric()) {
    Json metric = Json::array();
    const auto& m = cx.metric();
    for (std::size_t a = 0; a < m.size(); ++a) {
      Json row = Json::array();
      for (std::size_t b = 0; b < m.size(); ++b) row.push_back(to_exact_string(m(a, b)));
      metric.push_back(std::move(row));
    }
    j["metric"] = std::move(metric);
  }
  return j;
}

VertexFunction function_from_json(const Json& j, std::size_t n_vertices, const std::string& name) {
  std::vector<std::optional<Rational>> values(n_vertices);
  if (j.is_array()) {
    if (j.size() != n_vertices)
      throw InputError(name + ": expected " + std::to_string(n_vertices) + " values, got " + std::to_string(j.size()));
    for (std::size_t i = 0; i < n_vertices; ++i) values[i] = rational_from_json(j[i], name + ": value " + std::to_string(i));
  } else if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      std::size_t v = 0;
      auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
      if (ec != std::errc() || p != key.data() + key.size() || v >= n_vertices)
        throw InputError(name + ": bad vertex key '" + key + "'");
      values[v] = rational_from_json(value, name + ": value of vertex " + key);
    }
  } else {
    throw InputError(name + ": vertex function must be an object or an array");
  }
  std::vector<Rational> out;
  for (std::size_t i = 0; i < n_vertices; ++i) {
    if (!values[i]) throw InputError(name + ": no value for vertex " + std::to_string(i));
    out.push_back(*values[i]);
  }
  return VertexFunction(std::move(out));
}

ComplexPtr load_complex(const std::string& path, EdgeMetric metric) {
  const std::string text = read_file(path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".off") == 0) return parse_off(text, path, metric);
  return complex_from_json(parse_json(text, path), path);
}

}  // namespace chainforge
