#include "grc/graded_algebra.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <set>
#include <sstream>

namespace grc {

Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) -> Integer {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
    if (i == s.size()) throw InputError("malformed rational '" + std::string(text) + "'");
    for (std::size_t j = i; j < s.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(s[j])))
        throw InputError("malformed rational '" + std::string(text) + "'");
    Integer v(std::string(s.substr(i)));
    return neg ? Integer(-v) : v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  const Integer num = parse_int(text.substr(0, slash));
  const std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+'))
    throw InputError("malformed rational '" + std::string(text) + "'");
  const Integer den = parse_int(den_text);
  if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

// ---------------------------------------------------------------- Chart

Chart::Chart(int n_x, int n_e, int n_p, std::vector<std::string> x_names,
             std::vector<std::string> e_names, std::vector<std::string> p_names)
    : n_x_(n_x), n_e_(n_e), n_p_(n_p) {
  if (n_x < 0 || n_e < 0 || n_p < 0) throw InputError("chart: negative generator count");
  if (n_e > kMaxOdd) throw InputError("chart: at most 64 odd generators are supported");
  auto fill = [](std::vector<std::string> given, int n, const char* prefix) {
    if (given.empty())
      for (int i = 0; i < n; ++i) given.push_back(prefix + std::to_string(i + 1));
    if (static_cast<int>(given.size()) != n) throw InputError("chart: name count mismatch");
    return given;
  };
  names_[0] = fill(std::move(x_names), n_x, "x");
  names_[1] = fill(std::move(e_names), n_e, "e");
  names_[2] = fill(std::move(p_names), n_p, "p");
  std::set<std::string> seen;
  for (const auto& list : names_)
    for (const auto& n : list)
      if (n.empty() || !seen.insert(n).second) throw InputError("chart: duplicate or empty name '" + n + "'");
}

const std::string& Chart::name(Gen g) const {
  if (!valid(g)) throw InputError("chart: generator index out of range");
  return names_[static_cast<int>(g.kind)][g.index];
}

std::optional<Gen> Chart::lookup(const std::string& name) const {
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < names_[k].size(); ++i)
      if (names_[k][i] == name) return Gen{static_cast<GenKind>(k), static_cast<int>(i)};
  if (name.size() >= 2 && std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    GenKind kind;
    switch (name[0]) {
      case 'x': kind = GenKind::X; break;
      case 'e': kind = GenKind::E; break;
      case 'p': kind = GenKind::P; break;
      default: return std::nullopt;
    }
    if (name.size() > 6) return std::nullopt;
    const int idx = std::stoi(name.substr(1)) - 1;
    Gen g{kind, idx};
    if (valid(g)) return g;
  }
  return std::nullopt;
}

// ------------------------------------------------------------- Monomial

Monomial Monomial::unit(const Chart& c) {
  Monomial m;
  m.x.assign(c.n_x(), 0);
  m.p.assign(c.n_p(), 0);
  return m;
}

int Monomial::odd_count() const { return std::popcount(e); }

int Monomial::degree() const {
  int d = odd_count();
  for (auto k : p) d += 2 * k;
  return d;
}

int Monomial::x_degree() const {
  int d = 0;
  for (auto k : x) d += k;
  return d;
}

namespace {

// a precedes b when, at the first differing slot, a carries the larger exponent.
bool exponent_less(const std::vector<std::uint16_t>& a, const std::vector<std::uint16_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

int total(const std::vector<std::uint16_t>& v) {
  int t = 0;
  for (auto k : v) t += k;
  return t;
}

}  // namespace

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  const int ca = std::popcount(a.e), cb = std::popcount(b.e);
  if (ca != cb) return ca < cb;
  if (a.e != b.e) {
    const std::uint64_t d = a.e ^ b.e;
    const std::uint64_t low = d & (~d + 1);
    return (a.e & low) != 0;
  }
  const int pa = total(a.p), pb = total(b.p);
  if (pa != pb) return pa < pb;
  if (a.p != b.p) return exponent_less(a.p, b.p);
  const int xa = total(a.x), xb = total(b.x);
  if (xa != xb) return xa < xb;
  return exponent_less(a.x, b.x);
}

int odd_product_sign(std::uint64_t a, std::uint64_t b) {
  if (a & b) return 0;
  int swaps = 0;
  while (b) {
    const int j = std::countr_zero(b);
    b &= b - 1;
    swaps += j + 1 < 64 ? std::popcount(a >> (j + 1)) : 0;
  }
  return (swaps & 1) ? -1 : 1;
}

// ----------------------------------------------------------- GradedPoly

GradedPoly GradedPoly::constant(ChartPtr chart, const Rational& c) {
  GradedPoly f(chart);
  f.add_term(Monomial::unit(*chart), c);
  return f;
}

GradedPoly GradedPoly::generator(ChartPtr chart, Gen g) {
  if (!chart->valid(g)) throw InputError("unknown generator index");
  Monomial m = Monomial::unit(*chart);
  switch (g.kind) {
    case GenKind::X: m.x[g.index] = 1; break;
    case GenKind::E: m.e = std::uint64_t{1} << g.index; break;
    case GenKind::P: m.p[g.index] = 1; break;
  }
  GradedPoly f(chart);
  f.add_term(m, Rational(1));
  return f;
}

GradedPoly GradedPoly::monomial(ChartPtr chart, Monomial m, const Rational& c) {
  GradedPoly f(std::move(chart));
  f.add_term(m, c);
  return f;
}

void GradedPoly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void require_same_chart(const GradedPoly& a, const GradedPoly& b) {
  if (!a.chart_ptr() || !b.chart_ptr()) throw InputError("polynomial without chart");
  if (a.chart_ptr() != b.chart_ptr() && !(a.chart() == b.chart())) throw InputError("chart mismatch");
}

GradedPoly& GradedPoly::operator+=(const GradedPoly& o) {
  if (!chart_) chart_ = o.chart_;
  require_same_chart(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

GradedPoly& GradedPoly::operator-=(const GradedPoly& o) {
  if (!chart_) chart_ = o.chart_;
  require_same_chart(*this, o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

GradedPoly& GradedPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

GradedPoly operator*(const GradedPoly& a, const GradedPoly& b) {
  require_same_chart(a, b);
  GradedPoly out(a.chart_ptr());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      const int s = odd_product_sign(ma.e, mb.e);
      if (s == 0) continue;
      Monomial m;
      m.e = ma.e | mb.e;
      m.x.resize(ma.x.size());
      for (std::size_t i = 0; i < m.x.size(); ++i) m.x[i] = ma.x[i] + mb.x[i];
      m.p.resize(ma.p.size());
      for (std::size_t i = 0; i < m.p.size(); ++i) m.p[i] = ma.p[i] + mb.p[i];
      out.add_term(m, s > 0 ? Rational(ca * cb) : Rational(-(ca * cb)));
    }
  }
  return out;
}

bool operator==(const GradedPoly& a, const GradedPoly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  auto ia = a.terms_.begin();
  for (auto ib = b.terms_.begin(); ib != b.terms_.end(); ++ia, ++ib)
    if (!(ia->first == ib->first) || ia->second != ib->second) return false;
  return true;
}

std::optional<int> GradedPoly::degree() const {
  if (terms_.empty()) return 0;
  const int d = terms_.begin()->first.degree();
  for (const auto& [m, c] : terms_)
    if (m.degree() != d) return std::nullopt;
  return d;
}

GradedPoly GradedPoly::homogeneous_part(int d) const {
  GradedPoly out(chart_);
  for (const auto& [m, c] : terms_)
    if (m.degree() == d) out.terms_.emplace(m, c);
  return out;
}

int GradedPoly::max_x_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.x_degree());
  return d;
}

int GradedPoly::max_odd_count() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.odd_count());
  return d;
}

int GradedPoly::max_p_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, total(m.p));
  return d;
}

bool GradedPoly::involves(Gen g) const {
  for (const auto& [m, c] : terms_) {
    switch (g.kind) {
      case GenKind::X: if (m.x[g.index]) return true; break;
      case GenKind::E: if (m.e >> g.index & 1) return true; break;
      case GenKind::P: if (m.p[g.index]) return true; break;
    }
  }
  return false;
}

bool GradedPoly::independent_of(const std::vector<Gen>& gens) const {
  return std::none_of(gens.begin(), gens.end(), [&](Gen g) { return involves(g); });
}

std::optional<Rational> GradedPoly::as_constant() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() != 1) return std::nullopt;
  const auto& [m, c] = *terms_.begin();
  if (m.e != 0 || total(m.x) != 0 || total(m.p) != 0) return std::nullopt;
  return c;
}

std::string GradedPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    std::vector<std::string> factors;
    for (int i = 0; i < static_cast<int>(m.x.size()); ++i)
      if (m.x[i]) factors.push_back(chart_->name(xg(i)) + (m.x[i] > 1 ? "^" + std::to_string(m.x[i]) : ""));
    for (int i = 0; i < chart_->n_e(); ++i)
      if (m.e >> i & 1) factors.push_back(chart_->name(eg(i)));
    for (int i = 0; i < static_cast<int>(m.p.size()); ++i)
      if (m.p[i]) factors.push_back(chart_->name(pg(i)) + (m.p[i] > 1 ? "^" + std::to_string(m.p[i]) : ""));
    const Rational mag = c < 0 ? Rational(-c) : c;
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    std::string body;
    if (mag != 1 || factors.empty()) body = mag.str();
    for (const auto& f : factors) body += (body.empty() ? "" : "*") + f;
    os << body;
  }
  return os.str();
}

// ------------------------------------------------------------ free API

GradedPoly normalize(const std::vector<RawTerm>& raw, const ChartPtr& chart) {
  GradedPoly out(chart);
  for (const auto& t : raw) {
    GradedPoly prod = GradedPoly::constant(chart, t.coefficient);
    for (const Gen& g : t.factors) {
      if (!chart->valid(g)) throw InputError("unknown generator index in raw term");
      prod = prod * GradedPoly::generator(chart, g);
    }
    out += prod;
  }
  return out;
}

GradedPoly multiply(const GradedPoly& f, const GradedPoly& g) { return f * g; }

std::optional<int> degree(const GradedPoly& f) { return f.degree(); }

namespace {

GradedPoly derivative(const GradedPoly& f, Gen g, bool right) {
  if (!f.chart().valid(g)) throw InputError("derivative: unknown generator");
  GradedPoly out(f.chart_ptr());
  for (const auto& [m, c] : f.terms()) {
    Monomial d = m;
    Rational coef = c;
    switch (g.kind) {
      case GenKind::X:
        if (!m.x[g.index]) continue;
        coef *= m.x[g.index];
        --d.x[g.index];
        break;
      case GenKind::P:
        if (!m.p[g.index]) continue;
        coef *= m.p[g.index];
        --d.p[g.index];
        break;
      case GenKind::E: {
        const std::uint64_t bit = std::uint64_t{1} << g.index;
        if (!(m.e & bit)) continue;
        const int passed = right ? std::popcount(m.e & ~((bit << 1) - 1)) : std::popcount(m.e & (bit - 1));
        if (passed & 1) coef = -coef;
        d.e &= ~bit;
        break;
      }
    }
    out.add_term(d, coef);
  }
  return out;
}

}  // namespace

GradedPoly partial_derivative(const GradedPoly& f, Gen g) { return derivative(f, g, false); }
GradedPoly right_derivative(const GradedPoly& f, Gen g) { return derivative(f, g, true); }

GradedPoly substitute(const GradedPoly& f, const std::map<Gen, GradedPoly>& assignments) {
  const ChartPtr& chart = f.chart_ptr();
  for (const auto& [g, r] : assignments) {
    if (!chart->valid(g)) throw InputError("substitute: unknown generator");
    require_same_chart(f, r);
    const auto d = r.degree();
    if (!r.is_zero() && (!d || *d != g.degree()))
      throw DomainError("substitute: replacement for " + chart->name(g) + " has the wrong degree");
  }
  std::map<std::pair<Gen, int>, GradedPoly> powers;
  auto power = [&](Gen g, int k) -> const GradedPoly& {
    auto key = std::make_pair(g, k);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    auto a = assignments.find(g);
    GradedPoly base = a != assignments.end() ? a->second : GradedPoly::generator(chart, g);
    GradedPoly acc = GradedPoly::constant(chart, Rational(1));
    for (int i = 0; i < k; ++i) acc = acc * base;
    return powers.emplace(key, std::move(acc)).first->second;
  };
  GradedPoly out(chart);
  for (const auto& [m, c] : f.terms()) {
    Monomial kept = Monomial::unit(*chart);
    GradedPoly prod = GradedPoly::constant(chart, c);
    for (int i = 0; i < chart->n_x(); ++i) {
      if (!m.x[i]) continue;
      if (assignments.count(xg(i)))
        prod = prod * power(xg(i), m.x[i]);
      else
        kept.x[i] = m.x[i];
    }
    for (int i = 0; i < chart->n_p(); ++i) {
      if (!m.p[i]) continue;
      if (assignments.count(pg(i)))
        prod = prod * power(pg(i), m.p[i]);
      else
        kept.p[i] = m.p[i];
    }
    if (prod.is_zero()) continue;
    prod = prod * GradedPoly::monomial(chart, kept, Rational(1));
    for (int i = 0; i < chart->n_e() && !prod.is_zero(); ++i)
      if (m.e >> i & 1) prod = prod * power(eg(i), 1);
    out += prod;
  }
  return out;
}

GradedPoly evaluate_x(const GradedPoly& f, const std::vector<Rational>& point) {
  const Chart& c = f.chart();
  if (static_cast<int>(point.size()) != c.n_x()) throw InputError("evaluate_x: point dimension mismatch");
  GradedPoly out(f.chart_ptr());
  for (const auto& [m, coef] : f.terms()) {
    Rational v = coef;
    for (int i = 0; i < c.n_x() && v != 0; ++i)
      for (int k = 0; k < m.x[i]; ++k) v *= point[i];
    Monomial r = m;
    std::fill(r.x.begin(), r.x.end(), 0);
    out.add_term(r, v);
  }
  return out;
}

GradedPoly coefficient(const GradedPoly& f, std::uint64_t odd_mask, const std::vector<std::uint16_t>& p_exponents) {
  GradedPoly out(f.chart_ptr());
  for (const auto& [m, c] : f.terms()) {
    if (m.e != odd_mask || m.p != p_exponents) continue;
    Monomial r = m;
    r.e = 0;
    std::fill(r.p.begin(), r.p.end(), 0);
    out.add_term(r, c);
  }
  return out;
}

std::vector<GradedPoly> linear_coefficients(const GradedPoly& f) {
  const Chart& c = f.chart();
  std::vector<GradedPoly> out(c.n_e(), GradedPoly(f.chart_ptr()));
  const std::vector<std::uint16_t> no_p(c.n_p(), 0);
  for (const auto& [m, coef] : f.terms()) {
    if (m.odd_count() != 1 || total(m.p) != 0) throw DomainError("expected a degree-1 element, got " + f.str());
    Monomial r = m;
    r.e = 0;
    out[std::countr_zero(m.e)].add_term(r, coef);
  }
  return out;
}

GradedPoly from_linear_coefficients(const ChartPtr& chart, const std::vector<GradedPoly>& c) {
  GradedPoly out(chart);
  for (int mu = 0; mu < static_cast<int>(c.size()); ++mu)
    if (!c[mu].is_zero()) out += c[mu] * GradedPoly::generator(chart, eg(mu));
  return out;
}

// --------------------------------------------------------------- parser

namespace {

class ExprParser {
 public:
  ExprParser(const std::string& s, const ChartPtr& chart) : s_(s), chart_(chart) {}

  GradedPoly parse() {
    GradedPoly v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("expression column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  GradedPoly expr() {
    GradedPoly acc(chart_);
    skip();
    bool neg = false;
    if (accept('-'))
      neg = true;
    else
      accept('+');
    GradedPoly t = term();
    acc += neg ? -t : t;
    for (;;) {
      if (accept('+'))
        acc += term();
      else if (accept('-'))
        acc -= term();
      else
        break;
    }
    return acc;
  }

  GradedPoly term() {
    GradedPoly acc = factor();
    while (accept('*')) acc = acc * factor();
    return acc;
  }

  GradedPoly factor() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      GradedPoly v = expr();
      if (!accept(')')) fail("expected ')'");
      return power(v);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string lit = s_.substr(start, pos_ - start);
      const std::size_t save = pos_;
      skip();
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        skip();
        const std::size_t ds = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (ds == pos_) fail("expected denominator");
        lit += "/" + s_.substr(ds, pos_ - ds);
      } else {
        pos_ = save;
      }
      Rational q;
      try {
        q = parse_rational(lit);
      } catch (const InputError& e) {
        fail(e.what());
      }
      return power(GradedPoly::constant(chart_, q));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      const auto g = chart_->lookup(name);
      if (!g) {
        pos_ = start;
        fail("unknown generator '" + name + "'");
      }
      return power(GradedPoly::generator(chart_, *g));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  GradedPoly power(GradedPoly base) {
    if (!accept('^')) return base;
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected exponent");
    const int k = std::stoi(s_.substr(start, std::min<std::size_t>(pos_ - start, 4)));
    GradedPoly acc = GradedPoly::constant(chart_, Rational(1));
    for (int i = 0; i < k; ++i) acc = acc * base;
    return acc;
  }

  const std::string& s_;
  ChartPtr chart_;
  std::size_t pos_ = 0;
};

}  // namespace

GradedPoly parse_poly(const std::string& text, const ChartPtr& chart) { return ExprParser(text, chart).parse(); }

}  // namespace grc
