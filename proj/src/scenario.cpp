#include "grc/scenario.hpp"

#include "grc/exact_linalg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace grc {

namespace {

struct Directive {
  int line = 0;
  std::string key;
  std::string rest;
  int rest_col = 1;  // 1-based column of the first character of rest
};

std::string at(const std::string& path, int line, int col) {
  return path + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": ";
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, std::string path) : path_(std::move(path)) {
    file_.path = path_;
    file_.digest = fnv1a(text);
    std::istringstream in(text);
    int n = 0;
    for (std::string raw; std::getline(in, raw);) {
      ++n;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      const auto hash = raw.find('#');
      const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      auto e = line.find_first_of(" \t", b);
      Directive d;
      d.line = n;
      d.key = line.substr(b, e == std::string::npos ? std::string::npos : e - b);
      if (e != std::string::npos) {
        const auto r = line.find_first_not_of(" \t", e);
        if (r != std::string::npos) {
          d.rest = line.substr(r);
          d.rest_col = static_cast<int>(r) + 1;
          while (!d.rest.empty() && (d.rest.back() == ' ' || d.rest.back() == '\t')) d.rest.pop_back();
        }
      }
      dirs_.push_back(d);
    }
  }

  ScenarioFile run() {
    if (dirs_.empty() || dirs_.front().key != "format" || words(dirs_.front().rest) != std::vector<std::string>{"grc-scenario", "1"})
      throw InputError(at(path_, dirs_.empty() ? 1 : dirs_.front().line, 1) + "expected header 'format grc-scenario 1'");
    for (std::size_t i = 1; i < dirs_.size(); ++i) directive(dirs_[i]);
    finish();
    return std::move(file_);
  }

 private:
  [[noreturn]] void syntax(const Directive& d, const std::string& msg, int col = 0) const {
    throw InputError(at(path_, d.line, col ? col : d.rest_col) + msg);
  }
  [[noreturn]] void semantic(const std::string& block, const std::string& msg) const {
    throw InputError(path_ + ": in " + block + ": " + msg);
  }

  long integer(const Directive& d, const std::string& w, long lo, long hi) const {
    try {
      std::size_t used = 0;
      const long v = std::stol(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      if (v < lo || v > hi) syntax(d, "value " + w + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return v;
    } catch (const std::logic_error&) {
      syntax(d, "expected an integer, got '" + w + "'");
    }
  }

  Rational rational(const Directive& d, const std::string& w, int col) const {
    try {
      return parse_rational(w);
    } catch (const InputError& e) {
      syntax(d, e.what(), col);
    }
  }

  Matrix matrix(const Directive& d, const std::string& text, int col0) const {
    std::vector<std::vector<Rational>> rows;
    std::size_t start = 0;
    for (;;) {
      const auto semi = text.find(';', start);
      const std::string row = text.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
      rows.emplace_back();
      std::size_t p = 0;
      while (p < row.size()) {
        const auto b = row.find_first_not_of(" \t", p);
        if (b == std::string::npos) break;
        const auto e = row.find_first_of(" \t", b);
        const std::string w = row.substr(b, e == std::string::npos ? std::string::npos : e - b);
        rows.back().push_back(rational(d, w, col0 + static_cast<int>(start + b)));
        p = e == std::string::npos ? row.size() : e;
      }
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    if (rows.size() == 1 && rows.front().empty()) return Matrix(0, 0);
    const std::size_t cols = rows.front().size();
    for (const auto& r : rows)
      if (r.size() != cols || cols == 0) syntax(d, "matrix rows must be non-empty and of equal length");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
  }

  std::vector<int> indices(const Directive& d, const std::string& text, int bound, const std::string& block) const {
    std::vector<int> out;
    for (const auto& w : words(text)) {
      const long v = integer(d, w, 1, 1 << 20);
      if (v > bound) semantic(block, "index " + w + " exceeds " + std::to_string(bound));
      out.push_back(static_cast<int>(v - 1));
    }
    std::vector<int> sorted = out;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) semantic(block, "repeated index");
    return out;
  }

  GradedPoly expr(const Directive& d, const std::string& text, int col0, const std::string& block, int degree) const {
    if (!chart_) syntax(d, "chart must be declared before expressions", 1);
    GradedPoly f(chart_);
    try {
      f = parse_poly(text, chart_);
    } catch (const InputError& e) {
      const std::string msg = e.what();
      const std::string tag = "expression column ";
      if (msg.rfind(tag, 0) == 0) {
        const auto colon = msg.find(':');
        const int c = std::stoi(msg.substr(tag.size(), colon - tag.size()));
        throw InputError(at(path_, d.line, col0 + c - 1) + "in " + block + ": " + msg.substr(colon + 2));
      }
      throw InputError(at(path_, d.line, col0) + "in " + block + ": " + msg);
    }
    const auto deg = f.degree();
    if (degree >= 0 && !f.is_zero() && (!deg || *deg != degree))
      semantic(block, "expected degree " + std::to_string(degree) + ", got " + f.str());
    return f;
  }

  std::vector<GradedPoly> exprs(const Directive& d, const std::string& block, int degree) const {
    std::vector<GradedPoly> out;
    if (d.rest.empty()) return out;
    std::size_t start = 0;
    int k = 0;
    for (;;) {
      const auto semi = d.rest.find(';', start);
      const std::string piece = d.rest.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
      out.push_back(expr(d, piece, d.rest_col + static_cast<int>(start), block + "[" + std::to_string(++k) + "]", degree));
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    return out;
  }

  // Splits off the first n words; returns their values and the column of the remainder.
  std::pair<std::vector<std::string>, std::pair<std::string, int>> head(const Directive& d, int n) const {
    std::vector<std::string> ws;
    std::size_t p = 0;
    for (int i = 0; i < n; ++i) {
      const auto b = d.rest.find_first_not_of(" \t", p);
      if (b == std::string::npos) syntax(d, d.key + " expects " + std::to_string(n) + " leading fields");
      const auto e = d.rest.find_first_of(" \t", b);
      ws.push_back(d.rest.substr(b, e == std::string::npos ? std::string::npos : e - b));
      p = e == std::string::npos ? d.rest.size() : e;
    }
    const auto r = d.rest.find_first_not_of(" \t", p);
    if (r == std::string::npos) return {ws, {std::string(), d.rest_col + static_cast<int>(d.rest.size())}};
    return {ws, {d.rest.substr(r), d.rest_col + static_cast<int>(r)}};
  }

  HamBlock& ham(const Directive& d) {
    if (!file_.ham) syntax(d, "ham.g must come first in the hamiltonian block", 1);
    return *file_.ham;
  }

  void directive(const Directive& d) {
    const std::string& k = d.key;
    const auto w = words(d.rest);
    if (k == "label") {
      if (d.rest.empty()) syntax(d, "label needs a value");
      file_.label = d.rest;
    } else if (k == "seed") {
      if (w.size() != 1) syntax(d, "seed needs one value");
      file_.seed = static_cast<std::uint64_t>(integer(d, w[0], 0, 1L << 40));
    } else if (k == "chart") {
      if (chart_) syntax(d, "chart declared twice", 1);
      if (w.size() == 2 && w[0] == "standard") {
        kind_ = "standard";
        n_ = static_cast<int>(integer(d, w[1], 0, 16));
        bracket_ = standard_bracket(n_);
      } else if (w.size() == 3 && w[0] == "algebroid") {
        kind_ = "algebroid";
        n_ = static_cast<int>(integer(d, w[1], 0, 16));
        r_ = static_cast<int>(integer(d, w[2], 0, 16));
        bracket_ = std::make_shared<const BracketData>(algebroid_chart(n_, r_), hyperbolic_metric(r_));
        file_.algebroid = AlgebroidBlock{n_, r_, {}, {}};
        file_.algebroid->anchor.assign(r_, std::vector<GradedPoly>(n_, GradedPoly(bracket_->chart_ptr())));
        file_.algebroid->structure.assign(static_cast<std::size_t>(r_) * r_ * r_, GradedPoly(bracket_->chart_ptr()));
      } else if (w.size() == 3 && w[0] == "generic") {
        kind_ = "generic";
        n_ = static_cast<int>(integer(d, w[1], 0, 16));
        r_ = static_cast<int>(integer(d, w[2], 0, Chart::kMaxOdd));
        generic_chart_ = std::make_shared<const Chart>(n_, r_, n_);
      } else {
        syntax(d, "expected 'standard <n>', 'algebroid <m0> <r>' or 'generic <nx> <ne>'");
      }
      chart_ = bracket_ ? bracket_->chart_ptr() : generic_chart_;
    } else if (k == "metric") {
      if (kind_ != "generic") syntax(d, "metric is only declared for generic charts", 1);
      const Matrix m = matrix(d, d.rest, d.rest_col);
      if (m.rows() != r_ || m.cols() != r_) semantic("metric", "expected a " + std::to_string(r_) + "x" + std::to_string(r_) + " matrix");
      if (!equal(m, Matrix(m.transpose()))) semantic("metric", "not symmetric");
      bracket_ = std::make_shared<const BracketData>(generic_chart_, m);
    } else if (k == "theta") {
      if (!chart_) syntax(d, "chart must be declared before theta", 1);
      if (theta_kind_.size()) syntax(d, "theta declared twice", 1);
      if (w.empty()) syntax(d, "theta needs a kind");
      theta_kind_ = w[0];
      if (theta_kind_ == "expr") {
        theta_expr_ = expr(d, d.rest.substr(4), d.rest_col + 4, "theta", 3);
      } else if ((theta_kind_ == "standard" || theta_kind_ == "twisted") && w.size() == 1) {
        if (kind_ != "standard") semantic("theta", theta_kind_ + " theta needs a standard chart");
      } else if (theta_kind_ == "algebroid" && w.size() == 1) {
        if (kind_ != "algebroid") semantic("theta", "algebroid theta needs an algebroid chart");
      } else {
        syntax(d, "expected 'standard', 'twisted', 'algebroid' or 'expr <expression>'");
      }
    } else if (k == "chi") {
      if (kind_ != "standard") syntax(d, "chi needs a standard chart", 1);
      auto [ws, rest] = head(d, 3);
      std::array<int, 3> ijk{};
      for (int i = 0; i < 3; ++i) ijk[i] = static_cast<int>(integer(d, ws[i], 1, n_)) - 1;
      if (!(ijk[0] < ijk[1] && ijk[1] < ijk[2])) syntax(d, "chi indices must be increasing");
      chi_.push_back({ijk, expr(d, rest.first, rest.second, "chi", 0)});
    } else if (k == "anchor") {
      if (kind_ != "algebroid") syntax(d, "anchor needs an algebroid chart", 1);
      auto [ws, rest] = head(d, 2);
      const int a = static_cast<int>(integer(d, ws[0], 1, r_)) - 1, i = static_cast<int>(integer(d, ws[1], 1, n_)) - 1;
      file_.algebroid->anchor[a][i] = expr(d, rest.first, rest.second, "anchor", 0);
    } else if (k == "structure") {
      if (kind_ != "algebroid") syntax(d, "structure needs an algebroid chart", 1);
      auto [ws, rest] = head(d, 3);
      const int c = static_cast<int>(integer(d, ws[0], 1, r_)) - 1;
      const int a = static_cast<int>(integer(d, ws[1], 1, r_)) - 1, b = static_cast<int>(integer(d, ws[2], 1, r_)) - 1;
      if (a >= b) syntax(d, "structure lists c^c_ab with a < b");
      const GradedPoly f = expr(d, rest.first, rest.second, "structure", 0);
      file_.algebroid->structure[(c * r_ + a) * r_ + b] = f;
      file_.algebroid->structure[(c * r_ + b) * r_ + a] = -f;
    } else if (k == "bfield") {
      bfield_ = expr(d, d.rest, d.rest_col, "bfield", 2);
    } else if (k == "coiso.N" || k == "coiso.F") {
      if (!chart_) syntax(d, "chart must be declared first", 1);
      auto& c = coiso();
      (k == "coiso.N" ? c.A : c.C) = indices(d, d.rest, chart_->n_x(), k);
    } else if (k == "coiso.K") {
      coiso().K = exprs(d, k, 1);
    } else if (k == "coiso.flat") {
      coiso().flat = exprs(d, k, 1);
    } else if (k == "coiso.P") {
      coiso();
      file_.coiso_P = exprs(d, k, 2);
    } else if (k == "dirac.L") {
      file_.dirac_L = exprs(d, k, 1);
    } else if (k == "gcs.J") {
      file_.J = expr(d, d.rest, d.rest_col, k, 2);
    } else if (k == "gcs.symplectic" || k == "gcs.complex") {
      if (kind_ != "standard") syntax(d, k + " needs a standard chart", 1);
      const Matrix m = matrix(d, d.rest, d.rest_col);
      if (m.rows() != n_ || m.cols() != n_) semantic(k, "expected an " + std::to_string(n_) + "x" + std::to_string(n_) + " matrix");
      try {
        file_.J = quadratic_from_endomorphism(*bracket_, k == "gcs.symplectic" ? gc_symplectic(m) : gc_complex(m));
      } catch (const DomainError& e) {
        semantic(k, e.what());
      }
    } else if (k == "ham.g") {
      if (file_.ham) syntax(d, "ham.g declared twice", 1);
      file_.ham = HamBlock{};
      auto& g = file_.ham->g;
      if (w.size() == 1 && w[0] == "so3") g = LieAlgebra::so3();
      else if (w.size() == 1 && w[0] == "heisenberg") g = LieAlgebra::heisenberg();
      else if (w.size() == 1 && w[0] == "aff1") g = LieAlgebra::aff1();
      else if (w.size() == 2 && w[0] == "abelian") g = LieAlgebra::abelian(static_cast<int>(integer(d, w[1], 0, 16)));
      else if (w.size() == 1) g = LieAlgebra(static_cast<int>(integer(d, w[0], 0, 16)));
      else syntax(d, "expected so3, heisenberg, aff1, 'abelian <n>' or a dimension");
    } else if (k == "ham.bracket") {
      auto& g = ham(d).g;
      if (w.size() != 4) syntax(d, "expected 'k i j value'");
      const int kk = static_cast<int>(integer(d, w[0], 1, g.dim)) - 1, i = static_cast<int>(integer(d, w[1], 1, g.dim)) - 1,
                j = static_cast<int>(integer(d, w[2], 1, g.dim)) - 1;
      const Rational v = rational(d, w[3], d.rest_col);
      g(kk, i, j) = v;
      if (i != j) g(kk, j, i) = -v;
    } else if (k == "ham.h") {
      if (w.size() != 1) syntax(d, "expected a dimension");
      ham(d).dgla.dim_h = static_cast<int>(integer(d, w[0], 0, 16));
    } else if (k == "ham.a") {
      if (w.size() != 1) syntax(d, "expected a dimension");
      ham(d).dgla.dim_a = static_cast<int>(integer(d, w[0], 0, 32));
      ham(d).explicit_action = true;
    } else if (k == "ham.module" || k == "ham.tau" || k == "ham.lambda") {
      auto& hb = ham(d);
      auto [ws, rest] = head(d, 1);
      const int i = static_cast<int>(integer(d, ws[0], 1, hb.g.dim)) - 1;
      (k == "ham.module" ? module_ : k == "ham.tau" ? tau_ : lambda_)[i] = matrix(d, rest.first, rest.second);
    } else if (k == "ham.varpi") {
      auto [ws, rest] = head(d, 2);
      const int i = static_cast<int>(integer(d, ws[0], 1, 64)) - 1, j = static_cast<int>(integer(d, ws[1], 1, 64)) - 1;
      const Matrix m = matrix(d, rest.first, rest.second);
      if (m.rows() != 1) syntax(d, "varpi value is a single row");
      varpi_[{i, j}] = m.row(0).transpose();
    } else if (k == "ham.delta_ha" || k == "ham.delta_ag") {
      ham(d);
      (k == "ham.delta_ha" ? delta_ha_ : delta_ag_) = matrix(d, d.rest, d.rest_col);
    } else if (k == "ham.psi") {
      ham(d).psi = exprs(d, k, 1);
    } else if (k == "ham.phi") {
      ham(d).phi = exprs(d, k, 2);
      ham(d).explicit_action = true;
    } else if (k == "ham.rho") {
      ham(d).rho = exprs(d, k, 1);
      ham(d).explicit_action = true;
    } else if (k == "ham.mu") {
      ham(d).mu = exprs(d, k, 0);
    } else if (k == "task") {
      if (w.empty() || w.size() > 2) syntax(d, "expected 'task <name> [expect=fail]'");
      const auto& names = task_names();
      if (std::find(names.begin(), names.end(), w[0]) == names.end()) syntax(d, "unknown task '" + w[0] + "'");
      if (w.size() == 2 && w[1] != "expect=fail") syntax(d, "unknown task option '" + w[1] + "'");
      file_.tasks.push_back({w[0], w.size() == 2, d.line});
    } else if (k == "format") {
      syntax(d, "format header repeated", 1);
    } else {
      syntax(d, "unknown directive '" + k + "'", 1);
    }
  }

  GeometricCoisoData& coiso() {
    if (!file_.coiso) file_.coiso = GeometricCoisoData{};
    return *file_.coiso;
  }

  void finish() {
    if (!chart_) throw InputError(path_ + ": no chart declared");
    if (!bracket_) semantic("metric", "generic charts need a metric");
    if (file_.label.empty()) file_.label = "unnamed";
    GradedPoly theta(chart_);
    std::optional<CourantScenario> s;
    if (theta_kind_.empty()) semantic("theta", "missing theta declaration");
    if (theta_kind_ == "standard") {
      s = standard_theta(n_);
    } else if (theta_kind_ == "twisted") {
      s = twisted_theta(n_, three_form(chart_, n_, chi_));
    } else if (theta_kind_ == "algebroid") {
      s = theta_from_lie_algebroid(n_, r_, file_.algebroid->anchor, file_.algebroid->structure);
    } else {
      s = CourantScenario(bracket_, *theta_expr_);
    }
    if (!chi_.empty() && theta_kind_ != "twisted") semantic("chi", "chi needs 'theta twisted'");
    if (bfield_) {
      if (kind_ != "standard") semantic("bfield", "B-fields need a standard chart");
      s = bfield_on_theta(*s, *bfield_);
    }
    file_.scenario = CourantScenario(s->bracket_ptr(), s->theta(), file_.label);

    if (file_.ham) {
      auto& hb = *file_.ham;
      const int ng = hb.g.dim;
      if (!hb.explicit_action) {
        const int dh = hb.dgla.dim_h;
        if (!tau_.empty() || !lambda_.empty() || !varpi_.empty() || delta_ha_ || delta_ag_)
          semantic("ham", "dgla matrices need an explicit action (ham.a, ham.phi, ham.rho)");
        for (int i = 0; i < ng; ++i) {
          auto it = module_.find(i);
          const Matrix m = it == module_.end() ? Matrix(Matrix::Zero(dh, dh)) : it->second;
          if (m.rows() != dh || m.cols() != dh) semantic("ham.module", "expected " + std::to_string(dh) + "x" + std::to_string(dh) + " matrices");
          hb.module.push_back(m);
        }
        if (static_cast<int>(hb.psi.size()) != ng) semantic("ham.psi", "expected " + std::to_string(ng) + " sections");
        if (static_cast<int>(hb.mu.size()) != dh) semantic("ham.mu", "expected " + std::to_string(dh) + " functions");
      } else {
        if (!module_.empty() || !hb.psi.empty()) semantic("ham", "reduction data and an explicit action are exclusive");
        auto& D = hb.dgla;
        D.g = hb.g;
        const int na = D.dim_a, nh = D.dim_h;
        auto fetch = [&](std::map<int, Matrix>& src, int i, int n, const char* what) {
          auto it = src.find(i);
          const Matrix m = it == src.end() ? Matrix(Matrix::Zero(n, n)) : it->second;
          if (m.rows() != n || m.cols() != n) semantic(what, "expected " + std::to_string(n) + "x" + std::to_string(n) + " matrices");
          return m;
        };
        for (int i = 0; i < ng; ++i) {
          D.tau.push_back(fetch(tau_, i, na, "ham.tau"));
          D.lambda.push_back(fetch(lambda_, i, nh, "ham.lambda"));
        }
        for (int i = 0; i < na; ++i)
          for (int j = 0; j < na; ++j) {
            auto it = varpi_.find({i, j});
            Vector v = it == varpi_.end() ? Vector(Vector::Zero(nh)) : it->second;
            if (v.size() != nh) semantic("ham.varpi", "values live in h");
            D.varpi.push_back(v);
          }
        for (const auto& [ij, v] : varpi_)
          if (ij.first >= na || ij.second >= na) semantic("ham.varpi", "index exceeds dim a");
        D.delta_ha = delta_ha_ ? *delta_ha_ : Matrix(Matrix::Zero(na, nh));
        D.delta_ag = delta_ag_ ? *delta_ag_ : Matrix(Matrix::Zero(ng, na));
        if (D.delta_ha.rows() != na || D.delta_ha.cols() != nh) semantic("ham.delta_ha", "expected a dim a x dim h matrix");
        if (D.delta_ag.rows() != ng || D.delta_ag.cols() != na) semantic("ham.delta_ag", "expected a dim g x dim a matrix");
        if (static_cast<int>(hb.phi.size()) != ng) semantic("ham.phi", "expected " + std::to_string(ng) + " entries");
        if (static_cast<int>(hb.rho.size()) != na) semantic("ham.rho", "expected " + std::to_string(na) + " entries");
        if (static_cast<int>(hb.mu.size()) != nh) semantic("ham.mu", "expected " + std::to_string(nh) + " entries");
      }
    }

    for (const auto& t : file_.tasks) {
      auto need = [&](bool ok, const std::string& what) {
        if (!ok) semantic("task " + t.name + " (line " + std::to_string(t.line) + ")", "needs " + what);
      };
      const std::string& n = t.name;
      if (n == "lie-algebroid-jacobi") need(theta_kind_ == "algebroid", "an algebroid theta");
      if (n == "coiso") need(file_.coiso.has_value(), "a coiso block");
      if (n == "reduce" || n == "reduce-gcs" || n == "clean" || n == "reduce-dirac")
        need(file_.coiso && !file_.coiso_P, "a coiso block given by frame data");
      if (n == "gcs" || n == "reduce-gcs") need(file_.J.has_value(), "a gcs block");
      if (n == "clean" || n == "reduce-dirac") need(file_.dirac_L.has_value(), "a dirac block");
      if (n == "ham-validate" || n == "ham-reduce" || n == "dgla") need(file_.ham.has_value(), "a hamiltonian block");
      if (n == "extended") need(file_.ham && !file_.ham->explicit_action, "a hamiltonian block given by reduction data");
    }
  }

  std::string path_;
  std::vector<Directive> dirs_;
  ScenarioFile file_;
  std::string kind_, theta_kind_;
  int n_ = 0, r_ = 0;
  ChartPtr chart_;
  std::shared_ptr<const Chart> generic_chart_;
  BracketPtr bracket_;
  std::optional<GradedPoly> theta_expr_, bfield_;
  std::vector<std::pair<std::array<int, 3>, GradedPoly>> chi_;
  std::map<int, Matrix> module_, tau_, lambda_;
  std::map<std::pair<int, int>, Vector> varpi_;
  std::optional<Matrix> delta_ha_, delta_ag_;
};

std::string yes(bool b) { return b ? "pass" : "fail"; }

std::string join(const std::vector<GradedPoly>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "; " : "") + v[i].str();
  return s.empty() ? "-" : s;
}

std::string join_idx(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i] + 1);
  return s.empty() ? "-" : s;
}

std::string matrix_str(const Matrix& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) s += "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? " " : "") + m(i, j).str();
  }
  return s.empty() ? "-" : s;
}

void dump_scenario(const CourantScenario& s, std::vector<std::string>& out, const std::string& prefix) {
  const Chart& c = s.chart();
  auto names = [&](GenKind k) {
    std::string r;
    for (int i = 0; i < c.count(k); ++i) r += (i ? " " : "") + c.name({k, i});
    return r.empty() ? "-" : r;
  };
  out.push_back(prefix + "chart x: " + names(GenKind::X) + " | e: " + names(GenKind::E) + " | p: " + names(GenKind::P));
  out.push_back(prefix + "metric " + matrix_str(s.bracket().metric()));
  out.push_back(prefix + "theta " + s.theta().str());
}

void add_checks(const CheckReport& r, const std::string& prefix, std::vector<std::string>& out) {
  for (const auto& c : r.checks) out.push_back(prefix + c.name + " " + yes(c.pass) + (c.pass ? "" : ": " + c.witness));
}

bool same(const DGLA2Data& a, const DGLA2Data& b) {
  if (a.dim_a != b.dim_a || a.dim_h != b.dim_h || a.g.c != b.g.c) return false;
  for (std::size_t i = 0; i < a.tau.size(); ++i)
    if (!equal(a.tau[i], b.tau[i]) || !equal(a.lambda[i], b.lambda[i])) return false;
  for (std::size_t i = 0; i < a.varpi.size(); ++i)
    if (!equal(a.varpi[i], b.varpi[i])) return false;
  return equal(a.delta_ha, b.delta_ha) && equal(a.delta_ag, b.delta_ag);
}

struct Runner {
  const ScenarioFile& f;
  const RunOptions& o;
  std::uint64_t seed;
  const CourantScenario& s;

  bool run(const std::string& name, std::vector<std::string>& out) {
    if (name == "master" || name == "validate-theta") {
      const GradedPoly r = master_residual(s);
      out.push_back("residual " + (r.is_zero() ? std::string("0") : r.str()));
      return r.is_zero();
    }
    if (name == "axioms") {
      std::mt19937_64 rng(seed);
      std::vector<GradedPoly> sections, functions;
      const int count = std::max(3, o.samples);
      for (int i = 0; i < count; ++i) sections.push_back(random_homogeneous(s.chart_ptr(), rng, 1, o.max_degree));
      for (int i = 0; i < count; ++i) functions.push_back(random_homogeneous(s.chart_ptr(), rng, 0, o.max_degree));
      const AxiomReport r = verify_axioms(s, sections, functions);
      out.push_back("random sections " + std::to_string(count));
      for (const auto& a : r.axioms) out.push_back(a.name + " " + yes(a.pass) + (a.pass ? "" : ": " + a.witness));
      return r.all();
    }
    if (name == "lie-algebroid-jacobi") {
      const auto& a = *f.algebroid;
      std::string w;
      const bool jac = algebroid_jacobi(a.m0, a.rank, a.anchor, a.structure, &w);
      const bool me = master_equation(s);
      out.push_back("master " + yes(me));
      out.push_back("jacobi " + yes(jac) + (jac ? "" : ": " + w));
      if (jac != me) throw InternalError("master equation and Jacobi verdicts differ");
      return me;
    }
    if (name == "coiso") {
      const auto& d = *f.coiso;
      const CoisotropicIdeal I = f.coiso_P ? CoisotropicIdeal(s.bracket_ptr(), d.A, d.K, *f.coiso_P) : ideal_from_data(s.bracket_ptr(), d);
      out.push_back("ideal A " + join_idx(I.A()) + " | B " + join_idx(I.pivots()) + " | C " + join_idx(I.C()));
      out.push_back("generators " + join(I.generators()));
      std::string w;
      const bool ok = is_coisotropic(I, &w);
      out.push_back("coisotropic " + yes(ok) + (ok ? "" : ": " + w));
      if (ok) {
        const bool r = reducible_symbolic(s, I, &w);
        out.push_back("theta reducible " + yes(r) + (r ? "" : ": " + w));
      }
      return ok;
    }
    if (name == "reduce") {
      const auto& d = *f.coiso;
      const CoisotropicIdeal I = ideal_from_data(s.bracket_ptr(), d);
      std::string w;
      const bool sym = reducible_symbolic(s, I, &w);
      const ReducibilityReport g = reducible_geometric(s, d, seed, o.samples);
      out.push_back("symbolic " + yes(sym) + (sym ? "" : ": " + w));
      for (int i = 0; i < 4; ++i)
        out.push_back("R" + std::to_string(i + 1) + " " + yes(g.r[i]) + (g.r[i] ? "" : ": " + g.witness[i]));
      if (sym != g.all()) throw InternalError("symbolic and geometric reducibility differ");
      if (!sym) return false;
      const Reduction red = reduce(s, d);
      dump_scenario(red.scenario(), out, "reduced ");
      const bool me = master_equation(red.scenario());
      if (!me) throw InternalError("reduced theta fails the master equation");
      out.push_back("reduced master pass");
      return true;
    }
    if (name == "gcs") {
      const GcsReport r = gcs_report(s, *f.J, odd_frame(s.chart_ptr()));
      out.push_back("J " + f.J->str());
      out.push_back("square " + yes(r.square));
      out.push_back("nijenhuis " + yes(r.nijenhuis));
      out.push_back(r.cross_checked ? "cross " + yes(r.cross) : "cross not applicable");
      if (!r.ok()) out.push_back("witness " + r.witness);
      return r.ok();
    }
    if (name == "reduce-gcs") {
      const Reduction red = reduce(s, *f.coiso);
      const QuadraticReduction q = reduce_quadratic(s, *f.J, *f.coiso, red);
      dump_scenario(red.scenario(), out, "reduced ");
      quadratic(q, out);
      return q.normalizer && q.preserves_K && q.preserves_flat && q.reduced_check.ok();
    }
    if (name == "clean") {
      const auto& d = *f.coiso;
      const CoisotropicIdeal I = ideal_from_data(s.bracket_ptr(), d);
      const CleanReport c = clean_intersection(*f.dirac_L, d, I, sample_points(s.chart(), d.A, seed, o.samples));
      std::string ranks;
      for (int r : c.ranks) ranks += (ranks.empty() ? "" : " ") + std::to_string(r);
      out.push_back("ranks " + ranks);
      out.push_back("constant rank " + yes(c.constant_rank));
      out.push_back("invariant " + yes(c.invariant));
      if (!c.ok()) out.push_back("witness " + c.witness);
      return c.ok();
    }
    if (name == "reduce-dirac") {
      const Reduction red = reduce(s, *f.coiso);
      const DiracReduction r = reduce_dirac(*f.dirac_L, s, *f.coiso, red, sample_points(s.chart(), f.coiso->A, seed, o.samples));
      dump_scenario(red.scenario(), out, "reduced ");
      dirac(r, out);
      return r.lagrangian && r.involutive;
    }
    if (name == "ham-validate") {
      const HamAction A = ham_action(f);
      const CheckReport c = validate_comoment(A), ch = validate_chain(A);
      const RegularityReport reg = regular_zero(A, seed, o.samples);
      add_checks(c, "comoment ", out);
      add_checks(ch, "chain ", out);
      out.push_back("zero level " + join_idx(reg.A));
      out.push_back("regular moment " + yes(reg.moment));
      out.push_back("regular rho injective " + yes(reg.rho_injective));
      out.push_back("regular locally free " + yes(reg.locally_free));
      out.push_back(std::string("regular certified ") + (reg.certified ? "yes" : "no"));
      if (!reg.ok()) out.push_back("witness " + reg.witness);
      return c.ok() && ch.ok() && reg.ok();
    }
    if (name == "ham-reduce") {
      const HamAction A = ham_action(f);
      HamReduceOptions opt;
      opt.J = f.J;
      opt.L = f.dirac_L;
      opt.seed = seed;
      opt.random_points = o.samples;
      const HamReduction h = ham_reduce(A, opt);
      out.push_back("N x = 0 for " + join_idx(h.data.A));
      out.push_back("K " + join(h.data.K));
      out.push_back("F " + join_idx(h.data.C));
      dump_scenario(h.reduction.scenario(), out, "reduced ");
      const bool me = master_equation(h.reduction.scenario());
      if (!me) throw InternalError("reduced theta fails the master equation");
      out.push_back("reduced master pass");
      out.push_back("exactness rank " + yes(h.exactness.rank_condition));
      out.push_back("exactness intersection " + yes(h.exactness.intersection_condition));
      out.push_back(std::string("reduced algebroid ") + (h.exactness.both() ? "exact" : "not exact"));
      bool ok = true;
      if (h.J) {
        quadratic(*h.J, out);
        ok = ok && h.J->normalizer && h.J->reduced_check.ok();
      }
      if (h.L) {
        dirac(*h.L, out);
        ok = ok && h.L->lagrangian && h.L->involutive;
      }
      return ok;
    }
    if (name == "dgla") {
      const HamBlock& hb = *f.ham;
      const DGLA2Data d = hb.explicit_action ? hb.dgla : ham_action(f).dgla;
      const CheckReport r = validate_dgla(d);
      add_checks(r, "", out);
      const bool ex = d.exact();
      out.push_back("exact " + yes(ex));
      if (!r.ok() || !ex) return false;
      const CourantAlgebraData c = dgla_to_courant_algebra(d);
      const CheckReport cr = validate_courant_algebra(c, true);
      add_checks(cr, "courant algebra ", out);
      const bool back = same(courant_algebra_to_dgla(c, d.delta_ha), d);
      if (!cr.ok() || !back) throw InternalError("dgla round trip is not the identity");
      out.push_back("round trip pass");
      return true;
    }
    if (name == "extended") {
      const HamBlock& hb = *f.ham;
      const CourantAlgebraData c = hemisemidirect(hb.g, hb.module);
      std::vector<GradedPoly> Psi = hb.psi;
      for (const auto& m : hb.mu) Psi.push_back(poisson(s.bracket(), s.theta(), m));
      const ExtendedActionReport r = extended_action_check(s, c, Psi, hb.mu, seed);
      add_checks(r.checks, "", out);
      out.push_back(std::string("agree ") + (r.agree() ? "yes" : "no"));
      return r.checks.ok();
    }
    throw InputError("unknown task '" + name + "'");
  }

  static void quadratic(const QuadraticReduction& q, std::vector<std::string>& out) {
    out.push_back("J normalizer " + yes(q.normalizer));
    out.push_back("J preserves K " + yes(q.preserves_K));
    out.push_back("J preserves flat frame " + yes(q.preserves_flat));
    out.push_back("J_red " + q.J_red.str());
    out.push_back("J_red square " + yes(q.reduced_check.square));
    out.push_back("J_red nijenhuis " + yes(q.reduced_check.nijenhuis));
    if (q.reduced_check.cross_checked) out.push_back("J_red cross " + yes(q.reduced_check.cross));
  }

  static void dirac(const DiracReduction& r, std::vector<std::string>& out) {
    out.push_back("L_red " + join(r.frame));
    out.push_back("L_red lagrangian " + yes(r.lagrangian));
    out.push_back("L_red involutive " + yes(r.involutive));
  }
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"master",     "validate-theta", "axioms",       "lie-algebroid-jacobi",
                                              "coiso",      "reduce",         "gcs",          "reduce-gcs",
                                              "clean",      "reduce-dirac",   "ham-validate", "ham-reduce",
                                              "dgla",       "extended"};
  return names;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ScenarioFile parse_scenario_text(const std::string& text, const std::string& path) { return Parser(text, path).run(); }

ScenarioFile parse_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), path);
}

HamAction ham_action(const ScenarioFile& file) {
  if (!file.ham || !file.scenario) throw InputError("scenario has no hamiltonian block");
  const HamBlock& hb = *file.ham;
  if (hb.explicit_action) {
    HamAction A{*file.scenario, hb.dgla, hb.phi, hb.rho, hb.mu};
    check_shapes(A);
    return A;
  }
  return from_reduction_data(*file.scenario, hb.g, hb.psi, hb.module, hb.mu);
}

int TaskResult::code() const {
  if (error_kind == "input") return 2;
  if (error_kind == "internal") return 3;
  const bool passed = verdict && error_kind.empty();
  return passed != expect_fail ? 0 : 1;
}

int ScenarioReport::exit_code() const {
  int c = 0;
  for (const auto& t : tasks) c = std::max(c, t.code());
  return c;
}

std::string ScenarioReport::text() const {
  std::ostringstream o;
  o << "report grc-report 1\n";
  o << "engine " << kEngineVersion << "\n";
  o << "scenario " << label << "\n";
  o << "input-digest fnv1a64:" << hex64(digest) << "\n";
  o << "seed " << seed << "\n";
  o << "samples " << options.samples << "\n";
  o << "max-degree " << options.max_degree << "\n";
  int ok = 0;
  for (const auto& t : tasks) {
    o << "task " << t.name << (t.expect_fail ? " expect=fail" : "") << "\n";
    for (const auto& l : t.lines) o << "  " << l << "\n";
    o << "  verdict " << (t.verdict ? "pass" : "fail") << "\n";
    o << "  status " << (t.code() == 0 ? "ok" : "unexpected") << "\n";
    ok += t.code() == 0;
  }
  o << "summary tasks " << tasks.size() << " ok " << ok << "\n";
  o << "exit " << exit_code() << "\n";
  return o.str();
}

ScenarioReport run_scenario(const ScenarioFile& file, const RunOptions& options, const std::vector<std::string>& only) {
  ScenarioReport rep;
  rep.label = file.label;
  rep.path = file.path;
  rep.digest = file.digest;
  rep.seed = options.seed ? *options.seed : file.seed;
  rep.options = options;
  if (!file.scenario) throw InputError("scenario file was not parsed");
  Runner run{file, options, rep.seed, *file.scenario};
  for (const auto& t : file.tasks) {
    if (!only.empty() && std::find(only.begin(), only.end(), t.name) == only.end()) continue;
    TaskResult r;
    r.name = t.name;
    r.expect_fail = t.expect_fail;
    try {
      r.verdict = run.run(t.name, r.lines);
    } catch (const DomainError& e) {
      r.error_kind = "domain";
      r.lines.push_back(std::string("domain error: ") + e.what());
    } catch (const InputError& e) {
      r.error_kind = "input";
      r.lines.push_back(std::string("input error: ") + e.what());
    } catch (const InternalError& e) {
      r.error_kind = "internal";
      r.lines.push_back(std::string("internal error: ") + e.what());
    }
    if (!r.error_kind.empty()) r.verdict = false;
    rep.tasks.push_back(std::move(r));
  }
  return rep;
}

}  // namespace grc
