#pragma once

#include "grc/scenario.hpp"

#include <doctest.h>

#include <random>

namespace grc::testing {

inline ChartPtr plain_chart(int nx, int ne, int np) { return std::make_shared<const Chart>(nx, ne, np); }

inline GradedPoly P(const ChartPtr& c, const std::string& text) { return parse_poly(text, c); }

inline Rational R(long a, long b = 1) { return Rational(a) / Rational(b); }

inline Matrix mat(int r, int c, std::initializer_list<long> entries) {
  Matrix m(r, c);
  auto it = entries.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = Rational(*it++);
  return m;
}

inline std::string corpus_path(const std::string& name) { return std::string(GRC_CORPUS_DIR) + "/" + name; }

}  // namespace grc::testing
