#include "hcrom/param.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "hcrom/errors.hpp"

namespace hcrom {

ParamVector::ParamVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ConfigError("ParamVector: empty entry list");
  for (double v : entries_) {
    if (std::isnan(v) || v <= 0.0) {
      throw ConfigError("ParamVector: entries must be positive or inf");
    }
  }
}

std::vector<int> ParamVector::infinite_set() const {
  std::vector<int> s;
  for (int j = 0; j < dim(); ++j) {
    if (is_infinite(j)) s.push_back(j);
  }
  return s;
}

bool ParamVector::all_finite() const {
  return std::none_of(entries_.begin(), entries_.end(),
                      [](double v) { return v == kInf; });
}

bool ParamVector::all_infinite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double v) { return v == kInf; });
}

double ParamVector::min_finite() const {
  double m = kInf;
  for (double v : entries_) {
    if (v < m) m = v;
  }
  if (m == kInf) throw ConfigError("ParamVector: no finite entry");
  return m;
}

double ParamVector::contrast() const {
  double lo = kInf, hi = 0.0;
  for (double v : entries_) {
    if (v == kInf) return kInf;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi / lo;
}

ParamVector ParamVector::parse(const std::string& text) {
  std::vector<double> entries;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto begin = tok.find_first_not_of(" \t");
    const auto end = tok.find_last_not_of(" \t");
    if (begin == std::string::npos) throw ConfigError("ParamVector: empty token in '" + text + "'");
    tok = tok.substr(begin, end - begin + 1);
    if (tok == "inf") {
      entries.push_back(kInf);
    } else {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &pos);
      } catch (const std::exception&) {
        throw ConfigError("ParamVector: bad token '" + tok + "'");
      }
      if (pos != tok.size()) throw ConfigError("ParamVector: bad token '" + tok + "'");
      entries.push_back(v);
    }
  }
  return ParamVector(entries);
}

std::string ParamVector::to_string() const {
  std::string out;
  char buf[32];
  for (int j = 0; j < dim(); ++j) {
    if (j) out += ",";
    if (is_infinite(j)) {
      out += "inf";
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", entries_[j]);
      out += buf;
    }
  }
  return out;
}

std::pair<double, ParamVector> normalize(const ParamVector& y) {
  if (y.all_infinite()) {
    throw ConfigError("normalize: all-infinite parameter (the solution is identically 0)");
  }
  const double t = y.min_finite();
  std::vector<double> scaled(y.dim());
  for (int j = 0; j < y.dim(); ++j) {
    scaled[j] = y.is_infinite(j) ? kInf : y[j] / t;
  }
  return {t, ParamVector(scaled)};
}

int level_for_degree(int k, double c0) {
  if (k < 0) throw ConfigError("level_for_degree: negative degree");
  if (!(c0 > 0.0)) throw ConfigError("level_for_degree: c0 must be positive");
  const double target = std::log2(std::sqrt(3.0) * c0) + k * std::log2(3.0);
  const int level = static_cast<int>(std::ceil(target - 1e-12));
  return std::max(level, 1);
}

std::vector<int> DyadicRectangle::infinite_axes() const {
  std::vector<int> s;
  for (int j = 0; j < static_cast<int>(ell.size()); ++j) {
    if (ell[j] == level) s.push_back(j);
  }
  return s;
}

bool DyadicRectangle::contains(const ParamVector& y) const {
  if (y.dim() != static_cast<int>(ell.size())) return false;
  for (int j = 0; j < y.dim(); ++j) {
    const double lo = std::ldexp(1.0, ell[j]);
    if (ell[j] == level) {
      if (!(y[j] >= lo)) return false;  // [2^L, inf], inf allowed
    } else {
      if (y.is_infinite(j) || !(y[j] >= lo && y[j] <= 2.0 * lo)) return false;
    }
  }
  return true;
}

DyadicRectangle locate_rectangle(const ParamVector& y, int level) {
  DyadicRectangle r;
  r.level = level;
  r.ell.resize(y.dim());
  for (int j = 0; j < y.dim(); ++j) {
    if (y.is_infinite(j)) {
      r.ell[j] = level;
      continue;
    }
    if (y[j] < 1.0) {
      throw ConfigError("locate_rectangle: entry " + std::to_string(j) +
                        " below 1; normalize the parameter first");
    }
    // ilogb is exactly floor(log2) for positive doubles, so exact powers
    // of two land in the rectangle having them as lower endpoint.
    r.ell[j] = std::min(std::ilogb(y[j]), level);
  }
  return r;
}

namespace {

// All tuples in {0..level}^d with min entry 0, in graded-lex order.
void append_boundary_indices(int d, int level, std::vector<std::vector<int>>& out) {
  std::vector<int> tuple(d, 0);
  std::vector<std::vector<int>> all;
  while (true) {
    if (*std::min_element(tuple.begin(), tuple.end()) == 0) all.push_back(tuple);
    int axis = d - 1;
    while (axis >= 0 && tuple[axis] == level) tuple[axis--] = 0;
    if (axis < 0) break;
    ++tuple[axis];
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    const int sa = std::accumulate(a.begin(), a.end(), 0);
    const int sb = std::accumulate(b.begin(), b.end(), 0);
    if (sa != sb) return sa < sb;
    return a < b;
  });
  out = std::move(all);
}

}  // namespace

RectangleCover enumerate_cover(int d, int k, double c0) {
  if (d < 1) throw ConfigError("enumerate_cover: d must be >= 1");
  RectangleCover cover;
  cover.level = level_for_degree(k, c0);
  cover.degree = k;
  const double total = std::pow(static_cast<double>(cover.level + 1), d);
  if (total > 2e6) {
    throw ConfigError("enumerate_cover: cover of size (" +
                      std::to_string(cover.level + 1) + ")^" + std::to_string(d) +
                      " - (" + std::to_string(cover.level) + ")^" + std::to_string(d) +
                      " is too large to enumerate");
  }
  append_boundary_indices(d, cover.level, cover.boundary_indices);
  return cover;
}

}  // namespace hcrom
