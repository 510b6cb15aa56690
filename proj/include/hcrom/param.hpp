#ifndef HCROM_PARAM_HPP
#define HCROM_PARAM_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace hcrom {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Diffusivity vector in (0, inf]^d. Infinite entries are stored as IEEE
// +inf and treated exactly: limit problems are solved by constraint
// elimination, never by a large finite stand-in.
class ParamVector {
public:
  ParamVector() = default;
  explicit ParamVector(std::vector<double> entries);

  int dim() const { return static_cast<int>(entries_.size()); }
  double operator[](int j) const { return entries_[j]; }
  const std::vector<double>& entries() const { return entries_; }

  bool is_infinite(int j) const { return entries_[j] == kInf; }
  std::vector<int> infinite_set() const;
  bool all_finite() const;
  bool all_infinite() const;
  double min_finite() const;  // throws on all-infinite input

  // max y_j / min y_j; +inf when any entry is infinite.
  double contrast() const;

  // Comma list with the token "inf" for infinite entries.
  static ParamVector parse(const std::string& text);
  std::string to_string() const;

  friend bool operator==(const ParamVector& a, const ParamVector& b) {
    return a.entries_ == b.entries_;
  }

private:
  std::vector<double> entries_;
};

// Homogeneity normalization y = t * y_normalized with min finite entry of
// y_normalized equal to 1. The solution map scales as u(y) = u(y_n) / t.
std::pair<double, ParamVector> normalize(const ParamVector& y);

// Smallest level L >= 1 such that c0 * 2^{-L} <= 3^{-k} / sqrt(3).
int level_for_degree(int k, double c0);

// Dyadic rectangle of the coercive parameter domain: axis j spans
// [2^l_j, 2^{l_j+1}], replaced by [2^L, inf] when l_j == L.
struct DyadicRectangle {
  std::vector<int> ell;
  int level = 0;

  std::vector<int> infinite_axes() const;  // S = { j : ell_j == L }
  bool contains(const ParamVector& y) const;
};

// Canonical rectangle of a normalized parameter (all entries >= 1):
// ell_j = min(floor(log2 y_j), L). A value lying on a rectangle boundary
// resolves to the rectangle having it as lower endpoint.
DyadicRectangle locate_rectangle(const ParamVector& y, int level);

// The rectangles indexed by E_k = {0..L}^d \ {1..L}^d cover the slice
// { min y_j = 1 } of the normalized domain.
struct RectangleCover {
  int level = 0;
  int degree = 0;
  std::vector<std::vector<int>> boundary_indices;  // E_k, graded-lex order

  std::size_t size() const { return boundary_indices.size(); }
};

RectangleCover enumerate_cover(int d, int k, double c0);

}  // namespace hcrom

#endif
