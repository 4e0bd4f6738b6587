#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcm/errors.hpp"

namespace pcm {

namespace detail {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// Exact rational bookkeeping for parsed tokens. Lets the parser accept
// "3" against "1/3" without any floating-point slack.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;
  bool exact = false;

  Rational reciprocal() const { return {den, num, exact}; }
};

inline bool mul_overflows(__int128 a, __int128 b, __int128& out) {
  return __builtin_mul_overflow(a, b, &out);
}

// True when a/b and c/d are both exact and a/b * c/d == 1.
inline bool exact_reciprocals(const Rational& a, const Rational& b) {
  if (!a.exact || !b.exact) return false;
  __int128 lhs, rhs;
  if (mul_overflows(a.num, b.num, lhs)) return false;
  if (mul_overflows(a.den, b.den, rhs)) return false;
  return lhs == rhs;
}

// Parses an unsigned decimal numeral (digits, optional fraction part,
// optional integer exponent) into an exact rational if it fits.
inline bool parse_decimal_rational(std::string_view s, Rational& out) {
  __int128 num = 0;
  __int128 den = 1;
  std::size_t i = 0;
  bool any_digit = false;
  for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
    if (mul_overflows(num, 10, num)) return false;
    num += s[i] - '0';
    any_digit = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
      if (mul_overflows(num, 10, num)) return false;
      if (mul_overflows(den, 10, den)) return false;
      num += s[i] - '0';
      any_digit = true;
    }
  }
  if (!any_digit) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      neg = s[i] == '-';
      ++i;
    }
    if (i == s.size()) return false;
    long exp = 0;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
      exp = exp * 10 + (s[i] - '0');
      if (exp > 40) return false;
    }
    for (long k = 0; k < exp; ++k) {
      if (mul_overflows(neg ? den : num, 10, neg ? den : num)) return false;
    }
  }
  if (i != s.size()) return false;
  out = {num, den, true};
  return true;
}

}  // namespace detail

struct Violation {
  int row = 0;  // 1-based
  int col = 0;
  std::string description;
};

struct ValidationReport {
  bool complete = true;
  bool connected = true;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

/// Square reciprocal matrix of positive ratios; entries may be missing
/// (symmetrically). Matrices obtained from parse_matrix, from_grid or
/// consistent_from satisfy all invariants; unchecked() skips validation
/// and exists for validation/reporting workflows.
class PCMatrix {
public:
  static constexpr double kMissingValue = std::numeric_limits<double>::quiet_NaN();

  static PCMatrix unchecked(int n, std::vector<double> values) {
    PCMatrix m;
    m.n_ = n;
    m.values_ = std::move(values);
    return m;
  }

  static PCMatrix from_grid(int n, const std::vector<std::optional<double>>& grid);
  static PCMatrix consistent_from(std::span<const double> weights);

  int size() const { return n_; }

  bool known(int i, int j) const { return !std::isnan(values_[idx(i, j)]); }

  /// Entry value; NaN when missing.
  double value(int i, int j) const { return values_[idx(i, j)]; }

  std::optional<double> entry(int i, int j) const {
    double v = values_[idx(i, j)];
    if (std::isnan(v)) return std::nullopt;
    return v;
  }

  bool complete() const {
    for (double v : values_)
      if (std::isnan(v)) return false;
    return true;
  }

private:
  PCMatrix() = default;
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  int n_ = 0;
  std::vector<double> values_;
};

/// Checks all matrix invariants plus completeness and connectivity of the
/// known-comparison pattern. Never throws; everything is reported.
inline ValidationReport validate(const PCMatrix& m) {
  ValidationReport report;
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    if (!m.known(i, i)) {
      report.violations.push_back({i + 1, i + 1, "diagonal entry is missing"});
    } else if (std::abs(m.value(i, i) - 1.0) > 1e-9) {
      report.violations.push_back(
          {i + 1, i + 1, "diagonal entry is " + detail::format_double(m.value(i, i)) + ", expected 1"});
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !m.known(i, j)) continue;
      double v = m.value(i, j);
      if (!(v > 0.0) || !std::isfinite(v)) {
        report.violations.push_back(
            {i + 1, j + 1, "entry " + detail::format_double(v) + " is not a positive finite ratio"});
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      bool up = m.known(i, j);
      bool lo = m.known(j, i);
      if (up != lo) {
        report.violations.push_back(
            {j + 1, i + 1, "asymmetric missingness: exactly one of m(" + std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + ") and its reciprocal is known"});
      } else if (up && lo) {
        double prod = m.value(i, j) * m.value(j, i);
        if (std::isfinite(prod) && std::abs(prod - 1.0) > 1e-9) {
          report.violations.push_back(
              {j + 1, i + 1, "reciprocity violated: m(" + std::to_string(j + 1) + "," + std::to_string(i + 1) +
                                 ")=" + detail::format_double(m.value(j, i)) + " but m(" + std::to_string(i + 1) +
                                 "," + std::to_string(j + 1) + ")=" + detail::format_double(m.value(i, j))});
        }
      }
    }
  }
  report.complete = m.complete();
  // Connectivity of the graph with one edge per known off-diagonal pair.
  if (n > 0) {
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (m.known(i, j) || m.known(j, i)) parent[find(i)] = find(j);
    int root = find(0);
    for (int i = 1; i < n; ++i)
      if (find(i) != root) {
        report.connected = false;
        break;
      }
  }
  return report;
}

inline PCMatrix PCMatrix::from_grid(int n, const std::vector<std::optional<double>>& grid) {
  if (n < 1) throw ParseError("matrix must have at least one row");
  if (grid.size() != static_cast<std::size_t>(n) * n)
    throw ParseError("grid has " + std::to_string(grid.size()) + " entries, expected " + std::to_string(n * n));
  std::vector<double> values(grid.size(), kMissingValue);
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (grid[k]) values[k] = *grid[k];
  PCMatrix m = unchecked(n, std::move(values));
  ValidationReport report = validate(m);
  if (!report.ok())
    throw ValidationFailure("invalid matrix: " + report.violations.front().description);
  return m;
}

inline PCMatrix PCMatrix::consistent_from(std::span<const double> weights) {
  const int n = static_cast<int>(weights.size());
  if (n < 1) throw Error("weight vector is empty");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw Error("weights must be positive and finite");
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      values[static_cast<std::size_t>(i) * n + j] = i == j ? 1.0 : weights[i] / weights[j];
  return unchecked(n, std::move(values));
}

/// Transitivity check: every fully-known triad must satisfy
/// m_ij * m_jk * m_ki == 1 within the relative tolerance.
inline bool is_consistent(const PCMatrix& m, double tol = 1e-9) {
  const int n = m.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        if (!m.known(i, j) || !m.known(j, k) || !m.known(i, k)) continue;
        double prod = m.value(i, j) * m.value(j, k) / m.value(i, k);
        if (std::abs(prod - 1.0) > tol) return false;
      }
  return true;
}

namespace detail {

struct ParsedGrid {
  int n = 0;
  std::vector<double> values;
  std::vector<Rational> rationals;

  bool known(int i, int j) const { return !std::isnan(values[static_cast<std::size_t>(i) * n + j]); }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  Rational& rat(int i, int j) { return rationals[static_cast<std::size_t>(i) * n + j]; }
  const Rational& rat(int i, int j) const { return rationals[static_cast<std::size_t>(i) * n + j]; }
};

// Splits into rows of tokens; '#' starts a comment, blank lines skipped.
inline std::vector<std::vector<std::string_view>> tokenize_rows(std::string_view text) {
  std::vector<std::vector<std::string_view>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
      if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    if (!tokens.empty()) rows.push_back(std::move(tokens));
  }
  return rows;
}

// Token -> (value, rational). Throws ParseError for anything that is not
// "?" or a positive number / fraction.
inline bool parse_token(std::string_view token, int row, int col, double& value, Rational& rat) {
  if (token == "?") return false;
  auto fail = [&]() -> ParseError {
    return ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) + ": token '" +
                          std::string(token) + "' is not a positive number, fraction or '?'",
                      row, col);
  };
  std::string_view num_part = token;
  std::string_view den_part;
  if (std::size_t slash = token.find('/'); slash != std::string_view::npos) {
    num_part = token.substr(0, slash);
    den_part = token.substr(slash + 1);
    if (den_part.find('/') != std::string_view::npos) throw fail();
  }
  Rational num_rat, den_rat{1, 1, true};
  bool exact = parse_decimal_rational(num_part, num_rat);
  double num_val, den_val = 1.0;
  {
    std::string s(num_part);
    char* end = nullptr;
    num_val = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty() || s[0] == '-' || s[0] == '+') throw fail();
  }
  if (!den_part.empty()) {
    exact = parse_decimal_rational(den_part, den_rat) && exact;
    std::string s(den_part);
    char* end = nullptr;
    den_val = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s[0] == '-' || s[0] == '+') throw fail();
  } else if (den_part.data() != nullptr) {
    throw fail();  // trailing '/'
  }
  if (exact) {
    __int128 n2, d2;
    if (!mul_overflows(num_rat.num, den_rat.den, n2) && !mul_overflows(num_rat.den, den_rat.num, d2) && d2 != 0) {
      rat = {n2, d2, true};
    } else {
      exact = false;
    }
  }
  if (!exact) rat = {0, 1, false};
  // The value always comes from the correctly rounded decimal conversions so
  // that serialized matrices reparse to bitwise-identical doubles; the
  // rational is kept only to recognize exactly reciprocal token pairs.
  value = num_val / den_val;
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) + ": value '" +
                         std::string(token) + "' must be strictly positive and finite",
                     row, col);
  }
  return true;
}

inline ParsedGrid parse_grid(std::string_view text) {
  auto rows = tokenize_rows(text);
  if (rows.empty()) throw ParseError("input contains no matrix rows");
  const int n = static_cast<int>(rows.size());
  ParsedGrid grid;
  grid.n = n;
  grid.values.assign(static_cast<std::size_t>(n) * n, PCMatrix::kMissingValue);
  grid.rationals.assign(static_cast<std::size_t>(n) * n, Rational{});
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw ParseError("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                           " entries, expected " + std::to_string(n) + " (matrix must be square)",
                       i + 1, 0);
    for (int j = 0; j < n; ++j) {
      double value;
      Rational rat;
      if (parse_token(rows[i][j], i + 1, j + 1, value, rat)) {
        grid.at(i, j) = value;
        grid.rat(i, j) = rat;
      }
    }
  }
  // Upper-triangle-only input: every strictly-lower token "?" means
  // "derive from the upper triangle", not "missing".
  bool lower_all_missing = true;
  for (int i = 1; i < n && lower_all_missing; ++i)
    for (int j = 0; j < i; ++j)
      if (grid.known(i, j)) {
        lower_all_missing = false;
        break;
      }
  if (lower_all_missing) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (grid.known(i, j)) {
          grid.at(j, i) = 1.0 / grid.at(i, j);
          grid.rat(j, i) = grid.rat(i, j).reciprocal();
        }
  }
  return grid;
}

// Reciprocity with exact-rational fast path: "3" vs "1/3" passes exactly,
// decimal pairs fall back to the 1e-9 relative check.
inline ValidationReport validate_grid(const ParsedGrid& grid) {
  PCMatrix m = PCMatrix::unchecked(grid.n, grid.values);
  ValidationReport report = validate(m);
  if (!report.violations.empty()) {
    std::vector<Violation> kept;
    for (const Violation& v : report.violations) {
      if (v.description.rfind("reciprocity", 0) == 0) {
        int i = v.col - 1, j = v.row - 1;  // violation recorded at (j+1, i+1)
        if (exact_reciprocals(grid.rat(i, j), grid.rat(j, i))) continue;
      }
      kept.push_back(v);
    }
    report.violations = std::move(kept);
  }
  return report;
}

}  // namespace detail

/// Lenient parse for validation workflows: builds the matrix without
/// enforcing invariants (shape and token syntax must still be sound).
inline PCMatrix parse_matrix_lenient(std::string_view text) {
  detail::ParsedGrid grid = detail::parse_grid(text);
  return PCMatrix::unchecked(grid.n, std::move(grid.values));
}

/// Strict parse: returns a matrix satisfying every invariant or throws.
/// When only the upper triangle is given, the lower is derived by
/// reciprocity; when both triangles are given they must agree.
inline PCMatrix parse_matrix(std::string_view text) {
  detail::ParsedGrid grid = detail::parse_grid(text);
  ValidationReport report = detail::validate_grid(grid);
  if (!report.ok()) {
    std::string msg = "matrix has " + std::to_string(report.violations.size()) + " violation(s): " +
                      report.violations.front().description;
    throw ValidationFailure(msg);
  }
  return PCMatrix::unchecked(grid.n, std::move(grid.values));
}

/// Validation report for raw text, as the `validate` CLI command needs:
/// structural problems are reported, not thrown.
inline ValidationReport validate_text(std::string_view text) {
  return detail::validate_grid(detail::parse_grid(text));
}

/// One row per line, entries separated by single spaces, "?" for missing.
/// Values are written with shortest round-trip precision so that
/// parse_matrix(serialize(m)) reproduces m exactly.
inline std::string serialize(const PCMatrix& m) {
  std::string out;
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) out += ' ';
      out += m.known(i, j) ? detail::format_double(m.value(i, j)) : "?";
    }
    out += '\n';
  }
  return out;
}

}  // namespace pcm
