#include "mot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

namespace mot {
namespace {

constexpr std::size_t kNoRow = std::numeric_limits<std::size_t>::max();

// Row id of (marginal, atom) among the kept rows, or kNoRow if the row is
// one of the dropped redundant ones.
std::vector<std::vector<std::size_t>> kept_row_ids(const Shape& shape) {
  std::vector<std::vector<std::size_t>> ids(shape.order());
  std::size_t next = 0;
  for (std::size_t k = 0; k < shape.order(); ++k) {
    ids[k].assign(shape.extent(k), kNoRow);
    const std::size_t kept = k == 0 ? shape.extent(k) : shape.extent(k) - 1;
    for (std::size_t a = 0; a < kept; ++a) ids[k][a] = next++;
  }
  return ids;
}

template <Scalar T>
bool is_negative(const T& x, double tol) {
  if constexpr (is_exact_v<T>) {
    return sgn(x) < 0;
  } else {
    return x < -tol;
  }
}

template <Scalar T>
bool is_positive(const T& x, double tol) {
  if constexpr (is_exact_v<T>) {
    return sgn(x) > 0;
  } else {
    return x > tol;
  }
}

template <Scalar T>
bool is_nonzero(const T& x, double tol) {
  if constexpr (is_exact_v<T>) {
    return sgn(x) != 0;
  } else {
    return std::fabs(x) > tol;
  }
}

// Revised simplex with an explicit dense basis inverse. Column j < N is the
// coupling entry with flat offset j; columns N..N+m-1 are phase-1 artificials.
// In exact mode the pricing scan runs on double shadows of the duals and only
// candidates are re-priced exactly; optimality is always decided exactly.
template <Scalar T>
class RevisedSimplex {
 public:
  RevisedSimplex(const MotLinearProgram<T>& lp, const SimplexOptions& options)
      : lp_(lp), options_(options), shape_(lp.shape), n_(lp.variable_count()) {
    row_ids_ = kept_row_ids(shape_);
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
      if (!lp.rows[i].redundant) rhs_.push_back(lp.rhs[i]);
    }
    m_ = rhs_.size();
    cost_d_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) cost_d_[j] = to_double(lp.objective[j]);
    cost_scale_ = 0;
    for (double c : cost_d_) cost_scale_ = std::max(cost_scale_, std::fabs(c));
    column_rows_.resize(n_ * shape_.order());
    MultiIndex idx(shape_.order(), 0);
    std::size_t j = 0;
    do {
      for (std::size_t k = 0; k < shape_.order(); ++k) {
        column_rows_[j * shape_.order() + k] = row_ids_[k][idx[k]];
      }
      ++j;
    } while (advance(idx, shape_));
  }

  PrimalSolution<T> run() {
    phase_one();
    drive_out_artificials();
    phase_two();
    return extract();
  }

  // Phase 2 from a caller-supplied basis of real columns (flat offsets).
  // Returns nothing if that basis is singular or not primal feasible.
  std::optional<PrimalSolution<T>> run_from_basis(const std::vector<std::size_t>& columns) {
    if (columns.size() != m_) return std::nullopt;
    basis_ = columns;
    in_basis_.assign(n_, false);
    for (std::size_t j : basis_) {
      if (j >= n_ || in_basis_[j]) return std::nullopt;
      in_basis_[j] = true;
    }
    if (!invert_basis()) return std::nullopt;
    x_basic_.assign(m_, T(0));
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t r = 0; r < m_; ++r) {
        if (binv_[i * m_ + r] != 0 && rhs_[r] != 0) x_basic_[i] += binv_[i * m_ + r] * rhs_[r];
      }
      if (is_negative(x_basic_[i], 1e-12)) return std::nullopt;
    }
    phase_two();
    return extract();
  }

 private:
  bool is_artificial(std::size_t var) const { return var >= n_; }

  std::span<const std::size_t> rows_of(std::size_t j) const {
    return {column_rows_.data() + j * shape_.order(), shape_.order()};
  }

  T column_cost(std::size_t var) const {
    if (is_artificial(var)) return phase_ == 1 ? T(1) : T(0);
    return phase_ == 1 ? T(0) : lp_.objective[var];
  }

  double column_cost_d(std::size_t var) const { return phase_ == 1 ? 0.0 : cost_d_[var]; }

  void init_basis() {
    basis_.resize(m_);
    in_basis_.assign(n_, false);
    binv_.assign(m_ * m_, T(0));
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      binv_[i * m_ + i] = T(1);
    }
    x_basic_ = rhs_;
  }

  // Gauss-Jordan on [B | I] with B's columns in basis order, so row i of
  // the result is the row of B^{-1} for basis position i.
  bool invert_basis() {
    std::vector<T> a(m_ * m_, T(0));
    for (std::size_t c = 0; c < m_; ++c) {
      for (std::size_t r : rows_of(basis_[c])) {
        if (r != kNoRow) a[r * m_ + c] = T(1);
      }
    }
    std::vector<T> inv(m_ * m_, T(0));
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = T(1);
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = m_;
      double best = 0;
      for (std::size_t r = col; r < m_; ++r) {
        const double v = std::fabs(to_double(a[r * m_ + col]));
        if (v > best + 1e-12) {
          best = v;
          piv = r;
        }
      }
      if (piv == m_ || !is_nonzero(a[piv * m_ + col], 1e-12)) return false;
      if (piv != col) {
        for (std::size_t c = 0; c < m_; ++c) {
          std::swap(a[piv * m_ + c], a[col * m_ + c]);
          std::swap(inv[piv * m_ + c], inv[col * m_ + c]);
        }
      }
      const T p = a[col * m_ + col];
      std::vector<std::size_t> nz_a;
      std::vector<std::size_t> nz_inv;
      for (std::size_t c = 0; c < m_; ++c) {
        if (a[col * m_ + c] != 0) {
          a[col * m_ + c] /= p;
          nz_a.push_back(c);
        }
        if (inv[col * m_ + c] != 0) {
          inv[col * m_ + c] /= p;
          nz_inv.push_back(c);
        }
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == col || a[r * m_ + col] == 0) continue;
        const T factor = a[r * m_ + col];
        for (std::size_t c : nz_a) a[r * m_ + c] -= factor * a[col * m_ + c];
        for (std::size_t c : nz_inv) inv[r * m_ + c] -= factor * inv[col * m_ + c];
      }
    }
    binv_ = std::move(inv);
    return true;
  }

  void recompute_duals() {
    y_.assign(m_, T(0));
    for (std::size_t i = 0; i < m_; ++i) {
      T cb = column_cost(basis_[i]);
      if (cb == 0) continue;
      for (std::size_t r = 0; r < m_; ++r) {
        if (binv_[i * m_ + r] != 0) y_[r] += cb * binv_[i * m_ + r];
      }
    }
    y_d_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) y_d_[r] = to_double(y_[r]);
  }

  T reduced_cost(std::size_t j) const {
    T d = column_cost(j);
    for (std::size_t r : rows_of(j)) {
      if (r != kNoRow) d -= y_[r];
    }
    return d;
  }

  double reduced_cost_d(std::size_t j) const {
    double d = column_cost_d(j);
    for (std::size_t r : rows_of(j)) {
      if (r != kNoRow) d -= y_d_[r];
    }
    return d;
  }

  double pricing_tolerance() const {
    double ymax = 0;
    for (double v : y_d_) ymax = std::max(ymax, std::fabs(v));
    const double scale = 1.0 + (phase_ == 1 ? 0.0 : cost_scale_) +
                         static_cast<double>(shape_.order()) * ymax;
    return 1e-9 * scale;
  }

  // Entering column, or n_ if the current basis is optimal.
  std::size_t choose_entering(bool bland) const {
    const double tol = pricing_tolerance();
    if (!bland) {
      std::size_t best = n_;
      double best_d = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (in_basis_[j]) continue;
        double d = reduced_cost_d(j);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best != n_ && best_d < -tol) return best;
      if constexpr (!is_exact_v<T>) return n_;
    }
    // Smallest-index rule; in exact mode also the tie-breaker that settles
    // candidates the double screen could not decide.
    for (std::size_t j = 0; j < n_; ++j) {
      if (in_basis_[j]) continue;
      double d = reduced_cost_d(j);
      if constexpr (is_exact_v<T>) {
        if (d > tol) continue;
        if (is_negative(reduced_cost(j), tol)) return j;
      } else {
        if (d < -tol) return j;
      }
    }
    return n_;
  }

  std::vector<T> basic_column(std::size_t j) const {
    std::vector<T> alpha(m_, T(0));
    for (std::size_t r : rows_of(j)) {
      if (r == kNoRow) continue;
      for (std::size_t i = 0; i < m_; ++i) {
        if (binv_[i * m_ + r] != 0) alpha[i] += binv_[i * m_ + r];
      }
    }
    return alpha;
  }

  void pivot(std::size_t leave_pos, std::size_t enter, const std::vector<T>& alpha,
             const T& reduced) {
    const T pivot_value = alpha[leave_pos];
    T theta = x_basic_[leave_pos] / pivot_value;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != leave_pos && alpha[i] != 0) x_basic_[i] -= theta * alpha[i];
    }
    x_basic_[leave_pos] = theta;

    std::vector<std::size_t> nz;
    T* prow = &binv_[leave_pos * m_];
    for (std::size_t r = 0; r < m_; ++r) {
      if (prow[r] != 0) {
        prow[r] /= pivot_value;
        nz.push_back(r);
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == leave_pos || alpha[i] == 0) continue;
      T* row = &binv_[i * m_];
      for (std::size_t r : nz) row[r] -= alpha[i] * prow[r];
    }
    if (reduced != 0) {
      for (std::size_t r : nz) {
        y_[r] += reduced * prow[r];
        y_d_[r] = to_double(y_[r]);
      }
    }
    if (!is_artificial(basis_[leave_pos])) in_basis_[basis_[leave_pos]] = false;
    basis_[leave_pos] = enter;
    in_basis_[enter] = true;
  }

  void iterate() {
    std::size_t degenerate = 0;
    const double pivot_tol = 1e-11;
    while (true) {
      if (++iterations_ > options_.max_iterations) {
        throw Error(ErrorKind::numeric, "simplex iteration budget exhausted");
      }
      const bool bland = degenerate >= options_.degenerate_streak;
      const std::size_t enter = choose_entering(bland);
      if (enter == n_) return;
      std::vector<T> alpha = basic_column(enter);

      std::size_t leave = m_;
      T best_ratio(0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (!is_positive(alpha[i], pivot_tol)) continue;
        T ratio = x_basic_[i] / alpha[i];
        if (leave == m_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) {
        throw Error(ErrorKind::numeric, "unbounded direction on a bounded polytope");
      }
      if constexpr (!is_exact_v<T>) {
        if (best_ratio < 0) best_ratio = 0;
      }
      degenerate = is_nonzero(best_ratio, 0.0) ? 0 : degenerate + 1;
      pivot(leave, enter, alpha, reduced_cost(enter));
    }
  }

  void phase_one() {
    phase_ = 1;
    init_basis();
    recompute_duals();
    iterate();
    T infeasibility(0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (is_artificial(basis_[i])) infeasibility += x_basic_[i];
    }
    if (is_positive(infeasibility, 1e-9)) {
      throw Error(ErrorKind::infeasible, "transportation polytope is empty");
    }
  }

  void drive_out_artificials() {
    for (std::size_t pos = 0; pos < m_; ++pos) {
      if (!is_artificial(basis_[pos])) continue;
      std::size_t chosen = n_;
      for (std::size_t j = 0; j < n_ && chosen == n_; ++j) {
        if (in_basis_[j]) continue;
        T entry(0);
        for (std::size_t r : rows_of(j)) {
          if (r != kNoRow) entry += binv_[pos * m_ + r];
        }
        if (is_nonzero(entry, 1e-9)) chosen = j;
      }
      if (chosen == n_) {
        throw Error(ErrorKind::numeric, "artificial variable cannot leave the basis");
      }
      pivot(pos, chosen, basic_column(chosen), T(0));
    }
  }

  void phase_two() {
    phase_ = 2;
    recompute_duals();
    iterate();
    if constexpr (!is_exact_v<T>) recompute_duals();
  }

  PrimalSolution<T> extract() const {
    Tensor<T> mass(shape_, T(0));
    std::vector<std::size_t> basic;
    for (std::size_t i = 0; i < m_; ++i) {
      T v = x_basic_[i];
      if constexpr (!is_exact_v<T>) {
        if (v < 0) v = 0;
      }
      mass[basis_[i]] = v;
      basic.push_back(basis_[i]);
    }
    std::sort(basic.begin(), basic.end());

    PotentialFamily<T> duals = PotentialFamily<T>::zeros(shape_);
    for (std::size_t k = 0; k < shape_.order(); ++k) {
      for (std::size_t a = 0; a < shape_.extent(k); ++a) {
        if (row_ids_[k][a] != kNoRow) duals[k][a] = y_[row_ids_[k][a]];
      }
    }
    Coupling<T> plan(std::move(mass));
    T value(0);
    for (std::size_t j : basic) value += lp_.objective[j] * plan[j];

    PrimalSolution<T> out{std::move(plan), value, std::move(duals), {}, iterations_};
    for (std::size_t j : basic) out.basis.push_back(shape_.unravel(j));
    return out;
  }

  const MotLinearProgram<T>& lp_;
  SimplexOptions options_;
  Shape shape_;
  std::size_t n_;
  std::size_t m_ = 0;
  int phase_ = 1;
  std::size_t iterations_ = 0;
  std::vector<std::vector<std::size_t>> row_ids_;
  std::vector<std::size_t> column_rows_;
  std::vector<T> rhs_;
  std::vector<double> cost_d_;
  double cost_scale_ = 0;

  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_;
  std::vector<T> binv_;  // row-major m x m
  std::vector<T> x_basic_;
  std::vector<T> y_;
  std::vector<double> y_d_;
};

// Solves the square system B x = b in place by Gauss-Jordan elimination.
// Returns false when B is singular.
template <Scalar T>
bool solve_square(std::vector<std::vector<T>> a, std::vector<T> b, std::vector<T>& x) {
  const std::size_t m = b.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = m;
    if constexpr (is_exact_v<T>) {
      for (std::size_t r = col; r < m; ++r) {
        if (a[r][col] != 0) {
          piv = r;
          break;
        }
      }
    } else {
      double best = 1e-12;
      for (std::size_t r = col; r < m; ++r) {
        if (std::fabs(a[r][col]) > best) {
          best = std::fabs(a[r][col]);
          piv = r;
        }
      }
    }
    if (piv == m) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col || a[r][col] == 0) continue;
      T factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  x.resize(m);
  for (std::size_t r = 0; r < m; ++r) x[r] = b[r] / a[r][r];
  return true;
}

// Finds a candidate optimal basis in floating point, refactors it exactly
// and lets exact pricing finish (usually without further pivots).
std::optional<PrimalSolution<Rational>> warm_started(const MotLinearProgram<Rational>& lp,
                                                     const SimplexOptions& options) {
  MotLinearProgram<double> shadow;
  shadow.shape = lp.shape;
  shadow.rows = lp.rows;
  for (const auto& x : lp.objective) shadow.objective.push_back(x.get_d());
  for (const auto& x : lp.rhs) shadow.rhs.push_back(x.get_d());
  shadow.sup_norm = lp.sup_norm.get_d();
  try {
    PrimalSolution<double> guess = RevisedSimplex<double>(shadow, options).run();
    std::vector<std::size_t> columns;
    for (const auto& idx : guess.basis) columns.push_back(lp.shape.offset(idx));
    auto exact = RevisedSimplex<Rational>(lp, options).run_from_basis(columns);
    if (exact) exact->iterations += guess.iterations;
    return exact;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

template <Scalar T>
std::size_t MotLinearProgram<T>::independent_row_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ConstraintRow& r) { return !r.redundant; }));
}

template <Scalar T>
std::vector<std::vector<int>> MotLinearProgram<T>::constraint_matrix() const {
  std::vector<std::vector<int>> a(rows.size(), std::vector<int>(shape.size(), 0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < shape.size(); ++j) {
      if (shape.coordinate(j, rows[i].marginal) == rows[i].atom) a[i][j] = 1;
    }
  }
  return a;
}

template <Scalar T>
MotLinearProgram<T> build_lp(const std::vector<DiscreteMeasure<T>>& marginals,
                             const CostTensor<T>& cost, std::size_t guard_entries) {
  Shape shape = shape_of(marginals);
  if (!(shape == cost.shape())) {
    throw Error(ErrorKind::shape_mismatch, "cost extents differ from marginal sizes");
  }
  checked_size(shape.dims(), guard_entries);

  MotLinearProgram<T> lp;
  lp.shape = shape;
  lp.objective = cost.data();
  lp.sup_norm = cost.sup_norm();
  for (std::size_t k = 0; k < marginals.size(); ++k) {
    for (std::size_t a = 0; a < marginals[k].size(); ++a) {
      const bool redundant = k > 0 && a + 1 == marginals[k].size();
      lp.rows.push_back({k, a, redundant});
      lp.rhs.push_back(marginals[k].weight(a));
    }
  }
  return lp;
}

template <Scalar T>
PrimalSolution<T> solve_primal(const MotLinearProgram<T>& lp, const SimplexOptions& options) {
  if (lp.shape.order() == 0 || lp.variable_count() == 0) {
    throw Error(ErrorKind::shape_mismatch, "empty linear program");
  }
  if constexpr (is_exact_v<T>) {
    if (options.float_warm_start) {
      if (auto exact = warm_started(lp, options)) return std::move(*exact);
    }
  }
  RevisedSimplex<T> simplex(lp, options);
  return simplex.run();
}

template <Scalar T>
std::vector<Coupling<T>> enumerate_vertices(const MotLinearProgram<T>& lp,
                                            std::size_t max_variables) {
  const std::size_t n = lp.variable_count();
  if (n > max_variables) {
    throw Error(ErrorKind::size_guard, "vertex enumeration limited to " +
                                           std::to_string(max_variables) + " variables");
  }
  const auto full = lp.constraint_matrix();
  std::vector<std::vector<int>> rows;
  std::vector<T> rhs;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    if (lp.rows[i].redundant) continue;
    rows.push_back(full[i]);
    rhs.push_back(lp.rhs[i]);
  }
  const std::size_t m = rows.size();

  std::vector<Coupling<T>> vertices;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), true);
  do {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j) {
      if (pick[j]) cols.push_back(j);
    }
    std::vector<std::vector<T>> b(m, std::vector<T>(m, T(0)));
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) b[r][c] = T(rows[r][cols[c]]);
    }
    std::vector<T> x;
    if (!solve_square(b, rhs, x)) continue;
    bool nonneg = true;
    for (T& v : x) {
      if constexpr (is_exact_v<T>) {
        nonneg = nonneg && sgn(v) >= 0;
      } else {
        if (v < 0 && v > -1e-12) v = 0;
        nonneg = nonneg && v >= 0;
      }
    }
    if (!nonneg) continue;
    Tensor<T> mass(lp.shape, T(0));
    for (std::size_t c = 0; c < m; ++c) mass[cols[c]] = x[c];
    bool seen = false;
    for (const auto& v : vertices) {
      bool same = true;
      for (std::size_t j = 0; j < n && same; ++j) {
        if constexpr (is_exact_v<T>) {
          same = v[j] == mass[j];
        } else {
          same = std::fabs(v[j] - mass[j]) <= 1e-12;
        }
      }
      if (same) {
        seen = true;
        break;
      }
    }
    if (!seen) vertices.emplace_back(std::move(mass));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return vertices;
}

#define MOT_INSTANTIATE(T)                                                                  \
  template struct MotLinearProgram<T>;                                                      \
  template MotLinearProgram<T> build_lp(const std::vector<DiscreteMeasure<T>>&,            \
                                        const CostTensor<T>&, std::size_t);                 \
  template PrimalSolution<T> solve_primal(const MotLinearProgram<T>&, const SimplexOptions&); \
  template std::vector<Coupling<T>> enumerate_vertices(const MotLinearProgram<T>&, std::size_t);

MOT_INSTANTIATE(Rational)
MOT_INSTANTIATE(double)

#undef MOT_INSTANTIATE

}  // namespace mot
