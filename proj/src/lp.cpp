#include "demandsig/lp.hpp"

#include "demandsig/linalg.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace demandsig::lp {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericFailure: return "numeric-failure";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

template <Scalar T>
int LinearProgram<T>::add_variable(std::string name, std::optional<T> lower,
                                   std::optional<T> upper) {
  if (lower && upper && *upper < *lower) {
    throw std::invalid_argument("variable " + name + " has empty bounds");
  }
  variables_.push_back({std::move(name), std::move(lower), std::move(upper)});
  return num_variables() - 1;
}

template <Scalar T>
int LinearProgram<T>::add_constraint(std::vector<Term<T>> terms, Relation relation, T rhs,
                                     std::string name) {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) throw std::out_of_range("unknown LP variable");
  }
  constraints_.push_back({std::move(name), std::move(terms), relation, std::move(rhs)});
  return num_constraints() - 1;
}

template <Scalar T>
void LinearProgram<T>::set_objective(Sense sense, std::vector<Term<T>> terms) {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) throw std::out_of_range("unknown LP variable");
  }
  sense_ = sense;
  objective_ = std::move(terms);
}

namespace {

template <Scalar T>
struct ColumnMap {
  int pos = -1;
  int neg = -1;
  T offset{0};
  bool flipped = false;
};

// min c x  s.t.  A x = b, x >= 0, b >= 0, with the first m columns after
// `structural` being artificials.
template <Scalar T>
struct StandardForm {
  int m = 0;
  int structural = 0;
  DenseMatrix<T> a;
  std::vector<T> b;
  std::vector<T> c;
  T objective_offset{0};
  std::vector<ColumnMap<T>> columns;
  std::vector<int> row_sign;
  std::vector<int> initial_column;  // unit column per row: a slack or an artificial
  int user_rows = 0;
};

template <Scalar T>
StandardForm<T> build_standard_form(const LinearProgram<T>& lp) {
  StandardForm<T> sf;
  int ncol = 0;
  struct BoundRow {
    int col;
    T rhs;
  };
  std::vector<BoundRow> bound_rows;
  for (const auto& v : lp.variables()) {
    ColumnMap<T> map;
    if (v.lower) {
      map.pos = ncol++;
      map.offset = *v.lower;
      if (v.upper) bound_rows.push_back({map.pos, *v.upper - *v.lower});
    } else if (v.upper) {
      map.pos = ncol++;
      map.offset = *v.upper;
      map.flipped = true;
    } else {
      map.pos = ncol++;
      map.neg = ncol++;
    }
    sf.columns.push_back(map);
  }

  struct Row {
    std::vector<std::pair<int, T>> coefs;
    Relation relation;
    T rhs;
  };
  std::vector<Row> rows;
  for (const auto& con : lp.constraints()) {
    Row row{{}, con.relation, con.rhs};
    for (const auto& term : con.terms) {
      const auto& map = sf.columns[term.var];
      row.rhs -= term.coef * map.offset;
      row.coefs.emplace_back(map.pos, map.flipped ? T(-term.coef) : term.coef);
      if (map.neg >= 0) row.coefs.emplace_back(map.neg, -term.coef);
    }
    rows.push_back(std::move(row));
  }
  sf.user_rows = static_cast<int>(rows.size());
  for (const auto& br : bound_rows) rows.push_back({{{br.col, T(1)}}, Relation::LessEqual, br.rhs});

  std::vector<int> slack_col(rows.size(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].relation != Relation::Equal) slack_col[i] = ncol++;
  }
  sf.m = static_cast<int>(rows.size());
  sf.structural = ncol;
  sf.a = DenseMatrix<T>(sf.m, ncol);
  sf.b.resize(sf.m);
  sf.row_sign.assign(sf.m, 1);
  sf.initial_column.assign(sf.m, -1);
  for (int i = 0; i < sf.m; ++i) {
    for (const auto& [col, coef] : rows[i].coefs) sf.a(i, col) += coef;
    if (slack_col[i] >= 0) {
      sf.a(i, slack_col[i]) = rows[i].relation == Relation::LessEqual ? T(1) : T(-1);
    }
    sf.b[i] = rows[i].rhs;
    if (sf.b[i] < T(0)) {
      sf.row_sign[i] = -1;
      sf.b[i] = -sf.b[i];
      for (int j = 0; j < ncol; ++j) sf.a(i, j) = -sf.a(i, j);
    }
    if (slack_col[i] >= 0 && sf.a(i, slack_col[i]) == T(1)) sf.initial_column[i] = slack_col[i];
  }

  sf.c.assign(ncol, T(0));
  const bool maximize = lp.sense() == Sense::Maximize;
  for (const auto& term : lp.objective()) {
    const auto& map = sf.columns[term.var];
    T coef = maximize ? T(-term.coef) : term.coef;
    sf.objective_offset += coef * map.offset;
    sf.c[map.pos] += map.flipped ? T(-coef) : coef;
    if (map.neg >= 0) sf.c[map.neg] -= coef;
  }
  return sf;
}

template <Scalar T>
class Tableau {
 public:
  Tableau(const StandardForm<T>& sf, int num_artificial)
      : m_(sf.m), n_(sf.structural + num_artificial), structural_(sf.structural), tab_(m_, n_),
        rhs_(sf.b), basis_(m_), d_(n_, T(0)) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < structural_; ++j) tab_(i, j) = sf.a(i, j);
  }

  int rows() const { return m_; }
  int cols() const { return n_; }
  bool is_artificial(int col) const { return col >= structural_; }
  T& at(int r, int c) { return tab_(r, c); }
  const T& at(int r, int c) const { return tab_(r, c); }
  std::vector<int>& basis() { return basis_; }
  const std::vector<T>& rhs() const { return rhs_; }
  const std::vector<T>& reduced() const { return d_; }

  void set_costs(const std::vector<T>& cost) {
    cost_ = cost;
    for (int j = 0; j < n_; ++j) {
      T v = cost_[j];
      for (int i = 0; i < m_; ++i) {
        if (tab_(i, j) != T(0)) v -= cost_[basis_[i]] * tab_(i, j);
      }
      d_[j] = v;
    }
  }

  T objective() const {
    T z{0};
    for (int i = 0; i < m_; ++i) z += cost_[basis_[i]] * rhs_[i];
    return z;
  }

  void pivot(int r, int c) {
    const T p = tab_(r, c);
    std::vector<int> nz;
    for (int j = 0; j < n_; ++j) {
      if (tab_(r, j) != T(0)) {
        tab_(r, j) /= p;
        nz.push_back(j);
      }
    }
    rhs_[r] /= p;
    tab_(r, c) = T(1);
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const T f = tab_(i, c);
      if (f == T(0)) continue;
      for (int j : nz) tab_(i, j) -= f * tab_(r, j);
      tab_(i, c) = T(0);
      rhs_[i] -= f * rhs_[r];
    }
    const T f = d_[c];
    if (f != T(0)) {
      for (int j : nz) d_[j] -= f * tab_(r, j);
      d_[c] = T(0);
    }
    basis_[r] = c;
  }

 private:
  int m_;
  int n_;
  int structural_;
  DenseMatrix<T> tab_;
  std::vector<T> rhs_;
  std::vector<int> basis_;
  std::vector<T> d_;
  std::vector<T> cost_;
};

enum class PhaseResult { Optimal, Unbounded, IterationLimit };

template <Scalar T>
PhaseResult run_phase(Tableau<T>& tab, const Options& opt, int& iterations) {
  const T opt_tol = tolerance<T>(opt.optimality_tol);
  const T piv_tol = tolerance<T>(opt.pivot_tol);
  bool bland = is_exact_v<T> || opt.rule == PivotRule::Bland;
  int degenerate_run = 0;
  auto& basis = tab.basis();
  while (true) {
    if (iterations >= opt.max_iterations) return PhaseResult::IterationLimit;
    int enter = -1;
    T best{0};
    for (int j = 0; j < tab.cols(); ++j) {
      if (tab.is_artificial(j)) continue;
      const T& dj = tab.reduced()[j];
      if (dj < -opt_tol) {
        if (bland) {
          enter = j;
          break;
        }
        if (enter < 0 || dj < best) {
          enter = j;
          best = dj;
        }
      }
    }
    if (enter < 0) return PhaseResult::Optimal;

    int leave = -1;
    T best_ratio{0};
    for (int i = 0; i < tab.rows(); ++i) {
      const T& aij = tab.at(i, enter);
      if (aij <= piv_tol) continue;
      T r = std::max(tab.rhs()[i], T(0)) / aij;
      if (leave < 0) {
        leave = i;
        best_ratio = r;
        continue;
      }
      const T slack = tolerance<T>(1e-12) * (T(1) + abs_of(best_ratio));
      if (r < best_ratio - slack) {
        leave = i;
        best_ratio = r;
      } else if (r <= best_ratio + slack && basis[i] < basis[leave]) {
        leave = i;
        best_ratio = std::min(best_ratio, r);
      }
    }
    if (leave < 0) return PhaseResult::Unbounded;

    if (!bland) {
      degenerate_run = best_ratio <= tolerance<T>(1e-12) ? degenerate_run + 1 : 0;
      if (degenerate_run > 50) bland = true;
    }
    tab.pivot(leave, enter);
    ++iterations;
  }
}

template <Scalar T>
bool verify(const StandardForm<T>& sf, const std::vector<T>& x, const std::vector<T>& y,
            const Options& opt, std::string& message) {
  const T feas = tolerance<T>(opt.feasibility_tol);
  const T optol = tolerance<T>(opt.optimality_tol);
  T bmax{0}, cmax{0};
  for (const auto& v : sf.b) bmax = std::max(bmax, abs_of(v));
  for (const auto& v : sf.c) cmax = std::max(cmax, abs_of(v));
  for (int j = 0; j < sf.structural; ++j) {
    if (x[j] < -feas) {
      message = "primal bound violated";
      return false;
    }
  }
  for (int i = 0; i < sf.m; ++i) {
    T r = -sf.b[i];
    for (int j = 0; j < sf.structural; ++j) r += sf.a(i, j) * x[j];
    if (abs_of(r) > feas * (T(1) + bmax)) {
      message = "primal residual too large";
      return false;
    }
  }
  T primal{0}, dual{0};
  for (int j = 0; j < sf.structural; ++j) {
    T r = sf.c[j];
    for (int i = 0; i < sf.m; ++i) r -= y[i] * sf.a(i, j);
    if (r < -optol * (T(1) + cmax)) {
      message = "dual infeasible reduced cost";
      return false;
    }
    primal += sf.c[j] * x[j];
  }
  for (int i = 0; i < sf.m; ++i) dual += y[i] * sf.b[i];
  if (abs_of(T(primal - dual)) > optol * (T(1) + abs_of(primal))) {
    message = "duality gap too large";
    return false;
  }
  return true;
}

}  // namespace

template <Scalar T>
Solution<T> solve(const LinearProgram<T>& program, const Options& options) {
  Solution<T> sol;
  const auto sf = build_standard_form(program);
  int num_art = 0;
  std::vector<int> init = sf.initial_column;
  for (auto& col : init) {
    if (col < 0) col = sf.structural + num_art++;
  }
  Tableau<T> tab(sf, num_art);
  for (int i = 0; i < sf.m; ++i) {
    if (init[i] >= sf.structural) tab.at(i, init[i]) = T(1);
    tab.basis()[i] = init[i];
  }

  int iterations = 0;
  if (num_art > 0) {
    std::vector<T> cost(tab.cols(), T(0));
    for (int j = sf.structural; j < tab.cols(); ++j) cost[j] = T(1);
    tab.set_costs(cost);
    auto res = run_phase(tab, options, iterations);
    if (res == PhaseResult::IterationLimit) {
      sol.status = Status::IterationLimit;
      sol.iterations = iterations;
      return sol;
    }
    T bmax{0};
    for (const auto& v : sf.b) bmax = std::max(bmax, abs_of(v));
    if (tab.objective() > tolerance<T>(options.feasibility_tol) * (T(1) + bmax)) {
      sol.status = Status::Infeasible;
      sol.iterations = iterations;
      return sol;
    }
    const T piv_tol = tolerance<T>(options.pivot_tol);
    for (int r = 0; r < sf.m; ++r) {
      if (!tab.is_artificial(tab.basis()[r])) continue;
      int best = -1;
      T best_abs = piv_tol;
      for (int j = 0; j < sf.structural; ++j) {
        T v = abs_of(tab.at(r, j));
        if (v > best_abs) {
          best = j;
          best_abs = v;
          if constexpr (is_exact_v<T>) break;
        }
      }
      if (best >= 0) tab.pivot(r, best);
    }
  }

  std::vector<T> cost(tab.cols(), T(0));
  std::copy(sf.c.begin(), sf.c.end(), cost.begin());
  tab.set_costs(cost);
  auto res = run_phase(tab, options, iterations);
  sol.iterations = iterations;
  if (res == PhaseResult::IterationLimit) {
    sol.status = Status::IterationLimit;
    return sol;
  }
  if (res == PhaseResult::Unbounded) {
    sol.status = Status::Unbounded;
    return sol;
  }

  std::vector<T> x(tab.cols(), T(0));
  for (int i = 0; i < sf.m; ++i) x[tab.basis()[i]] = tab.rhs()[i];
  std::vector<T> y(sf.m, T(0));
  for (int i = 0; i < sf.m; ++i) {
    for (int k = 0; k < sf.m; ++k) {
      const T& binv = tab.at(k, init[i]);
      if (binv != T(0)) y[i] += cost[tab.basis()[k]] * binv;
    }
  }
  if (options.verify_duality && !verify(sf, x, y, options, sol.message)) {
    sol.status = Status::NumericFailure;
    return sol;
  }

  const bool maximize = program.sense() == Sense::Maximize;
  sol.values.resize(program.num_variables());
  for (int j = 0; j < program.num_variables(); ++j) {
    const auto& map = sf.columns[j];
    T v = map.offset + (map.flipped ? T(-x[map.pos]) : x[map.pos]);
    if (map.neg >= 0) v -= x[map.neg];
    sol.values[j] = v;
  }
  T obj{0};
  for (const auto& term : program.objective()) obj += term.coef * sol.values[term.var];
  sol.objective = obj;
  sol.duals.resize(sf.user_rows);
  for (int i = 0; i < sf.user_rows; ++i) {
    T v = sf.row_sign[i] < 0 ? T(-y[i]) : y[i];
    sol.duals[i] = maximize ? T(-v) : v;
  }
  sol.status = Status::Optimal;
  return sol;
}

template <Scalar T>
void write_lp_format(std::ostream& out, const LinearProgram<T>& program) {
  auto var_name = [&](int j) {
    const auto& n = program.variables()[j].name;
    return n.empty() ? "x" + std::to_string(j) : n;
  };
  auto num = [](const T& v) { return demandsig::to_string(to_double(v)); };
  auto write_terms = [&](const std::vector<Term<T>>& terms) {
    if (terms.empty()) out << " 0 " << var_name(0);
    for (const auto& t : terms) {
      out << (t.coef < T(0) ? " - " : " + ") << num(abs_of(t.coef)) << ' ' << var_name(t.var);
    }
  };
  out << (program.sense() == Sense::Minimize ? "Minimize\n" : "Maximize\n") << " obj:";
  write_terms(program.objective());
  out << "\nSubject To\n";
  for (int i = 0; i < program.num_constraints(); ++i) {
    const auto& c = program.constraints()[i];
    out << ' ' << (c.name.empty() ? "c" + std::to_string(i) : c.name) << ':';
    write_terms(c.terms);
    out << (c.relation == Relation::LessEqual ? " <= "
            : c.relation == Relation::Equal   ? " = "
                                              : " >= ")
        << num(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < program.num_variables(); ++j) {
    const auto& v = program.variables()[j];
    out << ' ' << (v.lower ? num(*v.lower) : "-inf") << " <= " << var_name(j)
        << " <= " << (v.upper ? num(*v.upper) : "+inf") << '\n';
  }
  out << "End\n";
}

template class LinearProgram<double>;
template class LinearProgram<Rational>;
template Solution<double> solve(const LinearProgram<double>&, const Options&);
template Solution<Rational> solve(const LinearProgram<Rational>&, const Options&);
template void write_lp_format(std::ostream&, const LinearProgram<double>&);
template void write_lp_format(std::ostream&, const LinearProgram<Rational>&);

}  // namespace demandsig::lp
