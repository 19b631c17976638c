#pragma once

#include "demandsig/scalar.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace demandsig::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded, NumericFailure, IterationLimit };
enum class PivotRule { Bland, Dantzig };

std::string_view to_string(Status status);

template <Scalar T>
struct Term {
  int var;
  T coef;
};

template <Scalar T>
struct Variable {
  std::string name;
  std::optional<T> lower;
  std::optional<T> upper;
};

template <Scalar T>
struct Constraint {
  std::string name;
  std::vector<Term<T>> terms;
  Relation relation;
  T rhs;
};

template <Scalar T>
class LinearProgram {
 public:
  /// Bounds default to [0, +inf); pass nullopt for an infinite side.
  int add_variable(std::string name, std::optional<T> lower = T(0),
                   std::optional<T> upper = std::nullopt);
  int add_constraint(std::vector<Term<T>> terms, Relation relation, T rhs, std::string name = {});
  void set_objective(Sense sense, std::vector<Term<T>> terms);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const std::vector<Variable<T>>& variables() const { return variables_; }
  const std::vector<Constraint<T>>& constraints() const { return constraints_; }
  Sense sense() const { return sense_; }
  const std::vector<Term<T>>& objective() const { return objective_; }

 private:
  std::vector<Variable<T>> variables_;
  std::vector<Constraint<T>> constraints_;
  std::vector<Term<T>> objective_;
  Sense sense_ = Sense::Minimize;
};

struct Options {
  /// Bland is used regardless in exact arithmetic.
  PivotRule rule = PivotRule::Dantzig;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-10;
  int max_iterations = 200000;
  bool verify_duality = true;
};

template <Scalar T>
struct Solution {
  Status status = Status::NumericFailure;
  std::vector<T> values;
  T objective{0};
  /// One multiplier per constraint, sign convention of the user's sense.
  std::vector<T> duals;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == Status::Optimal; }
};

template <Scalar T>
Solution<T> solve(const LinearProgram<T>& program, const Options& options = {});

/// CPLEX LP text format, useful for cross-checking with external solvers.
template <Scalar T>
void write_lp_format(std::ostream& out, const LinearProgram<T>& program);

}  // namespace demandsig::lp
