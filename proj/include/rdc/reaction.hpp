#pragma once

#include <functional>
#include <optional>
#include <string>

namespace rdc {

enum class ReactionKind { Monostable, Bistable };

/// Reaction term f and its derivative as plain callables. This is all the
/// PDE solvers need; ReactionModel adds the classification on top.
struct ReactionTerm {
  std::function<double(double)> f;
  std::function<double(double)> df;
};

/// A validated reaction nonlinearity f on [0, 1] with f(0) = f(1) = 0.
///
/// Monostable: f > 0 on (0, 1) and f'(0) > 0.
/// Bistable: f < 0 on (0, theta), f > 0 on (theta, 1), f'(0) < 0, f'(1) < 0.
/// In both cases F(1) = int_0^1 f >= 0 is required.
///
/// Instances are immutable and cheap to copy.
class ReactionModel {
 public:
  /// f(y) = y (1 - y)
  static ReactionModel logistic();
  /// f(y) = y (1 - y) (y - theta), theta in (0, 1/2].
  static ReactionModel cubic(double theta);

  /// Builds a model from an arbitrary f with analytic derivative. The
  /// primitive is computed by adaptive quadrature.
  static ReactionModel classify(std::function<double(double)> f,
                                std::function<double(double)> f_prime,
                                std::optional<double> theta_hint = std::nullopt,
                                std::string name = "custom");

  ReactionKind kind() const { return kind_; }
  bool bistable() const { return kind_ == ReactionKind::Bistable; }
  const std::string& name() const { return name_; }

  double f(double y) const { return f_(y); }
  double f_prime(double y) const { return f_prime_(y); }

  /// Interior zero of f. Throws KindError for monostable models.
  double theta() const;
  /// Zero of F on (theta, 1]; 1 when F(1) = 0. Throws KindError for
  /// monostable models.
  double theta1() const;
  double F1() const { return F1_; }

  /// Lower end of the increasing branch of F used by f_inverse_upper:
  /// 0 for monostable models, theta1 for bistable ones.
  double branch_floor() const { return kind_ == ReactionKind::Bistable ? theta1_ : 0.0; }

  /// sup |f'| and inf f' on a dense sample of [0, 1].
  double lipschitz() const { return lipschitz_; }
  double min_f_prime() const { return min_f_prime_; }

  bool has_closed_form_primitive() const { return static_cast<bool>(primitive_); }

  ReactionTerm term() const { return {f_, f_prime_}; }

  double primitive(double y) const;

 private:
  ReactionModel() = default;

  static ReactionModel build(std::function<double(double)> f,
                             std::function<double(double)> f_prime,
                             std::function<double(double)> primitive,
                             std::optional<double> theta_hint, std::string name);

  ReactionKind kind_ = ReactionKind::Monostable;
  std::string name_;
  std::function<double(double)> f_;
  std::function<double(double)> f_prime_;
  std::function<double(double)> primitive_;
  double theta_ = 0.0;
  double theta1_ = 1.0;
  double F1_ = 0.0;
  double lipschitz_ = 0.0;
  double min_f_prime_ = 0.0;
};

/// F(y) = int_0^y f. Exact for the built-in polynomials, adaptive
/// quadrature (relative tolerance 1e-12) otherwise. DomainError if y is
/// outside [0, 1].
double big_f(const ReactionModel& model, double y);

/// Inverse of F on its increasing branch ([0, 1] monostable, [theta1, 1]
/// bistable). DomainError unless 0 <= alpha <= F(1).
double f_inverse_upper(const ReactionModel& model, double alpha);

/// Free-function spelling of ReactionModel::classify.
ReactionModel classify(std::function<double(double)> f, std::function<double(double)> f_prime,
                       std::optional<double> theta_hint = std::nullopt);

}  // namespace rdc
