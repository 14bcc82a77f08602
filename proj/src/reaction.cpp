#include "rdc/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "rdc/errors.hpp"
#include "rdc/numerics.hpp"

namespace rdc {

namespace {

constexpr int kSampleCount = 10000;
constexpr double kEndpointTol = 1e-12;
// F(1) values this close to zero are treated as the balanced case F(1) = 0.
constexpr double kBalancedTol = 1e-14;

std::string describe(double y, double value) {
  std::ostringstream os;
  os.precision(6);
  os << "f(" << y << ") = " << value;
  return os.str();
}

}  // namespace

ReactionModel ReactionModel::logistic() {
  return build([](double y) { return y * (1.0 - y); }, [](double y) { return 1.0 - 2.0 * y; },
               [](double y) { return y * y * (0.5 - y / 3.0); }, std::nullopt, "logistic");
}

ReactionModel ReactionModel::cubic(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ModelError("cubic: theta must lie in (0, 1)");
  }
  auto f = [theta](double y) { return y * (1.0 - y) * (y - theta); };
  auto fp = [theta](double y) { return -3.0 * y * y + 2.0 * (1.0 + theta) * y - theta; };
  auto prim = [theta](double y) {
    return y * y * (-0.25 * y * y + (1.0 + theta) * y / 3.0 - 0.5 * theta);
  };
  std::ostringstream name;
  name.precision(10);
  name << "cubic(theta=" << theta << ")";
  return build(f, fp, prim, theta, name.str());
}

ReactionModel ReactionModel::classify(std::function<double(double)> f,
                                      std::function<double(double)> f_prime,
                                      std::optional<double> theta_hint, std::string name) {
  return build(std::move(f), std::move(f_prime), nullptr, theta_hint, std::move(name));
}

ReactionModel ReactionModel::build(std::function<double(double)> f,
                                   std::function<double(double)> f_prime,
                                   std::function<double(double)> primitive,
                                   std::optional<double> theta_hint, std::string name) {
  ReactionModel m;
  m.name_ = std::move(name);
  m.f_ = std::move(f);
  m.f_prime_ = std::move(f_prime);
  m.primitive_ = std::move(primitive);

  if (std::abs(m.f_(0.0)) > kEndpointTol || std::abs(m.f_(1.0)) > kEndpointTol) {
    throw ModelError("f must vanish at 0 and 1: " + describe(0.0, m.f_(0.0)) + ", " +
                     describe(1.0, m.f_(1.0)));
  }

  // Sign pattern on the interior sample grid.
  int first_positive = -1;
  bool monostable = true;
  bool bistable = true;
  for (int i = 1; i < kSampleCount; ++i) {
    const double y = static_cast<double>(i) / kSampleCount;
    const double v = m.f_(y);
    if (v <= 0.0) monostable = false;
    if (first_positive < 0) {
      if (v > 0.0) {
        first_positive = i;
      } else if (v == 0.0 && i == 1) {
        bistable = false;
      }
    } else if (v <= 0.0) {
      bistable = false;
    }
  }
  if (first_positive <= 1) bistable = false;

  if (monostable) {
    m.kind_ = ReactionKind::Monostable;
    if (!(m.f_prime_(0.0) > 0.0)) {
      throw ModelError("monostable f requires f'(0) > 0");
    }
  } else if (bistable) {
    m.kind_ = ReactionKind::Bistable;
    if (!(m.f_prime_(0.0) < 0.0) || !(m.f_prime_(1.0) < 0.0)) {
      throw ModelError("bistable f requires f'(0) < 0 and f'(1) < 0");
    }
    const double lo = static_cast<double>(first_positive - 1) / kSampleCount;
    const double hi = static_cast<double>(first_positive) / kSampleCount;
    if (theta_hint && *theta_hint >= lo && *theta_hint <= hi && m.f_(*theta_hint) == 0.0) {
      m.theta_ = *theta_hint;
    } else {
      m.theta_ = numerics::bisect_root(m.f_, lo, hi, 1e-16);
    }
  } else {
    throw ModelError(
        "f is neither monostable (f > 0 on (0,1)) nor bistable (f < 0 on (0,theta), f > 0 on "
        "(theta,1)) on the sample grid");
  }

  const double F1 = m.primitive(1.0);
  if (F1 < -kBalancedTol) {
    std::ostringstream os;
    os << "F(1) = " << F1 << " < 0; substitute z = 1 - y to obtain a model with F(1) >= 0";
    throw ModelError(os.str());
  }
  m.F1_ = std::abs(F1) <= kBalancedTol ? 0.0 : F1;

  if (m.kind_ == ReactionKind::Bistable) {
    if (m.F1_ == 0.0) {
      m.theta1_ = 1.0;
    } else {
      m.theta1_ = numerics::safeguarded_newton([&m](double y) { return m.primitive(y); }, m.f_,
                                               m.theta_, 1.0, 1e-15);
      if (std::abs(m.primitive(m.theta1_)) > 1e-10 || !(m.theta1_ > m.theta_)) {
        throw NumericalError("could not locate the zero of F on (theta, 1]");
      }
    }
  }

  double lip = 0.0;
  double min_fp = m.f_prime_(0.0);
  for (int i = 0; i <= kSampleCount; ++i) {
    const double fp = m.f_prime_(static_cast<double>(i) / kSampleCount);
    lip = std::max(lip, std::abs(fp));
    min_fp = std::min(min_fp, fp);
  }
  m.lipschitz_ = lip;
  m.min_f_prime_ = min_fp;
  return m;
}

double ReactionModel::theta() const {
  if (kind_ != ReactionKind::Bistable) throw KindError("theta is defined for bistable models only");
  return theta_;
}

double ReactionModel::theta1() const {
  if (kind_ != ReactionKind::Bistable) {
    throw KindError("theta1 is defined for bistable models only");
  }
  return theta1_;
}

double ReactionModel::primitive(double y) const {
  if (primitive_) return primitive_(y);
  if (y == 0.0) return 0.0;
  return numerics::integrate(f_, 0.0, y, 1e-13);
}

double big_f(const ReactionModel& model, double y) {
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("big_f: y must lie in [0, 1]");
  return model.primitive(y);
}

double f_inverse_upper(const ReactionModel& model, double alpha) {
  const double F1 = model.F1();
  if (!(alpha >= 0.0 && alpha <= F1)) {
    throw DomainError("f_inverse_upper: alpha must lie in [0, F(1)]");
  }
  const double lo = model.branch_floor();
  if (alpha == 0.0) return lo;
  if (alpha == F1) return 1.0;
  auto residual = [&model, alpha](double y) { return model.primitive(y) - alpha; };
  auto slope = [&model](double y) { return model.f(y); };
  return numerics::safeguarded_newton(residual, slope, lo, 1.0, 1e-13);
}

ReactionModel classify(std::function<double(double)> f, std::function<double(double)> f_prime,
                       std::optional<double> theta_hint) {
  return ReactionModel::classify(std::move(f), std::move(f_prime), theta_hint);
}

}  // namespace rdc
