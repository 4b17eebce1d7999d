#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "bgpolymer/distributions.hpp"
#include "bgpolymer/errors.hpp"
#include "bgpolymer/involution.hpp"

namespace bgpolymer {

/// The four basic beta-gamma models, named by their bulk weight law.
enum class BasicModel { LogGamma, StrictWeak, Beta, InverseBeta };

inline std::string_view basic_model_name(BasicModel m) {
  switch (m) {
    case BasicModel::LogGamma: return "log-gamma";
    case BasicModel::StrictWeak: return "strict-weak";
    case BasicModel::Beta: return "beta";
    case BasicModel::InverseBeta: return "inverse-beta";
  }
  return "?";
}

inline std::optional<BasicModel> parse_basic_model(std::string_view name) {
  for (BasicModel m : {BasicModel::LogGamma, BasicModel::StrictWeak, BasicModel::Beta,
                       BasicModel::InverseBeta}) {
    if (basic_model_name(m) == name) return m;
  }
  return std::nullopt;
}

/// (a, b) of h for each basic model: y, 1, 1 - y, y - 1.
inline std::pair<double, double> basic_h(BasicModel m) {
  switch (m) {
    case BasicModel::LogGamma: return {0.0, 1.0};
    case BasicModel::StrictWeak: return {1.0, 0.0};
    case BasicModel::Beta: return {1.0, -1.0};
    case BasicModel::InverseBeta: return {-1.0, 1.0};
  }
  return {0.0, 0.0};
}

/// Regions of the (a, b) plane.
enum class ModelCase { IG, G, B, BReflected, IB, IBReflected, Invalid };

inline std::string_view case_tag(ModelCase c) {
  switch (c) {
    case ModelCase::IG: return "IG";
    case ModelCase::G: return "G";
    case ModelCase::B: return "B";
    case ModelCase::BReflected: return "B-reflected";
    case ModelCase::IB: return "IB";
    case ModelCase::IBReflected: return "IB-reflected";
    case ModelCase::Invalid: return "invalid";
  }
  return "?";
}

inline std::string_view case_description(ModelCase c) {
  switch (c) {
    case ModelCase::IG: return "IG (log-gamma)";
    case ModelCase::G: return "G (strict-weak)";
    case ModelCase::B: return "B (beta)";
    case ModelCase::BReflected: return "B-reflected (beta, D- branch)";
    case ModelCase::IB: return "IB (inverse-beta)";
    case ModelCase::IBReflected: return "IB-reflected";
    case ModelCase::Invalid: return "invalid: not allowed region";
  }
  return "?";
}

/// Basic model a case reduces to by scaling (and, for the reflected cases, reflection).
inline BasicModel underlying_basic_model(ModelCase c) {
  switch (c) {
    case ModelCase::IG: return BasicModel::LogGamma;
    case ModelCase::G: return BasicModel::StrictWeak;
    case ModelCase::B:
    case ModelCase::BReflected: return BasicModel::Beta;
    case ModelCase::IB:
    case ModelCase::IBReflected: return BasicModel::InverseBeta;
    case ModelCase::Invalid: break;
  }
  throw ParameterError("invalid (a, b) region has no underlying model");
}

/*
 * Which case of the linear-h classification (a, b) falls in. `reflected`
 * selects the D^- alternative in the beta quadrant and is ignored elsewhere.
 */
inline ModelCase classify(double a, double b, bool reflected = false) {
  if (a == 0.0 && b > 0.0) return ModelCase::IG;
  if (a > 0.0 && b == 0.0) return ModelCase::G;
  if (a > 0.0 && b < 0.0) return reflected ? ModelCase::BReflected : ModelCase::B;
  if (a < 0.0 && b > 0.0) return ModelCase::IB;
  if (a > 0.0 && b > 0.0) return ModelCase::IBReflected;
  return ModelCase::Invalid;
}

struct StationaryTriple {
  AffineLaw r1;
  AffineLaw r2;
  AffineLaw y;

  bool operator==(const StationaryTriple&) const = default;
};

/// A triple together with the h it is invariant for, and the D^{+/-} branch its supports lie in.
struct InvariantModel {
  StationaryTriple triple;
  LinearH h;
  DomainSign sign = DomainSign::plus;

  DomainSpec domain() const { return {sign, h.a, h.b}; }
};

struct ModelSpec {
  double a = 0.0;
  double b = 1.0;
  double mu = 2.0;
  double lambda = 1.0;
  double beta = 1.0;
  bool reflected = false;

  ModelCase model_case() const { return classify(a, b, reflected); }

  /// Throws ParameterError unless the spec describes an invariant model.
  void validate() const {
    const ModelCase c = model_case();
    std::ostringstream msg;
    if (c == ModelCase::Invalid) {
      msg << "(a, b) = (" << a << ", " << b << ") lies in the not-allowed region";
      throw ParameterError(msg.str());
    }
    if (!(mu > 0.0) || !(lambda > 0.0) || !(beta > 0.0)) {
      msg << "mu, lambda, beta must be positive, got (" << mu << ", " << lambda << ", " << beta << ")";
      throw ParameterError(msg.str());
    }
    const BasicModel basic = underlying_basic_model(c);
    if ((basic == BasicModel::LogGamma || basic == BasicModel::InverseBeta) && !(mu > lambda)) {
      msg << basic_model_name(basic) << " needs mu > lambda, got mu = " << mu
          << ", lambda = " << lambda;
      throw ParameterError(msg.str());
    }
  }

  bool operator==(const ModelSpec&) const = default;
};

/// Default (mu, lambda, beta): (2, 1, 1) where mu > lambda is required, (1, 1, 1) otherwise.
inline std::array<double, 3> default_parameters(BasicModel m) {
  if (m == BasicModel::LogGamma || m == BasicModel::InverseBeta) return {2.0, 1.0, 1.0};
  return {1.0, 1.0, 1.0};
}

inline ModelSpec preset(BasicModel m) {
  const auto [a, b] = basic_h(m);
  const auto p = default_parameters(m);
  return {a, b, p[0], p[1], p[2], false};
}

inline ModelSpec preset(BasicModel m, double mu, double lambda, double beta) {
  const auto [a, b] = basic_h(m);
  return {a, b, mu, lambda, beta, false};
}

/// The stationary triple of a basic model.
inline StationaryTriple basic_triple(BasicModel m, double mu, double lambda, double beta) {
  preset(m, mu, lambda, beta).validate();
  using D = DistributionSpec;
  switch (m) {
    case BasicModel::LogGamma:
      return {D::inverse_gamma(mu - lambda, beta), D::inverse_gamma(lambda, beta),
              D::inverse_gamma(mu, beta)};
    case BasicModel::StrictWeak:
      return {D::gamma(mu + lambda, beta), D::inverse_beta(lambda, mu), D::gamma(mu, beta)};
    case BasicModel::Beta:
      return {D::beta(mu + lambda, beta), D::inverse_beta(lambda, mu), D::beta(mu, beta)};
    case BasicModel::InverseBeta:
      return {D::inverse_beta(mu - lambda, beta),
              D::shifted_inverse_beta(lambda, beta + mu - lambda), D::inverse_beta(mu, beta)};
  }
  throw ParameterError("unknown basic model");
}

/*
 * Triple for general (a, b), obtained by undoing the affine change of
 * coordinates that carries it onto a basic model. With (mu, lambda, beta)
 * the basic-model parameters:
 *   IG  (a = 0 < b):  (R1, R2/b, Y)                 ~ log-gamma
 *   G   (b = 0 < a):  (R1, R2/a, Y)                 ~ strict-weak
 *   B   (b < 0 < a):  (-b/a R1, R2/a, -b/a Y)       ~ beta
 *   B, D- branch:     (R2/a, -b/a R1, 1 + b/a Y)    ~ beta
 *   IB  (a < 0 < b):  (-b/a R1, -R2/a, -b/a Y)      ~ inverse-beta
 *   a, b > 0:         (R2/a, b/a R1, 1 + b/a Y)     ~ inverse-beta
 */
inline StationaryTriple stationary_triple(const ModelSpec& spec) {
  spec.validate();
  const double a = spec.a;
  const double b = spec.b;
  const StationaryTriple basic =
      basic_triple(underlying_basic_model(spec.model_case()), spec.mu, spec.lambda, spec.beta);
  switch (spec.model_case()) {
    case ModelCase::IG: return {basic.r1, basic.r2.then(b), basic.y};
    case ModelCase::G: return {basic.r1, basic.r2.then(a), basic.y};
    case ModelCase::B: {
      const double c = a / -b;
      return {basic.r1.then(c), basic.r2.then(a), basic.y.then(c)};
    }
    case ModelCase::BReflected: {
      const double c = a / -b;
      // Y = c (1 - Be(mu, beta)) = c Be(beta, mu)
      return {basic.r2.then(c), basic.r1.then(a),
              AffineLaw(DistributionSpec::beta(spec.beta, spec.mu), c)};
    }
    case ModelCase::IB: {
      const double c = -a / b;
      return {basic.r1.then(c), basic.r2.then(-a), basic.y.then(c)};
    }
    case ModelCase::IBReflected: {
      const double c = a / b;
      return {basic.r2.then(c), basic.r1.then(a),
              AffineLaw(DistributionSpec::shifted_inverse_beta(spec.mu, spec.beta), c)};
    }
    case ModelCase::Invalid: break;
  }
  throw ParameterError("invalid model");
}

inline InvariantModel invariant_model(const ModelSpec& spec) {
  return {stationary_triple(spec), LinearH{spec.a, spec.b},
          spec.model_case() == ModelCase::BReflected ? DomainSign::minus : DomainSign::plus};
}

/// Forward affine map from a point of the spec's model to basic-model coordinates.
inline InvolutionPoint to_basic_coordinates(const ModelSpec& spec, const InvolutionPoint& p) {
  const double a = spec.a;
  const double b = spec.b;
  switch (spec.model_case()) {
    case ModelCase::IG: return {p.r1, p.r2 / b, p.y};
    case ModelCase::G: return {p.r1, p.r2 / a, p.y};
    case ModelCase::B: return {-b / a * p.r1, p.r2 / a, -b / a * p.y};
    case ModelCase::BReflected: return {p.r2 / a, -b / a * p.r1, 1.0 + b / a * p.y};
    case ModelCase::IB: return {-b / a * p.r1, -p.r2 / a, -b / a * p.y};
    case ModelCase::IBReflected: return {p.r2 / a, b / a * p.r1, 1.0 + b / a * p.y};
    case ModelCase::Invalid: break;
  }
  throw ParameterError("invalid model");
}

/// (a, b) after reflection: h -> h^{-1}.
inline std::pair<double, double> reflect_parameters(double a, double b) {
  if (b == 0.0) throw ParameterError("reflection needs an invertible h (b != 0)");
  return {-a / b, 1.0 / b};
}

/// (a, b) after scaling: h -> c2 h(y / c1).
inline std::pair<double, double> scale_parameters(double a, double b, double c1, double c2) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ParameterError("scaling constants must be positive");
  return {a * c2, b * c2 / c1};
}

/// Reflection: swap the axes. (R1, R2, Y) -> (R2, R1, h(Y)), h -> h^{-1}.
/// Assumes the input lies in D^+; use the InvariantModel overload otherwise.
inline InvariantModel reflect(const StationaryTriple& triple, const LinearH& h) {
  const auto [a, b] = reflect_parameters(h.a, h.b);
  const DomainSign sign = h.b < 0.0 ? DomainSign::minus : DomainSign::plus;
  return {{triple.r2, triple.r1, triple.y.then(h.b, h.a)}, LinearH{a, b}, sign};
}

inline InvariantModel reflect(const InvariantModel& m) {
  InvariantModel out = reflect(m.triple, m.h);
  // For decreasing h the swap exchanges the D^+ and D^- branches.
  const DomainSign flipped = m.sign == DomainSign::plus ? DomainSign::minus : DomainSign::plus;
  out.sign = m.h.b < 0.0 ? flipped : m.sign;
  return out;
}

/// Scaling: (R1, R2, Y) -> (c1 R1, c2 R2, c1 Y), h -> c2 h(. / c1).
inline InvariantModel scale(const StationaryTriple& triple, const LinearH& h, double c1, double c2) {
  const auto [a, b] = scale_parameters(h.a, h.b, c1, c2);
  return {{triple.r1.then(c1), triple.r2.then(c2), triple.y.then(c1)}, LinearH{a, b}};
}

inline InvariantModel scale(const InvariantModel& m, double c1, double c2) {
  InvariantModel out = scale(m.triple, m.h, c1, c2);
  out.sign = m.sign;
  return out;
}

/*
 * Scaling constants (c1, c2) that carry (a, b) onto the canonical point of its
 * region: (0,1), (1,0), (1,-1), (-1,1) or (1,1).
 */
inline std::pair<double, double> canonical_scaling(double a, double b) {
  switch (classify(a, b)) {
    case ModelCase::IG: return {1.0, 1.0 / b};
    case ModelCase::G: return {1.0, 1.0 / a};
    case ModelCase::B:
    case ModelCase::BReflected: return {-b / a, 1.0 / a};
    case ModelCase::IB: return {-b / a, -1.0 / a};
    case ModelCase::IBReflected: return {b / a, 1.0 / a};
    case ModelCase::Invalid: break;
  }
  throw ParameterError("invalid (a, b) region has no canonical scaling");
}

inline std::string describe(const StationaryTriple& t) {
  return "(" + t.r1.to_string() + ", " + t.r2.to_string() + ", " + t.y.to_string() + ")";
}

}  // namespace bgpolymer
