#include "pco/rise_function.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "pco/error.hpp"

namespace pco {

std::string_view to_string(RiseFamily family) {
  switch (family) {
    case RiseFamily::Ub: return "ub";
    case RiseFamily::LIF: return "lif";
    case RiseFamily::LIFConductance: return "lif_cb";
    case RiseFamily::QIF: return "qif";
    case RiseFamily::QIFConductance: return "qif_cb";
    case RiseFamily::Identity: return "identity";
    case RiseFamily::Custom: return "custom";
  }
  return "unknown";
}

RiseFunction::RiseFunction(RiseFamily family, RiseParams params,
                           std::shared_ptr<const Shape> shape, std::string name)
    : family_(family), params_(params), shape_(std::move(shape)), name_(std::move(name)) {}

namespace {

class IdentityShape final : public RiseFunction::Shape {
 public:
  double value(double phi) const override { return phi; }
  double inverse(double u) const override { return u; }
  double d1(double) const override { return 1.0; }
  double d2(double) const override { return 0.0; }
  double d3(double) const override { return 0.0; }
};

// With m = e^b - 1 and g = 1 + m phi:
//   U = ln(g)/b, U' = m/(b g), U'' = -m^2/(b g^2), U''' = 2 m^3/(b g^3).
class UbShape final : public RiseFunction::Shape {
 public:
  explicit UbShape(double b) : b_(b), m_(std::expm1(b)) {}
  double value(double phi) const override { return std::log1p(m_ * phi) / b_; }
  double inverse(double u) const override { return std::expm1(b_ * u) / m_; }
  double d1(double phi) const override { return m_ / (b_ * g(phi)); }
  double d2(double phi) const override {
    const double gg = g(phi);
    return -m_ * m_ / (b_ * gg * gg);
  }
  double d3(double phi) const override {
    const double gg = g(phi);
    return 2.0 * m_ * m_ * m_ / (b_ * gg * gg * gg);
  }

 private:
  double g(double phi) const { return 1.0 + m_ * phi; }
  double b_;
  double m_;
};

// rate = g_l * T_LIF = -ln(1 - 1/E_eq); g_l drops out after normalization.
class LifShape final : public RiseFunction::Shape {
 public:
  explicit LifShape(double e_eq) : e_(e_eq), rate_(-std::log1p(-1.0 / e_eq)) {}
  double value(double phi) const override { return -e_ * std::expm1(-rate_ * phi); }
  double inverse(double u) const override { return -std::log1p(-u / e_) / rate_; }
  double d1(double phi) const override { return e_ * rate_ * std::exp(-rate_ * phi); }
  double d2(double phi) const override { return -e_ * rate_ * rate_ * std::exp(-rate_ * phi); }
  double d3(double phi) const override {
    return e_ * rate_ * rate_ * rate_ * std::exp(-rate_ * phi);
  }

 private:
  double e_;
  double rate_;
};

// theta(phi) = atan(alpha) - phi * span, t = tan(theta):
//   U = (alpha - t)/(alpha - beta), U' = span (1 + t^2)/(alpha - beta),
//   U'' = -2 span^2 t (1 + t^2)/(alpha - beta),
//   U''' = 2 span^3 (1 + t^2)(1 + 3 t^2)/(alpha - beta).
class QifShape final : public RiseFunction::Shape {
 public:
  QifShape(double alpha, double beta)
      : alpha_(alpha),
        width_(alpha - beta),
        top_(std::atan(alpha)),
        span_(std::atan(alpha) - std::atan(beta)) {}
  double value(double phi) const override { return (alpha_ - t(phi)) / width_; }
  double inverse(double u) const override {
    return (top_ - std::atan(alpha_ - u * width_)) / span_;
  }
  double d1(double phi) const override {
    const double tt = t(phi);
    return span_ * (1.0 + tt * tt) / width_;
  }
  double d2(double phi) const override {
    const double tt = t(phi);
    return -2.0 * span_ * span_ * tt * (1.0 + tt * tt) / width_;
  }
  double d3(double phi) const override {
    const double tt = t(phi);
    return 2.0 * span_ * span_ * span_ * (1.0 + tt * tt) * (1.0 + 3.0 * tt * tt) / width_;
  }

 private:
  double t(double phi) const { return std::tan(top_ - phi * span_); }
  double alpha_;
  double width_;
  double top_;
  double span_;
};

// V = ln(w)/L with w = 1 - U/E and L = ln(1 - 1/E). Writing f = ln(w):
//   f'   = -U'/(E w)
//   f''  = -U''/(E w) - U'^2/(E w)^2
//   f''' = -U'''/(E w) - 3 U' U''/(E w)^2 - 2 U'^3/(E w)^3
class ConductanceShape final : public RiseFunction::Shape {
 public:
  ConductanceShape(RiseFunction base, double e_syn)
      : base_(std::move(base)), e_(e_syn), log_norm_(std::log1p(-1.0 / e_syn)) {}
  double value(double phi) const override {
    return std::log1p(-base_(phi) / e_) / log_norm_;
  }
  double inverse(double v) const override {
    return base_.inverse(-e_ * std::expm1(log_norm_ * v));
  }
  double d1(double phi) const override {
    const double ew = scaled_w(phi);
    return -base_.d1(phi) / ew / log_norm_;
  }
  double d2(double phi) const override {
    const double ew = scaled_w(phi);
    const double u1 = base_.d1(phi);
    return (-base_.d2(phi) / ew - u1 * u1 / (ew * ew)) / log_norm_;
  }
  double d3(double phi) const override {
    const double ew = scaled_w(phi);
    const double u1 = base_.d1(phi);
    const double u2 = base_.d2(phi);
    return (-base_.d3(phi) / ew - 3.0 * u1 * u2 / (ew * ew) - 2.0 * u1 * u1 * u1 / (ew * ew * ew)) /
           log_norm_;
  }

 private:
  double scaled_w(double phi) const { return e_ - base_(phi); }
  RiseFunction base_;
  double e_;
  double log_norm_;
};

class CustomShape final : public RiseFunction::Shape {
 public:
  explicit CustomShape(CustomRiseOps ops) : ops_(std::move(ops)) {}
  double value(double phi) const override { return ops_.value(phi); }
  double inverse(double u) const override { return ops_.inverse(u); }
  double d1(double phi) const override { return ops_.d1(phi); }
  double d2(double phi) const override { return ops_.d2(phi); }
  double d3(double phi) const override { return ops_.d3(phi); }

 private:
  CustomRiseOps ops_;
};

std::string format_name(std::string_view family, std::initializer_list<std::pair<const char*, double>> args) {
  std::ostringstream os;
  os << family << '(';
  bool first = true;
  for (const auto& [key, value] : args) {
    if (!first) os << ", ";
    os << key << '=' << value;
    first = false;
  }
  os << ')';
  return os.str();
}

}  // namespace

RiseFunction make_identity() {
  return RiseFunction(RiseFamily::Identity, RiseParams{}, std::make_shared<IdentityShape>(),
                      "identity");
}

RiseFunction make_ub(double b) {
  if (!std::isfinite(b) || b == 0.0) {
    throw ParameterError("U_b requires a finite b != 0 (use the identity rise function for b = 0)");
  }
  RiseParams p;
  p.b = b;
  return RiseFunction(RiseFamily::Ub, p, std::make_shared<UbShape>(b), format_name("ub", {{"b", b}}));
}

RiseFunction make_lif(double e_eq, double g_l) {
  if (!(e_eq > 1.0) || !std::isfinite(e_eq)) throw ParameterError("LIF requires E_eq > 1");
  if (!(g_l > 0.0) || !std::isfinite(g_l)) throw ParameterError("LIF requires g_l > 0");
  RiseParams p;
  p.e_eq = e_eq;
  p.g_l = g_l;
  p.t_lif = -std::log1p(-1.0 / e_eq) / g_l;
  return RiseFunction(RiseFamily::LIF, p, std::make_shared<LifShape>(e_eq),
                      format_name("lif", {{"e_eq", e_eq}, {"g_l", g_l}}));
}

RiseFunction make_qif(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta <= 0.0) || !(alpha > beta) || !std::isfinite(alpha) ||
      !std::isfinite(beta)) {
    throw ParameterError("QIF requires alpha >= 0, beta <= 0 and alpha > beta");
  }
  RiseParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = 2.0 / (alpha - beta);
  return RiseFunction(RiseFamily::QIF, p, std::make_shared<QifShape>(alpha, beta),
                      format_name("qif", {{"alpha", alpha}, {"beta", beta}}));
}

RiseFunction to_conductance_based(const RiseFunction& base, double e_syn) {
  if (!(e_syn > 1.0) || !std::isfinite(e_syn)) {
    throw ParameterError("conductance-based transform requires E_syn > 1");
  }
  RiseFamily family = RiseFamily::Custom;
  if (base.family() == RiseFamily::LIF) family = RiseFamily::LIFConductance;
  if (base.family() == RiseFamily::QIF) family = RiseFamily::QIFConductance;
  RiseParams p = base.params();
  p.e_syn = e_syn;
  std::ostringstream name;
  name << "cb(" << base.name() << ", e_syn=" << e_syn << ')';
  return RiseFunction(family, p, std::make_shared<ConductanceShape>(base, e_syn), name.str());
}

RiseFunction make_custom(std::string name, CustomRiseOps ops) {
  if (!ops.value || !ops.inverse || !ops.d1 || !ops.d2 || !ops.d3) {
    throw ParameterError("custom rise function needs value, inverse and three derivatives");
  }
  if (std::abs(ops.value(0.0)) > 1e-9 || std::abs(ops.value(1.0) - 1.0) > 1e-9) {
    throw ParameterError("custom rise function must satisfy U(0) = 0 and U(1) = 1");
  }
  for (int k = 0; k <= 1000; ++k) {
    if (!(ops.d1(k / 1000.0) > 0.0)) {
      throw ParameterError("custom rise function must be strictly increasing on [0, 1]");
    }
  }
  return RiseFunction(RiseFamily::Custom, RiseParams{}, std::make_shared<CustomShape>(std::move(ops)),
                      std::move(name));
}

}  // namespace pco
