#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace pco {

enum class RiseFamily { Ub, LIF, LIFConductance, QIF, QIFConductance, Identity, Custom };

std::string_view to_string(RiseFamily family);

// Family parameters. Only the fields relevant to the family are meaningful.
struct RiseParams {
  double b = 0.0;       // U_b curvature
  double e_eq = 0.0;    // LIF equilibrium potential (> 1)
  double g_l = 1.0;     // LIF leak conductance (> 0)
  double e_syn = 0.0;   // synaptic reversal potential of the conductance transform, 0 if unused
  double alpha = 0.0;   // QIF, >= 0
  double beta = 0.0;    // QIF, <= 0
  double t_lif = 0.0;   // derived: free period of the LIF neuron before rescaling
  double gamma = 0.0;   // derived: QIF scale, 2 / (alpha - beta)
};

// A rise function U maps phase to potential on [0, 1] with U(0) = 0,
// U(1) = 1 and U' > 0. Instances are immutable and cheap to copy.
//
// evaluate/inverse are defined on an extended range outside [0, 1] where
// the closed form permits it; the root finders rely on that. Callers that
// need the strict domain go through the interaction maps in core.hpp.
class RiseFunction {
 public:
  class Shape {
   public:
    virtual ~Shape() = default;
    virtual double value(double phi) const = 0;
    virtual double inverse(double u) const = 0;
    virtual double d1(double phi) const = 0;
    virtual double d2(double phi) const = 0;
    virtual double d3(double phi) const = 0;
  };

  RiseFunction(RiseFamily family, RiseParams params, std::shared_ptr<const Shape> shape,
               std::string name);

  double operator()(double phi) const { return shape_->value(phi); }
  double evaluate(double phi) const { return shape_->value(phi); }
  double inverse(double u) const { return shape_->inverse(u); }
  double d1(double phi) const { return shape_->d1(phi); }
  double d2(double phi) const { return shape_->d2(phi); }
  double d3(double phi) const { return shape_->d3(phi); }

  RiseFamily family() const { return family_; }
  const RiseParams& params() const { return params_; }
  const std::string& name() const { return name_; }

 private:
  RiseFamily family_;
  RiseParams params_;
  std::shared_ptr<const Shape> shape_;
  std::string name_;
};

RiseFunction make_identity();

// U_b(phi) = ln(1 + (e^b - 1) phi) / b. Convex for b < 0, concave for b > 0.
RiseFunction make_ub(double b);

// U(phi) = E_eq (1 - exp(-g_l T phi)) with T = -ln(1 - 1/E_eq) / g_l.
RiseFunction make_lif(double e_eq, double g_l = 1.0);

// U(phi) = [alpha - tan(atan(alpha) - phi (atan(alpha) - atan(beta)))] / (alpha - beta).
RiseFunction make_qif(double alpha, double beta);

// U_CB(phi) = ln(1 - U(phi)/E_syn) / ln(1 - 1/E_syn).
RiseFunction to_conductance_based(const RiseFunction& base, double e_syn);

struct CustomRiseOps {
  std::function<double(double)> value;
  std::function<double(double)> inverse;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> d3;
};

// Wraps user supplied callables. Normalization and monotonicity are checked
// on a grid at construction.
RiseFunction make_custom(std::string name, CustomRiseOps ops);

}  // namespace pco
