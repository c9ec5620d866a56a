#pragma once

#include "modlab/common.hpp"

#include <memory>
#include <optional>
#include <utility>

namespace modlab {

// Strictly positive weight on R^n (space) or R^{2n} (phase space).
// Evaluation goes through log_* so that products like |F|^p * v can be
// assembled in the exponent without intermediate overflow.
class Weight {
 public:
  enum class Domain { space, phase_space };
  enum class Form { constant, exp_power, poly, product, table };

  static Weight constant(Real c) {
    if (!(c > 0)) throw std::invalid_argument("weight: constant must be > 0");
    Weight w;
    w.form_ = Form::constant;
    w.a_ = std::log(c);
    return w;
  }
  // e^{c |x|^beta}
  static Weight exp_power(Real c, Real beta) {
    if (!(beta > 0)) throw std::invalid_argument("weight: beta must be > 0");
    Weight w;
    w.form_ = Form::exp_power;
    w.a_ = c;
    w.b_ = beta;
    return w;
  }
  // (1 + |x|^2)^{s/2}
  static Weight poly(Real s) {
    Weight w;
    w.form_ = Form::poly;
    w.a_ = s;
    return w;
  }
  // v(x, xi) = wx(x) * wxi(xi); only this form lives on phase space.
  static Weight product(Weight wx, Weight wxi) {
    if (wx.form_ == Form::product || wxi.form_ == Form::product)
      throw std::invalid_argument("weight: nested prod not supported");
    Weight w;
    w.form_ = Form::product;
    w.left_ = std::make_shared<Weight>(std::move(wx));
    w.right_ = std::make_shared<Weight>(std::move(wxi));
    return w;
  }
  // Tabulated log-values on a uniform lattice [-L,L]^dim, bilinear in log.
  static Weight table(int dim, Real L, int n_per_axis, std::vector<Real> log_values) {
    if (dim < 1 || dim > 2) throw std::invalid_argument("weight table: dim must be 1 or 2");
    long expect = dim == 1 ? n_per_axis : static_cast<long>(n_per_axis) * n_per_axis;
    if (static_cast<long>(log_values.size()) != expect)
      throw std::invalid_argument("weight table: value count mismatch");
    Weight w;
    w.form_ = Form::table;
    w.a_ = L;
    w.dim_ = dim;
    w.n_ = n_per_axis;
    w.tab_ = std::make_shared<std::vector<Real>>(std::move(log_values));
    return w;
  }

  Form form() const { return form_; }
  Domain domain() const {
    return form_ == Form::product ? Domain::phase_space : Domain::space;
  }

  // log v at a space point.
  Real log_space(const Point& x, int dim) const {
    switch (form_) {
      case Form::constant:
        return a_;
      case Form::exp_power:
        return a_ * std::pow(norm(x, dim), b_);
      case Form::poly:
        return 0.5 * a_ * std::log1p(norm_sq(x, dim));
      case Form::table:
        return table_at(x, dim);
      case Form::product:
        throw std::invalid_argument("weight: phase-space weight evaluated on space point");
    }
    return 0.0;
  }

  // log v at a phase-space point (x, xi). Space-only forms are read as
  // v(x, xi) = v(x), constant in frequency.
  Real log_phase(const Point& x, const Point& xi, int dim) const {
    if (form_ == Form::product)
      return left_->log_space(x, dim) + right_->log_space(xi, dim);
    return log_space(x, dim);
  }

  Real eval_space(const Point& x, int dim) const { return std::exp(log_space(x, dim)); }
  Real eval_phase(const Point& x, const Point& xi, int dim) const {
    return std::exp(log_phase(x, xi, dim));
  }

  // 1/v, exact because everything is stored in the exponent.
  Weight inverse() const {
    Weight w = *this;
    switch (form_) {
      case Form::constant:
      case Form::exp_power:
        w.a_ = -a_;
        break;
      case Form::poly:
        w.a_ = -a_;
        break;
      case Form::product:
        w.left_ = std::make_shared<Weight>(left_->inverse());
        w.right_ = std::make_shared<Weight>(right_->inverse());
        break;
      case Form::table: {
        auto neg = std::make_shared<std::vector<Real>>(*tab_);
        for (Real& v : *neg) v = -v;
        w.tab_ = neg;
        break;
      }
    }
    return w;
  }

 private:
  Real table_at(const Point& x, int dim) const {
    const auto& tab = *tab_;
    Real L = a_;
    Real step = 2 * L / (n_ - 1);
    auto clampf = [&](Real c) { return std::min(std::max(c, -L), L); };
    Real u = (clampf(x[0]) + L) / step;
    long i0 = std::min<long>(static_cast<long>(u), n_ - 2);
    Real fu = u - i0;
    if (dim == 1) return (1 - fu) * tab[i0] + fu * tab[i0 + 1];
    Real v = (clampf(x[1]) + L) / step;
    long j0 = std::min<long>(static_cast<long>(v), n_ - 2);
    Real fv = v - j0;
    auto at = [&](long i, long j) { return tab[i * n_ + j]; };
    return (1 - fu) * ((1 - fv) * at(i0, j0) + fv * at(i0, j0 + 1)) +
           fu * ((1 - fv) * at(i0 + 1, j0) + fv * at(i0 + 1, j0 + 1));
  }

  Form form_ = Form::constant;
  Real a_ = 0.0, b_ = 0.0;
  int dim_ = 1, n_ = 0;
  std::shared_ptr<Weight> left_, right_;
  std::shared_ptr<std::vector<Real>> tab_;
};

}  // namespace modlab
