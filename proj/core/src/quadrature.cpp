#include "parakernel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace parakernel {

namespace {

// Nodes and weights for the 7-point Gauss / 15-point Kronrod pair on [-1, 1].
// Column layout: abscissa, Gauss weight (0 for Kronrod-only nodes), Kronrod weight.
constexpr double kNodes[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

double checkedEval(const std::function<double(double)>& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw NumericError("non-finite integrand value at radius " + std::to_string(x));
  }
  return y;
}

}  // namespace

double gaussKronrod15(const std::function<double(double)>& f, double a, double b,
                      double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double y0 = checkedEval(f, mid);
  double g7 = kNodes[0][1] * y0;
  double k15 = kNodes[0][2] * y0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kNodes[i][0];
    const double yi = checkedEval(f, mid + dx) + checkedEval(f, mid - dx);
    g7 += kNodes[i][1] * yi;
    k15 += kNodes[i][2] * yi;
  }
  g7 *= half;
  k15 *= half;

  const double diff = std::fabs(k15 - g7);
  const double scale = std::max(std::fabs(k15), diff);
  if (scale == 0.0) {
    err = 0.0;
  } else {
    const double q = 200.0 * diff / scale;
    err = scale * std::min(1.0, q * std::sqrt(q));
  }
  return k15;
}

double integrateAdaptive(const std::function<double(double)>& f, double a, double b,
                         const QuadratureOptions& opt) {
  if (a == b) return 0.0;
  struct Span {
    double a, b;
  };
  std::vector<Span> stack{{a, b}};
  stack.reserve(64);
  double sum = 0.0;
  const double widthScale = std::max(std::fabs(b - a), 1e-300);
  int panels = 0;
  while (!stack.empty()) {
    const Span s = stack.back();
    stack.pop_back();
    double err = 0.0;
    const double v = gaussKronrod15(f, s.a, s.b, err);
    const double localTol =
        std::max(opt.absTol, opt.relTol * std::max(std::fabs(v), std::fabs(sum)));
    if (err <= localTol || std::fabs(s.b - s.a) < 1e-14 * widthScale) {
      sum += v;
      continue;
    }
    if (++panels > opt.maxPanels) {
      throw NumericError("adaptive quadrature exceeded panel budget on [" +
                         std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    const double mid = 0.5 * (s.a + s.b);
    stack.push_back({s.a, mid});
    stack.push_back({mid, s.b});
  }
  return sum;
}

double integrateLogSegmented(const std::function<double(double)>& f, double a,
                             double b, const QuadratureOptions& opt) {
  if (b <= a) return b == a ? 0.0 : -integrateLogSegmented(f, b, a, opt);
  if (a <= 0.0) {
    const double split = std::min(b, 1.0);
    double head = integrateAdaptive(f, a, split, opt);
    if (split < b) head += integrateLogSegmented(f, split, b, opt);
    return head;
  }
  if (b / a < 4.0) return integrateAdaptive(f, a, b, opt);
  double sum = 0.0;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(b, 2.0 * lo);
    sum += integrateAdaptive(f, lo, hi, opt);
    lo = hi;
  }
  return sum;
}

CumulativeTable CumulativeTable::build(std::function<double(double)> f, double low,
                                       double horizon, bool fromOrigin,
                                       const QuadratureOptions& opt) {
  CumulativeTable t;
  t.f_ = std::move(f);
  t.low_ = low;
  t.horizon_ = horizon;
  t.fromOrigin_ = fromOrigin;
  t.opt_ = opt;
  QuadratureOptions panelOpt = opt;
  panelOpt.relTol = 0.25 * opt.relTol;

  double acc = fromOrigin ? integrateAdaptive(t.f_, 0.0, low, panelOpt) : 0.0;
  t.checkpoints_.push_back(acc);
  double scale = std::fabs(acc);
  for (double r = low; r < horizon; r *= 2.0) {
    // Octaves negligible against the running total need no refinement.
    panelOpt.absTol = panelOpt.relTol * scale;
    acc += integrateAdaptive(t.f_, r, 2.0 * r, panelOpt);
    scale = std::max(scale, std::fabs(acc));
    t.checkpoints_.push_back(acc);
  }
  return t;
}

double CumulativeTable::operator()(double r) const {
  if (!fromOrigin_ && r < low_) {
    throw NumericError("cumulative table queried below its anchor");
  }
  if (r <= low_) {
    if (fromOrigin_) return integrateAdaptive(f_, 0.0, r, opt_);
    return 0.0;
  }
  if (r > 2.0 * horizon_) {
    throw NumericError("cumulative table queried beyond its horizon");
  }
  const double k = std::floor(std::log2(r / low_));
  auto idx = static_cast<std::size_t>(std::max(0.0, k));
  if (idx >= checkpoints_.size()) idx = checkpoints_.size() - 1;
  const double rk = low_ * std::ldexp(1.0, static_cast<int>(idx));
  QuadratureOptions local = opt_;
  local.absTol = std::max(local.absTol, local.relTol * std::fabs(checkpoints_[idx]));
  return checkpoints_[idx] + integrateAdaptive(f_, rk, r, local);
}

}  // namespace parakernel
