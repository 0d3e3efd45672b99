#pragma once

#include "wplap/linalg.hpp"

#include <string>
#include <utility>
#include <vector>

namespace wplap::orlicz {

/// phi(t) = t^p / p with p in (1, inf).
class PowerNFunction {
public:
  explicit PowerNFunction(double p);

  double p() const { return p_; }
  double conjugate() const { return pc_; }

  double phi(double t) const;
  double phi_prime(double t) const;
  /// phi*(t) = t^{p'} / p'
  double phi_conjugate(double t) const;

  /// phi_a(t) = int_0^t phi'(a v s) / (a v s) s ds in closed form.
  double shifted(double a, double t) const;
  double shifted_prime(double a, double t) const;
  /// (phi_a)^* = (phi^*)_{phi'(a)}
  double shifted_conjugate(double a, double t) const;

private:
  double p_;
  double pc_;
};

// Free-function forms.
double phi(double p, double t);
double phi_prime(double p, double t);
double phi_conjugate(double p, double t);
double phi_shifted(double p, double a, double t);

/// A(xi) = |xi|^{p-2} xi (zero at xi = 0).
VecN a_map(double p, const VecN& xi);
/// V(xi) = |xi|^{(p-2)/2} xi (zero at xi = 0).
VecN v_map(double p, const VecN& xi);
/// Field version M A(M xi) = |M xi|^{p-2} M^2 xi.
VecN a_map_weighted(double p, const Mat& m, const VecN& xi);

struct RatioStats {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  std::size_t skipped = 0;
};

struct EquivRatios {
  RatioStats monotone_vs_v;      ///< (A(P)-A(Q)).(P-Q) / |V(P)-V(Q)|^2
  RatioStats monotone_vs_shift;  ///< (A(P)-A(Q)).(P-Q) / phi_{|Q|}(|P-Q|)
};

/// Throws inconsistency if some numerator is not strictly positive.
EquivRatios equiv_ratios(double p, const std::vector<std::pair<VecN, VecN>>& pairs);

/// Empirical constant of phi_{|P|}(t) <= c phi_{|Q|}(t) + eps |V(P)-V(Q)|^2:
/// max over samples of (phi_{|P|}(t) - eps |V(P)-V(Q)|^2)_+ / phi_{|Q|}(t).
struct ShiftSample {
  VecN p;
  VecN q;
  double t;
};
RatioStats change_of_shift_report(double p, double eps, const std::vector<ShiftSample>& samples);

/// Ratios LHS / RHS of the three removal-of-shift bounds for (|a|, t, eps) samples:
/// [0] phi'_{|a|}(t) / max(phi'(t/eps), eps phi'(|a|))
/// [1] (phi_{|a|}(t) - eps phi(|a|))_+ / (eps phi(t/eps))
/// [2] ((phi_{|a|})^*(t) - eps phi(|a|))_+ / (eps phi^*(t/eps))
struct RemovalSample {
  double a;
  double t;
  double eps;
};
std::vector<RatioStats> removal_of_shift_report(double p, const std::vector<RemovalSample>& samples);

std::string ratio_csv(const std::string& name, const RatioStats& stats);

}  // namespace wplap::orlicz
