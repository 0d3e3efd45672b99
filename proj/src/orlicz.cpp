#include "wplap/orlicz.hpp"

#include "wplap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wplap::orlicz {

namespace {

void check_nonneg(double t, const char* what) {
  require(t >= 0.0 && std::isfinite(t), ErrorKind::domain, std::string(what) + ": argument must be >= 0");
}

void push(RatioStats& s, double r) {
  if (s.count == 0) {
    s.min = s.max = r;
  } else {
    s.min = std::min(s.min, r);
    s.max = std::max(s.max, r);
  }
  ++s.count;
}

}  // namespace

PowerNFunction::PowerNFunction(double p) : p_(p) {
  require(std::isfinite(p) && p > 1.0, ErrorKind::domain, "PowerNFunction: p must exceed 1");
  const long double pl = p;
  pc_ = static_cast<double>(pl / (pl - 1.0L));
  require(std::isfinite(pc_), ErrorKind::domain, "PowerNFunction: conjugate exponent is not finite");
}

double PowerNFunction::phi(double t) const {
  check_nonneg(t, "phi");
  return std::pow(t, p_) / p_;
}

double PowerNFunction::phi_prime(double t) const {
  check_nonneg(t, "phi_prime");
  return std::pow(t, p_ - 1.0);
}

double PowerNFunction::phi_conjugate(double t) const {
  check_nonneg(t, "phi_conjugate");
  return std::pow(t, pc_) / pc_;
}

double PowerNFunction::shifted(double a, double t) const {
  check_nonneg(a, "phi_shifted");
  check_nonneg(t, "phi_shifted");
  if (t == 0.0) return 0.0;
  if (t <= a) return std::pow(a, p_ - 2.0) * t * t / 2.0;
  const double ap = std::pow(a, p_);
  return ap / 2.0 + (std::pow(t, p_) - ap) / p_;
}

double PowerNFunction::shifted_prime(double a, double t) const {
  check_nonneg(a, "phi_shifted_prime");
  check_nonneg(t, "phi_shifted_prime");
  if (t == 0.0) return 0.0;
  return std::pow(std::max(a, t), p_ - 2.0) * t;
}

double PowerNFunction::shifted_conjugate(double a, double t) const {
  return PowerNFunction(pc_).shifted(phi_prime(a), t);
}

double phi(double p, double t) { return PowerNFunction(p).phi(t); }
double phi_prime(double p, double t) { return PowerNFunction(p).phi_prime(t); }
double phi_conjugate(double p, double t) { return PowerNFunction(p).phi_conjugate(t); }
double phi_shifted(double p, double a, double t) { return PowerNFunction(p).shifted(a, t); }

VecN a_map(double p, const VecN& xi) {
  const double n = xi.norm();
  if (n == 0.0) return VecN::Zero(xi.size());
  return std::pow(n, p - 2.0) * xi;
}

VecN v_map(double p, const VecN& xi) {
  const double n = xi.norm();
  if (n == 0.0) return VecN::Zero(xi.size());
  return std::pow(n, (p - 2.0) / 2.0) * xi;
}

VecN a_map_weighted(double p, const Mat& m, const VecN& xi) { return m * a_map(p, VecN(m * xi)); }

EquivRatios equiv_ratios(double p, const std::vector<std::pair<VecN, VecN>>& pairs) {
  const PowerNFunction f(p);
  EquivRatios out;
  for (const auto& [P, Q] : pairs) {
    const VecN d = P - Q;
    if (d.norm() == 0.0) {
      ++out.monotone_vs_v.skipped;
      ++out.monotone_vs_shift.skipped;
      continue;
    }
    const double num = (a_map(p, P) - a_map(p, Q)).dot(d);
    if (!(num > 0.0)) {
      std::ostringstream os;
      os << "A is not strictly monotone on a sampled pair (numerator " << num << ")";
      raise(ErrorKind::inconsistency, os.str());
    }
    const double dv = (v_map(p, P) - v_map(p, Q)).squaredNorm();
    push(out.monotone_vs_v, num / dv);
    push(out.monotone_vs_shift, num / f.shifted(Q.norm(), d.norm()));
  }
  return out;
}

RatioStats change_of_shift_report(double p, double eps, const std::vector<ShiftSample>& samples) {
  const PowerNFunction f(p);
  RatioStats s;
  for (const auto& smp : samples) {
    const double den = f.shifted(smp.q.norm(), smp.t);
    if (!(den > 0.0)) {
      ++s.skipped;
      continue;
    }
    const double excess =
        f.shifted(smp.p.norm(), smp.t) - eps * (v_map(p, smp.p) - v_map(p, smp.q)).squaredNorm();
    push(s, std::max(0.0, excess) / den);
  }
  return s;
}

std::vector<RatioStats> removal_of_shift_report(double p, const std::vector<RemovalSample>& samples) {
  const PowerNFunction f(p);
  std::vector<RatioStats> out(3);
  for (const auto& s : samples) {
    require(s.eps > 0.0 && s.eps <= 1.0, ErrorKind::domain, "removal_of_shift_report: eps must be in (0, 1]");
    const double r0 = std::max(f.phi_prime(s.t / s.eps), s.eps * f.phi_prime(s.a));
    if (r0 > 0.0) push(out[0], f.shifted_prime(s.a, s.t) / r0); else ++out[0].skipped;
    const double r1 = s.eps * f.phi(s.t / s.eps);
    if (r1 > 0.0) push(out[1], std::max(0.0, f.shifted(s.a, s.t) - s.eps * f.phi(s.a)) / r1); else ++out[1].skipped;
    const double r2 = s.eps * f.phi_conjugate(s.t / s.eps);
    if (r2 > 0.0) push(out[2], std::max(0.0, f.shifted_conjugate(s.a, s.t) - s.eps * f.phi(s.a)) / r2);
    else ++out[2].skipped;
  }
  return out;
}

std::string ratio_csv(const std::string& name, const RatioStats& stats) {
  std::ostringstream os;
  os.precision(17);
  os << name << ',' << stats.min << ',' << stats.max << ',' << stats.count << ',' << stats.skipped;
  return os.str();
}

}  // namespace wplap::orlicz
