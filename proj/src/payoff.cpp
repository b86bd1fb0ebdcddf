// SPDX-License-Identifier: MIT
#include "robustfolio/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "robustfolio/errors.hpp"

namespace robustfolio {

namespace {

double plus(double y, double s) {
  if (s > 0.0 && std::abs(y) < s) return (y + s) * (y + s) / (4.0 * s);
  return y > 0.0 ? y : 0.0;
}

double plus_prime(double y, double s) {
  if (s > 0.0 && std::abs(y) < s) return (y + s) / (2.0 * s);
  if (y > 0.0) return 1.0;
  if (y < 0.0) return 0.0;
  return 0.5;
}

void check_smoothing(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("payoff: smoothing must be >= 0");
}

}  // namespace

Payoff Payoff::power(int k) {
  if (k < 0) throw ConfigError("payoff: power needs k >= 0");
  Payoff p;
  p.kind_ = Kind::power;
  p.param_ = k;
  return p;
}

Payoff Payoff::call(double strike, double smoothing) {
  check_smoothing(smoothing);
  if (!std::isfinite(strike)) throw ConfigError("payoff: strike must be finite");
  Payoff p;
  p.kind_ = Kind::call;
  p.param_ = strike;
  p.smoothing_ = smoothing;
  return p;
}

Payoff Payoff::butterfly(double K, double smoothing) {
  check_smoothing(smoothing);
  if (!(K > 0.0) || !std::isfinite(K)) throw ConfigError("payoff: butterfly needs K > 0");
  if (smoothing >= K) throw ConfigError("payoff: smoothing must be below K");
  Payoff p;
  p.kind_ = Kind::butterfly;
  p.param_ = K;
  p.smoothing_ = smoothing;
  return p;
}

Payoff Payoff::abs_shift(double x0, double smoothing) {
  check_smoothing(smoothing);
  if (!std::isfinite(x0)) throw ConfigError("payoff: x0 must be finite");
  Payoff p;
  p.kind_ = Kind::abs_shift;
  p.param_ = x0;
  p.smoothing_ = smoothing;
  return p;
}

Payoff Payoff::constant(double c) {
  if (!std::isfinite(c)) throw ConfigError("payoff: constant must be finite");
  Payoff p;
  p.kind_ = Kind::constant;
  p.param_ = c;
  return p;
}

Payoff Payoff::table(std::vector<double> x, std::vector<double> y) {
  if (x.size() < 2 || x.size() != y.size()) {
    throw ConfigError("payoff: table needs at least two (x, y) pairs of equal length");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ConfigError("payoff: non-finite table");
    if (i > 0 && !(x[i] > x[i - 1])) throw ConfigError("payoff: table x must increase strictly");
  }
  Payoff p;
  p.kind_ = Kind::table;
  const std::size_t n = x.size();
  p.tdy_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    p.tdy_[i] = (y[hi] - y[lo]) / (x[hi] - x[lo]);
  }
  p.tx_ = std::move(x);
  p.ty_ = std::move(y);
  return p;
}

Payoff Payoff::combination(const std::vector<std::pair<double, Payoff>>& terms) {
  if (terms.empty()) throw ConfigError("payoff: empty combination");
  Payoff p;
  p.kind_ = Kind::combination;
  for (const auto& [c, g] : terms) {
    if (!std::isfinite(c)) throw ConfigError("payoff: non-finite combination coefficient");
    p.terms_.emplace_back(c, std::make_shared<const Payoff>(g.on_asset(0)));
  }
  return p;
}

Payoff Payoff::on_asset(int asset) const {
  if (asset < 0) throw ConfigError("payoff: asset index must be >= 0");
  Payoff p = *this;
  p.asset_ = asset;
  return p;
}

Payoff Payoff::with_smoothing(double s) const {
  check_smoothing(s);
  Payoff p = *this;
  if (kind_ == Kind::call || kind_ == Kind::butterfly || kind_ == Kind::abs_shift) {
    p.smoothing_ = s;
  }
  for (auto& t : p.terms_) t.second = std::make_shared<const Payoff>(t.second->with_smoothing(s));
  return p;
}

Payoff Payoff::prepared_for(const DiscreteMeasure& P) const {
  if (kind_ == Kind::combination) {
    Payoff p = *this;
    for (auto& t : p.terms_) {
      t.second = std::make_shared<const Payoff>(t.second->on_asset(asset_).prepared_for(P).on_asset(0));
    }
    return p;
  }
  if (smoothing_ <= 0.0) return *this;
  if (asset_ >= P.dim()) throw ConfigError("payoff: asset index exceeds the model dimension");
  for (double k : kinks()) {
    for (int i = 0; i < P.size(); ++i) {
      if (std::abs(P.points()(asset_, i) - k) < smoothing_) return *this;
    }
  }
  return with_smoothing(0.0);
}

double Payoff::value(double x) const {
  const double s = smoothing_;
  switch (kind_) {
    case Kind::power:
      return std::pow(x, param_);
    case Kind::call:
      return plus(x - param_, s);
    case Kind::butterfly:
      return plus(x + param_, s) - 2.0 * plus(x, s) + plus(x - param_, s);
    case Kind::abs_shift:
      return plus(x + param_, s) + plus(-x - param_, s);
    case Kind::constant:
      return param_;
    case Kind::table: {
      const std::size_t n = tx_.size();
      std::size_t i = std::upper_bound(tx_.begin(), tx_.end(), x) - tx_.begin();
      i = std::clamp<std::size_t>(i, 1, n - 1);
      const double t = (x - tx_[i - 1]) / (tx_[i] - tx_[i - 1]);
      return ty_[i - 1] + t * (ty_[i] - ty_[i - 1]);
    }
    case Kind::combination: {
      double v = 0.0;
      for (const auto& [c, g] : terms_) v += c * g->value(x);
      return v;
    }
  }
  return 0.0;
}

double Payoff::derivative(double x) const {
  const double s = smoothing_;
  switch (kind_) {
    case Kind::power:
      return param_ == 0.0 ? 0.0 : param_ * std::pow(x, param_ - 1.0);
    case Kind::call:
      return plus_prime(x - param_, s);
    case Kind::butterfly:
      return plus_prime(x + param_, s) - 2.0 * plus_prime(x, s) + plus_prime(x - param_, s);
    case Kind::abs_shift:
      return plus_prime(x + param_, s) - plus_prime(-x - param_, s);
    case Kind::constant:
      return 0.0;
    case Kind::table: {
      const std::size_t n = tx_.size();
      if (x <= tx_.front()) return (ty_[1] - ty_[0]) / (tx_[1] - tx_[0]);
      if (x >= tx_.back()) return (ty_[n - 1] - ty_[n - 2]) / (tx_[n - 1] - tx_[n - 2]);
      std::size_t i = std::upper_bound(tx_.begin(), tx_.end(), x) - tx_.begin();
      const double t = (x - tx_[i - 1]) / (tx_[i] - tx_[i - 1]);
      return tdy_[i - 1] + t * (tdy_[i] - tdy_[i - 1]);
    }
    case Kind::combination: {
      double v = 0.0;
      for (const auto& [c, g] : terms_) v += c * g->derivative(x);
      return v;
    }
  }
  return 0.0;
}

Vec Payoff::gradient(const Vec& x) const {
  Vec g = Vec::Zero(x.size());
  g(asset_) = derivative(x(asset_));
  return g;
}

std::vector<double> Payoff::kinks() const {
  switch (kind_) {
    case Kind::call:
      return {param_};
    case Kind::butterfly:
      return {-param_, 0.0, param_};
    case Kind::abs_shift:
      return {-param_};
    case Kind::table:
      return tx_;
    case Kind::combination: {
      std::vector<double> out;
      for (const auto& t : terms_) {
        auto k = t.second->kinks();
        out.insert(out.end(), k.begin(), k.end());
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    default:
      return {};
  }
}

std::string Payoff::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::power:
      os << "power(k=" << param_ << ")";
      break;
    case Kind::call:
      os << "call(strike=" << param_ << ")";
      break;
    case Kind::butterfly:
      os << "butterfly(K=" << param_ << ")";
      break;
    case Kind::abs_shift:
      os << "abs_shift(x0=" << param_ << ")";
      break;
    case Kind::constant:
      os << "constant(c=" << param_ << ")";
      break;
    case Kind::table:
      os << "table(" << tx_.size() << " nodes)";
      break;
    case Kind::combination:
      os << "combination(" << terms_.size() << " terms)";
      break;
  }
  return os.str();
}

}  // namespace robustfolio
