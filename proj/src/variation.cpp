#include "rspde/variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rspde/errors.hpp"

namespace rspde {

namespace {

void check_interval(const RoughPath& rough, GridInterval iv, const char* who) {
  if (iv.last > rough.steps() || iv.first >= iv.last) {
    throw ConfigError(std::string(who) + ": empty or off-grid interval");
  }
}

// (k dt)^e for lags k = 0..len.
std::vector<double> lag_powers(double dt, std::size_t len, double exponent) {
  std::vector<double> out(len + 1, 0.0);
  for (std::size_t k = 1; k <= len; ++k) out[k] = std::pow(static_cast<double>(k) * dt, exponent);
  return out;
}

}  // namespace

HoelderNorms hoelder_norms(const RoughPath& rough, double gamma, GridInterval interval) {
  check_interval(rough, interval, "hoelder_norms");
  const std::size_t len = interval.steps();
  const std::vector<double> t1 = lag_powers(rough.dt(), len, gamma);
  const std::vector<double> t2 = lag_powers(rough.dt(), len, 2.0 * gamma);
  HoelderNorms out;
  for (std::size_t a = interval.first; a < interval.last; ++a) {
    ChenWalker walker(rough, a);
    while (walker.right() < interval.last) {
      walker.advance();
      const std::size_t lag = walker.right() - a;
      out.path = std::max(out.path, walker.first_norm() / t1[lag]);
      out.second = std::max(out.second, walker.second_norm() / t2[lag]);
    }
  }
  out.rho = 1.0 + out.path + out.second;
  return out;
}

double rough_polynomial(const HoelderNorms& norms) {
  const double x = norms.path;
  const double y = norms.second;
  return 1.0 + y + x + x * (x * x + y);
}

ControlSweep control_sweep(const RoughPath& rough, double gamma, double eta1, std::size_t s,
                           std::size_t last, double stop_above) {
  if (!(eta1 >= 0.0 && eta1 < gamma)) throw ConfigError("control function: need 0 <= eta1 < gamma");
  if (s > last || last > rough.steps()) throw ConfigError("control function: endpoints must be grid points with s <= t");
  const double gap = gamma - eta1;
  const double p1 = 1.0 / gap;
  const double p2 = 1.0 / (2.0 * gap);
  const std::vector<double> time_weight = lag_powers(rough.dt(), last - s, -eta1 / gap);

  ControlSweep out;
  out.start = s;
  out.values.push_back(0.0);
  std::vector<ChenWalker> walkers;
  walkers.reserve(last - s);
  for (std::size_t b = s + 1; b <= last; ++b) {
    walkers.emplace_back(rough, b - 1);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = s; a < b; ++a) {
      ChenWalker& w = walkers[a - s];
      w.advance();
      const double cost =
          time_weight[b - a] * (std::pow(w.first_norm(), p1) + std::pow(w.second_norm(), p2));
      best = std::max(best, out.values[a - s] + cost);
    }
    out.values.push_back(best);
    if (best > stop_above) break;
  }
  return out;
}

double control_value(const RoughPath& rough, double gamma, double eta1, std::size_t s, std::size_t t) {
  if (s == t) {
    if (!(eta1 >= 0.0 && eta1 < gamma)) throw ConfigError("control function: need 0 <= eta1 < gamma");
    if (t > rough.steps()) throw ConfigError("control function: off-grid endpoint");
    return 0.0;
  }
  const ControlSweep sweep =
      control_sweep(rough, gamma, eta1, s, t, std::numeric_limits<double>::infinity());
  return sweep.values.back();
}

double cm_variation(const GridPath& h, double gamma_prime, double eta1) {
  if (!(eta1 >= 0.0 && eta1 < gamma_prime)) {
    throw ConfigError("cm_variation: need 0 <= eta1 < gamma_prime");
  }
  const double gap = gamma_prime - eta1;
  const double p = 1.0 / gap;
  const std::size_t m = h.steps();
  const std::vector<double> time_weight = lag_powers(h.dt(), m, -eta1 / gap);
  std::vector<double> best(m + 1, 0.0);
  for (std::size_t b = 1; b <= m; ++b) {
    double v = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < b; ++a) {
      const double inc = h.increment(a, b).norm();
      v = std::max(v, best[a] + time_weight[b - a] * std::pow(inc, p));
    }
    best[b] = v;
  }
  return best[m];
}

GreedyPartition greedy_partition(const RoughPath& rough, double gamma, double eta1, double chi,
                                 GridInterval interval) {
  if (!(chi > 0.0)) throw ConfigError("greedy_partition: chi must be positive");
  if (!(eta1 >= 0.0 && eta1 < gamma)) throw ConfigError("greedy_partition: need 0 <= eta1 < gamma");
  check_interval(rough, interval, "greedy_partition");
  const double gap = gamma - eta1;
  const double stop_above = std::pow(chi, 1.0 / gap) * (1.0 + 1e-9);

  GreedyPartition out;
  out.chi = chi;
  out.eta1 = eta1;
  out.gamma = gamma;
  out.points.push_back(interval.first);
  std::size_t current = interval.first;
  while (current < interval.last) {
    const ControlSweep sweep = control_sweep(rough, gamma, eta1, current, interval.last, stop_above);
    std::size_t next = current;
    for (std::size_t k = 1; k < sweep.values.size(); ++k) {
      if (std::pow(sweep.values[k], gap) <= chi) {
        next = current + k;
      } else {
        break;
      }
    }
    if (next == current) {
      std::ostringstream msg;
      msg << "greedy_partition: grid step [" << current << ", " << current + 1
          << "] alone exceeds chi=" << chi << " (W^{gamma-eta1}=" << std::pow(sweep.values[1], gap)
          << "); the grid is too coarse for this threshold";
      throw ConfigError(msg.str());
    }
    out.points.push_back(next);
    current = next;
  }
  return out;
}

}  // namespace rspde
