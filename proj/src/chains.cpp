#include "qmotzkin/chains.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "qmotzkin/errors.hpp"
#include "qmotzkin/qspecial.hpp"

namespace qmotzkin::chains {

namespace {

double q_bracket(std::size_t n, double q) {
  if (n == 0) return 0.0;
  if (q == 0.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log(q)) / (1.0 - q);
}

double q_power(double q, std::size_t n) {
  return n == 0 ? 1.0 : std::pow(q, static_cast<double>(n));
}

double draw_uniform(std::mt19937_64& rng) {
  return motzkin::PathSampler::uniform(rng());
}

// Cuts the suffix of terms whose total is below tail_tol of the sum.
void cut_tail(std::vector<double>& p, double tail_tol) {
  double total = 0.0;
  for (double v : p) total += v;
  double tail = 0.0;
  std::size_t keep = p.size();
  while (keep > 1 && tail + p[keep - 1] <= tail_tol * total) {
    tail += p[keep - 1];
    --keep;
  }
  p.resize(keep);
}

// log of (a rho, b rho; q)_inf / (rho; q)_inf^2.
double log_normalizer(double rho, const QModelParams& params) {
  const auto asc = params.to_asc();
  const qspecial::QBase q(params.q);
  return (qspecial::log_qpoch_infinite(asc.a * rho, q) +
          qspecial::log_qpoch_infinite(asc.b * rho, q))
             .real() -
         2.0 * qspecial::log_qpoch_infinite(qspecial::Complex(rho, 0.0), q).real();
}

}  // namespace

double Distribution::at(long long n) const {
  if (n < static_cast<long long>(offset)) return 0.0;
  const auto i = static_cast<std::size_t>(n) - offset;
  return i < p.size() ? p[i] : 0.0;
}

double Distribution::mass() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

double Distribution::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += static_cast<double>(offset + i) * p[i];
  return s / mass();
}

double Distribution::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(offset + i) - mu;
    s += d * d * p[i];
  }
  return s / mass();
}

Distribution Distribution::point(std::size_t n) { return {n, {1.0}}; }

void Distribution::trim() {
  std::size_t lo = 0;
  while (lo + 1 < p.size() && p[lo] == 0.0) ++lo;
  std::size_t hi = p.size();
  while (hi > lo + 1 && p[hi - 1] == 0.0) --hi;
  p = std::vector<double>(p.begin() + static_cast<long>(lo), p.begin() + static_cast<long>(hi));
  offset += lo;
}

std::string Distribution::to_csv() const {
  std::ostringstream os;
  os << "n,probability\n" << std::setprecision(17);
  for (std::size_t i = 0; i < p.size(); ++i) os << offset + i << ',' << p[i] << '\n';
  return os.str();
}

ChainSpec::ChainSpec(const QModelParams& params, std::size_t height)
    : params_(params), B_(params.support().B) {
  if (height < 2) throw DomainError("chain height must be at least 2");
  const double q = params.q;
  const double sigma = params.sigma;
  a_.resize(height + 1);
  b_.resize(height + 1);
  c_.resize(height + 1);
  for (std::size_t n = 0; n <= height; ++n) {
    a_[n] = q_bracket(n + 2, q);
    b_[n] = 2.0 * sigma * q_bracket(n + 1, q);
    c_[n] = q_bracket(n, q);
  }
  ratio_.resize(height);
  log_pi_.resize(height + 1);
  log_pi_[0] = 0.0;
  for (std::size_t n = 0; n < height; ++n) {
    // B - b_n without cancellation.
    const double gap = 2.0 * (1.0 + sigma * q_power(q, n + 1)) / (1.0 - q);
    const double back = n == 0 ? 0.0 : c_[n] / ratio_[n - 1];
    const double r = (gap - back) / a_[n];
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw AccuracyLoss("pi ratio lost positivity at n = " + std::to_string(n));
    }
    ratio_[n] = r;
    log_pi_[n + 1] = log_pi_[n] + std::log(r);
  }
}

double ChainSpec::pi_ratio(std::size_t n) const {
  if (n >= ratio_.size()) {
    throw CapacityError("state " + std::to_string(n) + " beyond chain height " +
                        std::to_string(ratio_.size()));
  }
  return ratio_[n];
}

double ChainSpec::log_pi(std::size_t n) const {
  if (n >= log_pi_.size()) {
    throw CapacityError("state " + std::to_string(n) + " beyond chain height");
  }
  return log_pi_[n];
}

double ChainSpec::log_s(std::size_t n) const {
  return log_pi(n) + std::log(q_bracket(n + 1, params_.q));
}

Row ChainSpec::row(std::size_t n) const {
  const double r = pi_ratio(n);
  Row out;
  out.up = a_[n] * r / B_;
  out.flat = b_[n] / B_;
  out.down = n == 0 ? 0.0 : c_[n] / (B_ * ratio_[n - 1]);
  return out;
}

Row ChainSpec::dual_row(std::size_t n) const {
  // pi~_n = pi_n / ||p_n||^2 with ||p_n||^2 = prod_{k<=n} c_k / a_{k-1}.
  const double r = pi_ratio(n);
  const double tilde_up = r * a_[n] / c_[n + 1];
  Row out;
  out.up = c_[n + 1] * tilde_up / B_;
  out.flat = b_[n] / B_;
  if (n > 0) {
    const double tilde_down = (1.0 / ratio_[n - 1]) * c_[n] / a_[n - 1];
    out.down = a_[n - 1] * tilde_down / B_;
  }
  return out;
}

Distribution transition_row(std::size_t n, const ChainSpec& spec) {
  const Row r = spec.row(n);
  if (n == 0) return {0, {r.flat, r.up}};
  return {n - 1, {r.down, r.flat, r.up}};
}

double initial_normalizer(double rho, const QModelParams& params) {
  params.validate();
  if (!(rho >= 0.0) || !(rho < 1.0)) {
    throw DivergenceError("initial law requires 0 <= rho < 1");
  }
  const double c = std::exp(log_normalizer(rho, params));
  if (!std::isfinite(c)) throw OverflowError("initial normalizer overflows a double");
  return c;
}

Distribution initial_law(Which which, const ChainSpec& spec, double tail_tol) {
  const QModelParams& p = spec.params();
  const double rho = which == Which::X ? p.rho0 : p.rho1;
  if (!(rho >= 0.0) || !(rho < 1.0)) {
    throw DivergenceError("initial law requires 0 <= rho < 1");
  }
  if (rho == 0.0) return Distribution::point(0);
  const double log_c = log_normalizer(rho, p);
  const double log_rho = std::log(rho);
  Distribution d;
  std::size_t quiet = 0;
  double total = 0.0;
  for (std::size_t n = 0;; ++n) {
    if (n >= spec.height()) {
      throw CapacityError("initial law does not fit below chain height " +
                          std::to_string(spec.height()));
    }
    const double v = std::exp(static_cast<double>(n) * log_rho + spec.log_s(n) - log_c);
    d.p.push_back(v);
    total += v;
    const bool decreasing = n == 0 || v <= d.p[n - 1];
    quiet = (decreasing && v <= 1e-3 * tail_tol * total) ? quiet + 1 : 0;
    if (quiet >= 8) break;
  }
  cut_tail(d.p, tail_tol);
  return d;
}

Distribution kstep_distribution(const Distribution& start, std::size_t k,
                                const ChainSpec& spec, std::size_t height_cap) {
  if (start.p.empty()) throw DomainError("start distribution is empty");
  const std::size_t need = start.max_state() + k;
  if (height_cap < need) {
    throw CapacityError("height_cap " + std::to_string(height_cap) + " below support + k = " +
                        std::to_string(need));
  }
  if (need >= spec.height()) {
    throw CapacityError("chain height " + std::to_string(spec.height()) +
                        " below support + k = " + std::to_string(need));
  }
  std::size_t lo = start.offset;
  std::vector<double> cur = start.p;
  std::vector<Row> rows(need + 1);
  for (std::size_t n = 0; n <= need; ++n) rows[n] = spec.row(n);
  for (std::size_t step = 0; step < k; ++step) {
    const std::size_t new_lo = lo == 0 ? 0 : lo - 1;
    std::vector<double> next(cur.size() + (lo == 0 ? 1 : 2), 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double v = cur[i];
      if (v == 0.0) continue;
      const std::size_t n = lo + i;
      const Row& r = rows[n];
      const std::size_t j = n - new_lo;
      next[j] += v * r.flat;
      next[j + 1] += v * r.up;
      if (n > 0) next[j - 1] += v * r.down;
    }
    cur = std::move(next);
    lo = new_lo;
  }
  Distribution out{lo, std::move(cur)};
  out.trim();
  return out;
}

double kstep_transition_integral(std::size_t m, std::size_t n, std::size_t k,
                                 const ChainSpec& spec, const quad::Policy& quad_policy) {
  const QModelParams& p = spec.params();
  const std::size_t deg = std::max(m, n);
  const double B = spec.B();
  const double bracket = q_bracket(n + 1, p.q);
  const auto res = ascpoly::integrate_nu(
      [&](double x) {
        const auto poly = ascpoly::motzkin_poly_all(deg, x, p);
        return std::pow(x / B, static_cast<double>(k)) * poly[m] * bracket * poly[n];
      },
      p, quad_policy);
  return std::exp(spec.log_pi(n) - spec.log_pi(m)) * res.value;
}

std::vector<int> simulate_chain(const ChainSpec& spec, std::size_t steps,
                                std::uint64_t seed, std::optional<std::size_t> start) {
  std::mt19937_64 rng(motzkin::stream_seed(seed, 0));
  std::size_t cur = 0;
  if (start) {
    cur = *start;
  } else {
    const Distribution init = initial_law(Which::X, spec);
    double u = draw_uniform(rng) * init.mass();
    cur = init.offset;
    for (std::size_t i = 0; i < init.p.size(); ++i) {
      cur = init.offset + i;
      if (u < init.p[i]) break;
      u -= init.p[i];
    }
  }
  std::vector<int> out;
  out.reserve(steps + 1);
  out.push_back(static_cast<int>(cur));
  for (std::size_t s = 0; s < steps; ++s) {
    const Row r = spec.row(cur);
    const double u = draw_uniform(rng);
    if (u < r.up) {
      ++cur;
    } else if (u >= r.up + r.flat && cur > 0) {
      --cur;
    }
    out.push_back(static_cast<int>(cur));
  }
  return out;
}

namespace {

double step_weight(const motzkin::TruncatedOperator& op, int from, int to) {
  const auto h = static_cast<std::size_t>(from);
  return to > from ? op.a(h) : (to == from ? op.b(h) : op.c(h));
}

// Depth-first over windows of K steps; emit(window, weight) at the leaves.
template <class Weight, class Emit>
void walk_windows(std::size_t K, int start, std::size_t size, Weight&& w, Emit&& emit) {
  std::vector<int> h{start};
  double acc = 1.0;
  const auto rec = [&](auto&& self) -> void {
    if (h.size() == K + 1) {
      emit(h, acc);
      return;
    }
    for (int d : {-1, 0, 1}) {
      const int next = h.back() + d;
      if (next < 0 || static_cast<std::size_t>(next) >= size) continue;
      const double f = w(h.back(), next);
      if (f <= 0.0) continue;
      const double saved = acc;
      acc *= f;
      h.push_back(next);
      self(self);
      h.pop_back();
      acc = saved;
    }
  };
  rec(rec);
}

}  // namespace

WindowLaw finite_window_law(std::size_t L, std::size_t K, const QModelParams& params,
                            bool reversed, double tail_tol) {
  if (K > L) throw DomainError("window longer than the path");
  const auto model = motzkin::WeightModel::q_model(params);
  const auto bd = motzkin::truncate_boundary(model, tail_tol);
  const std::size_t S = motzkin::transfer_size(bd, L);
  const motzkin::TruncatedOperator op(model, S);
  std::vector<double> alpha(S, 0.0), beta(S, 0.0);
  std::copy(bd.alpha.begin(), bd.alpha.end(), alpha.begin());
  std::copy(bd.beta.begin(), bd.beta.end(), beta.begin());

  // Far side vector after L - K steps, then the full product for the total.
  motzkin::ScaledVector far{reversed ? alpha : beta, 0.0};
  far.normalize();
  for (std::size_t i = 0; i < L - K; ++i) {
    reversed ? op.apply_row(far) : op.apply_col(far);
  }
  motzkin::ScaledVector full = far;
  for (std::size_t i = 0; i < K; ++i) {
    reversed ? op.apply_row(full) : op.apply_col(full);
  }
  const std::vector<double>& near = reversed ? beta : alpha;
  double sign = 1.0;
  const double log_total = full.dot_log(near, sign);
  const double factor = std::exp(far.log_scale - log_total);

  std::map<std::vector<int>, double> law;
  for (std::size_t m = 0; m < S; ++m) {
    if (near[m] == 0.0) continue;
    walk_windows(
        K, static_cast<int>(m), S,
        [&](int from, int to) {
          return reversed ? step_weight(op, to, from) : step_weight(op, from, to);
        },
        [&](const std::vector<int>& h, double w) {
          const double pr = near[m] * w * far.v[static_cast<std::size_t>(h.back())] * factor;
          if (pr > 0.0) law[h] += pr;
        });
  }
  return WindowLaw(law.begin(), law.end());
}

WindowLaw chain_window_law(Which which, std::size_t K, const ChainSpec& spec,
                           double tail_tol) {
  const Distribution init = initial_law(which, spec, tail_tol);
  std::map<std::vector<int>, double> law;
  for (std::size_t i = 0; i < init.p.size(); ++i) {
    if (init.p[i] == 0.0) continue;
    walk_windows(
        K, static_cast<int>(init.offset + i), spec.height(),
        [&](int from, int to) {
          const Row r = spec.row(static_cast<std::size_t>(from));
          return to > from ? r.up : (to == from ? r.flat : r.down);
        },
        [&](const std::vector<int>& h, double w) { law[h] += init.p[i] * w; });
  }
  return WindowLaw(law.begin(), law.end());
}

double total_variation(const WindowLaw& lhs, const WindowLaw& rhs) {
  double diff = 0.0;
  double ml = 0.0;
  double mr = 0.0;
  auto i = lhs.begin();
  auto j = rhs.begin();
  while (i != lhs.end() || j != rhs.end()) {
    if (j == rhs.end() || (i != lhs.end() && i->first < j->first)) {
      diff += std::abs(i->second);
      ml += i->second;
      ++i;
    } else if (i == lhs.end() || j->first < i->first) {
      diff += std::abs(j->second);
      mr += j->second;
      ++j;
    } else {
      diff += std::abs(i->second - j->second);
      ml += i->second;
      mr += j->second;
      ++i;
      ++j;
    }
  }
  return 0.5 * (diff + std::max(0.0, 1.0 - ml) + std::max(0.0, 1.0 - mr));
}

double endpoint_correlation(std::size_t L, const QModelParams& params, double tail_tol) {
  const auto model = motzkin::WeightModel::q_model(params);
  const auto bd = motzkin::truncate_boundary(model, tail_tol);
  const std::size_t S = motzkin::transfer_size(bd, L);
  const motzkin::TruncatedOperator op(model, S);
  std::vector<motzkin::ScaledVector> rows;
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < bd.alpha.size(); ++m) {
    motzkin::ScaledVector r{std::vector<double>(S, 0.0), 0.0};
    r.v[m] = 1.0;
    for (std::size_t i = 0; i < L; ++i) op.apply_row(r);
    if (bd.alpha[m] > 0.0) max_log = std::max(max_log, r.log_scale + std::log(bd.alpha[m]));
    rows.push_back(std::move(r));
  }
  double z = 0.0, ex = 0.0, ey = 0.0, exx = 0.0, eyy = 0.0, exy = 0.0;
  for (std::size_t m = 0; m < rows.size(); ++m) {
    if (bd.alpha[m] == 0.0) continue;
    const double f = bd.alpha[m] * std::exp(rows[m].log_scale - max_log);
    for (std::size_t n = 0; n < bd.beta.size(); ++n) {
      const double w = f * rows[m].v[n] * bd.beta[n];
      const double x = static_cast<double>(m);
      const double y = static_cast<double>(n);
      z += w;
      ex += w * x;
      ey += w * y;
      exx += w * x * x;
      eyy += w * y * y;
      exy += w * x * y;
    }
  }
  ex /= z;
  ey /= z;
  const double vx = exx / z - ex * ex;
  const double vy = eyy / z - ey * ey;
  if (!(vx > 0.0) || !(vy > 0.0)) return 0.0;
  return (exy / z - ex * ey) / std::sqrt(vx * vy);
}

}  // namespace qmotzkin::chains
