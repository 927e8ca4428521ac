#include "qmotzkin/motzkin.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "qmotzkin/errors.hpp"

namespace qmotzkin::motzkin {

namespace {

constexpr std::size_t kScanLimit = 1000000;
constexpr std::size_t kSampleChunk = 4096;

double q_bracket(std::size_t n, double q) {
  if (n == 0) return 0.0;
  if (q == 0.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log(q)) / (1.0 - q);
}

double power(double r, std::size_t n) {
  return n == 0 ? 1.0 : std::pow(r, static_cast<double>(n));
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Leading weights of f(m) (m+1)^2 whose tail is below tail_tol.
std::vector<double> truncate_sequence(const std::function<double(std::size_t)>& f,
                                      double tail_tol, const char* what) {
  std::vector<double> values;
  std::vector<double> terms;
  double total = 0.0;
  std::size_t quiet = 0;
  for (std::size_t m = 0;; ++m) {
    if (m >= kScanLimit) {
      throw DivergenceError(std::string(what) +
                            " weights do not decay within the scan limit");
    }
    const double v = f(m);
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError(std::string(what) + " weights must be finite and >= 0");
    }
    const double mm = static_cast<double>(m + 1);
    const double t = v * mm * mm;
    values.push_back(v);
    terms.push_back(t);
    total += t;
    if (!std::isfinite(total)) {
      throw DivergenceError(std::string(what) + " weight sum diverges");
    }
    const bool decreasing = m == 0 || t <= terms[m - 1];
    quiet = (decreasing && t <= 1e-3 * tail_tol * total) ? quiet + 1 : 0;
    if (quiet >= 8) break;
  }
  if (total == 0.0) throw DomainError(std::string(what) + " weights are all zero");
  double tail = 0.0;
  std::size_t keep = terms.size();
  while (keep > 1 && tail + terms[keep - 1] <= tail_tol * total) {
    tail += terms[keep - 1];
    --keep;
  }
  values.resize(keep);
  return values;
}

std::vector<double> padded(const std::vector<double>& v, std::size_t size,
                           double z) {
  std::vector<double> out(size, 0.0);
  double zk = 1.0;
  for (std::size_t i = 0; i < v.size() && i < size; ++i) {
    out[i] = v[i] * zk;
    zk *= z;
  }
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

ScaledValue dot(const ScaledVector& u, const std::vector<double>& w) {
  double sign = 1.0;
  const double l = u.dot_log(w, sign);
  if (std::isinf(l) && l < 0) return {0.0, 0.0};
  return {sign, l};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_expectation_args(double z0, double z1, const std::vector<double>& t,
                            const std::vector<double>& s, std::size_t L) {
  if (t.size() != s.size()) throw DomainError("t and s must have equal length");
  if (2 * t.size() > L) throw DomainError("requires 2K <= L");
  if (!(z0 > 0.0 && z0 <= 1.0) || !(z1 > 0.0 && z1 <= 1.0)) {
    throw DomainError("z0 and z1 must lie in (0, 1]");
  }
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (!(t[j] > 0.0) || !(s[j] > 0.0) || !std::isfinite(t[j]) ||
        !std::isfinite(s[j])) {
      throw DomainError("t_j and s_j must be positive");
    }
  }
}

struct Setup {
  Boundary bd;
  std::size_t size;
};

Setup prepare(std::size_t L, const WeightModel& model,
              const TransferPolicy& policy) {
  if (!(policy.tail_tol > 0.0 && policy.tail_tol < 1.0)) {
    throw DomainError("tail_tol must lie in (0, 1)");
  }
  Setup s{truncate_boundary(model, policy.tail_tol), 0};
  const std::size_t need = transfer_size(s.bd, L);
  if (policy.height_cap == 0) {
    s.size = need;
  } else {
    const std::size_t min_cap = s.bd.cap() - 1 + L / 2;
    if (policy.height_cap < min_cap) {
      throw CapacityError("height_cap " + std::to_string(policy.height_cap) +
                          " is below the " + std::to_string(min_cap) +
                          " required for tail_tol");
    }
    s.size = policy.height_cap + 1;
  }
  return s;
}

// V(z0)^T M_{t_1}..M_{t_K} as a row and M_{1/s_K}..M_{1/s_1} W(z1) as a column.
struct Sides {
  ScaledVector row;
  ScaledVector col;
};

Sides build_sides(double z0, double z1, const std::vector<double>& t,
                  const std::vector<double>& s, const TruncatedOperator& op,
                  const Boundary& bd) {
  Sides out;
  out.row.v = padded(bd.alpha, op.size(), z0);
  out.row.normalize();
  for (double tj : t) op.with_t(tj).apply_row(out.row);
  out.col.v = padded(bd.beta, op.size(), z1);
  out.col.normalize();
  for (double sj : s) op.with_t(1.0 / sj).apply_col(out.col);
  return out;
}

}  // namespace

MotzkinPath::MotzkinPath(std::vector<int> altitudes) : h_(std::move(altitudes)) {
  if (h_.empty()) throw DomainError("a path needs at least one altitude");
  for (std::size_t k = 0; k < h_.size(); ++k) {
    if (h_[k] < 0) throw DomainError("altitudes must be nonnegative");
    if (k > 0 && std::abs(h_[k] - h_[k - 1]) > 1) {
      throw DomainError("consecutive altitudes must differ by at most 1");
    }
  }
}

WeightModel WeightModel::q_model(const QModelParams& p) {
  p.validate();
  WeightModel m;
  const double q = p.q;
  const double two_sigma = 2.0 * p.sigma;
  const double rho0 = p.rho0;
  const double rho1 = p.rho1;
  m.a = [q](std::size_t n) { return q_bracket(n + 2, q); };
  m.b = [q, two_sigma](std::size_t n) { return two_sigma * q_bracket(n + 1, q); };
  m.c = [q](std::size_t n) { return q_bracket(n, q); };
  m.alpha = [q, rho0](std::size_t n) { return power(rho0, n) * q_bracket(n + 1, q); };
  m.beta = [rho1](std::size_t n) { return power(rho1, n); };
  m.q_params = p;
  m.name = "q";
  m.parameters = {{"q", p.q}, {"sigma", p.sigma}, {"rho0", p.rho0}, {"rho1", p.rho1}};
  return m;
}

WeightModel WeightModel::unit(double rho0, double rho1) {
  if (!(rho0 >= 0.0) || !(rho1 >= 0.0) || !std::isfinite(rho0) ||
      !std::isfinite(rho1)) {
    throw DomainError("rho0 and rho1 must be finite and >= 0");
  }
  WeightModel m;
  m.a = [](std::size_t) { return 1.0; };
  m.b = [](std::size_t) { return 1.0; };
  m.c = [](std::size_t) { return 1.0; };
  m.alpha = [rho0](std::size_t n) { return power(rho0, n); };
  m.beta = [rho1](std::size_t n) { return power(rho1, n); };
  m.name = "unit";
  m.parameters = {{"rho0", rho0}, {"rho1", rho1}};
  return m;
}

WeightModel WeightModel::named(const std::string& name,
                               const std::map<std::string, double>& params) {
  auto get = [&](const char* key, double dflt) {
    const auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  };
  if (name == "q") {
    QModelParams p;
    p.q = get("q", p.q);
    p.sigma = get("sigma", p.sigma);
    p.rho0 = get("rho0", p.rho0);
    p.rho1 = get("rho1", p.rho1);
    return q_model(p);
  }
  if (name == "unit") return unit(get("rho0", 0.0), get("rho1", 0.0));
  throw DomainError("unknown model '" + name + "'");
}

void WeightModel::validate(std::size_t n_max) const {
  if (!a || !b || !c || !alpha || !beta) throw DomainError("weight model is incomplete");
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double an = a(n), bn = b(n), cn = c(n);
    if (!(an > 0.0) || !std::isfinite(an)) throw DomainError("a_n must be > 0");
    if (!(bn >= 0.0) || !std::isfinite(bn)) throw DomainError("b_n must be >= 0");
    if (n >= 1 && (!(cn > 0.0) || !std::isfinite(cn))) {
      throw DomainError("c_n must be > 0 for n >= 1");
    }
    if (!(alpha(n) >= 0.0) || !(beta(n) >= 0.0)) {
      throw DomainError("boundary weights must be >= 0");
    }
  }
}

std::string serialize_model(const WeightModel& m) {
  std::ostringstream os;
  os << "model=" << m.name << '\n';
  for (const auto& [k, v] : m.parameters) os << k << '=' << format_double(v) << '\n';
  return os.str();
}

WeightModel parse_model(const std::string& text) {
  std::string name = "q";
  std::map<std::string, double> params;
  std::string token;
  std::istringstream is(text);
  while (is >> token) {
    for (char& ch : token) {
      if (ch == ',' || ch == ';') ch = ' ';
    }
    std::istringstream parts(token);
    std::string kv;
    while (parts >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw DomainError("expected key=value, got '" + kv + "'");
      const std::string key = trim(kv.substr(0, eq));
      const std::string val = trim(kv.substr(eq + 1));
      if (key == "model") {
        name = val;
        continue;
      }
      std::size_t used = 0;
      double d = 0.0;
      try {
        d = std::stod(val, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != val.size() || val.empty()) {
        throw DomainError("value for '" + key + "' is not a number");
      }
      params[key] = d;
    }
  }
  return WeightModel::named(name, params);
}

std::string serialize_path(const MotzkinPath& p) {
  std::string out;
  for (std::size_t k = 0; k < p.altitudes().size(); ++k) {
    if (k) out += ',';
    out += std::to_string(p[k]);
  }
  return out;
}

MotzkinPath parse_path(const std::string& line) {
  std::vector<int> h;
  std::istringstream is(line);
  std::string item;
  while (std::getline(is, item, ',')) {
    const std::string t = trim(item);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size()) throw DomainError("bad altitude '" + t + "'");
    h.push_back(v);
  }
  return MotzkinPath(std::move(h));
}

void ScaledVector::normalize() {
  const double m = max_abs(v);
  if (m == 0.0) return;
  if (!std::isfinite(m)) throw OverflowError("transfer vector overflowed");
  for (double& x : v) x /= m;
  log_scale += std::log(m);
}

double ScaledVector::dot_log(const std::vector<double>& w, double& sign) const {
  double s = 0.0;
  const std::size_t n = std::min(v.size(), w.size());
  for (std::size_t i = 0; i < n; ++i) s += v[i] * w[i];
  sign = s < 0.0 ? -1.0 : 1.0;
  if (s == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(s)) + log_scale;
}

TruncatedOperator::TruncatedOperator(const WeightModel& m, std::size_t size,
                                     double t)
    : a_(size), b_(size), c_(size), t_(t) {
  if (size == 0) throw DomainError("operator size must be positive");
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be positive");
  for (std::size_t n = 0; n < size; ++n) {
    a_[n] = m.a(n);
    b_[n] = m.b(n);
    c_[n] = n == 0 ? 0.0 : m.c(n);
  }
}

TruncatedOperator TruncatedOperator::with_t(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be positive");
  TruncatedOperator out = *this;
  out.t_ = t;
  return out;
}

std::vector<double> TruncatedOperator::apply_row(const std::vector<double>& v) const {
  const std::size_t S = size();
  std::vector<double> out(S, 0.0);
  for (std::size_t n = 0; n < S && n < v.size(); ++n) {
    const double x = v[n];
    if (x == 0.0) continue;
    out[n] += x * b_[n];
    if (n + 1 < S) out[n + 1] += x * a_[n] * t_;
    if (n > 0) out[n - 1] += x * c_[n] / t_;
  }
  return out;
}

std::vector<double> TruncatedOperator::apply_col(const std::vector<double>& v) const {
  const std::size_t S = size();
  std::vector<double> out(S, 0.0);
  auto at = [&](std::size_t i) { return i < v.size() ? v[i] : 0.0; };
  for (std::size_t n = 0; n < S; ++n) {
    double s = b_[n] * at(n);
    if (n + 1 < S) s += a_[n] * t_ * at(n + 1);
    if (n > 0) s += c_[n] / t_ * at(n - 1);
    out[n] = s;
  }
  return out;
}

void TruncatedOperator::apply_row(ScaledVector& v) const {
  v.v = apply_row(v.v);
  v.normalize();
}

void TruncatedOperator::apply_col(ScaledVector& v) const {
  v.v = apply_col(v.v);
  v.normalize();
}

Boundary truncate_boundary(const WeightModel& m, double tail_tol) {
  if (!m.alpha || !m.beta) throw DomainError("weight model is incomplete");
  return {truncate_sequence(m.alpha, tail_tol, "alpha"),
          truncate_sequence(m.beta, tail_tol, "beta")};
}

std::size_t transfer_size(const Boundary& bd, std::size_t L) {
  return bd.cap() + L + 1;
}

std::vector<MotzkinPath> enumerate_paths(std::size_t L, int m, int n) {
  if (L > kMaxEnumerationLength) {
    throw CapacityError("enumeration is limited to L <= " +
                        std::to_string(kMaxEnumerationLength));
  }
  if (m < 0 || n < 0) throw DomainError("endpoints must be nonnegative");
  std::vector<MotzkinPath> out;
  std::vector<int> h{m};
  const auto rec = [&](auto&& self) -> void {
    const std::size_t k = h.size() - 1;
    if (k == L) {
      if (h.back() == n) out.emplace_back(h);
      return;
    }
    const std::size_t remaining = L - k - 1;
    for (int d : {1, 0, -1}) {
      const int next = h.back() + d;
      if (next < 0) continue;
      if (static_cast<std::size_t>(std::abs(next - n)) > remaining) continue;
      h.push_back(next);
      self(self);
      h.pop_back();
    }
  };
  if (static_cast<std::size_t>(std::abs(m - n)) <= L) rec(rec);
  std::sort(out.begin(), out.end());
  return out;
}

double path_weight(const MotzkinPath& p, const WeightModel& m) {
  double w = 1.0;
  for (std::size_t k = 1; k < p.altitudes().size(); ++k) {
    const auto h = static_cast<std::size_t>(p[k - 1]);
    const int d = p[k] - p[k - 1];
    w *= d > 0 ? m.a(h) : (d == 0 ? m.b(h) : m.c(h));
  }
  return w;
}

int horizontal_count(const MotzkinPath& p) {
  int h = 0;
  for (std::size_t k = 1; k < p.altitudes().size(); ++k) h += p[k] == p[k - 1];
  return h;
}

double partition_weight(std::size_t L, int m, int n, const WeightModel& model,
                        std::size_t height_cap) {
  if (m < 0 || n < 0) throw DomainError("endpoints must be nonnegative");
  const auto mm = static_cast<std::size_t>(m);
  const auto nn = static_cast<std::size_t>(n);
  const std::size_t need = std::max({mm, nn, (mm + nn + L) / 2});
  if (height_cap < need) {
    throw CapacityError("height_cap " + std::to_string(height_cap) +
                        " cannot hold paths reaching height " + std::to_string(need));
  }
  const TruncatedOperator op(model, height_cap + 1);
  std::vector<double> v(height_cap + 1, 0.0);
  v[mm] = 1.0;
  for (std::size_t k = 0; k < L; ++k) v = op.apply_row(v);
  if (!std::isfinite(v[nn])) throw OverflowError("partition weight overflowed");
  return v[nn];
}

ScaledValue log_normalizing_constant(std::size_t L, const WeightModel& model,
                                     const TransferPolicy& policy) {
  const Setup st = prepare(L, model, policy);
  const TruncatedOperator op(model, st.size);
  ScaledVector r{padded(st.bd.alpha, st.size, 1.0), 0.0};
  r.normalize();
  for (std::size_t k = 0; k < L; ++k) op.apply_row(r);
  return dot(r, padded(st.bd.beta, st.size, 1.0));
}

double normalizing_constant(std::size_t L, const WeightModel& model,
                            const TransferPolicy& policy) {
  const double v = log_normalizing_constant(L, model, policy).value();
  if (!std::isfinite(v)) throw OverflowError("normalizing constant overflows a double");
  return v;
}

double matrix_ansatz_expectation(double z0, double z1,
                                 const std::vector<double>& t,
                                 const std::vector<double>& s, std::size_t L,
                                 const WeightModel& model,
                                 const TransferPolicy& policy) {
  check_expectation_args(z0, z1, t, s, L);
  const Setup st = prepare(L, model, policy);
  const TruncatedOperator op(model, st.size);
  Sides num = build_sides(z0, z1, t, s, op, st.bd);
  for (std::size_t k = 0; k < L - 2 * t.size(); ++k) op.apply_row(num.row);
  ScaledVector den{padded(st.bd.alpha, st.size, 1.0), 0.0};
  den.normalize();
  for (std::size_t k = 0; k < L; ++k) op.apply_row(den);
  double sn = 1.0;
  double sd = 1.0;
  const double ln = num.row.dot_log(num.col.v, sn) + num.col.log_scale;
  const double ld = den.dot_log(padded(st.bd.beta, st.size, 1.0), sd);
  if (std::isinf(ld)) throw OverflowError("normalizing constant vanished");
  if (std::isinf(ln) && ln < 0) return 0.0;
  return sn * sd * std::exp(ln - ld);
}

namespace {

// Mantissas of the integral of (x/B)^e Psi0 Psi1 dnu with
// Psi0 = sum row_m p_m and Psi1 = sum col_n [n+1]_q p_n.
double integral_core(const std::vector<double>& row, const std::vector<double>& col,
                     std::size_t e, const QModelParams& p,
                     const quad::Policy& quad_policy) {
  auto last_nonzero = [](const std::vector<double>& v) {
    std::size_t k = v.size();
    while (k > 0 && v[k - 1] == 0.0) --k;
    return k;
  };
  const std::size_t d0 = last_nonzero(row);
  const std::size_t d1 = last_nonzero(col);
  if (d0 == 0 || d1 == 0) return 0.0;
  const std::size_t deg = std::max(d0, d1) - 1;
  std::vector<double> bracket(deg + 1);
  for (std::size_t n = 0; n <= deg; ++n) bracket[n] = q_bracket(n + 1, p.q);
  const double B = p.support().B;
  const auto res = ascpoly::integrate_nu(
      [&](double y) {
        const auto poly = ascpoly::motzkin_poly_all(deg, y, p);
        double psi0 = 0.0;
        for (std::size_t m = 0; m < d0; ++m) psi0 += row[m] * poly[m];
        double psi1 = 0.0;
        for (std::size_t n = 0; n < d1; ++n) psi1 += col[n] * bracket[n] * poly[n];
        return std::pow(y / B, static_cast<double>(e)) * psi0 * psi1;
      },
      p, quad_policy);
  return res.value;
}

const QModelParams& require_q(const WeightModel& model) {
  if (!model.q_params) {
    throw DomainError("the integral representation requires a q-model");
  }
  return *model.q_params;
}

}  // namespace

double integral_normalizing_constant(std::size_t L, const WeightModel& model,
                                     const quad::Policy& quad_policy,
                                     const TransferPolicy& policy) {
  const QModelParams& p = require_q(model);
  const Boundary bd = truncate_boundary(model, policy.tail_tol);
  const double core = integral_core(bd.alpha, bd.beta, L, p, quad_policy);
  const double v = core * std::pow(p.support().B, static_cast<double>(L));
  if (!std::isfinite(v)) throw OverflowError("normalizing constant overflows a double");
  return v;
}

double integral_expectation(double z0, double z1, const std::vector<double>& t,
                            const std::vector<double>& s, std::size_t L,
                            const WeightModel& model,
                            const quad::Policy& quad_policy,
                            const TransferPolicy& policy) {
  const QModelParams& p = require_q(model);
  check_expectation_args(z0, z1, t, s, L);
  const Boundary bd = truncate_boundary(model, policy.tail_tol);
  const std::size_t K = t.size();
  const TruncatedOperator op(model, bd.cap() + K + 1);
  const Sides num = build_sides(z0, z1, t, s, op, bd);
  const double top = integral_core(num.row.v, num.col.v, L - 2 * K, p, quad_policy);
  const double bottom = integral_core(bd.alpha, bd.beta, L, p, quad_policy);
  if (bottom == 0.0) throw AccuracyLoss("normalizing integral vanished");
  const double B = p.support().B;
  return top / bottom *
         std::exp(num.row.log_scale + num.col.log_scale -
                  2.0 * static_cast<double>(K) * std::log(B));
}

PathSampler::PathSampler(std::size_t L, const WeightModel& model,
                         const TransferPolicy& policy)
    : L_(L), op_(model, prepare(L, model, policy).size) {
  const Boundary bd = truncate_boundary(model, policy.tail_tol);
  alpha_ = bd.alpha;
  const std::size_t S = op_.size();
  backward_.resize(L + 1);
  backward_[L] = padded(bd.beta, S, 1.0);
  for (std::size_t k = L; k-- > 0;) {
    ScaledVector u{op_.apply_col(backward_[k + 1]), 0.0};
    u.normalize();
    backward_[k] = std::move(u.v);
  }
}

MotzkinPath PathSampler::draw_with(const std::function<double()>& next) const {
  std::vector<int> h(L_ + 1);
  const auto& u0 = backward_[0];
  double total = 0.0;
  for (std::size_t m = 0; m < alpha_.size(); ++m) total += alpha_[m] * u0[m];
  if (!(total > 0.0)) throw AccuracyLoss("sampler start weights vanished");
  double target = next() * total;
  std::size_t cur = 0;
  for (std::size_t m = 0; m < alpha_.size(); ++m) {
    const double w = alpha_[m] * u0[m];
    if (w <= 0.0) continue;
    cur = m;
    if (target < w) break;
    target -= w;
  }
  h[0] = static_cast<int>(cur);
  const std::size_t S = op_.size();
  for (std::size_t k = 0; k < L_; ++k) {
    const auto& u = backward_[k + 1];
    const double w_up = cur + 1 < S ? op_.a(cur) * u[cur + 1] : 0.0;
    const double w_flat = op_.b(cur) * u[cur];
    const double w_down = cur > 0 ? op_.c(cur) * u[cur - 1] : 0.0;
    const double x = next() * (w_up + w_flat + w_down);
    if (x < w_up) {
      ++cur;
    } else if (x >= w_up + w_flat && w_down > 0.0) {
      --cur;
    }
    h[k + 1] = static_cast<int>(cur);
  }
  return MotzkinPath(std::move(h));
}

std::vector<MotzkinPath> PathSampler::sample(std::size_t count,
                                             std::uint64_t seed) const {
  std::vector<MotzkinPath> out(count);
  const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t c = first; c < chunks; c += stride) {
      std::mt19937_64 rng(stream_seed(seed, c));
      const std::size_t end = std::min(count, (c + 1) * kSampleChunk);
      for (std::size_t i = c * kSampleChunk; i < end; ++i) out[i] = draw(rng);
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), chunks);
  if (workers <= 1) {
    run(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  for (auto& th : pool) th.join();
  return out;
}

MotzkinPath sample_path(std::size_t L, const WeightModel& model,
                        std::uint64_t seed, const TransferPolicy& policy) {
  return PathSampler(L, model, policy).sample(1, seed).front();
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

void check_summability(const WeightModel& model, double tail_tol) {
  if (model.q_params) model.q_params->validate();
  model.validate();
  (void)truncate_boundary(model, tail_tol);
}

}  // namespace qmotzkin::motzkin
