#include "qmotzkin/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmotzkin/chains.hpp"
#include "qmotzkin/errors.hpp"
#include "qmotzkin/kernels.hpp"
#include "qmotzkin/motzkin.hpp"
#include "qmotzkin/qspecial.hpp"

namespace qmotzkin::cli {

namespace {

using qspecial::Complex;
using qspecial::QBase;

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxVerifyLength = 8;

const std::vector<std::string> kSubcommands{"enumerate", "sample",     "chain",
                                            "verify",    "locallimit", "specialfn"};

const std::vector<std::string> kSpecialFunctions{
    "k0",         "k_imag",   "qgamma", "qpoch", "asc",       "killed_bm",
    "yakubovich", "bessel3d", "zeta",   "xi0",   "zeta0"};

const std::vector<std::string> kSettingKeys{
    "q",    "sigma", "rho0",  "rho1",  "c",        "weights",    "L",    "m",
    "n",    "N",     "t",     "x",     "y",        "u",          "K",    "count",
    "steps", "fn",   "tol",   "tail-tol", "height-cap", "seed", "out",  "format",
    "regime", "fault"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw DomainError("invalid value for " + key + ": '" + v + "'");
  }
  return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw DomainError("invalid integer for " + key + ": '" + v + "'");
  }
  return out;
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int<std::size_t>(key, trim(item)));
  return out;
}

std::string join_path(const motzkin::MotzkinPath& p) {
  std::string s;
  for (std::size_t k = 0; k < p.altitudes().size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(p[k]);
  }
  return s;
}

motzkin::WeightModel weight_model(const RunConfig& cfg) {
  if (cfg.weights == "unit") return motzkin::WeightModel::unit(cfg.model.rho0, cfg.model.rho1);
  return motzkin::WeightModel::q_model(cfg.model);
}

motzkin::TransferPolicy transfer_policy(const RunConfig& cfg) {
  motzkin::TransferPolicy p;
  p.tail_tol = cfg.tail_tol;
  p.height_cap = cfg.height_cap;
  return p;
}

quad::Policy quad_policy(const RunConfig& cfg) {
  quad::Policy p;
  p.rel_tol = cfg.rel_tol;
  return p;
}

double rel_dev(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// E[z0^{g_0} z1^{g_L}] by summing over every path with endpoints up to H.
double brute_endpoint_expectation(std::size_t L, const motzkin::WeightModel& model,
                                  double z0, double z1, int H) {
  double num = 0.0;
  double den = 0.0;
  const int span = static_cast<int>(L);
  for (int m = 0; m <= H; ++m) {
    for (int n = std::max(0, m - span); n <= std::min(H, m + span); ++n) {
      double w = 0.0;
      for (const auto& p : motzkin::enumerate_paths(L, m, n)) w += motzkin::path_weight(p, model);
      w *= model.alpha(static_cast<std::size_t>(m)) * model.beta(static_cast<std::size_t>(n));
      num += w * std::pow(z0, m) * std::pow(z1, n);
      den += w;
    }
  }
  return num / den;
}

int brute_height(const ascpoly::QModelParams& p, std::size_t L) {
  const double rho = std::max(p.rho0, p.rho1);
  if (rho == 0.0) return static_cast<int>(L);
  const double h = std::log(1e-17) / std::log(rho) + 2.0 * std::log(1e4) / -std::log(rho);
  if (h > 150.0) throw DomainError("verify needs rho0, rho1 <= 0.7");
  return static_cast<int>(std::ceil(h)) + static_cast<int>(L);
}

struct Check {
  std::string name;
  double deviation;
  double tolerance;
};

Check check_motzkin_numbers() {
  const long long want[] = {1, 1, 2, 4, 9, 21, 51, 127};
  double dev = 0.0;
  for (std::size_t L = 0; L < 8; ++L) {
    const auto got = static_cast<long long>(motzkin::enumerate_paths(L, 0, 0).size());
    dev = std::max(dev, static_cast<double>(std::llabs(got - want[L])));
  }
  return {"motzkin_numbers", dev, 0.0};
}

Check check_matrix_vs_enumeration(const RunConfig& cfg) {
  const auto model = motzkin::WeightModel::q_model(cfg.model);
  ascpoly::QModelParams other = cfg.model;
  if (cfg.fault == "sigma") other.sigma *= 0.9;
  const auto brute_model = motzkin::WeightModel::q_model(other);
  const int H = brute_height(cfg.model, cfg.L);
  double dev = 0.0;
  for (auto [z0, z1] : {std::pair{0.7, 0.5}, std::pair{1.0, 0.3}, std::pair{0.4, 1.0}}) {
    const double lhs = motzkin::matrix_ansatz_expectation(z0, z1, {}, {}, cfg.L, model,
                                                          transfer_policy(cfg));
    const double rhs = brute_endpoint_expectation(cfg.L, brute_model, z0, z1, H);
    dev = std::max(dev, rel_dev(lhs, rhs));
  }
  return {"matrix_vs_enumeration", dev, 1e-10};
}

Check check_integral_vs_matrix(const RunConfig& cfg) {
  const auto model = motzkin::WeightModel::q_model(cfg.model);
  std::vector<double> t;
  std::vector<double> s;
  if (cfg.L >= 2) {
    t = {0.9};
    s = {0.8};
  }
  const double lhs = motzkin::integral_expectation(0.7, 0.6, t, s, cfg.L, model,
                                                   quad_policy(cfg), transfer_policy(cfg));
  const double rhs = motzkin::matrix_ansatz_expectation(0.7, 0.6, t, s, cfg.L, model,
                                                        transfer_policy(cfg));
  return {"integral_vs_matrix", rel_dev(lhs, rhs), 1e-7};
}

Check check_viennot(const RunConfig& cfg) {
  const auto model = motzkin::WeightModel::q_model(cfg.model);
  const QBase q(cfg.model.q);
  double dev = 0.0;
  for (std::size_t m = 0; m <= 3; ++m) {
    for (std::size_t n = 0; n <= 3; ++n) {
      const double qn = qspecial::q_number(n + 1, q);
      const auto f = [&](double x) {
        return ascpoly::motzkin_poly_eval(m, x, cfg.model) * qn *
               ascpoly::motzkin_poly_eval(n, x, cfg.model) *
               std::pow(x, static_cast<double>(cfg.L));
      };
      const double lhs = ascpoly::integrate_nu(f, cfg.model, quad_policy(cfg)).value;
      const double rhs = motzkin::partition_weight(cfg.L, static_cast<int>(m),
                                                   static_cast<int>(n), model, cfg.L + 4);
      dev = std::max(dev, rhs == 0.0 ? std::abs(lhs) : rel_dev(lhs, rhs));
    }
  }
  return {"viennot_identity", dev, 1e-7};
}

Check check_row_stochastic(const RunConfig& cfg) {
  const chains::ChainSpec spec(cfg.model, 1024);
  double dev = 0.0;
  for (std::size_t n = 0; n <= 1000; ++n) {
    const auto r = spec.row(n);
    dev = std::max(dev, std::abs(r.down + r.flat + r.up - 1.0));
  }
  return {"row_stochastic", dev, 1e-10};
}

Check check_initial_normalizer(const RunConfig& cfg) {
  const double rho = cfg.model.rho0;
  if (rho == 0.0) return {"initial_normalizer", 0.0, 1e-9};
  const auto s = ascpoly::s_values(4000, cfg.model);
  double sum = 0.0;
  double p = 1.0;
  for (double sn : s) {
    sum += p * sn;
    p *= rho;
    if (p < 1e-300) break;
  }
  return {"initial_normalizer", rel_dev(sum, chains::initial_normalizer(rho, cfg.model)), 1e-9};
}

Check check_theta_triple_product() {
  const Complex I(0.0, 1.0);
  const Complex tau(0.3, 0.8);
  const Complex v(0.1, 0.2);
  const Complex n2 = std::exp(2.0 * I * kPi * tau);
  const Complex e = std::exp(2.0 * kPi * I * v);
  Complex prod = 1.0;
  Complex p = n2;
  for (int k = 1; k < 400; ++k) {
    prod *= (1.0 - p) * (1.0 - p * e) * (1.0 - p / e);
    p *= n2;
  }
  const Complex rhs = 2.0 * std::exp(I * kPi * tau / 4.0) * std::sin(kPi * v) * prod;
  const Complex lhs = qspecial::theta1(v, tau);
  return {"theta_triple_product", std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)), 1e-8};
}

Check check_theta_inversion() {
  const Complex I(0.0, 1.0);
  const Complex tau = I * kPi * 5.0;
  const Complex v(0.2, -0.4);
  const Complex lhs = qspecial::theta1(v, tau);
  const Complex rhs = I * std::sqrt(I / tau) * std::exp(-I * kPi * v * v / tau) *
                      qspecial::theta1(v / tau, -1.0 / tau);
  return {"theta_inversion", std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), 1e-8};
}

nlohmann::json cell_json(const Cell& c) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, c);
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return std::to_string(v);
        }
      },
      c);
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end()) {
    throw DomainError("unknown subcommand '" + subcommand + "'");
  }
  if (!(c > 0.0)) throw DomainError("c must be positive");
  if (weights != "q" && weights != "unit") throw DomainError("weights must be q or unit");
  if (N.empty()) throw DomainError("N list must be nonempty");
  for (std::size_t v : N) {
    if (v == 0) throw DomainError("N entries must be positive");
  }
  if (!(t > 0.0)) throw DomainError("t must be positive");
  if (m < 0 || n < 0) throw DomainError("m and n must be nonnegative");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("tol must lie in (0, 1)");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw DomainError("tail-tol must lie in (0, 1)");
  if (!fault.empty() && fault != "sigma") throw DomainError("unknown fault '" + fault + "'");
  if (std::find(kSpecialFunctions.begin(), kSpecialFunctions.end(), fn) ==
      kSpecialFunctions.end()) {
    throw DomainError("unknown function '" + fn + "'");
  }
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "q") {
    cfg.model.q = parse_double(key, v);
  } else if (key == "sigma") {
    cfg.model.sigma = parse_double(key, v);
  } else if (key == "rho0") {
    cfg.model.rho0 = parse_double(key, v);
  } else if (key == "rho1") {
    cfg.model.rho1 = parse_double(key, v);
  } else if (key == "c") {
    cfg.c = parse_double(key, v);
  } else if (key == "weights") {
    cfg.weights = v;
  } else if (key == "L") {
    cfg.L = parse_int<std::size_t>(key, v);
  } else if (key == "m") {
    cfg.m = parse_int<int>(key, v);
  } else if (key == "n") {
    cfg.n = parse_int<int>(key, v);
  } else if (key == "N") {
    cfg.N = parse_list(key, v);
  } else if (key == "t") {
    cfg.t = parse_double(key, v);
  } else if (key == "x") {
    cfg.x = parse_double(key, v);
  } else if (key == "y") {
    cfg.y = parse_double(key, v);
  } else if (key == "u") {
    cfg.u = parse_double(key, v);
  } else if (key == "K") {
    cfg.K = parse_int<std::size_t>(key, v);
  } else if (key == "count") {
    cfg.count = parse_int<std::size_t>(key, v);
  } else if (key == "steps") {
    cfg.steps = parse_int<std::size_t>(key, v);
  } else if (key == "fn") {
    cfg.fn = v;
  } else if (key == "tol") {
    cfg.rel_tol = parse_double(key, v);
  } else if (key == "tail-tol") {
    cfg.tail_tol = parse_double(key, v);
  } else if (key == "height-cap") {
    cfg.height_cap = parse_int<std::size_t>(key, v);
  } else if (key == "seed") {
    cfg.seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "out") {
    cfg.out = v;
  } else if (key == "format") {
    if (v == "csv") {
      cfg.format = Format::Csv;
    } else if (v == "json") {
      cfg.format = Format::Json;
    } else {
      throw DomainError("format must be csv or json");
    }
  } else if (key == "regime") {
    if (v == "fixed-q") {
      cfg.regime = Regime::FixedQ;
    } else if (v == "q-to-1") {
      cfg.regime = Regime::QToOne;
    } else {
      throw DomainError("regime must be fixed-q or q-to-1");
    }
  } else if (key == "fault") {
    cfg.fault = v;
  } else {
    throw DomainError("unknown setting '" + key + "'");
  }
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg) {
  std::string n_list;
  for (std::size_t i = 0; i < cfg.N.size(); ++i) {
    if (i) n_list += ',';
    n_list += std::to_string(cfg.N[i]);
  }
  return {
      {"subcommand", cfg.subcommand},
      {"q", format_double(cfg.model.q)},
      {"sigma", format_double(cfg.model.sigma)},
      {"rho0", format_double(cfg.model.rho0)},
      {"rho1", format_double(cfg.model.rho1)},
      {"c", format_double(cfg.c)},
      {"weights", cfg.weights},
      {"L", std::to_string(cfg.L)},
      {"m", std::to_string(cfg.m)},
      {"n", std::to_string(cfg.n)},
      {"N", n_list},
      {"t", format_double(cfg.t)},
      {"x", format_double(cfg.x)},
      {"y", format_double(cfg.y)},
      {"u", format_double(cfg.u)},
      {"K", std::to_string(cfg.K)},
      {"count", std::to_string(cfg.count)},
      {"steps", std::to_string(cfg.steps)},
      {"fn", cfg.fn},
      {"tol", format_double(cfg.rel_tol)},
      {"tail-tol", format_double(cfg.tail_tol)},
      {"height-cap", std::to_string(cfg.height_cap)},
      {"seed", std::to_string(cfg.seed)},
      {"format", cfg.format == Format::Csv ? "csv" : "json"},
      {"regime", cfg.regime == Regime::FixedQ ? "fixed-q" : "q-to-1"},
      {"fault", cfg.fault},
  };
}

Table cmd_enumerate(const RunConfig& cfg) {
  const auto model = weight_model(cfg);
  const auto paths = motzkin::enumerate_paths(cfg.L, cfg.m, cfg.n);
  const double boundary = model.alpha(static_cast<std::size_t>(cfg.m)) *
                          model.beta(static_cast<std::size_t>(cfg.n));
  const double C = paths.empty() ? 1.0
                                 : motzkin::normalizing_constant(cfg.L, model,
                                                                 transfer_policy(cfg));
  Table table{{"path", "weight", "probability"}, {}, true};
  for (const auto& p : paths) {
    const double w = motzkin::path_weight(p, model);
    table.rows.push_back({join_path(p), w, w * boundary / C});
  }
  return table;
}

Table cmd_sample(const RunConfig& cfg) {
  const motzkin::PathSampler sampler(cfg.L, weight_model(cfg), transfer_policy(cfg));
  const auto paths = sampler.sample(cfg.count, cfg.seed);
  Table table{{"index", "path"}, {}, true};
  for (std::size_t i = 0; i < paths.size(); ++i) {
    table.rows.push_back({static_cast<long long>(i), join_path(paths[i])});
  }
  return table;
}

Table cmd_chain(const RunConfig& cfg) {
  const std::size_t height = cfg.height_cap ? cfg.height_cap : 4096 + cfg.steps;
  const chains::ChainSpec spec(cfg.model, height);
  const auto path = chains::simulate_chain(spec, cfg.steps, cfg.seed);
  Table table{{"step", "state", "increment"}, {}, true};
  for (std::size_t k = 0; k < path.size(); ++k) {
    const long long inc = k ? path[k] - path[k - 1] : 0;
    table.rows.push_back({static_cast<long long>(k), static_cast<long long>(path[k]), inc});
  }
  return table;
}

Table cmd_verify(const RunConfig& cfg) {
  if (cfg.L > kMaxVerifyLength) {
    throw DomainError("verify needs L <= " + std::to_string(kMaxVerifyLength));
  }
  const std::vector<Check> checks{
      check_motzkin_numbers(),        check_matrix_vs_enumeration(cfg),
      check_integral_vs_matrix(cfg),  check_viennot(cfg),
      check_row_stochastic(cfg),      check_initial_normalizer(cfg),
      check_theta_triple_product(),   check_theta_inversion(),
  };
  Table table{{"check", "deviation", "tolerance", "pass"}, {}, true};
  for (const auto& c : checks) {
    const bool pass = std::isfinite(c.deviation) && c.deviation <= c.tolerance;
    table.ok = table.ok && pass;
    table.rows.push_back({c.name, c.deviation, c.tolerance, pass});
  }
  return table;
}

Table cmd_locallimit(const RunConfig& cfg) {
  std::vector<std::future<kernels::LimitResult>> jobs;
  for (std::size_t N : cfg.N) {
    jobs.push_back(std::async(std::launch::async, [&cfg, N]() {
      if (cfg.regime == Regime::FixedQ) {
        return kernels::local_limit_error_fixed_q(N, cfg.t, cfg.x, cfg.y, cfg.model);
      }
      return kernels::local_limit_error_q_to_1(N, cfg.t, cfg.x, cfg.y, cfg.model.sigma);
    }));
  }
  Table table{{"N", "t", "x", "y", "lhs", "rhs", "rel_err"}, {}, true};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto r = jobs[i].get();
    table.rows.push_back({static_cast<long long>(cfg.N[i]), cfg.t, cfg.x, cfg.y, r.lhs, r.rhs,
                          r.rel_err});
  }
  return table;
}

Table cmd_specialfn(const RunConfig& cfg) {
  const kernels::KernelQuery kq{cfg.t, cfg.x, cfg.y, cfg.model.sigma};
  double value = 0.0;
  const std::string& fn = cfg.fn;
  if (fn == "k0") {
    value = kernels::bessel_k0(cfg.x);
  } else if (fn == "k_imag") {
    value = qspecial::bessel_k_imag(cfg.u, cfg.x);
  } else if (fn == "qgamma") {
    value = qspecial::q_gamma(Complex(cfg.x, cfg.u), QBase(cfg.model.q)).real();
  } else if (fn == "qpoch") {
    value = qspecial::qpoch_infinite(Complex(cfg.x, cfg.u), QBase(cfg.model.q)).real();
  } else if (fn == "asc") {
    value = ascpoly::asc_eval(static_cast<std::size_t>(cfg.n), cfg.x, cfg.model.to_asc());
  } else if (fn == "killed_bm") {
    value = kernels::killed_bm_kernel(cfg.t, cfg.x, cfg.y);
  } else if (fn == "yakubovich") {
    value = kernels::yakubovich_kernel(kq, quad_policy(cfg));
  } else if (fn == "bessel3d") {
    value = kernels::bessel3d_transition(kq);
  } else if (fn == "zeta") {
    value = kernels::zeta_transition(kq, quad_policy(cfg));
  } else if (fn == "xi0") {
    value = kernels::xi0_density(cfg.x, cfg.c);
  } else {
    value = kernels::zeta0_density(cfg.x, cfg.c);
  }
  return Table{{"function", "value"}, {{fn, value}}, true};
}

Table execute(const RunConfig& cfg) {
  cfg.validate();
  const std::string& s = cfg.subcommand;
  if (s == "enumerate") return cmd_enumerate(cfg);
  if (s == "sample") return cmd_sample(cfg);
  if (s == "chain") return cmd_chain(cfg);
  if (s == "verify") return cmd_verify(cfg);
  if (s == "locallimit") return cmd_locallimit(cfg);
  return cmd_specialfn(cfg);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string render(const Table& table, const RunConfig& cfg) {
  if (cfg.format == Format::Json) {
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [k, v] : describe(cfg)) config[k] = v;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
      rows.push_back(std::move(obj));
    }
    nlohmann::json doc{{"config", config}, {"rows", rows}};
    return doc.dump(2) + "\n";
  }
  std::string out;
  for (const auto& [k, v] : describe(cfg)) out += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "," : "") + table.columns[i];
  }
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += "\n";
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted Motzkin paths, boundary chains and limit kernels", "qmotzkin"};
  std::string command;
  app.add_option("command", command, "enumerate | sample | chain | verify | locallimit | specialfn")
      ->required()
      ->check(CLI::IsMember(kSubcommands));
  std::map<std::string, std::string> raw;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  for (const auto& key : kSettingKeys) {
    options.emplace_back(key, app.add_option("--" + key, raw[key]));
  }
  std::string config_path;
  app.add_option("--config", config_path, "key=value settings file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }

  try {
    RunConfig cfg;
    cfg.subcommand = command;
    if (!config_path.empty()) {
      for (const auto& [k, v] : read_config_file(config_path)) apply_setting(cfg, k, v);
    }
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) apply_setting(cfg, key, raw[key]);
    }
    const Table table = execute(cfg);
    const std::string text = render(table, cfg);
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream file(cfg.out, std::ios::binary);
      if (!file) throw DomainError("cannot write '" + cfg.out + "'");
      file << text;
    }
    return table.ok ? kExitOk : kExitCheckFailed;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const Error& e) {
    err << "numeric guard: " << e.what() << "\n";
    return kExitNumericGuard;
  }
}

}  // namespace qmotzkin::cli
