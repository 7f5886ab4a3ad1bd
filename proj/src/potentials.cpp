#include "hosc/potentials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "hosc/hermite.hpp"
#include "hosc/special.hpp"

namespace hosc::potentials {

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

PotentialSpec base(Family family, std::map<std::string, double> params, double lo, double hi) {
  PotentialSpec spec;
  spec.family = family;
  spec.params = std::move(params);
  spec.support_lo = lo;
  spec.support_hi = hi;
  return spec;
}

const hermite::QuadratureRule& reference_gl20() {
  static const hermite::QuadratureRule rule = hermite::gauss_legendre_rule(20, -1.0, 1.0);
  return rule;
}

double gl20(const std::function<double(double)>& f, double a, double b) {
  const auto& rule = reference_gl20();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  special::CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * acc.value();
}

double golden_max(const std::function<double(double)>& g, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  while (b - a > tol) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  return 0.5 * (a + b);
}

// Clipped integration window for integrands carrying e^{-x^2}.
constexpr double kGaussianWindow = 40.0;

}  // namespace

double PotentialSpec::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) throw std::invalid_argument("potential has no parameter '" + name + "'");
  return it->second;
}

std::string family_name(Family family) {
  switch (family) {
    case Family::zero: return "zero";
    case Family::gauss: return "gauss";
    case Family::box: return "box";
    case Family::sech2: return "sech2";
    case Family::meanzero: return "meanzero";
    case Family::custom_samples: return "custom_samples";
  }
  return "unknown";
}

std::string PotentialSpec::to_string() const {
  std::string out = family_name(family) + "(";
  if (family == Family::custom_samples) {
    out += "samples=" + std::to_string(sample_x.size());
  } else {
    // parameters in the conventional order of each family
    std::vector<std::string> order;
    switch (family) {
      case Family::gauss:
      case Family::sech2: order = {"a", "s"}; break;
      case Family::box: order = {"k", "d"}; break;
      case Family::meanzero: order = {"a"}; break;
      default: break;
    }
    bool first = true;
    for (const auto& name : order) {
      if (!first) out += ",";
      first = false;
      out += name + "=" + format_number(params.at(name));
    }
  }
  return out + ")";
}

PotentialSpec make_zero() { return base(Family::zero, {}, 0.0, 0.0); }

PotentialSpec make_gauss(double a, double s) {
  require(std::isfinite(a), "gauss: amplitude a must be finite");
  require(std::isfinite(s) && s > 0.0, "gauss: scale s must be positive");
  const double r = s * std::sqrt(37.0 + std::log1p(std::abs(a)));
  return base(Family::gauss, {{"a", a}, {"s", s}}, -r, r);
}

PotentialSpec make_box(double k, double d) {
  require(std::isfinite(k) && k > 0.0, "box: strength k must be positive");
  require(std::isfinite(d) && d > 0.0, "box: width d must be positive");
  return base(Family::box, {{"k", k}, {"d", d}}, -0.5 * d, 0.5 * d);
}

PotentialSpec make_sech2(double a, double s) {
  require(std::isfinite(a), "sech2: amplitude a must be finite");
  require(std::isfinite(s) && s > 0.0, "sech2: scale s must be positive");
  return base(Family::sech2, {{"a", a}, {"s", s}}, -40.0 * s, 40.0 * s);
}

PotentialSpec make_meanzero(double a) {
  require(std::isfinite(a), "meanzero: amplitude a must be finite");
  const double r = std::sqrt(45.0 + std::log1p(std::abs(a)));
  return base(Family::meanzero, {{"a", a}}, -r, r);
}

PotentialSpec make_custom(std::vector<double> x, std::vector<double> q) {
  require(x.size() == q.size(), "custom_samples: x and q lengths differ");
  require(x.size() >= 2, "custom_samples: need at least two samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(std::isfinite(x[i]) && std::isfinite(q[i]), "custom_samples: non-finite sample");
    if (i > 0) require(x[i] > x[i - 1], "custom_samples: x must be strictly increasing");
  }
  PotentialSpec spec = base(Family::custom_samples, {}, x.front(), x.back());
  spec.sample_x = std::move(x);
  spec.sample_q = std::move(q);
  return spec;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PotentialSpec run() {
    skip();
    const std::size_t family_at = pos_;
    const std::string family = identifier("family name");
    skip();
    expect('(');
    std::map<std::string, double> params;
    skip();
    if (peek() != ')') {
      while (true) {
        skip();
        const std::size_t name_at = pos_;
        const std::string name = identifier("parameter name");
        skip();
        expect('=');
        skip();
        const double value = number();
        if (!params.emplace(name, value).second) {
          throw ParseError("duplicate parameter '" + name + "' at position " + std::to_string(name_at));
        }
        skip();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect(')');
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    return build(family, family_at, params);
  }

 private:
  static PotentialSpec build(const std::string& family, std::size_t at,
                             const std::map<std::string, double>& params) {
    const auto take = [&](std::initializer_list<const char*> names) {
      std::set<std::string> allowed(names.begin(), names.end());
      for (const auto& [name, value] : params) {
        if (!allowed.count(name)) throw ParseError("unknown parameter '" + name + "' for " + family);
      }
      std::vector<double> out;
      for (const char* name : names) {
        const auto it = params.find(name);
        if (it == params.end()) throw ParseError("missing parameter '" + std::string(name) + "' for " + family);
        out.push_back(it->second);
      }
      return out;
    };
    if (family == "zero") {
      take({});
      return make_zero();
    }
    if (family == "gauss") {
      const auto p = take({"a", "s"});
      return make_gauss(p[0], p[1]);
    }
    if (family == "box") {
      const auto p = take({"k", "d"});
      return make_box(p[0], p[1]);
    }
    if (family == "sech2") {
      const auto p = take({"a", "s"});
      return make_sech2(p[0], p[1]);
    }
    if (family == "meanzero") {
      const auto p = take({"a"});
      return make_meanzero(p[0]);
    }
    throw ParseError("unknown family '" + family + "' at position " + std::to_string(at));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const auto word = [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '+' || c == '-';
    };
    std::string token = "end of input";
    if (pos_ < text_.size()) {
      std::size_t end = pos_ + 1;
      if (word(text_[pos_])) {
        while (end < text_.size() && word(text_[end])) ++end;
      }
      token = std::string(text_.substr(pos_, end - pos_));
    }
    throw ParseError(what + ": unexpected token '" + token + "' at position " + std::to_string(pos_));
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier(const char* what) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_ || std::isdigit(static_cast<unsigned char>(text_[start]))) {
      pos_ = start;
      fail(std::string("expected ") + what);
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    std::size_t start = pos_;
    if (peek() == '+') ++start;
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + text_.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || !std::isfinite(value)) fail("expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

PotentialSpec parse(std::string_view text) { return Parser(text).run(); }

double evaluate(const PotentialSpec& spec, double x) {
  switch (spec.family) {
    case Family::zero: return 0.0;
    case Family::gauss: {
      const double u = x / spec.param("s");
      return spec.param("a") * std::exp(-u * u);
    }
    case Family::box: {
      const double d = spec.param("d");
      return std::abs(x) <= 0.5 * d ? spec.param("k") / d : 0.0;
    }
    case Family::sech2: {
      const double c = std::cosh(x / spec.param("s"));
      return std::isfinite(c) ? spec.param("a") / (c * c) : 0.0;
    }
    case Family::meanzero: return spec.param("a") * (2.0 * x * x - 1.0) * std::exp(-x * x);
    case Family::custom_samples: {
      const auto& xs = spec.sample_x;
      if (x < xs.front() || x > xs.back()) return 0.0;
      const auto it = std::upper_bound(xs.begin(), xs.end(), x);
      if (it == xs.end()) return spec.sample_q.back();
      const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
      const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
      return (1.0 - t) * spec.sample_q[i] + t * spec.sample_q[i + 1];
    }
  }
  throw std::invalid_argument("evaluate: unknown family");
}

PotentialSpec scaled(const PotentialSpec& spec, double t) {
  require(std::isfinite(t) && t > 0.0, "scaled: factor must be positive");
  switch (spec.family) {
    case Family::zero: return spec;
    case Family::gauss: return make_gauss(t * spec.param("a"), spec.param("s"));
    case Family::box: return make_box(t * spec.param("k"), spec.param("d"));
    case Family::sech2: return make_sech2(t * spec.param("a"), spec.param("s"));
    case Family::meanzero: return make_meanzero(t * spec.param("a"));
    case Family::custom_samples: {
      std::vector<double> q = spec.sample_q;
      for (double& v : q) v *= t;
      return make_custom(spec.sample_x, std::move(q));
    }
  }
  throw std::invalid_argument("scaled: unknown family");
}

std::vector<double> breakpoints(const PotentialSpec& spec) {
  if (spec.family == Family::box) return {spec.support_lo, spec.support_hi};
  if (spec.family == Family::custom_samples) return spec.sample_x;
  return {};
}

bool is_smooth(const PotentialSpec& spec) {
  return spec.family != Family::box && spec.family != Family::custom_samples;
}

bool is_even(const PotentialSpec& spec) {
  if (spec.family != Family::custom_samples) return true;
  const auto& xs = spec.sample_x;
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (xs[i] != -xs[n - 1 - i] || spec.sample_q[i] != spec.sample_q[n - 1 - i]) return false;
  }
  return true;
}

bool certified_nonnegative(const PotentialSpec& spec) {
  switch (spec.family) {
    case Family::zero:
    case Family::box: return true;
    case Family::gauss:
    case Family::sech2: return spec.param("a") >= 0.0;
    case Family::meanzero: return spec.param("a") == 0.0;
    case Family::custom_samples:
      return std::all_of(spec.sample_q.begin(), spec.sample_q.end(), [](double v) { return v >= 0.0; });
  }
  return false;
}

bool has_closed_form(const PotentialSpec& spec) { return spec.family != Family::custom_samples; }

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                          const std::vector<double>& splits) {
  if (!(b >= a)) throw std::invalid_argument("integrate_adaptive: need a <= b");
  if (a == b) return 0.0;
  std::vector<double> cuts = {a};
  for (double c : splits) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Scale for the absolute tolerance: a coarse estimate of int |f|.
  constexpr int kCoarse = 16;
  double magnitude = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double h = (cuts[c + 1] - cuts[c]) / kCoarse;
    for (int p = 0; p < kCoarse; ++p) {
      const double lo = cuts[c] + p * h;
      magnitude += gl20([&](double x) { return std::abs(f(x)); }, lo, lo + h);
    }
  }
  if (magnitude == 0.0) return 0.0;
  const double abs_tol = rel_tol * magnitude;
  const double width = b - a;

  struct Panel {
    double lo, hi, whole;
    int depth;
  };
  constexpr int kMaxDepth = 40;
  special::CompensatedSum total;
  std::vector<Panel> stack;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double h = (cuts[c + 1] - cuts[c]) / kCoarse;
    for (int p = 0; p < kCoarse; ++p) {
      const double lo = cuts[c] + p * h;
      const double hi = p + 1 == kCoarse ? cuts[c + 1] : lo + h;
      stack.push_back({lo, hi, gl20(f, lo, hi), 0});
    }
  }
  while (!stack.empty()) {
    const Panel panel = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (panel.lo + panel.hi);
    const double left = gl20(f, panel.lo, mid);
    const double right = gl20(f, mid, panel.hi);
    const double budget = abs_tol * (panel.hi - panel.lo) / width;
    if (std::abs(left + right - panel.whole) <= budget) {
      total += left + right;
      continue;
    }
    if (panel.depth >= kMaxDepth) {
      throw IntegrationError("integrate_adaptive: tolerance not met near x = " + format_number(mid));
    }
    stack.push_back({panel.lo, mid, left, panel.depth + 1});
    stack.push_back({mid, panel.hi, right, panel.depth + 1});
  }
  return total.value();
}

double integral(const PotentialSpec& spec) {
  switch (spec.family) {
    case Family::zero: return 0.0;
    case Family::gauss: return spec.param("a") * spec.param("s") * std::sqrt(std::numbers::pi);
    case Family::box: return spec.param("k");
    case Family::sech2: return 2.0 * spec.param("a") * spec.param("s");
    case Family::meanzero: return 0.0;
    case Family::custom_samples:
      return integrate_adaptive([&](double x) { return evaluate(spec, x); }, spec.support_lo, spec.support_hi,
                                1e-10, breakpoints(spec));
  }
  throw std::invalid_argument("integral: unknown family");
}

double l1_norm(const PotentialSpec& spec) {
  if (spec.family == Family::meanzero) {
    // int |2x^2 - 1| e^{-x^2} = 4 c e^{-c^2}, c = 1/sqrt 2
    return std::abs(spec.param("a")) * 2.0 * std::numbers::sqrt2 * std::exp(-0.5);
  }
  if (spec.family == Family::custom_samples) {
    std::vector<double> splits = breakpoints(spec);
    // sign changes of the interpolant
    for (std::size_t i = 0; i + 1 < spec.sample_q.size(); ++i) {
      const double a = spec.sample_q[i];
      const double b = spec.sample_q[i + 1];
      if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
        splits.push_back(spec.sample_x[i] + a / (a - b) * (spec.sample_x[i + 1] - spec.sample_x[i]));
      }
    }
    return integrate_adaptive([&](double x) { return std::abs(evaluate(spec, x)); }, spec.support_lo,
                              spec.support_hi, 1e-10, splits);
  }
  return std::abs(integral(spec));
}

QmResult q_m_detail(const PotentialSpec& spec) {
  QmResult out;
  out.closed_form = has_closed_form(spec);
  switch (spec.family) {
    case Family::zero:
    case Family::box: return out;
    case Family::gauss:
      if (spec.param("a") >= 0.0) return out;
      if (spec.param("s") > 1.0) {
        throw UnboundedError("q_m: -q(x) e^{x^2} is unbounded for gauss with a < 0 and s > 1");
      }
      break;
    case Family::sech2:
      if (spec.param("a") >= 0.0) return out;
      throw UnboundedError("q_m: -q(x) e^{x^2} is unbounded for sech2 with a < 0");
    case Family::meanzero:
      if (spec.param("a") <= 0.0) {
        if (spec.param("a") == 0.0) return out;
        throw UnboundedError("q_m: -q(x) e^{x^2} is unbounded for meanzero with a < 0");
      }
      break;
    case Family::custom_samples:
      if (certified_nonnegative(spec)) return out;
      break;
  }

  const auto g = [&](double x) { return -evaluate(spec, x) * std::exp(x * x); };
  constexpr int kSamples = 10001;
  const double lo = spec.support_lo;
  const double hi = spec.support_hi;
  const double h = (hi - lo) / (kSamples - 1);
  int best = 0;
  double best_value = g(lo);
  for (int i = 1; i < kSamples; ++i) {
    const double v = g(lo + i * h);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = lo + std::max(best - 1, 0) * h;
  const double b = lo + std::min(best + 1, kSamples - 1) * h;
  const double x = golden_max(g, a, b, 1e-10);
  const double refined = g(x);
  out.argmax = refined >= best_value ? x : lo + best * h;
  out.value = std::max(0.0, std::max(refined, best_value));
  return out;
}

double q_m(const PotentialSpec& spec) { return q_m_detail(spec).value; }

namespace {

// int e^{-x^2} q(x) p_j(x) dx for j = 0..J.
std::vector<double> q_projections(const PotentialSpec& q, int J, int quad_nodes) {
  const auto count = static_cast<std::size_t>(J + 1);
  std::vector<double> out(count, 0.0);
  if (q.family == Family::zero) return out;
  std::vector<double> p(count);
  std::vector<special::CompensatedSum> acc(count);

  if (is_smooth(q)) {
    const int m = std::max(2 * J + 40, quad_nodes);
    const hermite::QuadratureRule rule = hermite::gauss_hermite_rule(m);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double w = rule.weights[i] * evaluate(q, rule.nodes[i]);
      if (w == 0.0) continue;
      hermite::hermite_orthonormal_all(rule.nodes[i], p);
      for (std::size_t j = 0; j < count; ++j) acc[j] += w * p[j];
    }
  } else {
    // jump-split composite Gauss-Legendre over the support, integrand e^{-x^2} q p_j
    std::vector<double> cuts = breakpoints(q);
    cuts.push_back(std::max(q.support_lo, -kGaussianWindow));
    cuts.push_back(std::min(q.support_hi, kGaussianWindow));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const double freq = std::sqrt(2.0 * J + 1.0);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = std::max(cuts[c], -kGaussianWindow);
      const double b = std::min(cuts[c + 1], kGaussianWindow);
      if (!(b > a)) continue;
      const int panels = static_cast<int>(std::ceil((b - a) * freq / 2.0)) + 2;
      const hermite::QuadratureRule rule = hermite::composite_gauss_legendre(a, b, panels, 20);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double x = rule.nodes[i];
        const double w = rule.weights[i] * std::exp(-x * x) * evaluate(q, x);
        if (w == 0.0) continue;
        hermite::hermite_orthonormal_all(x, p);
        for (std::size_t j = 0; j < count; ++j) acc[j] += w * p[j];
      }
    }
  }
  for (std::size_t j = 0; j < count; ++j) out[j] = acc[j].value();
  return out;
}

double log_norm_sq(int j) {
  // ln(sqrt(pi) 2^j j!)
  return 0.5 * std::log(std::numbers::pi) + j * std::numbers::ln2 + special::log_factorial(j);
}

}  // namespace

HermiteCoefficients hermite_coefficients(const FullPotential& v, int J, int quad_nodes) {
  if (J < 0 || J > 100) throw std::invalid_argument("hermite_coefficients: J must lie in [0, 100]");
  HermiteCoefficients out;
  out.J = J;
  out.projections = q_projections(v.q, J, quad_nodes);
  if (is_even(v.q)) {
    for (int j = 1; j <= J; j += 2) out.projections[static_cast<std::size_t>(j)] = 0.0;
  }

  // energy of the q part, for the dropped-coefficient estimate
  if (v.q.family != Family::zero) {
    const double lo = std::max(v.q.support_lo, -kGaussianWindow);
    const double hi = std::min(v.q.support_hi, kGaussianWindow);
    const double energy = integrate_adaptive(
        [&](double x) {
          const double qx = evaluate(v.q, x);
          return std::exp(-x * x) * qx * qx;
        },
        lo, hi, 1e-12, breakpoints(v.q));
    special::CompensatedSum captured;
    for (double c : out.projections) captured += c * c;
    out.tail_estimate = std::max(0.0, energy - captured.value());
    if (out.tail_estimate > 1e-8) {
      out.warnings.push_back("hermite_coefficients: dropped-coefficient energy " +
                             format_number(out.tail_estimate) + " exceeds 1e-8 at J = " + std::to_string(J));
    }
  }

  // x^2 = H_2/4 + 1/2 and the constant, added exactly
  out.values.resize(static_cast<std::size_t>(J + 1));
  for (int j = 0; j <= J; ++j) {
    out.values[static_cast<std::size_t>(j)] =
        out.projections[static_cast<std::size_t>(j)] * std::exp(-0.5 * log_norm_sq(j));
  }
  out.values[0] += 0.5 * v.harmonic + v.constant;
  out.projections[0] += (0.5 * v.harmonic + v.constant) * std::exp(0.5 * log_norm_sq(0));
  if (J >= 2) {
    out.values[2] += 0.25 * v.harmonic;
    out.projections[2] += 0.25 * v.harmonic * std::exp(0.5 * log_norm_sq(2));
  }
  return out;
}

HermiteCoefficients hermite_coefficients(const PotentialSpec& q, int J, int quad_nodes) {
  FullPotential v;
  v.harmonic = 0.0;
  v.q = q;
  return hermite_coefficients(v, J, quad_nodes);
}

}  // namespace hosc::potentials
