#include "thermobeam/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "thermobeam/error.hpp"

namespace thermobeam {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

cplx evaluate_nonnegative(const Profile& profile, double xi) {
  return std::visit(
      overloaded{
          [](const ZeroProfile&) { return cplx{}; },
          [xi](const GaussianProfile& g) {
            return cplx{g.amplitude * std::exp(-xi * xi / (2.0 * g.width * g.width)), 0.0};
          },
          [xi](const BandProfile& b) {
            return std::abs(xi - b.center) <= b.half_width ? cplx{b.amplitude, 0.0} : cplx{};
          },
          [xi](const TabulatedProfile& t) {
            if (t.xi.empty() || xi < t.xi.front() || xi > t.xi.back()) return cplx{};
            auto it = std::upper_bound(t.xi.begin(), t.xi.end(), xi);
            if (it == t.xi.end()) return t.values.back();
            const std::size_t i = static_cast<std::size_t>(it - t.xi.begin());
            const double s = (xi - t.xi[i - 1]) / (t.xi[i] - t.xi[i - 1]);
            return (1.0 - s) * t.values[i - 1] + s * t.values[i];
          },
      },
      profile);
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

// Probabilists' Hermite polynomial He_n.
double hermite_e(int n, double x) {
  double h0 = 1.0, h1 = x;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = x * h1 - k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// Integral of |He_n(x)| exp(-x^2/2) over the real line, n >= 1. Between consecutive
// roots of He_n the integrand keeps its sign and has antiderivative -He_{n-1} exp(-x^2/2).
double abs_hermite_l1(int n) {
  auto f = [n](double x) { return hermite_e(n, x); };
  auto antiderivative = [n](double x) { return std::isinf(x) ? 0.0 : -hermite_e(n - 1, x) * std::exp(-0.5 * x * x); };
  // Every root of He_n lies in |x| < 2 sqrt(n) + 1.
  const double lim = 2.0 * std::sqrt(static_cast<double>(n)) + 1.0;
  const int cells = 4000;
  std::vector<double> breaks{-std::numeric_limits<double>::infinity()};
  for (int i = 0; i < cells; ++i) {
    double a = -lim + 2.0 * lim * i / cells, b = -lim + 2.0 * lim * (i + 1) / cells;
    if (f(a) == 0.0) {
      breaks.push_back(a);
      continue;
    }
    if ((f(a) < 0.0) == (f(b) < 0.0) || f(b) == 0.0) continue;
    const bool a_negative = f(a) < 0.0;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double mid = 0.5 * (a + b);
      ((f(mid) < 0.0) == a_negative ? a : b) = mid;
    }
    breaks.push_back(0.5 * (a + b));
  }
  breaks.push_back(std::numeric_limits<double>::infinity());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    sum += std::abs(antiderivative(breaks[i + 1]) - antiderivative(breaks[i]));
  }
  return sum;
}

}  // namespace

cplx evaluate(const Profile& profile, double xi) {
  if (xi < 0.0) return std::conj(evaluate_nonnegative(profile, -xi));
  return evaluate_nonnegative(profile, xi);
}

bool is_zero(const Profile& profile) {
  return std::visit(overloaded{
                        [](const ZeroProfile&) { return true; },
                        [](const GaussianProfile& g) { return g.amplitude == 0.0; },
                        [](const BandProfile& b) { return b.amplitude == 0.0; },
                        [](const TabulatedProfile& t) {
                          return std::all_of(t.values.begin(), t.values.end(),
                                             [](cplx c) { return c == cplx{}; });
                        },
                    },
                    profile);
}

void validate(const Profile& profile) {
  std::visit(overloaded{
                 [](const ZeroProfile&) {},
                 [](const GaussianProfile& g) {
                   if (!(g.width > 0.0) || !std::isfinite(g.amplitude))
                     throw InvalidParameters("gaussian profile needs finite amplitude and width > 0");
                 },
                 [](const BandProfile& b) {
                   if (!(b.half_width > 0.0) || !(b.center >= 0.0) || !std::isfinite(b.amplitude))
                     throw InvalidParameters("band profile needs center >= 0, half_width > 0");
                 },
                 [](const TabulatedProfile& t) {
                   if (t.xi.size() != t.values.size() || t.xi.size() < 2)
                     throw InvalidParameters("tabulated profile needs >= 2 (xi, value) pairs");
                   if (t.xi.front() < 0.0) throw InvalidParameters("tabulated profile xi must be >= 0");
                   for (std::size_t i = 1; i < t.xi.size(); ++i)
                     if (!(t.xi[i] > t.xi[i - 1])) throw InvalidParameters("tabulated xi must increase");
                 },
             },
             profile);
}

double profile_moment(const Profile& profile, int n) {
  return std::visit(
      overloaded{
          [](const ZeroProfile&) { return 0.0; },
          [n](const GaussianProfile& g) {
            return g.amplitude * g.amplitude * std::pow(g.width, 2 * n + 1) * std::tgamma(n + 0.5);
          },
          [n](const BandProfile& b) {
            const double hi = b.center + b.half_width;
            const double lo = std::max(0.0, b.center - b.half_width);
            return 2.0 * b.amplitude * b.amplitude * (std::pow(hi, 2 * n + 1) - std::pow(lo, 2 * n + 1)) /
                   (2 * n + 1);
          },
          [n](const TabulatedProfile& t) {
            double total = 0.0;
            for (std::size_t i = 1; i < t.xi.size(); ++i) {
              const double a = t.xi[i - 1], b = t.xi[i];
              const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
              for (std::size_t g = 0; g < kGlNodes.size(); ++g) {
                const double x = mid + half * kGlNodes[g];
                const double s = (x - a) / (b - a);
                const cplx val = (1.0 - s) * t.values[i - 1] + s * t.values[i];
                total += half * kGlWeights[g] * std::pow(x, 2 * n) * std::norm(val);
              }
            }
            return 2.0 * total;
          },
      },
      profile);
}

double profile_l1(const Profile& profile, int derivative) {
  return std::visit(
      overloaded{
          [](const ZeroProfile&) { return 0.0; },
          [derivative](const GaussianProfile& g) {
            // d^n/dx^n of A w exp(-w^2 x^2/2) is A w^(n+1) (-1)^n He_n(wx) exp(-(wx)^2/2).
            if (derivative == 0) return std::abs(g.amplitude) * std::sqrt(2.0 * std::numbers::pi);
            return std::abs(g.amplitude) * std::pow(g.width, derivative) * abs_hermite_l1(derivative);
          },
          [](const BandProfile& b) {
            return b.amplitude == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
          },
          [](const TabulatedProfile&) -> double {
            throw DomainError("L1 norm is not available for tabulated profiles");
          },
      },
      profile);
}

bool HistorySpec::is_zero() const {
  if (thermobeam::is_zero(envelope)) return true;
  return std::all_of(w.begin(), w.end(), [](cplx c) { return c == cplx{}; }) &&
         std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; });
}

bool InitialDataSpec::is_zero() const {
  return std::all_of(components.begin(), components.end(), [](const Profile& p) { return thermobeam::is_zero(p); }) &&
         history.is_zero();
}

void InitialDataSpec::validate(const Model& model, Law law) const {
  for (const auto& p : components) thermobeam::validate(p);
  if (law == Law::Fourier && q_mode == QMode::Profile && !thermobeam::is_zero((*this)[Component::Q])) {
    throw LawMismatch("a q profile was given but the Fourier law has no heat-flux unknown");
  }
  if (!history.w.empty() || !history.p.empty()) {
    thermobeam::validate(history.envelope);
    const auto& modes = model.kernel().modes;
    if (history.w.size() != modes.size() || history.p.size() != modes.size()) {
      throw InvalidParameters("initial history needs one (w, p) pair per kernel mode");
    }
    for (std::size_t j = 0; j < modes.size(); ++j) {
      if (history.p[j] < 0.0) throw InvalidParameters("initial second moment p_j must be >= 0");
      if (std::norm(history.w[j]) > modes[j].g / modes[j].mu * history.p[j] * (1.0 + 1e-12)) {
        throw InvalidParameters("initial moments violate |w_j|^2 <= (g_j/mu_j) p_j for mode " +
                                std::to_string(j));
      }
    }
  }
}

cplx quasi_static_flux(cplx theta, double xi, double beta) { return cplx{0.0, -xi} * theta / beta; }

FrequencyState make_state(const InitialDataSpec& spec, double xi, const Model& model, Law law) {
  FrequencyState s = FrequencyState::zero(law, model.modes());
  s.v = evaluate(spec[Component::V], xi);
  s.u = evaluate(spec[Component::U], xi);
  s.z = evaluate(spec[Component::Z], xi);
  s.y = evaluate(spec[Component::Y], xi);
  s.theta = evaluate(spec[Component::Theta], xi);
  if (law == Law::Cattaneo) {
    s.q = spec.q_mode == QMode::QuasiStatic ? quasi_static_flux(s.theta, xi, model.params().beta)
                                            : evaluate(spec[Component::Q], xi);
  }
  if (!spec.history.w.empty()) {
    const cplx e = evaluate(spec.history.envelope, xi);
    for (std::size_t j = 0; j < s.modes(); ++j) {
      s.w[j] = spec.history.w[j] * e;
      s.p[j] = spec.history.p[j] * std::norm(e);
    }
  }
  return s;
}

InitialNorms initial_norms(const InitialDataSpec& spec, const Model& model, Law law, int k_max) {
  InitialNorms out;
  const double beta = model.params().beta;
  const bool quasi_static_q = law == Law::Cattaneo && spec.q_mode == QMode::QuasiStatic;
  const std::size_t point_fields = law == Law::Cattaneo && !quasi_static_q ? kComponents : kComponents - 1;

  for (std::size_t c = 0; c < point_fields; ++c) out.l1 += profile_l1(spec.components[c], 0);
  if (quasi_static_q) out.l1 += profile_l1(spec[Component::Theta], 1) / beta;

  for (int k = 0; k <= k_max; ++k) {
    double sq = 0.0;
    for (std::size_t c = 0; c < point_fields; ++c) sq += profile_moment(spec.components[c], k);
    if (quasi_static_q) sq += profile_moment(spec[Component::Theta], k + 1) / (beta * beta);
    if (!spec.history.p.empty()) {
      double psum = 0.0;
      for (double pj : spec.history.p) psum += pj;
      sq += psum * profile_moment(spec.history.envelope, k + 1);
    }
    out.l2.push_back(std::sqrt(sq));
  }
  return out;
}

}  // namespace thermobeam
