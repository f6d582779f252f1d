#pragma once

#include <array>
#include <variant>
#include <vector>

#include "thermobeam/model.hpp"
#include "thermobeam/state.hpp"

namespace thermobeam {

struct ZeroProfile {};

/// amplitude * exp(-xi^2 / (2 width^2)).
struct GaussianProfile {
  double amplitude = 1.0;
  double width = 1.0;
};

/// amplitude on |xi| in [center - half_width, center + half_width], zero elsewhere.
struct BandProfile {
  double center = 4.0;
  double half_width = 0.5;
  double amplitude = 1.0;
};

/// Piecewise-linear interpolation of values at increasing xi >= 0, zero outside.
struct TabulatedProfile {
  std::vector<double> xi;
  std::vector<cplx> values;
};

using Profile = std::variant<ZeroProfile, GaussianProfile, BandProfile, TabulatedProfile>;

/// Profiles are given on xi >= 0; negative xi returns the complex conjugate,
/// the transform of real-valued data.
cplx evaluate(const Profile& profile, double xi);
bool is_zero(const Profile& profile);
void validate(const Profile& profile);

/// Exact integral over the real line of |xi|^(2n) |P(xi)|^2.
double profile_moment(const Profile& profile, int n);

/// L1 norm in x of the function whose unitary transform is (i xi)^derivative P(xi).
/// Infinite for band profiles; throws DomainError for tabulated ones.
double profile_l1(const Profile& profile, int derivative);

enum class Component { V = 0, U, Z, Y, Theta, Q };
inline constexpr std::size_t kComponents = 6;

enum class QMode { Profile, QuasiStatic };

/// Per-mode initial memory moments, w_j(xi) = w_j e(xi), p_j(xi) = p_j |e(xi)|^2.
struct HistorySpec {
  std::vector<cplx> w;
  std::vector<double> p;
  Profile envelope = ZeroProfile{};

  bool is_zero() const;
};

struct InitialDataSpec {
  std::array<Profile, kComponents> components{};
  QMode q_mode = QMode::Profile;
  HistorySpec history;

  Profile& operator[](Component c) { return components[static_cast<std::size_t>(c)]; }
  const Profile& operator[](Component c) const { return components[static_cast<std::size_t>(c)]; }

  bool is_zero() const;
  /// Throws InvalidParameters/LawMismatch when the data cannot seed a state for (model, law).
  void validate(const Model& model, Law law) const;
};

/// Quasi-static heat flux -i xi theta / beta, the equilibrium of the Cattaneo flux law.
cplx quasi_static_flux(cplx theta, double xi, double beta);

FrequencyState make_state(const InitialDataSpec& spec, double xi, const Model& model, Law law);

struct InitialNorms {
  double l1 = 0.0;
  /// l2[k] = || d^k U0 / dx^k ||_2.
  std::vector<double> l2;
};

/// Closed-form norms of the data. History contributes to L2 via xi^2 sum p_j and
/// nothing to L1.
InitialNorms initial_norms(const InitialDataSpec& spec, const Model& model, Law law, int k_max);

}  // namespace thermobeam
