#pragma once

#include <array>
#include <cmath>
#include <string>

namespace biquant {

// Shape parameters of the propagator on the 3-dimensional Eye, in relative coordinates
// (x, y, λ) of an ordered pair with the source gauge-fixed to (0, 0, 1).
//
// The 2-form is φ = dU∧dV with U circle-valued (period 1) and V ∈ [0, 1]; (U, V) is the
// azimuth/height chart of the unit-mass sphere, so φ is closed and has unit flux around
// the collision point. Near (0,0,1) the map is radial projection. Far away it is constant
// except over the channel {λ < λ₀, |y| < ε}, where φ = f(x) g_ε(y) dy∧dx.
struct PropagatorParams {
  double eps = 0.1;             // channel half-width
  double lambda0 = 0.3;         // channel onset
  double r0 = 0.35;             // inner radius of the azimuth blend (distance to the λ-axis point)
  double r1 = 0.7;              // outer radius of the azimuth blend, 1 - λ₀
  double sphere_radius = 0.2;   // radius of the cut sphere used for the flux certificate
  double sigma0 = 0.4;          // radial projection is exact for r < sigma0
  double sigma1 = 0.7;          // height equals the bump primitive for r > sigma1
  double a0 = 0.3;              // bump width on the collision axis
  std::string profile = "eye-v1";

  // Throws ValidationError when the constraints that make φ smooth are violated.
  void validate() const;
  // Identifier embedding every shape parameter; used as the cache profile.
  std::string profile_id() const;
  // Same without ε; weight tables carry one family and list ε per entry.
  std::string family_id() const;
};

// Smooth step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
double smooth_step(double t);
double smooth_step_derivative(double t);

// Bump f: positive on (-1, 1), zero outside, even, unit integral.
double propagator1(double x);
// Primitive F of f with F(-1) = 0, F(1) = 1.
double bump_primitive(double x);
// Channel density g_ε(y) = f(y/ε)/ε and its primitive.
double channel_density(double y, double eps);

// Forward-mode dual number with three partials.
struct Dual3 {
  double v = 0;
  std::array<double, 3> d{};

  Dual3() = default;
  Dual3(double value) : v(value) {}  // NOLINT: constants promote implicitly
  static Dual3 var(double value, int i) {
    Dual3 r(value);
    r.d[static_cast<std::size_t>(i)] = 1;
    return r;
  }
};

// U (mod 1) and V with their gradients in (x, y, λ).
struct EyeChart {
  Dual3 u;
  Dual3 v;
};

// Throws ValidationError on λ <= 0 or at the collision point.
EyeChart eye_chart(const std::array<double, 3>& e, const PropagatorParams& prm);

// Components (B_x, B_y, B_λ) of φ = B_x dy∧dλ + B_y dλ∧dx + B_λ dx∧dy, i.e. ∇U × ∇V.
std::array<double, 3> propagator2(const std::array<double, 3>& e, const PropagatorParams& prm);

struct PropagatorCertificate {
  double sphere_mass = 0;         // flux through the cut sphere
  double face_max = 0;            // largest |component| sampled on far faces
  double closedness_max = 0;      // largest central-difference divergence
  double channel_profile_err = 0; // largest relative error of ∫ φ dy against f(x)
  int closedness_points = 0;
};

// Quadrature and finite-difference checks. The divergence uses the sixth-order central
// stencil with step h at points outside the cut ball.
PropagatorCertificate certify(const PropagatorParams& prm, double h = 1e-3, int points = 200,
                              unsigned long long seed = 1);

}  // namespace biquant
