#include "biquant/propagator.hpp"

#include "biquant/errors.hpp"
#include "dual_ops.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

namespace biquant {

void PropagatorParams::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("propagator parameters: ") + what);
  };
  need(eps > 0 && eps < lambda0 && lambda0 < 1, "need 0 < eps < lambda0 < 1");
  need(r0 > 0 && r0 < r1 && r1 <= 1 - lambda0, "need 0 < r0 < r1 <= 1 - lambda0");
  need(eps < r0, "need eps < r0");
  need(a0 > 0 && a0 < sigma0 && sigma0 < sigma1 && sigma1 <= r1, "need 0 < a0 < sigma0 < sigma1 <= r1");
  need(sphere_radius > 0 && sphere_radius < sigma0 && sphere_radius < r0, "cut sphere must sit inside the radial zone");
}

std::string PropagatorParams::profile_id() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s(eps=%.6g,l0=%.6g,r0=%.6g,r1=%.6g,R=%.6g,s0=%.6g,s1=%.6g,a0=%.6g)", profile.c_str(), eps,
                lambda0, r0, r1, sphere_radius, sigma0, sigma1, a0);
  return buf;
}

std::string PropagatorParams::family_id() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s(l0=%.6g,r0=%.6g,r1=%.6g,R=%.6g,s0=%.6g,s1=%.6g,a0=%.6g)", profile.c_str(), lambda0, r0,
                r1, sphere_radius, sigma0, sigma1, a0);
  return buf;
}

namespace {

// z(t) = 1/(1-t) - 1/t, so that S(t) is the logistic function of z.
double logistic(double z) { return z >= 0 ? 1 / (1 + std::exp(-z)) : std::exp(z) / (1 + std::exp(z)); }

}  // namespace

double smooth_step(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  return logistic(1 / (1 - t) - 1 / t);
}

double smooth_step_derivative(double t) {
  if (t <= 0 || t >= 1) return 0;
  const double s = logistic(1 / (1 - t) - 1 / t);
  return s * (1 - s) * (1 / ((1 - t) * (1 - t)) + 1 / (t * t));
}

double propagator1(double x) { return 0.5 * smooth_step_derivative(0.5 * (x + 1)); }
double bump_primitive(double x) { return smooth_step(0.5 * (x + 1)); }
double channel_density(double y, double eps) { return propagator1(y / eps) / eps; }

EyeChart eye_chart(const std::array<double, 3>& e, const PropagatorParams& prm) {
  if (!(e[2] > 0)) throw ValidationError("eye point needs lambda > 0");
  const Dual3 x = Dual3::var(e[0], 0), y = Dual3::var(e[1], 1), lam = Dual3::var(e[2], 2);
  const Dual3 lm1 = lam - 1.0;
  const Dual3 rho = sqrt(y * y + lm1 * lm1);
  const Dual3 r = sqrt(x * x + rho * rho);
  if (r.v == 0) throw ValidationError("eye point at the collision point");

  const Dual3 kappa = smooth_step((rho - prm.r0) / (prm.r1 - prm.r0));
  Dual3 u(0.0);
  if (kappa.v < 1) {
    Dual3 psi = atan2(-y, lm1) / (2 * std::numbers::pi);
    if (psi.v < 0) psi.v += 1;
    u = (1.0 - kappa) * psi;
  }
  if (kappa.v > 0) {
    Dual3 l2(0.0);
    if (lam.v < 1) {
      Dual3 h(1.0);
      if (lam.v > prm.lambda0) {
        const Dual3 t = (lam - prm.lambda0) / (1 - prm.lambda0);
        h = 1.0 + smooth_step(t) * (lam - prm.lambda0) / (1.0 - lam);
      }
      l2 = smooth_step((y * h + prm.eps) / (2 * prm.eps));
    } else {
      l2 = Dual3(y.v > 0 ? 1.0 : 0.0);
    }
    u = u + kappa * l2;
  }
  u.v -= std::floor(u.v);

  const Dual3 sigma = smooth_step((r - prm.sigma0) / (prm.sigma1 - prm.sigma0));
  Dual3 v(0.0);
  if (sigma.v < 1) v = (1.0 - sigma) * (1.0 + x / r) * 0.5;
  if (sigma.v > 0) {
    const Dual3 a = prm.a0 + (1 - prm.a0) * kappa;
    v = v + sigma * smooth_step((x / a + 1.0) * 0.5);
  }
  return {u, v};
}

std::array<double, 3> propagator2(const std::array<double, 3>& e, const PropagatorParams& prm) {
  const auto [u, v] = eye_chart(e, prm);
  const auto& a = u.d;
  const auto& b = v.d;
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0);
  w.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2 / ((1 - z * z) * dp * dp);
  }
}

}  // namespace

PropagatorCertificate certify(const PropagatorParams& prm, double h, int points, unsigned long long seed) {
  prm.validate();
  PropagatorCertificate cert;
  std::vector<double> gx, gw;

  // Flux through the cut sphere, outward normal: Gauss-Legendre in cos θ (polar axis x),
  // trapezoid in the periodic azimuth.
  {
    const int nt = 48, np = 96;
    gauss_legendre(nt, gx, gw);
    const double R = prm.sphere_radius;
    double flux = 0;
    for (int i = 0; i < nt; ++i) {
      const double c = gx[static_cast<std::size_t>(i)], s = std::sqrt(1 - c * c);
      for (int j = 0; j < np; ++j) {
        const double ph = 2 * std::numbers::pi * (j + 0.5) / np;
        const std::array<double, 3> n{c, s * std::cos(ph), s * std::sin(ph)};
        const auto B = propagator2({R * n[0], R * n[1], 1 + R * n[2]}, prm);
        flux += gw[static_cast<std::size_t>(i)] * (2 * std::numbers::pi / np) * R * R * (B[0] * n[0] + B[1] * n[1] + B[2] * n[2]);
      }
    }
    cert.sphere_mass = flux;
  }

  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1p-53; };
  auto maxabs = [](const std::array<double, 3>& B) { return std::max({std::abs(B[0]), std::abs(B[1]), std::abs(B[2])}); };

  // Far faces: x → ±∞, |y| → ∞, λ → ∞, and λ → 0 away from the channel.
  for (int k = 0; k < points; ++k) {
    const double big = uni(2, 50);
    const std::array<std::array<double, 3>, 7> probes{{
        {big, uni(-3, 3), uni(0.01, 5)},
        {-big, uni(-3, 3), uni(0.01, 5)},
        {uni(-3, 3), big, uni(0.01, 5)},
        {uni(-3, 3), -big, uni(0.01, 5)},
        {uni(-3, 3), uni(-3, 3), 1 + big},
        {uni(-3, 3), uni(prm.eps, 3), uni(1e-6, 1e-2)},
        {uni(-3, 3), -uni(prm.eps, 3), uni(1e-6, 1e-2)},
    }};
    for (const auto& p : probes) cert.face_max = std::max(cert.face_max, maxabs(propagator2(p, prm)));
  }

  // Closedness: divergence of B at points of the truncated Eye (outside the cut ball, λ >= 0.05).
  for (int k = 0; k < points;) {
    const std::array<double, 3> p{uni(-1.2, 1.2), uni(-1, 1), uni(0.05, 2)};
    const double dist = std::sqrt(p[0] * p[0] + p[1] * p[1] + (p[2] - 1) * (p[2] - 1));
    if (dist < prm.sphere_radius) continue;
    double div = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      auto at = [&](int step) {
        auto q = p;
        q[i] += step * h;
        return propagator2(q, prm)[i];
      };
      div += (at(3) - 9 * at(2) + 45 * at(1) - 45 * at(-1) + 9 * at(-2) - at(-3)) / (60 * h);
    }
    cert.closedness_max = std::max(cert.closedness_max, std::abs(div));
    ++cert.closedness_points;
    ++k;
  }

  // Channel profile: on the plane λ = const < λ₀, ∫ (-B_λ) dy over the strip should be f(x).
  {
    gauss_legendre(64, gx, gw);
    const double lam = 0.5 * prm.lambda0;
    for (int k = 0; k <= 40; ++k) {
      const double x = -0.95 + 1.9 * k / 40;
      double integral = 0;
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const double y = 1.01 * prm.eps * gx[i];
        integral -= 1.01 * prm.eps * gw[i] * propagator2({x, y, lam}, prm)[2];
      }
      const double fx = propagator1(x);
      if (fx > 1e-3) cert.channel_profile_err = std::max(cert.channel_profile_err, std::abs(integral - fx) / fx);
    }
  }
  return cert;
}

}  // namespace biquant
