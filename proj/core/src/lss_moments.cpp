#include "covspec/lss_moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace covspec {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

KernelContext::KernelContext(AspectRatios r, SpectralMeasure h,
                             MomentProfile mp, Eigen::MatrixXcd g)
    : ratios(r), H(std::move(h)), moments(mp), gamma(std::move(g)) {
  if (gamma->rows() != gamma->cols())
    throw DimensionMismatch("KernelContext: Gamma must be square");
  Eigen::MatrixXcd sigma = (*gamma) * gamma->adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma,
                                                     Eigen::EigenvaluesOnly);
  const double norm = es.eigenvalues().maxCoeff();
  if (std::abs(norm - 1.0) > 1e-10)
    throw InvalidInput(
        "KernelContext: Gamma Gamma* must have unit spectral norm, got " +
        std::to_string(norm));
}

TestFunction tf_identity() {
  return {"x", [](cplx z) { return z; }, {}};
}
TestFunction tf_square() {
  return {"x^2", [](cplx z) { return z * z; }, {}};
}
TestFunction tf_cube() {
  return {"x^3", [](cplx z) { return z * z * z; }, {}};
}
TestFunction tf_log() {
  return {"log", [](cplx z) { return std::log(z); }, {0.0}};
}
TestFunction tf_polynomial(std::vector<double> coeffs) {
  return {"poly",
          [c = std::move(coeffs)](cplx z) {
            cplx acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
            return acc;
          },
          {}};
}

Contour Contour::circle(double r, int nodes) {
  if (!(r > 1.0)) throw InvalidInput("Contour::circle: radius must exceed 1");
  Contour c;
  c.kind = Kind::Circle;
  c.radius = r;
  c.nodes = nodes;
  return c;
}

Contour Contour::rectangle(double x_left, double x_right, double v0,
                           int nodes) {
  if (!(x_left < x_right) || !(v0 > 0.0))
    throw InvalidInput("Contour::rectangle: bad geometry");
  Contour c;
  c.kind = Kind::Rectangle;
  c.x_left = x_left;
  c.x_right = x_right;
  c.height = v0;
  c.nodes = nodes;
  return c;
}

cplx Contour::point(double theta, const AspectRatios& ratios) const {
  if (kind == Kind::Circle) {
    const double sq = std::sqrt(ratios.c1 * ratios.c2);
    const cplx w = radius * std::polar(1.0, theta);
    return ratios.c1 + ratios.c2 + sq * (w + 1.0 / w);
  }
  // rectangle traversed counterclockwise, arc-length parametrized by theta
  const double W = x_right - x_left, Hh = 2.0 * height;
  const double P = 2.0 * (W + Hh);
  double sarc = theta / (2.0 * kPi) * P;
  if (sarc < W) return {x_left + sarc, -height};
  sarc -= W;
  if (sarc < Hh) return {x_right, -height + sarc};
  sarc -= Hh;
  if (sarc < W) return {x_right - sarc, height};
  sarc -= W;
  return {x_left, height - sarc};
}

cplx Contour::derivative(double theta, const AspectRatios& ratios) const {
  if (kind == Kind::Circle) {
    const double sq = std::sqrt(ratios.c1 * ratios.c2);
    const cplx w = radius * std::polar(1.0, theta);
    return cplx(0.0, 1.0) * sq * (w - 1.0 / w);
  }
  const double W = x_right - x_left, Hh = 2.0 * height;
  const double P = 2.0 * (W + Hh);
  const double speed = P / (2.0 * kPi);
  double sarc = theta / (2.0 * kPi) * P;
  if (sarc < W) return {speed, 0.0};
  if (sarc < W + Hh) return {0.0, speed};
  if (sarc < 2.0 * W + Hh) return {-speed, 0.0};
  return {0.0, -speed};
}

double Contour::clearance(double x0, const AspectRatios& ratios) const {
  double best = std::numeric_limits<double>::infinity();
  const int K = 4096;
  for (int k = 0; k < K; ++k) {
    const double theta = 2.0 * kPi * (k + 0.5) / K;
    best = std::min(best, std::abs(point(theta, ratios) - cplx(x0, 0.0)));
  }
  return best;
}

namespace {

// winding number of the contour about a real point
int winding_number(const Contour& c, double x0, const AspectRatios& ratios) {
  const int K = 4096;
  double total = 0.0;
  double prev = std::arg(c.point(2.0 * kPi * 0.5 / K, ratios) - cplx(x0, 0.0));
  for (int k = 1; k <= K; ++k) {
    const double theta = 2.0 * kPi * (k + 0.5) / K;
    const double a = std::arg(c.point(theta, ratios) - cplx(x0, 0.0));
    double d = a - prev;
    while (d > kPi) d -= 2.0 * kPi;
    while (d < -kPi) d += 2.0 * kPi;
    total += d;
    prev = a;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

void validate_singularities(const TestFunction& f, const Contour& c,
                            const KernelContext& ctx) {
  const double zero_atom = std::max(0.0, 1.0 - ctx.ratios.c2 / ctx.ratios.c1);
  for (double x0 : f.singularities) {
    if (x0 == 0.0 && zero_atom > 0.0)
      throw LogDomain("test function singular at 0 but the limit law carries "
                      "an atom at 0 (p > n); refusing");
    if (c.clearance(x0, ctx.ratios) < 1e-6)
      throw InvalidInput("contour passes through a singularity of " + f.name);
    if (winding_number(c, x0, ctx.ratios) != 0)
      throw InvalidInput("contour encloses a singularity of " + f.name);
  }
}

struct NodeData {
  cplx z, dz, m, m_under;
  cplx g, h_self, denom;  // denom = g^2 - c1 c2 h(z,z)
};

// Solve the self-consistent equation along all contour nodes, exploiting
// conjugate symmetry m(conj z) = conj(m(z)) for the lower half-plane.
std::vector<NodeData> evaluate_nodes(const Contour& c, int N,
                                     const KernelContext& ctx,
                                     const SolverOptions& sopt) {
  std::vector<NodeData> out(N);
  const double c1 = ctx.ratios.c1, c2 = ctx.ratios.c2;
  cplx warm;
  bool have_warm = false;
  for (int k = 0; k < N; ++k) {
    const double theta = 2.0 * kPi * (k + 0.5) / N;
    cplx z = c.point(theta, ctx.ratios);
    cplx dz = c.derivative(theta, ctx.ratios);
    bool flip = z.imag() < 0.0;
    cplx zz = flip ? std::conj(z) : z;
    if (zz.imag() < 1e-12) zz += cplx(0.0, 1e-12);  // rectangle side crossing

    StieltjesSolution sol;
    try {
      sol = have_warm ? solve_from(zz, warm, ctx.ratios, ctx.H, sopt)
                      : solve(zz, ctx.ratios, ctx.H, sopt);
    } catch (const NonConvergence&) {
      sol = solve(zz, ctx.ratios, ctx.H, sopt);  // cold restart with homotopy
    }
    warm = sol.m;
    have_warm = true;

    NodeData nd;
    nd.z = z;
    nd.dz = dz;
    nd.m = flip ? std::conj(sol.m) : sol.m;
    nd.m_under = flip ? std::conj(sol.m_under) : sol.m_under;
    nd.g = g_fun(nd.z, ctx, nd.m_under);
    nd.h_self = h_fun(nd.z, nd.z, ctx, nd.m_under, nd.m_under);
    nd.denom = nd.g * nd.g - c1 * c2 * nd.h_self;
    out[k] = nd;
  }
  return out;
}

}  // namespace

cplx g_fun(cplx z, const KernelContext& ctx, cplx m_under) {
  cplx integral = 0.0;
  for (std::size_t i = 0; i < ctx.H.atoms().size(); ++i) {
    const double t = ctx.H.atoms()[i];
    const cplx denom = 1.0 + t * m_under;
    if (std::abs(denom) < 1e-14)
      throw PoleError("g_fun: 1 + t*m_under vanishes at t=" + std::to_string(t));
    integral += ctx.H.weights()[i] * t / denom;
  }
  return ctx.ratios.c1 * integral - z;
}

cplx h_fun(cplx z1, cplx z2, const KernelContext& ctx, cplx m1, cplx m2) {
  (void)z1;
  (void)z2;
  cplx s = 0.0;
  for (std::size_t i = 0; i < ctx.H.atoms().size(); ++i) {
    const double t = ctx.H.atoms()[i];
    const cplx d1 = 1.0 + t * m1, d2 = 1.0 + t * m2;
    if (std::abs(d1) < 1e-14 || std::abs(d2) < 1e-14)
      throw PoleError("h_fun: pole at atom t=" + std::to_string(t));
    s += ctx.H.weights()[i] * t * t / (d1 * d2);
  }
  return s;
}

namespace {

// Diagonal of G^* M G for square complex matrices, Hadamard-trace helper.
Eigen::VectorXcd sandwich_diagonal(const Eigen::MatrixXcd& G,
                                   const Eigen::MatrixXcd& M) {
  Eigen::MatrixXcd MG = M * G;
  Eigen::VectorXcd d(G.cols());
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    d(j) = G.col(j).adjoint() * MG.col(j);
  return d;
}

Eigen::MatrixXcd resolvent_power(const KernelContext& ctx, cplx m_under,
                                 int power) {
  const Eigen::MatrixXcd& G = *ctx.gamma;
  Eigen::MatrixXcd sigma = G * G.adjoint();
  Eigen::MatrixXcd A =
      m_under * sigma + Eigen::MatrixXcd::Identity(G.rows(), G.cols());
  Eigen::MatrixXcd inv = A.partialPivLu().inverse();
  Eigen::MatrixXcd out = inv;
  for (int i = 1; i < power; ++i) out *= inv;
  return out;
}

}  // namespace

cplx s_fun(cplx z, const KernelContext& ctx, cplx m) {
  (void)z;
  if (!ctx.gamma) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < ctx.H.atoms().size(); ++i) {
      const double t = ctx.H.atoms()[i];
      const cplx d = 1.0 + t * m;
      if (std::abs(d) < 1e-14) throw PoleError("s_fun: pole");
      s += ctx.H.weights()[i] * t * t / (d * d * d);
    }
    return s;
  }
  const Eigen::MatrixXcd& G = *ctx.gamma;
  Eigen::VectorXcd d1 = sandwich_diagonal(G, resolvent_power(ctx, m, 1));
  Eigen::VectorXcd d2 = sandwich_diagonal(G, resolvent_power(ctx, m, 2));
  return d1.cwiseProduct(d2).sum() / static_cast<double>(G.rows());
}

cplx t_fun(cplx z1, cplx z2, const KernelContext& ctx, cplx m1, cplx m2) {
  (void)z1;
  (void)z2;
  if (!ctx.gamma) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < ctx.H.atoms().size(); ++i) {
      const double t = ctx.H.atoms()[i];
      const cplx d1 = 1.0 + t * m1, d2 = 1.0 + t * m2;
      if (std::abs(d1) < 1e-14 || std::abs(d2) < 1e-14)
        throw PoleError("t_fun: pole");
      s += ctx.H.weights()[i] * t * t / (d1 * d1 * d2 * d2);
    }
    return s;
  }
  const Eigen::MatrixXcd& G = *ctx.gamma;
  Eigen::VectorXcd a = sandwich_diagonal(G, resolvent_power(ctx, m1, 2));
  Eigen::VectorXcd b = sandwich_diagonal(G, resolvent_power(ctx, m2, 2));
  return a.cwiseProduct(b).sum() / static_cast<double>(G.rows());
}

cplx mean_param(cplx z, const KernelContext& ctx, cplx m_under) {
  const double c1 = ctx.ratios.c1, c2 = ctx.ratios.c2;
  const double alpha = ctx.moments.alpha, delta = ctx.moments.delta;

  cplx j3 = 0.0;  // int t^2/(1+t m)^3 dH
  cplx j2 = 0.0;  // int (m t)^2/(1+t m)^2 dH
  for (std::size_t i = 0; i < ctx.H.atoms().size(); ++i) {
    const double t = ctx.H.atoms()[i];
    const cplx d = 1.0 + t * m_under;
    if (std::abs(d) < 1e-14) throw PoleError("mean_param: pole");
    j3 += ctx.H.weights()[i] * t * t / (d * d * d);
    j2 += ctx.H.weights()[i] * (m_under * t) * (m_under * t) / (d * d);
  }
  const cplx D = 1.0 - (c1 / c2) * j2;  // shared denominator factor
  if (std::abs(D) < 1e-10)
    throw NearSingular("mean_param: denominator ~ 0 (support edge)");

  const double pref = std::sqrt(c1 * c2) / (c2 * c2 * c2);
  const cplx m3 = m_under * m_under * m_under;
  cplx out = alpha * pref * m3 * j3 / (D * D);
  if (delta != 0.0) out += delta * pref * m3 * s_fun(z, ctx, m_under) / D;
  return out;
}

cplx cov_kernel(cplx z1, cplx z2, const KernelContext& ctx, cplx m1, cplx m2) {
  if (std::abs(z1 - z2) < 1e-12)
    throw CoincidentPoints("cov_kernel: z1 == z2");
  const double c1 = ctx.ratios.c1, c2 = ctx.ratios.c2;
  const double alpha = ctx.moments.alpha, delta = ctx.moments.delta;

  const cplx g1 = g_fun(z1, ctx, m1), g2 = g_fun(z2, ctx, m2);
  const cplx h11 = h_fun(z1, z1, ctx, m1, m1);
  const cplx h22 = h_fun(z2, z2, ctx, m2, m2);
  const cplx h12 = h_fun(z1, z2, ctx, m1, m2);
  const cplx den1 = g1 * g1 - c1 * c2 * h11;
  const cplx den2 = g2 * g2 - c1 * c2 * h22;

  const cplx bracket =
      (c1 * c2 * (h12 * h12 - h11 * h22) +
       (g1 * g1 * h22 + h11 * g2 * g2 - 2.0 * g1 * g2 * h12)) /
      (den1 * den2);
  cplx out = (1.0 + alpha) / ((z1 - z2) * (z1 - z2)) * bracket;
  if (delta != 0.0)
    out += delta * t_fun(z1, z2, ctx, m1, m2) / (den1 * den2);
  return out;
}

namespace {

// Generic single-contour integral -(1/2 pi i) oint f(z) K(node) dz with
// node doubling; K receives precomputed node data.
template <typename Kernel>
double stabilized_loop(const TestFunction& f, const KernelContext& ctx,
                       const Contour& contour, const QuadratureOptions& opt,
                       Kernel&& kernel, const char* what) {
  validate_singularities(f, contour, ctx);

  auto eval = [&](int N) -> cplx {
    auto nodes = evaluate_nodes(contour, N, ctx, opt.solver);
    cplx acc = 0.0;
    for (const auto& nd : nodes) acc += f.eval(nd.z) * kernel(nd) * nd.dz;
    acc *= 2.0 * kPi / N;
    return acc * cplx(0.0, 1.0) / (2.0 * kPi);  // -(1/2 pi i) * acc
  };

  int N = std::max(64, opt.initial_nodes);
  cplx prev = eval(N);
  double change = std::numeric_limits<double>::infinity();
  while (N < opt.max_nodes) {
    N *= 2;
    cplx cur = eval(N);
    change = std::abs(cur - prev);
    prev = cur;
    if (change <= opt.stability_tol) break;
  }
  if (change > opt.divergence_tol)
    throw QuadratureDiverged(std::string(what) +
                             ": node doubling unstable, last change " +
                             std::to_string(change));
  if (std::abs(prev.imag()) > 1e-8)
    throw Error(std::string(what) + ": imaginary residue " +
                std::to_string(prev.imag()) + " exceeds 1e-8");
  return prev.real();
}

}  // namespace

double lss_mean(const TestFunction& f, const KernelContext& ctx,
                const Contour& contour, const QuadratureOptions& opt) {
  return stabilized_loop(
      f, ctx, contour, opt,
      [&](const NodeData& nd) { return mean_param(nd.z, ctx, nd.m_under); },
      "lss_mean");
}

double lss_centering(const TestFunction& f, const KernelContext& ctx,
                     const Contour& contour, const QuadratureOptions& opt) {
  return stabilized_loop(
      f, ctx, contour, opt, [&](const NodeData& nd) { return nd.m; },
      "lss_centering");
}

double lss_cov(const TestFunction& fj, const TestFunction& fk,
               const KernelContext& ctx, const Contour& contour1,
               const Contour& contour2, const QuadratureOptions& opt) {
  validate_singularities(fj, contour1, ctx);
  validate_singularities(fk, contour2, ctx);

  if (contour1.kind == Contour::Kind::Circle &&
      contour2.kind == Contour::Kind::Circle) {
    if (!(contour1.radius > contour2.radius))
      throw ContourOverlap("lss_cov: outer contour must strictly enclose inner");
  } else {
    // conservative geometric check for mixed/rectangular contours
    double min_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 256; ++k) {
      const double th = 2.0 * kPi * (k + 0.5) / 256;
      const cplx p1 = contour1.point(th, ctx.ratios);
      for (int j = 0; j < 256; ++j) {
        const double th2 = 2.0 * kPi * (j + 0.5) / 256;
        min_gap = std::min(min_gap,
                           std::abs(p1 - contour2.point(th2, ctx.ratios)));
      }
    }
    if (min_gap < 1e-6) throw ContourOverlap("lss_cov: contours intersect");
  }

  const double c1 = ctx.ratios.c1, c2 = ctx.ratios.c2;
  const double alpha = ctx.moments.alpha, delta = ctx.moments.delta;
  const auto& atoms = ctx.H.atoms();
  const auto& weights = ctx.H.weights();
  const bool diagonal = !ctx.gamma.has_value();

  auto eval = [&](int N1, int N2) -> cplx {
    auto n1 = evaluate_nodes(contour1, N1, ctx, opt.solver);
    auto n2 = evaluate_nodes(contour2, N2, ctx, opt.solver);
    std::vector<cplx> fj1(n1.size()), fk2(n2.size());
    for (std::size_t a = 0; a < n1.size(); ++a) fj1[a] = fj.eval(n1[a].z);
    for (std::size_t b = 0; b < n2.size(); ++b) fk2[b] = fk.eval(n2[b].z);

    cplx acc = 0.0;
    for (std::size_t a = 0; a < n1.size(); ++a) {
      const NodeData& u = n1[a];
      cplx inner = 0.0;
      for (std::size_t b = 0; b < n2.size(); ++b) {
        const NodeData& v = n2[b];
        cplx h12 = 0.0, t12 = 0.0;
        if (diagonal) {
          for (std::size_t i = 0; i < atoms.size(); ++i) {
            const double t = atoms[i];
            const cplx d1 = 1.0 + t * u.m_under, d2 = 1.0 + t * v.m_under;
            const cplx base = weights[i] * t * t / (d1 * d2);
            h12 += base;
            if (delta != 0.0) t12 += base / (d1 * d2);
          }
        } else {
          h12 = h_fun(u.z, v.z, ctx, u.m_under, v.m_under);
          if (delta != 0.0) t12 = t_fun(u.z, v.z, ctx, u.m_under, v.m_under);
        }
        const cplx dz12 = u.z - v.z;
        const cplx bracket =
            (c1 * c2 * (h12 * h12 - u.h_self * v.h_self) +
             (u.g * u.g * v.h_self + u.h_self * v.g * v.g -
              2.0 * u.g * v.g * h12)) /
            (u.denom * v.denom);
        cplx kernel = (1.0 + alpha) / (dz12 * dz12) * bracket;
        if (delta != 0.0) kernel += delta * t12 / (u.denom * v.denom);
        inner += fk2[b] * kernel * v.dz;
      }
      acc += fj1[a] * inner * u.dz;
    }
    acc *= (2.0 * kPi / N1) * (2.0 * kPi / N2);
    return -acc / (4.0 * kPi * kPi);
  };

  int N = std::max(64, opt.initial_nodes);
  cplx prev = eval(N, N);
  double change = std::numeric_limits<double>::infinity();
  while (N < opt.max_nodes) {
    N *= 2;
    cplx cur = eval(N, N);
    change = std::abs(cur - prev);
    prev = cur;
    if (change <= opt.stability_tol) break;
  }
  if (change > opt.divergence_tol)
    throw QuadratureDiverged("lss_cov: node doubling unstable, last change " +
                             std::to_string(change));
  if (std::abs(prev.imag()) > 1e-8)
    throw Error("lss_cov: imaginary residue " + std::to_string(prev.imag()) +
                " exceeds 1e-8");
  return prev.real();
}

Contour default_contour(const KernelContext& ctx, double radius) {
  const bool is_delta1 = ctx.H.atoms().size() == 1;
  if (is_delta1) return Contour::circle(radius);
  // margins of 10% of the support width of F (support within [0, 1])
  return Contour::rectangle(-0.1, 1.1, 0.5);
}

IdentityClosedForms identity_closed_forms(const AspectRatios& ratios,
                                          const MomentProfile& moments) {
  const double c1 = ratios.c1, c2 = ratios.c2;
  const double a = moments.alpha, d = moments.delta;
  if (!(c2 > c1))
    throw LogDomain("identity_closed_forms: log-based entries need c2 > c1");

  IdentityClosedForms f;
  const double sc = std::sqrt(c1 * c2);
  const double lg = std::log(1.0 - c1 / c2);
  f.mean_f1 = 0.0;
  f.mean_f2 = sc * (a + d);
  f.mean_f3 = (a * lg - d * c1 / c2) / (2.0 * sc);
  f.cov_f1f1 = 1.0 + a + d;
  f.cov_f1f2 = 2.0 * (c1 + c2) * (1.0 + a + d);
  f.cov_f1f3 = (1.0 + a) / c2 + d / c2;
  f.cov_f2f2 = 4.0 * (c1 + c2) * (c1 + c2) * (1.0 + a + d) +
               2.0 * c1 * c2 * (1.0 + a);
  f.cov_f3f3 = -(1.0 + a) / (c1 * c2) * lg + d / (c2 * c2);
  f.theta1 = std::sqrt(c2 / c1);
  f.theta2 = std::sqrt(c2 / c1) * (c1 + c2);
  f.theta3 = (std::log(c2 - c1) - 1.0) / sc +
             std::sqrt(c2 / c1) * (std::log(c2) - std::log(c2 - c1)) / c1;
  return f;
}

LssMomentTable lss_moment_table(const std::vector<TestFunction>& fs,
                                const KernelContext& ctx,
                                const QuadratureOptions& opt) {
  Contour mean_contour = default_contour(ctx, 1.05);
  Contour outer = default_contour(ctx, 1.10);
  Contour inner = default_contour(ctx, 1.05);
  if (outer.kind == Contour::Kind::Rectangle) {
    outer.x_left -= 0.05;
    outer.x_right += 0.05;
    outer.height += 0.1;
  }

  LssMomentTable table;
  const std::size_t M = fs.size();
  table.means.resize(M);
  table.cov.assign(M, std::vector<double>(M, 0.0));
  for (std::size_t j = 0; j < M; ++j) {
    table.functions.push_back(fs[j].name);
    table.means[j] = lss_mean(fs[j], ctx, mean_contour, opt);
  }
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t k = j; k < M; ++k) {
      const double v = lss_cov(fs[j], fs[k], ctx, outer, inner, opt);
      table.cov[j][k] = v;
      table.cov[k][j] = v;
    }
  return table;
}

std::string LssMomentTable::to_json() const {
  nlohmann::json j;
  j["functions"] = functions;
  j["means"] = means;
  j["cov"] = cov;
  return j.dump();
}

std::string LssMomentTable::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "function,mean";
  for (const auto& f : functions) os << ",cov_" << f;
  os << "\n";
  for (std::size_t i = 0; i < functions.size(); ++i) {
    os << functions[i] << "," << means[i];
    for (std::size_t k = 0; k < functions.size(); ++k) os << "," << cov[i][k];
    os << "\n";
  }
  return os.str();
}

}  // namespace covspec
